//! Blowing up the three equal blocks of an outline square, and frequency
//! arrays with their outline arrays: sums, amalgamation, and the add-on
//! array that grows `m` equal parts from size `h_{m+1}` to size `h_m`.

use std::collections::HashMap;

use serde::Serialize;

use crate::base::ls_one_big;
use crate::error::{ensure, Error, Result};
use crate::multiset::Multiset;
use crate::outline::OutlineRectangle;
use crate::partition::Partition;

/// The split of the `r(g - H)` extra tail symbols between the two cyclic
/// triples of off-diagonal corner cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlowupPlan {
    pub g: usize,
    pub p: usize,
    pub q: usize,
    /// `p_i` for the tail parts, in tail order.
    pub p_parts: Vec<usize>,
    pub q_parts: Vec<usize>,
    pub beta1: usize,
    pub beta2: usize,
}

impl BlowupPlan {
    /// Greedy plan: `p` as large as the first triple allows, `p_i` filled in
    /// tail order.
    pub fn new(h: usize, tail: &[usize], g: usize, beta1: usize, beta2: usize) -> Result<Self> {
        ensure!(g >= h, Precondition, "target size {g} is below {h}");
        let r: usize = tail.iter().sum();
        let need = r * (g - h);
        let room = g * g - h * h;
        ensure!(
            need <= 2 * room + beta1 + beta2,
            Infeasible,
            "r(g - H) = {need} exceeds 2(g^2 - H^2) + beta1 + beta2 = {}",
            2 * room + beta1 + beta2
        );
        let p = need.min(room + beta1);
        let q = need - p;
        ensure!(q <= room + beta2, Internal, "q = {q} exceeds its bound");
        let mut left = p;
        let mut p_parts = Vec::with_capacity(tail.len());
        let mut q_parts = Vec::with_capacity(tail.len());
        for &hi in tail {
            let total = hi * (g - h);
            let take = total.min(left);
            left -= take;
            p_parts.push(take);
            q_parts.push(total - take);
        }
        debug_assert_eq!(left, 0);
        Ok(Self { g, p, q, p_parts, q_parts, beta1, beta2 })
    }
}

/// Blows the first three blocks of an outline square for
/// `(H, H, H, h_4, ..., h_k)` up to size `g`.
///
/// `beta1` copies of 0, 1, 2 must sit in cells (1,2), (2,0), (0,1) and
/// `beta2` copies of 0, 1, 2 in cells (2,1), (0,2), (1,0).
pub fn blow_up(o: &OutlineRectangle, g: usize, beta1: usize, beta2: usize) -> Result<OutlineRectangle> {
    let p = o.rows();
    ensure!(o.cols() == p && o.syms() == p, Precondition, "not an outline square");
    ensure!(p.len() >= 3, Precondition, "need at least three parts");
    let h = p.part(0);
    ensure!(p.part(1) == h && p.part(2) == h, Precondition, "first three parts differ");
    for i in 0..p.len() {
        ensure!(
            *o.cell(i, i) == Multiset::repeated(i, p.part(i) * p.part(i)),
            Precondition,
            "diagonal cell {i} is not constant"
        );
    }
    for (x, y, s) in [(1, 2, 0), (2, 0, 1), (0, 1, 2)] {
        ensure!(o.cell(x, y).count(s) >= beta1, Precondition, "cell ({x}, {y}) holds fewer than {beta1} copies of {s}");
    }
    for (x, y, s) in [(2, 1, 0), (0, 2, 1), (1, 0, 2)] {
        ensure!(o.cell(x, y).count(s) >= beta2, Precondition, "cell ({x}, {y}) holds fewer than {beta2} copies of {s}");
    }
    let tail = &p.parts()[3..];
    let plan = BlowupPlan::new(h, tail, g, beta1, beta2)?;
    let mut parts = vec![g; 3];
    parts.extend(tail);
    let np = Partition::new(parts)?;
    let mut out = OutlineRectangle::empty(np.clone(), np.clone(), np.clone());
    for x in 0..p.len() {
        for y in 0..p.len() {
            out.set_cell(x, y, o.cell(x, y).clone());
        }
    }
    let s1 = Multiset::from_pairs(plan.p_parts.iter().enumerate().map(|(i, &c)| (i + 3, c)));
    let s2 = Multiset::from_pairs(plan.q_parts.iter().enumerate().map(|(i, &c)| (i + 3, c)));
    let room = (g * g - h * h) as i64;
    let shift1 = plan.p as i64 - room;
    let shift2 = plan.q as i64 - room;
    let adjust = |m: &mut Multiset, add: &Multiset, sym: usize, remove: i64| -> Result<()> {
        m.union_with(add);
        if remove >= 0 {
            ensure!(m.remove(sym, remove as usize), Internal, "blow-up removes {remove} copies of {sym} that are absent");
        } else {
            m.add(sym, (-remove) as usize);
        }
        Ok(())
    };
    for i in 0..3 {
        out.set_cell(i, i, Multiset::repeated(i, g * g));
    }
    for (x, y, s) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        adjust(out.cell_mut(x, y), &s1, s, shift1)?;
    }
    for (x, y, s) in [(1, 0, 2), (2, 1, 0), (0, 2, 1)] {
        adjust(out.cell_mut(x, y), &s2, s, shift2)?;
    }
    // (row symbol for p_j, row symbol for q_j) in rows 0..3, and likewise
    // for columns 0..3
    let row_syms = [(2, 1), (0, 2), (1, 0)];
    let col_syms = [(1, 2), (2, 0), (0, 1)];
    for (idx, (&pj, &qj)) in plan.p_parts.iter().zip(&plan.q_parts).enumerate() {
        let j = idx + 3;
        for (x, &(a, b)) in row_syms.iter().enumerate() {
            let cell = out.cell_mut(x, j);
            cell.add(a, pj);
            cell.add(b, qj);
        }
        for (y, &(a, b)) in col_syms.iter().enumerate() {
            let cell = out.cell_mut(j, y);
            cell.add(a, pj);
            cell.add(b, qj);
        }
    }
    out.validate().into_result("blown-up outline")?;
    Ok(out)
}

/// A `k x k` array of non-negative integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrequencyArray {
    k: usize,
    entries: Vec<usize>,
}

impl FrequencyArray {
    pub fn new(k: usize, entries: Vec<usize>) -> Result<Self> {
        ensure!(entries.len() == k * k, Malformed, "{} entries for order {k}", entries.len());
        Ok(Self { k, entries })
    }

    pub fn from_fn(k: usize, mut f: impl FnMut(usize, usize) -> usize) -> Self {
        let entries = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).map(|(i, j)| f(i, j)).collect();
        Self { k, entries }
    }

    /// `F(i,j) = h_i h_j`: the array of an outline square.
    pub fn of_partition(p: &Partition) -> Self {
        Self::from_fn(p.len(), |i, j| p.part(i) * p.part(j))
    }

    /// `F(i,j) = h_i h_j` off the diagonal, 0 on it.
    pub fn off_diagonal(p: &Partition) -> Self {
        Self::from_fn(p.len(), |i, j| if i == j { 0 } else { p.part(i) * p.part(j) })
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.entries[i * self.k + j]
    }
}

/// A `k x k` array of multisets over `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutlineArray {
    k: usize,
    cells: Vec<Multiset>,
}

impl OutlineArray {
    pub fn empty(k: usize) -> Self {
        Self { k, cells: vec![Multiset::new(); k * k] }
    }

    /// The cells of an outline square, forgetting its partitions.
    pub fn from_outline(o: &OutlineRectangle) -> Result<Self> {
        let k = o.height();
        ensure!(o.width() == k && o.syms().len() == k, Malformed, "outline is not square");
        Ok(Self { k, cells: o.cells().to_vec() })
    }

    /// Attaches the partition `p` in all three roles.
    pub fn into_outline(self, p: &Partition) -> Result<OutlineRectangle> {
        ensure!(p.len() == self.k, Malformed, "partition has {} parts for order {}", p.len(), self.k);
        OutlineRectangle::new(p.clone(), p.clone(), p.clone(), self.cells)
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn cell(&self, i: usize, j: usize) -> &Multiset {
        &self.cells[i * self.k + j]
    }

    pub fn cell_mut(&mut self, i: usize, j: usize) -> &mut Multiset {
        &mut self.cells[i * self.k + j]
    }

    /// Copies of `symbol` in row `i`.
    pub fn row_count(&self, i: usize, symbol: usize) -> usize {
        (0..self.k).map(|j| self.cell(i, j).count(symbol)).sum()
    }

    /// Copies of `symbol` in column `j`.
    pub fn col_count(&self, j: usize, symbol: usize) -> usize {
        (0..self.k).map(|i| self.cell(i, j).count(symbol)).sum()
    }

    /// Lists every mismatch against `f`: cell sizes, row counts
    /// (`O_l^i = F(i,l)`) and column counts (`^jO_l = F(l,j)`).
    pub fn mismatches(&self, f: &FrequencyArray) -> Vec<String> {
        let k = self.k;
        if f.order() != k {
            return vec![format!("order {k} against frequency array of order {}", f.order())];
        }
        let mut out = Vec::new();
        let mut rows = vec![0usize; k * k];
        let mut cols = vec![0usize; k * k];
        for i in 0..k {
            for j in 0..k {
                let cell = self.cell(i, j);
                if cell.len() != f.get(i, j) {
                    out.push(format!("cell ({i}, {j}) has {} symbols, expected {}", cell.len(), f.get(i, j)));
                }
                for (s, c) in cell.iter() {
                    if s >= k {
                        out.push(format!("cell ({i}, {j}) holds symbol {s} outside 0..{k}"));
                        continue;
                    }
                    rows[i * k + s] += c;
                    cols[j * k + s] += c;
                }
            }
        }
        for a in 0..k {
            for l in 0..k {
                if rows[a * k + l] != f.get(a, l) {
                    out.push(format!("row {a} has {} copies of {l}, expected {}", rows[a * k + l], f.get(a, l)));
                }
                if cols[a * k + l] != f.get(l, a) {
                    out.push(format!("column {a} has {} copies of {l}, expected {}", cols[a * k + l], f.get(l, a)));
                }
            }
        }
        out
    }

    pub fn corresponds_to(&self, f: &FrequencyArray) -> bool {
        self.mismatches(f).is_empty()
    }

    pub(crate) fn check(&self, f: &FrequencyArray, context: &str) -> Result<()> {
        match self.mismatches(f).first() {
            None => Ok(()),
            Some(m) => Err(Error::Internal(format!("{context}: {m}"))),
        }
    }

    /// Every count multiplied by `factor`.
    pub fn scaled(&self, factor: usize) -> Self {
        Self { k: self.k, cells: self.cells.iter().map(|c| c.scaled(factor)).collect() }
    }

    /// Regroups rows, columns and symbols by `map` (old index to group).
    fn regroup(&self, map: &[usize], groups: usize) -> Self {
        let mut out = Self::empty(groups);
        for i in 0..self.k {
            for j in 0..self.k {
                let moved = self.cell(i, j).map_symbols(|s| map[s]);
                out.cell_mut(map[i], map[j]).union_with(&moved);
            }
        }
        out
    }
}

/// Cellwise multiset union; the result corresponds to `F_1 + F_2`.
pub fn sum_outline_arrays(a: &OutlineArray, b: &OutlineArray) -> Result<OutlineArray> {
    ensure!(a.k == b.k, Malformed, "orders {} and {} differ", a.k, b.k);
    let cells = a
        .cells
        .iter()
        .zip(&b.cells)
        .map(|(x, y)| {
            let mut m = x.clone();
            m.union_with(y);
            m
        })
        .collect();
    Ok(OutlineArray { k: a.k, cells })
}

/// Amalgamates by a set partition of `0..k`, given as groups. Groups are
/// numbered by their smallest element.
pub fn amalgamate_outline_array(o: &OutlineArray, groups: &[Vec<usize>]) -> Result<OutlineArray> {
    let k = o.k;
    let mut map = vec![usize::MAX; k];
    let mut order: Vec<&Vec<usize>> = groups.iter().collect();
    ensure!(order.iter().all(|g| !g.is_empty()), Malformed, "empty group");
    order.sort_by_key(|g| *g.iter().min().expect("non-empty"));
    for (gi, g) in order.iter().enumerate() {
        for &x in g.iter() {
            ensure!(x < k, Malformed, "index {x} outside 0..{k}");
            ensure!(map[x] == usize::MAX, Malformed, "index {x} appears twice");
            map[x] = gi;
        }
    }
    ensure!(map.iter().all(|&m| m != usize::MAX), Malformed, "groups do not cover 0..{k}");
    Ok(o.regroup(&map, order.len()))
}

/// The frequency array of the add-on construction: `h_m + h_{m+1}` between
/// distinct leading indices, `h_j` between a leading and a tail index, 0
/// elsewhere. `tail` lists `h_{m+1}, ..., h_k`.
pub fn add_on_frequency(m: usize, hm: usize, tail: &[usize]) -> FrequencyArray {
    let k = m + tail.len();
    let hm1 = tail.first().copied().unwrap_or(0);
    let h = |i: usize| tail[i - m];
    FrequencyArray::from_fn(k, |i, j| match (i < m, j < m) {
        _ if i == j => 0,
        (true, true) => hm + hm1,
        (true, false) => h(j),
        (false, true) => h(i),
        (false, false) => 0,
    })
}

/// Outline array for [`add_on_frequency`]`(m, hm, tail)`, built as a sum of
/// `h_m + h_{m+1}` reduced realizations of `(|A_n|, 1^m)` where the tail
/// multiset `A` is dealt round-robin into the groups `A_n`.
///
/// Requires `m >= 3`, `h_m >= h_{m+1} >= ... >= h_k` and
/// `h_{m+1} + ... + h_k <= (m - 1)(h_m + h_{m+1})`.
pub fn add_on_outline(m: usize, hm: usize, tail: &[usize]) -> Result<OutlineArray> {
    ensure!(m >= 3, Precondition, "m = {m} must be at least 3");
    ensure!(!tail.is_empty(), Precondition, "tail must be non-empty");
    ensure!(tail[0] <= hm, Precondition, "h_(m+1) = {} exceeds h_m = {hm}", tail[0]);
    ensure!(
        tail.windows(2).all(|w| w[0] >= w[1]) && tail.iter().all(|&x| x > 0),
        Precondition,
        "tail must be positive and non-increasing"
    );
    let hm1 = tail[0];
    let total: usize = tail.iter().sum();
    let groups = hm + hm1;
    ensure!(
        total <= (m - 1) * groups,
        Precondition,
        "tail sum {total} exceeds (m-1)(h_m + h_(m+1)) = {}",
        (m - 1) * groups
    );
    let k = m + tail.len();
    // deal A round-robin: counts[n][j] = copies of tail symbol m + j in A_n
    let mut counts = vec![vec![0usize; tail.len()]; groups];
    let mut next = 0;
    for (j, &hj) in tail.iter().enumerate() {
        for _ in 0..hj {
            counts[next][j] += 1;
            next = (next + 1) % groups;
        }
    }
    let mut cache: HashMap<usize, crate::square::LatinSquare> = HashMap::new();
    let mut sum = OutlineArray::empty(k);
    for a in &counts {
        let s: usize = a.iter().sum();
        ensure!(s < m, Internal, "group of size {s} exceeds m - 1");
        if let std::collections::hash_map::Entry::Vacant(e) = cache.entry(s) {
            e.insert(ls_one_big(s, m)?.0);
        }
        let square = &cache[&s];
        let part = reduce_one_big(square, s, m, a);
        sum = sum_outline_arrays(&sum, &part)?;
    }
    sum.check(&add_on_frequency(m, hm, tail), "add-on outline array")?;
    Ok(sum)
}

/// Reduces a realization of `(s, 1^m)` (big block first) to an order-`k`
/// array: singleton `u` becomes index `u`, and the big block's rows,
/// columns and symbols are cut into runs of `a[j]` that become index
/// `m + j`. The big subsquare and the singleton diagonal are dropped.
fn reduce_one_big(square: &crate::square::LatinSquare, s: usize, m: usize, a: &[usize]) -> OutlineArray {
    let k = m + a.len();
    let mut big = Vec::with_capacity(s);
    for (j, &c) in a.iter().enumerate() {
        big.extend(std::iter::repeat_n(m + j, c));
    }
    let map = |x: usize| if x < s { big[x] } else { x - s };
    let mut out = OutlineArray::empty(k);
    let n = s + m;
    for x in 0..n {
        for y in 0..n {
            if x == y || (x < s && y < s) {
                continue;
            }
            out.cell_mut(map(x), map(y)).add(map(square.get(x, y)), 1);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circulant::odd_r_outline;

    fn part(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn identity_blow_up() {
        let p = part(&[2, 2, 2, 2, 2, 1, 1, 1, 1, 1]);
        let o = odd_r_outline(&p).unwrap();
        assert_eq!(blow_up(&o, 2, 4, 4).unwrap(), o);
    }

    #[test]
    fn blow_up_to_three() {
        let p = part(&[2, 2, 2, 2, 2, 1, 1, 1, 1, 1]);
        let o = odd_r_outline(&p).unwrap();
        let b = blow_up(&o, 3, 4, 4).unwrap();
        assert_eq!(b.rows(), &part(&[3, 3, 3, 2, 2, 1, 1, 1, 1, 1]));
        assert!(b.validate().is_valid());
        assert!(matches!(blow_up(&o, 1, 4, 4), Err(Error::Precondition(_))));
        assert!(blow_up(&o, 9, 4, 4).unwrap().validate().is_valid());
    }

    #[test]
    fn sums_and_identity() {
        let p = part(&[2, 2, 2]);
        let sq = crate::base::ls_uniform(2, 3).unwrap().0;
        let o = OutlineArray::from_outline(&crate::outline::reduce(&sq, &p, &p, &p).unwrap()).unwrap();
        assert_eq!(sum_outline_arrays(&o, &OutlineArray::empty(3)).unwrap(), o);
        let doubled = sum_outline_arrays(&o, &o).unwrap();
        assert_eq!(doubled, o.scaled(2));

        let mut off = o.clone();
        let mut diag = OutlineArray::empty(3);
        for i in 0..3 {
            *diag.cell_mut(i, i) = std::mem::take(off.cell_mut(i, i));
        }
        assert!(off.corresponds_to(&FrequencyArray::off_diagonal(&p)));
        let whole = sum_outline_arrays(&off, &diag).unwrap();
        assert!(whole.corresponds_to(&FrequencyArray::of_partition(&p)));
    }

    #[test]
    fn amalgamation_extremes() {
        let p = part(&[3, 2, 1, 1, 1]);
        let sq = crate::lift::lift(&crate::outline::reduce(
            &crate::square::LatinSquare::cyclic(8),
            &Partition::singletons(8),
            &Partition::singletons(8),
            &Partition::singletons(8),
        )
        .unwrap())
        .unwrap();
        let o = OutlineArray::from_outline(&crate::outline::reduce(&sq, &p, &p, &p).unwrap()).unwrap();
        let singles: Vec<Vec<usize>> = (0..5).map(|i| vec![i]).collect();
        assert_eq!(amalgamate_outline_array(&o, &singles).unwrap(), o);
        let one = amalgamate_outline_array(&o, &[vec![0, 1, 2, 3, 4]]).unwrap();
        assert_eq!(one.cell(0, 0), &Multiset::repeated(0, 64));
        assert!(amalgamate_outline_array(&o, &[vec![0, 1], vec![1, 2, 3, 4]]).is_err());
    }

    #[test]
    fn add_on_examples() {
        let a = add_on_outline(3, 2, &[2, 2, 1]).unwrap();
        assert!(a.corresponds_to(&add_on_frequency(3, 2, &[2, 2, 1])));
        let b = add_on_outline(3, 2, &[1]).unwrap();
        assert!(b.corresponds_to(&add_on_frequency(3, 2, &[1])));
        assert!(add_on_outline(3, 1, &[1, 1, 1, 1, 1]).is_err());
    }
}
