//! Prolonged back-circulant outlines with intercalate trades, and the two
//! outline squares for `(H^3 h_4 ... h_k)` built from them.
//!
//! The arithmetic here follows the construction's own conventions: residues
//! modulo an odd `t` are represented in `1..=t`, rows, columns and symbols
//! are 1-based inside the module, and the amalgamated symbol class that is
//! later split into perfect matchings carries the label 0. Results are
//! converted to the crate's 0-based outlines at the boundary.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{ensure, Error, Result};
use crate::lift::regular_edge_coloring;
use crate::multiset::Multiset;
use crate::outline::OutlineRectangle;
use crate::partition::Partition;

/// Representative of `x` modulo `t` in `1..=t`.
fn rep(x: i64, t: i64) -> i64 {
    (x - 1).rem_euclid(t) + 1
}

fn oplus(a: i64, b: i64, t: i64) -> i64 {
    rep(a + b, t)
}

fn ominus(a: i64, b: i64, t: i64) -> i64 {
    rep(a - b, t)
}

/// `(i + j) * (t + 1) / 2` modulo `t`, on representatives `1..=t`.
fn circ(i: i64, j: i64, t: i64) -> i64 {
    rep(oplus(i, j, t) * ((t + 1) / 2), t)
}

/// Back-circulant entry `(i ⊕ j) ⊗ (t+1)/2` for `i, j` in `1..=t`, `t` odd.
pub fn back_circulant_cell(i: usize, j: usize, t: usize) -> Result<usize> {
    ensure!(t % 2 == 1, Precondition, "modulus {t} must be odd");
    ensure!(
        (1..=t).contains(&i) && (1..=t).contains(&j),
        Precondition,
        "({i}, {j}) outside 1..={t}"
    );
    Ok(circ(i as i64, j as i64, t as i64) as usize)
}

/// Parameters of the circulant construction for one partition.
///
/// `d1`, `d2` and `d` hold residues in `1..=t`; `d[i]` is the difference
/// assigned to the 1-based symbol `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CirculantParams {
    pub parts: Vec<usize>,
    pub t: usize,
    pub d1: Vec<usize>,
    pub d2: Vec<usize>,
    pub d: Vec<usize>,
}

impl CirculantParams {
    /// Checks the preconditions and fixes the differences. Free differences
    /// are the smallest residues outside `d1 ∪ d2`, in increasing order.
    pub fn new(p: &Partition) -> Result<Self> {
        let h = p.parts().to_vec();
        ensure!(h.len() >= 2, Precondition, "need at least two parts, got {}", h.len());
        let n = p.total();
        let h1 = h[0];
        let h2 = h[1];
        let t = n - h1;
        ensure!(t % 2 == 1, Precondition, "t = n - h1 = {t} must be odd");
        ensure!(
            h[1..].windows(2).all(|w| w[0] >= w[1]),
            Precondition,
            "parts after the first must be non-increasing"
        );
        ensure!(4 * h2 <= t + 1, Precondition, "h2 = {h2} exceeds (t+1)/4 with t = {t}");
        ensure!(2 * h2 <= h1, Precondition, "2 h2 = {} exceeds h1 = {h1}", 2 * h2);
        ensure!(
            h1 + 2 * h2 <= t + 1,
            Precondition,
            "h1 = {h1} exceeds t + 1 - 2 h2 = {}",
            t + 1 - 2 * h2
        );
        let mut d1: Vec<usize> = (1..h2).map(|e| 2 * e).collect();
        d1.extend((1..h2).map(|e| t - 2 * e));
        d1.push(t);
        d1.sort_unstable();
        let mut d2: Vec<usize> = (1..=h2).map(|o| 2 * o - 1).collect();
        d2.extend((1..=h2).map(|o| t - (2 * o - 1)));
        d2.sort_unstable();
        let mut used = vec![false; t + 1];
        for &x in d1.iter().chain(&d2) {
            ensure!(!used[x], Internal, "difference sets overlap at {x}");
            used[x] = true;
        }
        let free = h1 - 2 * h2;
        let mut d: Vec<usize> = (1..=t).filter(|&x| !used[x]).take(free).collect();
        ensure!(d.len() == free, Internal, "not enough free differences");
        d.extend(&d2);
        Ok(Self { parts: h, t, d1, d2, d })
    }

    pub fn h1(&self) -> usize {
        self.parts[0]
    }

    pub fn h2(&self) -> usize {
        self.parts[1]
    }

    pub fn order(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of triple sets the construction provides.
    pub fn triple_set_count(&self) -> usize {
        self.h1() - 2 * self.h2()
    }

    /// `S^i`: sum of parts 2..i-1 (1-based `i >= 2`).
    fn s(&self, i: usize) -> usize {
        self.parts[1..i - 1].iter().sum()
    }

    /// 1-based tail part index (>= 2) holding circulant value `c` in `1..=t`.
    fn tail_part(&self, c: usize) -> usize {
        let mut acc = 0;
        for (idx, &h) in self.parts.iter().enumerate().skip(1) {
            acc += h;
            if c <= acc {
                return idx + 1;
            }
        }
        unreachable!("circulant value beyond t")
    }

    /// Multiset `V`: `h_i` copies of the tail symbol for part `i >= 2`,
    /// as 0-based symbol indices of the output outline.
    pub fn tail_multiset(&self) -> Multiset {
        let h1 = self.h1();
        Multiset::from_pairs(self.parts.iter().enumerate().skip(1).map(|(i, &h)| (h1 + i - 1, h)))
    }
}

/// Trade cells for part `i` (1-based, `>= 2`) and `(a, b)` with `a < b`,
/// `b - a` odd: returns `(x1, y1, x2, y2)` in `1..=t`.
pub(crate) fn trade_coordinates(t: usize, s: usize, h: usize, a: usize, b: usize) -> (usize, usize, usize, usize) {
    let t = t as i64;
    let (s, h, a, b) = (s as i64, h as i64, a as i64, b as i64);
    (
        rep(s + a, t) as usize,
        rep(s + b, t) as usize,
        ominus(s + 1, a, t) as usize,
        ominus(s + 2 * h + 1, b, t) as usize,
    )
}

/// One family of triples `(row, column, symbol)`, all 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TripleSet {
    pub index: usize,
    pub triples: Vec<(usize, usize, usize)>,
}

/// A 1-based square grid of labels.
#[derive(Clone)]
struct Grid {
    n: usize,
    cells: Vec<usize>,
}

impl Grid {
    fn new(n: usize) -> Self {
        Self { n, cells: vec![usize::MAX; n * n] }
    }

    fn get(&self, x: usize, y: usize) -> usize {
        self.cells[(x - 1) * self.n + (y - 1)]
    }

    fn set(&mut self, x: usize, y: usize, v: usize) {
        self.cells[(x - 1) * self.n + (y - 1)] = v;
    }
}

/// Outline for `((1^n), (1^n), (1^{h1} h2 ... hk))` with a subsquare on the
/// first `h1` rows and columns, constant tail blocks, and `h1 - 2 h2` triple
/// sets. Tail part `i` (0-based, `i >= 1`) is symbol `h1 + i - 1`.
pub fn build_circulant_outline(p: &Partition) -> Result<(OutlineRectangle, Vec<TripleSet>)> {
    let params = CirculantParams::new(p)?;
    let (grid, triples) = circulant_grid(&params)?;
    let h1 = params.h1();
    let n = params.order();
    let mut sym_parts = vec![1; h1];
    sym_parts.extend(&params.parts[1..]);
    let ones = Partition::singletons(n);
    let cells = grid.cells.iter().map(|&l| Multiset::repeated(l - 1, 1)).collect();
    let o = OutlineRectangle::new(ones.clone(), ones, Partition::new(sym_parts)?, cells)?;
    o.validate().into_result("circulant outline")?;
    Ok((o, triples))
}

fn circulant_grid(params: &CirculantParams) -> Result<(Grid, Vec<TripleSet>)> {
    let h = &params.parts;
    let k = h.len();
    let (h1, h2, t) = (params.h1(), params.h2(), params.t);
    let n = params.order();
    let ti = t as i64;
    let mut diff_owner = vec![0usize; t + 1];
    for (idx, &dv) in params.d.iter().enumerate() {
        diff_owner[dv] = idx + 1;
    }

    // prolonged circulant
    let mut l = Grid::new(n);
    for x in 1..=h1 {
        for y in 1..=h1 {
            l.set(x, y, (x + y - 2) % h1 + 1);
        }
    }
    for i in 1..=t {
        for j in 1..=t {
            let c = circ(i as i64, j as i64, ti) as usize + h1;
            let owner = diff_owner[ominus(j as i64, i as i64, ti) as usize];
            if owner > 0 {
                l.set(i + h1, j + h1, owner);
                l.set(owner, j + h1, c);
                l.set(i + h1, owner, c);
            } else {
                l.set(i + h1, j + h1, c);
            }
        }
    }
    debug_assert!(l.cells.iter().all(|&v| v != usize::MAX));

    // amalgamate: symbols of the last 2 h2 singletons to 0, tail blocks to
    // h1 + i - 1
    let free = params.triple_set_count();
    let amalgamate = |s: usize| -> usize {
        if s <= free {
            s
        } else if s <= h1 {
            0
        } else {
            h1 + params.tail_part(s - h1) - 1
        }
    };
    let mut o = Grid::new(n);
    for x in 1..=n {
        for y in 1..=n {
            o.set(x, y, amalgamate(l.get(x, y)));
        }
    }

    // four-cell trades, in both orientations
    let mut touched = vec![false; n * n];
    for i in 2..=k {
        let hi = h[i - 1];
        let label = h1 + i - 1;
        let s = params.s(i);
        for a in 1..=hi {
            for b in (a + 1..=hi).step_by(2) {
                let (x1, y1, x2, y2) = trade_coordinates(t, s, hi, a, b);
                let zero_cells = [(y1, x1), (y2, x2), (x1, y1), (x2, y2)];
                let label_cells = [(y2, x1), (y1, x2), (x1, y2), (x2, y1)];
                for (cells, from, to) in [(zero_cells, 0, label), (label_cells, label, 0)] {
                    for (r, c) in cells {
                        let (r, c) = (r + h1, c + h1);
                        let slot = (r - 1) * n + (c - 1);
                        ensure!(!touched[slot], Internal, "trade cell ({r}, {c}) used twice");
                        touched[slot] = true;
                        ensure!(
                            o.get(r, c) == from,
                            Internal,
                            "trade cell ({r}, {c}) holds {} instead of {from}",
                            o.get(r, c)
                        );
                        o.set(r, c, to);
                    }
                }
            }
        }
    }

    // split the amalgamated class into 2 h2 perfect matchings
    let zero_edges: Vec<(usize, usize)> = (1..=n)
        .flat_map(|x| (1..=n).map(move |y| (x, y)))
        .filter(|&(x, y)| o.get(x, y) == 0)
        .map(|(x, y)| (x - 1, y - 1))
        .collect();
    ensure!(zero_edges.len() == 2 * h2 * n, Internal, "amalgamated class is not regular");
    let colors = regular_edge_coloring(n, &zero_edges, 2 * h2);
    for (&(x, y), c) in zero_edges.iter().zip(colors) {
        o.set(x + 1, y + 1, free + 1 + c);
    }

    let triples = (1..=free)
        .map(|i| {
            let dv = params.d[i - 1] as i64;
            let triples = (1..=t)
                .map(|a| {
                    let b = oplus(a as i64, dv, ti) as usize;
                    let c = circ(a as i64, b as i64, ti) as usize;
                    let z = h1 + params.tail_part(c) - 1;
                    (a + h1 - 1, b + h1 - 1, z - 1)
                })
                .collect();
            TripleSet { index: i - 1, triples }
        })
        .collect();
    Ok((o, triples))
}

/// Checks the two structural properties of a circulant outline: the leading
/// subsquare and constant tail blocks, and every triple set's coverage,
/// symbol multiset, pair distinctness and cell contents.
pub fn check_circulant_properties(o: &OutlineRectangle, p: &Partition, triples: &[TripleSet]) -> Result<()> {
    let h = p.parts();
    let h1 = h[0];
    let n = p.total();
    let sym = |x: usize, y: usize| -> Result<usize> {
        o.cell(x, y)
            .as_singleton()
            .ok_or_else(|| Error::Internal(format!("cell ({x}, {y}) is not a singleton")))
    };
    ensure!(o.height() == n && o.width() == n, Internal, "outline is not fully refined");
    for x in 0..h1 {
        for y in 0..h1 {
            ensure!(sym(x, y)? < h1, Internal, "cell ({x}, {y}) leaves the leading subsquare");
        }
    }
    for i in 1..h.len() {
        for x in p.block(i) {
            for y in p.block(i) {
                ensure!(
                    sym(x, y)? == h1 + i - 1,
                    Internal,
                    "cell ({x}, {y}) is not the tail symbol of part {i}"
                );
            }
        }
    }
    let expected_count = h1.saturating_sub(2 * h.get(1).copied().unwrap_or(0));
    ensure!(
        triples.len() == expected_count,
        Internal,
        "expected {expected_count} triple sets, got {}",
        triples.len()
    );
    let v: Multiset = Multiset::from_pairs(h.iter().enumerate().skip(1).map(|(i, &hi)| (h1 + i - 1, hi)));
    let mut pairs = std::collections::HashSet::new();
    for ts in triples {
        let i = ts.index;
        let mut xs: Vec<usize> = ts.triples.iter().map(|e| e.0).collect();
        let mut ys: Vec<usize> = ts.triples.iter().map(|e| e.1).collect();
        xs.sort_unstable();
        ys.sort_unstable();
        let tail: Vec<usize> = (h1..n).collect();
        ensure!(xs == tail, Internal, "triple set {i}: rows do not cover the tail");
        ensure!(ys == tail, Internal, "triple set {i}: columns do not cover the tail");
        let zs: Multiset = ts.triples.iter().map(|e| e.2).collect();
        ensure!(zs == v, Internal, "triple set {i}: symbol multiset differs from V");
        for &(x, y, z) in &ts.triples {
            ensure!(pairs.insert((x, y)), Internal, "pair ({x}, {y}) repeats");
            ensure!(sym(x, y)? == i, Internal, "cell ({x}, {y}) does not hold {i}");
            ensure!(sym(x, i)? == z, Internal, "cell ({x}, {i}) does not hold {z}");
            ensure!(sym(i, y)? == z, Internal, "cell ({i}, {y}) does not hold {z}");
        }
    }
    Ok(())
}

fn head_and_tail(p: &Partition) -> Result<(usize, Vec<usize>)> {
    let h = p.parts();
    ensure!(h.len() >= 4, Precondition, "need at least four parts");
    ensure!(
        h[0] == h[1] && h[1] == h[2],
        Precondition,
        "the first three parts must be equal"
    );
    let tail = h[3..].to_vec();
    ensure!(
        tail.windows(2).all(|w| w[0] >= w[1]),
        Precondition,
        "parts from the fourth on must be non-increasing"
    );
    Ok((h[0], tail))
}

fn overwrite_head(o: &mut OutlineRectangle, pattern: [[Multiset; 3]; 3]) {
    for (x, row) in pattern.into_iter().enumerate() {
        for (y, m) in row.into_iter().enumerate() {
            o.set_cell(x, y, m);
        }
    }
}

/// Outline square for `(H, H, H, h_4, ..., h_k)` with odd tail sum `r`.
///
/// The first three blocks form a subsquare with `O(0,1) = O(1,0) = H^2{2}`,
/// `O(0,2) = O(2,0) = H^2{1}` and `O(1,2) = O(2,1) = H^2{0}`; both surplus
/// counts for [`crate::compose::blow_up`] are therefore `H^2`.
pub fn odd_r_outline(p: &Partition) -> Result<OutlineRectangle> {
    let (big, tail) = head_and_tail(p)?;
    let r: usize = tail.iter().sum();
    let h4 = tail[0];
    ensure!(r % 2 == 1, Precondition, "tail sum r = {r} must be odd");
    ensure!(4 * h4 <= r + 1, Precondition, "h4 = {h4} exceeds (r+1)/4");
    ensure!(2 * h4 <= 3 * big, Precondition, "2 h4 = {} exceeds 3 H = {}", 2 * h4, 3 * big);
    ensure!(
        3 * big + 2 * h4 <= r + 1,
        Precondition,
        "3 H = {} exceeds r + 1 - 2 h4 = {}",
        3 * big,
        r + 1 - 2 * h4
    );
    let mut q = vec![3 * big];
    q.extend(&tail);
    let (fine, _) = build_circulant_outline(&Partition::new(q)?)?;
    let row_map = p.block_map();
    let sym_map: Vec<usize> = (0..fine.syms().len())
        .map(|s| if s < 3 * big { s / big } else { s - 3 * big + 3 })
        .collect();
    let mut o = fine.regroup(&row_map, &row_map, &sym_map)?;
    let hh = big * big;
    let m = |s| Multiset::repeated(s, hh);
    overwrite_head(&mut o, [[m(0), m(2), m(1)], [m(2), m(1), m(0)], [m(1), m(0), m(2)]]);
    o.validate().into_result("odd tail outline")?;
    Ok(o)
}

/// Result of [`even_r_outline`].
#[derive(Debug, Clone)]
pub struct EvenOutline {
    pub outline: OutlineRectangle,
    /// Copies of 0, 1, 2 guaranteed in cells (1,2), (2,0), (0,1).
    pub beta1: usize,
    /// Copies of 1, 2, 0 attained in cells (0,2), (1,0), (2,1).
    pub beta2: usize,
}

/// Net changes to apply to an outline, cell by cell.
#[derive(Default)]
struct Trade {
    delta: BTreeMap<(usize, usize), BTreeMap<usize, i64>>,
}

impl Trade {
    fn change(&mut self, cell: (usize, usize), sym: usize, by: i64) {
        *self.delta.entry(cell).or_default().entry(sym).or_default() += by;
    }

    /// Applies the changes to a 1-based outline; fails if a count would go
    /// negative.
    fn apply(self, o: &mut OutlineRectangle) -> Result<()> {
        for ((x, y), changes) in self.delta {
            let cell = o.cell_mut(x - 1, y - 1);
            for (&s, &d) in &changes {
                if d > 0 {
                    cell.add(s - 1, d as usize);
                }
            }
            for (&s, &d) in &changes {
                if d < 0 && !cell.remove(s - 1, (-d) as usize) {
                    return Err(Error::Internal(format!(
                        "trade removes {} copies of {s} from cell ({x}, {y}), which lacks them",
                        -d
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Orientation of one of the two trades in [`even_r_outline`]: `at(row,
/// col)` maps a trade-1 cell to the cell actually changed.
struct Orientation {
    transpose: bool,
    /// the line through `z` cells (row 1 for the first trade)
    line: usize,
    /// the cross line (column 3 for the first trade)
    cross: usize,
    /// the traded symbol (2 for the first trade)
    sym: usize,
}

impl Orientation {
    fn at(&self, a: usize, b: usize) -> (usize, usize) {
        if self.transpose {
            (b, a)
        } else {
            (a, b)
        }
    }
}

/// Outline square for `(H, H, H, h_4, ..., h_k)` with even tail sum `r`.
///
/// Cells (0,1), (1,2), (2,0) hold `H^2` copies of 2, 0, 1; cells (0,2),
/// (1,0), (2,1) hold at least `H(H-1) - 2(h_k - 1)` copies of 1, 2, 0, and
/// the attained minimum is reported as `beta2`.
pub fn even_r_outline(p: &Partition) -> Result<EvenOutline> {
    let (big, tail) = head_and_tail(p)?;
    let k = p.len();
    let r: usize = tail.iter().sum();
    let h4 = tail[0];
    let hk = *tail.last().expect("non-empty tail");
    ensure!(big >= 2, Precondition, "H = {big} must be at least 2");
    ensure!(r.is_multiple_of(2), Precondition, "tail sum r = {r} must be even");
    ensure!(4 * h4 + 2 <= r, Precondition, "h4 = {h4} exceeds (r-2)/4");
    ensure!(2 * h4 < 3 * big, Precondition, "2 h4 + 2 exceeds 3 H + 1");
    // the circulant step needs 3H + 1 <= t + 1 - 2 h4 with t = r - 1
    ensure!(
        3 * big + 1 + 2 * h4 <= r,
        Precondition,
        "3 H + 1 = {} exceeds r - 2 h4 = {}",
        3 * big + 1,
        r - 2 * h4
    );
    ensure!(
        big * (big - 1) >= 2 * (hk - 1),
        Precondition,
        "H(H-1) = {} is below 2(h_k - 1) = {}",
        big * (big - 1),
        2 * (hk - 1)
    );
    ensure!(big + 1 >= hk, Precondition, "H = {big} is below h_k - 1 = {}", hk - 1);

    // circulant for (3H+1, h4, ..., h_{k-1}, h_k - 1), t = r - 1
    let mut q = vec![3 * big + 1];
    q.extend(&tail[..tail.len() - 1]);
    if hk > 1 {
        q.push(hk - 1);
    }
    let (fine, triple_sets) = build_circulant_outline(&Partition::new(q)?)?;
    let n = p.total();

    // 1-based relabelling to the intermediate outline: three groups of H
    // (keeping 1 and 2 in groups 1 and 2), singles 4..=r+2, and r+3
    let group = |x: usize| -> usize {
        match x {
            1 => 1,
            2 => 2,
            _ if x <= big + 1 => 1,
            _ if x <= 2 * big => 2,
            _ => 3,
        }
    };
    let line_map = |x: usize| -> usize {
        if x <= 3 * big {
            group(x)
        } else if x == 3 * big + 1 {
            r + 3
        } else {
            x - 3 * big + 2
        }
    };
    // symbols: groups, tail labels 3H + i - 2 -> i, 3H + 1 -> k + 1; the
    // final merge of k + 1 into k happens in the same map
    let sym_map = |s: usize| -> usize {
        if s <= 3 * big {
            group(s)
        } else if s == 3 * big + 1 {
            k
        } else {
            s - 3 * big + 2
        }
    };
    let swap_rows = |x: usize| match x {
        2 => 3,
        3 => 2,
        _ => x,
    };
    let swap_cols = |y: usize| match y {
        1 => 3,
        3 => 1,
        _ => y,
    };
    let swap_syms = |s: usize| match s {
        1 => 2,
        2 => 1,
        _ => s,
    };
    let row_of = |x: usize| swap_rows(line_map(x));
    let col_of = |y: usize| swap_cols(line_map(y));
    let sym_of = |s: usize| swap_syms(sym_map(s));

    let mut lines = vec![big; 3];
    lines.extend(std::iter::repeat_n(1, r));
    let lines = Partition::new(lines)?;
    let mut o = OutlineRectangle::empty(lines.clone(), lines.clone(), p.clone());
    for x in 1..=n {
        for y in 1..=n {
            let s = fine.cell(x - 1, y - 1).as_singleton().expect("fine outline") + 1;
            o.cell_mut(row_of(x) - 1, col_of(y) - 1).add(sym_of(s) - 1, 1);
        }
    }

    // substitution on rows and columns {1, 2, 3, r+3}; symbol k+1 is
    // already merged into k
    let hh = big * big;
    let hm = big * (big - 1);
    let special = [1, 2, 3, r + 3];
    let table: [[&[(usize, usize)]; 4]; 4] = [
        [&[(1, hh)], &[(3, hh)], &[(2, hm), (k, big)], &[(2, big)]],
        [&[(3, hm), (k, big)], &[(2, hh)], &[(1, hh)], &[(3, big)]],
        [&[(2, hh)], &[(1, hm), (k, big)], &[(3, hh)], &[(1, big)]],
        [&[(3, big)], &[(1, big)], &[(2, big)], &[(k, 1)]],
    ];
    for (a, &x) in special.iter().enumerate() {
        for (b, &y) in special.iter().enumerate() {
            let old = o.cell(x - 1, y - 1);
            ensure!(
                old.iter().all(|(s, _)| s < 3 || s == k - 1),
                Internal,
                "cell ({x}, {y}) leaves the corner subsquare"
            );
            o.set_cell(x - 1, y - 1, Multiset::from_pairs(table[a][b].iter().map(|&(s, c)| (s - 1, c))));
        }
    }
    o.validate().into_result("relabelled circulant outline")?;

    // triples in the relabelled coordinates (row, column, symbol), 1-based
    let mapped: Vec<Vec<(usize, usize, usize)>> = triple_sets
        .iter()
        .take(2)
        .map(|ts| {
            ts.triples
                .iter()
                .map(|&(x, y, z)| (row_of(x + 1), col_of(y + 1), sym_of(z + 1)))
                .collect()
        })
        .collect();
    ensure!(mapped.len() == 2, Internal, "circulant provided fewer than two triple sets");

    let first = Orientation { transpose: false, line: 1, cross: 3, sym: 2 };
    let second = Orientation { transpose: true, line: 2, cross: 3, sym: 1 };
    let mut trade = Trade::default();
    let u1 = add_corner_trade(&o, &mapped[0], &first, r, k, hk, &mut trade)?;
    let u2 = add_corner_trade(&o, &mapped[1], &second, r, k, hk, &mut trade)?;
    trade.apply(&mut o)?;
    o.validate().into_result("traded outline")?;

    let o = o.coarsen(p, p, p)?;
    o.validate().into_result("even tail outline")?;
    let beta2 = o
        .cell(0, 2)
        .count(1)
        .min(o.cell(1, 0).count(2))
        .min(o.cell(2, 1).count(0));
    let floor = hm as i64 - 2 * (hk as i64 - 1);
    ensure!(
        beta2 as i64 >= floor,
        Internal,
        "surplus {beta2} below H(H-1) - 2(h_k - 1) = {floor} (trade sizes {u1}, {u2})"
    );
    Ok(EvenOutline { outline: o, beta1: hh, beta2 })
}

/// Records one corner trade, which makes the last block constant along row
/// (or, transposed, column) `r + 3`. Returns the size of the chosen triple
/// subset.
///
/// In trade-1 orientation, `(row, col, z)` triples have `O(row, col) =
/// {sym}`, `z` in `O(row, cross)` and `z` in `O(line, col)`. The transposed
/// orientation swaps rows and columns and uses `line`/`cross` accordingly.
fn add_corner_trade(
    o: &OutlineRectangle,
    triples: &[(usize, usize, usize)],
    or: &Orientation,
    r: usize,
    k: usize,
    hk: usize,
    trade: &mut Trade,
) -> Result<usize> {
    let m = hk - 1;
    if m == 0 {
        return Ok(0);
    }
    // view every cell through the orientation, 1-based
    let cell = |a: usize, b: usize| -> &Multiset {
        let (x, y) = or.at(a, b);
        o.cell(x - 1, y - 1)
    };
    let single = |a: usize, b: usize| cell(a, b).as_singleton().map(|s| s + 1);
    // in trade-1 view: triple = (row y_j, column x_j, z); transposed, the
    // triple's column is the view's row
    let view: Vec<(usize, usize, usize)> = triples
        .iter()
        .map(|&(x, y, z)| if or.transpose { (y, x, z) } else { (x, y, z) })
        .collect();
    for &(y, x, z) in &view {
        ensure!(single(y, x) == Some(or.sym), Internal, "triple cell ({y}, {x}) lacks the traded symbol");
        ensure!(cell(y, or.cross).count(z - 1) > 0, Internal, "cross cell lacks {z}");
        ensure!(cell(or.line, x).count(z - 1) > 0, Internal, "line cell lacks {z}");
    }
    let last = r + 3;
    let a: Vec<usize> = (1..=m).map(|i| last - i).collect();
    let block_start = last + 1 - hk;
    let b: Vec<usize> = (4..last).filter(|&y| single(last, y) == Some(k)).collect();
    ensure!(b.len() == m, Internal, "found {} b-columns, expected {m}", b.len());
    ensure!(b.iter().all(|x| !a.contains(x)), Internal, "a and b sequences meet");
    let mut c = Vec::with_capacity(m);
    let mut d = Vec::with_capacity(m);
    for &ai in &a {
        let rows: Vec<usize> = (4..block_start).filter(|&x| single(x, ai) == Some(k)).collect();
        ensure!(rows.len() == 1, Internal, "column {ai} has {} stray copies of k", rows.len());
        c.push(rows[0]);
        let di = single(last, ai).ok_or_else(|| Error::Internal("corner cell not single".into()))?;
        ensure!(di >= 4 && di != k, Internal, "unexpected symbol {di} at ({last}, {ai})");
        d.push(di);
    }

    // forced triples, then greedy cover of d, then trim to minimal
    let mut chosen = vec![false; view.len()];
    for (idx, &(y, x, _)) in view.iter().enumerate() {
        if a.contains(&x) || b.contains(&x) || c.contains(&y) {
            chosen[idx] = true;
        }
    }
    let covers = |chosen: &[bool]| -> bool {
        let zs: Multiset = view.iter().zip(chosen).filter(|e| *e.1).map(|e| e.0 .2).collect();
        let need: Multiset = d.iter().copied().collect();
        let ok = need.iter().all(|(s, cnt)| zs.count(s) >= cnt);
        ok
    };
    for idx in 0..view.len() {
        if covers(&chosen) {
            break;
        }
        if chosen[idx] {
            continue;
        }
        let zs: Multiset = view.iter().zip(&chosen).filter(|e| *e.1).map(|e| e.0 .2).collect();
        let z = view[idx].2;
        let need = d.iter().filter(|&&s| s == z).count();
        if zs.count(z) < need {
            chosen[idx] = true;
        }
    }
    ensure!(covers(&chosen), Internal, "triples cannot cover the displaced symbols");
    for idx in 0..view.len() {
        if !chosen[idx] {
            continue;
        }
        let (y, x, _) = view[idx];
        if a.contains(&x) || b.contains(&x) || c.contains(&y) {
            continue;
        }
        chosen[idx] = false;
        if !covers(&chosen) {
            chosen[idx] = true;
        }
    }
    let u: Vec<(usize, usize, usize)> = view.iter().zip(&chosen).filter(|e| *e.1).map(|e| *e.0).collect();
    let sym = or.sym;
    let (line, cross) = (or.line, or.cross);
    let mut put = |aa: usize, bb: usize, s: usize, by: i64| trade.change(or.at(aa, bb), s, by);
    for &(y, x, z) in &u {
        put(y, x, sym, -1);
        put(y, x, z, 1);
        put(y, cross, z, -1);
        put(y, cross, sym, 1);
        put(line, x, z, -1);
        put(line, x, sym, 1);
    }
    for i in 0..m {
        put(last, a[i], d[i], -1);
        put(last, a[i], k, 1);
        put(last, b[i], k, -1);
        put(last, b[i], sym, 1);
        put(last, cross, sym, -1);
        put(last, cross, d[i], 1);
        put(c[i], cross, sym, -1);
        put(c[i], cross, k, 1);
        put(c[i], a[i], k, -1);
        put(c[i], a[i], sym, 1);
        put(line, a[i], sym, -1);
        put(line, a[i], d[i], 1);
        put(line, b[i], sym, -1);
        put(line, b[i], k, 1);
    }
    for &(_, _, z) in &u {
        put(line, cross, sym, -1);
        put(line, cross, z, 1);
    }
    for i in 0..m {
        put(line, cross, d[i], -1);
        put(line, cross, sym, 1);
        put(line, cross, k, -1);
        put(line, cross, sym, 1);
    }
    Ok(u.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn circulant_cells() {
        assert_eq!(back_circulant_cell(2, 3, 5).unwrap(), 5);
        assert_eq!(back_circulant_cell(1, 1, 3).unwrap(), 1);
        assert!(back_circulant_cell(1, 1, 4).is_err());
        for t in [1usize, 3, 5, 7, 9] {
            let rows: Vec<Vec<usize>> = (1..=t)
                .map(|i| (1..=t).map(|j| back_circulant_cell(i, j, t).unwrap() - 1).collect())
                .collect();
            assert!(crate::square::is_latin(&rows).unwrap());
            for dd in 1..=t {
                let mut seen = vec![false; t];
                for i in 1..=t {
                    let j = rep(i as i64 + dd as i64, t as i64) as usize;
                    seen[rows[i - 1][j - 1]] = true;
                }
                assert!(seen.iter().all(|&s| s), "difference {dd} is not a transversal");
            }
        }
    }

    #[test]
    fn trade_coordinate_identities() {
        // closed forms of the trade coordinates, recomputed from definitions
        for t in (5usize..40).step_by(2) {
            let ti = t as i64;
            let half = (ti + 1) / 2;
            for h in 1..=(t + 1) / 4 {
                for s in 0..t.saturating_sub(h) {
                    for a in 1..=h {
                        for b in (a + 1..=h).step_by(2) {
                            let (x1, y1, x2, y2) = trade_coordinates(t, s, h, a, b);
                            let (x1, y1, x2, y2) = (x1 as i64, y1 as i64, x2 as i64, y2 as i64);
                            let (si, hi, ai, bi) = (s as i64, h as i64, a as i64, b as i64);
                            let m = |x| rep(x, ti);
                            assert_eq!(circ(x1, y1, ti), oplus(si + (ai + bi - 1) / 2, half, ti));
                            assert_eq!(circ(x2, y2, ti), oplus(si + hi - (ai + bi - 1) / 2, half, ti));
                            assert_eq!(circ(x2, y1, ti), m(si + 1 + (bi - ai - 1) / 2));
                            assert_eq!(circ(x1, y2, ti), m(si + hi - (bi - ai - 1) / 2));
                            assert_eq!(ominus(y1, x1, ti), m(bi - ai));
                            assert_eq!(ominus(y2, x2, ti), m(2 * hi - (bi - ai)));
                            assert_eq!(ominus(y1, x2, ti), m(ai + bi - 1));
                            assert_eq!(ominus(y2, x1, ti), m(2 * hi + 1 - (ai + bi)));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn small_circulant_outlines() {
        let p = part(&[2, 1, 1, 1, 1, 1]);
        let (o, ts) = build_circulant_outline(&p).unwrap();
        assert!(ts.is_empty());
        check_circulant_properties(&o, &p, &ts).unwrap();

        let p = part(&[3, 1, 1, 1, 1, 1]);
        let (o, ts) = build_circulant_outline(&p).unwrap();
        assert_eq!(ts.len(), 1);
        assert_eq!(ts[0].triples.len(), 5);
        check_circulant_properties(&o, &p, &ts).unwrap();

        assert!(matches!(
            build_circulant_outline(&part(&[2, 1, 1, 1, 1])),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn circulant_with_larger_tail_parts() {
        for v in [&[6usize, 3, 3, 2, 2, 2, 1][..], &[9, 4, 3, 3, 2, 1, 1, 1, 1, 1], &[6, 2, 2, 2, 1, 1, 1]] {
            let p = part(v);
            let (o, ts) = build_circulant_outline(&p).unwrap();
            check_circulant_properties(&o, &p, &ts).unwrap();
        }
    }

    #[test]
    fn odd_tail_corner() {
        let p = part(&[2, 2, 2, 2, 2, 1, 1, 1, 1, 1]);
        let o = odd_r_outline(&p).unwrap();
        assert!(o.validate().is_valid());
        for i in 0..p.len() {
            assert_eq!(o.cell(i, i), &Multiset::repeated(i, p.part(i) * p.part(i)));
        }
        assert_eq!(o.cell(0, 1), &Multiset::repeated(2, 4));
        assert_eq!(o.cell(2, 1), &Multiset::repeated(0, 4));
        assert!(odd_r_outline(&part(&[1, 1, 1, 1, 1, 1, 1])).is_err());
    }

    #[test]
    fn even_tail_corner() {
        let p = part(&[3, 3, 3, 2, 2, 2, 2, 2, 2, 2]);
        let e = even_r_outline(&p).unwrap();
        let o = &e.outline;
        assert!(o.validate().is_valid());
        for i in 0..p.len() {
            assert_eq!(o.cell(i, i), &Multiset::repeated(i, p.part(i) * p.part(i)));
        }
        assert_eq!(o.cell(0, 1).count(2), 9);
        assert_eq!(o.cell(1, 2).count(0), 9);
        assert_eq!(o.cell(2, 0).count(1), 9);
        assert!(o.cell(0, 2).count(1) >= 4);
        assert!(e.beta2 >= 4);
        assert!(even_r_outline(&part(&[1, 1, 1, 1, 1, 1, 1, 1])).is_err());
        assert!(even_r_outline(&part(&[3, 3, 3, 2, 2, 2, 2, 2, 2, 1, 1, 1])).is_err());
    }
}
