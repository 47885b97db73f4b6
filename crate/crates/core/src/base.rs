//! Base cases: idempotent squares, uniform partitions `a^k`, one big block
//! plus singletons `(s, 1^m)`, and a fallback for two part sizes.

use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::existence::{exists, Existence};
use crate::flow::FlowNetwork;
use crate::lift::lift_to_realization;
use crate::multiset::Multiset;
use crate::outline::{reduce, OutlineRectangle};
use crate::partition::Partition;
use crate::square::{LatinSquare, SubsquareCertificate};

/// Latin square of order `n` with `i` at `(i, i)`. None exists for `n = 2`.
pub fn idempotent_square(n: usize) -> Result<LatinSquare> {
    ensure!(n != 2, Nonexistent, "there is no idempotent latin square of order 2");
    ensure!(n >= 1, Precondition, "order must be positive");
    if n % 2 == 1 {
        let half = n.div_ceil(2);
        let cells = (0..n * n).map(|c| ((c / n + c % n) * half) % n).collect();
        return Ok(LatinSquare::from_cells_unchecked(n, cells));
    }
    // prolong the odd square along the transversal {(i, i + 1)}, whose
    // symbols are all distinct
    let m = n - 1;
    let odd = idempotent_square(m)?;
    let mut cells = vec![0; n * n];
    for i in 0..m {
        for j in 0..m {
            cells[i * n + j] = odd.get(i, j);
        }
    }
    for i in 0..m {
        let c = (i + 1) % m;
        let s = odd.get(i, c);
        cells[i * n + c] = m;
        cells[i * n + m] = s;
        cells[m * n + c] = s;
    }
    cells[m * n + m] = m;
    Ok(LatinSquare::from_cells_unchecked(n, cells))
}

/// Realization of `a^k` in normal form: block `(I, J)` is a cyclic square on
/// symbol block `idempotent(k)(I, J)`.
pub fn ls_uniform(a: usize, k: usize) -> Result<(LatinSquare, SubsquareCertificate)> {
    ensure!(k != 2, Nonexistent, "no realization has exactly two parts");
    ensure!(a >= 1 && k >= 1, Precondition, "need a >= 1 and k >= 1");
    let idem = idempotent_square(k)?;
    let n = a * k;
    let cells = (0..n * n)
        .map(|c| {
            let (x, y) = (c / n, c % n);
            idem.get(x / a, y / a) * a + (x % a + y % a) % a
        })
        .collect();
    let square = LatinSquare::from_cells_unchecked(n, cells);
    let p = Partition::new(vec![a; k])?;
    Ok((square, SubsquareCertificate::normal_form(&p)))
}

/// Triples `(a, c, a + c)` over `Z_m` with the `a`'s, the `c`'s and the sums
/// each distinct and nonzero: `m - 1` of them for odd `m`, `m - 2` for even.
fn difference_triples(m: usize) -> Vec<(usize, usize)> {
    if m % 2 == 1 {
        return (1..m).map(|a| (a, a)).collect();
    }
    let q = m / 2;
    let mut out: Vec<(usize, usize)> = (1..q).map(|i| (i, i)).collect();
    out.extend((0..q.saturating_sub(1)).map(|j| (q + j, q + j + 1)));
    out
}

/// Realization of `(s, 1^m)`: the order-`s` block comes first on symbols
/// `0..s`, followed by `m` singleton blocks.
pub fn ls_one_big(s: usize, m: usize) -> Result<(LatinSquare, SubsquareCertificate)> {
    ensure!(
        m >= 1 && s < m,
        Nonexistent,
        "(s, 1^m) with s = {s}, m = {m} needs s <= m - 1"
    );
    if s == 0 {
        let sq = idempotent_square(m)?;
        return Ok((sq, SubsquareCertificate::normal_form(&Partition::singletons(m))));
    }
    let mut parts = vec![s];
    parts.extend(std::iter::repeat_n(1, m));
    let p = Partition::new(parts)?;
    let o = one_big_outline(s, m, &p)?;
    lift_to_realization(&o, &p)
}

/// Outline square of `(s, 1^m)`, `s >= 1`. Singleton `u` is index `u + 1`.
/// Cell `(u, u + a)` gets small symbol `u + a + c` for the first
/// `m - 1 - s` difference triples and the big symbol otherwise.
fn one_big_outline(s: usize, m: usize, p: &Partition) -> Result<OutlineRectangle> {
    let d = m - 1 - s;
    let triples = difference_triples(m);
    ensure!(triples.len() >= d, Internal, "too few difference triples for m = {m}");
    let mut grid = vec![usize::MAX; m * m];
    for u in 0..m {
        grid[u * m + u] = u + 1;
        for &(a, c) in &triples[..d] {
            grid[u * m + (u + a) % m] = (u + a + c) % m + 1;
        }
    }
    let mut o = OutlineRectangle::empty(p.clone(), p.clone(), p.clone());
    o.set_cell(0, 0, Multiset::repeated(0, s * s));
    for u in 0..m {
        let mut seen = vec![false; m];
        for v in 0..m {
            let g = &mut grid[u * m + v];
            if *g == usize::MAX {
                *g = 0;
            }
            o.cell_mut(u + 1, v + 1).add(*g, 1);
            if *g > 0 {
                seen[*g - 1] = true;
            }
        }
        for w in (0..m).filter(|&w| !seen[w]) {
            o.cell_mut(u + 1, 0).add(w + 1, 1);
        }
    }
    for v in 0..m {
        let mut seen = vec![false; m];
        for u in 0..m {
            let g = grid[u * m + v];
            if g > 0 {
                seen[g - 1] = true;
            }
        }
        for w in (0..m).filter(|&w| !seen[w]) {
            o.cell_mut(0, v + 1).add(w + 1, 1);
        }
    }
    o.validate().into_result("one-big outline")?;
    Ok(o)
}

static FALLBACK_CALLS: [AtomicUsize; 3] = [AtomicUsize::new(0), AtomicUsize::new(0), AtomicUsize::new(0)];

/// Which route [`two_size_fallback`] took.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FallbackRoute {
    Uniform,
    Circulant,
    OutlineSearch,
}

/// How often each fallback route has run in this process, in the order
/// uniform, circulant, outline search.
pub fn fallback_counts() -> [usize; 3] {
    [0, 1, 2].map(|i| FALLBACK_CALLS[i].load(Ordering::Relaxed))
}

/// Realization of a partition with at most two distinct part sizes whose
/// existence is known.
pub fn two_size_fallback(p: &Partition) -> Result<(LatinSquare, SubsquareCertificate, FallbackRoute)> {
    let (o, route) = two_size_outline(p)?;
    let (sq, cert) = lift_to_realization(&o, p)?;
    Ok((sq, cert, route))
}

pub(crate) fn two_size_outline(p: &Partition) -> Result<(OutlineRectangle, FallbackRoute)> {
    ensure!(p.is_non_increasing(), Precondition, "partition {p} is not sorted");
    ensure!(p.distinct_sizes() <= 2, Precondition, "partition {p} has more than two part sizes");
    match exists(p) {
        Existence::Yes(_) => {}
        Existence::No(r) => return Err(Error::Nonexistent(format!("{p}: {}", r.describe()))),
        Existence::Unknown => return Err(Error::Precondition(format!("existence of {p} is not settled"))),
    }
    let a = p.part(0);
    let k = p.len();
    let record = |r: FallbackRoute| FALLBACK_CALLS[r as usize].fetch_add(1, Ordering::Relaxed);
    if p.distinct_sizes() == 1 {
        record(FallbackRoute::Uniform);
        let (sq, _) = ls_uniform(a, k)?;
        return Ok((reduce(&sq, p, p, p)?, FallbackRoute::Uniform));
    }
    if p.leading_run() >= 3 {
        if let Ok(o) = crate::engine::circulant_outline(p, None) {
            record(FallbackRoute::Circulant);
            return Ok((o.outline, FallbackRoute::Circulant));
        }
    }
    record(FallbackRoute::OutlineSearch);
    Ok((search_outline_square(p, SEARCH_BUDGET)?, FallbackRoute::OutlineSearch))
}

const SEARCH_BUDGET: usize = 200_000;

/// Finds an outline square for `p` one symbol at a time. Each symbol's
/// placement is a transportation problem solved by max flow; alternatives
/// cap every cell near its proportional share, then loosen the caps.
pub(crate) fn search_outline_square(p: &Partition, budget: usize) -> Result<OutlineRectangle> {
    let k = p.len();
    let h = p.parts();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&l| std::cmp::Reverse(h[l]));
    let mut cap = vec![0usize; k * k];
    for i in 0..k {
        for j in 0..k {
            if i != j {
                cap[i * k + j] = h[i] * h[j];
            }
        }
    }
    let mut placed: Vec<Vec<usize>> = Vec::with_capacity(k);
    let mut nodes = 0usize;
    if !search_level(h, &order, 0, &mut cap, &mut placed, &mut nodes, budget) {
        let reason = if nodes >= budget { "budget exhausted" } else { "no completion" };
        return Err(Error::SearchExhausted(format!(
            "outline search for {p}: {reason} after {nodes} flows; placed {} of {k} symbols",
            placed.len()
        )));
    }
    let mut o = OutlineRectangle::empty(p.clone(), p.clone(), p.clone());
    for (idx, &l) in order.iter().enumerate() {
        for i in 0..k {
            for j in 0..k {
                let c = placed[idx][i * k + j];
                if c > 0 {
                    o.cell_mut(i, j).add(l, c);
                }
            }
        }
        o.cell_mut(l, l).add(l, h[l] * h[l]);
    }
    o.validate().into_result("searched outline square")?;
    Ok(o)
}

fn search_level(
    h: &[usize],
    order: &[usize],
    level: usize,
    cap: &mut [usize],
    placed: &mut Vec<Vec<usize>>,
    nodes: &mut usize,
    budget: usize,
) -> bool {
    if level == order.len() {
        return cap.iter().all(|&c| c == 0);
    }
    let k = h.len();
    let l = order[level];
    let rest: Vec<usize> = order[level..].to_vec();
    for slack in [Some(0), Some(1), Some(2), None] {
        if *nodes >= budget {
            return false;
        }
        *nodes += 1;
        let Some(x) = place_symbol(h, l, &rest, cap, slack) else { continue };
        for c in 0..k * k {
            cap[c] -= x[c];
        }
        placed.push(x);
        if search_level(h, order, level + 1, cap, placed, nodes, budget) {
            return true;
        }
        let x = placed.pop().expect("pushed above");
        for c in 0..k * k {
            cap[c] += x[c];
        }
    }
    false
}

/// Off-diagonal placement of symbol `l`: rows `i != l` need `h_i h_l` copies,
/// columns `j != l` likewise, never in a cell whose row or column block is
/// `l`. With `slack = Some(s)` each cell takes at most its proportional
/// share among the symbols in `rest` plus `s`.
fn place_symbol(h: &[usize], l: usize, rest: &[usize], cap: &[usize], slack: Option<usize>) -> Option<Vec<usize>> {
    let k = h.len();
    let src = 2 * k;
    let snk = 2 * k + 1;
    let mut net = FlowNetwork::new(2 * k + 2);
    let mut need = 0u64;
    for i in 0..k {
        if i == l {
            continue;
        }
        let d = (h[i] * h[l]) as u64;
        need += d;
        net.add_arc(src, i, d);
        net.add_arc(k + i, snk, d);
    }
    let mut arcs = Vec::new();
    for i in 0..k {
        for j in 0..k {
            if i == j || i == l || j == l {
                continue;
            }
            let c = cap[i * k + j];
            let bound = match slack {
                None => c,
                Some(s) => {
                    let weight: usize = rest.iter().filter(|&&r| r != i && r != j).map(|&r| h[r]).sum();
                    if weight == 0 {
                        0
                    } else {
                        (c * h[l]).div_ceil(weight) + s
                    }
                }
            }
            .min(c);
            if bound > 0 {
                arcs.push((i, j, net.add_arc(i, k + j, bound as u64)));
            }
        }
    }
    if net.max_flow(src, snk) != need {
        return None;
    }
    let mut x = vec![0usize; k * k];
    for (i, j, id) in arcs {
        x[i * k + j] = net.flow(id) as usize;
    }
    Some(x)
}
