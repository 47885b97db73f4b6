//! Top-level constructions: `m >= 3` equal largest parts with a long tail
//! (circulant seed, blow-up, lift), the induction over the number of equal
//! largest parts, and incomplete squares with prescribed holes.
//!
//! The induction works on outline squares throughout. Reducing the lift of
//! an outline square gives back the outline square, so the intermediate
//! realizations are never materialized: one lift at the end suffices.

use serde::{Deserialize, Serialize};

use crate::base::{ls_uniform, two_size_outline, FallbackRoute};
use crate::circulant::{even_r_outline, odd_r_outline};
use crate::compose::{add_on_outline, blow_up, sum_outline_arrays, FrequencyArray, OutlineArray};
use crate::error::{ensure, Error, Result};
use crate::existence::{exists, Existence};
use crate::lift::lift_to_realization;
use crate::multiset::Multiset;
use crate::outline::{reduce, OutlineRectangle};
use crate::partition::Partition;
use crate::square::{Block, LatinSquare, SubsquareCertificate};

/// One step of a construction, with the parameters that determine it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum TraceStep {
    /// Start from `part^count`.
    Uniform { part: usize, count: usize },
    /// `h_l = h_(l+1)`: nothing to grow.
    Skip { l: usize },
    /// Circulant seed of block size `t`, blown up to `g`.
    Circulant {
        l: usize,
        partition: Vec<usize>,
        t: usize,
        odd: bool,
        beta1: usize,
        beta2: usize,
        g: usize,
    },
    /// Two part sizes, handled by the fallback.
    Fallback { l: usize, partition: Vec<usize>, route: FallbackRoute },
    /// `copies` add-on arrays grow the first `l` parts; the sum was checked
    /// against the off-diagonal frequencies before the diagonal went back.
    AddOn { l: usize, copies: usize, groups: usize, checked: bool },
    /// Final lift to a latin square of this order.
    Lift { order: usize },
}

/// The steps taken by a construction, replayable from its partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionTrace {
    pub partition: Vec<usize>,
    pub steps: Vec<TraceStep>,
}

impl ConstructionTrace {
    /// Reruns the construction and checks that it takes the same steps.
    pub fn replay(&self) -> Result<(LatinSquare, SubsquareCertificate)> {
        let p = Partition::new(self.partition.clone())?;
        let (sq, cert, again) = construct(&p)?;
        ensure!(again == *self, Internal, "replay took different steps");
        Ok((sq, cert))
    }
}

/// Every inequality the seed size `t` must satisfy for tail sum `r`:
/// the circulant constraints at block size `t` and enough room for the
/// blow-up from `t` to `h1`. For even `r` the blow-up uses the guaranteed
/// lower bound on `beta2`.
pub fn t_is_admissible(h1: usize, h4: usize, hk: usize, r: usize, t: usize) -> bool {
    if t == 0 || t > h1 {
        return false;
    }
    let room = 2 * (h1 * h1 - t * t);
    if r % 2 == 1 {
        4 * h4 <= r + 1 && 2 * h4 <= 3 * t && 3 * t + 2 * h4 <= r + 1 && r * (h1 - t) <= room + 2 * t * t
    } else {
        let beta2 = (t * (t - 1)).checked_sub(2 * (hk - 1));
        t >= 2
            && 4 * h4 + 2 <= r
            && 2 * h4 < 3 * t
            && 3 * t + 1 + 2 * h4 <= r
            && t + 1 >= hk
            && beta2.is_some_and(|b2| r * (h1 - t) <= room + t * t + b2)
    }
}

/// Seed size for the circulant construction: `h1` when admissible,
/// otherwise the largest admissible value below the upper end of the
/// interval (`(r + 1 - 2 h4) / 3` for odd `r`, `(r - 2 h4 - 1) / 3` for
/// even).
pub fn select_t(h1: usize, h4: usize, hk: usize, r: usize) -> Result<usize> {
    ensure!(h1 >= h4 && h4 >= hk && hk >= 1, Precondition, "need h1 >= h4 >= hk >= 1");
    ensure!(2 * h1 + 2 * h4 < r, Precondition, "tail sum r = {r} does not exceed 2(h1 + h4) = {}", 2 * (h1 + h4));
    // implied by the hypothesis for every m, including h4 = h1 where m >= 4
    ensure!(4 * h4 + 2 < r, Precondition, "4 h4 + 2 = {} is not below r = {r}", 4 * h4 + 2);
    if t_is_admissible(h1, h4, hk, r, h1) {
        return Ok(h1);
    }
    let top = if r % 2 == 1 { (r + 1 - 2 * h4) / 3 } else { (r - 2 * h4 - 1) / 3 };
    (1..=top.min(h1))
        .rev()
        .find(|&t| t_is_admissible(h1, h4, hk, r, t))
        .ok_or_else(|| Error::Internal(format!("no admissible t for h1 = {h1}, h4 = {h4}, hk = {hk}, r = {r}")))
}

/// Blown-up circulant outline square and the parameters used.
#[derive(Debug, Clone)]
pub(crate) struct CirculantBuild {
    pub outline: OutlineRectangle,
    pub t: usize,
    pub odd: bool,
    pub beta1: usize,
    pub beta2: usize,
}

/// Outline square for sorted `p` with `p_0 = p_1 = p_2` built from the
/// circulant seed. Parts `3..` form the tail, including any further copies
/// of `p_0`.
pub(crate) fn circulant_outline(p: &Partition, t: Option<usize>) -> Result<CirculantBuild> {
    ensure!(p.len() >= 4 && p.leading_run() >= 3, Precondition, "{p} needs three equal largest parts and a tail");
    let h1 = p.part(0);
    let tail = &p.parts()[3..];
    let r: usize = tail.iter().sum();
    let hk = *tail.last().expect("non-empty tail");
    let t = match t {
        Some(t) => t,
        None => select_t(h1, tail[0], hk, r)?,
    };
    let mut seed = vec![t; 3];
    seed.extend(tail);
    let seed = Partition::new(seed)?;
    let (o, beta1, beta2) = if r % 2 == 1 {
        (odd_r_outline(&seed)?, t * t, t * t)
    } else {
        let e = even_r_outline(&seed)?;
        (e.outline, e.beta1, e.beta2)
    };
    let outline = blow_up(&o, h1, beta1, beta2)?;
    Ok(CirculantBuild { outline, t, odd: r % 2 == 1, beta1, beta2 })
}

/// Whether `m` equal largest parts admit the direct construction:
/// `(m - 1)(h_1 + h_(m+1)) < h_(m+1) + ... + h_k`.
pub fn long_tail(p: &Partition, m: usize) -> bool {
    if m >= p.len() {
        return false;
    }
    let tail: usize = p.parts()[m..].iter().sum();
    (m - 1) * (p.part(0) + p.part(m)) < tail
}

fn sorted_with_run(p: &Partition) -> Result<usize> {
    ensure!(p.is_non_increasing(), Precondition, "partition {p} is not non-increasing");
    let m = p.leading_run();
    ensure!(m >= 3, Precondition, "{p} has {m} equal largest parts, need at least 3");
    Ok(m)
}

/// Outline square for `p` under the direct construction, with its trace step.
fn m_equal_outline(p: &Partition, l: usize) -> Result<(OutlineRectangle, TraceStep)> {
    sorted_with_run(p)?;
    // further copies of h1 count as tail; m = 3 is the weakest form
    ensure!(long_tail(p, 3), Precondition, "{p}: 2(h1 + h4) is not below h4 + ... + hk");
    let h1 = p.part(0);
    let h4 = p.part(3);
    let hk = p.part(p.len() - 1);
    if h1 >= 3 && h4 >= 2 && h4 > hk {
        // the seed bounds need the true run length; with h4 = h1 they can fail
        let c = match circulant_outline(p, None) {
            Ok(c) => c,
            Err(e @ Error::Precondition(_)) => {
                let (o, route) = two_size_outline(p).map_err(|_| e)?;
                return Ok((o, TraceStep::Fallback { l, partition: p.parts().to_vec(), route }));
            }
            Err(e) => return Err(e),
        };
        let step = TraceStep::Circulant {
            l,
            partition: p.parts().to_vec(),
            t: c.t,
            odd: c.odd,
            beta1: c.beta1,
            beta2: c.beta2,
            g: h1,
        };
        return Ok((c.outline, step));
    }
    let (o, route) = two_size_outline(p)?;
    Ok((o, TraceStep::Fallback { l, partition: p.parts().to_vec(), route }))
}

/// Realization of `h_1^m h_(m+1) ... h_k` when the tail is long:
/// `(m - 1)(h_1 + h_(m+1)) < h_(m+1) + ... + h_k` for some `m >= 3`, which
/// is weakest at `m = 3`.
pub fn construct_m_equal(p: &Partition) -> Result<(LatinSquare, SubsquareCertificate, ConstructionTrace)> {
    let m = sorted_with_run(p)?;
    let (o, step) = m_equal_outline(p, m)?;
    let (sq, cert) = lift_to_realization(&o, p)?;
    let trace = ConstructionTrace {
        partition: p.parts().to_vec(),
        steps: vec![step, TraceStep::Lift { order: p.total() }],
    };
    Ok((sq, cert, trace))
}

/// Realization of any non-increasing partition whose three largest parts
/// are equal.
///
/// Starting from `h_k^k`, each step `l = k-1, ..., m` grows the first `l`
/// parts from `h_(l+1)` to `h_l`, either directly when the tail is long or
/// by adding `h_l - h_(l+1)` add-on arrays.
pub fn construct_main(p: &Partition) -> Result<(LatinSquare, SubsquareCertificate, ConstructionTrace)> {
    let (o, trace) = main_outline(p)?;
    let (sq, cert) = lift_to_realization(&o, p)?;
    let mut trace = trace;
    trace.steps.push(TraceStep::Lift { order: p.total() });
    Ok((sq, cert, trace))
}

fn main_outline(p: &Partition) -> Result<(OutlineRectangle, ConstructionTrace)> {
    let m = sorted_with_run(p)?;
    let h = p.parts();
    let k = h.len();
    let hk = h[k - 1];
    let mut steps = vec![TraceStep::Uniform { part: hk, count: k }];
    let start = Partition::new(vec![hk; k])?;
    let (sq, _) = ls_uniform(hk, k)?;
    let mut current = reduce(&sq, &start, &start, &start)?;
    // l is 1-based: the first l parts grow from h[l] to h[l - 1]
    for l in (m..k).rev() {
        let (hl, hl1) = (h[l - 1], h[l]);
        if hl == hl1 {
            steps.push(TraceStep::Skip { l });
            continue;
        }
        let mut parts = vec![hl; l];
        parts.extend(&h[l..]);
        let target = Partition::new(parts)?;
        if long_tail(&target, l) {
            let (o, step) = m_equal_outline(&target, l)?;
            current = o;
            steps.push(step);
            continue;
        }
        let add = add_on_outline(l, hl, &h[l..])?;
        let groups = hl + hl1;
        let mut sum = OutlineArray::from_outline(&current)?;
        for i in 0..k {
            *sum.cell_mut(i, i) = Multiset::new();
        }
        sum = sum_outline_arrays(&sum, &add.scaled(hl - hl1))?;
        sum.check(&FrequencyArray::off_diagonal(&target), "sum before restoring the diagonal")?;
        for i in 0..k {
            *sum.cell_mut(i, i) = Multiset::repeated(i, target.part(i) * target.part(i));
        }
        current = sum.into_outline(&target)?;
        current.validate().into_result("outline after add-on step")?;
        steps.push(TraceStep::AddOn { l, copies: hl - hl1, groups, checked: true });
    }
    ensure!(current.rows() == p, Internal, "induction ended on {} instead of {p}", current.rows());
    Ok((current, ConstructionTrace { partition: h.to_vec(), steps }))
}

/// Realization of any partition in the supported families: three equal
/// largest parts, or at most two part sizes with known existence. Parts
/// are sorted into non-increasing order first.
pub fn construct(p: &Partition) -> Result<(LatinSquare, SubsquareCertificate, ConstructionTrace)> {
    let p = Partition::sorted(p.parts().to_vec())?;
    if let Existence::No(r) = exists(&p) {
        return Err(Error::Nonexistent(format!("{p}: {}", r.describe())));
    }
    if p.leading_run() >= 3 {
        return construct_main(&p);
    }
    ensure!(
        p.distinct_sizes() <= 2 && exists(&p).is_decided(),
        Precondition,
        "{p} is outside the supported families (three equal largest parts, or at most two part sizes)"
    );
    let (o, route) = two_size_outline(&p)?;
    let (sq, cert) = lift_to_realization(&o, &p)?;
    let steps = vec![
        TraceStep::Fallback { l: p.leading_run(), partition: p.parts().to_vec(), route },
        TraceStep::Lift { order: p.total() },
    ];
    Ok((sq, cert, ConstructionTrace { partition: p.parts().to_vec(), steps }))
}

/// Incomplete latin square of order `n` with pairwise disjoint holes of
/// the requested orders, for `n >= 2 h_1 + sum(holes)` where `h_1` is the
/// largest hole.
///
/// The gap `n - 2 h_1 - sum` is filled with copies of the smallest hole and
/// one remainder part, and the realization's certificate is cut down to one
/// block per requested hole, in request order.
pub fn construct_ils(n: usize, holes: &[usize]) -> Result<(LatinSquare, SubsquareCertificate)> {
    ensure!(!holes.is_empty(), Precondition, "no holes requested");
    ensure!(holes.iter().all(|&h| h > 0), InvalidPartition, "hole sizes must be positive");
    let h1 = *holes.iter().max().expect("non-empty");
    let hk = *holes.iter().min().expect("non-empty");
    let sum: usize = holes.iter().sum();
    let need = 2 * h1 + sum;
    ensure!(n >= need, Precondition, "order {n} is below 2 h1 + sum = {need}");
    let gap = n - need;
    let (q, rem) = (gap / hk, gap % hk);
    let mut parts = holes.to_vec();
    parts.extend([h1, h1]);
    parts.extend(std::iter::repeat_n(hk, q));
    if rem > 0 {
        parts.push(rem);
    }
    let p = Partition::sorted(parts)?;
    let (sq, cert, _) = construct_main(&p)?;
    let mut used = vec![false; cert.blocks.len()];
    let mut blocks: Vec<Block> = Vec::with_capacity(holes.len());
    for &h in holes {
        let idx = (0..cert.blocks.len())
            .find(|&i| !used[i] && cert.blocks[i].order() == h)
            .ok_or_else(|| Error::Internal(format!("no unused block of order {h}")))?;
        used[idx] = true;
        blocks.push(cert.blocks[idx].clone());
    }
    let out = SubsquareCertificate { blocks };
    out.check(&sq)?;
    Ok((sq, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::square::verify_realization;

    fn part(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn select_t_examples() {
        assert_eq!(select_t(5, 2, 1, 21).unwrap(), 5);
        let t = select_t(3, 2, 1, 11).unwrap();
        assert!(t_is_admissible(3, 2, 1, 11, t));
        assert!(select_t(3, 3, 1, 14).is_err());
        let t = select_t(6, 2, 1, 17).unwrap();
        assert!(t < 6 && t_is_admissible(6, 2, 1, 17, t));
        assert!(select_t(5, 2, 1, 13).is_err());
    }

    #[test]
    fn m_equal_examples() {
        for v in [&[2, 2, 2, 2, 2, 1, 1, 1, 1, 1][..], &[3, 3, 3, 2, 2, 2, 2, 2, 2, 2]] {
            let p = part(v);
            let (sq, cert, _) = construct_m_equal(&p).unwrap();
            verify_realization(&sq, &p, Some(&cert)).unwrap();
        }
        assert!(construct_m_equal(&part(&[3, 3, 3, 2, 1])).is_err());
    }

    #[test]
    fn main_examples() {
        for v in [&[3, 3, 3, 2, 1][..], &[2, 2, 2], &[5, 5, 5, 4, 3, 3, 1], &[4, 4, 4, 4, 1]] {
            let p = part(v);
            let (sq, cert, trace) = construct_main(&p).unwrap();
            assert_eq!(sq.order(), p.total());
            verify_realization(&sq, &p, Some(&cert)).unwrap();
            let (again, _) = trace.replay().unwrap();
            assert_eq!(again, sq);
        }
    }

    #[test]
    fn ils_examples() {
        let (sq, cert) = construct_ils(20, &[3, 2, 1]).unwrap();
        assert_eq!(sq.order(), 20);
        assert_eq!(cert.blocks.iter().map(|b| b.order()).collect::<Vec<_>>(), vec![3, 2, 1]);
        assert_eq!(construct_ils(12, &[3, 2, 1]).unwrap().0.order(), 12);
        assert!(construct_ils(11, &[3, 2, 1]).is_err());
    }
}
