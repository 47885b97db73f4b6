#![allow(dead_code)]

use std::path::PathBuf;

use subsquares::io::parse_grid;
use subsquares::{LatinSquare, Multiset, OutlineRectangle, Partition};

pub const FIG2_ROWS: &str = "1,1,1,2,2,1,1";
pub const FIG2_COLS: &str = "3,2,2,1,1";
pub const FIG2_SYMS: &str = "3,1,1,1,1,1,1";
pub const FIG1_PARTITION: &str = "3,2,2,1,1";

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn fig1() -> LatinSquare {
    parse_grid(&std::fs::read_to_string(data("fig1.txt")).unwrap()).unwrap()
}

/// The second figure as an outline rectangle, read off its banded display.
pub fn fig2() -> OutlineRectangle {
    let text = std::fs::read_to_string(data("fig2_display.txt")).unwrap();
    let grid: Vec<Vec<usize>> = text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect())
        .collect();
    let rows: Partition = FIG2_ROWS.parse().unwrap();
    let cols: Partition = FIG2_COLS.parse().unwrap();
    let syms: Partition = FIG2_SYMS.parse().unwrap();
    let mut cells = Vec::new();
    for i in 0..rows.len() {
        for j in 0..cols.len() {
            let mut m = Multiset::new();
            for x in rows.block(i) {
                for y in cols.block(j) {
                    m.add(grid[x][y] - 1, 1);
                }
            }
            cells.push(m);
        }
    }
    OutlineRectangle::new(rows, cols, syms, cells).unwrap()
}

use rand::seq::SliceRandom;
use rand::Rng;
use subsquares::circulant::TripleSet;

/// Random latin square: a random isotope of the cyclic square, re-lifted
/// from its reduction modulo random partitions so that non-cyclic squares
/// appear too.
pub fn random_latin<R: Rng>(n: usize, rng: &mut R) -> LatinSquare {
    let perm = |rng: &mut R| {
        let mut v: Vec<usize> = (0..n).collect();
        v.shuffle(rng);
        v
    };
    let base = LatinSquare::cyclic(n).permuted(&perm(rng), &perm(rng), &perm(rng));
    if rng.gen_bool(0.5) {
        return base;
    }
    let (p, q, r) = (random_partition(n, rng), random_partition(n, rng), random_partition(n, rng));
    let o = subsquares::reduce(&base, &p, &q, &r).unwrap();
    let lifted = subsquares::lift(&o).unwrap();
    lifted.permuted(&perm(rng), &perm(rng), &perm(rng))
}

/// Random composition of `n` (parts in random order).
pub fn random_partition<R: Rng>(n: usize, rng: &mut R) -> Partition {
    let mut parts = Vec::new();
    let mut left = n;
    while left > 0 {
        let x = rng.gen_range(1..=left.min(1 + n / 2));
        parts.push(x);
        left -= x;
    }
    Partition::new(parts).unwrap()
}

/// Random non-increasing tail `h_4 >= ... >= h_k` with first part `h4`,
/// last part `hk` and sum above `floor`.
pub fn random_tail<R: Rng>(h4: usize, hk: usize, floor: usize, extra: usize, rng: &mut R) -> Vec<usize> {
    let mut tail = vec![h4];
    let mut sum = h4 + hk;
    let target = floor + 1 + rng.gen_range(0..=extra);
    while sum < target {
        let x = rng.gen_range(hk..=h4);
        tail.push(x);
        sum += x;
    }
    tail.push(hk);
    tail.sort_unstable_by(|a, b| b.cmp(a));
    tail
}

/// Checks the two properties of a circulant outline for `p` directly:
/// a latin subsquare on the first `h1` lines and symbols, constant tail
/// blocks, and the triple sets (coverage of the tail lines, symbol multiset,
/// distinct pairs, and the three cells each triple pins down).
pub fn audit_circulant(o: &OutlineRectangle, p: &Partition, triples: &[TripleSet]) -> Result<(), String> {
    let h = p.parts();
    let (h1, h2, n) = (h[0], h[1], p.total());
    let single = |x: usize, y: usize| o.cell(x, y).as_singleton().ok_or(format!("cell ({x},{y}) not a singleton"));
    for x in 0..h1 {
        let mut row = vec![false; h1];
        let mut col = vec![false; h1];
        for y in 0..h1 {
            let (a, b) = (single(x, y)?, single(y, x)?);
            if a >= h1 || b >= h1 || row[a] || col[b] {
                return Err(format!("leading block breaks at line {x}"));
            }
            row[a] = true;
            col[b] = true;
        }
    }
    for i in 1..h.len() {
        for x in p.block(i) {
            for y in p.block(i) {
                if single(x, y)? != h1 + i - 1 {
                    return Err(format!("tail block {i} not constant at ({x},{y})"));
                }
            }
        }
    }
    if triples.len() != h1 - 2 * h2 {
        return Err(format!("{} triple sets, expected {}", triples.len(), h1 - 2 * h2));
    }
    let mut v: Vec<usize> = (1..h.len()).flat_map(|i| std::iter::repeat_n(h1 + i - 1, h[i])).collect();
    v.sort_unstable();
    let mut pairs = std::collections::HashSet::new();
    for ts in triples {
        let i = ts.index;
        let mut xs: Vec<usize> = ts.triples.iter().map(|t| t.0).collect();
        let mut ys: Vec<usize> = ts.triples.iter().map(|t| t.1).collect();
        let mut zs: Vec<usize> = ts.triples.iter().map(|t| t.2).collect();
        xs.sort_unstable();
        ys.sort_unstable();
        zs.sort_unstable();
        let tail: Vec<usize> = (h1..n).collect();
        if xs != tail || ys != tail {
            return Err(format!("triple set {i} does not cover the tail lines"));
        }
        if zs != v {
            return Err(format!("triple set {i} has the wrong symbol multiset"));
        }
        for &(x, y, z) in &ts.triples {
            if !pairs.insert((x, y)) {
                return Err(format!("pair ({x},{y}) repeats"));
            }
            if single(x, y)? != i || single(x, i)? != z || single(i, y)? != z {
                return Err(format!("triple ({x},{y},{z}) of set {i} does not match the cells"));
            }
        }
    }
    Ok(())
}

/// Random parameters satisfying the circulant preconditions:
/// `t = n - h1` odd, `4 h2 <= t + 1`, `2 h2 <= h1 <= t + 1 - 2 h2`.
pub fn random_circulant_partition<R: Rng>(rng: &mut R) -> Partition {
    loop {
        let h2 = rng.gen_range(1..=3);
        let hk = rng.gen_range(1..=h2);
        let mut tail = vec![h2];
        let len = rng.gen_range(3..=12);
        for _ in 0..len {
            tail.push(rng.gen_range(hk..=h2));
        }
        tail.sort_unstable_by(|a, b| b.cmp(a));
        let t: usize = tail.iter().sum();
        if t.is_multiple_of(2) || 4 * h2 > t + 1 {
            continue;
        }
        let lo = 2 * h2;
        let hi = t + 1 - 2 * h2;
        if lo > hi {
            continue;
        }
        let h1 = rng.gen_range(lo..=hi);
        let mut parts = vec![h1];
        parts.extend(tail);
        return Partition::new(parts).unwrap();
    }
}

/// Random `(h1, h4, hk, r)` from a partition `h1^m h_(m+1) ... h_k` with
/// `h1 >= 3`, `h4 >= 2`, `h4 > hk` and `(2m - 4) h1 + (m - 1) h_(m+1) < r`,
/// where `m` counts every part equal to `h1`.
pub fn random_hypothesis<R: Rng>(max_h1: usize, rng: &mut R) -> (usize, usize, usize, usize) {
    loop {
        let h1 = rng.gen_range(3..=max_h1);
        let h4 = if rng.gen_bool(0.2) { h1 } else { rng.gen_range(2..=h1) };
        let hk = rng.gen_range(1..h4);
        let tail = random_tail(h4, hk, 2 * (h1 + h4), 4 * h1, rng);
        let r: usize = tail.iter().sum();
        let m = 3 + tail.iter().take_while(|&&x| x == h1).count();
        let next = tail[m - 3];
        if (2 * m - 4) * h1 + (m - 1) * next < r {
            return (h1, h4, hk, r);
        }
    }
}
