//! Exhaustive search for small realizations, and partition enumeration.

use crate::error::{ensure, Result};
use crate::partition::Partition;
use crate::square::LatinSquare;

pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Result of [`find_realization_bruteforce`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome {
    /// A realization in normal form.
    Found(LatinSquare),
    /// The search space was exhausted: no realization exists.
    None,
    /// The node budget ran out first.
    BudgetExceeded { nodes: u64 },
}

/// Searches for a realization of `p` in normal form.
///
/// Diagonal blocks are fixed to cyclic squares on their own symbols, which
/// loses nothing: any subsquare can be swapped for another on the same
/// symbols. The remaining cells are filled most-constrained first; a cell in
/// block row `i` and block column `j` may only take symbols outside blocks
/// `i` and `j`.
pub fn find_realization_bruteforce(p: &Partition, budget: u64) -> Result<OracleOutcome> {
    let n = p.total();
    ensure!(n >= 1, Precondition, "empty partition");
    ensure!(n <= 64, Precondition, "order {n} is too large for the exhaustive search");
    let block = p.block_map();
    let mut grid = vec![usize::MAX; n * n];
    let mut row_used = vec![0u64; n];
    let mut col_used = vec![0u64; n];
    for i in 0..p.len() {
        let r = p.block(i);
        let h = r.len();
        for x in r.clone() {
            for y in r.clone() {
                let s = r.start + (x - r.start + y - r.start) % h;
                grid[x * n + y] = s;
                row_used[x] |= 1 << s;
                col_used[y] |= 1 << s;
            }
        }
    }
    let block_mask: Vec<u64> = (0..p.len()).map(|i| p.block(i).fold(0u64, |m, s| m | 1 << s)).collect();
    let mut allowed = vec![0u64; n * n];
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut empty = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if grid[x * n + y] == usize::MAX {
                allowed[x * n + y] = full & !block_mask[block[x]] & !block_mask[block[y]];
                empty.push(x * n + y);
            }
        }
    }
    let mut s = Search { n, grid, row_used, col_used, allowed, empty, nodes: 0, budget };
    Ok(match s.solve() {
        Some(true) => OracleOutcome::Found(LatinSquare::from_cells(n, s.grid)?),
        Some(false) => OracleOutcome::None,
        None => OracleOutcome::BudgetExceeded { nodes: s.nodes },
    })
}

struct Search {
    n: usize,
    grid: Vec<usize>,
    row_used: Vec<u64>,
    col_used: Vec<u64>,
    allowed: Vec<u64>,
    /// unfilled cells; the prefix up to the current depth is filled
    empty: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl Search {
    fn candidates(&self, c: usize) -> u64 {
        let (x, y) = (c / self.n, c % self.n);
        self.allowed[c] & !self.row_used[x] & !self.col_used[y]
    }

    /// `Some(true)` when solved, `Some(false)` when exhausted, `None` on
    /// budget overrun.
    fn solve(&mut self) -> Option<bool> {
        self.fill(0)
    }

    fn fill(&mut self, depth: usize) -> Option<bool> {
        if depth == self.empty.len() {
            return Some(true);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        // most constrained cell first
        let mut best = depth;
        let mut best_count = u32::MAX;
        for idx in depth..self.empty.len() {
            let cnt = self.candidates(self.empty[idx]).count_ones();
            if cnt < best_count {
                best = idx;
                best_count = cnt;
                if cnt <= 1 {
                    break;
                }
            }
        }
        if best_count == 0 {
            return Some(false);
        }
        self.empty.swap(depth, best);
        let c = self.empty[depth];
        let (x, y) = (c / self.n, c % self.n);
        let mut cand = self.candidates(c);
        while cand != 0 {
            let s = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            self.grid[c] = s;
            self.row_used[x] |= 1 << s;
            self.col_used[y] |= 1 << s;
            let r = self.fill(depth + 1);
            if r != Some(false) {
                return r;
            }
            self.row_used[x] &= !(1 << s);
            self.col_used[y] &= !(1 << s);
        }
        self.grid[c] = usize::MAX;
        Some(false)
    }
}

/// All partitions of `n` with non-increasing parts, in lexicographic order.
pub fn enumerate_partitions(n: usize) -> Vec<Partition> {
    fn go(left: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for part in 1..=max.min(left) {
            cur.push(part);
            go(left - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out.into_iter().map(|v| Partition::new(v).expect("positive parts")).collect()
}
