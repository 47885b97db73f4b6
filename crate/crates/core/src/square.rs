//! Latin squares, subsquare certificates and realization checks.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::Partition;

/// Checks row and column uniqueness of a square array with 0-based symbols.
///
/// Returns `Ok(false)` for a well-formed array that repeats a symbol, and an
/// error when the array is not square or holds a symbol outside `0..n`.
pub fn is_latin(rows: &[Vec<usize>]) -> Result<bool> {
    let n = rows.len();
    for (r, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Malformed(format!(
                "row {r} has {} entries, expected {n}",
                row.len()
            )));
        }
        if let Some(&s) = row.iter().find(|&&s| s >= n) {
            return Err(Error::Malformed(format!("symbol {s} out of range in row {r}")));
        }
    }
    let mut seen = vec![false; n];
    for row in rows {
        seen.iter_mut().for_each(|s| *s = false);
        for &s in row {
            if std::mem::replace(&mut seen[s], true) {
                return Ok(false);
            }
        }
    }
    for c in 0..n {
        seen.iter_mut().for_each(|s| *s = false);
        for row in rows {
            if std::mem::replace(&mut seen[row[c]], true) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A latin square of order `n` over symbols `0..n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LatinSquare {
    n: usize,
    cells: Vec<usize>,
}

impl LatinSquare {
    /// Validates and wraps a row-major array.
    pub fn from_rows(rows: Vec<Vec<usize>>) -> Result<Self> {
        if !is_latin(&rows)? {
            return Err(Error::NotLatin("a symbol repeats in some row or column".into()));
        }
        let n = rows.len();
        Ok(Self {
            n,
            cells: rows.into_iter().flatten().collect(),
        })
    }

    /// Validates a flat row-major array of length `n * n`.
    pub fn from_cells(n: usize, cells: Vec<usize>) -> Result<Self> {
        if cells.len() != n * n {
            return Err(Error::Malformed(format!(
                "expected {} cells, got {}",
                n * n,
                cells.len()
            )));
        }
        Self::from_rows(cells.chunks(n.max(1)).map(<[usize]>::to_vec).collect())
    }

    /// Wraps cells that the caller has already proven latin.
    pub(crate) fn from_cells_unchecked(n: usize, cells: Vec<usize>) -> Self {
        debug_assert_eq!(cells.len(), n * n);
        Self { n, cells }
    }

    /// Cyclic square `(r + c) mod n`.
    pub fn cyclic(n: usize) -> Self {
        let cells = (0..n).flat_map(|r| (0..n).map(move |c| (r + c) % n)).collect();
        Self { n, cells }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> usize {
        self.cells[row * self.n + col]
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn rows(&self) -> impl Iterator<Item = &[usize]> {
        self.cells.chunks(self.n.max(1)).take(self.n)
    }

    pub fn to_rows(&self) -> Vec<Vec<usize>> {
        self.rows().map(<[usize]>::to_vec).collect()
    }

    /// Applies row, column and symbol permutations: the result has
    /// `sym[old]` at `(row[r], col[c])` for every old cell `(r, c)`.
    pub fn permuted(&self, row: &[usize], col: &[usize], sym: &[usize]) -> Self {
        let n = self.n;
        let mut cells = vec![0; n * n];
        for r in 0..n {
            for c in 0..n {
                cells[row[r] * n + col[c]] = sym[self.get(r, c)];
            }
        }
        Self { n, cells }
    }
}

impl fmt::Debug for LatinSquare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "LatinSquare(order {})", self.n)?;
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|s| (s + 1).to_string()).collect();
            writeln!(f, "  {}", line.join(" "))?;
        }
        Ok(())
    }
}

/// One subsquare: its row set, column set and symbol set (all sorted).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Block {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub symbols: Vec<usize>,
}

impl Block {
    /// A block on the contiguous ranges `range` for rows, columns and symbols.
    pub fn diagonal(range: std::ops::Range<usize>) -> Self {
        let v: Vec<usize> = range.collect();
        Self {
            rows: v.clone(),
            cols: v.clone(),
            symbols: v,
        }
    }

    pub fn order(&self) -> usize {
        self.rows.len()
    }
}

/// Witness for a family of pairwise disjoint subsquares.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubsquareCertificate {
    pub blocks: Vec<Block>,
}

impl SubsquareCertificate {
    /// The normal-form geometry of `p`: block `i` sits on `p.block(i)` in all
    /// three coordinates.
    pub fn normal_form(p: &Partition) -> Self {
        Self {
            blocks: (0..p.len()).map(|i| Block::diagonal(p.block(i))).collect(),
        }
    }

    /// Checks pairwise disjointness and the subsquare property of every block.
    pub fn check(&self, square: &LatinSquare) -> Result<()> {
        let n = square.order();
        for (b, block) in self.blocks.iter().enumerate() {
            let h = block.rows.len();
            if block.cols.len() != h || block.symbols.len() != h {
                return Err(Error::Malformed(format!(
                    "block {b} has mismatched row/column/symbol counts"
                )));
            }
            for set in [&block.rows, &block.cols, &block.symbols] {
                if set.iter().any(|&x| x >= n) {
                    return Err(Error::Malformed(format!("block {b} indexes outside the square")));
                }
                if set.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Malformed(format!(
                        "block {b} index sets must be strictly increasing"
                    )));
                }
            }
        }
        let mut owner = vec![usize::MAX; n];
        for (what, pick) in [
            ("rows", 0usize),
            ("columns", 1),
            ("symbols", 2),
        ] {
            owner.iter_mut().for_each(|o| *o = usize::MAX);
            for (b, block) in self.blocks.iter().enumerate() {
                let set = match pick {
                    0 => &block.rows,
                    1 => &block.cols,
                    _ => &block.symbols,
                };
                for &x in set {
                    if owner[x] != usize::MAX {
                        return Err(Error::NotDisjoint {
                            first: owner[x],
                            second: b,
                            what,
                        });
                    }
                    owner[x] = b;
                }
            }
        }
        let mut in_block = vec![false; n];
        for (b, block) in self.blocks.iter().enumerate() {
            in_block.iter_mut().for_each(|s| *s = false);
            for &s in &block.symbols {
                in_block[s] = true;
            }
            for &r in &block.rows {
                for &c in &block.cols {
                    let s = square.get(r, c);
                    if !in_block[s] {
                        return Err(Error::NotSubsquare {
                            block: b,
                            row: r,
                            col: c,
                            symbol: s,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Verifies that `square` realizes `p`.
///
/// With `certificate == None` the realization must be in normal form and the
/// normal-form certificate is returned. Otherwise the supplied certificate is
/// checked: block `i` must have order `p.part(i)`.
pub fn verify_realization(
    square: &LatinSquare,
    p: &Partition,
    certificate: Option<&SubsquareCertificate>,
) -> Result<SubsquareCertificate> {
    if !is_latin(&square.to_rows())? {
        return Err(Error::NotLatin("row or column repeats a symbol".into()));
    }
    if p.total() != square.order() {
        return Err(Error::PartitionSum {
            expected: square.order(),
            got: p.total(),
        });
    }
    let cert = match certificate {
        None => SubsquareCertificate::normal_form(p),
        Some(c) => {
            if c.blocks.len() != p.len() {
                return Err(Error::Malformed(format!(
                    "certificate has {} blocks, partition has {} parts",
                    c.blocks.len(),
                    p.len()
                )));
            }
            for (i, b) in c.blocks.iter().enumerate() {
                if b.order() != p.part(i) {
                    return Err(Error::Malformed(format!(
                        "block {i} has order {}, partition part is {}",
                        b.order(),
                        p.part(i)
                    )));
                }
            }
            c.clone()
        }
    };
    cert.check(square)?;
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_latin_checks() {
        assert!(is_latin(&[vec![0]]).unwrap());
        assert!(!is_latin(&[vec![0, 1], vec![0, 1]]).unwrap());
        assert!(is_latin(&[vec![0, 1], vec![1]]).is_err());
        assert!(is_latin(&[vec![0, 2], vec![1, 0]]).is_err());
    }

    #[test]
    fn whole_square_is_one_block() {
        let sq = LatinSquare::cyclic(4);
        let p = Partition::new(vec![4]).unwrap();
        let cert = verify_realization(&sq, &p, None).unwrap();
        assert_eq!(cert.blocks, vec![Block::diagonal(0..4)]);
    }

    #[test]
    fn caller_certificate_geometry() {
        // cyclic order 4 has the intercalate {0,2}x{0,2} on symbols {0,2}
        let sq = LatinSquare::cyclic(4);
        let p = Partition::new(vec![2, 2]).unwrap();
        let cert = SubsquareCertificate {
            blocks: vec![
                Block { rows: vec![0, 2], cols: vec![0, 2], symbols: vec![0, 2] },
                Block { rows: vec![1, 3], cols: vec![0, 2], symbols: vec![1, 3] },
            ],
        };
        assert!(matches!(
            verify_realization(&sq, &p, Some(&cert)),
            Err(Error::NotDisjoint { what: "columns", .. })
        ));
    }
}
