//! Outline rectangles: arrays of multisets that record how a latin square
//! looks after amalgamating groups of rows, columns and symbols.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::multiset::Multiset;
use crate::partition::Partition;
use crate::square::LatinSquare;

/// A `u x v` array of multisets over `0..t`, tagged with the row partition
/// `P` (`u` parts), column partition `Q` (`v` parts) and symbol partition `R`
/// (`t` parts).
///
/// Construction does not validate; see [`OutlineRectangle::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutlineRectangle {
    rows: Partition,
    cols: Partition,
    syms: Partition,
    cells: Vec<Multiset>,
}

/// One violated outline condition. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    CellSize { row: usize, col: usize, expected: usize, actual: usize },
    RowCount { row: usize, symbol: usize, expected: usize, actual: usize },
    ColumnCount { col: usize, symbol: usize, expected: usize, actual: usize },
    SymbolOutOfRange { row: usize, col: usize, symbol: usize },
    PartitionTotals { rows: usize, cols: usize, syms: usize },
}

/// Result of [`OutlineRectangle::validate`]; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn into_result(self, context: &str) -> Result<()> {
        match self.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::Internal(format!(
                "{context}: {} outline violations, first {v:?}",
                self.violations.len()
            ))),
        }
    }
}

impl OutlineRectangle {
    pub fn new(
        rows: Partition,
        cols: Partition,
        syms: Partition,
        cells: Vec<Multiset>,
    ) -> Result<Self> {
        if cells.len() != rows.len() * cols.len() {
            return Err(Error::Malformed(format!(
                "{} cells for a {}x{} outline",
                cells.len(),
                rows.len(),
                cols.len()
            )));
        }
        Ok(Self { rows, cols, syms, cells })
    }

    /// An outline with every cell empty.
    pub fn empty(rows: Partition, cols: Partition, syms: Partition) -> Self {
        let cells = vec![Multiset::new(); rows.len() * cols.len()];
        Self { rows, cols, syms, cells }
    }

    pub fn rows(&self) -> &Partition {
        &self.rows
    }

    pub fn cols(&self) -> &Partition {
        &self.cols
    }

    pub fn syms(&self) -> &Partition {
        &self.syms
    }

    /// Number of row blocks.
    pub fn height(&self) -> usize {
        self.rows.len()
    }

    /// Number of column blocks.
    pub fn width(&self) -> usize {
        self.cols.len()
    }

    pub fn cell(&self, i: usize, j: usize) -> &Multiset {
        &self.cells[i * self.cols.len() + j]
    }

    pub fn cell_mut(&mut self, i: usize, j: usize) -> &mut Multiset {
        let v = self.cols.len();
        &mut self.cells[i * v + j]
    }

    pub fn set_cell(&mut self, i: usize, j: usize, m: Multiset) {
        *self.cell_mut(i, j) = m;
    }

    pub fn cells(&self) -> &[Multiset] {
        &self.cells
    }

    /// Copies of `symbol` in row block `i`.
    pub fn row_count(&self, i: usize, symbol: usize) -> usize {
        (0..self.width()).map(|j| self.cell(i, j).count(symbol)).sum()
    }

    /// Copies of `symbol` in column block `j`.
    pub fn col_count(&self, j: usize, symbol: usize) -> usize {
        (0..self.height()).map(|i| self.cell(i, j).count(symbol)).sum()
    }

    /// Lists every violated outline condition.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let (u, v, t) = (self.rows.len(), self.cols.len(), self.syms.len());
        let totals = (self.rows.total(), self.cols.total(), self.syms.total());
        if totals.0 != totals.1 || totals.1 != totals.2 {
            violations.push(Violation::PartitionTotals {
                rows: totals.0,
                cols: totals.1,
                syms: totals.2,
            });
        }
        let mut row_counts = vec![0usize; u * t];
        let mut col_counts = vec![0usize; v * t];
        for i in 0..u {
            for j in 0..v {
                let cell = self.cell(i, j);
                let expected = self.rows.part(i) * self.cols.part(j);
                let actual = cell.len();
                if expected != actual {
                    violations.push(Violation::CellSize { row: i, col: j, expected, actual });
                }
                for (s, c) in cell.iter() {
                    if s >= t {
                        violations.push(Violation::SymbolOutOfRange { row: i, col: j, symbol: s });
                        continue;
                    }
                    row_counts[i * t + s] += c;
                    col_counts[j * t + s] += c;
                }
            }
        }
        for i in 0..u {
            for l in 0..t {
                let expected = self.rows.part(i) * self.syms.part(l);
                let actual = row_counts[i * t + l];
                if expected != actual {
                    violations.push(Violation::RowCount { row: i, symbol: l, expected, actual });
                }
            }
        }
        for j in 0..v {
            for l in 0..t {
                let expected = self.cols.part(j) * self.syms.part(l);
                let actual = col_counts[j * t + l];
                if expected != actual {
                    violations.push(Violation::ColumnCount { col: j, symbol: l, expected, actual });
                }
            }
        }
        ValidationReport { violations }
    }

    /// Swaps the roles of rows and columns.
    pub fn transpose(&self) -> Self {
        let (u, v) = (self.height(), self.width());
        let mut cells = Vec::with_capacity(u * v);
        for j in 0..v {
            for i in 0..u {
                cells.push(self.cell(i, j).clone());
            }
        }
        Self {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            syms: self.syms.clone(),
            cells,
        }
    }

    /// Amalgamates blocks: old row block `i` joins new row block `row_map[i]`,
    /// and likewise for columns and symbols. Every new index must receive at
    /// least one old block; new parts are the sums of their members.
    pub fn regroup(&self, row_map: &[usize], col_map: &[usize], sym_map: &[usize]) -> Result<Self> {
        let rows = grouped_partition(&self.rows, row_map, "row")?;
        let cols = grouped_partition(&self.cols, col_map, "column")?;
        let syms = grouped_partition(&self.syms, sym_map, "symbol")?;
        let mut out = Self::empty(rows, cols, syms);
        for i in 0..self.height() {
            for j in 0..self.width() {
                let moved = self.cell(i, j).map_symbols(|s| sym_map[s]);
                out.cell_mut(row_map[i], col_map[j]).union_with(&moved);
            }
        }
        Ok(out)
    }

    /// Amalgamates contiguous runs of blocks so that the new partitions are
    /// `rows`, `cols` and `syms`; each new part must be a sum of consecutive
    /// old parts.
    pub fn coarsen(&self, rows: &Partition, cols: &Partition, syms: &Partition) -> Result<Self> {
        let rm = contiguous_map(&self.rows, rows, "row")?;
        let cm = contiguous_map(&self.cols, cols, "column")?;
        let sm = contiguous_map(&self.syms, syms, "symbol")?;
        self.regroup(&rm, &cm, &sm)
    }

    /// Views a latin square as the outline with singleton partitions.
    pub fn from_square(square: &LatinSquare) -> Self {
        let n = square.order();
        let ones = Partition::singletons(n);
        let cells = square.cells().iter().map(|&s| Multiset::repeated(s, 1)).collect();
        Self {
            rows: ones.clone(),
            cols: ones.clone(),
            syms: ones,
            cells,
        }
    }

    /// If every cell is a single symbol and all partitions are singletons,
    /// returns the underlying latin square.
    pub fn to_square(&self) -> Option<LatinSquare> {
        let n = self.rows.len();
        if self.rows.total() != n || self.cols.total() != n || self.syms.total() != n || self.cols.len() != n {
            return None;
        }
        let cells: Option<Vec<usize>> = self.cells.iter().map(Multiset::as_singleton).collect();
        LatinSquare::from_cells(n, cells?).ok()
    }
}

fn grouped_partition(old: &Partition, map: &[usize], what: &str) -> Result<Partition> {
    if map.len() != old.len() {
        return Err(Error::Malformed(format!(
            "{what} map has {} entries for {} blocks",
            map.len(),
            old.len()
        )));
    }
    let k = map.iter().max().map_or(0, |m| m + 1);
    let mut parts = vec![0; k];
    for (i, &g) in map.iter().enumerate() {
        parts[g] += old.part(i);
    }
    Partition::new(parts).map_err(|_| Error::Malformed(format!("{what} map leaves a group empty")))
}

fn contiguous_map(fine: &Partition, coarse: &Partition, what: &str) -> Result<Vec<usize>> {
    let mut map = Vec::with_capacity(fine.len());
    let mut g = 0;
    let mut acc = 0;
    for &p in fine.parts() {
        if g >= coarse.len() {
            return Err(Error::Malformed(format!("{what} partitions have different totals")));
        }
        map.push(g);
        acc += p;
        if acc == coarse.part(g) {
            g += 1;
            acc = 0;
        } else if acc > coarse.part(g) {
            return Err(Error::Malformed(format!(
                "{what} partition {coarse} does not coarsen {fine}"
            )));
        }
    }
    if g != coarse.len() || acc != 0 {
        return Err(Error::Malformed(format!("{what} partitions have different totals")));
    }
    Ok(map)
}

/// The reduction of `square` modulo `(p, q, r)`.
///
/// Row block `i` collects rows `p.block(i)`, column block `j` collects columns
/// `q.block(j)`, and every symbol in `r.block(l)` becomes `l`.
pub fn reduce(square: &LatinSquare, p: &Partition, q: &Partition, r: &Partition) -> Result<OutlineRectangle> {
    let n = square.order();
    for part in [p, q, r] {
        if part.total() != n {
            return Err(Error::PartitionSum { expected: n, got: part.total() });
        }
    }
    let rmap = p.block_map();
    let cmap = q.block_map();
    let smap = r.block_map();
    let mut out = OutlineRectangle::empty(p.clone(), q.clone(), r.clone());
    for row in 0..n {
        for col in 0..n {
            out.cell_mut(rmap[row], cmap[col]).add(smap[square.get(row, col)], 1);
        }
    }
    debug_assert!(out.validate().is_valid());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_total_amalgamation() {
        let sq = LatinSquare::cyclic(5);
        let ones = Partition::singletons(5);
        let o = reduce(&sq, &ones, &ones, &ones).unwrap();
        assert_eq!(o, OutlineRectangle::from_square(&sq));
        assert_eq!(o.to_square().unwrap(), sq);

        let whole = Partition::whole(5);
        let o = reduce(&sq, &whole, &whole, &whole).unwrap();
        assert_eq!(o.cell(0, 0), &Multiset::repeated(0, 25));
        assert!(o.validate().is_valid());
    }

    #[test]
    fn wrong_totals_are_rejected() {
        let sq = LatinSquare::cyclic(3);
        let bad = Partition::new(vec![2, 2]).unwrap();
        let ok = Partition::singletons(3);
        assert!(matches!(reduce(&sq, &bad, &ok, &ok), Err(Error::PartitionSum { .. })));
    }

    #[test]
    fn empty_outline_is_valid() {
        let e = Partition::whole(0);
        let o = OutlineRectangle::empty(e.clone(), e.clone(), e);
        assert!(o.validate().is_valid());
    }

    #[test]
    fn coarsen_matches_direct_reduction() {
        let sq = LatinSquare::cyclic(6);
        let ones = Partition::singletons(6);
        let p = Partition::new(vec![2, 1, 3]).unwrap();
        let q = Partition::new(vec![3, 3]).unwrap();
        let r = Partition::new(vec![1, 5]).unwrap();
        let fine = reduce(&sq, &ones, &ones, &ones).unwrap();
        assert_eq!(fine.coarsen(&p, &q, &r).unwrap(), reduce(&sq, &p, &q, &r).unwrap());
        assert!(fine.coarsen(&Partition::new(vec![4, 2]).unwrap(), &q, &r).is_ok());
        assert!(fine
            .coarsen(&Partition::new(vec![5, 2]).unwrap(), &q, &r)
            .is_err());
    }
}
