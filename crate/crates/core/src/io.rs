//! Text and JSON formats. Everything written or read here is 1-based.
//!
//! Grid: one row per line, entries separated by whitespace or commas; blank
//! lines and lines starting with `#` are skipped.
//!
//! Outline JSON: `{"rows":[..],"cols":[..],"syms":[..],"cells":[[{"3":2,..},..],..]}`
//! with symbol classes as keys.
//!
//! Construction JSON: `{"order":n,"partition":[..],"square":[[..]],
//! "blocks":[{"rows":[lo,hi],"cols":[lo,hi],"symbols":[lo,hi]}],"trace":..}`
//! with inclusive ranges.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::engine::ConstructionTrace;
use crate::error::{ensure, Error, Result};
use crate::multiset::Multiset;
use crate::outline::OutlineRectangle;
use crate::partition::Partition;
use crate::square::{Block, LatinSquare, SubsquareCertificate};

pub fn parse_grid(text: &str) -> Result<LatinSquare> {
    let mut rows = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| match t.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v - 1),
                _ => Err(Error::Malformed(format!("line {}: bad entry {t:?}", ln + 1))),
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    LatinSquare::from_rows(rows)
}

/// One row per line, entries joined by `sep`.
pub fn format_grid(square: &LatinSquare, sep: &str) -> String {
    let mut out = String::new();
    for row in square.rows() {
        let line: Vec<String> = row.iter().map(|s| (s + 1).to_string()).collect();
        out.push_str(&line.join(sep));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct OutlineJson {
    rows: Vec<usize>,
    cols: Vec<usize>,
    syms: Vec<usize>,
    cells: Vec<Vec<BTreeMap<String, usize>>>,
}

pub fn outline_to_json(o: &OutlineRectangle) -> String {
    let cells = (0..o.height())
        .map(|i| {
            (0..o.width())
                .map(|j| o.cell(i, j).iter().map(|(s, c)| ((s + 1).to_string(), c)).collect())
                .collect()
        })
        .collect();
    let j = OutlineJson {
        rows: o.rows().parts().to_vec(),
        cols: o.cols().parts().to_vec(),
        syms: o.syms().parts().to_vec(),
        cells,
    };
    serde_json::to_string(&j).expect("plain data serializes")
}

/// Parses and validates an outline rectangle.
pub fn outline_from_json(text: &str) -> Result<OutlineRectangle> {
    let j: OutlineJson = serde_json::from_str(text).map_err(|e| Error::Malformed(format!("outline JSON: {e}")))?;
    let (rows, cols, syms) = (Partition::new(j.rows)?, Partition::new(j.cols)?, Partition::new(j.syms)?);
    ensure!(j.cells.len() == rows.len(), Malformed, "{} cell rows for {} row classes", j.cells.len(), rows.len());
    let mut cells = Vec::with_capacity(rows.len() * cols.len());
    for (i, row) in j.cells.into_iter().enumerate() {
        ensure!(row.len() == cols.len(), Malformed, "cell row {} has {} entries", i + 1, row.len());
        for cell in row {
            let mut m = Multiset::new();
            for (key, count) in cell {
                let s: usize = key.trim().parse().map_err(|_| Error::Malformed(format!("bad symbol key {key:?}")))?;
                ensure!(s >= 1 && s <= syms.len(), Malformed, "symbol class {s} outside 1..={}", syms.len());
                m.add(s - 1, count);
            }
            cells.push(m);
        }
    }
    let o = OutlineRectangle::new(rows, cols, syms, cells)?;
    o.validate().into_result("outline JSON")?;
    Ok(o)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockJson {
    pub rows: [usize; 2],
    pub cols: [usize; 2],
    pub symbols: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionJson {
    pub order: usize,
    pub partition: Vec<usize>,
    pub square: Vec<Vec<usize>>,
    pub blocks: Vec<BlockJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace: Option<ConstructionTrace>,
}

fn range_of(v: &[usize]) -> Result<[usize; 2]> {
    ensure!(!v.is_empty(), Malformed, "empty block");
    ensure!(v.windows(2).all(|w| w[1] == w[0] + 1), Malformed, "block indices are not a contiguous range");
    Ok([v[0] + 1, v[v.len() - 1] + 1])
}

fn unrange(r: [usize; 2]) -> Result<Vec<usize>> {
    ensure!(r[0] >= 1 && r[0] <= r[1], Malformed, "bad range [{}, {}]", r[0], r[1]);
    Ok((r[0] - 1..r[1]).collect())
}

impl ConstructionJson {
    pub fn new(
        square: &LatinSquare,
        partition: &[usize],
        cert: &SubsquareCertificate,
        trace: Option<ConstructionTrace>,
    ) -> Result<Self> {
        let blocks = cert
            .blocks
            .iter()
            .map(|b| {
                Ok(BlockJson {
                    rows: range_of(&b.rows)?,
                    cols: range_of(&b.cols)?,
                    symbols: range_of(&b.symbols)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            order: square.order(),
            partition: partition.to_vec(),
            square: square.rows().map(|r| r.iter().map(|s| s + 1).collect()).collect(),
            blocks,
            trace,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Malformed(format!("construction JSON: {e}")))
    }

    /// The square and certificate in 0-based form.
    pub fn decode(&self) -> Result<(LatinSquare, SubsquareCertificate)> {
        let rows = self
            .square
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&s| s.checked_sub(1).ok_or_else(|| Error::Malformed("symbol 0 in a 1-based square".into())))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let sq = LatinSquare::from_rows(rows)?;
        ensure!(sq.order() == self.order, Malformed, "order {} but square has {} rows", self.order, sq.order());
        let blocks = self
            .blocks
            .iter()
            .map(|b| Ok(Block { rows: unrange(b.rows)?, cols: unrange(b.cols)?, symbols: unrange(b.symbols)? }))
            .collect::<Result<_>>()?;
        Ok((sq, SubsquareCertificate { blocks }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_round_trip() {
        let sq = LatinSquare::cyclic(4);
        let text = format_grid(&sq, " ");
        assert_eq!(parse_grid(&text).unwrap(), sq);
        assert_eq!(parse_grid(&format_grid(&sq, ",")).unwrap(), sq);
        assert_eq!(parse_grid("# c\n1 2\n\n2 1\n").unwrap(), LatinSquare::cyclic(2));
        assert!(parse_grid("0 1\n1 0").is_err());
        assert!(parse_grid("1 2\n1 2").is_err());
    }

    #[test]
    fn outline_round_trip() {
        let p = Partition::new(vec![2, 1]).unwrap();
        let o = crate::outline::reduce(&LatinSquare::cyclic(3), &p, &p, &p).unwrap();
        let text = outline_to_json(&o);
        assert_eq!(outline_from_json(&text).unwrap(), o);
        assert!(outline_from_json(r#"{"rows":[1],"cols":[1],"syms":[1],"cells":[[{"2":1}]]}"#).is_err());
    }

    #[test]
    fn construction_round_trip() {
        let p = Partition::new(vec![3, 3, 3, 2, 1]).unwrap();
        let (sq, cert, trace) = crate::engine::construct_main(&p).unwrap();
        let j = ConstructionJson::new(&sq, p.parts(), &cert, Some(trace)).unwrap();
        let back = ConstructionJson::from_json(&j.to_json()).unwrap();
        assert_eq!(back, j);
        let (sq2, cert2) = back.decode().unwrap();
        assert_eq!((sq2, cert2), (sq, cert));
    }
}
