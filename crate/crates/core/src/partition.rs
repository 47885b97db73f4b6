//! Integer partitions with explicit part order.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered list of positive parts.
///
/// Part order is significant: reductions modulo an unsorted partition
/// (for instance `1,1,1,2,2,1,1`) amalgamate different rows than the sorted
/// one would. Use [`Partition::sorted`] when the non-increasing order is
/// wanted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
    offsets: Vec<usize>,
}

impl Partition {
    /// Keeps the parts in the given order.
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if let Some(pos) = parts.iter().position(|&p| p == 0) {
            return Err(Error::InvalidPartition(format!("part {pos} is zero")));
        }
        let mut offsets = Vec::with_capacity(parts.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for &p in &parts {
            acc += p;
            offsets.push(acc);
        }
        Ok(Self { parts, offsets })
    }

    /// Sorts the parts into non-increasing order.
    pub fn sorted(mut parts: Vec<usize>) -> Result<Self> {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self::new(parts)
    }

    /// `count` parts of size one.
    pub fn singletons(count: usize) -> Self {
        Self::new(vec![1; count]).expect("ones are positive")
    }

    /// The partition with a single part, or the empty partition for zero.
    pub fn whole(n: usize) -> Self {
        if n == 0 {
            Self::new(Vec::new()).expect("empty")
        } else {
            Self::new(vec![n]).expect("positive")
        }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn part(&self, i: usize) -> usize {
        self.parts[i]
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Sum of the parts.
    pub fn total(&self) -> usize {
        *self.offsets.last().expect("offsets never empty")
    }

    /// The index range covered by part `i`: `offset(i)..offset(i) + part(i)`.
    pub fn block(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    /// Index of the part whose block contains `x`.
    pub fn block_of(&self, x: usize) -> usize {
        debug_assert!(x < self.total());
        self.offsets.partition_point(|&o| o <= x) - 1
    }

    /// Lookup table mapping every element of `0..total` to its block index.
    pub fn block_map(&self) -> Vec<usize> {
        let mut map = Vec::with_capacity(self.total());
        for (i, &p) in self.parts.iter().enumerate() {
            map.extend(std::iter::repeat_n(i, p));
        }
        map
    }

    pub fn is_non_increasing(&self) -> bool {
        self.parts.windows(2).all(|w| w[0] >= w[1])
    }

    /// Number of distinct part sizes.
    pub fn distinct_sizes(&self) -> usize {
        let mut sizes = self.parts.clone();
        sizes.sort_unstable();
        sizes.dedup();
        sizes.len()
    }

    /// Multiplicity of the first part among the leading run of equal parts.
    pub fn leading_run(&self) -> usize {
        match self.parts.first() {
            None => 0,
            Some(&h) => self.parts.iter().take_while(|&&p| p == h).count(),
        }
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;
    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Self::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut i = 0;
        while i < self.parts.len() {
            let h = self.parts[i];
            let run = self.parts[i..].iter().take_while(|&&p| p == h).count();
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            if run > 1 {
                write!(f, "{h}^{run}")?;
            } else {
                write!(f, "{h}")?;
            }
            i += run;
        }
        Ok(())
    }
}

/// Parses either list notation (`3,3,3,2,1`) or exponent notation
/// (`3^3 2 1`). Separators are commas and whitespace, freely mixed; the part
/// order is preserved.
impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = Vec::new();
        // glue "3 ^ 3" into "3^3" before splitting
        let compact: String = {
            let mut out = String::with_capacity(s.len());
            let mut pending_ws = false;
            for ch in s.chars() {
                if ch.is_whitespace() {
                    pending_ws = true;
                    continue;
                }
                if pending_ws && ch != '^' && !out.ends_with('^') && !out.is_empty() {
                    out.push(' ');
                }
                pending_ws = false;
                out.push(ch);
            }
            out
        };
        for token in compact.split(|c: char| c == ',' || c.is_whitespace()) {
            if token.is_empty() {
                continue;
            }
            let (base, exp) = match token.split_once('^') {
                Some((b, e)) => (b, e),
                None => (token, "1"),
            };
            let base: usize = base
                .parse()
                .map_err(|_| Error::Malformed(format!("bad part `{token}`")))?;
            let exp: usize = exp
                .parse()
                .map_err(|_| Error::Malformed(format!("bad exponent in `{token}`")))?;
            if base == 0 {
                return Err(Error::InvalidPartition(format!("zero part in `{token}`")));
            }
            parts.extend(std::iter::repeat_n(base, exp));
        }
        if parts.is_empty() {
            return Err(Error::Malformed("empty partition".into()));
        }
        Self::new(parts)
    }
}
