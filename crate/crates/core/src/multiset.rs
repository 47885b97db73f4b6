use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// A finite multiset of symbols, stored as sorted `(symbol, count)` pairs
/// with no zero counts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Multiset {
    entries: Vec<(usize, usize)>,
}

impl Multiset {
    pub fn new() -> Self {
        Self::default()
    }

    /// `count` copies of `symbol`.
    pub fn repeated(symbol: usize, count: usize) -> Self {
        let mut m = Self::new();
        m.add(symbol, count);
        m
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(pairs: I) -> Self {
        let mut m = Self::new();
        for (s, c) in pairs {
            m.add(s, c);
        }
        m
    }

    pub fn count(&self, symbol: usize) -> usize {
        match self.entries.binary_search_by_key(&symbol, |e| e.0) {
            Ok(i) => self.entries[i].1,
            Err(_) => 0,
        }
    }

    pub fn add(&mut self, symbol: usize, count: usize) {
        if count == 0 {
            return;
        }
        match self.entries.binary_search_by_key(&symbol, |e| e.0) {
            Ok(i) => self.entries[i].1 += count,
            Err(i) => self.entries.insert(i, (symbol, count)),
        }
    }

    /// Removes `count` copies; returns false (and leaves `self` unchanged)
    /// when fewer are present.
    pub fn remove(&mut self, symbol: usize, count: usize) -> bool {
        if count == 0 {
            return true;
        }
        match self.entries.binary_search_by_key(&symbol, |e| e.0) {
            Ok(i) if self.entries[i].1 >= count => {
                self.entries[i].1 -= count;
                if self.entries[i].1 == 0 {
                    self.entries.remove(i);
                }
                true
            }
            _ => false,
        }
    }

    pub fn union_with(&mut self, other: &Multiset) {
        for &(s, c) in &other.entries {
            self.add(s, c);
        }
    }

    /// Total number of elements, counting repetition.
    pub fn len(&self) -> usize {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(symbol, count)` pairs in increasing symbol order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.entries.iter().copied()
    }

    /// Number of distinct symbols.
    pub fn support(&self) -> usize {
        self.entries.len()
    }

    /// Relabels every symbol through `f`, merging collisions.
    pub fn map_symbols(&self, mut f: impl FnMut(usize) -> usize) -> Multiset {
        let mut acc: BTreeMap<usize, usize> = BTreeMap::new();
        for &(s, c) in &self.entries {
            *acc.entry(f(s)).or_default() += c;
        }
        Multiset {
            entries: acc.into_iter().collect(),
        }
    }

    /// Multiplies every count by `factor`.
    pub fn scaled(&self, factor: usize) -> Multiset {
        if factor == 0 {
            return Multiset::new();
        }
        Multiset {
            entries: self.entries.iter().map(|&(s, c)| (s, c * factor)).collect(),
        }
    }

    /// The single symbol if the multiset has exactly one element.
    pub fn as_singleton(&self) -> Option<usize> {
        match self.entries.as_slice() {
            [(s, 1)] => Some(*s),
            _ => None,
        }
    }
}

impl FromIterator<usize> for Multiset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for s in iter {
            m.add(s, 1);
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_remove_and_count() {
        let mut m: Multiset = [3, 1, 3, 2].into_iter().collect();
        assert_eq!(m.len(), 4);
        assert_eq!(m.count(3), 2);
        assert!(m.remove(3, 2));
        assert_eq!(m.count(3), 0);
        assert_eq!(m.support(), 2);
        assert!(!m.remove(1, 2));
        assert_eq!(m.count(1), 1);
        assert_eq!(m.map_symbols(|_| 0), Multiset::repeated(0, 2));
    }
}
