//! The existence predicate for realizations, assembled from the known
//! characterizations.

use std::fmt;

use serde::Serialize;

use crate::partition::Partition;

/// Which characterization settled the question.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    /// At most four parts (Heinrich).
    AtMostFourParts,
    /// All parts equal (Dénes and Pásztor).
    SingleSize,
    /// Two distinct part sizes and more than four parts (Heinrich; Kuhl et al.).
    TwoSizes,
    /// The three largest parts are equal.
    ThreeLargestEqual,
}

impl Reason {
    /// Short machine-readable tag.
    pub fn tag(self) -> &'static str {
        match self {
            Reason::AtMostFourParts => "at-most-four-parts",
            Reason::SingleSize => "single-size",
            Reason::TwoSizes => "two-sizes",
            Reason::ThreeLargestEqual => "three-largest-equal",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Reason::AtMostFourParts => {
                "k <= 4: exists iff k = 1, or k = 3 with h1 = h2 = h3, or k = 4 with h1 = h2 = h3 or h2 = h3 = h4 and h1 <= 2 h4"
            }
            Reason::SingleSize => "a^k: exists iff k != 2",
            Reason::TwoSizes => "a^u b^(k-u), k > 4: exists iff u >= 3, or 0 < u < 3 and a <= (k-2) b",
            Reason::ThreeLargestEqual => "h1 = h2 = h3: always exists",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "snake_case")]
pub enum Existence {
    Yes(Reason),
    No(Reason),
    Unknown,
}

impl Existence {
    pub fn reason(self) -> Option<Reason> {
        match self {
            Existence::Yes(r) | Existence::No(r) => Some(r),
            Existence::Unknown => None,
        }
    }

    pub fn is_decided(self) -> bool {
        !matches!(self, Existence::Unknown)
    }
}

impl fmt::Display for Existence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Existence::Yes(r) => write!(f, "Yes ({})", r.tag()),
            Existence::No(r) => write!(f, "No ({})", r.tag()),
            Existence::Unknown => f.write_str("Unknown"),
        }
    }
}

/// Decides whether a realization of `p` exists, where the known results
/// reach. The parts are read in non-increasing order regardless of how `p`
/// stores them.
pub fn exists(p: &Partition) -> Existence {
    let mut h = p.parts().to_vec();
    h.sort_unstable_by(|a, b| b.cmp(a));
    let k = h.len();
    let answer = |ok: bool, r: Reason| if ok { Existence::Yes(r) } else { Existence::No(r) };
    match k {
        0 => return Existence::Unknown,
        1 => return Existence::Yes(Reason::AtMostFourParts),
        2 => return Existence::No(Reason::AtMostFourParts),
        3 => return answer(h[0] == h[2], Reason::AtMostFourParts),
        4 => {
            let ok = h[0] == h[2] || (h[1] == h[3] && h[0] <= 2 * h[3]);
            return answer(ok, Reason::AtMostFourParts);
        }
        _ => {}
    }
    let a = h[0];
    let b = h[k - 1];
    if a == b {
        return Existence::Yes(Reason::SingleSize);
    }
    if h.iter().all(|&x| x == a || x == b) {
        let u = h.iter().filter(|&&x| x == a).count();
        let ok = u >= 3 || a <= (k - 2) * b;
        return answer(ok, Reason::TwoSizes);
    }
    if h[0] == h[2] {
        return Existence::Yes(Reason::ThreeLargestEqual);
    }
    Existence::Unknown
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(parts: &[usize]) -> Existence {
        exists(&Partition::new(parts.to_vec()).unwrap())
    }

    #[test]
    fn documented_verdicts() {
        assert_eq!(ex(&[1, 1]), Existence::No(Reason::AtMostFourParts));
        assert_eq!(ex(&[4, 2, 2, 2]), Existence::Yes(Reason::AtMostFourParts));
        assert_eq!(ex(&[7, 7, 1, 1, 1, 1, 1]), Existence::No(Reason::TwoSizes));
        assert_eq!(ex(&[5, 5, 5, 4, 3, 3, 1]), Existence::Yes(Reason::ThreeLargestEqual));
        assert_eq!(ex(&[5, 3, 2, 2, 1]), Existence::Unknown);
    }

    #[test]
    fn small_k_boundaries() {
        assert_eq!(ex(&[9]), Existence::Yes(Reason::AtMostFourParts));
        assert_eq!(ex(&[2, 1, 1]), Existence::No(Reason::AtMostFourParts));
        assert_eq!(ex(&[5, 2, 2, 2]), Existence::No(Reason::AtMostFourParts));
        assert_eq!(ex(&[3, 3, 3, 1]), Existence::Yes(Reason::AtMostFourParts));
        assert_eq!(ex(&[2, 2, 2, 2, 2]), Existence::Yes(Reason::SingleSize));
        assert_eq!(ex(&[4, 1, 1, 1, 1, 1]), Existence::Yes(Reason::TwoSizes));
        assert_eq!(ex(&[5, 1, 1, 1, 1]), Existence::No(Reason::TwoSizes));
    }
}
