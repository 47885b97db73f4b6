//! Latin squares with prescribed pairwise disjoint subsquares.
//!
//! The library builds realizations of integer partitions: a realization of
//! `(h_1 ... h_k)` is a latin square of order `h_1 + ... + h_k` with
//! pairwise disjoint subsquares of orders `h_1, ..., h_k`. Constructions run
//! on outline rectangles (amalgamated squares) and are lifted back to
//! squares with network flows; every result is verified before it is
//! returned.
//!
//! Indices are 0-based throughout the API. The text and JSON formats in
//! [`io`] are 1-based.

pub mod base;
pub mod circulant;
pub mod compose;
pub mod engine;
pub mod error;
pub mod existence;
pub mod io;
mod flow;
pub mod lift;
pub mod multiset;
pub mod oracle;
pub mod outline;
pub mod partition;
pub mod square;

pub use engine::{construct, construct_ils, construct_m_equal, construct_main, select_t, ConstructionTrace, TraceStep};
pub use error::{Error, Result};
pub use existence::{exists, Existence, Reason};
pub use lift::{lift, lift_to_realization};
pub use multiset::Multiset;
pub use outline::{reduce, OutlineRectangle, ValidationReport, Violation};
pub use partition::Partition;
pub use square::{is_latin, verify_realization, Block, LatinSquare, SubsquareCertificate};
