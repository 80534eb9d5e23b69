//! Semi-invariant rings of gentle string algebras.
//!
//! The pipeline runs from a colored quiver with a dimension vector and a
//! rank sequence, through the partition equivalence graph, to a matching
//! semigroup whose alternating walks generate the ring. An independent
//! brute-force oracle lives in [`oracle`].

pub mod algebra;
pub mod error;
pub mod matching;
pub mod oracle;
pub mod peg;
pub mod rank;
pub mod report;
pub mod si;

pub use error::{Error, Result};
pub use report::{ValidationReport, Violation};
