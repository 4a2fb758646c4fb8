//! n-detection test set analysis.
//!
//! Given a small combinational circuit, this crate computes for every
//! four-way bridging fault the smallest `n` such that any n-detection
//! stuck-at test set must detect it ([`worstcase`]), and estimates how likely
//! randomly built n-detection test sets are to detect it ([`avgcase`]).

pub mod avgcase;
pub mod bits;
pub mod detmap;
pub mod faultmodels;
pub mod logicsim;
pub mod netlist;
pub mod random;
pub mod report;
pub mod worstcase;

pub use bits::BitVector;
pub use detmap::{build_universe, DetectionSet, DetectionUniverse};
pub use netlist::{parse_bench, Circuit, LineId, VectorId};
