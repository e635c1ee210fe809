//! Solvers for the balanced two-period travelling salesman problem.
//!
//! A salesman visits every customer in one of two periods, except for a set
//! of fixed customers (always containing the depot) that must be visited in
//! both. The two tours may differ in size by at most `p` nodes.
//!
//! Both tours are handled as one combined sequence
//! `⟨depot, tour 1…, depot, tour 2…, depot⟩` ([`TwoTourSequence`]). The
//! crate provides:
//!
//! * [`exact`]: a cubic dynamic program that is optimal on Kalmanson
//!   matrices and yields a feasible solution on any matrix,
//! * [`ks`]: the renumber-then-solve heuristic built on it,
//! * [`vrp2`]: the two-vehicle routing reformulation with a subset dynamic
//!   program over aggregated customers,
//! * [`sliding`]: the sliding-window disassemble/aggregate improvement,
//! * [`pipeline`]: the multi-start driver tying everything together,
//! * [`oracle`]: brute-force reference solvers for small instances.
//!
//! Node ids are 0-based in the API; the depot is node 0. Files and CLI output
//! use 1-based ids.

pub mod error;
pub mod exact;
pub mod instance;
pub mod kalmanson;
pub mod ks;
pub mod oracle;
pub mod pipeline;
pub mod sliding;
pub mod tour;
pub mod vrp2;

mod sum;

pub use error::{Error, Result};
pub use instance::{DistanceMatrix, GenMode, Instance, Rounding};
pub use pipeline::{InitKind, Record, SolverConfig};
pub use tour::{Tour, TwoTourSequence};
pub use vrp2::{AggregatedCustomer, Vrp2Instance, Vrp2Solution};

/// Relative slack used to decide whether a move is a strict improvement.
pub const IMPROVEMENT_EPS: f64 = 1e-9;

/// Returns true if `candidate` is shorter than `current` by more than the
/// shared relative improvement threshold.
pub fn improves(candidate: f64, current: f64) -> bool {
    candidate < current - IMPROVEMENT_EPS * (1.0 + current.abs())
}
