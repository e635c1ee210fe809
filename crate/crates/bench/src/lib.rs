//! Fixed inputs shared by the criterion benches.

use b2tsp::instance::{generate_instance, GenMode};
use b2tsp::ks::ks_solve;
use b2tsp::{Instance, TwoTourSequence};

/// Points on a circle, fixed set of size `n / 5`.
pub fn convex(n: usize) -> Instance {
    generate_instance(n, (n / 5).max(1), 4, GenMode::KalmansonConvex).expect("valid sizes")
}

/// Uniform points with `fixed` nodes visited twice.
pub fn uniform(n: usize, fixed: usize) -> Instance {
    generate_instance(n, fixed, 100, GenMode::UniformSquare).expect("valid sizes")
}

/// A KS start to improve from.
pub fn start(inst: &Instance) -> TwoTourSequence {
    ks_solve(inst, 0)
        .expect("KS always succeeds on generated instances")
        .sequence
}
