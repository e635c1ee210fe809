//! Kalmanson-sequence heuristic: renumber the nodes along a good TSP tour and
//! run the exact Kalmanson dynamic program on the renumbered matrix.

use crate::error::Result;
use crate::exact::solve_kalmanson_exact;
use crate::instance::Instance;
use crate::kalmanson::permute_matrix;
use crate::tour::{nearest_neighbour, two_opt, Solution, TwoTourSequence};

/// One run from `start` (0-based). The nearest-neighbour tour is improved by
/// 2-opt, used as the new node numbering (the depot keeps label 0), solved
/// exactly, mapped back, and each resulting tour is polished with 2-opt.
pub fn ks_solve(inst: &Instance, start: usize) -> Result<Solution> {
    let matrix = inst.matrix();
    let order = two_opt(nearest_neighbour(matrix, start), matrix).into_nodes();
    let renumbered = permute_matrix(matrix, &order)?;
    let fixed: Vec<usize> = (0..order.len()).filter(|&k| inst.is_fixed(order[k])).collect();
    let sub = Instance::new(renumbered, &fixed, inst.p())?;
    let sol = solve_kalmanson_exact(&sub)?;
    let map = |t: &[usize]| t.iter().map(|&k| order[k]).collect::<Vec<_>>();
    let seq = TwoTourSequence::from_tours(&map(sol.sequence.tour1()), &map(sol.sequence.tour2()));
    Ok(Solution::new(seq.two_opt_each(matrix), matrix))
}

/// Best [`ks_solve`] result over every start node; ties keep the lowest start.
pub fn ks_multi(inst: &Instance) -> Result<Solution> {
    let mut best: Option<Solution> = None;
    for start in 0..inst.n() {
        let sol = ks_solve(inst, start)?;
        if best.as_ref().is_none_or(|b| sol.length < b.length) {
            best = Some(sol);
        }
    }
    Ok(best.expect("instances have at least two nodes"))
}
