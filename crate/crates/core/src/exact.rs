//! Exact cubic dynamic program for the balanced 2-TSP on Kalmanson matrices.
//!
//! Nodes are placed into the combined sequence in increasing index order.
//! Tour 1 grows at its end, tour 2 grows at its front, so in the final
//! sequence tour 1 is ascending and tour 2 descending. A fixed node is placed
//! in both tours at once. After nodes `0..=k` are placed, a state is given by
//! the last node of tour 1, the first node of tour 2 (one of them is `k`) and
//! the number `m` of tour-2 nodes, counting the closing depot copy and not the
//! middle one.
//!
//! The search covers every balanced allocation, each tour in master-tour
//! order. On Kalmanson matrices that order is optimal for any allocation, so
//! the result is optimal; on other matrices it is a feasible upper bound.

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::tour::{Solution, TwoTourSequence};

/// Which frontier holds the highest placed node `k`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Side {
    /// `last1 == k`, `first2 == other`
    Tour1,
    /// `last1 == other`, `first2 == k`
    Tour2,
}

struct Layout {
    n: usize,
    max_m: usize,
}

impl Layout {
    #[inline]
    fn layer_idx(&self, other: usize, side: Side, m: usize) -> usize {
        ((other * 2) + side as usize) * (self.max_m + 1) + m
    }

    fn layer_len(&self) -> usize {
        self.n * 2 * (self.max_m + 1)
    }

    #[inline]
    fn choice_idx(&self, k: usize, other: usize, side: Side, m: usize) -> usize {
        k * self.layer_len() + self.layer_idx(other, side, m)
    }
}

#[inline]
fn ends(k: usize, other: usize, side: Side) -> (usize, usize) {
    match side {
        Side::Tour1 => (k, other),
        Side::Tour2 => (other, k),
    }
}

/// Value of a state once every node is placed: close tour 1 through the
/// middle depot into tour 2, provided `m` is inside the balance window and
/// the state is reachable (`last` at least the largest fixed node).
///
/// `i` is the non-`n-1` end of the frontier, 0-based.
pub fn dp_boundary(i: usize, m: usize, inst: &Instance) -> f64 {
    let n = inst.n();
    let c = inst.matrix();
    if i < inst.max_fixed() || i >= n {
        return f64::INFINITY;
    }
    if m < inst.min_tour_size() || m > inst.max_tour_size() {
        return f64::INFINITY;
    }
    c.get(i, 0) + c.get(0, n - 1)
}

/// Solves the instance with the cubic dynamic program.
///
/// Ties prefer appending the next node to tour 1.
pub fn solve_kalmanson_exact(inst: &Instance) -> Result<Solution> {
    let n = inst.n();
    if n < 2 {
        return Err(Error::Invalid("at least two nodes are required".into()));
    }
    let (lo, hi) = (inst.min_tour_size(), inst.max_tour_size());
    if lo > hi {
        return Err(Error::Infeasible("empty balance window".into()));
    }
    let c = inst.matrix();
    let layout = Layout { n, max_m: hi };

    // next_fixed[v]: smallest fixed node strictly greater than v, or n.
    let mut next_fixed = vec![n; n];
    for v in (0..n.saturating_sub(1)).rev() {
        next_fixed[v] = if inst.is_fixed(v + 1) { v + 1 } else { next_fixed[v + 1] };
    }
    // A frontier with distinct ends skips no fixed node between them.
    let feasible = |k: usize, other: usize| other == k || next_fixed[other] > k;

    let inf = f64::INFINITY;
    let mut next = vec![inf; layout.layer_len()];
    let mut cur = vec![inf; layout.layer_len()];
    let mut choice = vec![0u64; (n * layout.layer_len()).div_ceil(64)];

    let k = n - 1;
    for other in 0..=k {
        for side in [Side::Tour1, Side::Tour2] {
            if other == k && side == Side::Tour2 {
                continue;
            }
            let (last1, first2) = ends(k, other, side);
            for m in 1..=hi.min(k + 1) {
                let v = if feasible(k, other) && m >= lo {
                    c.get(last1, 0) + c.get(0, first2)
                } else {
                    inf
                };
                next[layout.layer_idx(other, side, m)] = v;
            }
        }
    }

    for k in (0..n - 1).rev() {
        let nx = k + 1;
        let nx_fixed = inst.is_fixed(nx);
        let m_top = hi.min(k + 1);
        for other in 0..=k {
            let ok = feasible(k, other);
            for side in [Side::Tour1, Side::Tour2] {
                if other == k && side == Side::Tour2 {
                    continue;
                }
                let (last1, first2) = ends(k, other, side);
                for m in 1..=m_top {
                    let idx = layout.layer_idx(other, side, m);
                    if !ok {
                        cur[idx] = inf;
                        continue;
                    }
                    let up = |s: Side, o: usize, mm: usize| {
                        if mm > hi {
                            inf
                        } else {
                            next[layout.layer_idx(o, s, mm)]
                        }
                    };
                    if nx_fixed {
                        cur[idx] = c.get(last1, nx) + c.get(nx, first2) + up(Side::Tour1, nx, m + 1);
                    } else {
                        let a = c.get(last1, nx) + up(Side::Tour1, first2, m);
                        let b = c.get(nx, first2) + up(Side::Tour2, last1, m + 1);
                        if b < a {
                            cur[idx] = b;
                            let bit = layout.choice_idx(k, other, side, m);
                            choice[bit / 64] |= 1 << (bit % 64);
                        } else {
                            cur[idx] = a;
                        }
                    }
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }

    let best = next[layout.layer_idx(0, Side::Tour1, 1)];
    if !best.is_finite() {
        return Err(Error::Infeasible("no balanced sequence exists".into()));
    }

    let mut tour1 = Vec::new();
    let mut tour2_rev = Vec::new();
    let (mut other, mut side, mut m) = (0usize, Side::Tour1, 1usize);
    for k in 0..n - 1 {
        let nx = k + 1;
        let (last1, first2) = ends(k, other, side);
        if inst.is_fixed(nx) {
            tour1.push(nx);
            tour2_rev.push(nx);
            (other, side, m) = (nx, Side::Tour1, m + 1);
        } else {
            let bit = layout.choice_idx(k, other, side, m);
            if choice[bit / 64] >> (bit % 64) & 1 == 1 {
                tour2_rev.push(nx);
                (other, side, m) = (last1, Side::Tour2, m + 1);
            } else {
                tour1.push(nx);
                (other, side) = (first2, Side::Tour1);
            }
        }
    }
    tour2_rev.reverse();
    let seq = TwoTourSequence::from_tours(&tour1, &tour2_rev);
    Ok(Solution::new(seq, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{euclidean_matrix, Rounding};
    use crate::tour::validate_sequence;

    fn line(n: usize, fixed: &[usize], p: usize) -> Instance {
        let pts: Vec<(f64, f64)> = (0..n).map(|i| (i as f64, 0.0)).collect();
        Instance::new(euclidean_matrix(&pts, Rounding::Exact).unwrap(), fixed, p).unwrap()
    }

    #[test]
    fn collinear_free_split() {
        let inst = line(4, &[0], 1);
        let sol = solve_kalmanson_exact(&inst).unwrap();
        assert_eq!(sol.length, 8.0);
        let mut t1 = sol.sequence.tour1().to_vec();
        let mut t2 = sol.sequence.tour2().to_vec();
        t1.sort();
        t2.sort();
        let mut sets = [t1, t2];
        sets.sort();
        assert_eq!(sets, [vec![1], vec![2, 3]]);
        assert_eq!(validate_sequence(&sol.sequence, &inst), Ok(()));
    }

    #[test]
    fn collinear_with_fixed_node() {
        let inst = line(4, &[0, 2], 1);
        let sol = solve_kalmanson_exact(&inst).unwrap();
        assert_eq!(sol.length, 10.0);
        assert_eq!(validate_sequence(&sol.sequence, &inst), Ok(()));
    }

    #[test]
    fn all_fixed_gives_two_master_tours() {
        for p in 0..4 {
            let inst = line(4, &[0, 1, 2, 3], p);
            let sol = solve_kalmanson_exact(&inst).unwrap();
            assert_eq!(sol.length, 12.0);
            assert_eq!(sol.sequence.nodes(), &[0, 1, 2, 3, 0, 3, 2, 1, 0]);
        }
    }

    #[test]
    fn tours_are_sorted() {
        let inst = line(9, &[0, 4], 2);
        let sol = solve_kalmanson_exact(&inst).unwrap();
        assert!(sol.sequence.tour1().windows(2).all(|w| w[0] < w[1]));
        assert!(sol.sequence.tour2().windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn two_nodes() {
        let inst = line(2, &[0], 1);
        let sol = solve_kalmanson_exact(&inst).unwrap();
        assert_eq!(sol.length, 2.0);
        let inst = line(2, &[0, 1], 0);
        assert_eq!(solve_kalmanson_exact(&inst).unwrap().length, 4.0);
    }

    #[test]
    fn boundary_values() {
        let inst = line(4, &[0], 1);
        assert_eq!(dp_boundary(3, 2, &inst), 6.0);
        assert_eq!(dp_boundary(3, 1, &inst), f64::INFINITY);
        let inst = line(4, &[0, 2], 1);
        assert_eq!(dp_boundary(1, 3, &inst), f64::INFINITY);
        assert_eq!(dp_boundary(2, 3, &inst), 2.0 + 3.0);
    }
}
