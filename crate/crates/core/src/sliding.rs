//! Sliding-subset improvement: carve a small two-vehicle instance around two
//! windows of the current route, solve it exactly and put it back.
//!
//! The two tours are read as one list of route positions,
//! `t¹₁ … t¹ₖ₁ t²₁ … t²ₖ₂`, with customer 0 between `t¹ₖ₁` and `t²₁`.
//! Window `S1` covers positions `a..a+s` and must touch route 1; window `S2`
//! covers `b..b+s`, lies after `S1` and must touch route 2. Window nodes
//! become singleton customers, everything in between is aggregated so that
//! the small instance always has `2s + 6` entities.

use std::time::Instant;

use crate::error::{invalid, Result};
use crate::improves;
use crate::instance::Instance;
use crate::tour::{validate_sequence, TwoTourSequence};
use crate::vrp2::{expand_route, solve_vrp2_exact, to_vrp2, AggregatedCustomer, Pin, Vrp2Instance, DEFAULT_EXACT_CAP};

/// Window size, slide step and the current window offsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowConfig {
    pub s: usize,
    pub l: usize,
    /// First position of `S1`.
    pub s1_start: usize,
    /// First position of `S2`.
    pub s2_start: usize,
}

/// `start, start+step, …` below `last`, then `last` itself.
fn stepped(start: usize, last: usize, step: usize) -> impl Iterator<Item = usize> {
    let head = (start..last).step_by(step.max(1));
    let tail = (start <= last).then_some(last);
    head.chain(tail)
}

/// Every window placement `(a, b)` in enumeration order for routes with `k1`
/// and `k2` customers: `S2` slides to the route end, then `S1` advances and
/// `S2` restarts right after it (or, on the first pass, straddling the
/// separator). The last placement of each slide is clamped rather than
/// skipped.
pub fn placements(k1: usize, k2: usize, s: usize, l: usize) -> Vec<(usize, usize)> {
    let total = k1 + k2;
    if s == 0 || k1 == 0 || k2 == 0 || total < 2 * s {
        return Vec::new();
    }
    let a_max = (k1 - 1).min(total - 2 * s);
    let mut out = Vec::new();
    for a in stepped(0, a_max, l) {
        let b_min = (a + s).max((k1 + 1).saturating_sub(s));
        if b_min + s > total {
            continue;
        }
        out.extend(stepped(b_min, total - s, l).map(|b| (a, b)));
    }
    out
}

/// One piece of the disassembled route: a contiguous run of positions.
#[derive(Debug, Clone, Copy)]
struct Piece {
    start: usize,
    end: usize,
}

impl Piece {
    fn len(&self) -> usize {
        self.end - self.start
    }
}

/// Builds the small instance for one window placement.
///
/// Entities are the two depots (the start depot glued to the positions
/// before `S1`), customer 0, the `2s` window nodes and exactly three more
/// customers made from the remaining runs. Runs never cross the separator;
/// if there are fewer than three, single nodes are split off: first the
/// last node of the first run with at least two nodes, otherwise the last
/// node glued to the start depot.
pub fn disassemble<'a>(q: &TwoTourSequence, cfg: WindowConfig, inst: &'a Instance) -> Result<Vrp2Instance<'a>> {
    let positions: Vec<usize> = q.tour1().iter().chain(q.tour2()).copied().collect();
    let k1 = q.tour1().len();
    let total = positions.len();
    let WindowConfig {
        s,
        s1_start: a,
        s2_start: b,
        ..
    } = cfg;
    if s == 0 {
        return Err(invalid("window size must be positive"));
    }
    let ok = a < k1 && b >= a + s && b + s > k1 && b + s <= total;
    if !ok {
        return Err(invalid(format!(
            "windows at {a} and {b} of size {s} do not fit routes of {k1} and {} customers",
            total - k1
        )));
    }

    let mut runs = Vec::new();
    let mut push_run = |start: usize, end: usize| {
        if start < k1 && k1 < end {
            runs.push(Piece { start, end: k1 });
            runs.push(Piece { start: k1, end });
        } else if start < end {
            runs.push(Piece { start, end });
        }
    };
    push_run(a + s, b);
    push_run(b + s, total);

    let mut lead = a;
    while runs.len() < 3 {
        if let Some(k) = runs.iter().position(|r| r.len() >= 2) {
            let r = runs[k];
            runs[k] = Piece {
                start: r.start,
                end: r.end - 1,
            };
            runs.insert(
                k + 1,
                Piece {
                    start: r.end - 1,
                    end: r.end,
                },
            );
        } else if lead > 0 {
            lead -= 1;
            runs.insert(
                0,
                Piece {
                    start: lead,
                    end: lead + 1,
                },
            );
        } else {
            return Err(invalid("route too short for a fixed-size window instance"));
        }
    }

    let matrix = inst.matrix();
    let mut pieces: Vec<Piece> = (a..a + s)
        .chain(b..b + s)
        .map(|p| Piece { start: p, end: p + 1 })
        .collect();
    pieces.extend(runs);

    let mut customers = Vec::with_capacity(pieces.len());
    let mut pins = Vec::with_capacity(pieces.len());
    for p in pieces {
        let path = &positions[p.start..p.end];
        customers.push(AggregatedCustomer::unit_path(path, matrix)?);
        let pinned = path.iter().any(|&v| inst.is_fixed(v));
        pins.push(match (pinned, p.start < k1) {
            (false, _) => Pin::Free,
            (true, true) => Pin::First,
            (true, false) => Pin::Second,
        });
    }
    let mut start = vec![0];
    start.extend_from_slice(&positions[..lead]);
    let cap = inst.route_capacity();
    Vrp2Instance::new(matrix, start, 0, 0, customers, pins, [cap, cap])
}

/// [`h_improve_with`] without a deadline and with the default exact cap.
pub fn h_improve(q: &TwoTourSequence, s: usize, l: usize, inst: &Instance) -> TwoTourSequence {
    h_improve_with(q, s, l, inst, None, DEFAULT_EXACT_CAP)
}

/// Runs the sliding-subset search until a full sweep finds nothing better.
///
/// After every strict improvement the sweep restarts from the new
/// solution. If the routes are too short for windows of size `s`, `s` is
/// shrunk to fit; if the whole instance is no bigger than one window
/// instance it is solved exactly instead. The deadline is checked between
/// placements. The result is never longer than `q`.
pub fn h_improve_with(
    q: &TwoTourSequence,
    s: usize,
    l: usize,
    inst: &Instance,
    deadline: Option<Instant>,
    exact_cap: usize,
) -> TwoTourSequence {
    let matrix = inst.matrix();
    let mut cur = q.clone();
    let mut cur_len = cur.length(matrix);
    let expired = || deadline.is_some_and(|d| Instant::now() >= d);

    'restart: loop {
        let k1 = cur.tour1().len();
        let k2 = cur.tour2().len();
        let total = k1 + k2;
        let s_eff = s.min(k1).min(k2);
        if total <= 2 * s_eff + 3 || s_eff == 0 {
            // Sub-instances would cover the whole route.
            if total < exact_cap && !expired() {
                let v = to_vrp2(inst);
                if let Ok(sol) = solve_vrp2_exact(&v, exact_cap) {
                    let cand = expand_route(&sol, &v);
                    let len = cand.length(matrix);
                    if improves(len, cur_len) {
                        return cand;
                    }
                }
            }
            return cur;
        }
        for (a, b) in placements(k1, k2, s_eff, l) {
            if expired() {
                return cur;
            }
            let cfg = WindowConfig {
                s: s_eff,
                l,
                s1_start: a,
                s2_start: b,
            };
            let Ok(v) = disassemble(&cur, cfg, inst) else {
                continue;
            };
            let Ok(sol) = solve_vrp2_exact(&v, exact_cap) else {
                continue;
            };
            let cand = expand_route(&sol, &v);
            let len = cand.length(matrix);
            if improves(len, cur_len) {
                debug_assert_eq!(validate_sequence(&cand, inst), Ok(()));
                cur = cand;
                cur_len = len;
                continue 'restart;
            }
        }
        return cur;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{euclidean_matrix, generate_instance, GenMode, Rounding};
    use crate::oracle::brute_force_2tsp;
    use crate::vrp2::Entry;
    use crate::Vrp2Solution;

    fn line(n: usize, fixed: &[usize], p: usize) -> Instance {
        let pts: Vec<(f64, f64)> = (0..n).map(|i| (i as f64, 0.0)).collect();
        Instance::new(euclidean_matrix(&pts, Rounding::Exact).unwrap(), fixed, p).unwrap()
    }

    fn scattered(n: usize) -> Instance {
        let pts: Vec<(f64, f64)> = (0..n).map(|i| ((i * 7 % 11) as f64, (i * i % 13) as f64)).collect();
        Instance::new(euclidean_matrix(&pts, Rounding::Exact).unwrap(), &[0], n).unwrap()
    }

    #[test]
    fn first_placement_straddles_the_separator() {
        let p = placements(6, 5, 2, 1);
        assert_eq!(p[0], (0, 5));
        assert!(p.iter().all(|&(a, b)| a < 6 && b >= a + 2 && b + 2 > 6 && b + 2 <= 11));
        // clamped ends are visited
        assert!(p.contains(&(0, 9)));
        assert!(p.iter().any(|&(a, _)| a == 5));
        let q = placements(6, 5, 2, 4);
        assert_eq!(
            q.iter().filter(|&&(a, _)| a == 0).map(|&(_, b)| b).collect::<Vec<_>>(),
            vec![5, 9]
        );
    }

    #[test]
    fn no_placements_when_a_route_is_empty() {
        assert!(placements(0, 5, 1, 1).is_empty());
        assert!(placements(5, 0, 1, 1).is_empty());
    }

    #[test]
    fn first_step_splits_the_separating_run() {
        let inst = scattered(12);
        let q = TwoTourSequence::from_tours(&[1, 2, 3, 4, 5, 6], &[7, 8, 9, 10, 11]);
        let cfg = WindowConfig {
            s: 2,
            l: 1,
            s1_start: 0,
            s2_start: 5,
        };
        let v = disassemble(&q, cfg, &inst).unwrap();
        assert_eq!(v.entity_count(), 10);
        let paths: Vec<&[usize]> = v.customers().iter().map(|c| c.path.as_slice()).collect();
        assert_eq!(
            paths,
            vec![&[0][..], &[1], &[2], &[6], &[7], &[3, 4], &[5], &[8, 9, 10, 11]]
        );
        assert_eq!(v.start(), &[0]);
    }

    #[test]
    fn second_step_glues_the_lead_to_the_depot() {
        let inst = scattered(12);
        let q = TwoTourSequence::from_tours(&[1, 2, 3, 4, 5, 6], &[7, 8, 9, 10, 11]);
        let cfg = WindowConfig {
            s: 2,
            l: 2,
            s1_start: 2,
            s2_start: 7,
        };
        let v = disassemble(&q, cfg, &inst).unwrap();
        assert_eq!(v.entity_count(), 10);
        assert_eq!(v.start(), &[0, 1, 2]);
        assert_eq!(v.start_demand(), 2);
    }

    #[test]
    fn aggregates_match_their_source_paths() {
        let inst = scattered(12);
        let q = TwoTourSequence::from_tours(&[1, 2, 3, 4, 5, 6], &[7, 8, 9, 10, 11]);
        for (a, b) in placements(6, 5, 2, 1) {
            let v = disassemble(
                &q,
                WindowConfig {
                    s: 2,
                    l: 1,
                    s1_start: a,
                    s2_start: b,
                },
                &inst,
            )
            .unwrap();
            assert_eq!(v.entity_count(), 10);
            for c in &v.customers()[1..] {
                assert_eq!(c, &AggregatedCustomer::unit_path(&c.path, inst.matrix()).unwrap());
            }
        }
    }

    #[test]
    fn current_arrangement_round_trips() {
        let inst = generate_instance(14, 1, 9, GenMode::UniformSquare).unwrap();
        let q = crate::ks::ks_solve(&inst, 0).unwrap().sequence;
        let k1 = q.tour1().len();
        let cfg = WindowConfig {
            s: 2,
            l: 1,
            s1_start: 0,
            s2_start: k1 - 1,
        };
        let v = disassemble(&q, cfg, &inst).unwrap();
        // Rebuild the current order as a route over the small instance.
        let mut route = Vec::new();
        let mut order: Vec<(usize, usize)> = v.customers()[1..]
            .iter()
            .enumerate()
            .map(|(k, c)| (q.nodes()[1..].iter().position(|&x| x == c.left).unwrap(), k + 1))
            .collect();
        order.sort();
        let sep_at = order.iter().position(|&(pos, _)| pos >= k1).unwrap_or(order.len());
        for (idx, &(_, k)) in order.iter().enumerate() {
            if idx == sep_at {
                route.push((0, Entry::Left));
            }
            route.push((k, Entry::Left));
        }
        if sep_at == order.len() {
            route.push((0, Entry::Left));
        }
        let sol = Vrp2Solution { route, value: 0.0 };
        assert!(sol.is_feasible(&v));
        let back = expand_route(&sol, &v);
        assert_eq!(back.length(inst.matrix()), q.length(inst.matrix()));
    }

    #[test]
    fn collinear_eight_reaches_the_optimum() {
        let inst = line(8, &[0], 1);
        let bad = TwoTourSequence::from_tours(&[7, 1, 5, 3], &[2, 6, 4]);
        assert_eq!(validate_sequence(&bad, &inst), Ok(()));
        let opt = brute_force_2tsp(&inst).unwrap().length;
        for s in [1, 2] {
            let out = h_improve(&bad, s, 1, &inst);
            assert_eq!(validate_sequence(&out, &inst), Ok(()));
            assert!(out.length(inst.matrix()) <= bad.length(inst.matrix()));
            if 2 * s + 6 >= 7 + 3 {
                assert_eq!(out.length(inst.matrix()), opt);
            }
        }
    }

    #[test]
    fn fixed_nodes_stay_in_both_tours() {
        for seed in 0..5 {
            let inst = generate_instance(20, 5, seed, GenMode::UniformSquare).unwrap();
            let q = crate::ks::ks_solve(&inst, 3).unwrap().sequence.swapped();
            let out = h_improve(&q, 3, 2, &inst);
            assert_eq!(validate_sequence(&out, &inst), Ok(()));
            assert!(out.length(inst.matrix()) <= q.length(inst.matrix()));
        }
    }
}
