//! Brute-force reference solvers for small instances.

use crate::error::{Error, Result};
use crate::instance::{DistanceMatrix, Instance};
use crate::tour::{Solution, TwoTourSequence};
use crate::vrp2::{Entry, Pin, Vrp2Instance, Vrp2Solution};

/// Default limit on `n + |S|` for [`brute_force_2tsp`].
pub const BRUTE_FORCE_2TSP_CAP: usize = 14;
/// Limit on customers, separator included, for [`brute_force_vrp2`].
pub const BRUTE_FORCE_VRP2_CAP: usize = 10;

/// Optimal closed tours from node 0 through every subset of the other nodes.
struct SubsetTours {
    /// `dp[mask * n + last]`: shortest path from 0 through `mask` ending at `last`.
    dp: Vec<f64>,
    parent: Vec<u8>,
    n: usize,
}

impl SubsetTours {
    fn new(matrix: &DistanceMatrix) -> Self {
        let n = matrix.len();
        let m = n - 1;
        let size = 1usize << m;
        let mut dp = vec![f64::INFINITY; size * n];
        let mut parent = vec![u8::MAX; size * n];
        for v in 1..n {
            dp[(1 << (v - 1)) * n + v] = matrix.get(0, v);
        }
        for mask in 1..size {
            for last in 1..n {
                let bit = 1 << (last - 1);
                if mask & bit == 0 || mask == bit {
                    continue;
                }
                let prev = mask & !bit;
                let mut best = f64::INFINITY;
                let mut arg = u8::MAX;
                for u in 1..n {
                    if prev >> (u - 1) & 1 == 1 {
                        let cand = dp[prev * n + u] + matrix.get(u, last);
                        if cand < best {
                            best = cand;
                            arg = u as u8;
                        }
                    }
                }
                dp[mask * n + last] = best;
                parent[mask * n + last] = arg;
            }
        }
        Self { dp, parent, n }
    }

    /// Optimal tour over `mask` (bit `v-1` for node `v`), depot excluded,
    /// oriented to be lexicographically smallest.
    fn tour(&self, mask: usize, matrix: &DistanceMatrix) -> Vec<usize> {
        if mask == 0 {
            return Vec::new();
        }
        let n = self.n;
        let mut best = (f64::INFINITY, 0);
        for last in 1..n {
            if mask >> (last - 1) & 1 == 1 {
                let cand = self.dp[mask * n + last] + matrix.get(last, 0);
                if cand < best.0 {
                    best = (cand, last);
                }
            }
        }
        let mut path = Vec::new();
        let (mut m, mut v) = (mask, best.1);
        while v != u8::MAX as usize {
            path.push(v);
            let p = self.parent[m * n + v] as usize;
            m &= !(1 << (v - 1));
            v = p;
        }
        let fwd: Vec<usize> = path.iter().rev().copied().collect();
        fwd.min(path)
    }
}

/// Length of an optimal TSP tour over every node of `matrix` (n ≤ 16).
pub fn optimal_tour_length(matrix: &DistanceMatrix) -> Result<f64> {
    let n = matrix.len();
    if n > 16 {
        return Err(Error::TooLarge {
            what: "Held-Karp tour",
            size: n,
            cap: 16,
        });
    }
    if n < 2 {
        return Ok(0.0);
    }
    let tours = SubsetTours::new(matrix);
    let t = tours.tour((1 << (n - 1)) - 1, matrix);
    Ok(TwoTourSequence::from_tours(&t, &[]).length(matrix))
}

/// Optimum by enumerating every balanced assignment of free nodes and
/// solving each tour exactly, with the default cap.
pub fn brute_force_2tsp(inst: &Instance) -> Result<Solution> {
    brute_force_2tsp_capped(inst, BRUTE_FORCE_2TSP_CAP)
}

/// [`brute_force_2tsp`] with an explicit limit on `n + |S|`. Among optimal
/// solutions the lexicographically smallest sequence is returned.
pub fn brute_force_2tsp_capped(inst: &Instance, cap: usize) -> Result<Solution> {
    let n = inst.n();
    let visits = inst.total_visits();
    if visits > cap || n > 16 {
        return Err(Error::TooLarge {
            what: "brute-force 2-TSP (n + |S|)",
            size: visits,
            cap,
        });
    }
    let (lo, hi) = (inst.min_tour_size(), inst.max_tour_size());
    if lo > hi {
        return Err(Error::Infeasible("empty balance window".into()));
    }
    let matrix = inst.matrix();
    let tours = SubsetTours::new(matrix);
    let bit = |v: usize| 1usize << (v - 1);
    let fixed_mask: usize = inst.fixed()[1..].iter().map(|&v| bit(v)).sum();
    let free: Vec<usize> = (1..n).filter(|&v| !inst.is_fixed(v)).collect();
    let s = inst.fixed().len();

    let mut best: Option<Solution> = None;
    for pick in 0usize..1 << free.len() {
        let k1 = pick.count_ones() as usize;
        let (size1, size2) = (s + k1, s + free.len() - k1);
        if size1 < lo || size1 > hi || size2 < lo || size2 > hi {
            continue;
        }
        let mut m1 = fixed_mask;
        let mut m2 = fixed_mask;
        for (k, &v) in free.iter().enumerate() {
            if pick >> k & 1 == 1 {
                m1 |= bit(v);
            } else {
                m2 |= bit(v);
            }
        }
        let seq = TwoTourSequence::from_tours(&tours.tour(m1, matrix), &tours.tour(m2, matrix));
        let sol = Solution::new(seq, matrix);
        let better = match &best {
            None => true,
            Some(b) => sol.length < b.length || (sol.length == b.length && sol.sequence.nodes() < b.sequence.nodes()),
        };
        if better {
            best = Some(sol);
        }
    }
    best.ok_or_else(|| Error::Infeasible("no balanced assignment exists".into()))
}

/// Exhaustive search over orders, separator positions and entry sides.
pub fn brute_force_vrp2(v: &Vrp2Instance<'_>) -> Result<Vrp2Solution> {
    let c = v.customers().len();
    if c > BRUTE_FORCE_VRP2_CAP {
        return Err(Error::TooLarge {
            what: "brute-force two-vehicle search (customers incl. separator)",
            size: c,
            cap: BRUTE_FORCE_VRP2_CAP,
        });
    }
    if v.start_demand() > v.capacity()[0] {
        return Err(Error::Infeasible("glued start exceeds vehicle 1 capacity".into()));
    }
    let mut search = Search {
        v,
        used: vec![false; c],
        route: Vec::with_capacity(c),
        best: None,
    };
    search.go(v.start_exit(), v.start_length(), v.start_demand(), 0, false);
    search
        .best
        .ok_or_else(|| Error::Infeasible("no two-vehicle route satisfies pins and capacities".into()))
}

struct Search<'s, 'a> {
    v: &'s Vrp2Instance<'a>,
    used: Vec<bool>,
    route: Vec<(usize, Entry)>,
    best: Option<Vrp2Solution>,
}

impl Search<'_, '_> {
    fn go(&mut self, exit: usize, acc: f64, before: usize, after: usize, sep_done: bool) {
        let v = self.v;
        let customers = v.customers();
        let m = v.matrix();
        if self.route.len() == customers.len() {
            let total = acc + m.get(exit, v.end_depot());
            if self.best.as_ref().is_none_or(|b| total < b.value) {
                self.best = Some(Vrp2Solution {
                    route: self.route.clone(),
                    value: total,
                });
            }
            return;
        }
        let [w1, w2] = v.capacity();
        for (k, cust) in customers.iter().enumerate() {
            if self.used[k] {
                continue;
            }
            let (mut b, mut a) = (before, after);
            if k > 0 {
                let pin = v.pins()[k];
                if sep_done {
                    a += cust.demand;
                    if pin == Pin::First || a > w2 {
                        continue;
                    }
                } else {
                    b += cust.demand;
                    if pin == Pin::Second || b > w1 {
                        continue;
                    }
                }
            }
            let sides: &[Entry] = if cust.left == cust.right {
                &[Entry::Left]
            } else {
                &[Entry::Left, Entry::Right]
            };
            for &e in sides {
                let (entry, out) = match e {
                    Entry::Left => (cust.left, cust.right),
                    Entry::Right => (cust.right, cust.left),
                };
                self.used[k] = true;
                self.route.push((k, e));
                self.go(out, acc + m.get(exit, entry) + cust.length, b, a, sep_done || k == 0);
                self.route.pop();
                self.used[k] = false;
            }
        }
    }
}
