//! Two-vehicle routing model and its subset dynamic program.
//!
//! A 2-TSP solution is read as a single route `d1 → … → 0 → … → d2` where
//! the separator customer `0` ends vehicle 1 and starts vehicle 2. Customers
//! may be aggregated sub-paths with two entry points `L`/`R`, an internal
//! length and a demand. Fixed customers are pinned to vehicle 1 (before the
//! separator) or vehicle 2 (after it), and each vehicle has a capacity.
//!
//! The exact solver is a Held–Karp style recursion over `(customer, entry
//! side, remaining set)`. For the 2-TSP the start depot, the separator and
//! the end depot all sit at node 0.

use crate::error::{invalid, Error, Result};
use crate::instance::{DistanceMatrix, Instance};
use crate::sum::exact_sum;
use crate::tour::TwoTourSequence;

/// Largest customer count (separator included) accepted by
/// [`solve_vrp2_exact`] unless a different cap is given.
pub const DEFAULT_EXACT_CAP: usize = 22;

/// A customer in the two-vehicle model; possibly a whole sub-path.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedCustomer {
    /// Left entry point (first node of `path`).
    pub left: usize,
    /// Right entry point (last node of `path`).
    pub right: usize,
    /// Length of `path` walked from `left` to `right`.
    pub length: f64,
    pub demand: usize,
    pub path: Vec<usize>,
}

impl AggregatedCustomer {
    /// Single node with unit demand.
    pub fn singleton(node: usize) -> Self {
        Self {
            left: node,
            right: node,
            length: 0.0,
            demand: 1,
            path: vec![node],
        }
    }

    /// Sub-path with unit demand per node.
    pub fn unit_path(path: &[usize], matrix: &DistanceMatrix) -> Result<Self> {
        let ones = vec![1; matrix.len()];
        aggregate_path(path, matrix, &ones)
    }

    fn separator(node: usize) -> Self {
        Self {
            demand: 0,
            ..Self::singleton(node)
        }
    }

    /// Same customer with its path reversed and ends swapped.
    pub fn flipped(&self) -> Self {
        let mut path = self.path.clone();
        path.reverse();
        Self {
            left: self.right,
            right: self.left,
            length: self.length,
            demand: self.demand,
            path,
        }
    }
}

/// Compresses a sub-path into one customer. `demands` is indexed by node.
pub fn aggregate_path(path: &[usize], matrix: &DistanceMatrix, demands: &[usize]) -> Result<AggregatedCustomer> {
    let (&left, &right) = match (path.first(), path.last()) {
        (Some(l), Some(r)) => (l, r),
        _ => return Err(invalid("cannot aggregate an empty path")),
    };
    Ok(AggregatedCustomer {
        left,
        right,
        length: exact_sum(path.windows(2).map(|w| matrix.get(w[0], w[1]))),
        demand: path.iter().map(|&v| demands[v]).sum(),
        path: path.to_vec(),
    })
}

/// Vehicle a customer is pinned to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pin {
    #[default]
    Free,
    /// Must precede the separator (set F1).
    First,
    /// Must follow the separator (set F2).
    Second,
}

/// Entry side of a customer in a route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entry {
    /// Entered at `left`, path walked forwards.
    Left,
    /// Entered at `right`, path walked backwards.
    Right,
}

/// A two-vehicle instance over aggregated customers.
///
/// `customers[0]` is the separator (zero length, zero demand). `start` is
/// the first depot followed by any sub-path glued to it; vehicle 1 leaves
/// from its last node and the glued nodes count against vehicle 1's
/// capacity.
#[derive(Debug, Clone)]
pub struct Vrp2Instance<'a> {
    matrix: &'a DistanceMatrix,
    start: Vec<usize>,
    end_depot: usize,
    customers: Vec<AggregatedCustomer>,
    pins: Vec<Pin>,
    capacity: [usize; 2],
}

impl<'a> Vrp2Instance<'a> {
    /// `separator` is the location of customer 0; `customers` excludes it.
    pub fn new(
        matrix: &'a DistanceMatrix,
        start: Vec<usize>,
        end_depot: usize,
        separator: usize,
        customers: Vec<AggregatedCustomer>,
        pins: Vec<Pin>,
        capacity: [usize; 2],
    ) -> Result<Self> {
        let n = matrix.len();
        if start.is_empty() {
            return Err(invalid("the start depot path is empty"));
        }
        if customers.len() != pins.len() {
            return Err(invalid("one pin per customer is required"));
        }
        let in_range = |v: &usize| *v < n;
        if !start.iter().all(in_range) || end_depot >= n || separator >= n {
            return Err(invalid("depot outside the distance matrix"));
        }
        for c in &customers {
            if c.path.is_empty()
                || !c.path.iter().all(in_range)
                || c.path[0] != c.left
                || c.path[c.path.len() - 1] != c.right
            {
                return Err(invalid("customer entry points must match its path"));
            }
        }
        let mut all = Vec::with_capacity(customers.len() + 1);
        all.push(AggregatedCustomer::separator(separator));
        all.extend(customers);
        let mut all_pins = Vec::with_capacity(pins.len() + 1);
        all_pins.push(Pin::Free);
        all_pins.extend(pins);
        Ok(Self {
            matrix,
            start,
            end_depot,
            customers: all,
            pins: all_pins,
            capacity,
        })
    }

    pub fn matrix(&self) -> &DistanceMatrix {
        self.matrix
    }

    /// Customers including the separator at index 0.
    pub fn customers(&self) -> &[AggregatedCustomer] {
        &self.customers
    }

    pub fn pins(&self) -> &[Pin] {
        &self.pins
    }

    pub fn capacity(&self) -> [usize; 2] {
        self.capacity
    }

    pub fn start(&self) -> &[usize] {
        &self.start
    }

    pub fn end_depot(&self) -> usize {
        self.end_depot
    }

    /// Node vehicle 1 leaves from.
    pub fn start_exit(&self) -> usize {
        *self.start.last().unwrap()
    }

    /// Demand carried by the nodes glued to the start depot.
    pub fn start_demand(&self) -> usize {
        self.start.len() - 1
    }

    pub fn start_length(&self) -> f64 {
        exact_sum(self.start.windows(2).map(|w| self.matrix.get(w[0], w[1])))
    }

    /// Depots plus customers, the separator counted as a customer.
    pub fn entity_count(&self) -> usize {
        self.customers.len() + 2
    }

    pub fn total_demand(&self) -> usize {
        self.customers.iter().map(|c| self.demand_of(c)).sum::<usize>() + self.start_demand()
    }

    fn demand_of(&self, c: &AggregatedCustomer) -> usize {
        c.demand
    }

    /// Same instance with customer `k` (not the separator) flipped.
    pub fn with_flipped(&self, k: usize) -> Self {
        assert!(k > 0, "the separator has no orientation");
        let mut v = self.clone();
        v.customers[k] = v.customers[k].flipped();
        v
    }
}

/// An ordered route through every customer with entry sides.
#[derive(Debug, Clone, PartialEq)]
pub struct Vrp2Solution {
    /// Customers in visiting order, the separator included.
    pub route: Vec<(usize, Entry)>,
    pub value: f64,
}

impl Vrp2Solution {
    /// Position of the separator in `route`.
    pub fn separator_position(&self) -> usize {
        self.route.iter().position(|&(c, _)| c == 0).expect("separator present")
    }

    /// Checks pins, capacities and that every customer is visited once.
    pub fn is_feasible(&self, v: &Vrp2Instance<'_>) -> bool {
        let mut seen = vec![false; v.customers.len()];
        for &(c, _) in &self.route {
            if c >= seen.len() || std::mem::replace(&mut seen[c], true) {
                return false;
            }
        }
        if !seen.iter().all(|&s| s) {
            return false;
        }
        let sep = self.separator_position();
        let (before, after) = self.route.split_at(sep);
        let demand = |part: &[(usize, Entry)]| part.iter().map(|&(c, _)| v.customers[c].demand).sum::<usize>();
        before.iter().all(|&(c, _)| v.pins[c] != Pin::Second)
            && after.iter().all(|&(c, _)| v.pins[c] != Pin::First)
            && demand(before) + v.start_demand() <= v.capacity[0]
            && demand(after) <= v.capacity[1]
    }
}

/// Two-vehicle view of a 2-TSP instance.
///
/// The depot is node 0. Every other node becomes a unit-demand customer
/// `1..n`; each fixed node `v != 0` is pinned to vehicle 1 and gets a
/// co-located copy pinned to vehicle 2 (customers `n..`). Both capacities
/// equal the largest admissible tour size minus the depot.
pub fn to_vrp2(inst: &Instance) -> Vrp2Instance<'_> {
    let n = inst.n();
    let mut customers = Vec::new();
    let mut pins = Vec::new();
    for v in 1..n {
        customers.push(AggregatedCustomer::singleton(v));
        pins.push(if inst.is_fixed(v) { Pin::First } else { Pin::Free });
    }
    for &v in &inst.fixed()[1..] {
        customers.push(AggregatedCustomer::singleton(v));
        pins.push(Pin::Second);
    }
    let cap = inst.route_capacity();
    Vrp2Instance::new(inst.matrix(), vec![0], 0, 0, customers, pins, [cap, cap]).expect("derived from a valid instance")
}

/// Number of value slots the exact solver allocates for `customers`
/// customers (separator included): one per customer, subset of the others
/// and entry side.
pub fn table_slots(customers: usize) -> usize {
    customers * (1usize << (customers - 1)) * 2
}

struct Table {
    c: usize,
    vl: Vec<f64>,
    vr: Vec<f64>,
}

impl Table {
    #[inline]
    fn idx(&self, i: usize, set: usize) -> usize {
        let low = set & ((1 << i) - 1);
        let high = (set >> (i + 1)) << i;
        (low | high) * self.c + i
    }
}

/// Precomputed data shared by the fill and the reconstruction.
struct Prepared<'v, 'a> {
    v: &'v Vrp2Instance<'a>,
    c: usize,
    f1: usize,
    f2: usize,
    demand: Vec<u32>,
}

impl<'v, 'a> Prepared<'v, 'a> {
    fn new(v: &'v Vrp2Instance<'a>) -> Self {
        let c = v.customers.len();
        let mut f1 = 0;
        let mut f2 = 0;
        for (k, pin) in v.pins.iter().enumerate() {
            match pin {
                Pin::First => f1 |= 1 << k,
                Pin::Second => f2 |= 1 << k,
                Pin::Free => {}
            }
        }
        let mut demand = vec![0u32; 1 << c];
        for set in 1usize..1 << c {
            let low = set.trailing_zeros() as usize;
            demand[set] = demand[set & (set - 1)] + v.customers[low].demand as u32;
        }
        Self { v, c, f1, f2, demand }
    }

    #[inline]
    fn dist(&self, a: usize, b: usize) -> f64 {
        self.v.matrix.get(a, b)
    }

    /// Customers that may follow a customer whose remaining set is `set`.
    #[inline]
    fn successors(&self, i: usize, set: usize) -> usize {
        if i == 0 || set & 1 == 0 {
            set & !self.f1
        } else {
            set & !self.f2
        }
    }

    /// Whether the state `(i, set)` can be part of a feasible route.
    #[inline]
    fn admissible(&self, i: usize, set: usize) -> bool {
        let [w1, w2] = self.v.capacity;
        let total = self.demand[(1 << self.c) - 1] as usize;
        if i == 0 {
            let before = total - self.demand[set] as usize + self.v.start_demand();
            return before <= w1 && self.demand[set] as usize <= w2;
        }
        let bit = 1 << i;
        if set & 1 == 1 {
            self.f2 & bit == 0
        } else {
            self.f1 & bit == 0 && (self.demand[set] + self.v.customers[i].demand as u32) as usize <= w2
        }
    }

    /// Best continuation after leaving through `exit` towards `set`, first
    /// minimum in (customer, left-then-right) order.
    #[inline]
    fn best_next(&self, table: &Table, exit: usize, allowed: usize, set: usize) -> (f64, usize, Entry) {
        let mut best = (f64::INFINITY, usize::MAX, Entry::Left);
        let mut rest = allowed;
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let sub = set & !(1 << j);
            let k = table.idx(j, sub);
            let cj = &self.v.customers[j];
            let a = self.dist(exit, cj.left) + table.vl[k];
            if a < best.0 {
                best = (a, j, Entry::Left);
            }
            let b = self.dist(exit, cj.right) + table.vr[k];
            if b < best.0 {
                best = (b, j, Entry::Right);
            }
        }
        best
    }
}

/// Exact two-vehicle route through every customer.
///
/// Besides the pinned-set and capacity rules, the separator may also open
/// or close the route when one vehicle is allowed to carry everything, so
/// an empty tour is representable.
pub fn solve_vrp2_exact(v: &Vrp2Instance<'_>, cap: usize) -> Result<Vrp2Solution> {
    let c = v.customers.len();
    if c > cap || c > 30 {
        return Err(Error::TooLarge {
            what: "exact two-vehicle solve (customers incl. separator)",
            size: c,
            cap: cap.min(30),
        });
    }
    let prep = Prepared::new(v);
    let slots = c << (c - 1);
    let mut table = Table {
        c,
        vl: vec![f64::INFINITY; slots],
        vr: vec![f64::INFINITY; slots],
    };
    let full = (1usize << c) - 1;
    let d2 = v.end_depot;
    let mut members: Vec<usize> = Vec::with_capacity(c);
    let mut next: Vec<(usize, usize, f64, f64)> = Vec::with_capacity(c);

    let w2 = v.capacity[1] as u32;
    for set in 0..full {
        // Sets no route can reach: before the separator every vehicle 2
        // customer is still ahead; after it no vehicle 1 customer may be.
        let dead = if set & 1 == 1 {
            prep.f2 & !set != 0
        } else {
            set & prep.f1 != 0 || prep.demand[set] > w2
        };
        if dead {
            continue;
        }
        members.clear();
        for i in 0..c {
            if set >> i & 1 == 0 && prep.admissible(i, set) {
                members.push(i);
            }
        }
        if members.is_empty() {
            continue;
        }
        if set == 0 {
            for &i in &members {
                let ci = &v.customers[i];
                let k = table.idx(i, 0);
                table.vl[k] = ci.length + prep.dist(ci.right, d2);
                table.vr[k] = ci.length + prep.dist(ci.left, d2);
            }
            continue;
        }
        // Every member shares the same successor set here, so gather the
        // finite successor values once.
        next.clear();
        let mut rest = prep.successors(members[0], set);
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let k = table.idx(j, set & !(1 << j));
            let (vl, vr) = (table.vl[k], table.vr[k]);
            if vl.is_finite() || vr.is_finite() {
                let cj = &v.customers[j];
                next.push((cj.left, cj.right, vl, vr));
            }
        }
        for &i in &members {
            let ci = &v.customers[i];
            let best_from = |exit: usize| {
                let row = v.matrix.row(exit);
                let mut best = f64::INFINITY;
                for &(l, r, vl, vr) in &next {
                    let a = row[l] + vl;
                    if a < best {
                        best = a;
                    }
                    if r != l {
                        let b = row[r] + vr;
                        if b < best {
                            best = b;
                        }
                    }
                }
                best
            };
            let k = table.idx(i, set);
            table.vl[k] = ci.length + best_from(ci.right);
            table.vr[k] = if ci.left == ci.right {
                table.vl[k]
            } else {
                ci.length + best_from(ci.left)
            };
        }
    }

    // Opening move from the start depot; vehicle 2 customers cannot lead.
    let exit = v.start_exit();
    let mut best = (f64::INFINITY, usize::MAX, Entry::Left);
    for i in 0..c {
        if prep.f2 >> i & 1 == 1 {
            continue;
        }
        let set = full & !(1 << i);
        let k = table.idx(i, set);
        let ci = &v.customers[i];
        let a = prep.dist(exit, ci.left) + table.vl[k];
        if a < best.0 {
            best = (a, i, Entry::Left);
        }
        let b = prep.dist(exit, ci.right) + table.vr[k];
        if b < best.0 {
            best = (b, i, Entry::Right);
        }
    }
    if !best.0.is_finite() {
        return Err(Error::Infeasible(
            "no two-vehicle route satisfies pins and capacities".into(),
        ));
    }

    let value = v.start_length() + best.0;
    let mut route = Vec::with_capacity(c);
    let (mut i, mut entry) = (best.1, best.2);
    let mut set = full & !(1 << i);
    loop {
        route.push((i, entry));
        if set == 0 {
            break;
        }
        let ci = &v.customers[i];
        let exit = match entry {
            Entry::Left => ci.right,
            Entry::Right => ci.left,
        };
        let (_, j, e) = prep.best_next(&table, exit, prep.successors(i, set), set);
        debug_assert!(j != usize::MAX);
        i = j;
        entry = e;
        set &= !(1 << j);
    }
    Ok(Vrp2Solution { route, value })
}

/// Replaces every customer by its sub-path and the separator by the middle
/// depot, giving the combined two-tour sequence.
pub fn expand_route(sol: &Vrp2Solution, v: &Vrp2Instance<'_>) -> TwoTourSequence {
    let mut nodes = v.start.clone();
    let mut split = 0;
    for &(k, entry) in &sol.route {
        let c = &v.customers[k];
        if k == 0 {
            split = nodes.len();
            nodes.push(c.left);
            continue;
        }
        match entry {
            Entry::Left => nodes.extend_from_slice(&c.path),
            Entry::Right => nodes.extend(c.path.iter().rev()),
        }
    }
    nodes.push(v.end_depot);
    TwoTourSequence::from_parts(nodes, split)
}
