//! Single tours, the combined two-tour sequence, and the classic tour
//! heuristics used to seed and polish solutions.

use std::fmt;
use std::fmt::Write as _;

use crate::error::{invalid, Error, Result};
use crate::instance::{DistanceMatrix, Instance};
use crate::sum::exact_sum;
use crate::IMPROVEMENT_EPS;

/// A closed tour stored open: it starts at the depot (node 0) and the edge
/// back to the depot is implied.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tour(Vec<usize>);

impl Tour {
    pub fn new(nodes: Vec<usize>) -> Result<Self> {
        if nodes.first() != Some(&0) {
            return Err(invalid("a tour must start at node 1"));
        }
        let mut sorted = nodes.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("a tour may not repeat a node"));
        }
        Ok(Self(nodes))
    }

    pub fn nodes(&self) -> &[usize] {
        &self.0
    }

    pub fn into_nodes(self) -> Vec<usize> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Length including the closing edge.
    pub fn length(&self, matrix: &DistanceMatrix) -> f64 {
        closed_length(&self.0, matrix)
    }
}

fn closed_length(nodes: &[usize], matrix: &DistanceMatrix) -> f64 {
    let k = nodes.len();
    exact_sum((0..k).map(|a| matrix.get(nodes[a], nodes[(a + 1) % k])))
}

/// A feasible two-tour sequence together with its total length.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub sequence: TwoTourSequence,
    pub length: f64,
}

impl Solution {
    pub fn new(sequence: TwoTourSequence, matrix: &DistanceMatrix) -> Self {
        let length = sequence.length(matrix);
        Self { sequence, length }
    }
}

/// Both period tours as one sequence `⟨1, tour 1…, 1, tour 2…, 1⟩`.
///
/// `split` is the position of the middle depot copy. The type itself only
/// guarantees that position `split` exists; use [`validate_sequence`] to
/// check feasibility against an instance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TwoTourSequence {
    nodes: Vec<usize>,
    split: usize,
}

impl TwoTourSequence {
    /// Joins two tours given without their depot.
    pub fn from_tours(tour1: &[usize], tour2: &[usize]) -> Self {
        let mut nodes = Vec::with_capacity(tour1.len() + tour2.len() + 3);
        nodes.push(0);
        nodes.extend_from_slice(tour1);
        let split = nodes.len();
        nodes.push(0);
        nodes.extend_from_slice(tour2);
        nodes.push(0);
        Self { nodes, split }
    }

    /// Takes a raw node list; the split is the second occurrence of node 0.
    pub fn from_nodes(nodes: Vec<usize>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(invalid("a two-tour sequence has at least three entries"));
        }
        let split = nodes[1..nodes.len() - 1]
            .iter()
            .position(|&v| v == 0)
            .map(|p| p + 1)
            .ok_or_else(|| invalid("no middle copy of node 1"))?;
        Ok(Self { nodes, split })
    }

    pub(crate) fn from_parts(nodes: Vec<usize>, split: usize) -> Self {
        debug_assert!(split > 0 && split + 1 < nodes.len());
        Self { nodes, split }
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn split(&self) -> usize {
        self.split
    }

    /// Nodes of the first tour, depot excluded.
    pub fn tour1(&self) -> &[usize] {
        &self.nodes[1..self.split]
    }

    /// Nodes of the second tour, depot excluded.
    pub fn tour2(&self) -> &[usize] {
        &self.nodes[self.split + 1..self.nodes.len() - 1]
    }

    /// Sum of consecutive distances along the whole sequence.
    pub fn length(&self, matrix: &DistanceMatrix) -> f64 {
        sequence_length(self, matrix)
    }

    /// Exchanges the two tours around the middle depot.
    pub fn swapped(&self) -> Self {
        Self::from_tours(self.tour2(), self.tour1())
    }

    /// Applies [`two_opt`] to each tour independently.
    pub fn two_opt_each(&self, matrix: &DistanceMatrix) -> Self {
        let polish = |t: &[usize]| {
            let mut nodes = Vec::with_capacity(t.len() + 1);
            nodes.push(0);
            nodes.extend_from_slice(t);
            two_opt(Tour(nodes), matrix).0
        };
        let a = polish(self.tour1());
        let b = polish(self.tour2());
        Self::from_tours(&a[1..], &b[1..])
    }
}

impl fmt::Display for TwoTourSequence {
    /// 1-based ids separated by spaces.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.nodes.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", v + 1)?;
        }
        Ok(())
    }
}

/// Sum of consecutive-pair distances along the sequence. The middle entry is
/// the depot, so this equals the total length of both tours.
pub fn sequence_length(q: &TwoTourSequence, matrix: &DistanceMatrix) -> f64 {
    path_length(&q.nodes, matrix)
}

/// Sum of consecutive-pair distances along any node list.
pub fn path_length(nodes: &[usize], matrix: &DistanceMatrix) -> f64 {
    exact_sum(nodes.windows(2).map(|w| matrix.get(w[0], w[1])))
}

/// A broken feasibility rule. Node ids are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// First, middle or last entry is not node 1.
    BadEndpoints,
    /// Node 1 appears inside a tour.
    ExtraDepot {
        position: usize,
    },
    NodeOutOfRange {
        node: usize,
    },
    /// A fixed node is missing from (`count == 0`) or repeated in a tour.
    FixedCount {
        node: usize,
        tour: u8,
        count: usize,
    },
    /// A free node does not appear exactly once overall.
    FreeCount {
        node: usize,
        count: usize,
    },
    /// Tour sizes (depot counted once) fall outside the balance window.
    Unbalanced {
        size1: usize,
        size2: usize,
        min: usize,
        max: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::BadEndpoints => write!(f, "first, middle and last entries must be node 1"),
            Violation::ExtraDepot { position } => {
                write!(f, "node 1 repeated inside a tour at position {position}")
            }
            Violation::NodeOutOfRange { node } => write!(f, "node {} out of range", node + 1),
            Violation::FixedCount { node, tour, count } => {
                write!(f, "fixed node {} appears {count} times in tour {tour}", node + 1)
            }
            Violation::FreeCount { node, count } => {
                write!(f, "free node {} appears {count} times", node + 1)
            }
            Violation::Unbalanced { size1, size2, min, max } => write!(
                f,
                "tour sizes {size1} and {size2} outside the balance window {min}..={max}"
            ),
        }
    }
}

/// Checks every feasibility rule and lists all violations.
pub fn validate_sequence(q: &TwoTourSequence, inst: &Instance) -> Result<(), Vec<Violation>> {
    let n = inst.n();
    let nodes = &q.nodes;
    let mut out = Vec::new();
    let last = nodes.len() - 1;
    if nodes[0] != 0 || nodes[q.split] != 0 || nodes[last] != 0 || q.split == 0 || q.split == last {
        out.push(Violation::BadEndpoints);
    }
    let mut per_tour = [vec![0usize; n], vec![0usize; n]];
    for (pos, &v) in nodes.iter().enumerate() {
        if pos == 0 || pos == q.split || pos == last {
            continue;
        }
        if v >= n {
            out.push(Violation::NodeOutOfRange { node: v });
            continue;
        }
        if v == 0 {
            out.push(Violation::ExtraDepot { position: pos });
            continue;
        }
        per_tour[usize::from(pos > q.split)][v] += 1;
    }
    for (v, (&a, &b)) in per_tour[0].iter().zip(&per_tour[1]).enumerate().skip(1) {
        if inst.is_fixed(v) {
            for (tour, count) in [(1u8, a), (2u8, b)] {
                if count != 1 {
                    out.push(Violation::FixedCount { node: v, tour, count });
                }
            }
        } else if a + b != 1 {
            out.push(Violation::FreeCount { node: v, count: a + b });
        }
    }
    let size1 = q.split.saturating_sub(1) + 1;
    let size2 = last.saturating_sub(q.split + 1) + 1;
    let (min, max) = (inst.min_tour_size(), inst.max_tour_size());
    for s in [size1, size2] {
        if s < min || s > max {
            out.push(Violation::Unbalanced { size1, size2, min, max });
            break;
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Greedy tour from `start`, always moving to the closest unvisited node
/// (lowest index on ties), rotated to begin at node 0.
pub fn nearest_neighbour(matrix: &DistanceMatrix, start: usize) -> Tour {
    let n = matrix.len();
    assert!(start < n, "start node out of range");
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut cur = start;
    visited[cur] = true;
    order.push(cur);
    for _ in 1..n {
        let row = matrix.row(cur);
        let mut best = usize::MAX;
        for v in 0..n {
            if !visited[v] && (best == usize::MAX || row[v] < row[best]) {
                best = v;
            }
        }
        visited[best] = true;
        order.push(best);
        cur = best;
    }
    let at = order.iter().position(|&v| v == 0).unwrap();
    order.rotate_left(at);
    Tour(order)
}

/// Best-improvement 2-opt. Node 0 stays in front; each accepted exchange
/// shortens the tour by more than `1e-9 * (1 + length)`.
pub fn two_opt(tour: Tour, matrix: &DistanceMatrix) -> Tour {
    let mut t = tour.0;
    let k = t.len();
    if k < 4 {
        return Tour(t);
    }
    let c = |a: usize, b: usize| matrix.get(a, b);
    loop {
        let current: f64 = (0..k).map(|a| c(t[a], t[(a + 1) % k])).sum();
        let threshold = -IMPROVEMENT_EPS * (1.0 + current);
        let mut best = (threshold, 0, 0);
        for i in 0..k - 2 {
            let (a, b) = (t[i], t[i + 1]);
            let last_j = if i == 0 { k - 2 } else { k - 1 };
            for j in i + 2..=last_j {
                let (cc, d) = (t[j], t[(j + 1) % k]);
                let delta = c(a, cc) + c(b, d) - c(a, b) - c(cc, d);
                if delta < best.0 {
                    best = (delta, i, j);
                }
            }
        }
        if best.0 >= threshold {
            break;
        }
        t[best.1 + 1..=best.2].reverse();
    }
    Tour(t)
}

/// Text form of a solution: a `LENGTH` header with six decimals, then one
/// line per tour with 1-based ids including both depot copies.
pub fn format_solution(q: &TwoTourSequence, matrix: &DistanceMatrix) -> String {
    let mut s = String::new();
    writeln!(s, "LENGTH {:.6}", q.length(matrix)).unwrap();
    for t in [q.tour1(), q.tour2()] {
        let mut line = String::from("1");
        for v in t {
            write!(line, " {}", v + 1).unwrap();
        }
        line.push_str(" 1");
        writeln!(s, "{line}").unwrap();
    }
    s
}

/// Reads the output of [`format_solution`] back into a sequence.
pub fn parse_solution(text: &str) -> Result<TwoTourSequence> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let perr = |line: usize, msg: &str| Error::Parse {
        line,
        msg: msg.to_string(),
    };
    let header = lines.next().ok_or_else(|| perr(1, "empty solution"))?;
    if !header.starts_with("LENGTH") {
        return Err(perr(1, "expected LENGTH header"));
    }
    let mut tours = Vec::new();
    for (k, l) in lines.enumerate() {
        let ids = l
            .split_whitespace()
            .map(|t| t.parse::<usize>().ok().filter(|&v| v > 0).map(|v| v - 1))
            .collect::<Option<Vec<usize>>>()
            .ok_or_else(|| perr(k + 2, "bad node id"))?;
        if ids.len() < 2 || ids[0] != 0 || ids[ids.len() - 1] != 0 {
            return Err(perr(k + 2, "a tour line must start and end with 1"));
        }
        tours.push(ids[1..ids.len() - 1].to_vec());
    }
    if tours.len() != 2 {
        return Err(perr(1, "expected exactly two tour lines"));
    }
    Ok(TwoTourSequence::from_tours(&tours[0], &tours[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{euclidean_matrix, Rounding};

    fn line(n: usize) -> DistanceMatrix {
        let p: Vec<(f64, f64)> = (0..n).map(|i| (i as f64, 0.0)).collect();
        euclidean_matrix(&p, Rounding::Exact).unwrap()
    }

    fn square() -> DistanceMatrix {
        euclidean_matrix(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)], Rounding::Exact).unwrap()
    }

    fn seq(one_based: &[usize]) -> TwoTourSequence {
        TwoTourSequence::from_nodes(one_based.iter().map(|v| v - 1).collect()).unwrap()
    }

    fn tour(one_based: &[usize]) -> Tour {
        Tour::new(one_based.iter().map(|v| v - 1).collect()).unwrap()
    }

    #[test]
    fn sequence_lengths() {
        let m = line(4);
        assert_eq!(path_length(&[0, 1, 0], &m), 2.0);
        assert_eq!(seq(&[1, 2, 1, 3, 4, 1]).length(&m), 8.0);
        assert_eq!(seq(&[1, 1, 2, 3, 4, 1]).length(&m), 6.0);
    }

    #[test]
    fn validation_examples() {
        let inst = Instance::new(line(4), &[0], 1).unwrap();
        assert_eq!(validate_sequence(&seq(&[1, 2, 1, 3, 4, 1]), &inst), Ok(()));

        let v = validate_sequence(&seq(&[1, 1, 2, 3, 4, 1]), &inst).unwrap_err();
        assert_eq!(
            v,
            vec![Violation::Unbalanced {
                size1: 1,
                size2: 4,
                min: 2,
                max: 3
            }]
        );

        let v = validate_sequence(&seq(&[1, 2, 1, 2, 3, 4, 1]), &inst).unwrap_err();
        assert!(v.contains(&Violation::FreeCount { node: 1, count: 2 }), "{v:?}");
    }

    #[test]
    fn validation_flags_fixed_and_endpoints() {
        let inst = Instance::new(line(4), &[0, 2], 1).unwrap();
        let v = validate_sequence(&seq(&[1, 2, 3, 1, 4, 1]), &inst).unwrap_err();
        assert!(v.contains(&Violation::FixedCount {
            node: 2,
            tour: 2,
            count: 0
        }));
        let bad = TwoTourSequence::from_nodes(vec![1, 0, 2, 0, 3, 2, 0]).unwrap();
        let v = validate_sequence(&bad, &inst).unwrap_err();
        assert!(v.contains(&Violation::BadEndpoints));
    }

    #[test]
    fn nearest_neighbour_examples() {
        let t = nearest_neighbour(&line(4), 0);
        assert_eq!(t, tour(&[1, 2, 3, 4]));
        assert_eq!(t.length(&line(4)), 6.0);

        let t = nearest_neighbour(&square(), 0);
        assert_eq!(t, tour(&[1, 2, 3, 4]));
        assert_eq!(t.length(&square()), 4.0);

        let t = nearest_neighbour(&line(4), 2);
        assert_eq!(t, tour(&[1, 4, 3, 2]));
        assert_eq!(t.length(&line(4)), 6.0);
    }

    #[test]
    fn two_opt_examples() {
        let sq = square();
        let start = tour(&[1, 3, 2, 4]);
        assert_eq!(start.length(&sq), 2.0 + 2.0 * 2f64.sqrt());
        let t = two_opt(start, &sq);
        assert_eq!(t, tour(&[1, 2, 3, 4]));
        assert_eq!(t.length(&sq), 4.0);

        let opt = tour(&[1, 2, 3, 4]);
        assert_eq!(two_opt(opt.clone(), &sq), opt);

        let m = line(4);
        let start = tour(&[1, 3, 2, 4]);
        assert_eq!(start.length(&m), 8.0);
        assert_eq!(two_opt(start, &m).length(&m), 6.0);
    }

    #[test]
    fn swap_is_an_involution() {
        let q = seq(&[1, 2, 1, 3, 4, 1]);
        assert_eq!(q.swapped(), seq(&[1, 3, 4, 1, 2, 1]));
        assert_eq!(q.swapped().swapped(), q);
    }

    #[test]
    fn solution_text_round_trip() {
        let q = seq(&[1, 2, 1, 3, 4, 1]);
        let text = format_solution(&q, &line(4));
        assert_eq!(text, "LENGTH 8.000000\n1 2 1\n1 3 4 1\n");
        assert_eq!(parse_solution(&text).unwrap(), q);
    }

    #[test]
    fn degenerate_tours() {
        let q = TwoTourSequence::from_tours(&[], &[1, 2, 3]);
        assert_eq!(q.nodes(), &[0, 0, 1, 2, 3, 0]);
        assert_eq!(q.tour1(), &[] as &[usize]);
        assert!(TwoTourSequence::from_nodes(vec![0, 1, 0]).is_err());
    }
}
