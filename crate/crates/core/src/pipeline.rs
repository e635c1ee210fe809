//! Multi-start driver: build initial sequences, improve each with the
//! sliding-subset search, per-tour 2-opt and tour swaps, keep the best.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::improves;
use crate::instance::Instance;
use crate::ks::ks_solve;
use crate::sliding::h_improve_with;
use crate::tour::TwoTourSequence;
use crate::vrp2::DEFAULT_EXACT_CAP;

/// How initial sequences are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitKind {
    /// Kalmanson-sequence heuristic from successive start nodes.
    Ks,
    /// Random partition from successive seeds.
    Rp,
}

/// Named presets: `(name, s, l, initial solutions)`.
pub const PRESETS: [(&str, usize, usize, usize); 4] = [
    ("h42x48", 4, 2, 48),
    ("h53x36", 5, 3, 36),
    ("h64x24", 6, 4, 24),
    ("h75x12", 7, 5, 12),
];

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub init: InitKind,
    /// Window size of the sliding-subset search.
    pub s: usize,
    /// Slide step.
    pub l: usize,
    /// Number of initial solutions to improve.
    pub max_iters: Option<usize>,
    /// Wall-clock budget in seconds.
    pub time_limit: Option<f64>,
    pub seed: u64,
    /// Largest customer count (separator included) solved exactly.
    pub exact_cap: usize,
}

impl SolverConfig {
    pub fn new(init: InitKind, s: usize, l: usize, max_iters: usize) -> Self {
        Self {
            init,
            s,
            l,
            max_iters: Some(max_iters),
            time_limit: None,
            seed: 0,
            exact_cap: DEFAULT_EXACT_CAP,
        }
    }

    /// One of [`PRESETS`], with KS initial solutions.
    pub fn preset(name: &str) -> Option<Self> {
        PRESETS
            .iter()
            .find(|p| p.0 == name)
            .map(|&(_, s, l, iters)| Self::new(InitKind::Ks, s, l, iters))
    }

    pub fn validate(&self) -> Result<()> {
        if self.s == 0 || self.l == 0 {
            return Err(invalid("s and l must be at least 1"));
        }
        if self.max_iters.is_none() && self.time_limit.is_none() {
            return Err(invalid("set an iteration count or a time limit"));
        }
        if self.time_limit.is_some_and(|t| !t.is_finite() || t < 0.0) {
            return Err(invalid("time limit must be a non-negative number of seconds"));
        }
        if 2 * self.s + 4 > self.exact_cap {
            return Err(invalid(format!(
                "window size {} needs {} customers per sub-instance, above the exact cap {}",
                self.s,
                2 * self.s + 4,
                self.exact_cap
            )));
        }
        Ok(())
    }
}

/// Best solution seen during a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub best: TwoTourSequence,
    pub length: f64,
    /// Index of the initial solution it descends from.
    pub iteration: usize,
    /// Time since the start of the run when it was found.
    pub elapsed: Duration,
}

/// Exchanges the two tours around the middle depot.
pub fn swap_tours(q: &TwoTourSequence) -> TwoTourSequence {
    q.swapped()
}

#[derive(Clone, Copy)]
enum Item {
    Free(usize),
    Original(usize),
    Copy(usize),
}

/// Random feasible sequence.
///
/// Free nodes, fixed nodes and their copies are shuffled together and cut
/// in half. Fixed originals go to tour 1 and copies to tour 2; free nodes
/// stay on their side of the cut. If a tour is then too large, free nodes
/// next to the split move across until both tours fit. Each tour is
/// finished with 2-opt.
pub fn rp_initial(inst: &Instance, seed: u64) -> TwoTourSequence {
    let n = inst.n();
    let mut items: Vec<Item> = (1..n).filter(|&v| !inst.is_fixed(v)).map(Item::Free).collect();
    for &v in &inst.fixed()[1..] {
        items.push(Item::Original(v));
        items.push(Item::Copy(v));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    items.shuffle(&mut rng);

    let half = items.len() / 2;
    let mut t1 = Vec::new();
    let mut t2 = Vec::new();
    for (k, item) in items.into_iter().enumerate() {
        match item {
            Item::Original(v) => t1.push(v),
            Item::Copy(v) => t2.push(v),
            Item::Free(v) if k < half => t1.push(v),
            Item::Free(v) => t2.push(v),
        }
    }

    let cap = inst.route_capacity();
    while t1.len() > cap {
        let k = t1.iter().rposition(|&v| !inst.is_fixed(v)).expect("a free node exists");
        let v = t1.remove(k);
        t2.insert(0, v);
    }
    while t2.len() > cap {
        let k = t2.iter().position(|&v| !inst.is_fixed(v)).expect("a free node exists");
        let v = t2.remove(k);
        t1.push(v);
    }
    TwoTourSequence::from_tours(&t1, &t2).two_opt_each(inst.matrix())
}

/// KS sequences from every start node, shortest first (ties keep the lower
/// start), with repeats removed.
pub fn ks_starts(inst: &Instance) -> Result<Vec<TwoTourSequence>> {
    let mut runs = Vec::with_capacity(inst.n());
    for start in 0..inst.n() {
        runs.push(ks_solve(inst, start)?);
    }
    runs.sort_by(|a, b| a.length.total_cmp(&b.length));
    let mut seen = HashSet::new();
    Ok(runs
        .into_iter()
        .map(|r| r.sequence)
        .filter(|q| seen.insert(q.nodes().to_vec()))
        .collect())
}

/// Runs the multi-start heuristic.
///
/// Each initial sequence is improved by repeated passes of sliding-subset
/// search, per-tour 2-opt and a tour swap, until two passes in a row gain
/// nothing. KS initials come from [`ks_starts`], best first, so the record
/// is never worse than the best single KS run; RP starts use seeds
/// `seed, seed + 1, …`. With a time limit of zero the first initial
/// sequence is returned as is.
pub fn run_pipeline(inst: &Instance, cfg: &SolverConfig) -> Result<Record> {
    cfg.validate()?;
    let started = Instant::now();
    let deadline = cfg.time_limit.map(|t| started + Duration::from_secs_f64(t));
    let expired = || deadline.is_some_and(|d| Instant::now() >= d);
    let matrix = inst.matrix();
    let limit = cfg.max_iters.unwrap_or(usize::MAX);

    let mut record: Option<Record> = None;
    let offer = |q: &TwoTourSequence, len: f64, iteration: usize, record: &mut Option<Record>| {
        if record.as_ref().is_none_or(|r| len < r.length) {
            *record = Some(Record {
                best: q.clone(),
                length: len,
                iteration,
                elapsed: started.elapsed(),
            });
        }
    };
    let ks_pool = match cfg.init {
        InitKind::Ks => ks_starts(inst)?,
        InitKind::Rp => Vec::new(),
    };

    for it in 0..limit {
        if record.is_some() && expired() {
            break;
        }
        let initial = match cfg.init {
            InitKind::Ks => match ks_pool.get(it) {
                Some(q) => q.clone(),
                None => break,
            },
            InitKind::Rp => rp_initial(inst, cfg.seed.wrapping_add(it as u64)),
        };
        let mut len = initial.length(matrix);
        offer(&initial, len, it, &mut record);
        if expired() {
            break;
        }

        let mut q = initial;
        let mut idle = 0;
        // Sequences a full sweep has already left unchanged.
        let mut stable: HashSet<Vec<usize>> = HashSet::new();
        while idle < 2 && !expired() {
            let before = len;
            if !stable.contains(q.nodes()) {
                q = h_improve_with(&q, cfg.s, cfg.l, inst, deadline, cfg.exact_cap);
                if !expired() {
                    stable.insert(q.nodes().to_vec());
                }
            }
            q = q.two_opt_each(matrix);
            len = q.length(matrix);
            offer(&q, len, it, &mut record);
            q = swap_tours(&q);
            idle = if improves(len, before) { 0 } else { idle + 1 };
        }
    }
    Ok(record.expect("at least one initial solution is built"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{euclidean_matrix, generate_instance, GenMode, Rounding};
    use crate::oracle::brute_force_2tsp;
    use crate::tour::validate_sequence;

    fn line(n: usize, fixed: &[usize], p: usize) -> Instance {
        let pts: Vec<(f64, f64)> = (0..n).map(|i| (i as f64, 0.0)).collect();
        Instance::new(euclidean_matrix(&pts, Rounding::Exact).unwrap(), fixed, p).unwrap()
    }

    #[test]
    fn swap_examples() {
        let q = TwoTourSequence::from_tours(&[1], &[2, 3]);
        assert_eq!(swap_tours(&q).nodes(), &[0, 2, 3, 0, 1, 0]);
        assert_eq!(swap_tours(&swap_tours(&q)), q);
        let m = line(4, &[0], 1);
        assert_eq!(swap_tours(&q).length(m.matrix()), q.length(m.matrix()));
    }

    #[test]
    fn rp_is_feasible_and_deterministic() {
        let inst = line(4, &[0, 2], 1);
        for seed in 0..20 {
            let q = rp_initial(&inst, seed);
            assert_eq!(validate_sequence(&q, &inst), Ok(()));
            assert!(q.tour1().contains(&2) && q.tour2().contains(&2));
            assert_eq!(q, rp_initial(&inst, seed));
        }
        let inst = generate_instance(30, 6, 1, GenMode::UniformSquare).unwrap();
        for seed in 0..50 {
            assert_eq!(validate_sequence(&rp_initial(&inst, seed), &inst), Ok(()));
        }
    }

    #[test]
    fn presets() {
        let c = SolverConfig::preset("h53x36").unwrap();
        assert_eq!((c.s, c.l, c.max_iters), (5, 3, Some(36)));
        assert!(SolverConfig::preset("h99x1").is_none());
        for (name, ..) in PRESETS {
            SolverConfig::preset(name).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn invalid_configs() {
        let mut c = SolverConfig::new(InitKind::Ks, 0, 1, 1);
        assert!(c.validate().is_err());
        c.s = 2;
        c.max_iters = None;
        assert!(c.validate().is_err());
        c.time_limit = Some(1.0);
        assert!(c.validate().is_ok());
        c.s = 10;
        assert!(c.validate().is_err());
    }

    #[test]
    fn collinear_eight_with_random_starts() {
        let inst = line(8, &[0, 2], 1);
        let mut cfg = SolverConfig::new(InitKind::Rp, 2, 1, 5);
        cfg.seed = 11;
        let rec = run_pipeline(&inst, &cfg).unwrap();
        assert_eq!(rec.length, brute_force_2tsp(&inst).unwrap().length);
        assert_eq!(validate_sequence(&rec.best, &inst), Ok(()));
        assert_eq!(
            rec,
            Record {
                elapsed: rec.elapsed,
                ..run_pipeline(&inst, &cfg).unwrap()
            }
        );
    }

    #[test]
    fn zero_time_limit_returns_first_initial() {
        let inst = generate_instance(30, 5, 2, GenMode::UniformSquare).unwrap();
        let mut cfg = SolverConfig::new(InitKind::Rp, 3, 2, 10);
        cfg.time_limit = Some(0.0);
        cfg.seed = 4;
        let rec = run_pipeline(&inst, &cfg).unwrap();
        assert_eq!(rec.best, rp_initial(&inst, 4));
        assert_eq!(rec.iteration, 0);
        cfg.init = InitKind::Ks;
        let rec = run_pipeline(&inst, &cfg).unwrap();
        assert_eq!(rec.best, ks_starts(&inst).unwrap()[0]);
        assert_eq!(rec.length, crate::ks::ks_multi(&inst).unwrap().length);
    }

    #[test]
    fn record_beats_every_initial() {
        let inst = generate_instance(25, 5, 8, GenMode::UniformSquare).unwrap();
        let cfg = SolverConfig::new(InitKind::Ks, 3, 2, 4);
        let rec = run_pipeline(&inst, &cfg).unwrap();
        for start in 0..inst.n() {
            assert!(rec.length <= ks_solve(&inst, start).unwrap().length);
        }
        assert_eq!(validate_sequence(&rec.best, &inst), Ok(()));
    }
}
