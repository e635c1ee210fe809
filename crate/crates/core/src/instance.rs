//! Problem instances: distance matrices, fixed sets, text I/O and generation.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};

/// Side length of the square used by [`GenMode::UniformSquare`].
pub const SQUARE_SIDE: f64 = 1000.0;
/// Radius of the circle used by [`GenMode::KalmansonConvex`].
pub const CIRCLE_RADIUS: f64 = 500.0;

/// Symmetric, zero-diagonal, non-negative distance matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds a matrix from row-major data, checking every invariant.
    pub fn from_rows(n: usize, d: Vec<f64>) -> Result<Self> {
        if d.len() != n * n {
            return Err(invalid(format!("matrix needs {} entries, got {}", n * n, d.len())));
        }
        for i in 0..n {
            for j in 0..n {
                let v = d[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(invalid(format!(
                        "entry ({}, {}) = {v} is not a finite non-negative number",
                        i + 1,
                        j + 1
                    )));
                }
                if i == j && v != 0.0 {
                    return Err(invalid(format!("diagonal entry {} is not zero", i + 1)));
                }
                if v != d[j * n + i] {
                    return Err(invalid(format!(
                        "asymmetric: d[{}][{}] != d[{}][{}]",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        Ok(Self { n, d })
    }

    /// Builds a matrix from a closure evaluated on the upper triangle.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        Self::from_rows(n, d)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.d[i * self.n..(i + 1) * self.n]
    }

    pub fn max_entry(&self) -> f64 {
        self.d.iter().copied().fold(0.0, f64::max)
    }
}

/// How Euclidean distances are rounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rounding {
    #[default]
    Exact,
    NearestInteger,
}

/// Pairwise Euclidean distances of `coords`.
pub fn euclidean_matrix(coords: &[(f64, f64)], rounding: Rounding) -> Result<DistanceMatrix> {
    if coords.len() < 2 {
        return Err(invalid("at least two points are required"));
    }
    if let Some(i) = coords.iter().position(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(invalid(format!("coordinate of point {} is not finite", i + 1)));
    }
    DistanceMatrix::from_fn(coords.len(), |i, j| {
        let (xi, yi) = coords[i];
        let (xj, yj) = coords[j];
        let d = (xi - xj).hypot(yi - yj);
        match rounding {
            Rounding::Exact => d,
            Rounding::NearestInteger => d.round(),
        }
    })
}

/// A balanced 2-TSP instance.
///
/// `fixed` holds the 0-based ids of nodes visited in both periods, sorted
/// ascending; the depot (node 0) is always among them.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    matrix: DistanceMatrix,
    fixed: Vec<usize>,
    is_fixed: Vec<bool>,
    p: usize,
    coords: Option<Vec<(f64, f64)>>,
    rounding: Rounding,
}

impl Instance {
    /// Validates and assembles an instance. `fixed` uses 0-based ids.
    pub fn new(matrix: DistanceMatrix, fixed: &[usize], p: usize) -> Result<Self> {
        let n = matrix.len();
        if n < 2 {
            return Err(invalid("an instance needs at least two nodes"));
        }
        let mut is_fixed = vec![false; n];
        for &v in fixed {
            if v >= n {
                return Err(invalid(format!("fixed node {} out of range 1..={n}", v + 1)));
            }
            if is_fixed[v] {
                return Err(invalid(format!("fixed node {} listed twice", v + 1)));
            }
            is_fixed[v] = true;
        }
        if !is_fixed[0] {
            return Err(invalid("fixed set must contain node 1"));
        }
        let fixed: Vec<usize> = (0..n).filter(|&v| is_fixed[v]).collect();
        let inst = Self {
            matrix,
            fixed,
            is_fixed,
            p,
            coords: None,
            rounding: Rounding::Exact,
        };
        if inst.min_tour_size() > inst.max_tour_size() {
            return Err(Error::Infeasible(format!(
                "parity infeasible: n + |S| = {} is odd and p = 0",
                inst.total_visits()
            )));
        }
        Ok(inst)
    }

    /// Instance whose matrix is derived from planar coordinates.
    pub fn from_coords(coords: Vec<(f64, f64)>, rounding: Rounding, fixed: &[usize], p: usize) -> Result<Self> {
        let matrix = euclidean_matrix(&coords, rounding)?;
        let mut inst = Self::new(matrix, fixed, p)?;
        inst.coords = Some(coords);
        inst.rounding = rounding;
        Ok(inst)
    }

    /// Same instance with the matrix replaced, dropping coordinates.
    pub fn with_matrix(&self, matrix: DistanceMatrix) -> Result<Self> {
        if matrix.len() != self.n() {
            return Err(invalid("replacement matrix has a different size"));
        }
        Self::new(matrix, &self.fixed, self.p)
    }

    /// Same instance with a different balance parameter.
    pub fn with_p(&self, p: usize) -> Result<Self> {
        let mut inst = Self::new(self.matrix.clone(), &self.fixed, p)?;
        inst.coords = self.coords.clone();
        inst.rounding = self.rounding;
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &DistanceMatrix {
        &self.matrix
    }

    /// Fixed nodes, 0-based and ascending.
    pub fn fixed(&self) -> &[usize] {
        &self.fixed
    }

    #[inline]
    pub fn is_fixed(&self, v: usize) -> bool {
        self.is_fixed[v]
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn coords(&self) -> Option<&[(f64, f64)]> {
        self.coords.as_deref()
    }

    pub fn rounding(&self) -> Rounding {
        self.rounding
    }

    /// Largest fixed node (0-based).
    pub fn max_fixed(&self) -> usize {
        *self.fixed.last().expect("depot is always fixed")
    }

    /// Total number of node visits over both tours, `n + |S|`.
    pub fn total_visits(&self) -> usize {
        self.n() + self.fixed.len()
    }

    /// Smallest admissible tour size, counting the depot once.
    pub fn min_tour_size(&self) -> usize {
        let t = self.total_visits();
        if self.p >= t {
            0
        } else {
            (t - self.p).div_ceil(2)
        }
    }

    /// Largest admissible tour size, counting the depot once.
    pub fn max_tour_size(&self) -> usize {
        (self.total_visits() + self.p) / 2
    }

    /// Customer capacity of each vehicle in the two-vehicle model: the
    /// largest tour size minus the depot.
    pub fn route_capacity(&self) -> usize {
        self.max_tour_size() - 1
    }

    /// Reads an instance file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        parse_instance(&text)
    }

    /// Writes the instance in the text format.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, format_instance(self))?;
        Ok(())
    }
}

/// Parses the line-oriented `BALANCED2TSP` format.
///
/// ```text
/// BALANCED2TSP 1
/// N 4
/// P 1
/// FIXED 1 3
/// COORDS            # or MATRIX followed by n rows of n reals
/// 1 0 0
/// 2 1 0
/// ...
/// ```
///
/// An optional `ROUNDING exact|nearest` line selects how coordinates are
/// turned into distances.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let perr = |line: usize, msg: String| Error::Parse { line, msg };

    let (line, header) = lines.next().ok_or_else(|| perr(0, "empty input".into()))?;
    let mut tok = header.split_whitespace();
    if tok.next() != Some("BALANCED2TSP") {
        return Err(perr(line, "expected header `BALANCED2TSP 1`".into()));
    }
    match tok.next() {
        Some("1") => {}
        other => {
            return Err(perr(
                line,
                format!("unsupported format version {:?}", other.unwrap_or("")),
            ))
        }
    }

    let mut n: Option<usize> = None;
    let mut p: Option<usize> = None;
    let mut fixed: Option<Vec<usize>> = None;
    let mut rounding = Rounding::Exact;

    let parse_usize = |line: usize, s: Option<&str>, what: &str| -> Result<usize> {
        s.ok_or_else(|| perr(line, format!("missing value for {what}")))?
            .parse::<usize>()
            .map_err(|e| perr(line, format!("bad {what}: {e}")))
    };
    let parse_f64 = |line: usize, s: &str| -> Result<f64> {
        s.parse::<f64>()
            .map_err(|e| perr(line, format!("bad number {s:?}: {e}")))
    };

    let mut body: Option<(usize, &str)> = None;
    for (line, l) in lines.by_ref() {
        let mut tok = l.split_whitespace();
        let key = tok.next().unwrap_or("");
        match key {
            "N" => n = Some(parse_usize(line, tok.next(), "N")?),
            "P" => p = Some(parse_usize(line, tok.next(), "P")?),
            "FIXED" => {
                let mut v = Vec::new();
                for t in tok.by_ref() {
                    let id = parse_usize(line, Some(t), "fixed node")?;
                    if id == 0 {
                        return Err(perr(line, "node ids are 1-based".into()));
                    }
                    v.push(id - 1);
                }
                fixed = Some(v);
                continue;
            }
            "ROUNDING" => {
                rounding = match tok.next() {
                    Some("exact") => Rounding::Exact,
                    Some("nearest") => Rounding::NearestInteger,
                    other => return Err(perr(line, format!("unknown rounding {other:?}"))),
                }
            }
            "COORDS" | "MATRIX" => {
                body = Some((line, key));
                break;
            }
            _ => return Err(perr(line, format!("unknown keyword {key:?}"))),
        }
        if let Some(extra) = tok.next() {
            return Err(perr(line, format!("unexpected token {extra:?}")));
        }
    }

    let (body_line, kind) = body.ok_or_else(|| perr(0, "missing COORDS or MATRIX section".into()))?;
    let n = n.ok_or_else(|| perr(body_line, "N must precede the data section".into()))?;
    let p = p.ok_or_else(|| perr(body_line, "P must precede the data section".into()))?;
    let fixed = fixed.ok_or_else(|| perr(body_line, "FIXED must precede the data section".into()))?;

    let mut last_line = body_line;
    let inst = if kind == "COORDS" {
        let mut coords: Vec<Option<(f64, f64)>> = vec![None; n];
        for _ in 0..n {
            let (line, l) = lines
                .next()
                .ok_or_else(|| perr(last_line, format!("expected {n} coordinate lines")))?;
            last_line = line;
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.len() != 3 {
                return Err(perr(line, "expected `<id> <x> <y>`".into()));
            }
            let id = parse_usize(line, Some(t[0]), "node id")?;
            if id == 0 || id > n {
                return Err(perr(line, format!("node id {id} out of range 1..={n}")));
            }
            if coords[id - 1].is_some() {
                return Err(perr(line, format!("node {id} given twice")));
            }
            coords[id - 1] = Some((parse_f64(line, t[1])?, parse_f64(line, t[2])?));
        }
        let coords: Vec<(f64, f64)> = coords.into_iter().map(|c| c.expect("all ids seen")).collect();
        Instance::from_coords(coords, rounding, &fixed, p)?
    } else {
        let mut d = Vec::with_capacity(n * n);
        for _ in 0..n {
            let (line, l) = lines
                .next()
                .ok_or_else(|| perr(last_line, format!("expected {n} matrix rows")))?;
            last_line = line;
            let row: Vec<&str> = l.split_whitespace().collect();
            if row.len() != n {
                return Err(perr(line, format!("expected {n} entries, got {}", row.len())));
            }
            for t in row {
                d.push(parse_f64(line, t)?);
            }
        }
        Instance::new(DistanceMatrix::from_rows(n, d)?, &fixed, p)?
    };
    if let Some((line, _)) = lines.next() {
        return Err(perr(line, "trailing data after the last row".into()));
    }
    Ok(inst)
}

/// Serialises an instance. Coordinates are written when present, otherwise
/// the full matrix; both use shortest round-trip float formatting.
pub fn format_instance(inst: &Instance) -> String {
    let mut s = String::new();
    let n = inst.n();
    writeln!(s, "BALANCED2TSP 1").unwrap();
    writeln!(s, "N {n}").unwrap();
    writeln!(s, "P {}", inst.p()).unwrap();
    let fixed: Vec<String> = inst.fixed().iter().map(|v| (v + 1).to_string()).collect();
    writeln!(s, "FIXED {}", fixed.join(" ")).unwrap();
    match inst.coords() {
        Some(coords) => {
            if inst.rounding() == Rounding::NearestInteger {
                writeln!(s, "ROUNDING nearest").unwrap();
            }
            writeln!(s, "COORDS").unwrap();
            for (i, (x, y)) in coords.iter().enumerate() {
                writeln!(s, "{} {x:?} {y:?}", i + 1).unwrap();
            }
        }
        None => {
            writeln!(s, "MATRIX").unwrap();
            for i in 0..n {
                let row: Vec<String> = inst.matrix().row(i).iter().map(|v| format!("{v:?}")).collect();
                writeln!(s, "{}", row.join(" ")).unwrap();
            }
        }
    }
    s
}

/// Point layouts for [`generate_instance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenMode {
    /// Independent uniform points in a square.
    UniformSquare,
    /// Points on a circle numbered along it, so the matrix is Kalmanson.
    KalmansonConvex,
}

/// Deterministic random instance with balance parameter `p = 1`.
///
/// The generator is ChaCha8 seeded with `seed`, so corpora are reproducible
/// on every platform. The fixed set is node 1 plus `fixed_count - 1` other
/// nodes drawn without replacement.
pub fn generate_instance(n: usize, fixed_count: usize, seed: u64, mode: GenMode) -> Result<Instance> {
    if n < 2 {
        return Err(invalid("n must be at least 2"));
    }
    if fixed_count == 0 || fixed_count > n {
        return Err(invalid(format!("fixed_count must be in 1..={n}, got {fixed_count}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords: Vec<(f64, f64)> = match mode {
        GenMode::UniformSquare => (0..n)
            .map(|_| (rng.random::<f64>() * SQUARE_SIDE, rng.random::<f64>() * SQUARE_SIDE))
            .collect(),
        GenMode::KalmansonConvex => (0..n)
            .map(|k| {
                // One point per equal sector, kept away from sector borders so
                // neighbouring points never coincide.
                let u: f64 = rng.random();
                let theta = std::f64::consts::TAU * (k as f64 + 0.1 + 0.8 * u) / n as f64;
                (
                    CIRCLE_RADIUS + CIRCLE_RADIUS * theta.cos(),
                    CIRCLE_RADIUS + CIRCLE_RADIUS * theta.sin(),
                )
            })
            .collect(),
    };
    let mut fixed = vec![0];
    fixed.extend(
        index::sample(&mut rng, n - 1, fixed_count - 1)
            .into_iter()
            .map(|v| v + 1),
    );
    fixed.sort_unstable();
    Instance::from_coords(coords, Rounding::Exact, &fixed, 1)
}
