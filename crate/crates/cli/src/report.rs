//! Benchmark runs over a directory of instances and the gap tables built
//! from them.
//!
//! A best-known file lists one instance per line: its name (the instance
//! file name without extension), the reference length `PC` and optionally a
//! second reference `PC/h`. `#` starts a comment. Gaps are
//! `(ours - best) / best * 100`, so negative values are improvements.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use b2tsp::pipeline::run_pipeline;
use b2tsp::{Instance, SolverConfig};

/// Reference lengths for one instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestKnown {
    pub pc: f64,
    pub pc_h: Option<f64>,
}

/// Which reference column a gap is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    Pc,
    PcH,
}

impl Reference {
    pub fn label(self) -> &'static str {
        match self {
            Reference::Pc => "PC",
            Reference::PcH => "PC/h",
        }
    }

    fn pick(self, b: &BestKnown) -> Option<f64> {
        match self {
            Reference::Pc => Some(b.pc),
            Reference::PcH => b.pc_h,
        }
    }
}

pub fn parse_best_known(text: &str) -> Result<BTreeMap<String, BestKnown>> {
    let mut out = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| -> Result<f64> {
            let v: f64 = s.parse().with_context(|| format!("line {}: bad number {s:?}", k + 1))?;
            if !(v.is_finite() && v > 0.0) {
                bail!("line {}: reference lengths must be positive", k + 1);
            }
            Ok(v)
        };
        let entry = match fields.as_slice() {
            [_, pc] => BestKnown {
                pc: num(pc)?,
                pc_h: None,
            },
            [_, pc, pch] => BestKnown {
                pc: num(pc)?,
                pc_h: Some(num(pch)?),
            },
            _ => bail!("line {}: expected `name PC [PC/h]`", k + 1),
        };
        if out.insert(fields[0].to_string(), entry).is_some() {
            bail!("line {}: duplicate instance {}", k + 1, fields[0]);
        }
    }
    Ok(out)
}

/// Percentage gap of `ours` against `best`.
pub fn gap_pct(ours: f64, best: f64) -> f64 {
    (ours - best) / best * 100.0
}

/// Summary of a set of gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct GapSummary {
    pub mean: f64,
    pub best: f64,
    pub worst: f64,
    /// Counts of gaps below, at and above zero, after rounding to two
    /// decimals.
    pub counts: (usize, usize, usize),
}

pub fn summarize(gaps: &[f64]) -> Option<GapSummary> {
    if gaps.is_empty() {
        return None;
    }
    let mut counts = (0, 0, 0);
    for &g in gaps {
        let r = (g * 100.0).round();
        if r < 0.0 {
            counts.0 += 1;
        } else if r == 0.0 {
            counts.1 += 1;
        } else {
            counts.2 += 1;
        }
    }
    Some(GapSummary {
        mean: gaps.iter().sum::<f64>() / gaps.len() as f64,
        best: gaps.iter().copied().fold(f64::INFINITY, f64::min),
        worst: gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        counts,
    })
}

/// One solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub instance: String,
    pub preset: String,
    pub length: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    pub presets: Vec<String>,
    /// Sorted by instance name, then preset order.
    pub rows: Vec<BenchRow>,
    pub best_known: BTreeMap<String, BestKnown>,
    /// Files that could not be read.
    pub warnings: Vec<String>,
}

/// Instances keyed by file stem.
pub type Named = Vec<(String, Instance)>;

/// Loads every instance file in `dir`, sorted by name. Files that fail to
/// load are reported as warnings.
pub fn load_instances(dir: &Path) -> Result<(Named, Vec<String>)> {
    let mut paths: Vec<_> = fs::read_dir(dir)
        .with_context(|| format!("cannot read directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    let mut out = Vec::new();
    let mut warnings = Vec::new();
    for p in paths {
        let name = p
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        match Instance::load(&p) {
            Ok(inst) => out.push((name, inst)),
            Err(e) => warnings.push(format!("skipping {}: {e}", p.display())),
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok((out, warnings))
}

/// Runs every preset on every instance.
pub fn run_bench(instances: &[(String, Instance)], presets: &[(String, SolverConfig)]) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for (name, inst) in instances {
        for (preset, cfg) in presets {
            let t = Instant::now();
            let rec = run_pipeline(inst, cfg).with_context(|| format!("solving {name} with {preset}"))?;
            rows.push(BenchRow {
                instance: name.clone(),
                preset: preset.clone(),
                length: rec.length,
                seconds: t.elapsed().as_secs_f64(),
            });
        }
    }
    Ok(rows)
}

/// Loads, solves and collects everything needed for the tables.
pub fn bench_report(dir: &Path, best_known: Option<&Path>, presets: &[(String, SolverConfig)]) -> Result<BenchReport> {
    let (instances, warnings) = load_instances(dir)?;
    let best_known = match best_known {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            parse_best_known(&text)?
        }
        None => BTreeMap::new(),
    };
    let rows = run_bench(&instances, presets)?;
    Ok(BenchReport {
        presets: presets.iter().map(|p| p.0.clone()).collect(),
        rows,
        best_known,
        warnings,
    })
}

const W: usize = 14;

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.6}"))
}

impl BenchReport {
    fn preset_rows<'a>(&'a self, preset: &'a str) -> impl Iterator<Item = &'a BenchRow> + 'a {
        self.rows.iter().filter(move |r| r.preset == preset)
    }

    /// Gaps of one preset against one reference, for instances that have it.
    pub fn gaps(&self, preset: &str, reference: Reference) -> Vec<f64> {
        self.preset_rows(preset)
            .filter_map(|r| {
                let b = self.best_known.get(&r.instance)?;
                Some(gap_pct(r.length, reference.pick(b)?))
            })
            .collect()
    }

    /// Mean %, best %, worst % and `#(<,=,>)` per preset and reference,
    /// plus the mean running time.
    pub fn gap_table(&self) -> String {
        let refs = [Reference::Pc, Reference::PcH];
        let mut s = String::new();
        let _ = write!(s, "{:<W$}", "");
        for p in &self.presets {
            let _ = write!(s, "{:<w$}", p, w = 2 * W);
        }
        s.push('\n');
        let _ = write!(s, "{:<W$}", "");
        for _ in &self.presets {
            for r in refs {
                let _ = write!(s, "{:<W$}", r.label());
            }
        }
        s.push('\n');

        let _ = write!(s, "{:<W$}", "t_m (s)");
        for p in &self.presets {
            let times: Vec<f64> = self.preset_rows(p).map(|r| r.seconds).collect();
            let mean = (!times.is_empty()).then(|| times.iter().sum::<f64>() / times.len() as f64);
            let _ = write!(s, "{:<w$}", cell(mean), w = 2 * W);
        }
        s.push('\n');

        let summaries: Vec<Option<GapSummary>> = self
            .presets
            .iter()
            .flat_map(|p| refs.map(|r| summarize(&self.gaps(p, r))))
            .collect();
        let line = |s: &mut String, label: &str, f: &dyn Fn(&GapSummary) -> String| {
            let _ = write!(s, "{label:<W$}");
            for g in &summaries {
                let _ = write!(s, "{:<W$}", g.as_ref().map_or_else(|| "-".to_string(), f));
            }
            s.push('\n');
        };
        line(&mut s, "Mean %", &|g| format!("{:.6}", g.mean));
        line(&mut s, "Best %", &|g| format!("{:.6}", g.best));
        line(&mut s, "Worst %", &|g| format!("{:.6}", g.worst));
        line(&mut s, "#(<,=,>)", &|g| {
            format!("({},{},{})", g.counts.0, g.counts.1, g.counts.2)
        });
        s
    }

    /// Per-instance table: instance, PC, PC/h, then length and time for
    /// every preset.
    pub fn instance_table(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "{:<W$}{:<W$}{:<W$}", "instance", "PC", "PC/h");
        for p in &self.presets {
            let _ = write!(s, "{:<W$}{:<W$}", format!("{p} length"), format!("{p} time (s)"));
        }
        s.push('\n');
        let mut names: Vec<&str> = self.rows.iter().map(|r| r.instance.as_str()).collect();
        names.dedup();
        for name in names {
            let b = self.best_known.get(name);
            let _ = write!(
                s,
                "{:<W$}{:<W$}{:<W$}",
                name,
                cell(b.map(|b| b.pc)),
                cell(b.and_then(|b| b.pc_h))
            );
            for p in &self.presets {
                let row = self.rows.iter().find(|r| r.instance == name && &r.preset == p);
                let _ = write!(
                    s,
                    "{:<W$}{:<W$}",
                    cell(row.map(|r| r.length)),
                    cell(row.map(|r| r.seconds))
                );
            }
            s.push('\n');
        }
        s
    }

    /// `instance,preset,length,gap_pct,seconds`; the gap is against `PC`
    /// and left empty without a reference.
    pub fn csv(&self) -> String {
        let mut rows: Vec<&BenchRow> = self.rows.iter().collect();
        rows.sort_by(|a, b| a.instance.cmp(&b.instance).then(a.preset.cmp(&b.preset)));
        let mut s = String::from("instance,preset,length,gap_pct,seconds\n");
        for r in rows {
            let gap = self
                .best_known
                .get(&r.instance)
                .map(|b| format!("{:.6}", gap_pct(r.length, b.pc)))
                .unwrap_or_default();
            let _ = writeln!(
                s,
                "{},{},{:.6},{},{:.6}",
                r.instance, r.preset, r.length, gap, r.seconds
            );
        }
        s
    }
}
