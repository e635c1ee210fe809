use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use b2tsp::exact::solve_kalmanson_exact;
use b2tsp::instance::{generate_instance, GenMode};
use b2tsp::kalmanson::{default_tolerance, kalmanson_violation, KalmansonCondition};
use b2tsp::oracle::brute_force_2tsp;
use b2tsp::pipeline::{run_pipeline, PRESETS};
use b2tsp::tour::{format_solution, validate_sequence};
use b2tsp::{InitKind, Instance, SolverConfig, TwoTourSequence};
use b2tsp_cli::report::bench_report;
use b2tsp_cli::svg::render_svg;

#[derive(Parser)]
#[command(name = "b2tsp", version, about = "Balanced two-period TSP solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Init {
    Ks,
    Rp,
}

impl From<Init> for InitKind {
    fn from(i: Init) -> Self {
        match i {
            Init::Ks => InitKind::Ks,
            Init::Rp => InitKind::Rp,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the multi-start heuristic.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "ks")]
        init: Init,
        /// Window size.
        #[arg(long, default_value_t = 5)]
        s: usize,
        /// Slide step.
        #[arg(long, default_value_t = 3)]
        l: usize,
        /// Number of initial solutions.
        #[arg(long, default_value_t = 36)]
        iters: usize,
        /// Take s, l and the start count from a preset.
        #[arg(long, conflicts_with_all = ["s", "l", "iters"])]
        preset: Option<String>,
        /// Wall-clock limit in seconds.
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest exactly solved sub-instance, in customers.
        #[arg(long, default_value_t = b2tsp::vrp2::DEFAULT_EXACT_CAP)]
        exact_cap: usize,
        /// Also draw the result.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Solve with the cubic dynamic program (optimal on Kalmanson matrices).
    Exact {
        file: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Check the Kalmanson conditions.
    CheckKalmanson {
        file: PathBuf,
        /// Slack per inequality; defaults to 1e-9 * (1 + largest distance).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Brute-force optimum of a small instance.
    Oracle { file: PathBuf },
    /// Write a random instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        fixed: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Points on a circle instead of a square.
        #[arg(long)]
        kalmanson: bool,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Solve every instance in a directory and tabulate gaps.
    Bench {
        dir: PathBuf,
        /// Reference lengths: `name PC [PC/h]` per line.
        #[arg(long)]
        best_known: Option<PathBuf>,
        /// Preset(s) to run: h42x48, h53x36, h64x24, h75x12.
        #[arg(long = "preset", default_value = "h53x36")]
        presets: Vec<String>,
        #[arg(long, value_enum, default_value = "ks")]
        init: Init,
        /// Per-run time limit in seconds (replaces the iteration budget).
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the CSV here instead of after the tables.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn load(path: &PathBuf) -> Result<Instance> {
    Instance::load(path).with_context(|| format!("cannot load {}", path.display()))
}

fn preset_config(name: &str) -> Result<SolverConfig> {
    SolverConfig::preset(name).with_context(|| {
        let known: Vec<&str> = PRESETS.iter().map(|p| p.0).collect();
        format!("unknown preset {name}; known: {}", known.join(", "))
    })
}

fn emit(inst: &Instance, q: &TwoTourSequence, svg: Option<&PathBuf>) -> Result<()> {
    if let Err(violations) = validate_sequence(q, inst) {
        let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
        bail!("internal error, infeasible result: {}", list.join("; "));
    }
    print!("{}", format_solution(q, inst.matrix()));
    if let Some(path) = svg {
        fs::write(path, render_svg(inst, q)?).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve {
            file,
            init,
            s,
            l,
            iters,
            preset,
            time_limit,
            seed,
            exact_cap,
            svg,
        } => {
            let inst = load(&file)?;
            let mut cfg = match preset {
                Some(name) => preset_config(&name)?,
                None => SolverConfig::new(init.into(), s, l, iters),
            };
            cfg.init = init.into();
            cfg.time_limit = time_limit;
            cfg.seed = seed;
            cfg.exact_cap = exact_cap;
            let rec = run_pipeline(&inst, &cfg)?;
            emit(&inst, &rec.best, svg.as_ref())?;
            eprintln!(
                "found in iteration {} after {:.6} s",
                rec.iteration + 1,
                rec.elapsed.as_secs_f64()
            );
        }
        Command::Exact { file, svg } => {
            let inst = load(&file)?;
            let sol = solve_kalmanson_exact(&inst)?;
            if kalmanson_violation(inst.matrix(), default_tolerance(inst.matrix())).is_some() {
                eprintln!("warning: the matrix is not Kalmanson, the result is only an upper bound");
            }
            emit(&inst, &sol.sequence, svg.as_ref())?;
        }
        Command::CheckKalmanson { file, tol } => {
            let inst = load(&file)?;
            let tol = tol.unwrap_or_else(|| default_tolerance(inst.matrix()));
            if tol.is_nan() || tol < 0.0 {
                bail!("tolerance must be non-negative");
            }
            match kalmanson_violation(inst.matrix(), tol) {
                None => println!("KALMANSON yes"),
                Some(w) => {
                    let which = match w.condition {
                        KalmansonCondition::First => 1,
                        KalmansonCondition::Second => 2,
                    };
                    println!("KALMANSON no");
                    println!(
                        "WITNESS {} {} {} {} condition {which} violation {:.6}",
                        w.i + 1,
                        w.j + 1,
                        w.l + 1,
                        w.m + 1,
                        w.violation
                    );
                }
            }
        }
        Command::Oracle { file } => {
            let inst = load(&file)?;
            let sol = brute_force_2tsp(&inst)?;
            emit(&inst, &sol.sequence, None)?;
        }
        Command::Gen {
            n,
            fixed,
            seed,
            kalmanson,
            p,
            output,
        } => {
            let mode = if kalmanson {
                GenMode::KalmansonConvex
            } else {
                GenMode::UniformSquare
            };
            let inst = generate_instance(n, fixed, seed, mode)?.with_p(p)?;
            inst.save(&output)
                .with_context(|| format!("cannot write {}", output.display()))?;
        }
        Command::Bench {
            dir,
            best_known,
            presets,
            init,
            time_limit,
            seed,
            csv,
        } => {
            let mut configs = Vec::new();
            for name in &presets {
                let mut cfg = preset_config(name)?;
                cfg.init = init.into();
                cfg.seed = seed;
                if time_limit.is_some() {
                    cfg.time_limit = time_limit;
                    cfg.max_iters = None;
                }
                configs.push((name.clone(), cfg));
            }
            let report = bench_report(&dir, best_known.as_deref(), &configs)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            print!("{}\n{}", report.gap_table(), report.instance_table());
            match csv {
                Some(path) => {
                    fs::write(&path, report.csv()).with_context(|| format!("cannot write {}", path.display()))?
                }
                None => print!("\n{}", report.csv()),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
