//! latcover: generate CVP instances, build and validate (2,eps)-coverings,
//! run the approximate solvers against the exact oracle, and certify
//! lattice sparsifiers. All outputs are deterministic given the seed unless
//! --timings is set.

use clap::{Args, Parser, Subcommand};
use latcover_core::boost::{boost_deterministic, boost_randomized, BoostOptions, InnerSolver};
use latcover_core::covering::{validate_cover, ValidateMode};
use latcover_core::experiment::{
    self, build_covering, cover_report, cover_rows_to_csv, covering_for, rows_to_csv, Budgets,
    Construction, ExperimentConfig, Method,
};
use latcover_core::io as lio;
use latcover_core::lattice::exact_cvp;
use latcover_core::norms::NormBody;
use latcover_core::rng::SplitMix64;
use latcover_core::sparsify::{sparsify_candidates, sparsifier_cvp};
use latcover_core::{Error, Result};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "latcover", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct BudgetArgs {
    /// Cap on covering pieces
    #[arg(long = "budget-pieces", default_value_t = 5_000_000)]
    budget_pieces: u64,
    /// Cap on enumerated lattice points per call
    #[arg(long = "budget-enum", default_value_t = 10_000_000)]
    budget_enum: u64,
    /// Cap on wall time in milliseconds
    #[arg(long = "budget-wall-ms", default_value_t = 600_000)]
    budget_wall_ms: u64,
}

impl BudgetArgs {
    fn to_budgets(&self) -> Budgets {
        Budgets {
            max_pieces: self.budget_pieces,
            max_enum_points: self.budget_enum,
            max_wall_ms: self.budget_wall_ms,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate random CVP instance files (deterministic per seed)
    Gen {
        /// Norm descriptor: lp:P | polytope:FILE | zonotope:FILE | cube
        #[arg(long)]
        norm: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 5)]
        entry_bound: i64,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        /// Output file (single instance) or directory (count > 1)
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve one instance file
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "boost-det")]
        method: String,
        /// Override the instance epsilon
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also run the exact oracle and report the ratio
        #[arg(long, default_value_t = false)]
        test_mode: bool,
        #[arg(long, default_value_t = false)]
        timings: bool,
        #[command(flatten)]
        budgets: BudgetArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a covering and write the size/validity table (CSV); optionally
    /// dump the pieces as JSON
    Cover {
        #[arg(long)]
        norm: String,
        #[arg(long)]
        n: usize,
        /// grid | zonotope | polytope | smooth
        #[arg(long)]
        construction: String,
        /// Comma-separated epsilon grid
        #[arg(long)]
        eps: String,
        /// Validation samples per epsilon (0 disables validation)
        #[arg(long, default_value_t = 2000)]
        validate: usize,
        #[arg(long, default_value_t = false)]
        timings: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the pieces of the first epsilon as JSON
        #[arg(long)]
        emit_pieces: Option<PathBuf>,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
    /// Validate a covering file
    Validate {
        #[arg(long)]
        covering: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// sampled | vertex-exact
        #[arg(long, default_value = "sampled")]
        mode: String,
    },
    /// Certify mod-p sparsifier candidates for the lattice of an instance
    Certify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 6)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.05)]
        resolution: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a batch experiment (CSV + JSON results, oracle cross-check)
    Bench {
        #[arg(long)]
        norm: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "boost-det")]
        method: String,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 5)]
        entry_bound: i64,
        #[arg(long, default_value_t = true)]
        test_mode: bool,
        #[arg(long, default_value_t = false)]
        timings: bool,
        #[command(flatten)]
        budgets: BudgetArgs,
        /// Output prefix: writes PREFIX.csv and PREFIX.json
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_norm(spec: &str, n: usize) -> Result<NormBody> {
    if let Some(p) = spec.strip_prefix("lp:") {
        let p: f64 = p
            .parse()
            .map_err(|_| Error::Parse(format!("bad lp parameter '{p}'")))?;
        return NormBody::lp(n, p);
    }
    if spec == "cube" {
        return Ok(NormBody::cube(n));
    }
    if let Some(file) = spec.strip_prefix("polytope:").or_else(|| spec.strip_prefix("zonotope:")) {
        let text = fs::read_to_string(file)?;
        let v: serde_json::Value = serde_json::from_str(&text)?;
        let body = lio::norm_from_json(&v)?;
        if body.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: body.dim(),
            });
        }
        return Ok(body);
    }
    Err(Error::Parse(format!(
        "norm must be lp:P, cube, polytope:FILE or zonotope:FILE, got '{spec}'"
    )))
}

fn write_or_print(path: &Option<PathBuf>, content: &str) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent() {
                if !dir.as_os_str().is_empty() {
                    fs::create_dir_all(dir)?;
                }
            }
            fs::write(p, content)?;
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::Gen {
            norm,
            n,
            seed,
            count,
            entry_bound,
            eps,
            out,
        } => {
            let body = parse_norm(&norm, n)?;
            if count == 1 && out.extension().is_some() {
                let mut inst = experiment::gen_instance(n, &body, seed, entry_bound);
                inst.epsilon = eps;
                let j = lio::instance_to_json(&inst, Some(seed))?;
                write_or_print(&Some(out), &format!("{}\n", serde_json::to_string_pretty(&j)?))?;
            } else {
                fs::create_dir_all(&out)?;
                for i in 0..count {
                    let s = seed.wrapping_add(i as u64);
                    let mut inst = experiment::gen_instance(n, &body, s, entry_bound);
                    inst.epsilon = eps;
                    let j = lio::instance_to_json(&inst, Some(s))?;
                    let path = out.join(format!("instance_{s:04}.json"));
                    fs::write(path, format!("{}\n", serde_json::to_string_pretty(&j)?))?;
                }
            }
            Ok(true)
        }
        Command::Solve {
            instance,
            method,
            eps,
            seed,
            test_mode,
            timings,
            budgets,
            out,
        } => {
            let text = fs::read_to_string(&instance)?;
            let v: serde_json::Value = serde_json::from_str(&text)?;
            let mut inst = lio::instance_from_json(&v)?;
            if let Some(e) = eps {
                inst.epsilon = e;
            }
            let method = Method::parse(&method)?;
            let t0 = std::time::Instant::now();
            let mut rep = match method {
                Method::Exact => {
                    let s = exact_cvp(&inst.lattice, &inst.target, &inst.norm)?;
                    let mut r = latcover_core::boost::SolveReport {
                        coeffs: s.coeffs,
                        vector: s.point,
                        distance: s.distance,
                        opt_distance: Some(s.distance),
                        ratio: Some(1.0),
                        iterations: 0,
                        inner_calls: 0,
                        enumerations: 1,
                        wall_ms: None,
                        seed: Some(seed),
                        effective_epsilon: 0.0,
                        unit_scale: 1.0,
                        trace: Vec::new(),
                        status: latcover_core::boost::SolveStatus::Ok,
                        notes: Vec::new(),
                    };
                    r.seed = Some(seed);
                    r
                }
                Method::BoostDet => {
                    let cov = covering_for(&inst.norm, inst.epsilon, budgets.budget_pieces)?;
                    boost_deterministic(&inst, &cov, &InnerSolver::Exact, &BoostOptions::default())?
                }
                Method::BoostRand => {
                    let mut rng = SplitMix64::new(seed);
                    boost_randomized(
                        &inst,
                        &InnerSolver::Exact,
                        &mut rng,
                        inst.lattice.dim() as u32,
                        &BoostOptions::default(),
                    )?
                }
                Method::Sparsify => {
                    let mut rng = SplitMix64::new(seed);
                    sparsifier_cvp(&inst, &mut rng)?
                }
            };
            rep.seed = Some(seed);
            if timings {
                rep.wall_ms = Some(t0.elapsed().as_secs_f64() * 1e3);
            }
            let mut ok = true;
            if test_mode {
                let opt = exact_cvp(&inst.lattice, &inst.target, &inst.norm)?.distance;
                rep.opt_distance = Some(opt);
                let ratio = if opt > 0.0 { rep.distance / opt } else { 1.0 };
                rep.ratio = Some(ratio);
                ok = ratio <= method.ratio_bound(rep.effective_epsilon.max(inst.epsilon)) + 1e-7;
            }
            let j = lio::report_to_json(&rep);
            write_or_print(&out, &format!("{}\n", serde_json::to_string_pretty(&j)?))?;
            Ok(ok)
        }
        Command::Cover {
            norm,
            n,
            construction,
            eps,
            validate,
            timings,
            out,
            emit_pieces,
            budgets,
        } => {
            let body = parse_norm(&norm, n)?;
            let construction = Construction::parse(&construction)?;
            let grid: Vec<f64> = eps
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad epsilon '{s}'")))
                })
                .collect::<Result<_>>()?;
            let rep = cover_report(&body, construction, &grid, validate, timings)?;
            let csv = cover_rows_to_csv(&rep.rows, rep.slope);
            write_or_print(&out, &csv)?;
            if let Some(path) = emit_pieces {
                let cov = build_covering(&body, construction, grid[0])?;
                let j = lio::covering_to_json(&cov, budgets.budget_pieces as usize)?;
                fs::write(path, format!("{}\n", serde_json::to_string(&j)?))?;
            }
            let ok = rep
                .rows
                .iter()
                .all(|r| r.coverage_failures == 0 && r.containment_failures == 0);
            Ok(ok)
        }
        Command::Validate {
            covering,
            samples,
            mode,
        } => {
            let text = fs::read_to_string(&covering)?;
            let v: serde_json::Value = serde_json::from_str(&text)?;
            let cov = lio::covering_from_json(&v)?;
            let mode = match mode.as_str() {
                "sampled" => ValidateMode::Sampled(samples),
                "vertex-exact" => ValidateMode::VertexExact,
                other => return Err(Error::Parse(format!("unknown mode '{other}'"))),
            };
            let rep = validate_cover(&cov, mode)?;
            println!(
                "coverage: {}/{} failed (worst margin {:.3e})",
                rep.coverage_failures, rep.coverage_checked, rep.worst_coverage_margin
            );
            println!(
                "containment: {}/{} failed (worst margin {:.3e})",
                rep.containment_failures, rep.containment_checked, rep.worst_containment_margin
            );
            println!("symmetry: {}/{} failed", rep.symmetry_failures, rep.symmetry_checked);
            Ok(rep.ok())
        }
        Command::Certify {
            instance,
            delta,
            trials,
            seed,
            resolution,
            out,
        } => {
            let text = fs::read_to_string(&instance)?;
            let v: serde_json::Value = serde_json::from_str(&text)?;
            let inst = lio::instance_from_json(&v)?;
            let mut rng = SplitMix64::new(seed);
            let cands = sparsify_candidates(
                &inst.lattice,
                &inst.norm,
                delta,
                trials,
                &mut rng,
                resolution,
                4000,
            )?;
            let j = serde_json::Value::Array(
                cands.iter().map(lio::sparsifier_to_json).collect(),
            );
            write_or_print(&out, &format!("{}\n", serde_json::to_string_pretty(&j)?))?;
            Ok(cands.iter().any(|c| c.certified))
        }
        Command::Bench {
            norm,
            n,
            method,
            eps,
            seed,
            count,
            entry_bound,
            test_mode,
            timings,
            budgets,
            out,
        } => {
            let body = parse_norm(&norm, n)?;
            let cfg = ExperimentConfig {
                method: Method::parse(&method)?,
                norm: body,
                epsilon: eps,
                dimension: n,
                seed,
                count,
                entry_bound,
                budgets: budgets.to_budgets(),
                test_mode,
                timings,
            };
            let outcome = experiment::run_experiment(&cfg)?;
            let csv = rows_to_csv(&outcome.rows);
            let json = experiment::outcome_to_json(&cfg, &outcome)?;
            match out {
                Some(prefix) => {
                    let base: &Path = prefix.as_ref();
                    if let Some(dir) = base.parent() {
                        if !dir.as_os_str().is_empty() {
                            fs::create_dir_all(dir)?;
                        }
                    }
                    fs::write(base.with_extension("csv"), &csv)?;
                    fs::write(
                        base.with_extension("json"),
                        format!("{}\n", serde_json::to_string_pretty(&json)?),
                    )?;
                }
                None => {
                    print!("{csv}");
                }
            }
            Ok(outcome.all_ok)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("latcover: one or more checks failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("latcover: error: {e}");
            ExitCode::from(2)
        }
    }
}
