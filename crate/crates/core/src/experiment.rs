//! Instance generation and experiment orchestration: batch solves with
//! oracle cross-checks, machine-readable CSV/JSON results, and covering
//! size/validity tables.

use crate::boost::{boost_deterministic, boost_randomized, BoostOptions, CvpInstance, InnerSolver, SolveReport};
use crate::covering::{
    cover_grid, cover_polytope, cover_smooth, cover_zonotope, validate_cover, Covering,
    ValidateMode,
};
use crate::error::{Error, Result};
use crate::io;
use crate::lattice::{exact_cvp, Lattice, TargetPoint};
use crate::norms::{NormBody, NormKind};
use crate::rng::{SplitMix64, RNG_NAME};
use crate::sparsify::sparsifier_cvp;
use crate::{eta, Int, Rat, Real};
use serde_json::{json, Value};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    BoostDet,
    BoostRand,
    Sparsify,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::BoostDet => "boost-det",
            Method::BoostRand => "boost-rand",
            Method::Sparsify => "sparsify",
        }
    }

    pub fn parse(s: &str) -> Result<Method> {
        match s {
            "exact" => Ok(Method::Exact),
            "boost-det" => Ok(Method::BoostDet),
            "boost-rand" => Ok(Method::BoostRand),
            "sparsify" => Ok(Method::Sparsify),
            other => Err(Error::Parse(format!("unknown method '{other}'"))),
        }
    }

    /// Approximation bound the exit-code contract holds this method to.
    pub fn ratio_bound(&self, eps_effective: Real) -> Real {
        match self {
            Method::Exact => 1.0,
            Method::BoostDet => 1.0 + 7.0 * eps_effective,
            Method::BoostRand | Method::Sparsify => 1.0 + eps_effective,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Budgets {
    pub max_pieces: u64,
    pub max_enum_points: u64,
    pub max_wall_ms: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_pieces: 5_000_000,
            max_enum_points: 10_000_000,
            max_wall_ms: 600_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub method: Method,
    pub norm: NormBody,
    pub epsilon: Real,
    pub dimension: usize,
    pub seed: u64,
    pub count: usize,
    pub entry_bound: i64,
    pub budgets: Budgets,
    /// Also run the exact oracle and record ratios.
    pub test_mode: bool,
    /// Emit wall-clock timings (off keeps outputs byte-reproducible).
    pub timings: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Domain(format!(
                "epsilon must lie in (0,1), got {}",
                self.epsilon
            )));
        }
        if self.count == 0 || self.dimension == 0 || self.entry_bound <= 0 {
            return Err(Error::Domain("count, dimension and entry bound must be positive".into()));
        }
        if self.budgets.max_pieces == 0 || self.budgets.max_enum_points == 0 {
            return Err(Error::Domain("budgets must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ResultRow {
    pub instance_id: usize,
    pub method: Method,
    pub eps_effective: Real,
    pub distance: Real,
    pub opt_distance: Option<Real>,
    pub ratio: Option<Real>,
    pub inner_calls: u64,
    pub pieces: Option<u128>,
    pub wall_ms: Real,
    pub status: String,
}

#[derive(Debug)]
pub struct ExperimentOutcome {
    pub rows: Vec<ResultRow>,
    pub all_ok: bool,
    pub rng_name: &'static str,
}

/// Deterministic random instance: full-rank integer basis with entries in
/// [-entry_bound, entry_bound], rational target inside the fundamental
/// parallelepiped (denominator 64).
pub fn gen_instance(n: usize, norm: &NormBody, seed: u64, entry_bound: i64) -> CvpInstance {
    let mut rng = SplitMix64::substream(seed, 0x6e57a4ce);
    let w = 2 * entry_bound as u64 + 1;
    let lattice = loop {
        let cols: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.below(w) as i64 - entry_bound).collect())
            .collect();
        if let Ok(l) = Lattice::from_i64(&cols) {
            break l;
        }
    };
    let frac: Vec<Rat> = (0..n)
        .map(|_| Rat::new(Int::from(rng.below(64) as i64), Int::from(64)))
        .collect();
    let mut coords = vec![Rat::from_integer(Int::from(0)); n];
    for (i, col) in lattice.basis().iter().enumerate() {
        for (c, b) in coords.iter_mut().zip(col) {
            *c += &frac[i] * Rat::from_integer(b.clone());
        }
    }
    CvpInstance {
        lattice,
        target: TargetPoint::new(coords),
        norm: norm.clone(),
        epsilon: 0.0, // callers fill in
    }
}

/// The covering construction a norm body naturally routes to.
pub fn covering_for(norm: &NormBody, eps: Real, max_pieces: u64) -> Result<Covering> {
    let cov = match &norm.kind {
        NormKind::Lp { .. } => {
            if norm.smoothness.is_some() {
                cover_smooth(norm, eps)?
            } else {
                cover_grid(norm, eps)?
            }
        }
        NormKind::Polytope { rows, rhs } => cover_polytope(rows, rhs, eps)?,
        NormKind::Zonotope { gens } => cover_zonotope(gens, eps)?,
        _ => cover_grid(norm, eps)?,
    };
    if let Some(len) = cov.len() {
        if len > max_pieces as u128 {
            return Err(Error::BudgetExceeded(format!(
                "covering needs {len} pieces, budget {max_pieces}"
            )));
        }
    }
    Ok(cov)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let covering = match cfg.method {
        Method::BoostDet => Some(covering_for(&cfg.norm, cfg.epsilon, cfg.budgets.max_pieces)?),
        _ => None,
    };
    let opts = BoostOptions::default();
    let mut rows = Vec::with_capacity(cfg.count);
    let mut all_ok = true;
    let started = Instant::now();
    for id in 0..cfg.count {
        if started.elapsed().as_millis() as u64 > cfg.budgets.max_wall_ms {
            rows.push(ResultRow {
                instance_id: id,
                method: cfg.method,
                eps_effective: cfg.epsilon,
                distance: Real::NAN,
                opt_distance: None,
                ratio: None,
                inner_calls: 0,
                pieces: None,
                wall_ms: 0.0,
                status: "budget-exceeded: wall time".into(),
            });
            all_ok = false;
            break;
        }
        let mut inst = gen_instance(cfg.dimension, &cfg.norm, cfg.seed.wrapping_add(id as u64), cfg.entry_bound);
        inst.epsilon = cfg.epsilon;
        let t0 = Instant::now();
        let solved: Result<SolveReport> = match cfg.method {
            Method::Exact => exact_cvp(&inst.lattice, &inst.target, &inst.norm).map(|s| SolveReport {
                coeffs: s.coeffs.clone(),
                vector: s.point.clone(),
                distance: s.distance,
                opt_distance: Some(s.distance),
                ratio: Some(1.0),
                iterations: 0,
                inner_calls: 0,
                enumerations: 1,
                wall_ms: None,
                seed: Some(cfg.seed),
                effective_epsilon: 0.0,
                unit_scale: 1.0,
                trace: Vec::new(),
                status: crate::boost::SolveStatus::Ok,
                notes: Vec::new(),
            }),
            Method::BoostDet => boost_deterministic(
                &inst,
                covering.as_ref().expect("built above"),
                &InnerSolver::Exact,
                &opts,
            ),
            Method::BoostRand => {
                let mut rng = SplitMix64::substream(cfg.seed, 0xb005 ^ id as u64);
                boost_randomized(&inst, &InnerSolver::Exact, &mut rng, cfg.dimension as u32, &opts)
            }
            Method::Sparsify => {
                let mut rng = SplitMix64::substream(cfg.seed, 0x5a55 ^ id as u64);
                sparsifier_cvp(&inst, &mut rng)
            }
        };
        let wall = t0.elapsed().as_secs_f64() * 1e3;
        let eps_eff = covering.as_ref().map(|c| c.epsilon).unwrap_or(cfg.epsilon);
        match solved {
            Ok(mut rep) => {
                let (opt, ratio, status) = if cfg.test_mode {
                    let opt = exact_cvp(&inst.lattice, &inst.target, &inst.norm)?.distance;
                    let ratio = if opt > 0.0 {
                        rep.distance / opt
                    } else if rep.distance <= eta() {
                        1.0
                    } else {
                        Real::INFINITY
                    };
                    let bound = cfg.method.ratio_bound(eps_eff);
                    let ok = ratio <= bound * (1.0 + 1e-9) + eta();
                    if !ok {
                        all_ok = false;
                    }
                    (
                        Some(opt),
                        Some(ratio),
                        if ok { "ok".to_string() } else { format!("ratio {ratio:.6} exceeds {bound:.6}") },
                    )
                } else {
                    (None, None, "ok".to_string())
                };
                rep.opt_distance = opt;
                rep.ratio = ratio;
                rows.push(ResultRow {
                    instance_id: id,
                    method: cfg.method,
                    eps_effective: eps_eff,
                    distance: rep.distance,
                    opt_distance: opt,
                    ratio,
                    inner_calls: rep.inner_calls,
                    pieces: covering.as_ref().and_then(|c| c.len()),
                    wall_ms: if cfg.timings { wall } else { 0.0 },
                    status,
                });
            }
            Err(e) => {
                all_ok = false;
                rows.push(ResultRow {
                    instance_id: id,
                    method: cfg.method,
                    eps_effective: eps_eff,
                    distance: Real::NAN,
                    opt_distance: None,
                    ratio: None,
                    inner_calls: 0,
                    pieces: None,
                    wall_ms: if cfg.timings { wall } else { 0.0 },
                    status: format!("error: {e}"),
                });
            }
        }
    }
    Ok(ExperimentOutcome {
        rows,
        all_ok,
        rng_name: RNG_NAME,
    })
}

pub fn rows_to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(
        "instance_id,method,eps_effective,distance,opt_distance,ratio,inner_calls,pieces,wall_ms,status\r\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\r\n",
            r.instance_id,
            r.method.name(),
            r.eps_effective,
            r.distance,
            r.opt_distance.map(|v| v.to_string()).unwrap_or_default(),
            r.ratio.map(|v| v.to_string()).unwrap_or_default(),
            r.inner_calls,
            r.pieces.map(|v| v.to_string()).unwrap_or_default(),
            r.wall_ms,
            io::csv_field(&r.status),
        ));
    }
    out
}

pub fn outcome_to_json(cfg: &ExperimentConfig, out: &ExperimentOutcome) -> Result<Value> {
    let rows: Vec<Value> = out
        .rows
        .iter()
        .map(|r| {
            json!({
                "distance": r.distance,
                "eps_effective": r.eps_effective,
                "inner_calls": r.inner_calls,
                "instance_id": r.instance_id,
                "method": r.method.name(),
                "opt_distance": r.opt_distance,
                "pieces": r.pieces.map(|p| p as u64),
                "ratio": r.ratio,
                "status": r.status,
                "wall_ms": r.wall_ms,
            })
        })
        .collect();
    Ok(json!({
        "all_ok": out.all_ok,
        "config": {
            "count": cfg.count,
            "dimension": cfg.dimension,
            "entry_bound": cfg.entry_bound,
            "epsilon": cfg.epsilon,
            "method": cfg.method.name(),
            "norm": io::norm_to_json(&cfg.norm)?,
            "rng": out.rng_name,
            "seed": cfg.seed,
            "test_mode": cfg.test_mode,
        },
        "rows": rows,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    Grid,
    Zonotope,
    Polytope,
    Smooth,
}

impl Construction {
    pub fn name(&self) -> &'static str {
        match self {
            Construction::Grid => "grid",
            Construction::Zonotope => "zonotope",
            Construction::Polytope => "polytope",
            Construction::Smooth => "smooth",
        }
    }

    pub fn parse(s: &str) -> Result<Construction> {
        match s {
            "grid" => Ok(Construction::Grid),
            "zonotope" => Ok(Construction::Zonotope),
            "polytope" => Ok(Construction::Polytope),
            "smooth" => Ok(Construction::Smooth),
            other => Err(Error::Parse(format!("unknown construction '{other}'"))),
        }
    }
}

pub fn build_covering(norm: &NormBody, construction: Construction, eps: Real) -> Result<Covering> {
    match construction {
        Construction::Grid => cover_grid(norm, eps),
        Construction::Smooth => cover_smooth(norm, eps),
        Construction::Zonotope => match &norm.kind {
            NormKind::Zonotope { gens } => cover_zonotope(gens, eps),
            _ => Err(Error::Domain("zonotope construction needs a zonotope norm".into())),
        },
        Construction::Polytope => match &norm.kind {
            NormKind::Polytope { rows, rhs } => cover_polytope(rows, rhs, eps),
            _ => Err(Error::Domain("polytope construction needs a polytope norm".into())),
        },
    }
}

#[derive(Debug, Clone)]
pub struct CoverRow {
    pub eps_requested: Real,
    pub eps_effective: Real,
    pub pieces: Option<u128>,
    pub raw_count: Option<u128>,
    pub validation_margin: Real,
    pub coverage_failures: usize,
    pub containment_failures: usize,
    /// informational echo of the half-dimension lower-bound scaling
    pub halfdim_lower_scale: Real,
    pub wall_ms: Real,
    pub status: String,
}

#[derive(Debug)]
pub struct CoverReport {
    pub rows: Vec<CoverRow>,
    /// least-squares slope of ln(count) against ln(1/eps)
    pub slope: Option<Real>,
}

pub fn cover_report(
    norm: &NormBody,
    construction: Construction,
    eps_grid: &[Real],
    validation_samples: usize,
    timings: bool,
) -> Result<CoverReport> {
    let n = norm.dim() as Real;
    let mut rows = Vec::new();
    for &eps in eps_grid {
        let t0 = Instant::now();
        match build_covering(norm, construction, eps) {
            Ok(cov) => {
                let rep = if validation_samples > 0 {
                    Some(validate_cover(&cov, ValidateMode::Sampled(validation_samples))?)
                } else {
                    None
                };
                rows.push(CoverRow {
                    eps_requested: eps,
                    eps_effective: cov.epsilon,
                    pieces: cov.len(),
                    raw_count: cov.raw_count,
                    validation_margin: rep
                        .as_ref()
                        .map(|r| r.worst_containment_margin)
                        .unwrap_or(Real::NAN),
                    coverage_failures: rep.as_ref().map(|r| r.coverage_failures).unwrap_or(0),
                    containment_failures: rep
                        .as_ref()
                        .map(|r| r.containment_failures)
                        .unwrap_or(0),
                    halfdim_lower_scale: (1.0 / eps).powf(n / 2.0),
                    wall_ms: if timings {
                        t0.elapsed().as_secs_f64() * 1e3
                    } else {
                        0.0
                    },
                    status: "ok".into(),
                });
            }
            Err(Error::BudgetExceeded(msg)) => rows.push(CoverRow {
                eps_requested: eps,
                eps_effective: eps,
                pieces: None,
                raw_count: None,
                validation_margin: Real::NAN,
                coverage_failures: 0,
                containment_failures: 0,
                halfdim_lower_scale: (1.0 / eps).powf(n / 2.0),
                wall_ms: 0.0,
                status: format!("budget-exceeded: {msg}"),
            }),
            Err(e) => return Err(e),
        }
    }
    let pts: Vec<(Real, Real)> = rows
        .iter()
        .filter_map(|r| {
            r.pieces
                .map(|c| ((1.0 / r.eps_requested).ln(), (c as Real).ln()))
        })
        .collect();
    let slope = fit_slope(&pts);
    Ok(CoverReport { rows, slope })
}

/// Least-squares slope of y against x.
pub fn fit_slope(pts: &[(Real, Real)]) -> Option<Real> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as Real;
    let mx = pts.iter().map(|p| p.0).sum::<Real>() / n;
    let my = pts.iter().map(|p| p.1).sum::<Real>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in pts {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    if den <= 0.0 {
        None
    } else {
        Some(num / den)
    }
}

pub fn cover_rows_to_csv(rows: &[CoverRow], slope: Option<Real>) -> String {
    let mut out = String::from(
        "eps_requested,eps_effective,pieces,raw_count,validation_margin,coverage_failures,containment_failures,halfdim_lower_scale,wall_ms,status\r\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\r\n",
            r.eps_requested,
            r.eps_effective,
            r.pieces.map(|v| v.to_string()).unwrap_or_default(),
            r.raw_count.map(|v| v.to_string()).unwrap_or_default(),
            r.validation_margin,
            r.coverage_failures,
            r.containment_failures,
            r.halfdim_lower_scale,
            r.wall_ms,
            io::csv_field(&r.status),
        ));
    }
    if let Some(s) = slope {
        out.push_str(&format!("# loglog_slope,{s}\r\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gen_instance_deterministic_and_full_rank() {
        let norm = NormBody::lp(3, 2.0).unwrap();
        let a = gen_instance(3, &norm, 7, 5);
        let b = gen_instance(3, &norm, 7, 5);
        assert_eq!(a.lattice.basis(), b.lattice.basis());
        assert_eq!(a.target, b.target);
        assert!(!a.lattice.det().eq(&Int::from(0)));
        // byte-identical serialized output
        let ja = io::instance_to_json(&a, Some(7)).unwrap();
        let jb = io::instance_to_json(&b, Some(7)).unwrap();
        assert_eq!(
            serde_json::to_string(&ja).unwrap(),
            serde_json::to_string(&jb).unwrap()
        );
    }

    #[test]
    fn target_lies_in_fundamental_parallelepiped() {
        let norm = NormBody::lp(3, 2.0).unwrap();
        for seed in 0..10 {
            let inst = gen_instance(3, &norm, seed, 4);
            let red = inst.lattice.reduce_mod(&inst.target.coords);
            for (a, b) in red.iter().zip(&inst.target.coords) {
                assert_eq!(a, b, "target not reduced");
            }
        }
    }

    #[test]
    fn exact_method_all_ratios_one() {
        let cfg = ExperimentConfig {
            method: Method::Exact,
            norm: NormBody::lp(2, 2.0).unwrap(),
            epsilon: 0.25,
            dimension: 2,
            seed: 11,
            count: 8,
            entry_bound: 4,
            budgets: Budgets::default(),
            test_mode: true,
            timings: false,
        };
        let out = run_experiment(&cfg).unwrap();
        assert!(out.all_ok);
        for r in &out.rows {
            assert_eq!(r.ratio, Some(1.0));
            assert_eq!(r.wall_ms, 0.0);
        }
    }

    #[test]
    fn boost_det_experiment_within_bound() {
        let cfg = ExperimentConfig {
            method: Method::BoostDet,
            norm: NormBody::lp(3, 3.0).unwrap(),
            epsilon: 0.25,
            dimension: 3,
            seed: 5,
            count: 10,
            entry_bound: 4,
            budgets: Budgets::default(),
            test_mode: true,
            timings: false,
        };
        let out = run_experiment(&cfg).unwrap();
        assert!(out.all_ok, "{:?}", out.rows.iter().map(|r| &r.status).collect::<Vec<_>>());
        let max_ratio = out
            .rows
            .iter()
            .filter_map(|r| r.ratio)
            .fold(0.0, Real::max);
        assert!(max_ratio <= 1.0 + 7.0 * 0.25 + 1e-7);
    }

    #[test]
    fn sparsify_experiment_within_bound() {
        let cfg = ExperimentConfig {
            method: Method::Sparsify,
            norm: NormBody::lp(2, 2.0).unwrap(),
            epsilon: 0.25,
            dimension: 2,
            seed: 23,
            count: 6,
            entry_bound: 4,
            budgets: Budgets::default(),
            test_mode: true,
            timings: false,
        };
        let out = run_experiment(&cfg).unwrap();
        assert!(out.all_ok);
        for r in &out.rows {
            if let Some(ratio) = r.ratio {
                assert!(ratio <= 1.25 + 1e-7);
            }
        }
    }

    #[test]
    fn experiment_csv_deterministic() {
        let cfg = ExperimentConfig {
            method: Method::Exact,
            norm: NormBody::lp(2, 1.0).unwrap(),
            epsilon: 0.5,
            dimension: 2,
            seed: 3,
            count: 4,
            entry_bound: 3,
            budgets: Budgets::default(),
            test_mode: true,
            timings: false,
        };
        let a = rows_to_csv(&run_experiment(&cfg).unwrap().rows);
        let b = rows_to_csv(&run_experiment(&cfg).unwrap().rows);
        assert_eq!(a, b);
        assert!(a.starts_with("instance_id,"));
    }

    #[test]
    fn zonotope_cover_report_counts() {
        // unit square as a zonotope: counts (2k)^2 pre-dedup on the eps grid
        let gens = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let norm = NormBody::zonotope(gens).unwrap();
        let rep = cover_report(
            &norm,
            Construction::Zonotope,
            &[1.0 / 3.0, 1.0 / 7.0, 1.0 / 15.0],
            500,
            false,
        )
        .unwrap();
        let raw: Vec<u128> = rep.rows.iter().map(|r| r.raw_count.unwrap()).collect();
        assert_eq!(raw, vec![16, 36, 64]); // (2k)^m for k = 2, 3, 4
        for r in &rep.rows {
            assert_eq!(r.coverage_failures, 0);
            assert_eq!(r.containment_failures, 0);
        }
    }

    #[test]
    fn smooth_slope_flatter_than_grid_slope() {
        let norm = NormBody::lp(2, 2.0).unwrap();
        let grid_eps = [0.2, 0.1, 0.05, 0.025];
        let smooth = cover_report(&norm, Construction::Smooth, &grid_eps, 0, false).unwrap();
        let grid = cover_report(&norm, Construction::Grid, &grid_eps, 0, false).unwrap();
        let s = smooth.slope.unwrap();
        let g = grid.slope.unwrap();
        assert!(s >= 0.5 && s <= 2.0, "smooth slope {s}");
        assert!(s < g, "smooth {s} not flatter than grid {g}");
    }
}
