//! The five subcommands as library calls returning serializable records.

use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::asymptotics::{fit_remainder_order, leading_order, ExpansionResult, OrderFit, Part, Quantity};
use crate::dispersion::{dispersion, resolvent_correction_kernel, Branches, Channel, ModelParams};
use crate::error::{Error, Result};
use crate::riemann::SheetPoint;
use crate::rootfinder::{
    locate_singularities, positive_axis_scan, AxisScan, EigenvalueWindow, Regime, Singularity, SingularityKind,
    SolveOptions,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const THREADS_ENV: &str = "RESONANCE_SOLVER_THREADS";

/// The (d, sign c, theta0 class) cell for `params`.
pub fn classify_regime(params: &ModelParams) -> Regime {
    Regime::classify(params)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeInfo {
    pub cell: u8,
    pub label: String,
    #[serde(flatten)]
    pub regime: Regime,
}

impl From<Regime> for RegimeInfo {
    fn from(regime: Regime) -> Self {
        RegimeInfo {
            cell: regime.cell(),
            label: regime.to_string(),
            regime,
        }
    }
}

/// One ladder point of `verify`: the numerical singularity and the expansion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderPoint {
    pub epsilon: f64,
    #[serde(with = "crate::riemann::complex_serde")]
    pub numeric: Complex64,
    #[serde(with = "crate::riemann::complex_serde")]
    pub expansion: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    /// Key/value echo of the configuration; feeding it back reruns the record.
    pub config: BTreeMap<String, String>,
    pub epsilon: f64,
    pub regime: RegimeInfo,
    pub singularities: Vec<Singularity>,
    pub expansion: Option<ExpansionResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ladder: Vec<LadderPoint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fit: Vec<OrderFit>,
    pub window: Option<EigenvalueWindow>,
    pub notes: Vec<String>,
    pub error: Option<String>,
    pub wall_time_s: f64,
    pub version: String,
}

impl ResultRecord {
    fn new(cfg: &RunConfig) -> Self {
        ResultRecord {
            config: cfg.echo(),
            epsilon: cfg.params.epsilon,
            regime: classify_regime(&cfg.params).into(),
            singularities: Vec::new(),
            expansion: None,
            ladder: Vec::new(),
            fit: Vec::new(),
            window: None,
            notes: Vec::new(),
            error: None,
            wall_time_s: 0.0,
            version: VERSION.to_string(),
        }
    }

    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

fn solve_options(cfg: &RunConfig) -> SolveOptions {
    SolveOptions {
        tol: cfg.tol,
        max_iter: cfg.max_iter,
    }
}

fn expansion_for(params: &ModelParams, regime: &Regime) -> Option<ExpansionResult> {
    leading_order(params, regime).ok()
}

/// Every singularity for one parameter point. Solver failures are recorded
/// in `error`; configuration problems are returned as errors.
pub fn run_solve(cfg: &RunConfig) -> Result<ResultRecord> {
    let params = cfg.point_params()?;
    if params.epsilon <= 0.0 {
        return Err(Error::InvalidConfig("solve needs epsilon > 0".into()));
    }
    let start = Instant::now();
    let mut rec = ResultRecord::new(cfg);
    let regime = classify_regime(&params);
    rec.expansion = expansion_for(&params, &regime);
    match locate_singularities(&params, &solve_options(cfg)) {
        Ok(report) => {
            rec.singularities = report.singularities;
            rec.window = report.window;
            rec.notes = report.notes;
            if let Some(w) = &rec.window {
                rec.notes.push(if w.is_empty() {
                    format!("no isolated eigenvalue in (-{:e}, 0)", w.bound)
                } else {
                    format!("{} sign changes of D_eps in (-{:e}, 0)", w.sign_changes, w.bound)
                });
            }
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec.wall_time_s = start.elapsed().as_secs_f64();
    Ok(rec)
}

/// Thread count from RESONANCE_SOLVER_THREADS; 0 or unset lets rayon decide.
pub fn thread_count() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("{THREADS_ENV} must be a non-negative integer, got {v:?}"))),
    }
}

/// `run_solve` at each ladder point, in ladder order.
pub fn run_sweep(cfg: &RunConfig) -> Result<Vec<ResultRecord>> {
    let ladder = cfg.ladder()?.to_vec();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count()?)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    pool.install(|| ladder.par_iter().map(|&eps| run_solve(&cfg.at_epsilon(eps))).collect())
}

/// |D_eps| on both edges of the cut at one grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub lambda: f64,
    pub abs_d_upper: f64,
    pub abs_d_lower: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub config: BTreeMap<String, String>,
    pub regime: RegimeInfo,
    pub summary: AxisScan,
    pub points: Vec<ScanPoint>,
    pub version: String,
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

/// |D_eps(lambda +- i0)| on a log grid over [scan_min, scan_max].
pub fn run_scan(cfg: &RunConfig) -> Result<ScanReport> {
    let params = cfg.point_params()?;
    let grid = log_grid(cfg.scan_min, cfg.scan_max, cfg.grid_n);
    let summary = positive_axis_scan(&params, &grid)?;
    let points = grid
        .iter()
        .map(|&lambda| ScanPoint {
            lambda,
            abs_d_upper: dispersion(&params, &Branches::positive_axis(lambda, true)).norm(),
            abs_d_lower: dispersion(&params, &Branches::positive_axis(lambda, false)).norm(),
        })
        .collect();
    Ok(ScanReport {
        config: cfg.echo(),
        regime: classify_regime(&params).into(),
        summary,
        points,
        version: VERSION.to_string(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelPoint {
    pub x: f64,
    pub x_prime: f64,
    pub i: usize,
    pub j: usize,
    #[serde(with = "crate::riemann::complex_serde")]
    pub value: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelGrid {
    pub config: BTreeMap<String, String>,
    #[serde(with = "crate::riemann::complex_serde")]
    pub energy: Complex64,
    pub points: Vec<KernelPoint>,
    pub version: String,
}

/// The resolvent correction kernel at the configured energy on a
/// grid_n x grid_n grid of |x|, |x'| in [scan_min, scan_max], all four
/// channel pairs.
pub fn run_kernel(cfg: &RunConfig) -> Result<KernelGrid> {
    let params = cfg.point_params()?;
    let n = cfg.grid_n;
    let xs: Vec<f64> = (0..n)
        .map(|k| cfg.scan_min + (cfg.scan_max - cfg.scan_min) * k as f64 / (n - 1) as f64)
        .collect();
    let z = SheetPoint::physical(cfg.energy);
    let mut points = Vec::with_capacity(4 * n * n);
    for i in 0..2 {
        for j in 0..2 {
            let (ci, cj) = (Channel::from_index(i)?, Channel::from_index(j)?);
            for &x in &xs {
                for &xp in &xs {
                    let value = resolvent_correction_kernel(&params, z, x, xp, ci, cj)?;
                    points.push(KernelPoint {
                        x,
                        x_prime: xp,
                        i,
                        j,
                        value,
                    });
                }
            }
        }
    }
    Ok(KernelGrid {
        config: cfg.echo(),
        energy: cfg.energy,
        points,
        version: VERSION.to_string(),
    })
}

fn primary_value(quantity: Quantity, singularities: &[Singularity]) -> Option<Complex64> {
    let kind = match quantity {
        Quantity::Resonance => SingularityKind::Resonance,
        Quantity::Eigenvalue => SingularityKind::IsolatedEigenvalue,
    };
    singularities
        .iter()
        .filter(|s| s.kind == kind && (kind == SingularityKind::Resonance || s.location.im == 0.0))
        .min_by(|a, b| a.location.norm().total_cmp(&b.location.norm()))
        .map(|s| s.location)
}

/// Solves along the ladder and fits the remainder of the regime's expansion.
/// Real and imaginary parts are fitted separately when stated separately.
pub fn run_verify(cfg: &RunConfig) -> Result<ResultRecord> {
    let ladder = cfg.ladder()?.to_vec();
    let start = Instant::now();
    let mut rec = ResultRecord::new(cfg);
    let params = cfg.params.with_epsilon(ladder[0]);
    let regime = classify_regime(&params);
    let expansion = match leading_order(&params, &regime) {
        Ok(e) => e,
        Err(e) => {
            rec.error = Some(e.to_string());
            return Ok(rec);
        }
    };
    let solves: Vec<ResultRecord> = run_sweep(cfg)?;
    let mut numeric = Vec::new();
    for (eps, s) in ladder.iter().zip(&solves) {
        if let Some(err) = &s.error {
            rec.error = Some(format!("eps = {eps:e}: {err}"));
            break;
        }
        match primary_value(expansion.quantity, &s.singularities) {
            Some(v) => {
                numeric.push((*eps, v));
                rec.ladder.push(LadderPoint {
                    epsilon: *eps,
                    numeric: v,
                    expansion: expansion.evaluate(*eps),
                });
            }
            None => {
                rec.error = Some(format!("eps = {eps:e}: no {:?} found", expansion.quantity));
                break;
            }
        }
    }
    if rec.error.is_none() {
        let mut parts = vec![Part::Modulus];
        if expansion.real_remainder.is_some() || expansion.imag_remainder.is_some() {
            parts.extend([Part::Real, Part::Imag]);
        }
        for part in parts {
            match fit_remainder_order(&numeric, &expansion, part) {
                Ok(f) => rec.fit.push(f),
                Err(e) => rec.notes.push(format!("{part:?} fit: {e}")),
            }
        }
        if rec.fit.is_empty() {
            rec.error = Some("no remainder fit possible".into());
        }
    }
    rec.expansion = Some(expansion);
    rec.wall_time_s = start.elapsed().as_secs_f64();
    Ok(rec)
}
