//! Locating eigenvalues, resonances and zero-energy resonances near z = 0.

mod fixed_point;
mod newton;
mod real_axis;
mod threshold;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dispersion::{dispersion, dispersion_scale, Branches, ModelParams};
use crate::error::{Error, Result};
use crate::riemann::{Dimension, Sheet};

pub use fixed_point::{resonance_fixed_point, FixedPointOptions};
pub use newton::{newton_oracle, root_cluster, NEWTON_MAX_ITER};
pub use real_axis::{
    deep_eigenvalue_search, eigenvalue_bisection, eigenvalue_bisection_log, eigenvalue_bracket, eigenvalue_window,
    positive_axis_scan, vertical_asymptote_ln, AxisScan, EigenvalueWindow,
};
pub use threshold::{
    verify_resonant_state, zero_resonance_detector, LimitBehaviour, ResonanceCheck, ResonantState, ZeroResonance,
};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignClass {
    Negative,
    Zero,
    Positive,
}

impl SignClass {
    pub fn of(x: f64) -> SignClass {
        if x < 0.0 {
            SignClass::Negative
        } else if x > 0.0 {
            SignClass::Positive
        } else {
            SignClass::Zero
        }
    }
}

/// The (d, sign c, class of theta0) cell selecting one theorem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Regime {
    pub d: Dimension,
    pub c_sign: SignClass,
    pub theta0_class: SignClass,
}

impl Regime {
    pub fn classify(params: &ModelParams) -> Regime {
        Regime {
            d: params.d,
            c_sign: SignClass::of(params.c),
            theta0_class: SignClass::of(params.theta0),
        }
    }

    pub fn cell(&self) -> u8 {
        use SignClass::*;
        match (self.c_sign, self.d) {
            (Negative, Dimension::Three) => 3,
            (Negative, _) if self.theta0_class == Zero => 2,
            (Negative, _) => 1,
            (Zero, Dimension::One) => 4,
            (Zero, Dimension::Two) => 5,
            (Zero, Dimension::Three) => 6,
            (Positive, _) => 7,
        }
    }

    /// A resonance pole sits near the origin on the unphysical sheet.
    pub fn has_resonance(&self) -> bool {
        match self.cell() {
            1 | 2 | 3 => true,
            4 | 5 => self.theta0_class == SignClass::Positive,
            _ => false,
        }
    }

    /// A negative eigenvalue approaches the threshold as eps -> 0.
    pub fn has_threshold_eigenvalue(&self) -> bool {
        match self.cell() {
            2 | 7 => true,
            4 | 5 => self.theta0_class != SignClass::Positive,
            _ => false,
        }
    }

    /// d = 2 regimes with the eigenvalue escaping to minus infinity.
    pub fn has_runaway_eigenvalue(&self) -> bool {
        self.d == Dimension::Two && self.theta0_class == SignClass::Zero && self.c_sign != SignClass::Positive
    }

    /// Regimes stating that (-C, 0) is free of eigenvalues.
    pub fn has_empty_window(&self) -> bool {
        self.has_resonance()
    }

    /// cell 4 with theta0 = 0: one eigenvalue and two resonances at the
    /// same distance from the origin.
    pub fn is_cluster(&self) -> bool {
        self.cell() == 4 && self.theta0_class == SignClass::Zero
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let th0 = match self.theta0_class {
            SignClass::Negative => "theta0 < 0",
            SignClass::Zero => "theta0 = 0",
            SignClass::Positive => "theta0 > 0",
        };
        let c = match self.c_sign {
            SignClass::Negative => "c < 0",
            SignClass::Zero => "c = 0",
            SignClass::Positive => "c > 0",
        };
        write!(f, "cell {} (d = {}, {}, {})", self.cell(), self.d, c, th0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularityKind {
    IsolatedEigenvalue,
    Resonance,
    ZeroEnergyResonance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    FixedPoint,
    Newton,
    Bisection,
    LimitDetector,
}

impl SingularityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SingularityKind::IsolatedEigenvalue => "isolated_eigenvalue",
            SingularityKind::Resonance => "resonance",
            SingularityKind::ZeroEnergyResonance => "zero_energy_resonance",
        }
    }
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::FixedPoint => "fixed_point",
            Method::Newton => "newton",
            Method::Bisection => "bisection",
            Method::LimitDetector => "limit_detector",
        }
    }
}

/// A located spectral feature. `residual` is |D_eps| at `location` divided
/// by the size of the products that make up D_eps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Singularity {
    pub kind: SingularityKind,
    #[serde(with = "crate::riemann::complex_serde")]
    pub location: Complex64,
    pub sheet: Sheet,
    pub method: Method,
    pub residual: f64,
}

/// Successive iterates of a fixed-point recursion.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    #[serde(with = "crate::riemann::complex_serde::vec")]
    pub iterates: Vec<Complex64>,
    /// |z(k+1) - z(k)| / |z(k) - z(k-1)|, one entry per step from the second on.
    pub ratios: Vec<f64>,
    pub converged: bool,
    pub final_residual: f64,
}

impl IterationTrace {
    /// Ratios whose denominator step is still well above rounding noise.
    pub fn resolved_ratios(&self) -> Vec<f64> {
        let z = self.iterates.last().map(|z| z.norm()).unwrap_or(0.0);
        self.iterates
            .windows(3)
            .filter(|w| (w[1] - w[0]).norm() > 1e-11 * z)
            .map(|w| (w[2] - w[1]).norm() / (w[1] - w[0]).norm())
            .collect()
    }
}

pub(crate) fn relative_residual(params: &ModelParams, br: &Branches) -> f64 {
    let scale = dispersion_scale(params, br);
    let d = dispersion(params, br).norm();
    if scale > 0.0 {
        d / scale
    } else {
        d
    }
}

/// All singularities near the threshold for one parameter point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub regime: Regime,
    pub singularities: Vec<Singularity>,
    pub trace: Option<IterationTrace>,
    pub window: Option<EigenvalueWindow>,
    pub notes: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

/// Runs every solver the regime calls for. Solver failures abort; a runaway
/// eigenvalue beyond the f64 range is reported as a note instead.
pub fn locate_singularities(params: &ModelParams, opts: &SolveOptions) -> Result<SolveReport> {
    params.validate()?;
    if params.epsilon <= 0.0 {
        return Err(Error::InvalidConfig("solving needs epsilon > 0".into()));
    }
    let regime = Regime::classify(params);
    let mut report = SolveReport {
        regime,
        singularities: Vec::new(),
        trace: None,
        window: None,
        notes: Vec::new(),
    };

    if regime.has_resonance() {
        let fp = FixedPointOptions {
            tol: opts.tol,
            max_iter: opts.max_iter,
        };
        let (s, trace) = resonance_fixed_point(params, &regime, &fp)?;
        report.singularities.push(s);
        report.trace = Some(trace);
    }
    if regime.is_cluster() {
        let radius = 4.0 * params.coupling_sq().powf(2.0 / 3.0) + 1e-300;
        report.singularities.extend(root_cluster(params, radius)?);
    } else if regime.has_threshold_eigenvalue() {
        let bracket = eigenvalue_bracket(params, &regime)?;
        match eigenvalue_bisection_log(params, bracket, opts.tol.min(1e-14)) {
            Ok(s) => report.singularities.push(s),
            Err(Error::Range { ln_lambda, .. }) => report
                .notes
                .push(format!("threshold eigenvalue below f64 range: ln(-E) = {ln_lambda:.6}")),
            Err(e) => return Err(e),
        }
    }
    if regime.has_runaway_eigenvalue() {
        match deep_eigenvalue_search(params) {
            Ok(s) => report.singularities.push(s),
            Err(Error::Range { ln_lambda, ln_lambda_a }) => report.notes.push(format!(
                "runaway eigenvalue beyond f64 range: ln(-E) = {ln_lambda:.6}, ln(lambda_a) = {ln_lambda_a:.6}"
            )),
            Err(e) => return Err(e),
        }
    }
    if regime.cell() == 6 {
        let zr = zero_resonance_detector(params)?;
        if zr.present {
            report.singularities.push(Singularity {
                kind: SingularityKind::ZeroEnergyResonance,
                location: Complex64::new(0.0, 0.0),
                sheet: Sheet::Physical,
                method: Method::LimitDetector,
                residual: 0.0,
            });
            report.notes.push(format!(
                "D_eps(z)/sqrt(z) -> {} + {}i at z = 0",
                zr.coefficient.re, zr.coefficient.im
            ));
        }
    }
    if regime.has_empty_window() {
        report.window = Some(eigenvalue_window(params, 4000)?);
    }
    Ok(report)
}
