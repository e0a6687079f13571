//! Real-axis work: eigenvalue bisection on z = -lambda, the eigenvalue-free
//! window below threshold, and the scan of the positive axis.
//!
//! Bisection runs in u = ln(lambda). For d = 2 that keeps the near-threshold
//! eigenvalue (lambda ~ exp(-4 pi |c| / eps)) and the runaway eigenvalue
//! (lambda ~ exp(4 pi a / eps^2)) inside reach even when lambda itself is not
//! a finite f64.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{relative_residual, Method, Regime, SignClass, Singularity, SingularityKind};
use crate::dispersion::{decoupled_eigenvalue, dispersion, dispersion_scale, Branches, ModelParams};
use crate::error::{Error, Result};
use crate::riemann::{Dimension, Sheet, A};

const MAX_BISECTIONS: usize = 4000;

/// Width in u of the lower part of brackets whose left end is "just above 0".
const LOG_BRACKET_DEPTH: f64 = 100.0;

fn d_on_axis(params: &ModelParams, u: f64) -> f64 {
    dispersion(params, &Branches::negative_axis(u)).re
}

/// ln(lambda_a) for d = 2: where theta1 + P g(-lambda) changes sign and the
/// real-axis equation, solved for the (z - 1)-branch, has a pole.
pub fn vertical_asymptote_ln(params: &ModelParams) -> Option<f64> {
    if params.d != Dimension::Two {
        return None;
    }
    let p = params.p_factor();
    if p == 0.0 {
        return None;
    }
    Some(4.0 * PI * (1.0 / A - params.theta1_eps() / p))
}

/// Bisection for D_eps(-lambda) = 0 on (lambda_lo, lambda_hi).
pub fn eigenvalue_bisection(params: &ModelParams, bracket: (f64, f64), tol: f64) -> Result<Singularity> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Bracket { lo, hi });
    }
    eigenvalue_bisection_log(params, (lo.ln(), hi.ln()), tol)
}

/// Bisection in u = ln(lambda) on (u_lo, u_hi); `tol` bounds the relative
/// width of the final lambda interval.
pub fn eigenvalue_bisection_log(params: &ModelParams, bracket: (f64, f64), tol: f64) -> Result<Singularity> {
    params.validate()?;
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) {
        return Err(Error::Bracket {
            lo: lo.exp(),
            hi: hi.exp(),
        });
    }
    let asymptote = vertical_asymptote_ln(params);
    if let Some(ua) = asymptote {
        if lo < ua && ua < hi {
            return Err(Error::SplitBracket {
                lo: lo.exp(),
                hi: hi.exp(),
                asymptote: ua.exp(),
            });
        }
    }
    let mut f_lo = d_on_axis(params, lo);
    let f_hi = d_on_axis(params, hi);
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo * f_hi > 0.0 {
        return Err(Error::Bracket {
            lo: lo.exp(),
            hi: hi.exp(),
        });
    }
    let mut root = if f_lo == 0.0 {
        Some(lo)
    } else if f_hi == 0.0 {
        Some(hi)
    } else {
        None
    };
    let mut n = 0;
    while root.is_none() && n < MAX_BISECTIONS {
        n += 1;
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= tol {
            break;
        }
        let f = d_on_axis(params, mid);
        if f == 0.0 {
            root = Some(mid);
        } else if (f < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f;
        } else {
            hi = mid;
        }
    }
    let u = root.unwrap_or(0.5 * (lo + hi));
    let lambda = u.exp();
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Range {
            ln_lambda: u,
            ln_lambda_a: asymptote.unwrap_or(f64::NAN),
        });
    }
    let br = Branches::negative_axis(u);
    Ok(Singularity {
        kind: SingularityKind::IsolatedEigenvalue,
        location: Complex64::new(-lambda, 0.0),
        sheet: Sheet::Physical,
        method: Method::Bisection,
        residual: relative_residual(params, &br),
    })
}

/// Bracket (in ln lambda) for the eigenvalue that approaches the threshold,
/// taken from the interval analysis of each regime.
pub fn eigenvalue_bracket(params: &ModelParams, regime: &Regime) -> Result<(f64, f64)> {
    let bb = params.coupling_sq();
    let ce = params.c * params.epsilon;
    let th0 = params.theta0;
    let unsupported = || Err(Error::Unsupported(format!("{regime} has no eigenvalue approaching 0")));
    if bb == 0.0 && regime.cell() != 7 {
        return unsupported();
    }
    match (regime.cell(), regime.theta0_class) {
        // 2 sqrt(lambda) (2(sqrt(1 + lambda) - 1) + |c| eps) = b^2 eps^2
        (2, _) if params.d == Dimension::One => {
            let hi = (bb * bb / (4.0 * ce * ce)).ln();
            Ok((hi - LOG_BRACKET_DEPTH, hi))
        }
        // theta1 - b^2 eps^2 g(-lambda) > a on the root. The leading-order
        // root sits within rounding of 4 pi (1/a - |c| eps / (b eps)^2), so
        // the bracket extends one unit past it; the asymptote is far above.
        (2, _) => {
            let hi = 4.0 * PI * (1.0 / A - ce.abs() / bb);
            Ok((hi - LOG_BRACKET_DEPTH, hi + 1.0))
        }
        // 4 (sqrt(1 + lambda) - 1) sqrt(lambda) ~ 2 lambda^{3/2} = b^2 eps^2
        (4, SignClass::Zero) => {
            let l0 = (0.5 * bb).powf(2.0 / 3.0);
            Ok(((0.5 * l0).ln(), (2.0 * l0).ln()))
        }
        // |theta0| lambda ~ b^2 eps^2
        (4, SignClass::Negative) => {
            let l0 = bb / th0.abs();
            Ok(((0.25 * l0).ln(), (4.0 * l0).ln()))
        }
        (5, SignClass::Zero) => {
            let hi = ((4.0 * PI / A).exp() - 1.0).ln();
            Ok((hi - LOG_BRACKET_DEPTH, hi))
        }
        (5, SignClass::Negative) => {
            let hi = (4.0 * PI * bb / (A * (A * th0.abs() + bb))).exp_m1().ln();
            Ok((hi - LOG_BRACKET_DEPTH, hi))
        }
        // the b = 0 eigenvalue moves by O(eps^{3/2}) at most
        (7, _) => {
            let l0 = -decoupled_eigenvalue(params);
            Ok(((0.5 * l0).ln(), (2.0 * l0).ln()))
        }
        _ => unsupported(),
    }
}

/// The d = 2 eigenvalue beyond the vertical asymptote, which runs off to
/// -infinity as eps -> 0. Returns a range error carrying ln(lambda) and
/// ln(lambda_a) once -E leaves the f64 range.
pub fn deep_eigenvalue_search(params: &ModelParams) -> Result<Singularity> {
    params.validate()?;
    let regime = Regime::classify(params);
    if !regime.has_runaway_eigenvalue() {
        return Err(Error::Unsupported(format!("{regime} has no runaway eigenvalue")));
    }
    let ua = vertical_asymptote_ln(params)
        .ok_or_else(|| Error::Unsupported("vertical asymptote undefined for P = 0".into()))?;
    // D(-lambda_a) = -b^2 eps^2 and D grows like ln(lambda)^2 beyond it
    let lo = ua;
    let mut width = 4.0 * PI / A;
    let mut hi = lo + width;
    while d_on_axis(params, hi) <= 0.0 {
        width *= 2.0;
        hi = lo + width;
        if width > 1e6 {
            return Err(Error::Bracket {
                lo: lo.exp(),
                hi: hi.exp(),
            });
        }
    }
    // D is finite at ua itself, and the root can sit within O(1) of ua
    // while ua is of order 1e12, so the bracket starts exactly there.
    eigenvalue_bisection_log(params, (lo, hi), 1e-15)
}

/// Sign scan of D_eps(-lambda) for lambda in (C 1e-12, C).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueWindow {
    /// Upper end C of the window (-C, 0).
    pub bound: f64,
    pub samples: usize,
    pub sign_changes: usize,
    /// Smallest |D_eps| relative to the size of its terms.
    pub min_relative: f64,
}

impl EigenvalueWindow {
    pub fn is_empty(&self) -> bool {
        self.sign_changes == 0
    }
}

/// Default C: half the distance to the nearest far-away root of the
/// unperturbed problem (or the d = 2 asymptote), 1/2 when there is none.
pub(crate) fn window_bound(params: &ModelParams) -> f64 {
    let th0 = params.theta0;
    let c = match params.d {
        Dimension::One if th0 > 0.0 => th0 * th0 / 4.0,
        Dimension::Two if th0 != 0.0 => {
            let unperturbed = (4.0 * PI * (1.0 / A - 1.0 / th0)).exp();
            match vertical_asymptote_ln(params) {
                Some(ua) => unperturbed.min(ua.exp()),
                None => unperturbed,
            }
        }
        Dimension::Three if th0 < 0.0 => (4.0 * PI / th0).powi(2),
        _ => 1.0,
    };
    0.5 * c
}

pub fn eigenvalue_window(params: &ModelParams, samples: usize) -> Result<EigenvalueWindow> {
    params.validate()?;
    let samples = samples.max(16);
    let bound = window_bound(params);
    let top = bound.ln();
    let bottom = top - 12.0 * std::f64::consts::LN_10;
    let mut sign_changes = 0;
    let mut min_relative = f64::INFINITY;
    let mut prev: Option<f64> = None;
    for k in 0..samples {
        let u = bottom + (top - bottom) * k as f64 / (samples - 1) as f64;
        let br = Branches::negative_axis(u);
        let d = dispersion(params, &br).re;
        min_relative = min_relative.min(d.abs() / dispersion_scale(params, &br));
        if let Some(p) = prev {
            if (p < 0.0) != (d < 0.0) {
                sign_changes += 1;
            }
        }
        prev = Some(d);
    }
    Ok(EigenvalueWindow {
        bound,
        samples,
        sign_changes,
        min_relative,
    })
}

/// |D_eps| over positive energies, both boundary values of the cut.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisScan {
    pub minimum: f64,
    pub median: f64,
    pub argmin: f64,
    pub points: usize,
}

pub fn positive_axis_scan(params: &ModelParams, grid: &[f64]) -> Result<AxisScan> {
    params.validate()?;
    let mut values = Vec::with_capacity(grid.len());
    let mut minimum = f64::INFINITY;
    let mut argmin = f64::NAN;
    for &lambda in grid {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!("scan point {lambda} is not a positive energy")));
        }
        let above = dispersion(params, &Branches::positive_axis(lambda, true)).norm();
        let below = dispersion(params, &Branches::positive_axis(lambda, false)).norm();
        let m = above.min(below);
        if m < minimum {
            minimum = m;
            argmin = lambda;
        }
        values.push(m);
    }
    if values.is_empty() {
        return Err(Error::Domain("empty scan grid".into()));
    }
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    let median = if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    };
    Ok(AxisScan {
        minimum,
        median,
        argmin,
        points: n,
    })
}
