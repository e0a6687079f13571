//! Fixed-point recursions for the resonance pole.
//!
//! Each map is D_eps(z) = 0 solved for the (z - 1)-branch, which is analytic
//! near the origin, and iterated with sqrt z, ln z on the unphysical sheet.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{relative_residual, IterationTrace, Method, Regime, Singularity, SingularityKind};
use super::{DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::dispersion::{dispersion, Branches, ModelParams};
use crate::error::{Error, Result};
use crate::riemann::{self, sheet_sqrt, Dimension, Sheet, SheetPoint, A, I};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedPointOptions {
    /// Stop once |z(k+1) - z(k)| <= tol |z(k+1)|.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        FixedPointOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

fn is_zero(z: Complex64) -> bool {
    z.re == 0.0 && z.im == 0.0
}

fn sqrt_unphysical(z: Complex64) -> Result<Complex64> {
    if is_zero(z) {
        Ok(z)
    } else {
        sheet_sqrt(SheetPoint::unphysical(z))
    }
}

/// exp(w) - 1 without cancellation for small w.
fn expm1(w: Complex64) -> Complex64 {
    let half = (0.5 * w.im).sin();
    Complex64::new(w.re.exp_m1() * w.im.cos() - 2.0 * half * half, w.re.exp() * w.im.sin())
}

fn step(params: &ModelParams, z: Complex64) -> Result<Complex64> {
    let bb = params.coupling_sq();
    let ce = params.c * params.epsilon;
    let th0 = params.theta0;
    match params.d {
        Dimension::One => {
            // 1 + i sqrt(z - 1) = u, so z = 1 - (1 - u)^2
            let s = sqrt_unphysical(z)?;
            let u = -0.5 * ce + bb / (2.0 * (th0 + 2.0 * I * s));
            Ok(u * (2.0 - u))
        }
        Dimension::Two => {
            // ln(1 - z) = r(z), so z = -expm1(r)
            let p = params.p_factor();
            let r = if is_zero(z) {
                Complex64::new(4.0 * PI * (th0 * ce - bb) / (A * p), 0.0)
            } else {
                let g = riemann::g_function(SheetPoint::unphysical(z))?;
                4.0 * PI * (ce + (th0 * ce - bb) * g) / (A * (params.theta1_eps() + p * g))
            };
            Ok(-expm1(r))
        }
        Dimension::Three => {
            // alpha^2 (1 - z) = (1 + w)^2 with w = k sqrt(z) sqrt(z - 1) / U
            let alpha = params.alpha3();
            let s = sqrt_unphysical(z)?;
            let w = if is_zero(s) {
                Complex64::new(0.0, 0.0)
            } else {
                let t = sheet_sqrt(SheetPoint::physical(z - 1.0))?;
                let u = 1.0 - I * th0 / (4.0 * PI) * s;
                bb / (16.0 * PI * PI) * s * t / u
            };
            let am1 = -ce / (4.0 * PI);
            Ok((am1 - w) * (alpha + 1.0 + w) / (alpha * alpha))
        }
    }
}

fn seed(params: &ModelParams, regime: &Regime) -> Complex64 {
    let ce = params.c * params.epsilon;
    let th0_zero = params.theta0 == 0.0;
    let z = match (params.d, th0_zero) {
        // theta0 + 2i sqrt(z) vanishes at z = 0
        (Dimension::One, true) => ce.abs(),
        // the z = 0 limit of r(z) is 4 pi / a, far from the pole
        (Dimension::Two, true) => 4.0 * PI * ce.abs() / (A * A),
        _ => 0.0,
    };
    debug_assert!(regime.has_resonance());
    Complex64::new(z, 0.0)
}

/// Iterates the regime's recursion from its seed until the relative step
/// drops below `opts.tol`. The pole is returned with sqrt z, ln z on sheet -1
/// and sqrt(z - 1) on sheet 0.
pub fn resonance_fixed_point(
    params: &ModelParams,
    regime: &Regime,
    opts: &FixedPointOptions,
) -> Result<(Singularity, IterationTrace)> {
    params.validate()?;
    if !regime.has_resonance() {
        return Err(Error::Unsupported(format!(
            "{regime} has no resonance near the threshold"
        )));
    }
    if params.epsilon <= 0.0 {
        return Err(Error::Unsupported(
            "eps = 0 has a threshold eigenvalue, not a resonance".into(),
        ));
    }
    let mut trace = IterationTrace::default();
    let mut z = seed(params, regime);
    trace.iterates.push(z);
    let mut last_step = f64::NAN;
    for _ in 0..opts.max_iter {
        let next = step(params, z)?;
        if !(next.re.is_finite() && next.im.is_finite()) {
            break;
        }
        let delta = (next - z).norm();
        if last_step.is_finite() && last_step > 0.0 {
            trace.ratios.push(delta / last_step);
        }
        trace.iterates.push(next);
        last_step = delta;
        z = next;
        if delta <= opts.tol * z.norm() {
            trace.converged = true;
            break;
        }
    }
    let point = SheetPoint::unphysical(z);
    let br = Branches::new(point, Sheet::Physical)?;
    trace.final_residual = dispersion(params, &br).norm();
    if !trace.converged {
        return Err(Error::FixedPointNoConvergence { trace: Box::new(trace) });
    }
    let sing = Singularity {
        kind: SingularityKind::Resonance,
        location: z,
        sheet: Sheet::Unphysical,
        method: Method::FixedPoint,
        residual: relative_residual(params, &br),
    };
    Ok((sing, trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(d: Dimension, th0: f64, c: f64, eps: f64) -> (Singularity, IterationTrace) {
        let p = ModelParams::new(d, th0, c, eps);
        resonance_fixed_point(&p, &Regime::classify(&p), &FixedPointOptions::default()).unwrap()
    }

    #[test]
    fn cell1_d1_leading_terms() {
        let eps: f64 = 1e-3;
        let (s, trace) = solve(Dimension::One, 1.0, -1.0, eps);
        assert!(trace.converged);
        let lead = Complex64::new(eps + 0.75 * eps * eps, -2.0 * eps.powf(2.5));
        // remainder is O(eps^3) in practice
        assert!((s.location - lead).norm() < 10.0 * eps.powi(3));
        assert!(s.location.im < 0.0);
        assert!(s.residual < 1e-14);
    }

    #[test]
    fn cell3_small_eps() {
        let eps: f64 = 1e-3;
        let c = -2.0 * PI;
        let (s, _) = solve(Dimension::Three, 0.0, c, eps);
        assert!((s.location.re - 1e-3).abs() < 1e-5);
        let im = -(1.0 / (8.0 * PI * PI)) * (c.abs() / (2.0 * PI)).sqrt() * eps.powf(2.5);
        assert!((s.location.im - im).abs() < 0.05 * im.abs());
    }

    #[test]
    fn every_resonant_cell_converges() {
        for &(d, th0, c) in &[
            (Dimension::One, 1.0, -1.0),
            (Dimension::One, -1.0, -1.0),
            (Dimension::One, 0.0, -1.0),
            (Dimension::One, 1.0, 0.0),
            (Dimension::Two, A, -1.0),
            (Dimension::Two, -A, -1.0),
            (Dimension::Two, 0.0, -1.0),
            (Dimension::Two, A, 0.0),
            (Dimension::Three, 1.0, -1.0),
        ] {
            for eps in [1e-2, 1e-4] {
                let (s, t) = solve(d, th0, c, eps);
                assert!(t.converged);
                assert!(
                    s.location.im < 0.0 && s.location.re > 0.0,
                    "d={d} th0={th0} c={c} {}",
                    s.location
                );
                assert!(s.residual < 1e-12, "d={d} th0={th0} c={c} residual {}", s.residual);
            }
        }
    }

    #[test]
    fn regime_without_resonance_is_rejected() {
        let p = ModelParams::new(Dimension::One, 0.0, 1.0, 0.01);
        let r = resonance_fixed_point(&p, &Regime::classify(&p), &FixedPointOptions::default());
        assert!(matches!(r, Err(Error::Unsupported(_))));
    }

    #[test]
    fn iteration_cap_reports_trace() {
        let p = ModelParams::new(Dimension::One, 1.0, -1.0, 1e-2);
        let opts = FixedPointOptions {
            tol: 1e-12,
            max_iter: 2,
        };
        match resonance_fixed_point(&p, &Regime::classify(&p), &opts) {
            Err(Error::FixedPointNoConvergence { trace }) => assert_eq!(trace.iterates.len(), 3),
            other => panic!("unexpected {other:?}"),
        }
    }
}
