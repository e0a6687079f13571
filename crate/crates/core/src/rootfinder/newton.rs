//! Newton iteration on D_eps in the uniformizing variable s = sqrt(z).
//!
//! In s the two sheets of sqrt z become the upper and lower half-planes, so the
//! iteration can cross the cut [0, inf) without special handling and the
//! sheet of the result is read off from Im s.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{relative_residual, Method, Singularity, SingularityKind};
use crate::dispersion::{dispersion, dispersion_derivative, dispersion_scale, Branches, ModelParams};
use crate::error::{Error, Result};
use crate::riemann::{sheet_sqrt, Dimension, Sheet, SheetPoint};

pub const NEWTON_MAX_ITER: usize = 100;

/// Iterates leave the continuation region once |z| reaches this bound (the
/// branch point of sqrt(z - 1) sits at z = 1).
const ESCAPE_RADIUS: f64 = 1.0;

/// Relative residual at which the iterate is accepted whatever the step size.
const RESIDUAL_FLOOR: f64 = 4.0 * f64::EPSILON;

fn finish(params: &ModelParams, s: Complex64, sheets: (Sheet, Sheet)) -> Result<Singularity> {
    let br = Branches::from_sqrt(s, sheets.1)?;
    let sheet = sheet_of(s, sheets.0);
    let kind = if sheet == Sheet::Physical && (br.z.im.abs() <= 1e-10 * br.z.norm()) && br.z.re < 0.0 {
        SingularityKind::IsolatedEigenvalue
    } else {
        SingularityKind::Resonance
    };
    let location = if kind == SingularityKind::IsolatedEigenvalue {
        Complex64::new(br.z.re, 0.0)
    } else {
        br.z
    };
    Ok(Singularity {
        kind,
        location,
        sheet,
        method: Method::Newton,
        residual: relative_residual(params, &br),
    })
}

fn sheet_of(s: Complex64, requested: Sheet) -> Sheet {
    if s.im > 0.0 {
        Sheet::Physical
    } else if s.im < 0.0 {
        Sheet::Unphysical
    } else {
        requested
    }
}

/// Zero of D_eps reached by Newton from `seed`, with sqrt z starting on
/// `sheets.0` and sqrt(z - 1) fixed on `sheets.1`. Stops when the relative
/// step in z falls below `tol` or the relative residual reaches rounding level.
pub fn newton_oracle(params: &ModelParams, seed: Complex64, sheets: (Sheet, Sheet), tol: f64) -> Result<Singularity> {
    params.validate()?;
    let mut s = sheet_sqrt(SheetPoint::new(seed, sheets.0))?;
    let mut prev_dz = f64::INFINITY;
    for _ in 0..NEWTON_MAX_ITER {
        let br = Branches::from_sqrt(s, sheets.1)?;
        let f = dispersion(params, &br);
        let df = 2.0 * s * dispersion_derivative(params, &br);
        if !(df.re.is_finite() && df.im.is_finite())
            || df.norm() * s.norm() <= 64.0 * f64::EPSILON * dispersion_scale(params, &br)
        {
            return Err(Error::IllConditioned { z: br.z });
        }
        let next = s - f / df;
        if !(next.re.is_finite() && next.im.is_finite()) {
            return Err(Error::NewtonNoConvergence {
                seed,
                reason: "non-finite iterate".into(),
            });
        }
        let z_next = next * next;
        if z_next.norm() >= ESCAPE_RADIUS {
            return Err(Error::NewtonNoConvergence {
                seed,
                reason: format!("iterate {z_next} left |z| < {ESCAPE_RADIUS}"),
            });
        }
        let dz = (z_next - br.z).norm();
        s = next;
        if dz <= tol * z_next.norm() {
            return finish(params, s, sheets);
        }
        // At the rounding floor the step jitters instead of shrinking.
        if dz >= prev_dz && relative_residual(params, &Branches::from_sqrt(s, sheets.1)?) <= RESIDUAL_FLOOR {
            return finish(params, s, sheets);
        }
        prev_dz = dz;
    }
    Err(Error::NewtonNoConvergence {
        seed,
        reason: format!("no convergence in {NEWTON_MAX_ITER} steps"),
    })
}

/// The three roots near the origin for d = 1, theta0 = c = 0: the eigenvalue
/// on the negative axis and two resonances with arg z = -pi/3 and -5pi/3 on
/// sheet -1, all at |z| ~ (b eps)^{4/3} / 2^{2/3}.
///
/// Seeds come from the leading balance 4i sqrt(z) (1 + i sqrt(z - 1)) = b^2 eps^2,
/// i.e. sqrt(z)^3 = -i b^2 eps^2 / 2.
pub fn root_cluster(params: &ModelParams, radius: f64) -> Result<Vec<Singularity>> {
    params.validate()?;
    if params.d != Dimension::One || params.theta0 != 0.0 || params.c != 0.0 {
        return Err(Error::Unsupported("root cluster needs d = 1, theta0 = 0, c = 0".into()));
    }
    if params.coupling_sq() == 0.0 {
        return Err(Error::Unsupported("root cluster needs b eps != 0".into()));
    }
    let m = (0.5 * params.coupling_sq()).cbrt();
    let mut found = Vec::new();
    let mut complete = true;
    for phase in [PI / 2.0, -PI / 6.0, -5.0 * PI / 6.0] {
        let s0 = Complex64::from_polar(m, phase);
        let sheet = if s0.im > 0.0 {
            Sheet::Physical
        } else {
            Sheet::Unphysical
        };
        match newton_oracle(params, s0 * s0, (sheet, Sheet::Physical), 1e-14) {
            Ok(root) if root.location.norm() < radius && root.sheet == sheet => found.push(root),
            _ => complete = false,
        }
    }
    if !complete {
        return Err(Error::IncompleteCluster { found });
    }
    Ok(found)
}
