//! Zero-energy resonance in d = 3 with c = 0.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dispersion::{dispersion, dispersion_scale, Branches, ModelParams};
use crate::error::{Error, Result};
use crate::riemann::{Dimension, I};

/// Sample radii |z| for the limit along arg z = pi.
const RADII: [f64; 5] = [1e-4, 1e-5, 1e-6, 1e-7, 1e-8];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitBehaviour {
    /// D/sqrt(z) has a finite nonzero limit: z^{-1/2} singularity at 0.
    Finite,
    /// D/sqrt(z) -> 0: D vanishes at least linearly, the resolvent has a pole.
    Vanishing,
    /// D(0) != 0: no singularity at the threshold.
    Divergent,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroResonance {
    pub present: bool,
    #[serde(with = "crate::riemann::complex_serde")]
    pub coefficient: Complex64,
    pub behaviour: LimitBehaviour,
}

/// Richardson extrapolation to h = 0 removing the O(h) and O(h^2) terms,
/// for samples at h_k = h_0 q^k. Returns the estimate and the size of its
/// last correction.
fn richardson(values: &[Complex64], q: f64) -> (Complex64, f64) {
    let first: Vec<Complex64> = values.windows(2).map(|w| (w[1] - q * w[0]) / (1.0 - q)).collect();
    let q2 = q * q;
    let second: Vec<Complex64> = first.windows(2).map(|w| (w[1] - q2 * w[0]) / (1.0 - q2)).collect();
    let n = second.len();
    let err = if n > 1 {
        (second[n - 1] - second[n - 2]).norm()
    } else {
        0.0
    };
    (second[n - 1], err)
}

/// Estimates lim D_eps(z)/sqrt(z) as z -> 0 along the negative axis.
pub fn zero_resonance_detector(params: &ModelParams) -> Result<ZeroResonance> {
    params.validate()?;
    if params.d != Dimension::Three {
        return Err(Error::Unsupported(
            "the zero-energy resonance detector is for d = 3".into(),
        ));
    }
    let q = (RADII[1] / RADII[0]).sqrt();
    let mut g = Vec::with_capacity(RADII.len());
    let mut f = Vec::with_capacity(RADII.len());
    let mut scale: f64 = 0.0;
    for r in RADII {
        let br = Branches::negative_axis(r.ln());
        let d = dispersion(params, &br);
        scale = scale.max(dispersion_scale(params, &br));
        g.push(d);
        f.push(d / (I * r.sqrt()));
    }
    // D is a series in sqrt(z), so extrapolate in h = sqrt(r)
    let noise = 64.0 * f64::EPSILON * scale;
    let (d0, d0_err) = richardson(&g, q);
    let (limit, limit_err) = richardson(&f, q);
    let behaviour = if d0.norm() > 8.0 * d0_err + noise {
        LimitBehaviour::Divergent
    } else if limit.norm() <= 8.0 * limit_err + noise / RADII[RADII.len() - 1].sqrt() {
        LimitBehaviour::Vanishing
    } else {
        LimitBehaviour::Finite
    };
    Ok(ZeroResonance {
        present: behaviour == LimitBehaviour::Finite,
        coefficient: limit,
        behaviour,
    })
}

type Radial = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Radial profiles of a two-channel state, as functions of |x|.
pub struct ResonantState {
    pub channel0: Radial,
    pub channel1: Radial,
}

impl fmt::Debug for ResonantState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ResonantState({:?}, {:?})",
            (self.channel0)(1.0),
            (self.channel1)(1.0)
        )
    }
}

impl ResonantState {
    /// (-eps / (4 pi |x|), e^{-|x|} / |x|), normalization N = 1.
    pub fn canonical(epsilon: f64) -> Self {
        ResonantState {
            channel0: Box::new(move |r| -epsilon / (4.0 * PI * r)),
            channel1: Box::new(|r| (-r).exp() / r),
        }
    }
}

/// Charges, regular parts and residuals of the boundary conditions and of the
/// free equations away from the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceCheck {
    pub charges: [f64; 2],
    pub regular_parts: [f64; 2],
    /// q0 - theta0 f0 - b eps f1 and q1 - b eps f0 - theta1 f1.
    pub boundary_residuals: [f64; 2],
    /// Largest of |Delta psi0| and |(-Delta + 1) psi1| at a few radii, relative.
    pub equation_residual: f64,
    pub holds: bool,
}

/// f(0+) from a full Richardson tableau on r = r0 2^-k, assuming a power
/// series in r.
fn limit_at_zero(f: impl Fn(f64) -> f64) -> f64 {
    let r0 = 1e-2;
    let mut t: Vec<f64> = (0..6).map(|k| f(r0 * 0.5f64.powi(k))).collect();
    let mut scale = 1.0;
    while t.len() > 1 {
        scale *= 2.0;
        t = t.windows(2).map(|w| (scale * w[1] - w[0]) / (scale - 1.0)).collect();
    }
    t[0]
}

/// -(1/r) (r psi)'' by central differences.
fn radial_laplacian(psi: &Radial, r: f64) -> f64 {
    let h = 1e-3 * r;
    let u = |x: f64| x * psi(x);
    -(u(r + h) - 2.0 * u(r) + u(r - h)) / (h * h * r)
}

/// Checks that `state` satisfies the point-interaction boundary conditions
/// q0 = theta0 f0 + b eps f1, q1 = b eps f0 + theta1 f1 and solves the free
/// equations at zero energy away from the origin.
pub fn verify_resonant_state(params: &ModelParams, state: &ResonantState) -> Result<ResonanceCheck> {
    params.validate()?;
    if params.d != Dimension::Three {
        return Err(Error::Unsupported("resonant state check is for d = 3".into()));
    }
    let psi = [&state.channel0, &state.channel1];
    let mut charges = [0.0; 2];
    let mut regular = [0.0; 2];
    for j in 0..2 {
        let p = psi[j];
        charges[j] = limit_at_zero(|r| 4.0 * PI * r * p(r));
        let q = charges[j];
        regular[j] = limit_at_zero(|r| p(r) - q / (4.0 * PI * r));
    }
    let be = params.b * params.epsilon;
    let boundary = [
        charges[0] - params.theta0 * regular[0] - be * regular[1],
        charges[1] - be * regular[0] - params.theta1_eps() * regular[1],
    ];
    let mut equation: f64 = 0.0;
    for r in [0.5, 1.0, 2.0] {
        let size = psi[0](r).abs().max(psi[1](r).abs()).max(f64::MIN_POSITIVE);
        equation = equation.max(radial_laplacian(psi[0], r).abs() / size);
        let e1 = radial_laplacian(psi[1], r) + psi[1](r);
        equation = equation.max(e1.abs() / size);
    }
    let tol = 1e-6;
    let size = 1.0 + charges[0].abs().max(charges[1].abs());
    let holds = boundary[0].abs() <= tol * size && boundary[1].abs() <= tol * size && equation <= tol;
    Ok(ResonanceCheck {
        charges,
        regular_parts: regular,
        boundary_residuals: boundary,
        equation_residual: equation,
        holds,
    })
}
