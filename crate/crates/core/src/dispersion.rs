//! The dispersion function D_eps(z), the Gamma matrix and the resolvent kernel.
//!
//! Everything is evaluated from a [`Branches`] bundle so that the same code
//! serves complex points on either sheet, the uniformizing variable
//! s = sqrt(z) used by Newton, and the negative real axis in log coordinates.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::riemann::{self, hankel_h1_0, sheet_sqrt, Dimension, Sheet, SheetPoint, A, I};

/// Parameters (d, theta0, c, b, eps) of the two-channel Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub d: Dimension,
    pub theta0: f64,
    pub c: f64,
    pub b: f64,
    pub epsilon: f64,
}

impl ModelParams {
    /// Parameters with the default coupling b = 1.
    pub fn new(d: Dimension, theta0: f64, c: f64, epsilon: f64) -> Self {
        ModelParams {
            d,
            theta0,
            c,
            b: 1.0,
            epsilon,
        }
    }

    pub fn with_b(mut self, b: f64) -> Self {
        self.b = b;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("theta0", self.theta0),
            ("c", self.c),
            ("b", self.b),
            ("epsilon", self.epsilon),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} = {v} is not finite")));
            }
        }
        if self.epsilon < 0.0 {
            return Err(Error::InvalidConfig(format!("epsilon = {} must be >= 0", self.epsilon)));
        }
        Ok(())
    }

    /// theta1^eps = 2 + c eps, a + c eps, -4 pi + c eps for d = 1, 2, 3.
    pub fn theta1_eps(&self) -> f64 {
        let base = match self.d {
            Dimension::One => 2.0,
            Dimension::Two => A,
            Dimension::Three => -4.0 * PI,
        };
        base + self.c * self.epsilon
    }

    /// (b eps)^2
    pub fn coupling_sq(&self) -> f64 {
        let be = self.b * self.epsilon;
        be * be
    }

    /// d = 2 combination theta0 theta1^eps - b^2 eps^2.
    pub fn p_factor(&self) -> f64 {
        self.theta0 * self.theta1_eps() - self.coupling_sq()
    }

    pub(crate) fn alpha3(&self) -> f64 {
        1.0 - self.c * self.epsilon / (4.0 * PI)
    }
}

/// Channel label: 0 has threshold 0, 1 has threshold 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Channel {
    Lower,
    Upper,
}

impl Channel {
    pub fn index(self) -> usize {
        match self {
            Channel::Lower => 0,
            Channel::Upper => 1,
        }
    }

    pub fn from_index(i: usize) -> Result<Channel> {
        match i {
            0 => Ok(Channel::Lower),
            1 => Ok(Channel::Upper),
            _ => Err(Error::Domain(format!("channel {i} is not 0 or 1"))),
        }
    }
}

/// sqrt and ln of z and of z - 1 on their chosen sheets.
///
/// `ln_one_minus_z` stores ln(z - 1) - i pi, which near the origin is the
/// principal ln(1 - z) and can be formed without cancellation. Likewise
/// `one_plus_i_sqrt_zm1` is 1 + i sqrt(z - 1) computed as z / (1 - i sqrt(z - 1))
/// when the direct sum would cancel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Branches {
    pub z: Complex64,
    pub sqrt_z: Complex64,
    pub ln_z: Complex64,
    pub sqrt_zm1: Complex64,
    pub ln_one_minus_z: Complex64,
    pub one_plus_i_sqrt_zm1: Complex64,
}

fn ln_one_minus(z: Complex64, zm1_sheet: Sheet) -> Complex64 {
    let (x, y) = (z.re, z.im);
    let re = if z.norm() < 0.5 {
        0.5 * ((x * x + y * y) - 2.0 * x).ln_1p()
    } else {
        (1.0 - x).hypot(y).ln()
    };
    let w = SheetPoint::physical(Complex64::new(1.0 - x, -y));
    // principal argument of 1 - z in (-pi, pi]
    let mut im = w.arg();
    if im > PI {
        im -= 2.0 * PI;
    }
    match zm1_sheet {
        Sheet::Physical if im == PI => Complex64::new(re, -PI),
        Sheet::Physical => Complex64::new(re, im),
        Sheet::Unphysical => Complex64::new(re, im - 2.0 * PI),
    }
}

fn one_plus_i(z: Complex64, t: Complex64) -> Complex64 {
    let direct = 1.0 + I * t;
    if direct.norm() < 0.5 {
        z / (1.0 - I * t)
    } else {
        direct
    }
}

impl Branches {
    pub fn new(p: SheetPoint, zm1_sheet: Sheet) -> Result<Self> {
        let z = p.value;
        let sqrt_z = sheet_sqrt(p)?;
        let ln_z = riemann::sheet_log(p)?;
        let zm1 = z - 1.0;
        if zm1.re == 0.0 && zm1.im == 0.0 {
            return Err(Error::Domain("z = 1 is a branch point of sqrt(z - 1)".into()));
        }
        let sqrt_zm1 = sheet_sqrt(SheetPoint::new(zm1, zm1_sheet))?;
        Ok(Branches {
            z,
            sqrt_z,
            ln_z,
            sqrt_zm1,
            ln_one_minus_z: ln_one_minus(z, zm1_sheet),
            one_plus_i_sqrt_zm1: one_plus_i(z, sqrt_zm1),
        })
    }

    /// Branches at z = s^2; the sheet of z is read off from the sign of Im s.
    pub fn from_sqrt(s: Complex64, zm1_sheet: Sheet) -> Result<Self> {
        if s.re == 0.0 && s.im == 0.0 {
            return Err(Error::Domain("z = 0 is a branch point".into()));
        }
        let z = s * s;
        let zm1 = z - 1.0;
        if zm1.re == 0.0 && zm1.im == 0.0 {
            return Err(Error::Domain("z = 1 is a branch point of sqrt(z - 1)".into()));
        }
        let sqrt_zm1 = sheet_sqrt(SheetPoint::new(zm1, zm1_sheet))?;
        Ok(Branches {
            z,
            sqrt_z: s,
            ln_z: 2.0 * s.ln(),
            sqrt_zm1,
            ln_one_minus_z: ln_one_minus(z, zm1_sheet),
            one_plus_i_sqrt_zm1: one_plus_i(z, sqrt_zm1),
        })
    }

    /// Sheet-0 branches at z = -exp(u). Only the logarithms stay finite when
    /// exp(u) leaves the f64 range, which is all d = 2 needs.
    pub fn negative_axis(u: f64) -> Self {
        let lambda = u.exp();
        let ln1p = if u > 40.0 {
            u + (-u).exp().ln_1p()
        } else {
            lambda.ln_1p()
        };
        let root1 = (1.0 + lambda).sqrt();
        Branches {
            z: Complex64::new(-lambda, 0.0),
            sqrt_z: Complex64::new(0.0, (0.5 * u).exp()),
            ln_z: Complex64::new(u, PI),
            sqrt_zm1: Complex64::new(0.0, root1),
            ln_one_minus_z: Complex64::new(ln1p, 0.0),
            one_plus_i_sqrt_zm1: Complex64::new(-lambda / (1.0 + root1), 0.0),
        }
    }

    /// Boundary values on the physical sheet at z = lambda > 0, from above
    /// (`upper`, arg z = 0) or from below (arg z = 2 pi).
    pub fn positive_axis(lambda: f64, upper: bool) -> Self {
        let sign = if upper { 1.0 } else { -1.0 };
        let root = lambda.sqrt();
        let (sqrt_zm1, ln_one_minus_z, one_plus) = if lambda <= 1.0 {
            // z - 1 on the negative axis: arg pi from either side
            let r1 = (1.0 - lambda).sqrt();
            (
                Complex64::new(0.0, r1),
                Complex64::new((-lambda).ln_1p(), 0.0),
                Complex64::new(lambda / (1.0 + r1), 0.0),
            )
        } else {
            let r1 = (lambda - 1.0).sqrt();
            (
                Complex64::new(sign * r1, 0.0),
                Complex64::new((lambda - 1.0).ln(), -sign * PI),
                Complex64::new(1.0, sign * r1),
            )
        };
        Branches {
            z: Complex64::new(lambda, 0.0),
            sqrt_z: Complex64::new(sign * root, 0.0),
            ln_z: Complex64::new(lambda.ln(), if upper { 0.0 } else { 2.0 * PI }),
            sqrt_zm1,
            ln_one_minus_z,
            one_plus_i_sqrt_zm1: one_plus,
        }
    }

    pub fn g_z(&self) -> Complex64 {
        riemann::g_from_log(self.ln_z)
    }

    pub fn g_zm1(&self) -> Complex64 {
        self.ln_one_minus_z / (4.0 * PI) - 1.0 / A
    }
}

/// theta1_eps + P g(z) and theta0 + P g(z - 1) for d = 2, with the constant
/// parts combined exactly. Written naively, theta0 - P/A cancels to O(eps^2)
/// when theta0 = A and loses all digits of the root's position.
fn d2_factors(params: &ModelParams, br: &Branches) -> [(f64, Complex64); 2] {
    let bb = params.coupling_sq();
    let p = params.p_factor();
    let th1 = params.theta1_eps();
    let k0 = (th1 * (A - params.theta0) + bb) / A;
    let k1 = (-params.theta0 * params.c * params.epsilon + bb) / A;
    [
        (k0, p * (br.ln_z - PI * I) / (4.0 * PI)),
        (k1, p * br.ln_one_minus_z / (4.0 * PI)),
    ]
}

/// D_eps from precomputed branches, grouped as printed for each dimension.
pub fn dispersion(params: &ModelParams, br: &Branches) -> Complex64 {
    let bb = params.coupling_sq();
    let ce = params.c * params.epsilon;
    let th0 = params.theta0;
    match params.d {
        Dimension::One => bb - (th0 + 2.0 * I * br.sqrt_z) * (2.0 * br.one_plus_i_sqrt_zm1 + ce),
        Dimension::Two => {
            let [(k0, l0), (k1, l1)] = d2_factors(params, br);
            (k0 + l0) * (k1 + l1) - bb
        }
        Dimension::Three => {
            let u = 1.0 - I * th0 / (4.0 * PI) * br.sqrt_z;
            let v = br.one_plus_i_sqrt_zm1 - I * (ce / (4.0 * PI)) * br.sqrt_zm1;
            let k = bb / (16.0 * PI * PI);
            u * v + k * br.sqrt_zm1 * br.sqrt_z
        }
    }
}

/// Magnitude of the largest products entering D_eps; rounding errors in D_eps
/// are a few ulps of this.
pub fn dispersion_scale(params: &ModelParams, br: &Branches) -> f64 {
    let bb = params.coupling_sq();
    let ce = params.c * params.epsilon;
    let th0 = params.theta0.abs();
    match params.d {
        Dimension::One => bb + (th0 + 2.0 * br.sqrt_z.norm()) * (2.0 + 2.0 * br.sqrt_zm1.norm() + ce.abs()),
        Dimension::Two => {
            let [(k0, l0), (k1, l1)] = d2_factors(params, br);
            (k0.abs() + l0.norm()) * (k1.abs() + l1.norm()) + bb
        }
        Dimension::Three => {
            let u = 1.0 + th0 / (4.0 * PI) * br.sqrt_z.norm();
            let v = 1.0 + params.alpha3().abs() * br.sqrt_zm1.norm();
            u * v + bb / (16.0 * PI * PI) * br.sqrt_zm1.norm() * br.sqrt_z.norm()
        }
    }
}

/// dD_eps/dz by differentiating the printed formula on fixed sheets.
pub fn dispersion_derivative(params: &ModelParams, br: &Branches) -> Complex64 {
    let bb = params.coupling_sq();
    let ce = params.c * params.epsilon;
    let th0 = params.theta0;
    let (s, t) = (br.sqrt_z, br.sqrt_zm1);
    match params.d {
        Dimension::One => {
            let a = th0 + 2.0 * I * s;
            let f = 2.0 * br.one_plus_i_sqrt_zm1 + ce;
            -((I / s) * f + a * (I / t))
        }
        Dimension::Two => {
            let p = params.p_factor();
            let dg0 = 1.0 / (4.0 * PI * br.z);
            let dg1 = 1.0 / (4.0 * PI * (br.z - 1.0));
            let [(k0, l0), (k1, l1)] = d2_factors(params, br);
            p * dg0 * (k1 + l1) + (k0 + l0) * p * dg1
        }
        Dimension::Three => {
            let alpha = params.alpha3();
            let u = 1.0 - I * th0 / (4.0 * PI) * s;
            let v = br.one_plus_i_sqrt_zm1 - I * (ce / (4.0 * PI)) * t;
            let du = -I * th0 / (8.0 * PI * s);
            let dv = I * alpha / (2.0 * t);
            let k = bb / (16.0 * PI * PI);
            du * v + u * dv + k * (s / (2.0 * t) + t / (2.0 * s))
        }
    }
}

/// D_eps(z) with sqrt z, ln z on the sheet of `z` and sqrt(z - 1), ln(z - 1)
/// on `zm1_sheet`.
pub fn d_epsilon(params: &ModelParams, z: SheetPoint, zm1_sheet: Sheet) -> Result<Complex64> {
    Ok(dispersion(params, &Branches::new(z, zm1_sheet)?))
}

pub fn d_epsilon_derivative(params: &ModelParams, z: SheetPoint, zm1_sheet: Sheet) -> Result<Complex64> {
    Ok(dispersion_derivative(params, &Branches::new(z, zm1_sheet)?))
}

/// D_eps(-lambda) on the physical sheet, real for lambda > 0.
pub fn d_epsilon_negative_axis(params: &ModelParams, lambda: f64) -> f64 {
    dispersion(params, &Branches::negative_axis(lambda.ln())).re
}

/// The 2x2 numerator matrix of the resolvent correction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaMatrix {
    #[serde(with = "crate::riemann::complex_serde::matrix")]
    pub entries: [[Complex64; 2]; 2],
}

impl GammaMatrix {
    pub fn get(&self, i: Channel, j: Channel) -> Complex64 {
        self.entries[i.index()][j.index()]
    }
}

pub fn gamma_from(params: &ModelParams, br: &Branches) -> GammaMatrix {
    let bb = params.coupling_sq();
    let be = params.b * params.epsilon;
    let ce = params.c * params.epsilon;
    let th0 = params.theta0;
    let (s, t) = (br.sqrt_z, br.sqrt_zm1);
    let (g11, g12, g22) = match params.d {
        Dimension::One => (
            -2.0 * I * s * (-bb + th0 * (2.0 * br.one_plus_i_sqrt_zm1 + ce)),
            4.0 * be * t * s,
            -2.0 * I * t * (-bb + (2.0 + ce) * (2.0 * I * s + th0)),
        ),
        Dimension::Two => {
            let p = params.p_factor();
            let [(k0, l0), (k1, l1)] = d2_factors(params, br);
            ((k1 + l1) * p, Complex64::new(be * p, 0.0), (k0 + l0) * p)
        }
        Dimension::Three => (
            th0 * (br.one_plus_i_sqrt_zm1 - I * (ce / (4.0 * PI)) * t) - bb * t / (4.0 * PI * I),
            Complex64::new(be, 0.0),
            params.theta1_eps() * (1.0 - I * th0 / (4.0 * PI) * s) - bb * s / (4.0 * PI * I),
        ),
    };
    GammaMatrix {
        entries: [[g11, g12], [g12, g22]],
    }
}

pub fn gamma_matrix(params: &ModelParams, z: SheetPoint, zm1_sheet: Sheet) -> Result<GammaMatrix> {
    Ok(gamma_from(params, &Branches::new(z, zm1_sheet)?))
}

fn green_from_sqrt(d: Dimension, k: Complex64, x: f64) -> Result<Complex64> {
    if !(x >= 0.0) || (x == 0.0 && d != Dimension::One) {
        return Err(Error::Domain(format!("G^z needs x > 0 in d = {d}, got {x}")));
    }
    Ok(match d {
        Dimension::One => I * (I * k * x).exp() / (2.0 * k),
        Dimension::Two => 0.25 * I * hankel_h1_0(k * x)?,
        Dimension::Three => (I * k * x).exp() / (4.0 * PI * x),
    })
}

/// Gamma_ij(z) / D_eps(z) G^{z - k_i}(x) G^{z - k_j}(x'), k = 0 for the lower
/// and 1 for the upper channel; z on the physical sheet.
pub fn resolvent_correction_kernel(
    params: &ModelParams,
    z: SheetPoint,
    x: f64,
    x_prime: f64,
    i: Channel,
    j: Channel,
) -> Result<Complex64> {
    let br = Branches::new(z, Sheet::Physical)?;
    let den = dispersion(params, &br);
    if den.norm() <= 8.0 * f64::EPSILON * dispersion_scale(params, &br) {
        return Err(Error::Pole { z: z.value });
    }
    let gamma = gamma_from(params, &br).get(i, j);
    let k = |ch: Channel| if ch == Channel::Lower { br.sqrt_z } else { br.sqrt_zm1 };
    let gi = green_from_sqrt(params.d, k(i), x)?;
    let gj = green_from_sqrt(params.d, k(j), x_prime)?;
    Ok(gamma / den * gi * gj)
}

/// Exact eigenvalue of the uncoupled (b = 0) Hamiltonian near threshold,
/// 1 - theta1^2/4, 1 - exp(4 pi (1/a - 1/theta1)), 1 - (4 pi)^2/theta1^2,
/// rearranged so the O(eps) result carries no cancellation.
pub fn decoupled_eigenvalue(params: &ModelParams) -> f64 {
    let th1 = params.theta1_eps();
    let ce = params.c * params.epsilon;
    match params.d {
        Dimension::One => -ce * (4.0 + ce) / 4.0,
        Dimension::Two => -(4.0 * PI * ce / (A * th1)).exp_m1(),
        Dimension::Three => ce * (ce - 8.0 * PI) / (th1 * th1),
    }
}

/// Point spectrum of the unperturbed (eps = 0) Hamiltonian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub d: Dimension,
    pub point_spectrum: Vec<f64>,
    pub threshold_eigenvalue_present: bool,
}

impl SpectrumSummary {
    /// Unit-norm zero-energy bound state, (0, phi1_th(|x|)).
    pub fn bound_state_profile(&self, channel: Channel, x: f64) -> Complex64 {
        if channel == Channel::Lower {
            return Complex64::new(0.0, 0.0);
        }
        let r = x.abs();
        match self.d {
            Dimension::One => Complex64::new((-r).exp(), 0.0),
            Dimension::Two => {
                if r == 0.0 {
                    return Complex64::new(f64::INFINITY, 0.0);
                }
                0.5 * PI.sqrt() * hankel_h1_0(Complex64::new(0.0, r)).unwrap_or_default()
            }
            Dimension::Three => Complex64::new((8.0 * PI).sqrt() * (-r).exp() / (4.0 * PI * r), 0.0),
        }
    }
}

pub fn unperturbed_spectrum(params: &ModelParams) -> Result<SpectrumSummary> {
    if params.epsilon != 0.0 {
        return Err(Error::Domain(format!(
            "unperturbed spectrum needs eps = 0, got {}",
            params.epsilon
        )));
    }
    let th0 = params.theta0;
    let mut point = Vec::new();
    match params.d {
        Dimension::One if th0 > 0.0 => point.push(-th0 * th0 / 4.0),
        Dimension::Two if th0 != 0.0 => point.push(-(4.0 * PI * (1.0 / A - 1.0 / th0)).exp()),
        Dimension::Three if th0 < 0.0 => point.push(-(4.0 * PI / th0).powi(2)),
        _ => {}
    }
    point.push(0.0);
    Ok(SpectrumSummary {
        d: params.d,
        point_spectrum: point,
        threshold_eigenvalue_present: true,
    })
}
