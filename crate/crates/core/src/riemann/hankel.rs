//! Hankel function of the first kind and order zero.
//!
//! Two independent evaluations: the ascending series (in double-double, see
//! [`super::dd`]) and a Laplace-type integral for K0 rotated onto H0.

use num_complex::Complex64;

use super::dd::{self, CDd, Dd};
use crate::error::{Error, Result};

/// Below this modulus `hankel_h1_0` uses the series.
pub const SERIES_RADIUS: f64 = 6.0;

const MAX_TERMS: usize = 200;
const TRAPEZOID_STEP: f64 = 0.05;
const TRAPEZOID_END: f64 = 6.5;
const OVERFLOW_IM: f64 = -700.0;

fn check(eta: Complex64) -> Result<()> {
    if eta == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("H0 has a logarithmic branch point at eta = 0".into()));
    }
    if !eta.re.is_finite() || !eta.im.is_finite() {
        return Err(Error::Domain(format!("non-finite Hankel argument {eta}")));
    }
    if eta.im < OVERFLOW_IM {
        return Err(Error::Overflow(format!(
            "H0({eta}) grows like exp({:.0}) and overflows f64",
            -eta.im
        )));
    }
    Ok(())
}

/// H0^(1)(eta), series for |eta| < 6 and the integral beyond.
pub fn hankel_h1_0(eta: Complex64) -> Result<Complex64> {
    check(eta)?;
    if eta.norm() < SERIES_RADIUS {
        hankel_h1_0_series(eta)
    } else {
        hankel_h1_0_integral(eta)
    }
}

/// Ascending series
/// `H0 = J0 + (2i/pi) [ (ln(eta/2) + gamma) J0 - sum_k H_k t_k ]`,
/// `t_k = (-eta^2/4)^k / (k!)^2`, `H_k` the harmonic numbers.
///
/// Accurate for any modulus the double-double budget can carry; in practice
/// |eta| <= 12 in the upper half-plane.
pub fn hankel_h1_0_series(eta: Complex64) -> Result<Complex64> {
    check(eta)?;
    let e = CDd::from_f64(eta.re, eta.im);
    let quarter = Dd::from_f64(-0.25);
    let q = (e * e).mul_real(quarter);

    let mut term = CDd::from_f64(1.0, 0.0);
    let mut j0 = term;
    let mut s = CDd::ZERO;
    let mut harmonic = Dd::ZERO;
    let mut biggest = 1.0_f64;
    for k in 1..MAX_TERMS {
        let kk = Dd::from_f64(k as f64);
        term = (term * q).mul_real(Dd::ONE / (kk * kk));
        harmonic = harmonic + Dd::ONE / kk;
        j0 = j0 + term;
        s = s + term.mul_real(harmonic);
        let size = term.re.hi.abs() + term.im.hi.abs();
        biggest = biggest.max(size);
        if size * harmonic.hi < 1e-34 * biggest && (k as f64) > eta.norm() {
            break;
        }
    }

    let half = CDd::new(e.re.scale(0.5), e.im.scale(0.5));
    let mut log = half.ln();
    log.re = log.re + dd::GAMMA;
    let y_bracket = log * j0 - s;
    let y0 = y_bracket.mul_real(dd::FRAC_2_PI);
    Ok((j0 + y0.mul_i()).to_c64())
}

/// `H0(eta) = (2/(pi i)) K0(-i eta)` with
/// `K0(w) = sqrt(2/w) e^{-w} int_0^inf exp(-s^2) (1 + s^2/(2w))^{-1/2} ds`.
///
/// The integrand is even and analytic in a strip around the real axis, so the
/// trapezoid rule converges geometrically. Valid while -i eta stays off the
/// negative real axis; the cut is reached for eta on the negative imaginary
/// axis, so arguments with Im(eta) < -|Re(eta)| are refused.
pub fn hankel_h1_0_integral(eta: Complex64) -> Result<Complex64> {
    check(eta)?;
    if eta.im < -eta.re.abs() {
        return Err(Error::Domain(format!(
            "integral representation of H0 not used below the diagonals, eta = {eta}"
        )));
    }
    let w = Complex64::new(eta.im, -eta.re);
    let inv_2w = 0.5 / w;
    let n = (TRAPEZOID_END / TRAPEZOID_STEP).ceil() as usize;
    let mut sum = Complex64::new(0.5, 0.0);
    for k in 1..=n {
        let s = k as f64 * TRAPEZOID_STEP;
        let s2 = s * s;
        sum += (-s2).exp() / (1.0 + s2 * inv_2w).sqrt();
    }
    let integral = sum * TRAPEZOID_STEP;
    let k0 = (2.0 / w).sqrt() * (-w).exp() * integral;
    Ok(Complex64::new(0.0, -2.0 / std::f64::consts::PI) * k0)
}
