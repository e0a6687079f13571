//! Two-sheeted square root and logarithm, the free Green's functions and H0.
//!
//! Sheet 0 puts arg z in [0, 2pi) so that Im sqrt(z) >= 0; sheet -1 puts it in
//! (-2pi, 0], Im sqrt(z) <= 0. Positive reals carry arg 0 on both sheets.

mod dd;
mod hankel;

use std::f64::consts::{LN_2, PI};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod complex_serde;
pub use hankel::{hankel_h1_0, hankel_h1_0_integral, hankel_h1_0_series, SERIES_RADIUS};

const EULER_GAMMA: f64 = 0.5772156649015329;

/// `a = 2 pi / (ln 2 - gamma)`, the constant fixing the d = 2 threshold.
pub const A: f64 = 2.0 * PI / (LN_2 - EULER_GAMMA);

pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i32", try_from = "i32")]
pub enum Sheet {
    Physical,
    Unphysical,
}

impl Sheet {
    pub fn index(self) -> i32 {
        match self {
            Sheet::Physical => 0,
            Sheet::Unphysical => -1,
        }
    }
}

impl From<Sheet> for i32 {
    fn from(s: Sheet) -> i32 {
        s.index()
    }
}

impl TryFrom<i32> for Sheet {
    type Error = Error;
    fn try_from(n: i32) -> Result<Sheet> {
        match n {
            0 => Ok(Sheet::Physical),
            -1 => Ok(Sheet::Unphysical),
            _ => Err(Error::Domain(format!("sheet index {n} is not 0 or -1"))),
        }
    }
}

impl fmt::Display for Sheet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Dimension {
    One,
    Two,
    Three,
}

impl Dimension {
    pub fn get(self) -> u8 {
        match self {
            Dimension::One => 1,
            Dimension::Two => 2,
            Dimension::Three => 3,
        }
    }
}

impl From<Dimension> for u8 {
    fn from(d: Dimension) -> u8 {
        d.get()
    }
}

impl TryFrom<u8> for Dimension {
    type Error = Error;
    fn try_from(d: u8) -> Result<Dimension> {
        match d {
            1 => Ok(Dimension::One),
            2 => Ok(Dimension::Two),
            3 => Ok(Dimension::Three),
            _ => Err(Error::Domain(format!(
                "dimension {d}: point interactions exist only for d = 1, 2, 3"
            ))),
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.get())
    }
}

/// A complex energy together with the sheet that fixes its argument.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SheetPoint {
    #[serde(with = "complex_serde")]
    pub value: Complex64,
    pub sheet: Sheet,
}

impl SheetPoint {
    pub fn new(value: Complex64, sheet: Sheet) -> Self {
        SheetPoint { value, sheet }
    }

    pub fn physical(value: Complex64) -> Self {
        SheetPoint::new(value, Sheet::Physical)
    }

    pub fn unphysical(value: Complex64) -> Self {
        SheetPoint::new(value, Sheet::Unphysical)
    }

    /// Argument in [0, 2pi) on sheet 0 and (-2pi, 0] on sheet -1.
    pub fn arg(&self) -> f64 {
        let z = self.value;
        // atan2 in (-pi, pi]; a negative zero imaginary part counts as zero
        let theta = if z.im == 0.0 {
            if z.re < 0.0 {
                PI
            } else {
                0.0
            }
        } else {
            z.im.atan2(z.re)
        };
        match self.sheet {
            Sheet::Physical if theta < 0.0 => theta + 2.0 * PI,
            Sheet::Unphysical if theta > 0.0 => theta - 2.0 * PI,
            _ => theta,
        }
    }

    /// Mirror image (z, arg) -> (conj z, 2pi - arg) on sheet 0. Points on the
    /// positive axis map to themselves.
    pub fn mirror(&self) -> SheetPoint {
        SheetPoint::new(self.value.conj(), self.sheet)
    }
}

fn nonzero(p: &SheetPoint) -> Result<()> {
    if p.value.re == 0.0 && p.value.im == 0.0 {
        Err(Error::Domain("z = 0 is a branch point".into()))
    } else {
        Ok(())
    }
}

/// sqrt(z) with arg(sqrt z) = arg(z)/2 on the sheet of `p`.
pub fn sheet_sqrt(p: SheetPoint) -> Result<Complex64> {
    nonzero(&p)?;
    let Complex64 { re: x, im: y } = p.value;
    let y = if y == 0.0 { 0.0 } else { y };
    let m = x.hypot(y);
    // root with arg in [0, pi)
    let upper = if x < 0.0 {
        let t = (0.5 * (m - x)).sqrt();
        Complex64::new(y / (2.0 * t), t)
    } else {
        let t = (0.5 * (m + x)).sqrt();
        if y >= 0.0 {
            Complex64::new(t, y / (2.0 * t))
        } else {
            Complex64::new(-t, -y / (2.0 * t))
        }
    };
    Ok(match p.sheet {
        Sheet::Physical => upper,
        Sheet::Unphysical if y == 0.0 && x > 0.0 => upper,
        Sheet::Unphysical => -upper,
    })
}

/// ln|z| + i arg(z) with the argument convention of the sheet.
pub fn sheet_log(p: SheetPoint) -> Result<Complex64> {
    nonzero(&p)?;
    Ok(Complex64::new(p.value.norm().ln(), p.arg()))
}

/// g(z) = [ln(sqrt z) - i pi/2] / (2 pi) - 1/a.
pub fn g_function(p: SheetPoint) -> Result<Complex64> {
    Ok(g_from_log(sheet_log(p)?))
}

pub(crate) fn g_from_log(ln_z: Complex64) -> Complex64 {
    (0.5 * ln_z - 0.5 * PI * I) / (2.0 * PI) - 1.0 / A
}

/// Free Green's function G^z(x) of -Delta - z in R^d at distance x.
pub fn green_kernel(d: Dimension, p: SheetPoint, x: f64) -> Result<Complex64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("distance {x} must be non-negative")));
    }
    if x == 0.0 && d != Dimension::One {
        return Err(Error::Domain(format!("G^z is singular at x = 0 in d = {d}")));
    }
    let k = sheet_sqrt(p)?;
    Ok(match d {
        Dimension::One => I * (I * k * x).exp() / (2.0 * k),
        Dimension::Two => 0.25 * I * hankel_h1_0(k * x)?,
        Dimension::Three => (I * k * x).exp() / (4.0 * PI * x),
    })
}
