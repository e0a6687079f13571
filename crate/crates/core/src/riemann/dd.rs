//! Double-double arithmetic, just enough for the small-argument Hankel series.
//!
//! The series for H0 loses about `2 Im(eta) / ln 10` digits to cancellation,
//! which is more than f64 can afford once |eta| approaches 10.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

pub(crate) const GAMMA: Dd = Dd::new(0.5772156649015329, -4.942915152430645e-18);
pub(crate) const LN2: Dd = Dd::new(0.6931471805599453, 2.3190468138462996e-17);
pub(crate) const FRAC_PI_2: Dd = Dd::new(1.5707963267948966, 6.123233995736766e-17);
pub(crate) const FRAC_2_PI: Dd = Dd::new(0.6366197723675814, -3.935735335036497e-17);

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd::new(0.0, 0.0);
    pub const ONE: Dd = Dd::new(1.0, 0.0);

    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    pub const fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn scale(self, k: f64) -> Dd {
        // exact for powers of two
        Dd::new(self.hi * k, self.lo * k)
    }

    #[cfg(test)]
    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let x = self.hi.sqrt();
        let (p, e) = two_prod(x, x);
        let r = ((self.hi - p) - e + self.lo) / (2.0 * x);
        let (hi, lo) = quick_two_sum(x, r);
        Dd::new(hi, lo)
    }

    pub fn exp(self) -> Dd {
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2 * Dd::from_f64(k)).scale(1.0 / 256.0);
        // Taylor on |r| < 0.0014
        let mut term = r;
        let mut sum = r;
        for n in 2..=12 {
            term = term * r / Dd::from_f64(n as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        // (1 + s)^256 with s kept small: iterate s <- 2s + s^2
        for _ in 0..8 {
            sum = sum.scale(2.0) + sum * sum;
        }
        let e = sum + Dd::ONE;
        e.scale(2f64.powi(k as i32))
    }

    /// (sin x, cos x)
    pub fn sin_cos(self) -> (Dd, Dd) {
        let q = (self.hi / FRAC_PI_2.hi).round();
        let r = self - FRAC_PI_2 * Dd::from_f64(q);
        let r2 = r * r;
        let mut s = r;
        let mut term = r;
        let mut n = 1.0;
        loop {
            term = -(term * r2 / Dd::from_f64((n + 1.0) * (n + 2.0)));
            s = s + term;
            n += 2.0;
            if term.hi.abs() < 1e-36 || n > 60.0 {
                break;
            }
        }
        let mut c = Dd::ONE;
        let mut term = Dd::ONE;
        let mut n = 0.0;
        loop {
            term = -(term * r2 / Dd::from_f64((n + 1.0) * (n + 2.0)));
            c = c + term;
            n += 2.0;
            if term.hi.abs() < 1e-36 || n > 60.0 {
                break;
            }
        }
        match (q as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd::new(hi, lo)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd::new(-self.hi, -self.lo)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd::new(hi, lo)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * Dd::from_f64(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Dd::from_f64(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd::new(hi, lo) + Dd::from_f64(q3)
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    pub const ZERO: CDd = CDd {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };

    pub fn new(re: Dd, im: Dd) -> Self {
        CDd { re, im }
    }

    pub fn from_f64(re: f64, im: f64) -> Self {
        CDd::new(Dd::from_f64(re), Dd::from_f64(im))
    }

    pub fn to_c64(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn mul_real(self, k: Dd) -> CDd {
        CDd::new(self.re * k, self.im * k)
    }

    /// Multiply by i.
    pub fn mul_i(self) -> CDd {
        CDd::new(-self.im, self.re)
    }

    /// Principal logarithm, refined from the f64 estimate by one Newton step.
    pub fn ln(self) -> CDd {
        let w = self.to_c64();
        let l0 = w.ln();
        // l1 = l0 + w e^{-l0} - 1
        let mag = Dd::from_f64(-l0.re).exp();
        let (s, c) = Dd::from_f64(-l0.im).sin_cos();
        let e = CDd::new(mag * c, mag * s);
        let corr = self * e;
        CDd::new(Dd::from_f64(l0.re) + corr.re - Dd::ONE, Dd::from_f64(l0.im) + corr.im)
    }
}

impl Add for CDd {
    type Output = CDd;
    fn add(self, o: CDd) -> CDd {
        CDd::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for CDd {
    type Output = CDd;
    fn sub(self, o: CDd) -> CDd {
        CDd::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for CDd {
    type Output = CDd;
    fn mul(self, o: CDd) -> CDd {
        CDd::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_ln2_is_two() {
        let e = LN2.exp();
        assert!((e - Dd::from_f64(2.0)).to_f64().abs() < 1e-30);
    }

    #[test]
    fn sin_cos_of_half_pi() {
        let (s, c) = FRAC_PI_2.sin_cos();
        assert!((s - Dd::ONE).to_f64().abs() < 1e-30);
        assert!(c.to_f64().abs() < 1e-30);
    }

    #[test]
    fn sqrt_two_squared() {
        let r = Dd::from_f64(2.0).sqrt();
        assert!((r * r - Dd::from_f64(2.0)).to_f64().abs() < 1e-30);
    }

    #[test]
    fn ln_recovers_argument() {
        let z = CDd::from_f64(0.3, 2.7);
        let l = z.ln();
        let mag = l.re.exp();
        let (s, c) = l.im.sin_cos();
        let back = CDd::new(mag * c, mag * s);
        assert!((back.re - z.re).to_f64().abs() < 1e-30);
        assert!((back.im - z.im).to_f64().abs() < 1e-30);
    }
}
