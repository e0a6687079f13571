//! Closed-form small-eps expansions of the singularities and a log-log fit
//! of the numerical remainder.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::dispersion::ModelParams;
use crate::error::{Error, Result};
use crate::riemann::{Dimension, A};
use crate::rootfinder::{Regime, SignClass};

/// coefficient * eps^power * |ln eps|^log_power
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    #[serde(with = "crate::riemann::complex_serde")]
    pub coefficient: Complex64,
    pub power: Ratio<i64>,
    pub log_power: i32,
}

fn ratio_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn gauge(power: Ratio<i64>, log_power: i32, eps: f64) -> f64 {
    eps.powf(ratio_f64(power)) * eps.ln().abs().powi(log_power)
}

impl Term {
    pub fn new(coefficient: Complex64, power: Ratio<i64>, log_power: i32) -> Self {
        Term {
            coefficient,
            power,
            log_power,
        }
    }

    pub fn evaluate(&self, eps: f64) -> Complex64 {
        self.coefficient * gauge(self.power, self.log_power, eps)
    }
}

/// O(eps^power |ln eps|^log_power), or o(...) when `little_o`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Order {
    pub power: Ratio<i64>,
    pub log_power: i32,
    pub little_o: bool,
}

impl Order {
    pub fn big(power: Ratio<i64>, log_power: i32) -> Self {
        Order {
            power,
            log_power,
            little_o: false,
        }
    }

    pub fn little(power: Ratio<i64>, log_power: i32) -> Self {
        Order {
            power,
            log_power,
            little_o: true,
        }
    }

    pub fn power_f64(&self) -> f64 {
        ratio_f64(self.power)
    }

    pub fn has_log(&self) -> bool {
        self.log_power != 0
    }

    /// True if eps^p |ln eps|^l is eventually smaller than this order's gauge.
    fn dominates(&self, power: Ratio<i64>, log_power: i32) -> bool {
        power < self.power
            || (power == self.power && (log_power > self.log_power || (log_power == self.log_power && self.little_o)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Resonance,
    Eigenvalue,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    Modulus,
    Real,
    Imag,
}

impl Part {
    pub fn as_str(self) -> &'static str {
        match self {
            Part::Modulus => "modulus",
            Part::Real => "real",
            Part::Imag => "imag",
        }
    }
}

/// Leading terms of a published expansion with its remainder. When real and
/// imaginary parts are stated with different remainders both are kept.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionResult {
    pub quantity: Quantity,
    pub leading_terms: Vec<Term>,
    pub remainder: Order,
    pub real_remainder: Option<Order>,
    pub imag_remainder: Option<Order>,
}

impl ExpansionResult {
    pub fn evaluate(&self, eps: f64) -> Complex64 {
        self.leading_terms.iter().map(|t| t.evaluate(eps)).sum()
    }

    pub fn remainder_power(&self) -> f64 {
        self.remainder.power_f64()
    }

    pub fn remainder_has_log(&self) -> bool {
        self.remainder.has_log()
    }

    /// Remainder that applies to the chosen part.
    pub fn remainder_for(&self, part: Part) -> Order {
        match part {
            Part::Modulus => self.remainder,
            Part::Real => self.real_remainder.unwrap_or(self.remainder),
            Part::Imag => self.imag_remainder.unwrap_or(self.remainder),
        }
    }

    /// Terms contributing to `part`: a real coefficient feeds the real part
    /// and so on.
    pub fn terms_for(&self, part: Part) -> Vec<Term> {
        self.leading_terms
            .iter()
            .copied()
            .filter(|t| match part {
                Part::Modulus => true,
                Part::Real => t.coefficient.re != 0.0,
                Part::Imag => t.coefficient.im != 0.0,
            })
            .collect()
    }

    /// Terms are ordered by decreasing size and the remainder of each part is
    /// smaller than that part's last term.
    pub fn is_well_ordered(&self) -> bool {
        let ordered = self
            .leading_terms
            .windows(2)
            .all(|w| w[0].power < w[1].power || (w[0].power == w[1].power && w[0].log_power > w[1].log_power));
        let parts_ok = [Part::Real, Part::Imag]
            .iter()
            .all(|&part| match self.terms_for(part).last() {
                Some(t) => self.remainder_for(part).dominates(t.power, t.log_power),
                None => true,
            });
        ordered && parts_ok
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn r(n: i64, d: i64) -> Ratio<i64> {
    Ratio::new(n, d)
}

/// The published small-eps expansion for the regime's singularity. Stated
/// for b = 1.
pub fn leading_order(params: &ModelParams, regime: &Regime) -> Result<ExpansionResult> {
    if params.b != 1.0 {
        return Err(Error::Unsupported("expansions are stated for b = 1".into()));
    }
    let th0 = params.theta0;
    let ac = params.c.abs();
    let a2 = A * A;
    let one = |terms: Vec<Term>, quantity, remainder| ExpansionResult {
        quantity,
        leading_terms: terms,
        remainder,
        real_remainder: None,
        imag_remainder: None,
    };
    let res = match (regime.cell(), regime.d, regime.theta0_class) {
        (1, Dimension::One, _) => one(
            vec![
                Term::new(c(ac, 0.0), r(1, 1), 0),
                Term::new(c(1.0 / th0 - params.c * params.c / 4.0, 0.0), r(2, 1), 0),
                Term::new(c(0.0, -2.0 * ac.sqrt() / (th0 * th0)), r(5, 2), 0),
            ],
            Quantity::Resonance,
            Order::big(r(4, 1), 0),
        ),
        (1, _, _) => ExpansionResult {
            quantity: Quantity::Resonance,
            leading_terms: vec![
                Term::new(c(4.0 * PI * ac / a2, 0.0), r(1, 1), 0),
                Term::new(c(0.0, -16.0 * PI.powi(3) / (A * th0).powi(2)), r(2, 1), -2),
            ],
            remainder: Order::big(r(2, 1), 0),
            real_remainder: Some(Order::big(r(2, 1), 0)),
            imag_remainder: Some(Order::little(r(2, 1), -2)),
        },
        (2, Dimension::One, _) => one(
            vec![
                Term::new(c(ac, 0.0), r(1, 1), 0),
                Term::new(c(0.0, -1.0 / (2.0 * ac.sqrt())), r(3, 2), 0),
            ],
            Quantity::Resonance,
            Order::big(r(2, 1), 0),
        ),
        (2, _, _) => ExpansionResult {
            quantity: Quantity::Resonance,
            leading_terms: vec![
                Term::new(c(4.0 * PI * ac / a2, 0.0), r(1, 1), 0),
                Term::new(c(0.0, -PI / a2), r(2, 1), 0),
            ],
            remainder: Order::big(r(2, 1), 1),
            real_remainder: Some(Order::big(r(2, 1), 1)),
            imag_remainder: Some(Order::little(r(2, 1), 0)),
        },
        (3, _, _) => one(
            vec![
                Term::new(c(ac / (2.0 * PI), 0.0), r(1, 1), 0),
                Term::new(c(-3.0 * ac * ac / (16.0 * PI * PI), 0.0), r(2, 1), 0),
                Term::new(c(0.0, -(ac / (2.0 * PI)).sqrt() / (8.0 * PI * PI)), r(5, 2), 0),
            ],
            Quantity::Resonance,
            Order::big(r(3, 1), 0),
        ),
        (4, _, SignClass::Positive) => one(
            vec![
                Term::new(c(1.0 / th0, 0.0), r(2, 1), 0),
                Term::new(c(0.0, -2.0 / th0.powf(2.5)), r(3, 1), 0),
            ],
            Quantity::Resonance,
            Order::big(r(4, 1), 0),
        ),
        (4, _, SignClass::Zero) => one(
            vec![Term::new(c(-(2f64.powf(-2.0 / 3.0)), 0.0), r(4, 3), 0)],
            Quantity::Eigenvalue,
            Order::big(r(8, 3), 0),
        ),
        (4, _, SignClass::Negative) => one(
            vec![Term::new(c(-1.0 / th0.abs(), 0.0), r(2, 1), 0)],
            Quantity::Eigenvalue,
            Order::big(r(3, 1), 0),
        ),
        (5, _, SignClass::Positive) => ExpansionResult {
            quantity: Quantity::Resonance,
            leading_terms: vec![
                Term::new(c(4.0 * PI / (a2 * th0), 0.0), r(2, 1), 0),
                Term::new(c(0.0, -4.0 * PI.powi(3) / (a2 * th0 * th0)), r(2, 1), -2),
            ],
            remainder: Order::big(r(2, 1), -1),
            real_remainder: Some(Order::big(r(2, 1), -1)),
            imag_remainder: Some(Order::little(r(2, 1), -2)),
        },
        (5, _, SignClass::Zero) => one(
            vec![Term::new(c(-2.0 / a2, 0.0), r(2, 1), 1)],
            Quantity::Eigenvalue,
            Order::little(r(2, 1), -1),
        ),
        (5, _, SignClass::Negative) => one(
            vec![Term::new(c(-4.0 * PI / (a2 * th0.abs()), 0.0), r(2, 1), 0)],
            Quantity::Eigenvalue,
            Order::big(r(2, 1), -1),
        ),
        (6, _, _) => {
            return Err(Error::Unsupported(
                "the d = 3, c = 0 singularity stays at z = 0; no expansion in eps".into(),
            ))
        }
        (7, Dimension::One, _) => one(
            vec![Term::new(c(-params.c, 0.0), r(1, 1), 0)],
            Quantity::Eigenvalue,
            Order::big(r(3, 2), 0),
        ),
        (7, Dimension::Two, _) => one(
            vec![Term::new(c(-4.0 * PI * params.c / a2, 0.0), r(1, 1), 0)],
            Quantity::Eigenvalue,
            Order::big(r(2, 1), 1),
        ),
        (7, _, _) => one(
            vec![Term::new(c(-params.c / (2.0 * PI), 0.0), r(1, 1), 0)],
            Quantity::Eigenvalue,
            Order::big(r(2, 1), 0),
        ),
        _ => return Err(Error::Unsupported(format!("no expansion for {regime}"))),
    };
    Ok(res)
}

/// Lower bound B(eps) < E_eps < 0 for the threshold eigenvalue with
/// theta0 = 0, c < 0, b = 1.
pub fn eigenvalue_lower_bound(params: &ModelParams) -> Result<f64> {
    let regime = Regime::classify(params);
    if regime.cell() != 2 || params.b != 1.0 {
        return Err(Error::Unsupported(format!("no eigenvalue bound for {regime}")));
    }
    let eps = params.epsilon;
    let ac = params.c.abs();
    Ok(match params.d {
        Dimension::One => -eps * eps / (4.0 * ac * ac),
        _ => -(-4.0 * PI * ac / eps + 4.0 * PI / A).exp(),
    })
}

/// Least-squares slope of ln|numeric - expansion| against ln eps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderFit {
    pub part: Part,
    pub epsilons: Vec<f64>,
    pub residuals: Vec<f64>,
    pub fitted_slope: f64,
    pub r_squared: f64,
    pub predicted: Order,
    /// Ladder points dropped because the residual sat at the rounding floor.
    pub excluded: Vec<f64>,
}

impl OrderFit {
    pub fn matches(&self, tolerance: f64) -> bool {
        (self.fitted_slope - self.predicted.power_f64()).abs() <= tolerance
    }
}

/// Minimum span of the ladder, in decades.
pub const MIN_DECADES: f64 = 1.5;

/// Fits the remainder order of `expansion` against `numeric` values on a
/// decreasing eps ladder. Log factors of the predicted remainder are divided
/// out before the fit.
pub fn fit_remainder_order(numeric: &[(f64, Complex64)], expansion: &ExpansionResult, part: Part) -> Result<OrderFit> {
    if numeric.len() < 4 {
        return Err(Error::Domain(format!(
            "need at least 4 ladder points, got {}",
            numeric.len()
        )));
    }
    if numeric.windows(2).any(|w| !(w[1].0 < w[0].0)) || numeric.iter().any(|p| !(p.0 > 0.0 && p.0 < 1.0)) {
        return Err(Error::Domain(
            "eps ladder must be strictly decreasing inside (0, 1)".into(),
        ));
    }
    let span = (numeric[0].0 / numeric[numeric.len() - 1].0).log10();
    if span < MIN_DECADES - 1e-9 {
        return Err(Error::Domain(format!(
            "ladder spans {span:.2} decades, need {MIN_DECADES}"
        )));
    }
    let predicted = expansion.remainder_for(part);
    let mut eps_used = Vec::new();
    let mut residuals = Vec::new();
    let mut excluded = Vec::new();
    for &(eps, value) in numeric {
        let diff = value - expansion.evaluate(eps);
        let (res, size) = match part {
            Part::Modulus => (diff.norm(), value.norm()),
            Part::Real => (diff.re.abs(), value.re.abs()),
            Part::Imag => (diff.im.abs(), value.im.abs()),
        };
        if res < 100.0 * f64::EPSILON * size || res == 0.0 {
            excluded.push(eps);
            continue;
        }
        eps_used.push(eps);
        residuals.push(res / eps.ln().abs().powi(predicted.log_power));
    }
    if eps_used.len() < 2 {
        return Err(Error::PrecisionFloor { excluded });
    }
    let xs: Vec<f64> = eps_used.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = residuals.iter().map(|r| r.ln()).collect();
    let (slope, r2) = linear_fit(&xs, &ys);
    Ok(OrderFit {
        part,
        epsilons: eps_used,
        residuals,
        fitted_slope: slope,
        r_squared: r2,
        predicted,
        excluded,
    })
}

/// (slope, r^2) of the least-squares line through (xs, ys).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expansion(d: Dimension, th0: f64, c: f64) -> ExpansionResult {
        let p = ModelParams::new(d, th0, c, 1e-3);
        leading_order(&p, &Regime::classify(&p)).unwrap()
    }

    #[test]
    fn cell1_d1_terms() {
        let e = expansion(Dimension::One, 1.0, -1.0);
        assert_eq!(e.leading_terms.len(), 3);
        assert_eq!(e.leading_terms[0].coefficient, c(1.0, 0.0));
        assert_eq!(e.leading_terms[1].coefficient, c(0.75, 0.0));
        assert_eq!(e.leading_terms[2].coefficient, c(0.0, -2.0));
        assert_eq!(e.leading_terms[2].power, r(5, 2));
        assert_eq!(e.remainder.power, r(4, 1));
    }

    #[test]
    fn cell7_d3_terms() {
        let e = expansion(Dimension::Three, 0.2, 0.5);
        assert_eq!(e.leading_terms, vec![Term::new(c(-0.5 / (2.0 * PI), 0.0), r(1, 1), 0)]);
        assert_eq!(e.remainder.power, r(2, 1));
    }

    #[test]
    fn cell5_log_term() {
        let e = expansion(Dimension::Two, 0.0, 0.0);
        assert_eq!(e.leading_terms[0].log_power, 1);
        assert!((e.leading_terms[0].coefficient.re + 2.0 / (A * A)).abs() < 1e-18);
        assert!(e.remainder.little_o);
        let eps: f64 = 1e-4;
        let want = -2.0 / (A * A) * eps * eps * eps.ln().abs();
        assert!((e.evaluate(eps).re - want).abs() < 1e-24);
    }

    #[test]
    fn cell6_unsupported() {
        let p = ModelParams::new(Dimension::Three, 0.2, 0.0, 1e-3);
        assert!(matches!(
            leading_order(&p, &Regime::classify(&p)),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn all_expansions_well_ordered() {
        for d in [Dimension::One, Dimension::Two, Dimension::Three] {
            for th0 in [-1.0, 0.0, 1.0] {
                for cc in [-1.0, 0.0, 1.0] {
                    let p = ModelParams::new(d, th0, cc, 1e-3);
                    if let Ok(e) = leading_order(&p, &Regime::classify(&p)) {
                        assert!(e.is_well_ordered(), "d={d} th0={th0} c={cc}");
                    }
                }
            }
        }
    }

    #[test]
    fn exact_values_hit_the_floor() {
        let e = ExpansionResult {
            quantity: Quantity::Eigenvalue,
            leading_terms: vec![
                Term::new(c(-1.0, 0.0), r(1, 1), 0),
                Term::new(c(-0.25, 0.0), r(2, 1), 0),
            ],
            remainder: Order::big(r(3, 1), 0),
            real_remainder: None,
            imag_remainder: None,
        };
        let ladder: Vec<(f64, Complex64)> = [1e-1, 1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&x: &f64| (x, c(-x * (4.0 + x) / 4.0, 0.0)))
            .collect();
        assert!(matches!(
            fit_remainder_order(&ladder, &e, Part::Modulus),
            Err(Error::PrecisionFloor { .. })
        ));
    }

    #[test]
    fn synthetic_slope() {
        let e = ExpansionResult {
            quantity: Quantity::Resonance,
            leading_terms: vec![Term::new(c(1.0, 0.0), r(1, 1), 0)],
            remainder: Order::big(r(3, 1), 1),
            real_remainder: None,
            imag_remainder: None,
        };
        let ladder: Vec<(f64, Complex64)> = [1e-2, 1e-2_f64.powf(1.25), 1e-2_f64.powf(1.5), 1e-2_f64.powf(1.75), 1e-4]
            .iter()
            .map(|&x: &f64| (x, c(x + 0.3 * x.powi(3) * x.ln().abs(), 0.0)))
            .collect();
        let fit = fit_remainder_order(&ladder, &e, Part::Real).unwrap();
        assert!((fit.fitted_slope - 3.0).abs() < 1e-6);
        assert!(fit.r_squared > 0.999999);
    }
}
