use std::f64::consts::PI;

use approx::assert_relative_eq;
use num_complex::Complex64;
use num_rational::Ratio;
use proptest::prelude::*;
use resonance_core::asymptotics::{
    eigenvalue_lower_bound, fit_remainder_order, leading_order, ExpansionResult, Part, Quantity,
};
use resonance_core::dispersion::ModelParams;
use resonance_core::riemann::{Dimension, A};
use resonance_core::rootfinder::{locate_singularities, Regime, SingularityKind, SolveOptions};
use resonance_core::Error;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn expansion(d: Dimension, th0: f64, c: f64) -> ExpansionResult {
    let p = ModelParams::new(d, th0, c, 1e-3);
    leading_order(&p, &Regime::classify(&p)).unwrap()
}

fn terms(e: &ExpansionResult) -> Vec<(Complex64, f64, i32)> {
    e.leading_terms
        .iter()
        .map(|t| {
            (
                t.coefficient,
                *t.power.numer() as f64 / *t.power.denom() as f64,
                t.log_power,
            )
        })
        .collect()
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-13 * b.norm().max(1e-300)
}

#[test]
fn d1_positive_perturbation_terms() {
    let e = expansion(Dimension::One, 1.0, -1.0);
    let t = terms(&e);
    assert_eq!(t.len(), 3);
    assert!(close(t[0].0, Complex64::new(1.0, 0.0)) && t[0].1 == 1.0);
    assert!(close(t[1].0, Complex64::new(0.75, 0.0)) && t[1].1 == 2.0);
    assert!(close(t[2].0, Complex64::new(0.0, -2.0)) && t[2].1 == 2.5);
    assert_eq!(e.remainder.power, Ratio::from_integer(4));
    assert_eq!(e.quantity, Quantity::Resonance);
}

#[test]
fn d3_negative_perturbation_terms() {
    let e = expansion(Dimension::Three, 0.3, 2.0);
    let t = terms(&e);
    assert_eq!(t.len(), 1);
    assert!(close(t[0].0, Complex64::new(-1.0 / PI, 0.0)) && t[0].1 == 1.0 && t[0].2 == 0);
    assert_eq!(e.remainder_power(), 2.0);
    assert_eq!(e.quantity, Quantity::Eigenvalue);
}

#[test]
fn d2_off_diagonal_theta0_zero_terms() {
    let e = expansion(Dimension::Two, 0.0, 0.0);
    let t = terms(&e);
    assert_eq!(t.len(), 1);
    assert!(close(t[0].0, Complex64::new(-2.0 / (A * A), 0.0)));
    assert_eq!((t[0].1, t[0].2), (2.0, 1));
    assert!(e.remainder.little_o);
    assert_eq!(e.remainder.log_power, -1);
}

/// Hand-evaluated expansions at eps = 1/100 for one point per cell, with the
/// constant a rebuilt from ln 2 and Euler's constant.
#[test]
fn transcription_audit() {
    let a = 2.0 * PI / (2f64.ln() - EULER_GAMMA);
    assert_relative_eq!(a, A, max_relative = 1e-15);
    let eps: f64 = 0.01;
    let l = eps.ln().abs();
    let pi3 = PI * PI * PI;
    let cases: Vec<(Dimension, f64, f64, Complex64)> = vec![
        // |c| eps + (1/theta0 - c^2/4) eps^2 - 2i sqrt|c| eps^{5/2} / theta0^2
        (
            Dimension::One,
            2.0,
            -4.0,
            Complex64::new(4.0 * eps + (0.5 - 4.0) * eps * eps, -2.0 * 2.0 * eps.powf(2.5) / 4.0),
        ),
        (
            Dimension::Two,
            3.0,
            -2.0,
            Complex64::new(
                8.0 * PI * eps / (a * a),
                -16.0 * pi3 * eps * eps / (9.0 * a * a * l * l),
            ),
        ),
        (
            Dimension::One,
            0.0,
            -4.0,
            Complex64::new(4.0 * eps, -eps.powf(1.5) / 4.0),
        ),
        (
            Dimension::Two,
            0.0,
            -2.0,
            Complex64::new(8.0 * PI * eps / (a * a), -PI * eps * eps / (a * a)),
        ),
        (
            Dimension::Three,
            5.0,
            -PI,
            Complex64::new(
                eps / 2.0 - 3.0 * PI * PI * eps * eps / (16.0 * PI * PI),
                -(0.5f64).sqrt() * eps.powf(2.5) / (8.0 * PI * PI),
            ),
        ),
        (
            Dimension::One,
            4.0,
            0.0,
            Complex64::new(eps * eps / 4.0, -2.0 * eps.powi(3) / 32.0),
        ),
        (
            Dimension::One,
            0.0,
            0.0,
            Complex64::new(-(eps.powf(4.0 / 3.0)) / 2f64.powf(2.0 / 3.0), 0.0),
        ),
        (Dimension::One, -2.0, 0.0, Complex64::new(-eps * eps / 2.0, 0.0)),
        (
            Dimension::Two,
            2.0,
            0.0,
            Complex64::new(2.0 * PI * eps * eps / (a * a), -pi3 * eps * eps / (a * a * l * l)),
        ),
        (
            Dimension::Two,
            0.0,
            0.0,
            Complex64::new(-2.0 * eps * eps * l / (a * a), 0.0),
        ),
        (
            Dimension::Two,
            -2.0,
            0.0,
            Complex64::new(-2.0 * PI * eps * eps / (a * a), 0.0),
        ),
        (Dimension::One, 1.0, 3.0, Complex64::new(-3.0 * eps, 0.0)),
        (
            Dimension::Two,
            1.0,
            3.0,
            Complex64::new(-12.0 * PI * eps / (a * a), 0.0),
        ),
        (Dimension::Three, 1.0, 3.0, Complex64::new(-3.0 * eps / (2.0 * PI), 0.0)),
    ];
    for (d, th0, c, want) in cases {
        let p = ModelParams::new(d, th0, c, eps);
        let got = leading_order(&p, &Regime::classify(&p)).unwrap().evaluate(eps);
        assert!(close(got, want), "d = {d}, theta0 = {th0}, c = {c}: {got} vs {want}");
    }
}

#[test]
fn unsupported_cells() {
    let p = ModelParams::new(Dimension::Three, 0.5, 0.0, 1e-2);
    assert!(matches!(
        leading_order(&p, &Regime::classify(&p)),
        Err(Error::Unsupported(_))
    ));
    let p = ModelParams::new(Dimension::One, 1.0, -1.0, 1e-2).with_b(0.5);
    assert!(matches!(
        leading_order(&p, &Regime::classify(&p)),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn monotone_dominance_on_ladder() {
    let points = [
        (Dimension::One, 1.0, -1.0),
        (Dimension::Two, A, -1.0),
        (Dimension::One, 0.0, -1.0),
        (Dimension::Two, 0.0, -1.0),
        (Dimension::Three, 1.0, -2.0 * PI),
        (Dimension::One, 1.0, 0.0),
        (Dimension::Two, A, 0.0),
    ];
    for (d, th0, c) in points {
        let e = expansion(d, th0, c);
        assert!(e.is_well_ordered(), "d = {d}, theta0 = {th0}, c = {c}");
        for eps in [1e-2, 1e-3, 1e-4, 1e-5, 1e-6] {
            let sizes: Vec<f64> = e.leading_terms.iter().map(|t| t.evaluate(eps).norm()).collect();
            for w in sizes.windows(2) {
                assert!(w[1] < w[0], "d = {d}, theta0 = {th0}, c = {c}, eps = {eps}: {sizes:?}");
            }
        }
    }
}

#[test]
fn eigenvalue_bounds_hold() {
    for (d, ladder) in [
        (Dimension::One, vec![1e-2, 1e-3, 1e-4]),
        (Dimension::Two, vec![0.05, 0.03, 0.02]),
    ] {
        for eps in ladder {
            let p = ModelParams::new(d, 0.0, -1.0, eps);
            let bound = eigenvalue_lower_bound(&p).unwrap();
            let r = locate_singularities(&p, &SolveOptions::default()).unwrap();
            let e = r
                .singularities
                .iter()
                .find(|s| s.kind == SingularityKind::IsolatedEigenvalue)
                .unwrap();
            assert!(e.location.re < 0.0, "d = {d}, eps = {eps}");
            // In d = 2 the eigenvalue sits exponentially close to the bound and
            // ln(lambda) is only resolved to about 1e-10.
            let slack = if d == Dimension::Two { 1e-9 } else { 1e-12 };
            assert!(
                e.location.re >= bound * (1.0 + slack),
                "d = {d}, eps = {eps}: {} < {bound}",
                e.location.re
            );
        }
    }
    let p = ModelParams::new(Dimension::One, 1.0, -1.0, 1e-2);
    assert!(eigenvalue_lower_bound(&p).is_err());
}

fn ladder(n: usize, from: f64, step: f64) -> Vec<f64> {
    (0..n).map(|k| 10f64.powf(from - step * k as f64)).collect()
}

#[test]
fn fit_recovers_synthetic_order() {
    let e = expansion(Dimension::One, 1.0, -1.0);
    let numeric: Vec<(f64, Complex64)> = ladder(4, -2.0, 0.5)
        .into_iter()
        .map(|eps| (eps, e.evaluate(eps) + Complex64::new(3.0, 1.0) * eps.powi(4)))
        .collect();
    let f = fit_remainder_order(&numeric, &e, Part::Modulus).unwrap();
    assert_relative_eq!(f.fitted_slope, 4.0, epsilon = 1e-6);
    assert!(f.matches(0.1));
    assert!(f.r_squared > 0.999_999);
    assert!(f.excluded.is_empty());
}

#[test]
fn fit_divides_out_logs() {
    let e = expansion(Dimension::Two, 0.0, -1.0);
    let numeric: Vec<(f64, Complex64)> = ladder(5, -2.0, 0.5)
        .into_iter()
        .map(|eps| {
            (
                eps,
                e.evaluate(eps) + Complex64::new(0.5 * eps * eps * eps.ln().abs(), 0.0),
            )
        })
        .collect();
    let f = fit_remainder_order(&numeric, &e, Part::Real).unwrap();
    assert_relative_eq!(f.fitted_slope, 2.0, epsilon = 1e-6);
}

#[test]
fn fit_rejects_bad_ladders() {
    let e = expansion(Dimension::One, 1.0, -1.0);
    let pts = |eps: Vec<f64>| eps.into_iter().map(|x| (x, Complex64::new(x, 0.0))).collect::<Vec<_>>();
    assert!(fit_remainder_order(&pts(ladder(3, -2.0, 1.0)), &e, Part::Modulus).is_err());
    assert!(fit_remainder_order(&pts(ladder(4, -2.0, 0.25)), &e, Part::Modulus).is_err());
    assert!(fit_remainder_order(&pts(vec![1e-4, 1e-3, 1e-2, 1e-1]), &e, Part::Modulus).is_err());
}

#[test]
fn exact_expansion_hits_precision_floor() {
    let e = expansion(Dimension::One, 1.0, 2.0);
    let numeric: Vec<(f64, Complex64)> = ladder(4, -2.0, 0.5)
        .into_iter()
        .map(|eps| (eps, e.evaluate(eps)))
        .collect();
    match fit_remainder_order(&numeric, &e, Part::Modulus) {
        Err(Error::PrecisionFloor { excluded }) => assert_eq!(excluded.len(), 4),
        other => panic!("{other:?}"),
    }
}

#[test]
fn cluster_eigenvalue_remainder_order() {
    let eps_ladder = ladder(4, -2.0, 0.5);
    let e = expansion(Dimension::One, 0.0, 0.0);
    let numeric: Vec<(f64, Complex64)> = eps_ladder
        .iter()
        .map(|&eps| {
            let r = locate_singularities(
                &ModelParams::new(Dimension::One, 0.0, 0.0, eps),
                &SolveOptions::default(),
            )
            .unwrap();
            let s = r
                .singularities
                .iter()
                .find(|s| s.kind == SingularityKind::IsolatedEigenvalue)
                .unwrap();
            (eps, s.location)
        })
        .collect();
    let f = fit_remainder_order(&numeric, &e, Part::Modulus).unwrap();
    assert!((f.fitted_slope - 8.0 / 3.0).abs() <= 0.3, "{}", f.fitted_slope);
}

proptest! {
    #[test]
    fn expansions_are_well_ordered(th0 in 0.1f64..10.0, c in 0.1f64..10.0) {
        for (d, t, cc) in [(Dimension::One, th0, -c), (Dimension::Three, th0, -c), (Dimension::One, th0, 0.0)] {
            let e = expansion(d, t, cc);
            prop_assert!(e.is_well_ordered());
            prop_assert!(e.evaluate(1e-3).re > 0.0);
        }
        for (d, t, cc) in [(Dimension::One, th0, c), (Dimension::Two, th0, c), (Dimension::Three, th0, c), (Dimension::Two, -th0, 0.0)] {
            let e = expansion(d, t, cc);
            prop_assert_eq!(e.quantity, Quantity::Eigenvalue);
            prop_assert!(e.evaluate(1e-3).re < 0.0 && e.evaluate(1e-3).im == 0.0);
        }
    }
}
