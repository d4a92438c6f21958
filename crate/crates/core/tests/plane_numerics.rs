use std::f64::consts::PI;

use mellin_core::numerics::plane::{
    asymptotic_remainder_check, cauchy_convolve, epsilon_commutation_check, haar_moment, stokes_identity_check,
    ModeTerm, PlaneQuadrature, SFactor, Side, TestFunction,
};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `∫_a^b g` by composite Simpson with `n` (even) intervals.
fn simpson(g: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = g(a) + g(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * g(a + h * i as f64);
    }
    acc * h / 3.0
}

/// Convolution of `e^{imφ} e^{−r−1/r}` at real `t > 0`, reduced to one
/// radial integral: the angular integral of `t/(t − re^{iφ}) e^{imφ}` is
/// `2π(r/t)^{−m}` for `r < t, m ≤ 0` and `−2π(t/r)^m` for `r > t, m ≥ 1`.
fn convolve_single_mode(m: i32, t: f64) -> f64 {
    let env = |u: f64| (-u.exp() - (-u).exp()).exp();
    let lt = t.ln();
    if m <= 0 {
        let g = |u: f64| env(u) * ((u - lt) * (-m as f64)).exp();
        -(1.0 / PI) * 2.0 * PI * simpson(g, -45.0, lt, 20000)
    } else {
        let g = |u: f64| env(u) * ((lt - u) * m as f64).exp();
        (1.0 / PI) * 2.0 * PI * simpson(g, lt, lt + 8.0, 20000)
    }
}

#[test]
fn convolution_matches_radial_reduction() {
    let q = PlaneQuadrature::default();
    for m in [-2, 0, 1, 3] {
        for t in [0.3, 1.0, 2.5, 10.0] {
            let got = cauchy_convolve(&TestFunction::radial_mode(m), c(t, 0.0), c(0.0, 0.0), &q).unwrap();
            let want = convolve_single_mode(m, t);
            assert!((got.value.re - want).abs() < 1e-9 * want.abs().max(1e-3), "m={m} t={t}: {} vs {want}", got.value);
            assert!(got.value.im.abs() < 1e-9, "m={m} t={t}: {}", got.value);
        }
    }
}

#[test]
fn convolution_is_linear() {
    let q = PlaneQuadrature::default();
    let f = TestFunction::radial_mode(-1);
    let g = TestFunction::radial_mode(2);
    let (a, b) = (c(1.5, -0.5), c(-2.0, 0.25));
    let t = c(1.2, 0.7);
    let lhs = cauchy_convolve(&f.scale(a).add(&g.scale(b)), t, c(0.0, 0.0), &q).unwrap().value;
    let rhs = a * cauchy_convolve(&f, t, c(0.0, 0.0), &q).unwrap().value
        + b * cauchy_convolve(&g, t, c(0.0, 0.0), &q).unwrap().value;
    assert!((lhs - rhs).norm() < 1e-10 * lhs.norm());
    let z = cauchy_convolve(&TestFunction::zero(), t, c(0.0, 0.0), &q).unwrap();
    assert_eq!(z.value, c(0.0, 0.0));
}

fn remainder_family(sign: i32) -> TestFunction {
    TestFunction::from_terms((0..=4).map(|m| ModeTerm::envelope(c(1.0, 0.0), sign * m)).collect())
}

#[test]
fn remainder_ratios_at_infinity() {
    let q = PlaneQuadrature::default();
    for n in 0..=3 {
        let r = asymptotic_remainder_check(&remainder_family(-1), n, &[10.0, 20.0, 40.0], Side::Infinity, c(0.0, 0.0), &q)
            .unwrap();
        assert!(r.verdict.passed(), "{r:?}");
    }
}

#[test]
fn remainder_ratios_at_zero() {
    let q = PlaneQuadrature::default();
    for n in 0..=3 {
        let r = asymptotic_remainder_check(&remainder_family(1), n, &[10.0, 20.0, 40.0], Side::Zero, c(0.0, 0.0), &q)
            .unwrap();
        assert!(r.verdict.passed(), "{r:?}");
    }
}

#[test]
fn zero_function_remainders_vanish() {
    let r = asymptotic_remainder_check(
        &TestFunction::zero(),
        2,
        &[10.0, 20.0, 40.0],
        Side::Infinity,
        c(0.0, 0.0),
        &PlaneQuadrature::default(),
    )
    .unwrap();
    assert!(r.remainders.iter().all(|&x| x == 0.0));
    assert!(r.verdict.passed());
}

fn separable_family() -> TestFunction {
    let sf = |rate: f64, p: Vec<f64>| Some(SFactor::new(c(rate, 0.0), p.into_iter().map(|x| c(x, 0.0)).collect()).unwrap());
    let mut terms = Vec::new();
    for m in -6..=7 {
        let mut t = ModeTerm::envelope(c(1.0 / (1.0 + m as f64 * m as f64), 0.1 * m as f64), m);
        t.s_factor = match m.rem_euclid(3) {
            0 => sf(0.5, vec![1.0]),
            1 => sf(0.0, vec![1.0, -0.5, 0.25]),
            _ => None,
        };
        terms.push(t);
    }
    TestFunction::from_terms(terms)
}

#[test]
fn epsilon_commutation_on_separable_family() {
    let q = PlaneQuadrature::default();
    for s in [c(0.3, 0.0), c(-0.7, 1.1), c(1.5, -0.4)] {
        let r = epsilon_commutation_check(&separable_family(), s, 6, &q, 1e-6).unwrap();
        assert!(r.passed(), "max {:e}", r.max_relative);
    }
}

#[test]
fn epsilon_commutation_k0_theta_transport() {
    let q = PlaneQuadrature::default();
    let f = TestFunction::radial_mode(0);
    let s = c(0.4, 0.2);
    let r = epsilon_commutation_check(&f, s, 0, &q, 1e-6).unwrap();
    let c0 = haar_moment(&f, 0, Side::Infinity, s, &q).unwrap().value;
    assert_eq!(r.points[0].label, "theta infinity k=0");
    assert!((r.points[0].rhs - (-s - 1.0) * c0).norm() < 1e-12 * c0.norm());
    assert!(r.passed());
    let z = epsilon_commutation_check(&TestFunction::zero(), s, 3, &q, 1e-6).unwrap();
    assert!(z.points.iter().all(|p| p.residual == 0.0));
}

#[test]
fn stokes_on_mode_family() {
    let q = PlaneQuadrature::default();
    for k in 0..=8 {
        for m in -9..=3 {
            let r = stokes_identity_check(&TestFunction::radial_mode(m), k, c(0.0, 0.0), &q, 1e-6).unwrap();
            assert!(r.passed(), "k={k} m={m}: {r:?}");
        }
    }
}
