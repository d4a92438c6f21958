use mellin_core::numerics::ray::{ray_mellin, verify_commutation, ExpLaurent, SGrid};
use mellin_core::opparse::parse;
use num_complex::Complex64;
use statrs::function::gamma::gamma;

/// `2 K_s(2) = ∫_0^∞ t^{s−1} e^{−t−1/t} dt = 2∫_0^∞ e^{−2cosh x} cosh(sx) dx`.
fn two_bessel_k(s: f64) -> f64 {
    let h = 0.005;
    let mut acc = 0.5 * (-2.0f64).exp();
    for i in 1..8000 {
        let x = h * i as f64;
        acc += (-2.0 * x.cosh()).exp() * (s * x).cosh();
    }
    2.0 * acc * h
}

#[test]
fn exponential_matches_gamma() {
    let f = ExpLaurent::exponential(1.0);
    for i in 0..20 {
        let s = 0.5 + 0.25 * i as f64;
        let v = ray_mellin(&f, Complex64::new(s, 0.0)).unwrap().value;
        assert!((v.re - gamma(s)).abs() < 1e-12 * gamma(s), "s={s}");
    }
}

#[test]
fn gaussian_is_half_gamma_of_half() {
    let f = ExpLaurent::gaussian();
    for s in [0.5, 1.0, 2.2, 3.0] {
        let v = ray_mellin(&f, Complex64::new(s, 0.0)).unwrap().value;
        let want = 0.5 * gamma(s / 2.0);
        assert!((v.re - want).abs() < 1e-12 * want);
    }
}

#[test]
fn bessel_matches_cosh_integral() {
    let f = ExpLaurent::bessel();
    for s in [-1.5, 0.0, 0.5, 2.0, 3.0] {
        let v = ray_mellin(&f, Complex64::new(s, 0.0)).unwrap().value;
        let want = two_bessel_k(s);
        assert!((v.re - want).abs() < 1e-11 * want, "s={s}: {} vs {want}", v.re);
    }
}

#[test]
fn gamma_recurrence_with_imaginary_offset() {
    let f = ExpLaurent::exponential(1.0);
    for i in 0..10 {
        let s = Complex64::new(0.5 + 0.25 * i as f64, 0.7);
        let a = ray_mellin(&f, s + 1.0).unwrap().value;
        let b = ray_mellin(&f, s).unwrap().value;
        assert!((a - s * b).norm() < 1e-8 * a.norm());
    }
}

#[test]
fn commutation_builtin_cases() {
    let grid = SGrid::new(0.5, 3.0, 20, 0.0).unwrap();
    let cases = [
        ("th + t", ExpLaurent::exponential(1.0), "tau - s", 1e-8),
        ("th + 2*t^2", ExpLaurent::gaussian(), "2*tau^2 - s", 1e-8),
        ("th + t - tinv", ExpLaurent::bessel(), "tau - s - tauinv", 1e-6),
    ];
    for (op, f, q, tol) in cases {
        let r = verify_commutation(&parse(op).unwrap(), &f, op, &grid, tol).unwrap();
        assert_eq!(r.operator.as_deref(), Some(q));
        assert_eq!(r.points.len(), 20);
        assert!(r.passed(), "{op}: {:e}", r.max_relative);
    }
}
