//! Mellin transforms along the positive ray and the commutation harness
//! `mellin(P·f) ↔ Q·mellin(f)`.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::quadrature::{CompensatedSum, GaussRule, QuadValue};
use super::report::ResidualReport;
use crate::error::{Error, Result};
use crate::mellin::{difference_terms, mellin_op};
use crate::ore::{Algebra, OreOperator};

/// `f(t) = t^power · exp(Σ_k exponent[k] t^k)` on `t > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpLaurent {
    #[serde(default)]
    pub power: f64,
    pub exponent: BTreeMap<i32, f64>,
    /// Overall constant; `0` is the zero function.
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

impl ExpLaurent {
    pub fn new(power: f64, exponent: impl IntoIterator<Item = (i32, f64)>) -> Self {
        let exponent = exponent.into_iter().filter(|&(_, a)| a != 0.0).collect();
        ExpLaurent { power, exponent, scale: 1.0 }
    }

    pub fn zero() -> Self {
        ExpLaurent { power: 0.0, exponent: BTreeMap::new(), scale: 0.0 }
    }

    /// `e^{−rate·t}`.
    pub fn exponential(rate: f64) -> Self {
        Self::new(0.0, [(1, -rate)])
    }

    /// `e^{−t²}`.
    pub fn gaussian() -> Self {
        Self::new(0.0, [(2, -1.0)])
    }

    /// `e^{−t−1/t}`.
    pub fn bessel() -> Self {
        Self::new(0.0, [(1, -1.0), (-1, -1.0)])
    }

    pub fn is_zero(&self) -> bool {
        self.scale == 0.0
    }

    fn log_abs(&self, u: f64, s: Complex64) -> f64 {
        self.scale.abs().ln() + (self.power + s.re) * u + self.exponent.iter().map(|(&k, a)| a * (k as f64 * u).exp()).sum::<f64>()
    }

    /// `f(e^u) e^{su}`.
    fn mellin_integrand(&self, u: f64, s: Complex64) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let e: f64 = self.exponent.iter().map(|(&k, a)| a * (k as f64 * u).exp()).sum();
        self.scale * (Complex64::new(e + self.power * u, 0.0) + s * u).exp()
    }

    pub fn eval(&self, t: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let e: f64 = self.exponent.iter().map(|(&k, a)| a * t.powi(k)).sum();
        self.scale * t.powf(self.power) * e.exp()
    }

    /// Whether the Mellin integral converges at `s`: each end must be
    /// governed by a decaying exponential or by a decaying power.
    pub fn converges_at(&self, s: Complex64) -> bool {
        if self.is_zero() {
            return true;
        }
        let sigma = self.power + s.re;
        let top = self.exponent.iter().next_back().filter(|(&k, _)| k > 0);
        let bottom = self.exponent.iter().next().filter(|(&k, _)| k < 0);
        let at_inf = match top {
            Some((_, &a)) => a < 0.0,
            None => sigma < 0.0,
        };
        let at_zero = match bottom {
            Some((_, &a)) => a < 0.0,
            None => sigma > 0.0,
        };
        at_inf && at_zero
    }

    /// Laurent polynomials `Q_b` with `θ^b f = Q_b f`:
    /// `Q_0 = 1`, `Q_{b+1} = θQ_b + Q_b·(power + Σ k a_k t^k)`.
    fn euler_factors(&self, max: u32) -> Vec<BTreeMap<i32, f64>> {
        let mut log_deriv: BTreeMap<i32, f64> = BTreeMap::new();
        if self.power != 0.0 {
            log_deriv.insert(0, self.power);
        }
        for (&k, &a) in &self.exponent {
            *log_deriv.entry(k).or_default() += k as f64 * a;
        }
        let mut out = vec![BTreeMap::from([(0, 1.0)])];
        for b in 0..max as usize {
            let q = &out[b];
            let mut next: BTreeMap<i32, f64> = BTreeMap::new();
            for (&i, &c) in q {
                if i != 0 {
                    *next.entry(i).or_default() += i as f64 * c;
                }
                for (&j, &d) in &log_deriv {
                    *next.entry(i + j).or_default() += c * d;
                }
            }
            out.push(next);
        }
        out
    }

    /// The individual terms `c·t^α·(θ^β f)(t)` of `P·f` at `t`.
    pub fn operator_terms(&self, p: &OreOperator, t: f64) -> Result<Vec<f64>> {
        require_ray_operator(p)?;
        let max_b = p.terms().keys().map(|m| m.theta[0]).max().unwrap_or(0);
        let factors = self.euler_factors(max_b);
        let f = self.eval(t);
        p.terms()
            .iter()
            .map(|(m, c)| {
                let c = c.to_f64().ok_or_else(|| Error::InvalidInput("coefficient out of f64 range".into()))?;
                let q: f64 = factors[m.theta[0] as usize].iter().map(|(&i, &d)| d * t.powi(i)).sum();
                let alpha = i32::try_from(m.t[0]).map_err(|_| Error::InvalidInput("exponent out of range".into()))?;
                Ok(c * t.powi(alpha) * q * f)
            })
            .collect()
    }
}

fn require_ray_operator(p: &OreOperator) -> Result<()> {
    if p.algebra() != Algebra::D {
        return Err(Error::MixedAlgebra {
            algebra: p.algebra(),
            detail: "expected an operator in D".into(),
        });
    }
    if p.arity() != 1 {
        return Err(Error::ArityMismatch { left: p.arity(), right: 1 });
    }
    Ok(())
}

const PANEL_CAP: usize = 4000;
const QUIET_PANELS: usize = 3;
const QUIET_FRACTION: f64 = 1e-17;

/// `∫_0^∞ f(t) t^{s−1} dt = ∫ f(e^u) e^{su} du`, on panels of width `ln 2`
/// in `u` walking outward from `t = 1` until three consecutive panels are
/// negligible. Each panel uses Gauss–Legendre 20 with the 15-point rule as
/// error estimate.
pub fn ray_mellin(f: &ExpLaurent, s: Complex64) -> Result<QuadValue> {
    if f.is_zero() {
        return Ok(QuadValue::zero());
    }
    if !s.re.is_finite() || !s.im.is_finite() {
        return Err(Error::QuadratureFailure(format!("non-finite s = {s}")));
    }
    if !f.converges_at(s) {
        return Err(Error::QuadratureFailure(format!("s = {s} lies outside the convergence strip")));
    }
    let hi = GaussRule::new(20)?;
    let lo = GaussRule::new(15)?;
    // panel-by-panel in a fixed order: 0 outward to +∞, then 0 outward to −∞
    let mut value = CompensatedSum::new();
    let mut error = 0.0;
    let mut scale = 0.0;
    for dir in [1.0, -1.0] {
        let mut quiet = 0;
        let mut a = 0.0f64;
        for panel in 0.. {
            if panel == PANEL_CAP {
                return Err(Error::QuadratureFailure(format!("no decay after {PANEL_CAP} panels at s = {s}")));
            }
            let b = a + dir * LN_2;
            let (x, y) = if dir > 0.0 { (a, b) } else { (b, a) };
            let vh = hi.integrate(x, y, |u| f.mellin_integrand(u, s));
            let vl = lo.integrate(x, y, |u| f.mellin_integrand(u, s));
            let abs = hi.scaled(x, y).map(|(u, w)| w * f.mellin_integrand(u, s).norm()).sum::<f64>();
            value.add(vh);
            error += (vh - vl).norm();
            scale += abs;
            // a panel may be tiny at a node and large between; the end test uses the envelope too
            let edge = f.log_abs(b, s).exp();
            if abs <= QUIET_FRACTION * scale && edge <= QUIET_FRACTION * scale {
                quiet += 1;
                if quiet == QUIET_PANELS {
                    break;
                }
            } else {
                quiet = 0;
            }
            a = b;
        }
    }
    let q = QuadValue { value: value.value(), error, scale };
    if !q.value.re.is_finite() || !q.value.im.is_finite() {
        return Err(Error::QuadratureFailure(format!("non-finite Mellin transform at s = {s}")));
    }
    Ok(q)
}

/// Real parts equally spaced on `[start, stop]`, all with imaginary part `offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub offset: f64,
}

impl SGrid {
    pub fn new(start: f64, stop: f64, count: usize, offset: f64) -> Result<Self> {
        if count == 0 || !start.is_finite() || !stop.is_finite() || !offset.is_finite() {
            return Err(Error::InvalidInput("s-grid needs count >= 1 and finite bounds".into()));
        }
        Ok(SGrid { start, stop, count, offset })
    }

    pub fn points(&self) -> Vec<Complex64> {
        (0..self.count)
            .map(|i| {
                let x = if self.count == 1 {
                    self.start
                } else {
                    self.start + (self.stop - self.start) * i as f64 / (self.count - 1) as f64
                };
                Complex64::new(x, self.offset)
            })
            .collect()
    }
}

/// Sample points of the annihilation guard.
pub const GUARD_POINTS: [f64; 6] = [0.25, 0.5, 1.0, 1.5, 2.0, 3.0];
pub const GUARD_TOLERANCE: f64 = 1e-8;

/// Relative size `|P·f| / Σ|terms|` at each guard point.
pub fn annihilation_residuals(p: &OreOperator, f: &ExpLaurent) -> Result<Vec<(f64, f64)>> {
    GUARD_POINTS
        .iter()
        .map(|&t| {
            let terms = f.operator_terms(p, t)?;
            let total: f64 = terms.iter().sum();
            let abs: f64 = terms.iter().map(|x| x.abs()).sum();
            Ok((t, if abs == 0.0 { 0.0 } else { total.abs() / abs }))
        })
        .collect()
}

/// Checks `Q·F = 0` on the grid, with `Q = mellin_op(P)` and `F` the ray
/// Mellin transform of `f`. Each point reports `|Σ terms| / max|term|`.
pub fn verify_commutation(
    p: &OreOperator,
    f: &ExpLaurent,
    function_id: &str,
    grid: &SGrid,
    tolerance: f64,
) -> Result<ResidualReport> {
    require_ray_operator(p)?;
    for (t, r) in annihilation_residuals(p, f)? {
        if r > GUARD_TOLERANCE {
            return Err(Error::PreconditionFailed(format!(
                "operator does not annihilate {function_id}: relative residual {r:.3e} at t = {t}"
            )));
        }
    }
    let q = mellin_op(p)?;
    let mut report = ResidualReport::new("commutation", function_id, tolerance);
    report.operator = Some(q.to_string());
    report.notes.push(format!("operator {p}"));
    for s in grid.points() {
        let failure: RefCell<Option<Error>> = RefCell::new(None);
        let qerr = RefCell::new(0.0f64);
        let eval = |z: &[Complex64]| -> Result<Complex64> {
            match ray_mellin(f, z[0]) {
                Ok(v) => {
                    *qerr.borrow_mut() += v.error;
                    Ok(v.value)
                }
                Err(e) => {
                    let msg = e.to_string();
                    failure.borrow_mut().get_or_insert(e);
                    Err(Error::QuadratureFailure(msg))
                }
            }
        };
        let terms = match difference_terms(&q, eval, &[s]) {
            Ok(t) => t,
            Err(e) => return Err(failure.into_inner().unwrap_or(e)),
        };
        let sum = terms.iter().copied().collect::<CompensatedSum>().value();
        let biggest = terms.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let relative = if biggest == 0.0 { 0.0 } else { sum.norm() / biggest };
        report.push_point(super::report::ResidualPoint {
            label: format!("s={s}"),
            s,
            lhs: sum,
            rhs: Complex64::new(0.0, 0.0),
            residual: sum.norm(),
            relative,
            quadrature_error: qerr.into_inner(),
            passed: relative <= tolerance,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opparse::parse;

    #[test]
    fn gamma_values() {
        let f = ExpLaurent::exponential(1.0);
        for (s, want) in [(1.0, 1.0), (2.0, 1.0), (3.0, 2.0), (0.5, std::f64::consts::PI.sqrt())] {
            let v = ray_mellin(&f, Complex64::new(s, 0.0)).unwrap();
            assert!((v.value.re - want).abs() < 1e-12 * want, "s={s}: {}", v.value);
            assert!(v.error < 1e-10);
        }
        assert_eq!(ray_mellin(&ExpLaurent::zero(), Complex64::new(1.0, 0.0)).unwrap().value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn strip_is_enforced() {
        let err = ray_mellin(&ExpLaurent::exponential(1.0), Complex64::new(-0.5, 0.0)).unwrap_err();
        assert!(matches!(err, Error::QuadratureFailure(_)));
        assert!(ExpLaurent::bessel().converges_at(Complex64::new(-7.0, 2.0)));
    }

    #[test]
    fn euler_factors_match_finite_difference() {
        let f = ExpLaurent::new(0.5, [(2, -1.0), (-1, -0.5)]);
        let p = parse("th^2").unwrap();
        let t = 1.3f64;
        let h = 1e-4;
        // θ² f = t f' + t² f''
        let d1 = (f.eval(t + h) - f.eval(t - h)) / (2.0 * h);
        let d2 = (f.eval(t + h) - 2.0 * f.eval(t) + f.eval(t - h)) / (h * h);
        let want = t * d1 + t * t * d2;
        let got: f64 = f.operator_terms(&p, t).unwrap().iter().sum();
        assert!((got - want).abs() < 1e-6 * want.abs());
    }

    #[test]
    fn guard_rejects_wrong_pairing() {
        let p = parse("th + t").unwrap();
        let grid = SGrid::new(0.5, 3.0, 4, 0.0).unwrap();
        let err = verify_commutation(&p, &ExpLaurent::gaussian(), "gaussian", &grid, 1e-8).unwrap_err();
        assert!(matches!(err, Error::PreconditionFailed(_)));
        let ok = verify_commutation(&p, &ExpLaurent::exponential(1.0), "exponential", &grid, 1e-8).unwrap();
        assert!(ok.passed());
        assert_eq!(ok.operator.as_deref(), Some("tau - s"));
    }
}
