//! Taylor coefficients in a holomorphic parameter by contour quadrature:
//! `u_α(t) = (1/2iπ) ∮ f(t, ξ) (ξ − T0)^{−α−1} dξ` on `|ξ − T0| = R`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quadrature::{trapezoid_angles, CompensatedSum};
use super::report::{relative_residual, CheckVerdict, ResidualReport};
use crate::error::{Error, Result};

/// Evaluator `(t, T) ↦ f(t, T)`.
pub type Evaluator<'a> = &'a (dyn Fn(Complex64, Complex64) -> Complex64 + Sync);

/// Circle `|T − center| = radius` sampled at `nodes` equally spaced points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub center: Complex64,
    pub radius: f64,
    pub nodes: usize,
}

impl Contour {
    pub fn new(center: Complex64, radius: f64, nodes: usize) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidInput(format!("contour radius must be positive, got {radius}")));
        }
        if nodes < 4 {
            return Err(Error::InvalidInput("contour needs at least 4 nodes".into()));
        }
        Ok(Contour { center, radius, nodes })
    }

    /// `u_0(t), …, u_{alpha_max}(t)` by the trapezoid rule in the angle.
    pub fn coefficients(&self, f: Evaluator, t: Complex64, alpha_max: usize) -> Result<Vec<Complex64>> {
        let angles = trapezoid_angles(self.nodes);
        let values: Vec<Complex64> = angles
            .iter()
            .map(|&a| f(t, self.center + Complex64::from_polar(self.radius, a)))
            .collect();
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::QuadratureFailure(format!("non-finite value on the contour at t = {t}")));
        }
        Ok((0..=alpha_max)
            .map(|alpha| {
                let sum = angles
                    .iter()
                    .zip(&values)
                    .map(|(&a, v)| v * Complex64::from_polar(1.0, -(alpha as f64) * a))
                    .collect::<CompensatedSum>()
                    .value();
                sum / (self.nodes as f64 * self.radius.powi(alpha as i32))
            })
            .collect())
    }

    pub fn sup_on_circle(&self, f: Evaluator, t: Complex64) -> f64 {
        trapezoid_angles(self.nodes)
            .iter()
            .map(|&a| f(t, self.center + Complex64::from_polar(self.radius, a)).norm())
            .fold(0.0, f64::max)
    }
}

/// Coefficient table `u_α(t_i)` with the Cauchy bound data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionTable {
    pub contour: Contour,
    pub alpha_max: usize,
    pub t_grid: Vec<Complex64>,
    /// `coefficients[α][i] = u_α(t_i)`.
    pub coefficients: Vec<Vec<Complex64>>,
    /// `sup_i |u_α(t_i)|`.
    pub norms: Vec<f64>,
    /// `C = sup |f|` over the contour and the grid.
    pub bound: f64,
    /// `‖u_α‖·R^α`, which the Cauchy estimate keeps below `C`.
    pub scaled_norms: Vec<f64>,
    pub bound_holds: bool,
}

impl ExpansionTable {
    /// `Σ_{α ≤ alpha_max} ‖u_α‖ ρ^α`.
    pub fn majorant(&self, rho: f64) -> f64 {
        self.norms.iter().enumerate().map(|(a, n)| n * rho.powi(a as i32)).sum()
    }

    /// `Σ_α u_α(t_i) (T − T0)^α`.
    pub fn partial_sum(&self, i: usize, big_t: Complex64) -> Complex64 {
        let z = big_t - self.contour.center;
        self.coefficients.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, row| acc * z + row[i])
    }
}

pub const DEFAULT_NODES: usize = 64;

/// Grid `1, 1.5, …, 8` on the positive ray.
pub fn default_t_grid() -> Vec<Complex64> {
    (0..15).map(|i| Complex64::new(1.0 + 0.5 * i as f64, 0.0)).collect()
}

pub fn parameter_expansion(f: Evaluator, contour: &Contour, alpha_max: usize, t_grid: &[Complex64]) -> Result<ExpansionTable> {
    if t_grid.is_empty() {
        return Err(Error::InvalidInput("empty t-grid".into()));
    }
    let mut coefficients = vec![Vec::with_capacity(t_grid.len()); alpha_max + 1];
    let mut bound: f64 = 0.0;
    for &t in t_grid {
        for (row, u) in coefficients.iter_mut().zip(contour.coefficients(f, t, alpha_max)?) {
            row.push(u);
        }
        bound = bound.max(contour.sup_on_circle(f, t));
    }
    let norms: Vec<f64> = coefficients.iter().map(|row| row.iter().map(|u| u.norm()).fold(0.0, f64::max)).collect();
    let scaled_norms: Vec<f64> = norms.iter().enumerate().map(|(a, n)| n * contour.radius.powi(a as i32)).collect();
    // the trapezoid sum of |f| is itself ≤ C, so only rounding can push past it
    let bound_holds = scaled_norms.iter().all(|&x| x <= bound * (1.0 + 1e-12));
    Ok(ExpansionTable {
        contour: contour.clone(),
        alpha_max,
        t_grid: t_grid.to_vec(),
        coefficients,
        norms,
        bound,
        scaled_norms,
        bound_holds,
    })
}

/// Compares the partial sums against direct evaluation on `|T − T0| = rho`
/// at `angles` points per grid value. Residuals are relative to
/// `max(|f|, 1)`, i.e. absolute for values of modulus at most one.
pub fn reconstruction_check(
    f: Evaluator,
    table: &ExpansionTable,
    rho: f64,
    angles: usize,
    tolerance: f64,
) -> Result<ResidualReport> {
    if !(rho > 0.0 && rho < table.contour.radius) {
        return Err(Error::InvalidInput(format!("rho must lie in (0, R), got {rho}")));
    }
    let mut report = ResidualReport::new("reconstruction", "parameter expansion", tolerance);
    for (i, &t) in table.t_grid.iter().enumerate() {
        for a in trapezoid_angles(angles) {
            let big_t = table.contour.center + Complex64::from_polar(rho, a);
            let lhs = table.partial_sum(i, big_t);
            let rhs = f(t, big_t);
            report.push(format!("t={t} T={big_t:.6}"), t, lhs, rhs, 1.0, 0.0);
        }
    }
    report.notes.push(format!("majorant sum at rho: {:.6e}", table.majorant(rho)));
    Ok(report)
}

/// For `f = t^c·w(T)`, every `u_α` must satisfy `(t∂_t − c) u_α = 0`. The
/// derivative in `t` is a Cauchy integral over `|z − t| = |t|/4`, so `f`
/// must be holomorphic in `t` there. Residuals are relative to the Cauchy
/// bound `C/R^α` on `|u_α|`.
pub fn annihilation_check(f: Evaluator, table: &ExpansionTable, c: Complex64, tolerance: f64) -> Result<ResidualReport> {
    const RING: usize = 32;
    let mut report = ResidualReport::new("annihilation", "parameter expansion", tolerance);
    let contour = &table.contour;
    for (i, &t) in table.t_grid.iter().enumerate() {
        let r = 0.25 * t.norm();
        let ring: Vec<(Complex64, Vec<Complex64>)> = trapezoid_angles(RING)
            .into_iter()
            .map(|a| {
                let e = Complex64::from_polar(1.0, a);
                contour.coefficients(f, t + e * r, table.alpha_max).map(|u| (e, u))
            })
            .collect::<Result<_>>()?;
        for alpha in 0..=table.alpha_max {
            // u'(t) = (1/2iπ)∮ u(z)/(z−t)² dz = mean over the ring of u(t+re^{ia}) e^{−ia} / r
            let derivative = ring.iter().map(|(e, u)| u[alpha] / e).collect::<CompensatedSum>().value() / (RING as f64 * r);
            let u = table.coefficients[alpha][i];
            let lhs = t * derivative;
            let rhs = c * u;
            let floor = table.bound / contour.radius.powi(alpha as i32);
            let rel = relative_residual(lhs, rhs, floor);
            report.push_point(super::report::ResidualPoint {
                label: format!("alpha={alpha} t={t}"),
                s: t,
                lhs,
                rhs,
                residual: (lhs - rhs).norm(),
                relative: rel,
                quadrature_error: 0.0,
                passed: rel <= tolerance,
            });
        }
    }
    Ok(report)
}

/// Verdict of the uniform coefficient bound as a standalone report.
pub fn bound_verdict(table: &ExpansionTable) -> CheckVerdict {
    CheckVerdict::from_bool(table.bound_holds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn linear_in_parameter() {
        let f = |t: Complex64, big_t: Complex64| (-t).exp() * big_t;
        let contour = Contour::new(c(0.0), 1.0, DEFAULT_NODES).unwrap();
        let table = parameter_expansion(&f, &contour, 5, &default_t_grid()).unwrap();
        for (i, t) in table.t_grid.iter().enumerate() {
            assert!(table.coefficients[0][i].norm() < 1e-16);
            assert!((table.coefficients[1][i] - (-t).exp()).norm() < 1e-15);
            for a in 2..=5 {
                assert!(table.coefficients[a][i].norm() < 1e-16);
            }
        }
        assert!(table.bound_holds);
    }

    #[test]
    fn rejects_bad_contour() {
        assert!(Contour::new(c(0.0), 0.0, 64).is_err());
        assert!(Contour::new(c(0.0), 1.0, 2).is_err());
    }
}
