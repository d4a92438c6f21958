//! Smooth rapidly decaying functions on `C*` and the Haar-measure integrals
//! built from them.
//!
//! With `dξ/ξ ∧ dξ̄/ξ̄ = −2i dr dφ / r` and `u = ln r`, the moments become
//!
//! ```text
//! c^∞_k = (1/2iπ) ∫ ξ^k f dξ/ξ∧dξ̄/ξ̄   = −(1/π) ∫∫ ξ^k f du dφ
//! c^0_k = (−1/2iπ) ∫ ξ^{−k} f dξ/ξ∧dξ̄/ξ̄ =  (1/π) ∫∫ ξ^{−k} f du dφ
//! ```
//!
//! All two-dimensional integrals are tensor grids: composite Gauss–Legendre
//! in `u`, trapezoid in `φ`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quadrature::{composite_nodes, trapezoid_angles, CompensatedSum, GaussRule, QuadValue};
use super::report::{CheckVerdict, ResidualReport};
use crate::error::{Error, Result};

/// `e^{rate·s} · Σ poly[i] s^i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SFactor {
    #[serde(default)]
    pub rate: Complex64,
    pub poly: Vec<Complex64>,
}

impl SFactor {
    pub fn new(rate: Complex64, poly: Vec<Complex64>) -> Result<Self> {
        let finite = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
        if !finite(&rate) || !poly.iter().all(finite) {
            return Err(Error::NotSeparable("s-factor has non-finite data".into()));
        }
        Ok(SFactor { rate, poly })
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        let p = self.poly.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * s + c);
        (self.rate * s).exp() * p
    }

    /// The factor of `s ↦ σ(s + delta)`.
    pub fn shift(&self, delta: f64) -> Self {
        let n = self.poly.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, c) in self.poly.iter().enumerate() {
            // (s+δ)^i = Σ_j C(i,j) δ^{i−j} s^j
            let mut binom = 1.0;
            for j in 0..=i {
                out[j] += c * binom * delta.powi((i - j) as i32);
                binom = binom * (i - j) as f64 / (j + 1) as f64;
            }
        }
        let scale = (self.rate * delta).exp();
        SFactor { rate: self.rate, poly: out.into_iter().map(|c| c * scale).collect() }
    }
}

/// `coeff · σ(s) · r^power · e^{i·mode·φ} · exp(−decay_inf·r − decay_zero/r)` with `ξ = r e^{iφ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeTerm {
    pub coeff: Complex64,
    #[serde(default)]
    pub power: i32,
    #[serde(default)]
    pub mode: i32,
    pub decay_inf: f64,
    pub decay_zero: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_factor: Option<SFactor>,
}

impl ModeTerm {
    /// `coeff · e^{imφ} · e^{−r−1/r}`.
    pub fn envelope(coeff: Complex64, mode: i32) -> Self {
        ModeTerm { coeff, power: 0, mode, decay_inf: 1.0, decay_zero: 1.0, s_factor: None }
    }

    fn with(&self, coeff: Complex64, dpower: i32, dmode: i32) -> Self {
        ModeTerm { coeff, power: self.power + dpower, mode: self.mode + dmode, ..self.clone() }
    }

    fn log_radial(&self, u: f64) -> f64 {
        self.coeff.norm().ln() + self.power as f64 * u - self.decay_inf * u.exp() - self.decay_zero * (-u).exp()
    }

    fn eval_polar(&self, r: f64, phi: f64) -> Complex64 {
        let radial = r.powi(self.power) * (-self.decay_inf * r - self.decay_zero / r).exp();
        self.coeff * Complex64::from_polar(radial, self.mode as f64 * phi)
    }
}

/// Finite sum of [`ModeTerm`]s. Derivatives stay in the family, so the
/// Wirtinger partials are exact.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TestFunction {
    pub terms: Vec<ModeTerm>,
}

impl TestFunction {
    pub fn zero() -> Self {
        TestFunction { terms: Vec::new() }
    }

    pub fn from_terms(terms: Vec<ModeTerm>) -> Self {
        TestFunction { terms }
    }

    /// `e^{−|ξ|−1/|ξ|} (ξ/|ξ|)^m`.
    pub fn radial_mode(m: i32) -> Self {
        TestFunction { terms: vec![ModeTerm::envelope(Complex64::new(1.0, 0.0), m)] }
    }

    pub fn add(&self, other: &Self) -> Self {
        TestFunction { terms: self.terms.iter().chain(&other.terms).cloned().collect() }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        TestFunction { terms: self.terms.iter().map(|t| t.with(t.coeff * c, 0, 0)).collect() }
    }

    /// Multiplication by `ξ^k`.
    pub fn mul_xi_power(&self, k: i32) -> Self {
        TestFunction { terms: self.terms.iter().map(|t| t.with(t.coeff, k, k)).collect() }
    }

    fn polar_derivative(&self, sign: f64) -> Self {
        // ξ∂_ξ = ½(r∂_r − i∂_φ), ξ̄∂_ξ̄ = ½(r∂_r + i∂_φ);
        // r∂_r of r^a e^{−br−c/r} is (a − br + c/r)·(same).
        let mut terms = Vec::new();
        for t in &self.terms {
            let flat = 0.5 * (t.power as f64 + sign * t.mode as f64);
            if flat != 0.0 {
                terms.push(t.with(t.coeff * flat, 0, 0));
            }
            if t.decay_inf != 0.0 {
                terms.push(t.with(t.coeff * (-0.5 * t.decay_inf), 1, 0));
            }
            if t.decay_zero != 0.0 {
                terms.push(t.with(t.coeff * (0.5 * t.decay_zero), -1, 0));
            }
        }
        TestFunction { terms }
    }

    /// `ξ ∂f/∂ξ`.
    pub fn euler(&self) -> Self {
        self.polar_derivative(1.0)
    }

    /// `ξ̄ ∂f/∂ξ̄`.
    pub fn euler_bar(&self) -> Self {
        self.polar_derivative(-1.0)
    }

    /// `∂f/∂ξ`.
    pub fn d_xi(&self) -> Self {
        self.euler().mul_xi_power(-1)
    }

    /// `∂f/∂ξ̄`.
    pub fn d_xibar(&self) -> Self {
        let t = self.euler_bar();
        TestFunction { terms: t.terms.iter().map(|m| m.with(m.coeff, -1, 1)).collect() }
    }

    /// Folds the s-factors into the coefficients.
    pub fn at_s(&self, s: Complex64) -> Self {
        TestFunction {
            terms: self
                .terms
                .iter()
                .map(|t| {
                    let c = match &t.s_factor {
                        Some(f) => t.coeff * f.eval(s),
                        None => t.coeff,
                    };
                    ModeTerm { s_factor: None, ..t.with(c, 0, 0) }
                })
                .collect(),
        }
    }

    /// `f(ξ, s + delta)` as a function of `(ξ, s)`.
    pub fn shift_s(&self, delta: f64) -> Self {
        TestFunction {
            terms: self
                .terms
                .iter()
                .map(|t| ModeTerm { s_factor: t.s_factor.as_ref().map(|f| f.shift(delta)), ..t.clone() })
                .collect(),
        }
    }

    pub fn is_s_dependent(&self) -> bool {
        self.terms.iter().any(|t| t.s_factor.is_some())
    }

    pub fn eval(&self, xi: Complex64, s: Complex64) -> Complex64 {
        let (r, phi) = xi.to_polar();
        self.terms
            .iter()
            .map(|t| {
                let v = t.eval_polar(r, phi);
                match &t.s_factor {
                    Some(f) => v * f.eval(s),
                    None => v,
                }
            })
            .collect::<CompensatedSum>()
            .value()
    }

    fn eval_polar(&self, r: f64, phi: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            acc += t.eval_polar(r, phi);
        }
        acc
    }

    pub fn max_mode(&self) -> u32 {
        self.terms.iter().map(|t| t.mode.unsigned_abs()).max().unwrap_or(0)
    }

    /// Every nonzero term decays exponentially at both `0` and `∞`.
    pub fn rapid_decay(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.coeff == Complex64::new(0.0, 0.0) || (t.decay_inf > 0.0 && t.decay_zero > 0.0))
    }

    fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coeff == Complex64::new(0.0, 0.0))
    }

    /// `[u_min, u_max]` outside of which every term is below `eps` times the
    /// largest term.
    fn log_extent(&self, eps: f64) -> Result<(f64, f64)> {
        const LIMIT: f64 = 60.0;
        const STEP: f64 = 0.02;
        let live: Vec<&ModeTerm> = self.terms.iter().filter(|t| t.coeff.norm() > 0.0).collect();
        let n = (2.0 * LIMIT / STEP) as usize;
        let grid = |i: usize| -LIMIT + STEP * i as f64;
        let level = |u: f64| live.iter().map(|t| t.log_radial(u)).fold(f64::NEG_INFINITY, f64::max);
        let peak = (0..=n).map(|i| level(grid(i))).fold(f64::NEG_INFINITY, f64::max);
        let cut = peak + eps.ln();
        let above: Vec<f64> = (0..=n).map(grid).filter(|&u| level(u) >= cut).collect();
        let (lo, hi) = (above[0], above[above.len() - 1]);
        if lo <= -LIMIT + STEP || hi >= LIMIT - STEP {
            return Err(Error::QuadratureFailure("integrand does not decay within the log-radius range".into()));
        }
        Ok((lo - STEP, hi + STEP))
    }

    /// Largest `|f|` on each sample radius, for spot-checking decay.
    pub fn sup_on_circles(&self, radii: &[f64], s: Complex64) -> Vec<f64> {
        let g = self.at_s(s);
        let angles = trapezoid_angles(64);
        radii.iter().map(|&r| angles.iter().map(|&a| g.eval_polar(r, a).norm()).fold(0.0, f64::max)).collect()
    }
}

/// Grid parameters for integrals over `C*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlaneQuadrature {
    pub gauss_order: usize,
    /// Panel width in `u = ln r`.
    pub panel_width: f64,
    /// Trapezoid nodes in `φ` for the convolution; moments pick their own.
    pub angular_nodes: usize,
    /// Radial tails below this fraction of the peak are dropped.
    pub tail_eps: f64,
    /// Accepted error estimate, relative to the integral of `|integrand|`.
    pub tolerance: f64,
    pub local_panels: usize,
    pub local_angular_nodes: usize,
}

impl Default for PlaneQuadrature {
    fn default() -> Self {
        PlaneQuadrature {
            gauss_order: 20,
            panel_width: 0.25,
            angular_nodes: 256,
            tail_eps: 1e-18,
            tolerance: 1e-10,
            local_panels: 8,
            local_angular_nodes: 128,
        }
    }
}

/// `∫∫ h(ρe^{iψ}) dρ dψ`-type tensor integral over `[a, b] × [0, 2π)` in one
/// resolution. Returns the value and the integral of `|h|`.
fn tensor_integral<H>(h: &H, rule: &GaussRule, a: f64, b: f64, panels: usize, angles: usize) -> (Complex64, f64)
where
    H: Fn(f64, f64) -> Complex64 + Sync,
{
    let nodes = composite_nodes(rule, a, b, panels);
    let phis = trapezoid_angles(angles);
    let dphi = TAU / angles as f64;
    let rows: Vec<(Complex64, f64)> = nodes
        .par_iter()
        .map(|&(x, w)| {
            let mut acc = CompensatedSum::new();
            let mut abs = 0.0;
            for &phi in &phis {
                let v = h(x, phi);
                abs += v.norm();
                acc.add(v);
            }
            (acc.value() * (w * dphi), abs * w * dphi)
        })
        .collect();
    let value = rows.iter().map(|r| r.0).collect::<CompensatedSum>().value();
    let abs = rows.iter().map(|r| r.1).sum();
    (value, abs)
}

/// Two-resolution tensor integral: Gauss–Legendre of order `n` and `n − 5`,
/// trapezoid with `m` and `3m/4` nodes.
fn tensor_with_error<H>(h: &H, quad: &PlaneQuadrature, a: f64, b: f64, panels: usize, angles: usize) -> Result<QuadValue>
where
    H: Fn(f64, f64) -> Complex64 + Sync,
{
    let hi = GaussRule::new(quad.gauss_order)?;
    let lo = GaussRule::new(quad.gauss_order.saturating_sub(5).max(2))?;
    let (v_hi, abs) = tensor_integral(h, &hi, a, b, panels, angles);
    let lo_angles = (angles * 3 / 4).max(4);
    let (v_lo, _) = tensor_integral(h, &lo, a, b, panels, lo_angles);
    Ok(QuadValue { value: v_hi, error: (v_hi - v_lo).norm(), scale: abs })
}

fn panels_for(a: f64, b: f64, width: f64) -> usize {
    (((b - a) / width).ceil() as usize).max(1)
}

fn check_error(q: QuadValue, quad: &PlaneQuadrature, what: &str) -> Result<QuadValue> {
    if !q.value.re.is_finite() || !q.value.im.is_finite() {
        return Err(Error::QuadratureFailure(format!("{what}: non-finite value")));
    }
    if q.error > quad.tolerance * q.scale.max(f64::MIN_POSITIVE) {
        return Err(Error::QuadratureFailure(format!(
            "{what}: error estimate {:.3e} exceeds {:.1e} of scale {:.3e}",
            q.error, quad.tolerance, q.scale
        )));
    }
    Ok(q)
}

/// `−(1/π) ∫∫ h du dφ` over the log-polar plane, for an `h` in the mode family.
fn log_polar_integral(h: &TestFunction, quad: &PlaneQuadrature, what: &str) -> Result<QuadValue> {
    if h.is_zero() {
        return Ok(QuadValue::zero());
    }
    if !h.rapid_decay() {
        return Err(Error::QuadratureFailure(format!("{what}: function has no rapid-decay certificate")));
    }
    let (a, b) = h.log_extent(quad.tail_eps)?;
    // trapezoid is exact for modes below the node count
    let angles = (2 * h.max_mode() as usize + 8).max(16);
    let f = |u: f64, phi: f64| h.eval_polar(u.exp(), phi);
    let q = tensor_with_error(&f, quad, a, b, panels_for(a, b, quad.panel_width), angles)?;
    let q = QuadValue { value: q.value * (-1.0 / PI), error: q.error / PI, scale: q.scale / PI };
    check_error(q, quad, what)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Zero,
    Infinity,
}

/// `c^∞_k` (side infinity, `k ≥ 0`) or `c^0_k` (side zero, `k ≥ 1`) of `f(·, s)`.
pub fn haar_moment(f: &TestFunction, k: i32, side: Side, s: Complex64, quad: &PlaneQuadrature) -> Result<QuadValue> {
    let g = f.at_s(s);
    match side {
        Side::Infinity => {
            if k < 0 {
                return Err(Error::InvalidInput(format!("moment at infinity needs k >= 0, got {k}")));
            }
            log_polar_integral(&g.mul_xi_power(k), quad, &format!("moment c^inf_{k}"))
        }
        Side::Zero => {
            if k < 1 {
                return Err(Error::InvalidInput(format!("moment at zero needs k >= 1, got {k}")));
            }
            let q = log_polar_integral(&g.mul_xi_power(-k), quad, &format!("moment c^0_{k}"))?;
            Ok(QuadValue { value: -q.value, ..q })
        }
    }
}

/// `(1/2iπ) ∫ ξ^{-1} f dξ/ξ∧dξ̄/ξ̄`, which equals `−c^0_1`.
fn moment_minus_one(f: &TestFunction, s: Complex64, quad: &PlaneQuadrature) -> Result<QuadValue> {
    log_polar_integral(&f.at_s(s).mul_xi_power(-1), quad, "moment c^inf_-1")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEntry {
    pub k: i32,
    pub value: Complex64,
    pub error: f64,
}

/// `c^∞_k` for `0 ≤ k ≤ k_max` and `c^0_k` for `1 ≤ k ≤ k_max` at one `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    pub s: Complex64,
    pub k_max: i32,
    pub infinity: Vec<MomentEntry>,
    pub zero: Vec<MomentEntry>,
}

impl MomentTable {
    pub fn infinity(&self, k: i32) -> Complex64 {
        self.infinity[k as usize].value
    }

    pub fn zero(&self, k: i32) -> Complex64 {
        self.zero[(k - 1) as usize].value
    }
}

pub fn moment_table(f: &TestFunction, k_max: i32, s: Complex64, quad: &PlaneQuadrature) -> Result<MomentTable> {
    let entry = |k: i32, side: Side| -> Result<MomentEntry> {
        let q = haar_moment(f, k, side, s, quad)?;
        Ok(MomentEntry { k, value: q.value, error: q.error })
    };
    Ok(MomentTable {
        s,
        k_max,
        infinity: (0..=k_max).map(|k| entry(k, Side::Infinity)).collect::<Result<_>>()?,
        zero: (1..=k_max).map(|k| entry(k, Side::Zero)).collect::<Result<_>>()?,
    })
}

/// Denominator floor for identities whose sides may both vanish.
const FLOOR_FRACTION: f64 = 1e-6;

/// Stokes identity `(1/2iπ)∫ ξ^{k+1} ∂f/∂ξ = −k (1/2iπ)∫ ξ^k f` at infinity,
/// and its mirror `+k` at zero when `k ≥ 1`.
pub fn stokes_identity_check(
    f: &TestFunction,
    k: i32,
    s: Complex64,
    quad: &PlaneQuadrature,
    tolerance: f64,
) -> Result<ResidualReport> {
    let mut report = ResidualReport::new("stokes", "test function", tolerance);
    let df = f.euler();
    let lhs = haar_moment(&df, k, Side::Infinity, s, quad)?;
    let base = haar_moment(f, k, Side::Infinity, s, quad)?;
    let rhs = base.value * (-k as f64);
    let floor = FLOOR_FRACTION * lhs.scale.max(base.scale * k as f64);
    report.push(format!("infinity k={k}"), s, lhs.value, rhs, floor, lhs.error + base.error * k as f64);
    if k >= 1 {
        let lhs = haar_moment(&df, k, Side::Zero, s, quad)?;
        let base = haar_moment(f, k, Side::Zero, s, quad)?;
        let rhs = base.value * k as f64;
        let floor = FLOOR_FRACTION * lhs.scale.max(base.scale * k as f64);
        report.push(format!("zero k={k}"), s, lhs.value, rhs, floor, lhs.error + base.error * k as f64);
    }
    Ok(report)
}

/// `(K*f)(t, s) = (1/2iπ) ∫ f(ξ,s) (1 − ξ/t)^{-1} dξ/ξ∧dξ̄/ξ̄`.
///
/// The kernel is split with the Gaussian weight `χ = exp(−|ξ−t|²/σ²)`,
/// `σ = |t|/8`. The `1 − χ` part is smooth (the pole is cancelled) and is
/// integrated on the global log-polar grid; the `χ` part is integrated in
/// polar coordinates centred at `t`, where the Jacobian cancels the pole.
pub fn cauchy_convolve(f: &TestFunction, t: Complex64, s: Complex64, quad: &PlaneQuadrature) -> Result<QuadValue> {
    if t.norm() == 0.0 || !t.re.is_finite() || !t.im.is_finite() {
        return Err(Error::SingularEvaluation(format!("convolution at t = {t}")));
    }
    let g = f.at_s(s);
    if g.is_zero() {
        return Ok(QuadValue::zero());
    }
    if !g.rapid_decay() {
        return Err(Error::QuadratureFailure("convolution: function has no rapid-decay certificate".into()));
    }
    let sigma = t.norm() / 8.0;
    let inv_sigma2 = 1.0 / (sigma * sigma);

    let (a, b) = g.log_extent(quad.tail_eps)?;
    let outer_h = |u: f64, phi: f64| {
        let xi = Complex64::from_polar(u.exp(), phi);
        let z = t - xi;
        let z2 = z.norm_sqr();
        let x = z2 * inv_sigma2;
        // (1 − e^{−x}) / z = conj(z) · (1 − e^{−x}) / |z|²
        let damp = if x < 1e-300 { inv_sigma2 } else { -(-x).exp_m1() / z2 };
        g.eval_polar(u.exp(), phi) * t * z.conj() * damp
    };
    let outer = tensor_with_error(&outer_h, quad, a, b, panels_for(a, b, quad.panel_width), quad.angular_nodes)?;

    let cutoff = 7.0 * sigma;
    let inner_h = |rho: f64, psi: f64| {
        let xi = t + Complex64::from_polar(rho, psi);
        let (r, phi) = xi.to_polar();
        g.eval_polar(r, phi) * (-rho * rho * inv_sigma2).exp() * t * Complex64::from_polar(1.0 / (r * r), -psi)
    };
    let inner = tensor_with_error(&inner_h, quad, 0.0, cutoff, quad.local_panels, quad.local_angular_nodes)?;

    let q = QuadValue {
        value: (inner.value - outer.value) / PI,
        error: (inner.error + outer.error) / PI,
        scale: (inner.scale + outer.scale) / PI,
    };
    check_error(q, quad, "convolution")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemainderReport {
    pub side: Side,
    pub terms: usize,
    pub radii: Vec<f64>,
    pub remainders: Vec<f64>,
    pub quadrature_errors: Vec<f64>,
    /// `remainder[i] / remainder[i+1]`.
    pub ratios: Vec<f64>,
    pub bands: Vec<[f64; 2]>,
    pub verdict: CheckVerdict,
    pub notes: Vec<String>,
}

/// Checks that the remainder of the expansion of `K*f` after `n` terms
/// shrinks like `radius^{-(n+1)}`: for radii `r_i < r_{i+1}` the ratio of
/// remainders must lie in `[q^{n+1/2}, q^{n+3/2}]`, `q = r_{i+1}/r_i`.
///
/// At infinity `t = r` and the expansion is `Σ_{k≤n} c^∞_k t^{−k}`; at zero
/// `t = 1/r` and it is `Σ_{1≤k≤n} c^0_k t^k`.
pub fn asymptotic_remainder_check(
    f: &TestFunction,
    n: usize,
    radii: &[f64],
    side: Side,
    s: Complex64,
    quad: &PlaneQuadrature,
) -> Result<RemainderReport> {
    if radii.len() < 2 {
        return Err(Error::InvalidInput("need at least two radii".into()));
    }
    if radii.iter().any(|&r| !(r > 1.0)) || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("radii must be increasing and greater than 1".into()));
    }
    let n_i = n as i32;
    let moments: Vec<QuadValue> = match side {
        Side::Infinity => (0..=n_i).map(|k| haar_moment(f, k, side, s, quad)).collect::<Result<_>>()?,
        Side::Zero => (1..=n_i).map(|k| haar_moment(f, k, side, s, quad)).collect::<Result<_>>()?,
    };
    let mut remainders = Vec::new();
    let mut errors = Vec::new();
    for &r in radii {
        let t = match side {
            Side::Infinity => Complex64::new(r, 0.0),
            Side::Zero => Complex64::new(1.0 / r, 0.0),
        };
        let conv = cauchy_convolve(f, t, s, quad)?;
        let mut expansion = CompensatedSum::new();
        let mut err = conv.error;
        for (i, m) in moments.iter().enumerate() {
            let power = match side {
                Side::Infinity => t.powi(-(i as i32)),
                Side::Zero => t.powi(i as i32 + 1),
            };
            expansion.add(m.value * power);
            err += m.error * power.norm();
        }
        remainders.push((conv.value - expansion.value()).norm());
        errors.push(err);
    }
    let mut notes = Vec::new();
    let mut ratios = Vec::new();
    let mut bands = Vec::new();
    let all_zero = remainders.iter().zip(&errors).all(|(r, e)| *r <= *e) && moments.iter().all(|m| m.scale == 0.0);
    let mut ok = true;
    if all_zero {
        notes.push("function is identically zero; every remainder vanishes".into());
    } else {
        for i in 0..radii.len() - 1 {
            let q = radii[i + 1] / radii[i];
            let band = [q.powf(n as f64 + 0.5), q.powf(n as f64 + 1.5)];
            let ratio = remainders[i] / remainders[i + 1];
            if remainders[i + 1] <= 10.0 * errors[i + 1] {
                notes.push(format!("remainder at radius {} is not resolved above the quadrature error", radii[i + 1]));
                ok = false;
            }
            ok &= ratio >= band[0] && ratio <= band[1];
            ratios.push(ratio);
            bands.push(band);
        }
    }
    Ok(RemainderReport {
        side,
        terms: n,
        radii: radii.to_vec(),
        remainders,
        quadrature_errors: errors,
        ratios,
        bands,
        verdict: CheckVerdict::from_bool(ok),
        notes,
    })
}

/// Moment transport under the twisted actions.
///
/// θ̃ case: the moments of `(ξ∂_ξ − s − 1)f` equal `(−k−s−1)c^∞_k` and
/// `(k−s−1)c^0_k`. τt⁻¹ case: the moments of `f(ξ,s+1)/ξ − f(ξ,s)` equal
/// `c^∞_{k−1}(s+1) − c^∞_k(s)` for `k ≥ 1` and `c^0_{k+1}(s+1) − c^0_k(s)`.
/// At infinity with `k = 0` the moment picks up the constant
/// `(1/2iπ)∫ξ^{-1}f(ξ,s+1) = −c^0_1(s+1)` on top of `−c^∞_0(s)`; that line
/// checks the constant itself.
pub fn epsilon_commutation_check(
    f: &TestFunction,
    s: Complex64,
    k_max: i32,
    quad: &PlaneQuadrature,
    tolerance: f64,
) -> Result<ResidualReport> {
    if k_max < 0 {
        return Err(Error::InvalidInput("k_max must be non-negative".into()));
    }
    let mut report = ResidualReport::new("epsilon_commutation", "test function", tolerance);
    let fs = f.at_s(s);
    let fs1 = f.shift_s(1.0).at_s(s);
    let one = Complex64::new(1.0, 0.0);
    let theta_f = fs.euler().add(&fs.scale(-(s + one)));
    let tau_f = fs1.mul_xi_power(-1).add(&fs.scale(-one));
    let zero_s = Complex64::new(0.0, 0.0);
    let m = |g: &TestFunction, k: i32, side: Side| haar_moment(g, k, side, zero_s, quad);

    for k in 0..=k_max {
        let lhs = m(&theta_f, k, Side::Infinity)?;
        let base = m(&fs, k, Side::Infinity)?;
        let factor = -(k as f64) - s - one;
        let floor = FLOOR_FRACTION * lhs.scale.max(base.scale * factor.norm());
        report.push(
            format!("theta infinity k={k}"),
            s,
            lhs.value,
            base.value * factor,
            floor,
            lhs.error + base.error * factor.norm(),
        );
    }
    for k in 1..=k_max {
        let lhs = m(&theta_f, k, Side::Zero)?;
        let base = m(&fs, k, Side::Zero)?;
        let factor = (k as f64) - s - one;
        let floor = FLOOR_FRACTION * lhs.scale.max(base.scale * factor.norm());
        report.push(
            format!("theta zero k={k}"),
            s,
            lhs.value,
            base.value * factor,
            floor,
            lhs.error + base.error * factor.norm(),
        );
    }
    {
        let lhs = m(&tau_f, 0, Side::Infinity)?;
        let c0 = m(&fs, 0, Side::Infinity)?;
        let constant = moment_minus_one(&fs1, zero_s, quad)?;
        let floor = FLOOR_FRACTION * lhs.scale.max(c0.scale).max(constant.scale);
        report.push(
            "tau infinity k=0 constant".into(),
            s,
            lhs.value + c0.value,
            constant.value,
            floor,
            lhs.error + c0.error + constant.error,
        );
    }
    for k in 1..=k_max {
        let lhs = m(&tau_f, k, Side::Infinity)?;
        let shifted = m(&fs1, k - 1, Side::Infinity)?;
        let base = m(&fs, k, Side::Infinity)?;
        let floor = FLOOR_FRACTION * lhs.scale.max(shifted.scale).max(base.scale);
        report.push(
            format!("tau infinity k={k}"),
            s,
            lhs.value,
            shifted.value - base.value,
            floor,
            lhs.error + shifted.error + base.error,
        );
    }
    for k in 1..=k_max {
        let lhs = m(&tau_f, k, Side::Zero)?;
        let shifted = m(&fs1, k + 1, Side::Zero)?;
        let base = m(&fs, k, Side::Zero)?;
        let floor = FLOOR_FRACTION * lhs.scale.max(shifted.scale).max(base.scale);
        report.push(
            format!("tau zero k={k}"),
            s,
            lhs.value,
            shifted.value - base.value,
            floor,
            lhs.error + shifted.error + base.error,
        );
    }
    Ok(report)
}
