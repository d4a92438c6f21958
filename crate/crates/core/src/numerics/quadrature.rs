use std::ops::AddAssign;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Neumaier-compensated accumulator for complex values.
///
/// Summation order is the caller's iteration order, so results are
/// reproducible whenever that order is fixed.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    re: f64,
    re_c: f64,
    im: f64,
    im_c: f64,
}

fn neumaier_step(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        neumaier_step(&mut self.re, &mut self.re_c, z.re);
        neumaier_step(&mut self.im, &mut self.im_c, z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re + self.re_c, self.im + self.im_c)
    }
}

impl AddAssign<Complex64> for CompensatedSum {
    fn add_assign(&mut self, z: Complex64) {
        self.add(z);
    }
}

impl FromIterator<Complex64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

pub fn compensated_sum_f64(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0, 0.0);
    for x in xs {
        neumaier_step(&mut s, &mut c, x);
    }
    s + c
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pairs: Vec<(f64, f64)>,
}

impl GaussRule {
    pub fn new(n: usize) -> Result<Self> {
        let gl = GaussLegendre::new(n)
            .map_err(|e| Error::QuadratureFailure(format!("Gauss-Legendre rule of order {n}: {e}")))?;
        let mut pairs: Vec<(f64, f64)> = gl.as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(GaussRule { pairs })
    }

    pub fn order(&self) -> usize {
        self.pairs.len()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn scaled(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.pairs.iter().map(move |&(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate<F>(&self, a: f64, b: f64, mut f: F) -> Complex64
    where
        F: FnMut(f64) -> Complex64,
    {
        self.scaled(a, b).map(|(x, w)| f(x) * w).collect::<CompensatedSum>().value()
    }
}

/// Nodes and weights of a composite rule over `[a, b]` split into `panels`
/// equal pieces.
pub fn composite_nodes(rule: &GaussRule, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * rule.order());
    for i in 0..panels {
        let lo = a + h * i as f64;
        out.extend(rule.scaled(lo, lo + h));
    }
    out
}

/// Uniform trapezoid nodes on the circle, `2π/m` weight each.
pub fn trapezoid_angles(m: usize) -> Vec<f64> {
    let h = std::f64::consts::TAU / m as f64;
    (0..m).map(|j| h * j as f64).collect()
}

/// An integral value with its error estimate and absolute scale (the same
/// quadrature applied to `|integrand|`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadValue {
    pub value: Complex64,
    pub error: f64,
    pub scale: f64,
}

impl QuadValue {
    pub fn zero() -> Self {
        QuadValue { value: Complex64::new(0.0, 0.0), error: 0.0, scale: 0.0 }
    }
}
