//! Truncated models of one-sided expansion spaces and the Koszul complex of
//! the operators `A_j = τ_j t_j⁻¹ − 1` acting on them.
//!
//! Each direction carries a tail kind. A 0-type direction holds the exponents
//! `1..=N` (positive powers, with `t⁰` and below killed by the quotient); an
//! ∞-type direction holds `−N..=0` (powers of `1/t`, positive powers killed).

mod koszul;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ore::{apply_twisted_laurent, Algebra, Generator, GeneratorKind, OreOperator, ShiftLaurent, ShiftPolynomial};

pub use koszul::{
    case_a_solve, case_b_solve, induced_action_congruence, kernel_element, koszul_reduce, Case, CheckRecord,
    Congruence, InducedAction, InducedActionRecord, KoszulOptions, KoszulReport, KoszulStep, Verdict,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailKind {
    /// Positive powers `t^1 … t^N`.
    Zero,
    /// Powers `t^0 … t^{-N}`.
    Infinity,
}

impl TailKind {
    /// Exponent at depth `d` (`d ≥ 1` for 0-type, `d ≥ 0` for ∞-type).
    pub fn exponent(self, depth: usize) -> i64 {
        match self {
            TailKind::Zero => depth as i64,
            TailKind::Infinity => -(depth as i64),
        }
    }

    pub fn depth(self, exponent: i64) -> i64 {
        match self {
            TailKind::Zero => exponent,
            TailKind::Infinity => -exponent,
        }
    }

    fn min_depth(self) -> i64 {
        match self {
            TailKind::Zero => 1,
            TailKind::Infinity => 0,
        }
    }

    /// Exponents that vanish in the quotient.
    pub fn killed(self, exponent: i64) -> bool {
        self.depth(exponent) < self.min_depth()
    }
}

/// Per-direction kinds and truncation orders, plus an optional bound on the
/// degree of coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    kinds: Vec<TailKind>,
    orders: Vec<usize>,
    degree_bound: Option<u32>,
}

impl Window {
    pub fn new(kinds: Vec<TailKind>, orders: Vec<usize>) -> Result<Self> {
        if kinds.len() != orders.len() {
            return Err(Error::ArityMismatch { left: kinds.len(), right: orders.len() });
        }
        if let Some(j) = orders.iter().position(|&n| n == 0) {
            return Err(Error::InvalidInput(format!("truncation order of direction {} must be positive", j + 1)));
        }
        Ok(Window { kinds, orders, degree_bound: None })
    }

    pub fn uniform(kinds: Vec<TailKind>, order: usize) -> Result<Self> {
        let n = kinds.len();
        Self::new(kinds, vec![order; n])
    }

    pub fn with_degree_bound(mut self, bound: u32) -> Self {
        self.degree_bound = Some(bound);
        self
    }

    pub fn arity(&self) -> usize {
        self.kinds.len()
    }

    pub fn kinds(&self) -> &[TailKind] {
        &self.kinds
    }

    pub fn kind(&self, j: usize) -> TailKind {
        self.kinds[j]
    }

    pub fn order(&self, j: usize) -> usize {
        self.orders[j]
    }

    pub fn degree_bound(&self) -> Option<u32> {
        self.degree_bound
    }

    pub fn in_window_axis(&self, j: usize, n: i64) -> bool {
        let d = self.kinds[j].depth(n);
        d >= self.kinds[j].min_depth() && d <= self.orders[j] as i64
    }

    pub fn contains(&self, n: &[i64]) -> bool {
        n.len() == self.arity() && (0..self.arity()).all(|j| self.in_window_axis(j, n[j]))
    }

    /// Interior along `j`: depth at most `N_j − 1`.
    pub fn interior_axis(&self, j: usize, n: &[i64]) -> bool {
        self.kinds[j].depth(n[j]) < self.orders[j] as i64
    }

    pub fn interior(&self, n: &[i64]) -> bool {
        (0..self.arity()).all(|j| self.interior_axis(j, n))
    }

    /// All exponent vectors of the window, in lexicographic order.
    pub fn exponents(&self) -> Vec<Vec<i64>> {
        let mut out = vec![Vec::new()];
        for j in 0..self.arity() {
            let k = self.kinds[j];
            let lo = k.min_depth();
            let mut next = Vec::new();
            for prefix in &out {
                for d in lo..=self.orders[j] as i64 {
                    let mut v = prefix.clone();
                    v.push(k.exponent(d as usize));
                    next.push(v);
                }
            }
            out = next;
        }
        out.sort();
        out
    }

    fn check_degree(&self, n: &[i64], b: &ShiftPolynomial) -> Result<()> {
        if let Some(bound) = self.degree_bound {
            if b.degree() > bound {
                return Err(Error::TruncationOverflow(format!(
                    "coefficient of t^{n:?} has degree {} above the bound {bound}",
                    b.degree()
                )));
            }
        }
        Ok(())
    }
}

/// What to do with exponents that leave the window on the far side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Projection {
    #[default]
    Strict,
    Truncate,
}

/// Truncated series `Σ b_n(s) t^n` over a [`Window`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailSeries {
    window: Window,
    terms: BTreeMap<Vec<i64>, ShiftPolynomial>,
}

impl TailSeries {
    pub fn zero(window: Window) -> Self {
        TailSeries { window, terms: BTreeMap::new() }
    }

    /// Builds a series; every exponent must lie in the window.
    pub fn from_terms(window: Window, terms: impl IntoIterator<Item = (Vec<i64>, ShiftPolynomial)>) -> Result<Self> {
        let mut x = Self::zero(window);
        for (n, b) in terms {
            x.set(n, b)?;
        }
        Ok(x)
    }

    pub fn set(&mut self, n: Vec<i64>, b: ShiftPolynomial) -> Result<()> {
        if !self.window.contains(&n) {
            return Err(Error::TruncationOverflow(format!("exponent {n:?} outside the window")));
        }
        if b.nvars() != self.window.arity() {
            return Err(Error::ArityMismatch { left: self.window.arity(), right: b.nvars() });
        }
        self.window.check_degree(&n, &b)?;
        if b.is_zero() {
            self.terms.remove(&n);
        } else {
            self.terms.insert(n, b);
        }
        Ok(())
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn arity(&self) -> usize {
        self.window.arity()
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i64>, ShiftPolynomial> {
        &self.terms
    }

    pub fn coefficient(&self, n: &[i64]) -> ShiftPolynomial {
        self.terms
            .get(n)
            .cloned()
            .unwrap_or_else(|| ShiftPolynomial::zero(self.arity()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_laurent(&self) -> ShiftLaurent {
        let mut x = ShiftLaurent::zero(self.arity());
        for (n, b) in &self.terms {
            x.add_term(n.clone(), b.clone());
        }
        x
    }

    /// Image of an exact Laurent polynomial in the quotient window.
    pub fn project(window: &Window, x: &ShiftLaurent, mode: Projection) -> Result<Self> {
        if x.arity() != window.arity() {
            return Err(Error::ArityMismatch { left: window.arity(), right: x.arity() });
        }
        let mut out = Self::zero(window.clone());
        for (n, b) in x.terms() {
            if (0..window.arity()).any(|j| window.kind(j).killed(n[j])) {
                continue;
            }
            if !window.contains(n) {
                match mode {
                    Projection::Strict => {
                        return Err(Error::TruncationOverflow(format!("exponent {n:?} leaves the window")))
                    }
                    Projection::Truncate => continue,
                }
            }
            out.set(n.clone(), b.clone())?;
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_window(other)?;
        let mut out = self.clone();
        for (n, b) in &other.terms {
            let sum = &out.coefficient(n) + b;
            out.set(n.clone(), sum)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_window(other)?;
        let mut out = self.clone();
        for (n, b) in &other.terms {
            let diff = &out.coefficient(n) - b;
            out.set(n.clone(), diff)?;
        }
        Ok(out)
    }

    fn same_window(&self, other: &Self) -> Result<()> {
        if self.window.kinds != other.window.kinds || self.window.orders != other.window.orders {
            return Err(Error::InvalidInput("series live in different windows".into()));
        }
        Ok(())
    }

    /// Exponents where the two series differ, restricted by `keep`.
    pub fn differences(&self, other: &Self, keep: impl Fn(&[i64]) -> bool) -> Vec<Vec<i64>> {
        let mut keys: Vec<&Vec<i64>> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .filter(|n| keep(n) && self.coefficient(n) != other.coefficient(n))
            .cloned()
            .collect()
    }

    /// Equality on the exponents that are interior along direction `j`.
    pub fn eq_on_interior_axis(&self, other: &Self, j: usize) -> bool {
        self.differences(other, |n| self.window.interior_axis(j, n)).is_empty()
    }

    pub fn support(&self) -> Vec<Vec<i64>> {
        self.terms.keys().cloned().collect()
    }
}

/// Twisted action of an operator in `D` or `D̃` on a truncated series: the exact
/// Laurent image is projected back to the window.
pub fn apply_twisted(op: &OreOperator, x: &TailSeries, mode: Projection) -> Result<TailSeries> {
    let y = apply_twisted_laurent(op, &x.to_laurent())?;
    TailSeries::project(x.window(), &y, mode)
}

/// `A_j = τ_j t_j⁻¹ − 1` in `D̃` (0-based `j`).
pub fn difference_generator(arity: usize, j: usize) -> OreOperator {
    let g = |kind| OreOperator::generator(Algebra::Dtilde, arity, Generator::new(kind, j + 1)).expect("valid generator");
    g(GeneratorKind::Tau)
        .multiply(&g(GeneratorKind::Tinv))
        .and_then(|p| p.sub(&OreOperator::one(Algebra::Dtilde, arity)))
        .expect("same algebra")
}
