//! Exact arithmetic in the torus Weyl algebra `D = Q[t,t⁻¹]⟨θ⟩` (θ = t∂t),
//! the difference algebra `S = Q[s]⟨τ,τ⁻¹⟩` and the combined algebra `D̃`.
//!
//! Operators are kept in normal form: a sparse map from [`Monomial`] to a
//! nonzero rational coefficient. A monomial is read as the ordered product
//! `t^α θ^β τ^γ s^δ`, with all factors of one variable grouped together.
//! The only relations that move factors past each other are
//!
//! ```text
//! θ_j t_j = t_j θ_j + t_j        τ_j s_j = (s_j + 1) τ_j
//! ```
//!
//! everything else (distinct indices, t-side against s-side) commutes.

mod shift;
mod twisted;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use shift::ShiftPolynomial;
pub use twisted::{apply_twisted_laurent, ShiftLaurent};

pub type Rational = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algebra {
    /// Torus Weyl algebra, generated by `t, t⁻¹, θ`.
    D,
    /// Difference algebra, generated by `s, τ, τ⁻¹`.
    S,
    /// Both sides together.
    Dtilde,
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algebra::D => "D",
            Algebra::S => "S",
            Algebra::Dtilde => "Dtilde",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeneratorKind {
    T,
    Tinv,
    Theta,
    S,
    Tau,
    TauInv,
}

impl GeneratorKind {
    pub fn is_t_side(self) -> bool {
        matches!(self, GeneratorKind::T | GeneratorKind::Tinv | GeneratorKind::Theta)
    }

    pub fn allowed_in(self, algebra: Algebra) -> bool {
        match algebra {
            Algebra::D => self.is_t_side(),
            Algebra::S => !self.is_t_side(),
            Algebra::Dtilde => true,
        }
    }
}

/// A generator together with its 1-based variable index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Generator {
    pub kind: GeneratorKind,
    pub index: usize,
}

impl Generator {
    pub fn new(kind: GeneratorKind, index: usize) -> Self {
        Generator { kind, index }
    }
}

/// Exponent data of a normal monomial `t^α θ^β τ^γ s^δ`.
///
/// All four vectors have length `p`. In `D` the τ/s parts are zero, in `S`
/// the t/θ parts are zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial {
    pub t: Vec<i64>,
    pub theta: Vec<u32>,
    pub tau: Vec<i64>,
    pub s: Vec<u32>,
}

impl Monomial {
    pub fn one(arity: usize) -> Self {
        Monomial {
            t: vec![0; arity],
            theta: vec![0; arity],
            tau: vec![0; arity],
            s: vec![0; arity],
        }
    }

    pub fn arity(&self) -> usize {
        self.t.len()
    }

    pub fn is_one(&self) -> bool {
        self.t.iter().all(|&e| e == 0)
            && self.theta.iter().all(|&e| e == 0)
            && self.tau.iter().all(|&e| e == 0)
            && self.s.iter().all(|&e| e == 0)
    }

    /// Sum of absolute exponents, used to order terms when printing.
    pub fn total_degree(&self) -> u64 {
        let a: u64 = self.t.iter().map(|e| e.unsigned_abs()).sum();
        let b: u64 = self.theta.iter().map(|&e| e as u64).sum();
        let c: u64 = self.tau.iter().map(|e| e.unsigned_abs()).sum();
        let d: u64 = self.s.iter().map(|&e| e as u64).sum();
        a + b + c + d
    }

    fn has_t_side(&self) -> bool {
        self.t.iter().any(|&e| e != 0) || self.theta.iter().any(|&e| e != 0)
    }

    fn has_s_side(&self) -> bool {
        self.tau.iter().any(|&e| e != 0) || self.s.iter().any(|&e| e != 0)
    }
}

pub(crate) fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Coefficients of `(x + shift)^n` as a dense vector indexed by the power of x.
pub(crate) fn shifted_power(n: u32, shift: i64) -> Vec<Rational> {
    let shift = BigInt::from(shift);
    (0..=n)
        .map(|i| {
            let c = binomial(n, i) * num_traits::pow(shift.clone(), (n - i) as usize);
            Rational::from_integer(c)
        })
        .collect()
}

/// Product of two normal monomials, returned as a list of normal terms.
fn multiply_monomials(a: &Monomial, b: &Monomial) -> Vec<(Monomial, Rational)> {
    let p = a.arity();
    // Each factor is a list of (monomial fragment, coefficient); the full
    // product is the tensor product over variables and sides.
    let mut acc: Vec<(Monomial, Rational)> = vec![(Monomial::one(p), Rational::one())];
    for j in 0..p {
        // t^a1 θ^b1 · t^a2 θ^b2 = t^(a1+a2) (θ + a2)^b1 θ^b2
        let theta_poly = shifted_power(a.theta[j], b.t[j]);
        // τ^c1 s^d1 · τ^c2 s^d2 = τ^(c1+c2) (s − c2)^d1 s^d2
        let s_poly = shifted_power(a.s[j], -b.tau[j]);
        let t_exp = a.t[j] + b.t[j];
        let tau_exp = a.tau[j] + b.tau[j];

        let mut next = Vec::with_capacity(acc.len() * theta_poly.len() * s_poly.len());
        for (mono, coeff) in &acc {
            for (i, ct) in theta_poly.iter().enumerate() {
                if ct.is_zero() {
                    continue;
                }
                for (k, cs) in s_poly.iter().enumerate() {
                    if cs.is_zero() {
                        continue;
                    }
                    let mut m = mono.clone();
                    m.t[j] = t_exp;
                    m.theta[j] = i as u32 + b.theta[j];
                    m.tau[j] = tau_exp;
                    m.s[j] = k as u32 + b.s[j];
                    next.push((m, coeff * ct * cs));
                }
            }
        }
        acc = next;
    }
    acc
}

/// An element of `D`, `S` or `D̃` in normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OreOperator {
    algebra: Algebra,
    arity: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl OreOperator {
    pub fn zero(algebra: Algebra, arity: usize) -> Self {
        OreOperator {
            algebra,
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(algebra: Algebra, arity: usize) -> Self {
        Self::constant(algebra, arity, Rational::one())
    }

    pub fn constant(algebra: Algebra, arity: usize, c: Rational) -> Self {
        let mut op = Self::zero(algebra, arity);
        op.add_term(Monomial::one(arity), c);
        op
    }

    pub fn generator(algebra: Algebra, arity: usize, g: Generator) -> Result<Self> {
        if !g.kind.allowed_in(algebra) {
            return Err(Error::MixedAlgebra {
                algebra,
                detail: format!("{:?} is not a generator of {algebra}", g.kind),
            });
        }
        if g.index == 0 || g.index > arity {
            return Err(Error::IndexOutOfRange { index: g.index, arity });
        }
        let j = g.index - 1;
        let mut m = Monomial::one(arity);
        match g.kind {
            GeneratorKind::T => m.t[j] = 1,
            GeneratorKind::Tinv => m.t[j] = -1,
            GeneratorKind::Theta => m.theta[j] = 1,
            GeneratorKind::S => m.s[j] = 1,
            GeneratorKind::Tau => m.tau[j] = 1,
            GeneratorKind::TauInv => m.tau[j] = -1,
        }
        Self::from_terms(algebra, arity, [(m, Rational::one())])
    }

    /// Builds an operator from already-normal monomials, summing duplicates.
    pub fn from_terms(
        algebra: Algebra,
        arity: usize,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
    ) -> Result<Self> {
        let mut op = Self::zero(algebra, arity);
        for (m, c) in terms {
            if m.arity() != arity || m.theta.len() != arity || m.tau.len() != arity || m.s.len() != arity {
                return Err(Error::ArityMismatch { left: arity, right: m.arity() });
            }
            let wrong_side = match algebra {
                Algebra::D => m.has_s_side(),
                Algebra::S => m.has_t_side(),
                Algebra::Dtilde => false,
            };
            if wrong_side {
                return Err(Error::MixedAlgebra {
                    algebra,
                    detail: "monomial uses generators of the other side".into(),
                });
            }
            op.add_term(m, c);
        }
        Ok(op)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.algebra != other.algebra {
            return Err(Error::MixedAlgebra {
                algebra: self.algebra,
                detail: format!("cannot combine with an operator in {}", other.algebra),
            });
        }
        if self.arity != other.arity {
            return Err(Error::ArityMismatch { left: self.arity, right: other.arity });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        OreOperator {
            algebra: self.algebra,
            arity: self.arity,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.algebra, self.arity);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a * c);
        }
        out
    }

    /// Normal form of the product `self · other`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.algebra, self.arity);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let prefactor = ca * cb;
                for (m, c) in multiply_monomials(ma, mb) {
                    out.add_term(m, &prefactor * c);
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Result<Self> {
        let mut acc = Self::one(self.algebra, self.arity);
        for _ in 0..n {
            acc = acc.multiply(self)?;
        }
        Ok(acc)
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.multiply(other)?.sub(&other.multiply(self)?)
    }

    /// Re-reads a `D` or `S` operator inside `D̃`.
    pub fn embed_dtilde(&self) -> Self {
        OreOperator {
            algebra: Algebra::Dtilde,
            arity: self.arity,
            terms: self.terms.clone(),
        }
    }

    /// Largest θ-degree (t-side) or s-degree (s-side) per variable.
    pub fn max_degrees(&self) -> Vec<u32> {
        let mut out = vec![0u32; self.arity];
        for m in self.terms.keys() {
            for j in 0..self.arity {
                out[j] = out[j].max(m.theta[j]).max(m.s[j]);
            }
        }
        out
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }
}

/// Normal form of a sum of generator words.
///
/// Every generator must belong to `algebra` and carry an index in `1..=arity`.
/// An empty word stands for the unit.
pub fn normalize(
    algebra: Algebra,
    arity: usize,
    words: &[(Rational, Vec<Generator>)],
) -> Result<OreOperator> {
    let mut out = OreOperator::zero(algebra, arity);
    for (coeff, word) in words {
        let mut prod = OreOperator::constant(algebra, arity, coeff.clone());
        for &g in word {
            prod = prod.multiply(&OreOperator::generator(algebra, arity, g)?)?;
        }
        out = out.add(&prod)?;
    }
    Ok(out)
}

impl fmt::Display for OreOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::opparse::format(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn gen(alg: Algebra, kind: GeneratorKind) -> OreOperator {
        OreOperator::generator(alg, 1, Generator::new(kind, 1)).unwrap()
    }

    fn word(kinds: &[GeneratorKind]) -> Vec<Generator> {
        kinds.iter().map(|&k| Generator::new(k, 1)).collect()
    }

    #[test]
    fn theta_t_rewrites() {
        use GeneratorKind::*;
        let op = normalize(Algebra::D, 1, &[(q(1), word(&[Theta, T]))]).unwrap();
        let t = gen(Algebra::D, T);
        let th = gen(Algebra::D, Theta);
        let expected = t.multiply(&th).unwrap().add(&t).unwrap();
        assert_eq!(op, expected);
        // already normal
        let op = normalize(Algebra::D, 1, &[(q(1), word(&[T, Theta]))]).unwrap();
        assert_eq!(op, t.multiply(&th).unwrap());
    }

    #[test]
    fn theta_squared_t() {
        use GeneratorKind::*;
        let op = normalize(Algebra::D, 1, &[(q(1), word(&[Theta, Theta, T]))]).unwrap();
        let t = gen(Algebra::D, T);
        let th = gen(Algebra::D, Theta);
        let t_th2 = t.multiply(&th.pow(2).unwrap()).unwrap();
        let t_th = t.multiply(&th).unwrap();
        let expected = t_th2.add(&t_th.scale(&q(2))).unwrap().add(&t).unwrap();
        assert_eq!(op, expected);
    }

    #[test]
    fn s_tau_rewrites() {
        use GeneratorKind::*;
        let s = gen(Algebra::S, S);
        let tau = gen(Algebra::S, Tau);
        let tau_s = tau.multiply(&s).unwrap();
        assert_eq!(s.multiply(&tau).unwrap(), tau_s.sub(&tau).unwrap());
        assert_eq!(tau.multiply(&s).unwrap(), tau_s);
    }

    #[test]
    fn unit_relations() {
        use GeneratorKind::*;
        let one = OreOperator::one(Algebra::D, 1);
        assert_eq!(gen(Algebra::D, T).multiply(&gen(Algebra::D, Tinv)).unwrap(), one);
        assert_eq!(gen(Algebra::D, Tinv).multiply(&gen(Algebra::D, T)).unwrap(), one);
        let one = OreOperator::one(Algebra::S, 1);
        assert_eq!(gen(Algebra::S, TauInv).multiply(&gen(Algebra::S, Tau)).unwrap(), one);
        // θ t⁻¹ = t⁻¹(θ − 1)
        let th = gen(Algebra::D, Theta);
        let tinv = gen(Algebra::D, Tinv);
        let lhs = th.multiply(&tinv).unwrap();
        let rhs = tinv.multiply(&th.sub(&OreOperator::one(Algebra::D, 1)).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn add_and_negate() {
        use GeneratorKind::*;
        let t = gen(Algebra::D, T);
        let th = gen(Algebra::D, Theta);
        let t_th = t.multiply(&th).unwrap();
        assert!(t_th.add(&t_th.neg()).unwrap().is_zero());
        let sum = th.add(&t).unwrap();
        assert_eq!(sum.terms().len(), 2);
        let comm = th.multiply(&t).unwrap().add(&t.multiply(&th).unwrap().neg()).unwrap();
        assert_eq!(comm, t);
    }

    #[test]
    fn commutators_between_variables() {
        let th1 = OreOperator::generator(Algebra::D, 2, Generator::new(GeneratorKind::Theta, 1)).unwrap();
        let t1 = OreOperator::generator(Algebra::D, 2, Generator::new(GeneratorKind::T, 1)).unwrap();
        let t2 = OreOperator::generator(Algebra::D, 2, Generator::new(GeneratorKind::T, 2)).unwrap();
        assert_eq!(th1.commutator(&t1).unwrap(), t1);
        assert!(th1.commutator(&t2).unwrap().is_zero());
    }

    #[test]
    fn dtilde_cross_side_commutes() {
        use GeneratorKind::*;
        let g = |k| OreOperator::generator(Algebra::Dtilde, 1, Generator::new(k, 1)).unwrap();
        for (a, b) in [(S, T), (Theta, S), (Tau, T), (Theta, Tau), (TauInv, Tinv)] {
            assert!(g(a).commutator(&g(b)).unwrap().is_zero(), "{a:?} {b:?}");
        }
        assert_eq!(g(Theta).commutator(&g(T)).unwrap(), g(T));
        assert_eq!(g(Tau).commutator(&g(S)).unwrap(), g(Tau));
    }

    #[test]
    fn errors() {
        use GeneratorKind::*;
        let err = normalize(Algebra::D, 1, &[(q(1), word(&[T, S]))]).unwrap_err();
        assert!(matches!(err, Error::MixedAlgebra { .. }));
        let err = normalize(Algebra::D, 1, &[(q(1), vec![Generator::new(T, 2)])]).unwrap_err();
        assert_eq!(err, Error::IndexOutOfRange { index: 2, arity: 1 });
        let err = normalize(Algebra::S, 2, &[(q(1), vec![Generator::new(Tau, 0)])]).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { index: 0, .. }));
        let d = OreOperator::one(Algebra::D, 1);
        let s = OreOperator::one(Algebra::S, 1);
        assert!(matches!(d.multiply(&s), Err(Error::MixedAlgebra { .. })));
        let d2 = OreOperator::one(Algebra::D, 2);
        assert!(matches!(d.add(&d2), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(shifted_power(2, -1), vec![q(1), q(-2), q(1)]);
    }
}
