use std::collections::BTreeMap;

use num_traits::Zero;

use super::{Algebra, OreOperator, Rational, ShiftPolynomial};
use crate::error::{Error, Result};

/// Finite Laurent polynomial `Σ b_n(s) t^n` with shift-polynomial coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftLaurent {
    arity: usize,
    terms: BTreeMap<Vec<i64>, ShiftPolynomial>,
}

impl ShiftLaurent {
    pub fn zero(arity: usize) -> Self {
        ShiftLaurent { arity, terms: BTreeMap::new() }
    }

    pub fn monomial(n: Vec<i64>, b: ShiftPolynomial) -> Self {
        let mut x = Self::zero(n.len());
        x.add_term(n, b);
        x
    }

    pub fn add_term(&mut self, n: Vec<i64>, b: ShiftPolynomial) {
        assert_eq!(n.len(), self.arity, "exponent length must match arity");
        if b.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&n) {
            Some(old) => &old + &b,
            None => b,
        };
        if !sum.is_zero() {
            self.terms.insert(n, sum);
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i64>, ShiftPolynomial> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Vec<i64>, ShiftPolynomial> {
        self.terms
    }

    pub fn coefficient(&self, n: &[i64]) -> ShiftPolynomial {
        self.terms
            .get(n)
            .cloned()
            .unwrap_or_else(|| ShiftPolynomial::zero(self.arity))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (n, b) in &other.terms {
            out.add_term(n.clone(), b.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        ShiftLaurent {
            arity: self.arity,
            terms: self.terms.iter().map(|(n, b)| (n.clone(), -b)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
}

/// `(n_j − s_j − 1)`, the eigenvalue of the twisted Euler operator on `t^n`.
fn twisted_theta_factor(arity: usize, j: usize, n_j: i64) -> ShiftPolynomial {
    let c = ShiftPolynomial::constant(arity, Rational::from_integer((n_j - 1).into()));
    &c - &ShiftPolynomial::var(arity, j)
}

/// Applies one normal monomial `c · t^α θ^β τ^γ s^δ` to `b(s) t^n`, factors acting
/// right to left.
pub(crate) fn apply_monomial(
    m: &super::Monomial,
    c: &Rational,
    n: &[i64],
    b: &ShiftPolynomial,
) -> (Vec<i64>, ShiftPolynomial) {
    let p = n.len();
    let mut coeff = b.scale(c);
    for j in 0..p {
        for _ in 0..m.s[j] {
            coeff = coeff.mul_var(j);
        }
    }
    coeff = coeff.shift_by(&m.tau);
    for j in 0..p {
        if m.theta[j] > 0 {
            let f = twisted_theta_factor(p, j, n[j]);
            for _ in 0..m.theta[j] {
                coeff = &coeff * &f;
            }
        }
    }
    let exps = n.iter().zip(&m.t).map(|(a, b)| a + b).collect();
    (exps, coeff)
}

/// Twisted action of `D` (or `D̃`) on shift-coefficient Laurent polynomials:
/// `t_j` raises the exponent, `θ_j` multiplies by `(n_j − s_j − 1)`, `τ_j` shifts
/// the coefficient in `s_j` and `s_j` multiplies by `s_j`.
pub fn apply_twisted_laurent(op: &OreOperator, x: &ShiftLaurent) -> Result<ShiftLaurent> {
    if op.algebra() == Algebra::S {
        return Err(Error::MixedAlgebra {
            algebra: Algebra::S,
            detail: "the twisted action needs an operator in D or Dtilde".into(),
        });
    }
    if op.arity() != x.arity() {
        return Err(Error::ArityMismatch { left: op.arity(), right: x.arity() });
    }
    let mut out = ShiftLaurent::zero(x.arity());
    for (m, c) in op.terms() {
        if c.is_zero() {
            continue;
        }
        for (n, b) in x.terms() {
            let (n2, b2) = apply_monomial(m, c, n, b);
            out.add_term(n2, b2);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ore::{Generator, GeneratorKind};

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn gen(alg: Algebra, kind: GeneratorKind) -> OreOperator {
        OreOperator::generator(alg, 1, Generator::new(kind, 1)).unwrap()
    }

    #[test]
    fn theta_acts_by_twisted_eigenvalue() {
        let b = ShiftPolynomial::from_coeffs([q(1), q(1)]);
        let x = ShiftLaurent::monomial(vec![3], b.clone());
        let y = apply_twisted_laurent(&gen(Algebra::D, GeneratorKind::Theta), &x).unwrap();
        let two_minus_s = ShiftPolynomial::from_coeffs([q(2), q(-1)]);
        assert_eq!(y, ShiftLaurent::monomial(vec![3], &two_minus_s * &b));
    }

    #[test]
    fn t_raises_exponent() {
        let b = ShiftPolynomial::from_coeffs([q(0), q(1)]);
        let x = ShiftLaurent::monomial(vec![3], b.clone());
        let y = apply_twisted_laurent(&gen(Algebra::D, GeneratorKind::T), &x).unwrap();
        assert_eq!(y, ShiftLaurent::monomial(vec![4], b));
    }

    #[test]
    fn difference_generator_on_inverse_powers() {
        let tau = gen(Algebra::Dtilde, GeneratorKind::Tau);
        let tinv = gen(Algebra::Dtilde, GeneratorKind::Tinv);
        let a_op = tau.multiply(&tinv).unwrap().sub(&OreOperator::one(Algebra::Dtilde, 1)).unwrap();
        let a0 = ShiftPolynomial::from_coeffs([q(2), q(1)]);
        let a1 = ShiftPolynomial::from_coeffs([q(0), q(0), q(1)]);
        let mut x = ShiftLaurent::monomial(vec![0], a0.clone());
        x.add_term(vec![-1], a1.clone());
        let y = apply_twisted_laurent(&a_op, &x).unwrap();
        let mut expected = ShiftLaurent::monomial(vec![0], -&a0);
        expected.add_term(vec![-1], &a0.shift(0, 1) - &a1);
        expected.add_term(vec![-2], a1.shift(0, 1));
        assert_eq!(y, expected);
    }

    #[test]
    fn rejects_difference_algebra() {
        let x = ShiftLaurent::zero(1);
        let err = apply_twisted_laurent(&OreOperator::one(Algebra::S, 1), &x).unwrap_err();
        assert!(matches!(err, Error::MixedAlgebra { .. }));
    }
}
