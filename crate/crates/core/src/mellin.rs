//! The algebraic Mellin transform `D → S` (`t_j ↦ τ_j`, `θ_j ↦ −s_j`), its
//! inverse, and the action of difference operators on functions of `s`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::numerics::quadrature::CompensatedSum;
use crate::ore::{Algebra, Monomial, OreOperator};

fn require(op: &OreOperator, algebra: Algebra) -> Result<()> {
    if op.algebra() != algebra {
        return Err(Error::MixedAlgebra {
            algebra: op.algebra(),
            detail: format!("expected an operator in {algebra}"),
        });
    }
    Ok(())
}

/// Image of a `D`-operator in `S`: `t^α θ^β ↦ τ^α (−s)^β`.
///
/// Both normal forms put the shift/multiplication part on the left, so the
/// substitution maps normal monomials to normal monomials.
pub fn mellin_op(p: &OreOperator) -> Result<OreOperator> {
    require(p, Algebra::D)?;
    let arity = p.arity();
    let terms = p.terms().iter().map(|(m, c)| {
        let mut out = Monomial::one(arity);
        out.tau = m.t.clone();
        out.s = m.theta.clone();
        let deg: u32 = m.theta.iter().sum();
        let c = if deg % 2 == 1 { -c.clone() } else { c.clone() };
        (out, c)
    });
    OreOperator::from_terms(Algebra::S, arity, terms)
}

/// Inverse transform: `τ^α s^β ↦ t^α (−θ)^β`.
pub fn inverse_mellin_op(q: &OreOperator) -> Result<OreOperator> {
    require(q, Algebra::S)?;
    let arity = q.arity();
    let terms = q.terms().iter().map(|(m, c)| {
        let mut out = Monomial::one(arity);
        out.t = m.tau.clone();
        out.theta = m.s.clone();
        let deg: u32 = m.s.iter().sum();
        let c = if deg % 2 == 1 { -c.clone() } else { c.clone() };
        (out, c)
    });
    OreOperator::from_terms(Algebra::D, arity, terms)
}

/// A matrix of operators sharing one algebra and arity.
#[derive(Debug, Clone, PartialEq)]
pub struct PresentationMatrix {
    algebra: Algebra,
    arity: usize,
    rows: usize,
    cols: usize,
    entries: Vec<OreOperator>,
}

impl PresentationMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(algebra: Algebra, arity: usize, rows: usize, cols: usize, entries: Vec<OreOperator>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        for e in &entries {
            if e.algebra() != algebra {
                return Err(Error::MixedAlgebra {
                    algebra,
                    detail: format!("entry lives in {}", e.algebra()),
                });
            }
            if e.arity() != arity {
                return Err(Error::ArityMismatch { left: arity, right: e.arity() });
            }
        }
        Ok(PresentationMatrix { algebra, arity, rows, cols, entries })
    }

    pub fn zero(algebra: Algebra, arity: usize, rows: usize, cols: usize) -> Self {
        PresentationMatrix {
            algebra,
            arity,
            rows,
            cols,
            entries: vec![OreOperator::zero(algebra, arity); rows * cols],
        }
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &OreOperator {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[OreOperator] {
        &self.entries
    }
}

/// Entry-wise Mellin transform of a presentation matrix over `D`.
pub fn mellin_presentation(m: &PresentationMatrix) -> Result<PresentationMatrix> {
    if m.algebra != Algebra::D {
        return Err(Error::MixedAlgebra {
            algebra: m.algebra,
            detail: "expected a matrix over D".into(),
        });
    }
    let entries = m.entries.iter().map(mellin_op).collect::<Result<Vec<_>>>()?;
    PresentationMatrix::new(Algebra::S, m.arity, m.rows, m.cols, entries)
}

fn fmt_point(s: &[Complex64]) -> String {
    let parts: Vec<String> = s.iter().map(|z| format!("{}{:+}i", z.re, z.im)).collect();
    parts.join(",")
}

/// The individual contributions `c·(s+α)^β·F(s+α)` of each term of `Q`, in
/// term order.
///
/// `F` is evaluated once per distinct shift vector.
pub fn difference_terms<F>(q: &OreOperator, f: F, s: &[Complex64]) -> Result<Vec<Complex64>>
where
    F: Fn(&[Complex64]) -> Result<Complex64>,
{
    require(q, Algebra::S)?;
    if s.len() != q.arity() {
        return Err(Error::ArityMismatch { left: q.arity(), right: s.len() });
    }
    let mut cache: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
    let mut out = Vec::with_capacity(q.terms().len());
    for (m, c) in q.terms() {
        let shifted: Vec<Complex64> = s.iter().zip(&m.tau).map(|(z, &a)| z + a as f64).collect();
        let value = match cache.get(&m.tau) {
            Some(v) => *v,
            None => {
                let v = f(&shifted).map_err(|e| Error::EvaluationFailure {
                    at: fmt_point(&shifted),
                    reason: e.to_string(),
                })?;
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::EvaluationFailure {
                        at: fmt_point(&shifted),
                        reason: "non-finite value".into(),
                    });
                }
                cache.insert(m.tau.clone(), v);
                v
            }
        };
        let c = c.to_f64().ok_or_else(|| Error::InvalidInput("coefficient out of f64 range".into()))?;
        let mut term = Complex64::new(c, 0.0) * value;
        for (z, &b) in shifted.iter().zip(&m.s) {
            term *= z.powu(b);
        }
        out.push(term);
    }
    Ok(out)
}

/// Evaluates `(Q·F)(s)` where `τ_j` shifts `s_j` by `+1` and `s_j` multiplies:
/// `(τ^α s^β F)(s) = (s+α)^β F(s+α)`.
pub fn apply_difference<F>(q: &OreOperator, f: F, s: &[Complex64]) -> Result<Complex64>
where
    F: Fn(&[Complex64]) -> Result<Complex64>,
{
    let terms = difference_terms(q, f, s)?;
    Ok(terms.into_iter().collect::<CompensatedSum>().value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ore::{Generator, GeneratorKind, Rational};

    fn gen(alg: Algebra, kind: GeneratorKind) -> OreOperator {
        OreOperator::generator(alg, 1, Generator::new(kind, 1)).unwrap()
    }

    #[test]
    fn generators_map() {
        use GeneratorKind::*;
        assert_eq!(mellin_op(&gen(Algebra::D, T)).unwrap(), gen(Algebra::S, Tau));
        assert_eq!(mellin_op(&gen(Algebra::D, Tinv)).unwrap(), gen(Algebra::S, TauInv));
        assert_eq!(mellin_op(&gen(Algebra::D, Theta)).unwrap(), gen(Algebra::S, S).neg());
        assert_eq!(inverse_mellin_op(&gen(Algebra::S, S)).unwrap(), gen(Algebra::D, Theta).neg());
        let one = OreOperator::one(Algebra::D, 1);
        assert_eq!(mellin_op(&one).unwrap(), OreOperator::one(Algebra::S, 1));
    }

    #[test]
    fn gamma_operator() {
        use GeneratorKind::*;
        let t = gen(Algebra::D, T);
        let th = gen(Algebra::D, Theta);
        let p = t.multiply(&th).unwrap().add(&t).unwrap();
        let tau = gen(Algebra::S, Tau);
        let s = gen(Algebra::S, S);
        let expected = tau.multiply(&s).unwrap().neg().add(&tau).unwrap();
        assert_eq!(mellin_op(&p).unwrap(), expected);
    }

    #[test]
    fn rejects_wrong_side() {
        assert!(matches!(
            mellin_op(&OreOperator::one(Algebra::S, 1)),
            Err(Error::MixedAlgebra { .. })
        ));
        assert!(matches!(
            inverse_mellin_op(&OreOperator::one(Algebra::D, 1)),
            Err(Error::MixedAlgebra { .. })
        ));
    }

    #[test]
    fn difference_action_on_polynomial() {
        use GeneratorKind::*;
        // (τ s)F(s) = (s+1)F(s+1); with F(s) = s² at s = 2 that is 3·9.
        let q = gen(Algebra::S, Tau).multiply(&gen(Algebra::S, S)).unwrap();
        let v = apply_difference(&q, |z| Ok(z[0] * z[0]), &[Complex64::new(2.0, 0.0)]).unwrap();
        assert!((v - Complex64::new(27.0, 0.0)).norm() < 1e-12);
        let half = OreOperator::constant(Algebra::S, 1, Rational::new(1.into(), 2.into()));
        let v = apply_difference(&half, |z| Ok(z[0]), &[Complex64::new(3.0, 1.0)]).unwrap();
        assert!((v - Complex64::new(1.5, 0.5)).norm() < 1e-12);
    }

    #[test]
    fn evaluation_failure_is_reported() {
        let tau = gen(Algebra::S, GeneratorKind::Tau);
        let err = apply_difference(
            &tau,
            |z| {
                if z[0].re > 1.5 {
                    Err(Error::InvalidInput("outside domain".into()))
                } else {
                    Ok(z[0])
                }
            },
            &[Complex64::new(1.0, 0.0)],
        )
        .unwrap_err();
        assert!(matches!(err, Error::EvaluationFailure { .. }));
    }

    #[test]
    fn presentation_shape_checks() {
        let m = PresentationMatrix::new(Algebra::D, 1, 1, 2, vec![OreOperator::one(Algebra::D, 1)]);
        assert!(matches!(m, Err(Error::InvalidInput(_))));
        let z = PresentationMatrix::zero(Algebra::D, 2, 2, 3);
        let mz = mellin_presentation(&z).unwrap();
        assert_eq!(mz.shape(), (2, 3));
        assert!(mz.entries().iter().all(|e| e.is_zero() && e.algebra() == Algebra::S));
    }
}
