use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::{shifted_power, Rational};

/// Polynomial in `s_1, …, s_p` with exact rational coefficients.
///
/// The shift `τ_j` acts by `s_j ↦ s_j + 1` and is invertible.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShiftPolynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl ShiftPolynomial {
    pub fn zero(nvars: usize) -> Self {
        ShiftPolynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The variable `s_j` (0-based `j`).
    pub fn var(nvars: usize, j: usize) -> Self {
        assert!(j < nvars, "variable {j} out of range for {nvars} variables");
        let mut e = vec![0; nvars];
        e[j] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, Rational::one());
        p
    }

    /// Univariate polynomial from dense coefficients, lowest degree first.
    pub fn from_coeffs(coeffs: impl IntoIterator<Item = Rational>) -> Self {
        let mut p = Self::zero(1);
        for (i, c) in coeffs.into_iter().enumerate() {
            p.add_term(vec![i as u32], c);
        }
        p
    }

    /// Embeds a univariate polynomial as a polynomial in `s_j` among `nvars` variables.
    pub fn from_univariate(nvars: usize, j: usize, coeffs: &[Rational]) -> Self {
        let mut p = Self::zero(nvars);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; nvars];
            e[j] = i as u32;
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, Rational)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent length must match nvars");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, j: usize) -> u32 {
        self.terms.keys().map(|e| e[j]).max().unwrap_or(0)
    }

    /// Dense coefficients of a univariate polynomial, lowest degree first.
    pub fn coeffs(&self) -> Vec<Rational> {
        assert_eq!(self.nvars, 1, "coeffs() needs a univariate polynomial");
        if self.is_zero() {
            return Vec::new();
        }
        let mut out = vec![Rational::zero(); self.degree() as usize + 1];
        for (e, c) in &self.terms {
            out[e[0] as usize] = c.clone();
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        ShiftPolynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect(),
        }
    }

    /// `s_j ↦ s_j + k`, i.e. `τ_j^k` acting on the polynomial.
    pub fn shift(&self, j: usize, k: i64) -> Self {
        if k == 0 {
            return self.clone();
        }
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            for (i, b) in shifted_power(e[j], k).into_iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let mut e2 = e.clone();
                e2[j] = i as u32;
                out.add_term(e2, c * b);
            }
        }
        out
    }

    /// Applies `τ^k` for a whole shift vector.
    pub fn shift_by(&self, k: &[i64]) -> Self {
        let mut out = self.clone();
        for (j, &kj) in k.iter().enumerate() {
            out = out.shift(j, kj);
        }
        out
    }

    pub fn mul_var(&self, j: usize) -> Self {
        ShiftPolynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e = e.clone();
                    e[j] += 1;
                    (e, c.clone())
                })
                .collect(),
        }
    }

    pub fn evaluate(&self, s: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (x, &k) in s.iter().zip(e) {
                m *= num_traits::pow(x.clone(), k as usize);
            }
            acc += m;
        }
        acc
    }

    pub fn max_abs_coefficient(&self) -> Rational {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(Rational::zero)
    }
}

impl Add for &ShiftPolynomial {
    type Output = ShiftPolynomial;
    fn add(self, rhs: &ShiftPolynomial) -> ShiftPolynomial {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &ShiftPolynomial {
    type Output = ShiftPolynomial;
    fn sub(self, rhs: &ShiftPolynomial) -> ShiftPolynomial {
        self + &(-rhs)
    }
}

impl Neg for &ShiftPolynomial {
    type Output = ShiftPolynomial;
    fn neg(self) -> ShiftPolynomial {
        ShiftPolynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Mul for &ShiftPolynomial {
    type Output = ShiftPolynomial;
    fn mul(self, rhs: &ShiftPolynomial) -> ShiftPolynomial {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = ShiftPolynomial::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for ShiftPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let mut factors = Vec::new();
            for (j, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let name = if self.nvars == 1 { "s".to_string() } else { format!("s_{}", j + 1) };
                factors.push(if k == 1 { name } else { format!("{name}^{k}") });
            }
            if factors.is_empty() {
                write!(f, "{a}")?;
            } else {
                if !a.is_one() {
                    write!(f, "{a}*")?;
                }
                f.write_str(&factors.join("*"))?;
            }
        }
        Ok(())
    }
}
