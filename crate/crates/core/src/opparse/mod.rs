//! Text syntax for operators.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' nat)?
//! atom   := generator | nat ['/' nat] | '(' expr ')'
//! ```
//!
//! Generators are `t`, `tinv`, `th`, `s`, `tau`, `tauinv` and `Dt` (= `tinv*th`),
//! each with an optional `_j` index suffix. `*` is noncommutative.

mod lexer;

use std::cmp::Reverse;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ore::{Algebra, Generator, GeneratorKind, Monomial, OreOperator, Rational};

pub use lexer::{tokenize, Token, TokenKind};

/// Largest exponent accepted after `^`.
pub const MAX_EXPONENT: u32 = 256;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Forces the target algebra; otherwise it is inferred from the generators.
    pub algebra: Option<Algebra>,
    /// Forces the arity; otherwise the largest index used (at least 1).
    pub arity: Option<usize>,
}

impl ParseOptions {
    pub fn new(algebra: Algebra, arity: usize) -> Self {
        ParseOptions { algebra: Some(algebra), arity: Some(arity) }
    }
}

/// Symbols that may appear as leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symbol {
    Gen(GeneratorKind),
    /// `t⁻¹·θ`, i.e. `∂t`.
    Dt,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorExpr {
    Symbol { symbol: Symbol, index: usize, offset: usize },
    Number(Rational),
    Neg(Box<OperatorExpr>),
    Sum(Vec<OperatorExpr>),
    Product(Vec<OperatorExpr>),
    Power(Box<OperatorExpr>, u32),
}

fn lookup(name: &str) -> Option<Symbol> {
    use GeneratorKind::*;
    Some(match name {
        "t" => Symbol::Gen(T),
        "tinv" => Symbol::Gen(Tinv),
        "th" => Symbol::Gen(Theta),
        "s" => Symbol::Gen(S),
        "tau" => Symbol::Gen(Tau),
        "tauinv" => Symbol::Gen(TauInv),
        "Dt" => Symbol::Dt,
        _ => return None,
    })
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.kind != TokenKind::End {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> Error {
        let t = self.peek();
        Error::Syntax {
            offset: t.offset,
            message: format!("expected {expected}, found {}", t.kind.describe()),
        }
    }

    fn expr(&mut self) -> Result<OperatorExpr> {
        let mut terms = Vec::new();
        let leading_minus = self.peek().kind == TokenKind::Minus;
        if leading_minus {
            self.bump();
        }
        let first = self.term()?;
        terms.push(if leading_minus { OperatorExpr::Neg(Box::new(first)) } else { first });
        loop {
            match self.peek().kind {
                TokenKind::Plus => {
                    self.bump();
                    terms.push(self.term()?);
                }
                TokenKind::Minus => {
                    self.bump();
                    terms.push(OperatorExpr::Neg(Box::new(self.term()?)));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { OperatorExpr::Sum(terms) })
    }

    fn term(&mut self) -> Result<OperatorExpr> {
        let mut factors = vec![self.factor()?];
        while self.peek().kind == TokenKind::Star {
            self.bump();
            factors.push(self.factor()?);
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { OperatorExpr::Product(factors) })
    }

    fn factor(&mut self) -> Result<OperatorExpr> {
        let base = self.atom()?;
        if self.peek().kind != TokenKind::Caret {
            return Ok(base);
        }
        self.bump();
        let tok = self.peek().clone();
        let TokenKind::Number(n) = &tok.kind else {
            return Err(self.unexpected("a non-negative integer exponent"));
        };
        let e = u32::try_from(n)
            .ok()
            .filter(|&e| e <= MAX_EXPONENT)
            .ok_or_else(|| Error::Syntax {
                offset: tok.offset,
                message: format!("exponent {n} exceeds the maximum {MAX_EXPONENT}"),
            })?;
        self.bump();
        Ok(OperatorExpr::Power(Box::new(base), e))
    }

    fn atom(&mut self) -> Result<OperatorExpr> {
        let tok = self.peek().clone();
        match tok.kind {
            TokenKind::Ident { name, index } => {
                let symbol = lookup(&name).ok_or_else(|| Error::Syntax {
                    offset: tok.offset,
                    message: format!("unknown generator '{name}'"),
                })?;
                self.bump();
                Ok(OperatorExpr::Symbol { symbol, index: index.unwrap_or(1), offset: tok.offset })
            }
            TokenKind::Number(num) => {
                self.bump();
                if self.peek().kind != TokenKind::Slash {
                    return Ok(OperatorExpr::Number(Rational::from_integer(num)));
                }
                self.bump();
                let dtok = self.peek().clone();
                let TokenKind::Number(den) = dtok.kind else {
                    return Err(self.unexpected("a denominator"));
                };
                if den.is_zero() {
                    return Err(Error::Syntax { offset: dtok.offset, message: "zero denominator".into() });
                }
                self.bump();
                Ok(OperatorExpr::Number(Rational::new(num, den)))
            }
            TokenKind::LParen => {
                self.bump();
                let inner = self.expr()?;
                if self.peek().kind != TokenKind::RParen {
                    return Err(self.unexpected("')'"));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.unexpected("a generator, number or '('")),
        }
    }
}

/// Parses text into an expression tree without resolving the algebra.
pub fn parse_expr(text: &str) -> Result<OperatorExpr> {
    let mut p = Parser { tokens: tokenize(text)?, pos: 0 };
    let e = p.expr()?;
    if p.peek().kind != TokenKind::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(e)
}

fn collect_symbols(e: &OperatorExpr, out: &mut Vec<(Symbol, usize, usize)>) {
    match e {
        OperatorExpr::Symbol { symbol, index, offset } => out.push((*symbol, *index, *offset)),
        OperatorExpr::Number(_) => {}
        OperatorExpr::Neg(x) | OperatorExpr::Power(x, _) => collect_symbols(x, out),
        OperatorExpr::Sum(xs) | OperatorExpr::Product(xs) => xs.iter().for_each(|x| collect_symbols(x, out)),
    }
}

fn is_t_side(sym: Symbol) -> bool {
    match sym {
        Symbol::Gen(k) => k.is_t_side(),
        Symbol::Dt => true,
    }
}

fn lower(e: &OperatorExpr, algebra: Algebra, arity: usize) -> Result<OreOperator> {
    match e {
        OperatorExpr::Symbol { symbol, index, .. } => match symbol {
            Symbol::Gen(kind) => OreOperator::generator(algebra, arity, Generator::new(*kind, *index)),
            Symbol::Dt => {
                let tinv = OreOperator::generator(algebra, arity, Generator::new(GeneratorKind::Tinv, *index))?;
                let th = OreOperator::generator(algebra, arity, Generator::new(GeneratorKind::Theta, *index))?;
                tinv.multiply(&th)
            }
        },
        OperatorExpr::Number(q) => Ok(OreOperator::constant(algebra, arity, q.clone())),
        OperatorExpr::Neg(x) => Ok(lower(x, algebra, arity)?.neg()),
        OperatorExpr::Sum(xs) => {
            let mut acc = OreOperator::zero(algebra, arity);
            for x in xs {
                acc = acc.add(&lower(x, algebra, arity)?)?;
            }
            Ok(acc)
        }
        OperatorExpr::Product(xs) => {
            let mut acc = OreOperator::one(algebra, arity);
            for x in xs {
                acc = acc.multiply(&lower(x, algebra, arity)?)?;
            }
            Ok(acc)
        }
        OperatorExpr::Power(x, n) => lower(x, algebra, arity)?.pow(*n),
    }
}

/// Parses and normalizes an operator.
pub fn parse_with(text: &str, opts: ParseOptions) -> Result<OreOperator> {
    let expr = parse_expr(text)?;
    let mut symbols = Vec::new();
    collect_symbols(&expr, &mut symbols);

    let max_index = symbols.iter().map(|s| s.1).max().unwrap_or(1);
    let arity = opts.arity.unwrap_or(max_index);
    if arity == 0 {
        return Err(Error::InvalidInput("arity must be positive".into()));
    }
    if let Some(&(_, index, _)) = symbols.iter().find(|s| s.1 > arity) {
        return Err(Error::IndexOutOfRange { index, arity });
    }

    let first_t = symbols.iter().find(|s| is_t_side(s.0));
    let first_s = symbols.iter().find(|s| !is_t_side(s.0));
    let algebra = match opts.algebra {
        Some(Algebra::D) if first_s.is_some() => {
            return Err(Error::MixedAlgebra {
                algebra: Algebra::D,
                detail: format!("s-side generator at byte {}", first_s.unwrap().2),
            })
        }
        Some(Algebra::S) if first_t.is_some() => {
            return Err(Error::MixedAlgebra {
                algebra: Algebra::S,
                detail: format!("t-side generator at byte {}", first_t.unwrap().2),
            })
        }
        Some(a) => a,
        None => match (first_t, first_s) {
            (Some(t), Some(s)) => {
                return Err(Error::MixedAlgebra {
                    algebra: Algebra::D,
                    detail: format!(
                        "t-side generator at byte {} and s-side generator at byte {}; use the Dtilde hint",
                        t.2, s.2
                    ),
                })
            }
            (None, Some(_)) => Algebra::S,
            _ => Algebra::D,
        },
    };
    lower(&expr, algebra, arity)
}

/// Parses with the algebra and arity inferred from the text.
pub fn parse(text: &str) -> Result<OreOperator> {
    parse_with(text, ParseOptions::default())
}

fn power(name: &str, index: usize, e: u64, indexed: bool) -> String {
    let mut s = name.to_string();
    if indexed {
        s.push_str(&format!("_{}", index + 1));
    }
    if e != 1 {
        s.push_str(&format!("^{e}"));
    }
    s
}

fn monomial_factors(m: &Monomial) -> Vec<String> {
    let p = m.arity();
    let indexed = p > 1;
    let mut out = Vec::new();
    for j in 0..p {
        match m.t[j] {
            0 => {}
            e if e > 0 => out.push(power("t", j, e as u64, indexed)),
            e => out.push(power("tinv", j, e.unsigned_abs(), indexed)),
        }
    }
    for j in 0..p {
        if m.theta[j] > 0 {
            out.push(power("th", j, m.theta[j] as u64, indexed));
        }
    }
    for j in 0..p {
        match m.tau[j] {
            0 => {}
            e if e > 0 => out.push(power("tau", j, e as u64, indexed)),
            e => out.push(power("tauinv", j, e.unsigned_abs(), indexed)),
        }
    }
    for j in 0..p {
        if m.s[j] > 0 {
            out.push(power("s", j, m.s[j] as u64, indexed));
        }
    }
    out
}

fn format_rational(q: &Rational) -> String {
    if q.denom() == &BigInt::one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Canonical text: terms by descending total degree (ties by descending
/// monomial order), unit coefficients omitted, index suffixes when `p > 1`.
pub fn format(p: &OreOperator) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut terms: Vec<(&Monomial, &Rational)> = p.terms().iter().collect();
    terms.sort_by_key(|(m, _)| Reverse((m.total_degree(), (*m).clone())));
    let mut out = String::new();
    for (i, (m, c)) in terms.into_iter().enumerate() {
        let neg = c.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let a = c.abs();
        let factors = monomial_factors(m);
        if factors.is_empty() {
            out.push_str(&format_rational(&a));
        } else {
            if !a.is_one() {
                out.push_str(&format_rational(&a));
                out.push('*');
            }
            out.push_str(&factors.join("*"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn parses_and_normalizes() {
        assert_eq!(format(&parse("th*t").unwrap()), "t*th + t");
        assert_eq!(format(&parse("t*th + t").unwrap()), "t*th + t");
        assert_eq!(format(&parse("s*tau").unwrap()), "tau*s - tau");
        assert_eq!(format(&parse("-tau*s + tau").unwrap()), "-tau*s + tau");
        assert_eq!(format(&parse("t*th^0 + 0 + th + t").unwrap()), "2*t + th");
    }

    #[test]
    fn formats_zero_and_constants() {
        assert_eq!(format(&OreOperator::zero(Algebra::D, 1)), "0");
        assert_eq!(format(&parse("3/6").unwrap()), "1/2");
        assert_eq!(format(&parse("-(2)").unwrap()), "-2");
        assert_eq!(format(&parse("t - t").unwrap()), "0");
    }

    #[test]
    fn dt_token() {
        let dt = parse("Dt").unwrap();
        assert_eq!(dt, parse("tinv*th").unwrap());
        // t·∂t = θ
        assert_eq!(parse("t*Dt").unwrap(), parse("th").unwrap());
    }

    #[test]
    fn multi_index() {
        let p = parse("th_2*t_2 + t_1").unwrap();
        assert_eq!(p.arity(), 2);
        assert_eq!(format(&p), "t_2*th_2 + t_1 + t_2");
        assert_eq!(parse_with(&format(&p), ParseOptions::new(Algebra::D, 2)).unwrap(), p);
    }

    #[test]
    fn inference_and_hints() {
        assert_eq!(parse("tau").unwrap().algebra(), Algebra::S);
        assert_eq!(parse("2").unwrap().algebra(), Algebra::D);
        let err = parse("t*s").unwrap_err();
        assert!(matches!(err, Error::MixedAlgebra { .. }));
        let p = parse_with("t*s", ParseOptions { algebra: Some(Algebra::Dtilde), arity: None }).unwrap();
        assert_eq!(format(&p), "t*s");
        assert!(matches!(
            parse_with("tau", ParseOptions { algebra: Some(Algebra::D), arity: None }),
            Err(Error::MixedAlgebra { .. })
        ));
        assert_eq!(
            parse_with("t_3", ParseOptions { algebra: None, arity: Some(2) }).unwrap_err(),
            Error::IndexOutOfRange { index: 3, arity: 2 }
        );
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        let cases = [
            ("t +", 3),
            ("t ** th", 3),
            ("t^x", 2),
            ("(t + th", 7),
            ("foo", 0),
            ("t th", 2),
            ("2/0", 2),
            ("t^999", 2),
            ("", 0),
            ("t*-th", 2),
            (")", 0),
        ];
        for (text, offset) in cases {
            match parse(text) {
                Err(Error::Syntax { offset: o, .. }) => assert_eq!(o, offset, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn powers_and_precedence() {
        let p = parse("2*t^2 - th").unwrap();
        let mut m = Monomial::one(1);
        m.t[0] = 2;
        assert_eq!(p.coefficient(&m), q(2));
        assert_eq!(parse("(t+1)^2").unwrap(), parse("t^2 + 2*t + 1").unwrap());
        assert_eq!(parse("tinv^2*t").unwrap(), parse("tinv").unwrap());
    }
}
