//! Recursive-descent parser for scalar literals and rational expressions.
//!
//! Accepted syntax: integers and decimals, `i`, the parameter `z` (or `z1`,
//! `z2`, … for several parameters), `+ - * /`, integer powers `^`, parentheses,
//! and juxtaposition as multiplication (`3i`, `2z`, `z(z+1)`).

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use super::gaussian::Gaussian;
use super::mpoly::MRat;
use super::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at position {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

fn err<T>(position: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        position,
        message: message.into(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(BigRational),
    I,
    /// Parameter index, 0-based (`z` and `z1` are both index 0).
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, usize),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i64),
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?), at);
                }
                Some(c) if c == b'(' || c == b'i' || c == b'z' || c.is_ascii_digit() => {
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let negative = if self.peek() == Some(b'-') {
                self.pos += 1;
                true
            } else {
                false
            };
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return err(start, "expected integer exponent after '^'");
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let e: i64 = text
                .parse()
                .or_else(|_| err(start, "exponent out of range"))?;
            return Ok(Expr::Pow(Box::new(base), if negative { -e } else { e }));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.pos;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return err(self.pos, "expected ')'");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(Expr::I)
            }
            Some(b'z') => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if start == self.pos {
                    return Ok(Expr::Var(0));
                }
                let k: usize = std::str::from_utf8(&self.src[start..self.pos])
                    .unwrap()
                    .parse()
                    .or_else(|_| err(start, "bad variable index"))?;
                if k == 0 {
                    return err(start, "variables are numbered from z1");
                }
                Ok(Expr::Var(k - 1))
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) => err(at, format!("unexpected character '{}'", c as char)),
            None => err(at, "unexpected end of input"),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let mut int_part = String::new();
        let mut frac_part = String::new();
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            int_part.push(self.src[self.pos] as char);
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                frac_part.push(self.src[self.pos] as char);
                self.pos += 1;
            }
        }
        if int_part.is_empty() && frac_part.is_empty() {
            return err(start, "malformed number");
        }
        let digits = format!("{int_part}{frac_part}");
        let numer: BigInt = digits.parse().unwrap();
        let denom = num_traits::pow(BigInt::from(10), frac_part.len());
        Ok(Expr::Num(BigRational::new(numer, denom)))
    }
}

/// Parses a complete expression.
pub fn parse_expr(s: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: s.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    if let Some(c) = p.peek() {
        return err(p.pos, format!("unexpected trailing character '{}'", c as char));
    }
    Ok(e)
}

impl Expr {
    /// Largest parameter index used plus one.
    pub fn parameter_count(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::I => 0,
            Expr::Var(k) => k + 1,
            Expr::Neg(a) | Expr::Pow(a, _) => a.parameter_count(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b, _) => {
                a.parameter_count().max(b.parameter_count())
            }
        }
    }

    /// Evaluates into the single-parameter field tower.
    pub fn to_scalar(&self) -> Result<Scalar, ParseError> {
        Ok(match self {
            Expr::Num(q) => Scalar::Rational(q.clone()),
            Expr::I => Scalar::i(),
            Expr::Var(0) => Scalar::z(),
            Expr::Var(k) => {
                return err(0, format!("only one parameter allowed here, found z{}", k + 1))
            }
            Expr::Add(a, b) => &a.to_scalar()? + &b.to_scalar()?,
            Expr::Sub(a, b) => &a.to_scalar()? - &b.to_scalar()?,
            Expr::Mul(a, b) => &a.to_scalar()? * &b.to_scalar()?,
            Expr::Div(a, b, at) => {
                let d = b.to_scalar()?;
                match d.inv() {
                    Some(inv) => &a.to_scalar()? * &inv,
                    None => return err(*at, "division by zero"),
                }
            }
            Expr::Neg(a) => -a.to_scalar()?,
            Expr::Pow(a, e) => {
                let base = a.to_scalar()?;
                if *e < 0 && base.is_zero() {
                    return err(0, "negative power of zero");
                }
                base.pow(*e as i32)
            }
        })
    }

    /// Evaluates into rational functions of `m` parameters.
    pub fn to_mrat(&self, m: usize) -> Result<MRat, ParseError> {
        Ok(match self {
            Expr::Num(q) => MRat::constant(m, Gaussian::from_rational(q.clone())),
            Expr::I => MRat::constant(m, Gaussian::i()),
            Expr::Var(k) => {
                if *k >= m {
                    return err(0, format!("parameter z{} exceeds dimension {m}", k + 1));
                }
                MRat::var(m, *k)
            }
            Expr::Add(a, b) => a.to_mrat(m)?.add(&b.to_mrat(m)?),
            Expr::Sub(a, b) => a.to_mrat(m)?.sub(&b.to_mrat(m)?),
            Expr::Mul(a, b) => a.to_mrat(m)?.mul(&b.to_mrat(m)?),
            Expr::Div(a, b, at) => {
                let d = b.to_mrat(m)?;
                if d.is_zero() {
                    return err(*at, "division by zero");
                }
                a.to_mrat(m)?.div(&d)
            }
            Expr::Neg(a) => a.to_mrat(m)?.neg(),
            Expr::Pow(a, e) => {
                let base = a.to_mrat(m)?;
                if *e < 0 {
                    if base.is_zero() {
                        return err(0, "negative power of zero");
                    }
                    MRat::constant(m, Gaussian::one()).div(&base.pow(e.unsigned_abs() as u32))
                } else {
                    base.pow(*e as u32)
                }
            }
        })
    }
}

/// Parses an exact rational such as `"1/2"`, `"3"` or `"0.25"`.
pub fn parse_rational(s: &str) -> Result<BigRational, ParseError> {
    match parse_expr(s)?.to_scalar()? {
        Scalar::Rational(q) => Ok(q),
        _ => err(0, format!("'{s}' is not a real rational number")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

    #[test]
    fn literals() {
        assert_eq!("3/4".parse::<Scalar>().unwrap(), Scalar::from_ratio(3, 4));
        assert_eq!("0.25".parse::<Scalar>().unwrap(), Scalar::from_ratio(1, 4));
        let g: Scalar = "2-5i".parse().unwrap();
        assert_eq!(g.to_gaussian().unwrap(), Gaussian::from_ints(2, -5));
        assert!(parse_rational("1/2").unwrap() == BigRational::new(1.into(), 2.into()));
        assert!(BigRational::one() == parse_rational("1").unwrap());
        assert!(BigRational::zero() == parse_rational("0").unwrap());
    }

    #[test]
    fn implicit_multiplication() {
        let a: Scalar = "2z(z+1)".parse().unwrap();
        let b: Scalar = "2*z^2 + 2*z".parse().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors_carry_positions() {
        let e = "1 + * 2".parse::<Scalar>().unwrap_err();
        assert_eq!(e.position, 4);
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("(z + 1".parse::<Scalar>().is_err());
        assert!("z2".parse::<Scalar>().is_err());
    }
}
