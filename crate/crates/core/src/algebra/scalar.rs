//! The coefficient field tower `ℚ ⊂ ℚ(i) ⊂ ℚ(i)(z)`.
//!
//! A [`Scalar`] always sits at the lowest level of the tower that can hold
//! its value, so two scalars are equal exactly when their representations are.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::gaussian::{fmt_rational, Gaussian};
use super::parse::{self, ParseError};
use super::ratfunc::RatFunc;
use super::upoly::Poly;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Gaussian(Gaussian),
    Function(RatFunc),
}

/// Which level of the tower a scalar lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum Variant {
    Rational,
    GaussianRational,
    RationalFunction,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rational(BigRational::one())
    }

    pub fn from_int(v: i64) -> Self {
        Scalar::Rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_ratio(p: i64, q: i64) -> Self {
        Scalar::Rational(BigRational::new(p.into(), q.into()))
    }

    pub fn i() -> Self {
        Scalar::Gaussian(Gaussian::i())
    }

    /// The parameter `z` of the rational-function level.
    pub fn z() -> Self {
        Scalar::Function(RatFunc::from_poly(Poly::z()))
    }

    pub fn from_gaussian(g: Gaussian) -> Self {
        if g.is_real() {
            Scalar::Rational(g.re)
        } else {
            Scalar::Gaussian(g)
        }
    }

    pub fn from_ratfunc(f: RatFunc) -> Self {
        match f.as_constant() {
            Some(c) => Self::from_gaussian(c),
            None => Scalar::Function(f),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        Self::from_ratfunc(RatFunc::from_poly(p))
    }

    pub fn variant(&self) -> Variant {
        match self {
            Scalar::Rational(_) => Variant::Rational,
            Scalar::Gaussian(_) => Variant::GaussianRational,
            Scalar::Function(_) => Variant::RationalFunction,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Scalar::Rational(q) if q.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Scalar::Rational(q) if q.is_one())
    }

    /// True when the value does not depend on `z`.
    pub fn is_constant(&self) -> bool {
        !matches!(self, Scalar::Function(_))
    }

    pub fn to_gaussian(&self) -> Option<Gaussian> {
        match self {
            Scalar::Rational(q) => Some(Gaussian::from_rational(q.clone())),
            Scalar::Gaussian(g) => Some(g.clone()),
            Scalar::Function(_) => None,
        }
    }

    pub fn to_ratfunc(&self) -> RatFunc {
        match self {
            Scalar::Function(f) => f.clone(),
            other => RatFunc::constant(other.to_gaussian().unwrap()),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(q) => Some(q),
            _ => None,
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        match self {
            Scalar::Rational(q) => (!q.is_zero()).then(|| Scalar::Rational(q.recip())),
            Scalar::Gaussian(g) => g.inv().map(Scalar::from_gaussian),
            Scalar::Function(f) => f.inv().map(Scalar::from_ratfunc),
        }
    }

    pub fn pow(&self, e: i32) -> Scalar {
        if e < 0 {
            return self.inv().expect("negative power of zero").pow(-e);
        }
        let mut base = self.clone();
        let mut acc = Scalar::one();
        let mut e = e as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Formal derivative in the parameter `z`; constants map to zero.
    pub fn derive(&self) -> Scalar {
        match self {
            Scalar::Function(f) => Scalar::from_ratfunc(f.derivative()),
            _ => Scalar::zero(),
        }
    }

    /// Value at the parameter point `z0`, `None` at a pole.
    pub fn eval_at(&self, z0: &Gaussian) -> Option<Gaussian> {
        match self {
            Scalar::Function(f) => f.eval(z0),
            other => other.to_gaussian(),
        }
    }

    /// Floating-point value at a complex parameter point.
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        match self {
            Scalar::Rational(q) => Complex64::new(q.to_f64().unwrap_or(f64::NAN), 0.0),
            Scalar::Gaussian(g) => g.to_complex(),
            Scalar::Function(f) => f.eval_complex(z),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{}", fmt_rational(q)),
            Scalar::Gaussian(g) => write!(f, "{g}"),
            Scalar::Function(r) => write!(f, "{r}"),
        }
    }
}

impl FromStr for Scalar {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse::parse_expr(s)?.to_scalar()
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::from_int(v)
    }
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Scalar::Rational(q)
    }
}

impl From<Gaussian> for Scalar {
    fn from(g: Gaussian) -> Self {
        Scalar::from_gaussian(g)
    }
}

fn binop(
    a: &Scalar,
    b: &Scalar,
    rat: impl Fn(&BigRational, &BigRational) -> BigRational,
    gau: impl Fn(&Gaussian, &Gaussian) -> Gaussian,
    fun: impl Fn(&RatFunc, &RatFunc) -> RatFunc,
) -> Scalar {
    match (a, b) {
        (Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(rat(x, y)),
        (Scalar::Function(_), _) | (_, Scalar::Function(_)) => {
            Scalar::from_ratfunc(fun(&a.to_ratfunc(), &b.to_ratfunc()))
        }
        _ => Scalar::from_gaussian(gau(&a.to_gaussian().unwrap(), &b.to_gaussian().unwrap())),
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        binop(self, o, |x, y| x + y, |x, y| x + y, |x, y| x.add(y))
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        if o.is_zero() {
            return self.clone();
        }
        binop(self, o, |x, y| x - y, |x, y| x - y, |x, y| x.sub(y))
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        if self.is_zero() || o.is_zero() {
            return Scalar::zero();
        }
        if self.is_one() {
            return o.clone();
        }
        if o.is_one() {
            return self.clone();
        }
        binop(self, o, |x, y| x * y, |x, y| x * y, |x, y| x.mul(y))
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    /// Panics on division by zero; use [`Scalar::inv`] for a checked inverse.
    fn div(self, o: &Scalar) -> Scalar {
        if let (Scalar::Rational(x), Scalar::Rational(y)) = (self, o) {
            assert!(!y.is_zero(), "division by zero scalar");
            return Scalar::Rational(x / y);
        }
        self * &o.inv().expect("division by zero scalar")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(q) => Scalar::Rational(-q.clone()),
            Scalar::Gaussian(g) => Scalar::Gaussian(-g),
            Scalar::Function(f) => Scalar::Function(f.neg()),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demotion_keeps_representation_canonical() {
        let z = Scalar::z();
        let diff = &(&z + &Scalar::i()) - &z;
        assert_eq!(diff, Scalar::i());
        assert_eq!(diff.variant(), Variant::GaussianRational);
        let sq = &Scalar::i() * &Scalar::i();
        assert_eq!(sq, Scalar::from_int(-1));
        assert_eq!(sq.variant(), Variant::Rational);
    }

    #[test]
    fn derivatives() {
        let z = Scalar::z();
        assert_eq!((&z * &z).derive(), &Scalar::from_int(2) * &z);
        let inv = z.inv().unwrap();
        assert_eq!(inv.derive(), -(&inv * &inv));
    }

    #[test]
    fn parse_round_trip() {
        for s in ["3/4", "2-5i", "1/2+3/4*i", "z/(z+1)", "(z^2 - 1)/(z - 2i)"] {
            let a: Scalar = s.parse().unwrap();
            let b: Scalar = a.to_string().parse().unwrap();
            assert_eq!(a, b, "{s}");
        }
    }
}
