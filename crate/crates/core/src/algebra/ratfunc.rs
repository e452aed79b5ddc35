//! Rational functions in `z` over the Gaussian rationals, kept reduced with a
//! monic denominator so that structural equality is field equality.

use std::fmt;

use num_complex::Complex64;

use super::gaussian::Gaussian;
use super::upoly::Poly;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    /// Reduces `num/den`; panics when `den` is zero.
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return RatFunc {
                num,
                den: Poly::one(),
            };
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.degree().unwrap_or(0) > 0 {
            (num.exact_div(&g).unwrap(), den.exact_div(&g).unwrap())
        } else {
            (num, den)
        };
        let lc = den.leading();
        if !lc.is_one() {
            let inv = lc.inv().unwrap();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        RatFunc { num, den }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn constant(c: Gaussian) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// Constant value when the function does not depend on `z`.
    pub fn as_constant(&self) -> Option<Gaussian> {
        self.is_constant().then(|| self.num.coeff(0))
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        if self.den == o.den {
            return RatFunc::new(&self.num + &o.num, self.den.clone());
        }
        RatFunc::new(
            &(&self.num * &o.den) + &(&o.num * &self.den),
            &self.den * &o.den,
        )
    }

    pub fn sub(&self, o: &RatFunc) -> RatFunc {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        RatFunc::new(&self.num * &o.num, &self.den * &o.den)
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Option<RatFunc> {
        (!self.is_zero()).then(|| RatFunc::new(self.den.clone(), self.num.clone()))
    }

    /// d/dz by the quotient rule.
    pub fn derivative(&self) -> RatFunc {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RatFunc::new(n, &self.den * &self.den)
    }

    /// Value at `z0`, or `None` at a pole.
    pub fn eval(&self, z0: &Gaussian) -> Option<Gaussian> {
        let d = self.den.eval(z0);
        if d.is_zero() {
            return None;
        }
        Some(&self.num.eval(z0) / &d)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.num.eval_complex(z) / self.den.eval_complex(z)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            let s = self.num.to_string();
            if self.num.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 {
                write!(f, "({s})")
            } else {
                write!(f, "{s}")
            }
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_is_canonical() {
        // (2z^2 - 2)/(4z + 4) = (z - 1)/2
        let a = RatFunc::new(Poly::from_int_coeffs(&[-2, 0, 2]), Poly::from_int_coeffs(&[4, 4]));
        let b = RatFunc::new(Poly::from_int_coeffs(&[-1, 1]), Poly::from_int_coeffs(&[2]));
        assert_eq!(a, b);
        assert!(a.is_polynomial());
    }

    #[test]
    fn derivative_of_reciprocal() {
        let inv_z = RatFunc::new(Poly::one(), Poly::z());
        let expected = RatFunc::new(Poly::from_int_coeffs(&[-1]), Poly::z().pow(2));
        assert_eq!(inv_z.derivative(), expected);
    }

    #[test]
    fn pole_evaluation() {
        let f = RatFunc::new(Poly::one(), Poly::from_int_coeffs(&[-1, 1]));
        assert!(f.eval(&Gaussian::one()).is_none());
        assert_eq!(f.eval(&Gaussian::from_int(3)).unwrap().to_string(), "1/2");
    }
}
