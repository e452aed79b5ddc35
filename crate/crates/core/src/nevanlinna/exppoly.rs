//! Exponential polynomials `Σ p_k(z)·e^{c_k z}` and their quotients by
//! polynomials.

use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use crate::algebra::{Gaussian, Poly, RatFunc};

/// Canonical form: exponents strictly increasing in `(re, im)`, no zero
/// polynomial parts. Equality is therefore structural.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ExpPoly {
    terms: Vec<(Gaussian, Poly)>,
}

fn exp_key(c: &Gaussian) -> (BigRational, BigRational) {
    (c.re.clone(), c.im.clone())
}

impl ExpPoly {
    pub fn zero() -> Self {
        ExpPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn constant(c: Gaussian) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn z() -> Self {
        Self::from_poly(Poly::z())
    }

    pub fn from_poly(p: Poly) -> Self {
        Self::term(p, Gaussian::zero())
    }

    /// `e^{c z}`.
    pub fn exp(c: Gaussian) -> Self {
        Self::term(Poly::one(), c)
    }

    /// `p(z)·e^{c z}`.
    pub fn term(p: Poly, c: Gaussian) -> Self {
        Self::from_terms(vec![(c, p)])
    }

    /// Builds the canonical form from arbitrary `(exponent, polynomial)` pairs.
    pub fn from_terms(mut raw: Vec<(Gaussian, Poly)>) -> Self {
        raw.sort_by_key(|(c, _)| exp_key(c));
        let mut terms: Vec<(Gaussian, Poly)> = Vec::with_capacity(raw.len());
        for (c, p) in raw {
            match terms.last_mut() {
                Some((c0, p0)) if *c0 == c => *p0 = &*p0 + &p,
                _ => terms.push((c, p)),
            }
        }
        terms.retain(|(_, p)| !p.is_zero());
        ExpPoly { terms }
    }

    pub fn terms(&self) -> &[(Gaussian, Poly)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The polynomial when no exponential factor occurs.
    pub fn as_poly(&self) -> Option<Poly> {
        match self.terms.as_slice() {
            [] => Some(Poly::zero()),
            [(c, p)] if c.is_zero() => Some(p.clone()),
            _ => None,
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.as_poly().is_some()
    }

    pub fn add(&self, o: &ExpPoly) -> ExpPoly {
        Self::from_terms(self.terms.iter().chain(&o.terms).cloned().collect())
    }

    pub fn neg(&self) -> ExpPoly {
        ExpPoly {
            terms: self.terms.iter().map(|(c, p)| (c.clone(), -p)).collect(),
        }
    }

    pub fn sub(&self, o: &ExpPoly) -> ExpPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &ExpPoly) -> ExpPoly {
        let mut raw = Vec::with_capacity(self.terms.len() * o.terms.len());
        for (c1, p1) in &self.terms {
            for (c2, p2) in &o.terms {
                raw.push((c1 + c2, p1 * p2));
            }
        }
        Self::from_terms(raw)
    }

    pub fn mul_poly(&self, q: &Poly) -> ExpPoly {
        Self::from_terms(self.terms.iter().map(|(c, p)| (c.clone(), p * q)).collect())
    }

    pub fn scale(&self, k: &Gaussian) -> ExpPoly {
        self.mul_poly(&Poly::constant(k.clone()))
    }

    pub fn pow(&self, e: u32) -> ExpPoly {
        let mut acc = ExpPoly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `(p' + c·p)·e^{cz}` termwise.
    pub fn derivative(&self) -> ExpPoly {
        Self::from_terms(
            self.terms
                .iter()
                .map(|(c, p)| (c.clone(), &p.derivative() + &p.scale(c)))
                .collect(),
        )
    }

    pub fn nth_derivative(&self, k: u32) -> ExpPoly {
        (0..k).fold(self.clone(), |acc, _| acc.derivative())
    }

    /// Largest `Re(c_k z)`: the factor pulled out before summing.
    fn shift(&self, z: Complex64) -> f64 {
        self.terms
            .iter()
            .map(|(c, _)| (c.to_complex() * z).re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `(w, s)` with `F(z) = w·e^s`; keeps large exponentials finite.
    pub fn eval_scaled(&self, z: Complex64) -> (Complex64, f64) {
        if self.terms.is_empty() {
            return (Complex64::zero(), 0.0);
        }
        let s = self.shift(z);
        let w = self
            .terms
            .iter()
            .map(|(c, p)| p.eval_complex(z) * (c.to_complex() * z - s).exp())
            .sum();
        (w, s)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let (w, s) = self.eval_scaled(z);
        w * s.exp()
    }

    /// `log|F(z)|`, `-∞` at zeros.
    pub fn log_abs(&self, z: Complex64) -> f64 {
        let (w, s) = self.eval_scaled(z);
        w.norm().ln() + s
    }

    /// Largest `|c_k|`, a rate for how fast the argument can turn.
    pub fn exponent_radius(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.to_complex().norm()).fold(0.0, f64::max)
    }

    pub fn poly_degree(&self) -> usize {
        self.terms.iter().filter_map(|(_, p)| p.degree()).max().unwrap_or(0)
    }
}

impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (c, p)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if c.is_zero() {
                write!(f, "({p})")?;
            } else {
                write!(f, "({p})*exp(({c})*z)")?;
            }
        }
        Ok(())
    }
}

/// `num/den` with `den` a nonzero polynomial. Common polynomial factors of
/// `den` and every part of `num` are cancelled.
#[derive(Clone, Debug)]
pub struct MeroFn {
    num: ExpPoly,
    den: Poly,
}

impl MeroFn {
    pub fn new(num: ExpPoly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut g = den.clone();
        for (_, p) in num.terms() {
            if g.degree() == Some(0) {
                break;
            }
            g = g.gcd(p);
        }
        if num.is_zero() {
            return MeroFn {
                num,
                den: Poly::one(),
            };
        }
        let (num, den) = if g.degree().unwrap_or(0) > 0 {
            let num = ExpPoly::from_terms(
                num.terms()
                    .iter()
                    .map(|(c, p)| (c.clone(), p.exact_div(&g).unwrap()))
                    .collect(),
            );
            (num, den.exact_div(&g).unwrap())
        } else {
            (num, den)
        };
        // monic denominator
        let lead = den.leading();
        let inv = lead.inv().unwrap();
        MeroFn {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn from_exppoly(e: ExpPoly) -> Self {
        MeroFn::new(e, Poly::one())
    }

    pub fn from_ratfunc(f: &RatFunc) -> Self {
        MeroFn::new(ExpPoly::from_poly(f.numer().clone()), f.denom().clone())
    }

    pub fn numer(&self) -> &ExpPoly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &MeroFn) -> MeroFn {
        MeroFn::new(
            self.num.mul_poly(&o.den).add(&o.num.mul_poly(&self.den)),
            &self.den * &o.den,
        )
    }

    pub fn neg(&self) -> MeroFn {
        MeroFn {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &MeroFn) -> MeroFn {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &MeroFn) -> MeroFn {
        MeroFn::new(self.num.mul(&o.num), &self.den * &o.den)
    }

    pub fn pow(&self, e: u32) -> MeroFn {
        MeroFn::new(self.num.pow(e), self.den.pow(e))
    }

    pub fn derivative(&self) -> MeroFn {
        let top = self
            .num
            .derivative()
            .mul_poly(&self.den)
            .sub(&self.num.mul_poly(&self.den.derivative()));
        MeroFn::new(top, &self.den * &self.den)
    }

    pub fn nth_derivative(&self, k: u32) -> MeroFn {
        (0..k).fold(self.clone(), |acc, _| acc.derivative())
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.num.eval(z) / self.den.eval_complex(z)
    }

    pub fn log_abs(&self, z: Complex64) -> f64 {
        self.num.log_abs(z) - self.den.eval_complex(z).norm().ln()
    }

    pub fn as_ratfunc(&self) -> Option<RatFunc> {
        self.num.as_poly().map(|p| RatFunc::new(p, self.den.clone()))
    }
}

impl PartialEq for MeroFn {
    fn eq(&self, o: &MeroFn) -> bool {
        self.num.mul_poly(&o.den) == o.num.mul_poly(&self.den)
    }
}

impl fmt::Display for MeroFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "[{}]/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(a: i64, b: i64) -> Gaussian {
        Gaussian::from_ints(a, b)
    }

    #[test]
    fn canonical_form_merges_and_cancels() {
        let a = ExpPoly::exp(g(1, 0)).add(&ExpPoly::z());
        let b = ExpPoly::z().add(&ExpPoly::exp(g(1, 0)));
        assert_eq!(a, b);
        assert!(a.sub(&b).is_zero());
        // e^z·e^{-z} = 1
        assert_eq!(ExpPoly::exp(g(1, 0)).mul(&ExpPoly::exp(g(-1, 0))), ExpPoly::one());
    }

    #[test]
    fn derivative_rule() {
        // d/dz (z·e^{2z}) = (1 + 2z)e^{2z}
        let f = ExpPoly::term(Poly::z(), g(2, 0));
        let expected = ExpPoly::term(Poly::from_int_coeffs(&[1, 2]), g(2, 0));
        assert_eq!(f.derivative(), expected);
        // product rule
        let u = ExpPoly::exp(g(0, 1)).add(&ExpPoly::z());
        let v = ExpPoly::term(Poly::from_int_coeffs(&[1, 1]), g(-1, 2));
        assert_eq!(
            u.mul(&v).derivative(),
            u.derivative().mul(&v).add(&u.mul(&v.derivative()))
        );
    }

    #[test]
    fn scaled_evaluation_survives_large_exponents() {
        let f = ExpPoly::exp(g(20, 0)).add(&ExpPoly::one());
        let z = Complex64::new(40.0, 0.3);
        assert!((f.log_abs(z) - 800.0).abs() < 1e-9);
        let direct = ExpPoly::exp(g(1, 0)).eval(Complex64::new(1.0, 0.0));
        assert!((direct.re - std::f64::consts::E).abs() < 1e-12);
    }

    #[test]
    fn mero_arithmetic() {
        let z = MeroFn::from_exppoly(ExpPoly::z());
        let inv = MeroFn::new(ExpPoly::one(), Poly::z());
        assert_eq!(z.mul(&inv), MeroFn::from_exppoly(ExpPoly::one()));
        // (1/z)' = -1/z²
        let d = inv.derivative();
        assert_eq!(d, MeroFn::new(ExpPoly::constant(g(-1, 0)), Poly::z().pow(2)));
        // cancellation of the common factor z
        let m = MeroFn::new(ExpPoly::term(Poly::z(), g(1, 0)), Poly::from_int_coeffs(&[0, 2]));
        assert!(m.denom().is_one());
    }
}
