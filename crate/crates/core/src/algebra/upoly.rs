//! Dense univariate polynomials in the parameter `z` over the Gaussian rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::gaussian::Gaussian;

/// Coefficients stored low degree first; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Gaussian>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Gaussian::one())
    }

    pub fn constant(c: Gaussian) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The polynomial `z`.
    pub fn z() -> Self {
        Self::from_coeffs(vec![Gaussian::zero(), Gaussian::one()])
    }

    pub fn monomial(c: Gaussian, k: usize) -> Self {
        let mut v = vec![Gaussian::zero(); k + 1];
        v[k] = c;
        Self::from_coeffs(v)
    }

    /// `z - a`
    pub fn linear_root(a: &Gaussian) -> Self {
        Self::from_coeffs(vec![-a, Gaussian::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<Gaussian>) -> Self {
        while coeffs.last().is_some_and(Gaussian::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_int_coeffs(c: &[i64]) -> Self {
        Self::from_coeffs(c.iter().map(|&v| Gaussian::from_int(v)).collect())
    }

    pub fn coeffs(&self) -> &[Gaussian] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Gaussian {
        self.coeffs.get(k).cloned().unwrap_or_else(Gaussian::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Gaussian {
        self.coeffs.last().cloned().unwrap_or_else(Gaussian::zero)
    }

    pub fn scale(&self, c: &Gaussian) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        let inv = self.leading().inv().unwrap();
        self.scale(&inv)
    }

    /// Euclidean division; panics when `d` is zero.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("polynomial division by zero");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let lc_inv = d.leading().inv().unwrap();
        let mut quot = vec![Gaussian::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &lc_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &(&c * dc);
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    /// Quotient when `d` divides `self`, else `None`.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (da, db) = (self.degree().unwrap_or(0), other.degree().unwrap_or(0));
        if da > 0 && db > 0 && da + db > 6 {
            if let Some(g) = super::modgcd::modular_gcd(self, other) {
                return g;
            }
        }
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn eval(&self, z: &Gaussian) -> Gaussian {
        let mut acc = Gaussian::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * z) + c;
        }
        acc
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c.to_complex();
        }
        acc
    }

    pub fn complex_coeffs(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(Gaussian::to_complex).collect()
    }

    pub fn derivative(&self) -> Poly {
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &Gaussian::from_int(k as i64))
                .collect(),
        )
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Order of vanishing at `a` (exact); `u32::MAX` for the zero polynomial.
    pub fn order_at(&self, a: &Gaussian) -> u32 {
        if self.is_zero() {
            return u32::MAX;
        }
        let lin = Poly::linear_root(a);
        let mut p = self.clone();
        let mut k = 0;
        while let Some(q) = p.exact_div(&lin) {
            p = q;
            k += 1;
        }
        k
    }

    /// Squarefree factorization (Yun): `self = c · Π_k f_k^k` with each `f_k`
    /// monic, squarefree and pairwise coprime. Returns `(k, f_k)` for nonconstant `f_k`.
    pub fn squarefree_decomposition(&self) -> Vec<(u32, Poly)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let a = f.gcd(&fp);
        let mut b = f.exact_div(&a).unwrap();
        let mut c = fp.exact_div(&a).unwrap();
        let mut d = &c - &b.derivative();
        let mut k = 1;
        loop {
            let g = b.gcd(&d);
            if g.degree().unwrap_or(0) > 0 {
                out.push((k, g.clone()));
            }
            b = b.exact_div(&g).unwrap();
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.exact_div(&g).unwrap();
            d = &c - &b.derivative();
            k += 1;
        }
        out
    }

    /// Squarefree part, monic.
    pub fn squarefree_part(&self) -> Poly {
        if self.degree().unwrap_or(0) == 0 {
            return Poly::one();
        }
        let g = self.gcd(&self.derivative());
        self.exact_div(&g).unwrap().monic()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let var = match k {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{k}"),
            };
            let cs = c.to_string();
            let negative_real = c.is_real() && cs.starts_with('-');
            let body = if k == 0 {
                if negative_real {
                    cs[1..].to_string()
                } else {
                    cs.clone()
                }
            } else if c.is_one() || (negative_real && cs == "-1") {
                var.clone()
            } else if c.is_real() {
                let mag = if negative_real { &cs[1..] } else { &cs[..] };
                format!("{mag}*{var}")
            } else {
                format!("({cs})*{var}")
            };
            let sep = match (first, negative_real) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            write!(f, "{sep}{body}")?;
            first = false;
        }
        Ok(())
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::from_coeffs((0..n).map(|k| &self.coeff(k) + &o.coeff(k)).collect())
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::from_coeffs((0..n).map(|k| &self.coeff(k) - &o.coeff(k)).collect())
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Gaussian::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Poly::from_coeffs(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_and_gcd() {
        // (z-1)(z+2) and (z-1)(z-3)
        let a = &Poly::from_int_coeffs(&[-1, 1]) * &Poly::from_int_coeffs(&[2, 1]);
        let b = &Poly::from_int_coeffs(&[-1, 1]) * &Poly::from_int_coeffs(&[-3, 1]);
        assert_eq!(a.gcd(&b), Poly::from_int_coeffs(&[-1, 1]));
        let (q, r) = a.div_rem(&Poly::from_int_coeffs(&[2, 1]));
        assert!(r.is_zero());
        assert_eq!(q, Poly::from_int_coeffs(&[-1, 1]));
    }

    #[test]
    fn squarefree() {
        // z^3 (z-1)^2 (z+i)
        let z = Poly::z();
        let zm1 = Poly::from_int_coeffs(&[-1, 1]);
        let zi = Poly::linear_root(&-Gaussian::i());
        let p = &(&z.pow(3) * &zm1.pow(2)) * &zi;
        let dec = p.squarefree_decomposition();
        assert_eq!(dec.len(), 3);
        assert_eq!(dec[0], (1, zi.clone()));
        assert_eq!(dec[1], (2, zm1.clone()));
        assert_eq!(dec[2], (3, z.clone()));
        assert_eq!(p.order_at(&Gaussian::zero()), 3);
        assert_eq!(p.order_at(&Gaussian::one()), 2);
        assert_eq!(p.squarefree_part().degree(), Some(3));
    }

    #[test]
    fn display() {
        let p = Poly::from_coeffs(vec![
            Gaussian::from_int(-3),
            Gaussian::from_int(1),
            Gaussian::from_ints(0, 2),
        ]);
        assert_eq!(p.to_string(), "(2i)*z^2 + z - 3");
        assert_eq!(Poly::from_int_coeffs(&[0, -1]).to_string(), "-z");
    }
}
