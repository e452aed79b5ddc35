//! Sparse polynomials and (unreduced) rational functions in several
//! parameters `z_1, …, z_m`. Only used for derivative-set computations where
//! the inputs are tiny, so fractions are not reduced by a multivariate gcd;
//! equality and zero tests go through cross-multiplication.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::gaussian::Gaussian;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MPoly {
    nparams: usize,
    terms: BTreeMap<Vec<u32>, Gaussian>,
}

impl MPoly {
    pub fn zero(nparams: usize) -> Self {
        MPoly {
            nparams,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nparams: usize, c: Gaussian) -> Self {
        let mut p = Self::zero(nparams);
        if !c.is_zero() {
            p.terms.insert(vec![0; nparams], c);
        }
        p
    }

    pub fn var(nparams: usize, k: usize) -> Self {
        let mut e = vec![0; nparams];
        e[k] = 1;
        let mut p = Self::zero(nparams);
        p.terms.insert(e, Gaussian::one());
        p
    }

    pub fn nparams(&self) -> usize {
        self.nparams
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Gaussian> {
        match self.terms.len() {
            0 => Some(Gaussian::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    fn accumulate(&mut self, e: Vec<u32>, c: Gaussian) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, o: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.accumulate(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> MPoly {
        MPoly {
            nparams: self.nparams,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, o: &MPoly) -> MPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &MPoly) -> MPoly {
        let mut out = MPoly::zero(self.nparams);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.accumulate(e, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Gaussian) -> MPoly {
        let mut out = MPoly::zero(self.nparams);
        for (e, v) in &self.terms {
            out.accumulate(e.clone(), v * c);
        }
        out
    }

    pub fn partial(&self, k: usize) -> MPoly {
        let mut out = MPoly::zero(self.nparams);
        for (e, c) in &self.terms {
            if e[k] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[k] -= 1;
            out.accumulate(e2, c * &Gaussian::from_int(e[k] as i64));
        }
        out
    }

    pub fn eval_complex(&self, z: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(z)
                    .fold(c.to_complex(), |acc, (&k, &zi)| acc * zi.powu(k))
            })
            .sum()
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(e, c)| {
                let mut vars: Vec<String> = Vec::new();
                for (k, &p) in e.iter().enumerate() {
                    let name = if self.nparams == 1 {
                        "z".to_string()
                    } else {
                        format!("z{}", k + 1)
                    };
                    match p {
                        0 => {}
                        1 => vars.push(name),
                        _ => vars.push(format!("{name}^{p}")),
                    }
                }
                if vars.is_empty() {
                    format!("({c})")
                } else if c.is_one() {
                    vars.join("*")
                } else {
                    format!("({c})*{}", vars.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `num / den` without gcd reduction.
#[derive(Clone, Debug)]
pub struct MRat {
    num: MPoly,
    den: MPoly,
}

impl MRat {
    fn normalized(num: MPoly, den: MPoly) -> MRat {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            let m = num.nparams();
            return MRat {
                num,
                den: MPoly::constant(m, Gaussian::one()),
            };
        }
        if let Some(c) = den.as_constant() {
            let inv = c.inv().unwrap();
            let m = den.nparams();
            return MRat {
                num: num.scale(&inv),
                den: MPoly::constant(m, Gaussian::one()),
            };
        }
        if num == den {
            let m = num.nparams();
            return MRat::constant(m, Gaussian::one());
        }
        MRat { num, den }
    }

    pub fn from_poly(p: MPoly) -> MRat {
        let m = p.nparams();
        MRat {
            num: p,
            den: MPoly::constant(m, Gaussian::one()),
        }
    }

    pub fn constant(m: usize, c: Gaussian) -> MRat {
        Self::from_poly(MPoly::constant(m, c))
    }

    pub fn var(m: usize, k: usize) -> MRat {
        Self::from_poly(MPoly::var(m, k))
    }

    pub fn nparams(&self) -> usize {
        self.num.nparams()
    }

    pub fn numer(&self) -> &MPoly {
        &self.num
    }

    pub fn denom(&self) -> &MPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &MRat) -> MRat {
        if self.den == o.den {
            return Self::normalized(self.num.add(&o.num), self.den.clone());
        }
        Self::normalized(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn neg(&self) -> MRat {
        MRat {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &MRat) -> MRat {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &MRat) -> MRat {
        Self::normalized(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    /// Panics when `o` is zero.
    pub fn div(&self, o: &MRat) -> MRat {
        assert!(!o.is_zero(), "division by zero rational function");
        Self::normalized(self.num.mul(&o.den), self.den.mul(&o.num))
    }

    pub fn pow(&self, e: u32) -> MRat {
        let mut acc = MRat::constant(self.nparams(), Gaussian::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// ∂/∂z_k by the quotient rule.
    pub fn partial(&self, k: usize) -> MRat {
        let n = self
            .num
            .partial(k)
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.partial(k)));
        Self::normalized(n, self.den.mul(&self.den))
    }

    /// `D^α` for a multi-index `α`.
    pub fn derivative(&self, alpha: &[u32]) -> MRat {
        let mut out = self.clone();
        for (k, &times) in alpha.iter().enumerate() {
            for _ in 0..times {
                out = out.partial(k);
            }
        }
        out
    }

    pub fn eval_complex(&self, z: &[Complex64]) -> Complex64 {
        self.num.eval_complex(z) / self.den.eval_complex(z)
    }
}

impl PartialEq for MRat {
    fn eq(&self, o: &MRat) -> bool {
        self.num.mul(&o.den) == o.num.mul(&self.den)
    }
}

impl fmt::Display for MRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.as_constant().is_some_and(|c| c.is_one()) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::algebra::parse::parse_expr;

    #[test]
    fn quotient_rule() {
        let f = parse_expr("z1/(z1+z2)").unwrap().to_mrat(2).unwrap();
        let expected = parse_expr("z2/(z1+z2)^2").unwrap().to_mrat(2).unwrap();
        assert_eq!(f.partial(0), expected);
    }

    #[test]
    fn cross_multiplied_equality() {
        let a = parse_expr("(z1^2 - z2^2)/(z1 - z2)").unwrap().to_mrat(2).unwrap();
        let b = parse_expr("z1 + z2").unwrap().to_mrat(2).unwrap();
        assert_eq!(a, b);
    }
}
