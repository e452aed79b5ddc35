//! Sparse homogeneous polynomials in `x_0, …, x_n` with [`Scalar`] coefficients.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::gaussian::Gaussian;
use super::monomial::{enumerate_monomials, ExponentTuple};
use super::scalar::Scalar;
use super::AlgebraError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HomPoly {
    nvars: usize,
    degree: u32,
    terms: BTreeMap<ExponentTuple, Scalar>,
}

impl HomPoly {
    pub fn zero(nvars: usize, degree: u32) -> Self {
        HomPoly {
            nvars,
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// The coordinate form `x_k`.
    pub fn var(nvars: usize, k: usize) -> Self {
        Self::monomial(ExponentTuple::pure_power(nvars, k, 1), Scalar::one())
    }

    pub fn monomial(exp: ExponentTuple, coef: Scalar) -> Self {
        let mut p = Self::zero(exp.nvars(), exp.degree());
        if !coef.is_zero() {
            p.terms.insert(exp, coef);
        }
        p
    }

    /// Builds a polynomial from terms, summing repeated exponents.
    pub fn from_terms(
        nvars: usize,
        degree: u32,
        terms: impl IntoIterator<Item = (ExponentTuple, Scalar)>,
    ) -> Result<Self, AlgebraError> {
        let mut p = Self::zero(nvars, degree);
        for (e, c) in terms {
            if e.nvars() != nvars {
                return Err(AlgebraError::VariableCount {
                    expected: nvars,
                    found: e.nvars(),
                });
            }
            if e.degree() != degree {
                return Err(AlgebraError::DegreeMismatch {
                    left: degree,
                    right: e.degree(),
                });
            }
            p.accumulate(e, c);
        }
        Ok(p)
    }

    /// Convenience constructor from `(exponents, integer coefficient)` pairs.
    pub fn from_int_terms(nvars: usize, degree: u32, terms: &[(&[u32], i64)]) -> Self {
        Self::from_terms(
            nvars,
            degree,
            terms
                .iter()
                .map(|(e, c)| (ExponentTuple(e.to_vec()), Scalar::from_int(*c))),
        )
        .expect("malformed integer terms")
    }

    fn accumulate(&mut self, e: ExponentTuple, c: Scalar) {
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

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Index `n` of the ambient projective space `ℂP^n`.
    pub fn n(&self) -> usize {
        self.nvars - 1
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentTuple, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &ExponentTuple) -> Scalar {
        self.terms.get(e).cloned().unwrap_or_else(Scalar::zero)
    }

    /// True when no coefficient depends on the parameter.
    pub fn is_fixed(&self) -> bool {
        self.terms.values().all(Scalar::is_constant)
    }

    /// Coefficient vector against `basis` (typically `enumerate_monomials`).
    pub fn coefficient_vector(&self, basis: &[ExponentTuple]) -> Vec<Scalar> {
        basis.iter().map(|e| self.coeff(e)).collect()
    }

    pub fn from_coefficient_vector(basis: &[ExponentTuple], v: &[Scalar]) -> Self {
        let nvars = basis.first().map_or(1, ExponentTuple::nvars);
        let degree = basis.first().map_or(0, ExponentTuple::degree);
        let mut p = Self::zero(nvars, degree);
        for (e, c) in basis.iter().zip(v) {
            p.accumulate(e.clone(), c.clone());
        }
        p
    }

    fn check_compatible(&self, o: &HomPoly) -> Result<(), AlgebraError> {
        if self.nvars != o.nvars {
            return Err(AlgebraError::VariableCount {
                expected: self.nvars,
                found: o.nvars,
            });
        }
        if self.degree != o.degree {
            return Err(AlgebraError::DegreeMismatch {
                left: self.degree,
                right: o.degree,
            });
        }
        Ok(())
    }

    pub fn add(&self, o: &HomPoly) -> Result<HomPoly, AlgebraError> {
        self.check_compatible(o)?;
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.accumulate(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, o: &HomPoly) -> Result<HomPoly, AlgebraError> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> HomPoly {
        HomPoly {
            nvars: self.nvars,
            degree: self.degree,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    /// Product; panics when the variable counts differ.
    pub fn mul(&self, o: &HomPoly) -> HomPoly {
        assert_eq!(self.nvars, o.nvars, "variable count mismatch in product");
        let mut out = HomPoly::zero(self.nvars, self.degree + o.degree);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                out.accumulate(ea.add(eb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> HomPoly {
        let mut out = HomPoly::zero(self.nvars, self.degree);
        for (e, v) in &self.terms {
            out.accumulate(e.clone(), v * c);
        }
        out
    }

    /// Multiplies by the monomial `x^e`.
    pub fn shift(&self, e: &ExponentTuple) -> HomPoly {
        HomPoly {
            nvars: self.nvars,
            degree: self.degree + e.degree(),
            terms: self.terms.iter().map(|(k, c)| (k.add(e), c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> HomPoly {
        let mut acc = HomPoly::monomial(ExponentTuple::zero(self.nvars), Scalar::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact value at a point of the coefficient field.
    pub fn eval(&self, x: &[Scalar]) -> Result<Scalar, AlgebraError> {
        if x.len() != self.nvars {
            return Err(AlgebraError::VariableCount {
                expected: self.nvars,
                found: x.len(),
            });
        }
        let mut acc = Scalar::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e.as_slice()) {
                if k > 0 {
                    t = &t * &xi.pow(k as i32);
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Evaluates every coefficient at the parameter value `z0`.
    pub fn specialize(&self, z0: &Gaussian) -> Result<HomPoly, AlgebraError> {
        let mut out = HomPoly::zero(self.nvars, self.degree);
        for (e, c) in &self.terms {
            match c.eval_at(z0) {
                Some(v) => out.accumulate(e.clone(), Scalar::from_gaussian(v)),
                None => {
                    return Err(AlgebraError::Pole {
                        at: z0.to_string(),
                        exponent: e.clone(),
                        coefficient: c.to_string(),
                    })
                }
            }
        }
        Ok(out)
    }

    /// Coefficient-wise d/dz.
    pub fn derive_parameter(&self) -> HomPoly {
        let mut out = HomPoly::zero(self.nvars, self.degree);
        for (e, c) in &self.terms {
            out.accumulate(e.clone(), c.derive());
        }
        out
    }

    /// ∂/∂x_k, of degree `d-1` (degree-0 input gives the zero form of degree 0).
    pub fn partial(&self, k: usize) -> HomPoly {
        let mut out = HomPoly::zero(self.nvars, self.degree.saturating_sub(1));
        for (e, c) in &self.terms {
            let p = e.0[k];
            if p == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2.0[k] -= 1;
            out.accumulate(e2, c * &Scalar::from_int(p as i64));
        }
        out
    }

    /// First nonzero coefficient in descending lexicographic monomial order.
    pub fn leading_coefficient(&self) -> Option<&Scalar> {
        self.terms.values().next_back()
    }

    /// Divides by the leading coefficient.
    pub fn normalized(&self) -> HomPoly {
        match self.leading_coefficient() {
            Some(c) => self.scale(&c.inv().unwrap()),
            None => self.clone(),
        }
    }

    /// All monomials of this polynomial's degree, lexicographically descending.
    pub fn monomial_basis(&self) -> Vec<ExponentTuple> {
        enumerate_monomials(self.n(), self.degree)
    }

    pub fn to_literal(&self) -> PolyLiteral {
        PolyLiteral {
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .rev()
                .map(|(e, c)| TermLiteral {
                    exp: e.0.clone(),
                    coef: c.to_string(),
                })
                .collect(),
        }
    }

    pub fn from_literal(lit: &PolyLiteral) -> Result<HomPoly, AlgebraError> {
        let nvars = match lit.terms.first() {
            Some(t) => t.exp.len(),
            None => return Err(AlgebraError::EmptyLiteral),
        };
        let mut terms = Vec::with_capacity(lit.terms.len());
        for t in &lit.terms {
            let c: Scalar = t.coef.parse().map_err(|e| AlgebraError::Coefficient {
                text: t.coef.clone(),
                source: e,
            })?;
            terms.push((ExponentTuple(t.exp.clone()), c));
        }
        HomPoly::from_terms(nvars, lit.degree, terms)
    }
}

impl fmt::Display for HomPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let mono: Vec<String> = e
                .0
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(k, &p)| if p == 1 { format!("x{k}") } else { format!("x{k}^{p}") })
                .collect();
            let cs = c.to_string();
            let (neg, mag) = match c {
                Scalar::Rational(_) if cs.starts_with('-') => (true, cs[1..].to_string()),
                Scalar::Rational(_) => (false, cs),
                _ => (false, format!("({cs})")),
            };
            let sep = match (first, neg) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            let body = if mono.is_empty() {
                mag
            } else if mag == "1" {
                mono.join("*")
            } else {
                format!("{mag}*{}", mono.join("*"))
            };
            write!(f, "{sep}{body}")?;
            first = false;
        }
        Ok(())
    }
}

/// JSON literal `{"degree": d, "terms": [{"exp": [...], "coef": "..."}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyLiteral {
    pub degree: u32,
    pub terms: Vec<TermLiteral>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermLiteral {
    pub exp: Vec<u32>,
    pub coef: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(k: usize) -> HomPoly {
        HomPoly::var(2, k)
    }

    #[test]
    fn additive_inverse_keeps_degree() {
        let sq = x(0).mul(&x(0));
        let z = sq.add(&sq.neg()).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.degree(), 2);
    }

    #[test]
    fn difference_of_squares() {
        let p = x(0).add(&x(1)).unwrap();
        let q = x(0).sub(&x(1)).unwrap();
        let expected = HomPoly::from_int_terms(2, 2, &[(&[2, 0], 1), (&[0, 2], -1)]);
        assert_eq!(p.mul(&q), expected);
    }

    #[test]
    fn scalar_action_and_degree_mismatch() {
        let c: Scalar = "z/(z+1)".parse().unwrap();
        let p = x(0).mul(&x(1)).scale(&c);
        assert_eq!(p.coeff(&ExponentTuple(vec![1, 1])), c);
        assert!(matches!(
            x(0).add(&p),
            Err(AlgebraError::DegreeMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn evaluation() {
        let p = HomPoly::from_int_terms(2, 2, &[(&[2, 0], 1), (&[0, 2], 1)]);
        assert!(p.eval(&[Scalar::one(), Scalar::i()]).unwrap().is_zero());
        let q = x(0).mul(&x(1));
        assert_eq!(q.eval(&[3.into(), 5.into()]).unwrap(), Scalar::from_int(15));
    }

    #[test]
    fn specialization_and_poles() {
        let p = HomPoly::monomial(ExponentTuple(vec![2, 0]), Scalar::z());
        let s = p.specialize(&Gaussian::from_int(3)).unwrap();
        assert_eq!(s, HomPoly::from_int_terms(2, 2, &[(&[2, 0], 3)]));
        let c: Scalar = "1/(z-1)".parse().unwrap();
        let q = HomPoly::monomial(ExponentTuple(vec![1, 1]), c);
        match q.specialize(&Gaussian::one()) {
            Err(AlgebraError::Pole { exponent, .. }) => assert_eq!(exponent.0, vec![1, 1]),
            other => panic!("expected pole, got {other:?}"),
        }
    }

    #[test]
    fn literal_round_trip() {
        let c: Scalar = "(z^2+1)/(z-3i)".parse().unwrap();
        let p = HomPoly::from_terms(
            3,
            2,
            [
                (ExponentTuple(vec![2, 0, 0]), c),
                (ExponentTuple(vec![0, 1, 1]), Scalar::from_ratio(-1, 2)),
            ],
        )
        .unwrap();
        let lit = p.to_literal();
        let json = serde_json::to_string(&lit).unwrap();
        let back: PolyLiteral = serde_json::from_str(&json).unwrap();
        assert_eq!(HomPoly::from_literal(&back).unwrap(), p);
    }
}
