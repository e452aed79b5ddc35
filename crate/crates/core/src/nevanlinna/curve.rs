//! Entire curves `f = (f_0 : ⋯ : f_n)` with exponential-polynomial
//! components, their characteristic function and composition with targets.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::exppoly::{ExpPoly, MeroFn};
use super::quadrature::{circle_mean, tolerance, Quadrature};
use super::zeros::zeros_in_disk;
use super::NevanlinnaError;
use crate::algebra::parse::parse_expr;
use crate::algebra::{Gaussian, HomPoly, Poly};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpTermLiteral {
    pub poly: String,
    pub exp_coef: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentLiteral {
    pub terms: Vec<ExpTermLiteral>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveLiteral {
    pub components: Vec<ComponentLiteral>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntireCurve {
    components: Vec<ExpPoly>,
}

/// How reducedness (no common zero) was established.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reducedness {
    pub reduced: bool,
    pub method: &'static str,
}

fn parse_poly(text: &str) -> Result<Poly, NevanlinnaError> {
    let s = parse_expr(text)?.to_scalar()?;
    let f = s.to_ratfunc();
    if !f.denom().is_one() {
        return Err(NevanlinnaError::NotPolynomial);
    }
    Ok(f.numer().clone())
}

fn parse_constant(text: &str) -> Result<Gaussian, NevanlinnaError> {
    let s = parse_expr(text)?.to_scalar()?;
    s.to_gaussian().ok_or(NevanlinnaError::NotConstant(text.to_string()))
}

impl EntireCurve {
    pub fn new(components: Vec<ExpPoly>) -> Result<Self, NevanlinnaError> {
        if components.len() < 2 {
            return Err(NevanlinnaError::TooFewComponents(components.len()));
        }
        if components.iter().all(ExpPoly::is_zero) {
            return Err(NevanlinnaError::IdenticallyZero);
        }
        Ok(EntireCurve { components })
    }

    pub fn from_polys(polys: &[Poly]) -> Result<Self, NevanlinnaError> {
        Self::new(polys.iter().cloned().map(ExpPoly::from_poly).collect())
    }

    pub fn from_literal(lit: &CurveLiteral) -> Result<Self, NevanlinnaError> {
        let mut comps = Vec::with_capacity(lit.components.len());
        for c in &lit.components {
            let mut raw = Vec::with_capacity(c.terms.len());
            for t in &c.terms {
                raw.push((parse_constant(&t.exp_coef)?, parse_poly(&t.poly)?));
            }
            comps.push(ExpPoly::from_terms(raw));
        }
        Self::new(comps)
    }

    pub fn to_literal(&self) -> CurveLiteral {
        CurveLiteral {
            components: self
                .components
                .iter()
                .map(|c| ComponentLiteral {
                    terms: c
                        .terms()
                        .iter()
                        .map(|(e, p)| ExpTermLiteral {
                            poly: p.to_string(),
                            exp_coef: e.to_string(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.components.len() - 1
    }

    pub fn components(&self) -> &[ExpPoly] {
        &self.components
    }

    pub fn is_polynomial(&self) -> bool {
        self.components.iter().all(ExpPoly::is_polynomial)
    }

    pub fn polys(&self) -> Option<Vec<Poly>> {
        self.components.iter().map(ExpPoly::as_poly).collect()
    }

    /// `log max_i |f_i(z)|`.
    pub fn log_norm(&self, z: Complex64) -> f64 {
        self.components
            .iter()
            .map(|c| c.log_abs(z))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Exact for polynomial curves (gcd of the components); otherwise the
    /// zeros of the first nonzero component in `|z| ≤ probe` are tested
    /// against the others.
    pub fn reducedness(&self, probe: f64) -> Result<Reducedness, NevanlinnaError> {
        if let Some(ps) = self.polys() {
            let g = ps.iter().fold(Poly::zero(), |acc, p| if acc.is_zero() { p.clone() } else { acc.gcd(p) });
            return Ok(Reducedness {
                reduced: g.degree() == Some(0),
                method: "exact gcd",
            });
        }
        let first = self.components.iter().find(|c| !c.is_zero()).unwrap();
        let zeros = zeros_in_disk(first, probe)?;
        let reduced = zeros.points.iter().all(|p| {
            self.components.iter().any(|c| {
                let (w, _) = c.eval_scaled(p.at);
                w.norm() > 1e-8
            })
        });
        Ok(Reducedness {
            reduced,
            method: "sampled at zeros of a component",
        })
    }

    pub fn characteristic_quadrature(&self, r: f64) -> Result<(Quadrature, Quadrature), NevanlinnaError> {
        if !(r >= 1.0) {
            return Err(NevanlinnaError::BadRadius(r));
        }
        let tol = tolerance();
        let outer = circle_mean(|z| self.log_norm(z), r, tol);
        let inner = circle_mean(|z| self.log_norm(z), 1.0, tol);
        for q in [&outer, &inner] {
            if !q.converged {
                return Err(NevanlinnaError::Quadrature { achieved: q.error });
            }
        }
        Ok((outer, inner))
    }

    /// `T_f(r)` as the circle mean of `log‖f‖` at `r` minus the same at `1`.
    pub fn characteristic(&self, r: f64) -> Result<f64, NevanlinnaError> {
        let (outer, inner) = self.characteristic_quadrature(r)?;
        Ok(outer.value - inner.value)
    }

    /// `Q(f_0, …, f_n)` for a target with rational-function coefficients.
    pub fn compose(&self, q: &HomPoly) -> Result<MeroFn, NevanlinnaError> {
        if q.n() != self.n() {
            return Err(NevanlinnaError::DimensionMismatch {
                curve: self.n(),
                target: q.n(),
            });
        }
        let mut acc = MeroFn::from_exppoly(ExpPoly::zero());
        for (e, c) in q.terms() {
            let mut mono = ExpPoly::one();
            for (f, &k) in self.components.iter().zip(e.as_slice()) {
                if k > 0 {
                    mono = mono.mul(&f.pow(k));
                }
            }
            let coef = MeroFn::from_ratfunc(&c.to_ratfunc());
            acc = acc.add(&coef.mul(&MeroFn::from_exppoly(mono)));
        }
        Ok(acc)
    }

    /// `Q(f)` after dividing `Q` by its leading coefficient.
    pub fn compose_normalized(&self, q: &HomPoly) -> Result<MeroFn, NevanlinnaError> {
        self.compose(&q.normalized())
    }

    /// Coefficients of `q` as a curve, after clearing denominators and common
    /// factors; `None` for fixed targets.
    pub fn coefficient_curve(q: &HomPoly) -> Option<EntireCurve> {
        if q.is_fixed() {
            return None;
        }
        let fs: Vec<_> = q.normalized().terms().map(|(_, c)| c.to_ratfunc()).collect();
        let mut den = Poly::one();
        for f in &fs {
            let g = den.gcd(f.denom());
            den = (&den * f.denom()).exact_div(&g).unwrap();
        }
        let mut nums: Vec<Poly> = fs
            .iter()
            .map(|f| f.numer() * &den.exact_div(f.denom()).unwrap())
            .collect();
        let g = nums.iter().fold(Poly::zero(), |acc, p| if acc.is_zero() { p.clone() } else { acc.gcd(p) });
        if g.degree().unwrap_or(0) > 0 {
            nums = nums.iter().map(|p| p.exact_div(&g).unwrap()).collect();
        }
        if nums.len() < 2 {
            nums.push(Poly::zero());
        }
        EntireCurve::from_polys(&nums).ok()
    }
}
