//! Wronskians, admissible derivative sets and the divisor estimate for
//! `f_0⋯f_n / W`.

use num_complex::Complex64;
use serde::Serialize;

use super::exppoly::MeroFn;
use super::zeros::{poly_roots, ser_complex};
use super::NevanlinnaError;
use crate::algebra::{enumerate_monomials, Gaussian, MPoly, MRat, Poly};

/// Minimal ring interface for cofactor expansion.
pub trait Entry: Clone {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn is_zero(&self) -> bool;
}

impl Entry for MRat {
    fn add(&self, o: &Self) -> Self {
        MRat::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        MRat::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        MRat::mul(self, o)
    }
    fn is_zero(&self) -> bool {
        MRat::is_zero(self)
    }
}

impl Entry for MeroFn {
    fn add(&self, o: &Self) -> Self {
        MeroFn::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        MeroFn::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        MeroFn::mul(self, o)
    }
    fn is_zero(&self) -> bool {
        MeroFn::is_zero(self)
    }
}

/// Determinant by expansion along the first column.
pub fn determinant<T: Entry>(m: &[Vec<T>]) -> T {
    let n = m.len();
    assert!(n > 0 && m.iter().all(|r| r.len() == n), "square matrix expected");
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc: Option<T> = None;
    for i in 0..n {
        if m[i][0].is_zero() {
            continue;
        }
        let minor: Vec<Vec<T>> = m
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, row)| row[1..].to_vec())
            .collect();
        let term = m[i][0].mul(&determinant(&minor));
        acc = Some(match acc {
            None if i % 2 == 0 => term,
            None => m[i][0].sub(&m[i][0]).sub(&term),
            Some(a) if i % 2 == 0 => a.add(&term),
            Some(a) => a.sub(&term),
        });
    }
    acc.unwrap_or_else(|| m[0][0].sub(&m[0][0]))
}

/// `det(F^{(k_i)}_j)` for one-variable functions and derivative orders `k_i`.
pub fn wronskian_with(fs: &[MeroFn], orders: &[u32]) -> MeroFn {
    assert_eq!(fs.len(), orders.len());
    let rows: Vec<Vec<MeroFn>> = orders
        .iter()
        .map(|&k| fs.iter().map(|f| f.nth_derivative(k)).collect())
        .collect();
    determinant(&rows)
}

/// Classical Wronskian with orders `0, 1, …, n`.
pub fn wronskian(fs: &[MeroFn]) -> MeroFn {
    let orders: Vec<u32> = (0..fs.len() as u32).collect();
    wronskian_with(fs, &orders)
}

/// Wronskian with orders `0..n`, flagged when it vanishes identically.
pub fn checked_wronskian(fs: &[MeroFn]) -> Result<MeroFn, NevanlinnaError> {
    let w = wronskian(fs);
    if w.is_zero() {
        return Err(NevanlinnaError::DependentInputs);
    }
    Ok(w)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdmissibleSet {
    /// `α^0, …, α^n`.
    pub alpha: Vec<Vec<u32>>,
    /// `Σ |α^i|`.
    pub weight: u32,
    /// Smallest `p` with `ℓ_F(p) = n+1`.
    pub p0: u32,
    /// `ℓ_F(p)` for `p = 0, …, p0`.
    pub ell: Vec<usize>,
}

/// Greedy rank extension over the function field: multi-indices by
/// increasing `|α|`, lexicographically descending within a level.
pub fn admissible_derivative_set(fs: &[MRat]) -> Result<AdmissibleSet, NevanlinnaError> {
    let n1 = fs.len();
    if n1 == 0 {
        return Err(NevanlinnaError::DependentInputs);
    }
    let m = fs[0].nparams().max(1);
    let mut basis: Vec<(usize, Vec<MRat>)> = Vec::new();
    let mut alpha = Vec::new();
    let mut ell = Vec::new();
    let mut p0 = None;
    for level in 0..n1 as u32 {
        for a in enumerate_monomials(m - 1, level) {
            let a = a.0;
            let mut v: Vec<MRat> = fs.iter().map(|f| f.derivative(&a)).collect();
            for (piv, row) in &basis {
                if v[*piv].is_zero() {
                    continue;
                }
                let factor = v[*piv].div(&row[*piv]);
                for (x, y) in v.iter_mut().zip(row) {
                    *x = x.sub(&factor.mul(y));
                }
            }
            if let Some(piv) = v.iter().position(|x| !x.is_zero()) {
                basis.push((piv, v));
                alpha.push(a);
            }
        }
        ell.push(basis.len());
        if basis.len() == n1 {
            p0 = Some(level);
            break;
        }
    }
    let Some(p0) = p0 else {
        return Err(NevanlinnaError::DependentInputs);
    };
    let rows: Vec<Vec<MRat>> = alpha
        .iter()
        .map(|a| fs.iter().map(|f| f.derivative(a)).collect())
        .collect();
    if determinant(&rows).is_zero() {
        return Err(NevanlinnaError::DependentInputs);
    }
    let weight = alpha.iter().map(|a| a.iter().sum::<u32>()).sum();
    Ok(AdmissibleSet {
        alpha,
        weight,
        p0,
        ell,
    })
}

/// `W^α` over rational functions of several variables.
pub fn wronskian_mrat(fs: &[MRat], alpha: &[Vec<u32>]) -> MRat {
    let rows: Vec<Vec<MRat>> = alpha
        .iter()
        .map(|a| fs.iter().map(|f| f.derivative(a)).collect())
        .collect();
    determinant(&rows)
}

/// One-variable polynomial as a rational function of one parameter.
pub fn poly_to_mrat(p: &Poly) -> MRat {
    let z = MPoly::var(1, 0);
    let mut acc = MPoly::zero(1);
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(&z).add(&MPoly::constant(1, c.clone()));
    }
    MRat::from_poly(acc)
}

/// Refines polynomials into pairwise coprime squarefree monic factors such
/// that each input has constant order along every factor's roots.
pub fn coprime_basis(polys: &[Poly]) -> Vec<Poly> {
    let mut items: Vec<Poly> = Vec::new();
    for p in polys {
        for (_, f) in p.squarefree_decomposition() {
            items.push(f.monic());
        }
    }
    loop {
        let mut changed = false;
        'outer: for i in 0..items.len() {
            for j in (i + 1)..items.len() {
                let g = items[i].gcd(&items[j]);
                if g.degree().unwrap_or(0) == 0 {
                    continue;
                }
                let a = items[i].exact_div(&g).unwrap();
                let b = items[j].exact_div(&g).unwrap();
                items.remove(j);
                items.remove(i);
                for x in [a, b, g] {
                    if x.degree().unwrap_or(0) > 0 {
                        items.push(x.monic());
                    }
                }
                changed = true;
                break 'outer;
            }
        }
        if !changed {
            break;
        }
    }
    items.sort_by_key(|p| (p.degree(), p.to_string()));
    items.dedup();
    items
}

/// Exponent of the squarefree `b` in `p`.
fn order_along(p: &Poly, b: &Poly) -> u32 {
    let mut q = p.clone();
    let mut k = 0;
    while let Some(r) = q.exact_div(b) {
        q = r;
        k += 1;
    }
    k
}

#[derive(Clone, Debug, Serialize)]
pub struct DivisorBoundEntry {
    pub factor: String,
    #[serde(serialize_with = "ser_points")]
    pub roots_in_disk: Vec<Complex64>,
    /// `ν_{f_i}` along the factor.
    pub orders: Vec<u32>,
    pub wronskian_order: u32,
    /// `ν` of `f_0⋯f_n / W` (its zero part).
    pub quotient_order: u32,
    /// `Σ min(ν_{f_i}, p_0)`.
    pub bound: u32,
    pub ok: bool,
}

fn ser_points<S: serde::Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    struct P(Complex64);
    impl Serialize for P {
        fn serialize<S2: serde::Serializer>(&self, s: S2) -> Result<S2::Ok, S2::Error> {
            ser_complex(&self.0, s)
        }
    }
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&P(*z))?;
    }
    seq.end()
}

#[derive(Clone, Debug, Serialize)]
pub struct DivisorBoundReport {
    pub admissible: AdmissibleSet,
    pub wronskian: String,
    pub entries: Vec<DivisorBoundEntry>,
    pub zeros_in_disk: usize,
    pub violations: usize,
}

/// Exact check of `ν_{f_0⋯f_n/W} ≤ Σ min(ν_{f_i}, p_0)` for a polynomial
/// curve. Orders are computed along a coprime factor basis, so every zero
/// of the product is covered; `r` only selects which roots are listed.
pub fn divisor_bound_check(components: &[Poly], r: f64) -> Result<DivisorBoundReport, NevanlinnaError> {
    if components.iter().any(Poly::is_zero) {
        return Err(NevanlinnaError::DependentInputs);
    }
    let mrats: Vec<MRat> = components.iter().map(poly_to_mrat).collect();
    let adm = admissible_derivative_set(&mrats)?;
    let orders: Vec<u32> = adm.alpha.iter().map(|a| a[0]).collect();
    let fs: Vec<MeroFn> = components
        .iter()
        .map(|p| MeroFn::from_exppoly(super::exppoly::ExpPoly::from_poly(p.clone())))
        .collect();
    let w = wronskian_with(&fs, &orders)
        .as_ratfunc()
        .and_then(|f| f.denom().is_one().then(|| f.numer().clone()))
        .ok_or(NevanlinnaError::NotPolynomial)?;
    if w.is_zero() {
        return Err(NevanlinnaError::DependentInputs);
    }
    let mut all = components.to_vec();
    all.push(w.clone());
    let basis = coprime_basis(&all);
    let mut entries = Vec::new();
    let mut violations = 0;
    let mut in_disk = 0;
    for b in basis {
        let ords: Vec<u32> = components.iter().map(|p| order_along(p, &b)).collect();
        let prod: u32 = ords.iter().sum();
        if prod == 0 {
            continue;
        }
        let wo = order_along(&w, &b);
        let quotient_order = prod.saturating_sub(wo);
        let bound = ords.iter().map(|&e| e.min(adm.p0)).sum();
        let ok = quotient_order <= bound;
        if !ok {
            violations += 1;
        }
        let roots: Vec<Complex64> = poly_roots(&b)
            .into_iter()
            .map(|p| p.at)
            .filter(|a| a.norm() <= r)
            .collect();
        in_disk += roots.len();
        entries.push(DivisorBoundEntry {
            factor: b.to_string(),
            roots_in_disk: roots,
            orders: ords,
            wronskian_order: wo,
            quotient_order,
            bound,
            ok,
        });
    }
    Ok(DivisorBoundReport {
        admissible: adm,
        wronskian: w.to_string(),
        entries,
        zeros_in_disk: in_disk,
        violations,
    })
}

/// `Gaussian` helper for tests and callers building MRat constants.
pub fn mrat_constant(m: usize, c: i64) -> MRat {
    MRat::constant(m, Gaussian::from_int(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nevanlinna::exppoly::ExpPoly;

    fn ep(c: &[i64]) -> MeroFn {
        MeroFn::from_exppoly(ExpPoly::from_poly(Poly::from_int_coeffs(c)))
    }

    #[test]
    fn small_wronskians() {
        assert_eq!(wronskian(&[ep(&[1]), ep(&[0, 1])]), ep(&[1]));
        assert_eq!(wronskian(&[ep(&[0, 1]), ep(&[0, 0, 1])]), ep(&[0, 0, 1]));
        let h = ep(&[0, 1]);
        let w = wronskian(&[h.clone(), h.mul(&ep(&[0, 1]))]);
        assert_eq!(w, ep(&[0, 0, 1]));
        assert!(checked_wronskian(&[ep(&[1, 1]), ep(&[2, 2])]).is_err());
    }

    #[test]
    fn exponential_scaling_law() {
        let f = [
            MeroFn::from_exppoly(ExpPoly::one()),
            MeroFn::from_exppoly(ExpPoly::exp(Gaussian::from_int(1))),
            MeroFn::from_exppoly(ExpPoly::exp(Gaussian::from_ints(0, 2)).add(&ExpPoly::z())),
        ];
        let h = MeroFn::from_exppoly(ExpPoly::term(Poly::from_int_coeffs(&[1, 1]), Gaussian::from_int(-1)));
        let hf: Vec<MeroFn> = f.iter().map(|x| h.mul(x)).collect();
        assert_eq!(wronskian(&hf), h.pow(3).mul(&wronskian(&f)));
    }

    #[test]
    fn derivative_sets() {
        let one_var = [mrat_constant(1, 1), MRat::var(1, 0), MRat::var(1, 0).pow(2)];
        let s = admissible_derivative_set(&one_var).unwrap();
        assert_eq!(s.alpha, vec![vec![0], vec![1], vec![2]]);
        assert_eq!(s.p0, 2);
        let two_var = [mrat_constant(2, 1), MRat::var(2, 0), MRat::var(2, 1)];
        let s = admissible_derivative_set(&two_var).unwrap();
        assert_eq!(s.alpha, vec![vec![0, 0], vec![1, 0], vec![0, 1]]);
        assert_eq!((s.p0, s.weight), (1, 2));
        let dep = [MRat::var(1, 0), MRat::var(1, 0).mul(&mrat_constant(1, 3))];
        assert!(admissible_derivative_set(&dep).is_err());
    }

    #[test]
    fn divisor_bound_examples() {
        let curve = [Poly::one(), Poly::z(), Poly::from_int_coeffs(&[0, 0, 1])];
        let rep = divisor_bound_check(&curve, 5.0).unwrap();
        assert_eq!(rep.violations, 0);
        let e = &rep.entries[0];
        assert_eq!((e.orders.clone(), e.wronskian_order, e.quotient_order, e.bound), (vec![0, 1, 2], 0, 3, 3));
        let shifted = [Poly::one(), Poly::from_int_coeffs(&[1, 1]), Poly::from_int_coeffs(&[2, 0, 1])];
        assert_eq!(divisor_bound_check(&shifted, 5.0).unwrap().violations, 0);
    }

    #[test]
    fn coprime_refinement() {
        // (z−1)²(z+1) and (z−1)(z−2)
        let a = &Poly::from_int_coeffs(&[1, -2, 1]) * &Poly::from_int_coeffs(&[1, 1]);
        let b = &Poly::from_int_coeffs(&[-1, 1]) * &Poly::from_int_coeffs(&[-2, 1]);
        let basis = coprime_basis(&[a, b]);
        assert_eq!(basis.len(), 3);
        for i in 0..3 {
            for j in i + 1..3 {
                assert_eq!(basis[i].gcd(&basis[j]).degree(), Some(0));
            }
        }
    }
}
