//! Resultants of homogeneous forms, admissibility of hypersurface families
//! and power certificates `x_i^s·R = Σ b_ij Q_j`.

use std::collections::HashMap;

use num_integer::Integer;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::linalg::{determinant, EchelonBasis, MonomialIndex, SparseVec};
use crate::algebra::{enumerate_monomials, AlgebraError, ExponentTuple, Gaussian, HomPoly, Scalar};
use crate::random;

/// Attempts with a fresh coordinate change before giving up on a 0/0 quotient.
pub const MACAULAY_RETRIES: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResultantError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("expected {expected} forms, found {found}")]
    FormCount { expected: usize, found: usize },
    #[error("forms must share one degree; found {0:?}")]
    UnequalDegrees(Vec<u32>),
    #[error("forms must have positive degree")]
    ZeroDegree,
    #[error("Sylvester resultant needs binary forms (n = 1), got {0} variables")]
    NotBinary(usize),
    #[error("Macaulay quotient stayed 0/0 after {0} random coordinate changes and the perturbation fallback")]
    Degenerate(usize),
    #[error("family has {q} forms but admissibility needs at least n+1 = {needed}")]
    TooFewForms { q: usize, needed: usize },
    #[error("the zero polynomial cannot be a family member (index {0})")]
    ZeroForm(usize),
    #[error("subset {subset:?} is invalid for a family of {q} forms")]
    BadSubset { subset: Vec<usize>, q: usize },
    #[error("resultant vanishes identically; no certificate exists")]
    VanishingResultant,
    #[error("no certificate for x_{index}^s with s <= {bound}: the forms have a common zero")]
    NoCertificate { index: usize, bound: u32 },
    #[error("no witness point found among {0} candidates")]
    NoWitness(usize),
    #[error("coordinate index {index} out of range for {nvars} variables")]
    BadIndex { index: usize, nvars: usize },
}

/// `q` homogeneous forms in `n+1` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct HypersurfaceFamily {
    n: usize,
    forms: Vec<HomPoly>,
}

impl HypersurfaceFamily {
    pub fn new(n: usize, forms: Vec<HomPoly>) -> Result<Self, ResultantError> {
        for (j, f) in forms.iter().enumerate() {
            if f.nvars() != n + 1 {
                return Err(AlgebraError::VariableCount {
                    expected: n + 1,
                    found: f.nvars(),
                }
                .into());
            }
            if f.is_zero() {
                return Err(ResultantError::ZeroForm(j));
            }
        }
        Ok(HypersurfaceFamily { n, forms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.forms.len()
    }

    pub fn forms(&self) -> &[HomPoly] {
        &self.forms
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.forms.iter().map(HomPoly::degree).collect()
    }

    /// `lcm` of the degrees.
    pub fn common_degree(&self) -> u32 {
        self.forms.iter().fold(1, |acc, f| acc.lcm(&f.degree().max(1)))
    }

    /// True when no coefficient depends on the parameter.
    pub fn is_fixed(&self) -> bool {
        self.forms.iter().all(HomPoly::is_fixed)
    }

    /// Each `Q_j` replaced by `Q_j^{d/d_j}` with `d` the common degree.
    pub fn raised(&self) -> Vec<HomPoly> {
        let d = self.common_degree();
        self.forms.iter().map(|f| f.pow(d / f.degree().max(1))).collect()
    }

    pub fn select(&self, subset: &[usize]) -> Result<Vec<HomPoly>, ResultantError> {
        check_subset(subset, self.q())?;
        Ok(subset.iter().map(|&j| self.forms[j].clone()).collect())
    }

    pub fn permuted(&self, perm: &[usize]) -> HypersurfaceFamily {
        HypersurfaceFamily {
            n: self.n,
            forms: perm.iter().map(|&j| self.forms[j].clone()).collect(),
        }
    }

    pub fn with_form(&self, j: usize, f: HomPoly) -> HypersurfaceFamily {
        let mut forms = self.forms.clone();
        forms[j] = f;
        HypersurfaceFamily { n: self.n, forms }
    }
}

fn check_subset(subset: &[usize], q: usize) -> Result<(), ResultantError> {
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != subset.len() || subset.iter().any(|&j| j >= q) {
        return Err(ResultantError::BadSubset {
            subset: subset.to_vec(),
            q,
        });
    }
    Ok(())
}

/// All `k`-subsets of `0..q` in lexicographic order.
pub fn subsets(q: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, q: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..q {
            if q - j < k - cur.len() {
                break;
            }
            cur.push(j);
            rec(j + 1, q, k, cur, out);
            cur.pop();
        }
    }
    rec(0, q, k, &mut cur, &mut out);
    out
}

/// Coefficients of a binary form by descending power of `x_0`.
fn binary_coefficients(p: &HomPoly) -> Vec<Scalar> {
    let d = p.degree();
    (0..=d)
        .map(|k| p.coeff(&ExponentTuple(vec![d - k, k])))
        .collect()
}

/// Classical Sylvester determinant of two binary forms of any positive degrees.
pub fn sylvester_resultant_general(p: &HomPoly, q: &HomPoly) -> Result<Scalar, ResultantError> {
    for f in [p, q] {
        if f.nvars() != 2 {
            return Err(ResultantError::NotBinary(f.nvars()));
        }
    }
    let (a, b) = (p.degree() as usize, q.degree() as usize);
    if a == 0 && b == 0 {
        return Err(ResultantError::ZeroDegree);
    }
    let size = a + b;
    let pc = binary_coefficients(p);
    let qc = binary_coefficients(q);
    let mut m = vec![vec![Scalar::zero(); size]; size];
    for r in 0..b {
        for (k, c) in pc.iter().enumerate() {
            m[r][r + k] = c.clone();
        }
    }
    for r in 0..a {
        for (k, c) in qc.iter().enumerate() {
            m[b + r][r + k] = c.clone();
        }
    }
    Ok(determinant(&m))
}

/// Sylvester resultant of two binary forms of the same degree `d ≥ 1`.
pub fn sylvester_resultant(p: &HomPoly, q: &HomPoly) -> Result<Scalar, ResultantError> {
    if p.degree() != q.degree() {
        return Err(ResultantError::UnequalDegrees(vec![p.degree(), q.degree()]));
    }
    if p.degree() == 0 {
        return Err(ResultantError::ZeroDegree);
    }
    sylvester_resultant_general(p, q)
}

fn check_square_system(forms: &[HomPoly]) -> Result<(usize, u32), ResultantError> {
    let Some(first) = forms.first() else {
        return Err(ResultantError::FormCount {
            expected: 1,
            found: 0,
        });
    };
    let nvars = first.nvars();
    if forms.len() != nvars {
        return Err(ResultantError::FormCount {
            expected: nvars,
            found: forms.len(),
        });
    }
    for f in forms {
        if f.nvars() != nvars {
            return Err(AlgebraError::VariableCount {
                expected: nvars,
                found: f.nvars(),
            }
            .into());
        }
    }
    let d = first.degree();
    if forms.iter().any(|f| f.degree() != d) {
        return Err(ResultantError::UnequalDegrees(
            forms.iter().map(HomPoly::degree).collect(),
        ));
    }
    if d == 0 {
        return Err(ResultantError::ZeroDegree);
    }
    Ok((nvars - 1, d))
}

/// The Macaulay matrix at the critical degree together with the indices of
/// its non-reduced monomials (rows and columns of the extraneous minor).
pub fn macaulay_matrix(forms: &[HomPoly]) -> Result<(Vec<Vec<Scalar>>, Vec<usize>), ResultantError> {
    let (n, d) = check_square_system(forms)?;
    let t = (n as u32 + 1) * (d - 1) + 1;
    let index = MonomialIndex::new(enumerate_monomials(n, t));
    let mut rows = Vec::with_capacity(index.len());
    let mut non_reduced = Vec::new();
    for (r, alpha) in index.monomials().iter().enumerate() {
        let big: Vec<usize> = (0..=n).filter(|&k| alpha.0[k] >= d).collect();
        let i = big[0];
        if big.len() >= 2 {
            non_reduced.push(r);
        }
        let mut shift = alpha.clone();
        shift.0[i] -= d;
        rows.push(index.dense(&forms[i].shift(&shift)));
    }
    Ok((rows, non_reduced))
}

/// `det M / det D`, or `None` when the extraneous minor vanishes.
fn macaulay_quotient(forms: &[HomPoly]) -> Result<Option<Scalar>, ResultantError> {
    let (m, nr) = macaulay_matrix(forms)?;
    let minor: Vec<Vec<Scalar>> = nr
        .iter()
        .map(|&r| nr.iter().map(|&c| m[r][c].clone()).collect())
        .collect();
    let dd = determinant(&minor);
    if dd.is_zero() {
        return Ok(None);
    }
    Ok(Some(&determinant(&m) / &dd))
}

/// Random unimodular matrix `L·U` with unit diagonals and small entries.
fn unimodular(rng: &mut random::Rng64, size: usize) -> Vec<Vec<i64>> {
    let mut l = vec![vec![0i64; size]; size];
    let mut u = vec![vec![0i64; size]; size];
    for i in 0..size {
        l[i][i] = 1;
        u[i][i] = 1;
        for j in 0..i {
            l[i][j] = rng.gen_range(-2..=2);
            u[j][i] = rng.gen_range(-2..=2);
        }
    }
    (0..size)
        .map(|i| {
            (0..size)
                .map(|j| (0..size).map(|k| l[i][k] * u[k][j]).sum())
                .collect()
        })
        .collect()
}

/// `Q(A·x)` for an integer matrix `A`.
pub fn change_coordinates(q: &HomPoly, a: &[Vec<i64>]) -> HomPoly {
    let nvars = q.nvars();
    let linear: Vec<HomPoly> = (0..nvars)
        .map(|k| {
            HomPoly::from_terms(
                nvars,
                1,
                (0..nvars)
                    .filter(|&j| a[k][j] != 0)
                    .map(|j| (ExponentTuple::pure_power(nvars, j, 1), Scalar::from_int(a[k][j]))),
            )
            .unwrap()
        })
        .collect();
    let mut out = HomPoly::zero(nvars, q.degree());
    for (e, c) in q.terms() {
        let mut t = HomPoly::monomial(ExponentTuple::zero(nvars), c.clone());
        for (k, &p) in e.as_slice().iter().enumerate() {
            if p > 0 {
                t = t.mul(&linear[k].pow(p));
            }
        }
        out = out.add(&t).unwrap();
    }
    out
}

/// Resultant of `n+1` forms of common degree in `n+1` variables, normalized
/// so that `Res(x_0^d, …, x_n^d) = 1`.
pub fn macaulay_resultant(forms: &[HomPoly]) -> Result<Scalar, ResultantError> {
    macaulay_resultant_seeded(forms, 0x5EED)
}

/// As [`macaulay_resultant`], with an explicit seed for the coordinate changes
/// used on a 0/0 quotient.
pub fn macaulay_resultant_seeded(forms: &[HomPoly], seed: u64) -> Result<Scalar, ResultantError> {
    check_square_system(forms)?;
    // a zero form vanishes everywhere; its rows would also zero the minor
    if forms.iter().any(HomPoly::is_zero) {
        return Ok(Scalar::zero());
    }
    if let Some(r) = macaulay_quotient(forms)? {
        return Ok(r);
    }
    let mut rng = random::rng(seed);
    for attempt in 0..MACAULAY_RETRIES {
        let a = unimodular(&mut rng, forms[0].nvars());
        let moved: Vec<HomPoly> = forms.iter().map(|f| change_coordinates(f, &a)).collect();
        if let Some(r) = macaulay_quotient(&moved)? {
            log::debug!("Macaulay quotient resolved after {} coordinate change(s)", attempt + 1);
            return Ok(r);
        }
    }
    perturbed_resultant(forms).ok_or(ResultantError::Degenerate(MACAULAY_RETRIES))
}

/// `R(Q_0, …, Q_n)` as the value at `s = 0` of `R(Q_i − s·x_i^d)`.
///
/// The perturbed minor has leading term `±s^k`, so it vanishes for finitely
/// many `s` only; `R(s)` has degree at most `(n+1)·d^n` and is recovered at 0
/// by Lagrange interpolation through exact quotients at integer points.
fn perturbed_resultant(forms: &[HomPoly]) -> Option<Scalar> {
    let nvars = forms[0].nvars();
    let d = forms[0].degree();
    let deg = nvars * (d as usize).pow(nvars as u32 - 1);
    let mut points: Vec<(Scalar, Scalar)> = Vec::with_capacity(deg + 1);
    let mut s = 1i64;
    while points.len() <= deg {
        // at most deg(minor) ≤ #rows values of s are skipped
        if s > 4 * (deg as i64 + 1) + 64 {
            return None;
        }
        let shifted: Vec<HomPoly> = forms
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let t = HomPoly::monomial(ExponentTuple::pure_power(nvars, i, d), Scalar::from_int(s));
                f.sub(&t).expect("same shape")
            })
            .collect();
        if let Ok(Some(r)) = macaulay_quotient(&shifted) {
            points.push((Scalar::from_int(s), r));
        }
        s += 1;
    }
    let mut total = Scalar::zero();
    for (k, (sk, rk)) in points.iter().enumerate() {
        let mut w = rk.clone();
        for (j, (sj, _)) in points.iter().enumerate() {
            if j != k {
                w = &(&w * sj) / &(sj - sk);
            }
        }
        total = &total + &w;
    }
    log::debug!("Macaulay quotient recovered by perturbation through {} points", points.len());
    Some(total)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdmissibilityVerdict {
    pub admissible: bool,
    /// Parameter point where every subset resultant is nonzero.
    pub witness: Option<String>,
    /// First subset (lexicographic, 0-based) whose resultant vanishes identically.
    pub failing_subset: Option<Vec<usize>>,
    pub common_degree: u32,
    pub subsets_checked: usize,
}

/// Candidate witness points: Gaussian integers by increasing norm, then halves.
fn witness_candidates() -> Vec<Gaussian> {
    let mut pts: Vec<(i64, i64)> = Vec::new();
    for a in -6i64..=6 {
        for b in -6i64..=6 {
            pts.push((a, b));
        }
    }
    pts.sort_by_key(|&(a, b)| (a * a + b * b, -a, -b));
    let mut out: Vec<Gaussian> = pts.iter().map(|&(a, b)| Gaussian::from_ints(a, b)).collect();
    let half = Gaussian::from_rational(num_rational::BigRational::new(1.into(), 2.into()));
    out.extend(pts.iter().filter(|&&(a, b)| a % 2 != 0 || b % 2 != 0).map(|&(a, b)| {
        &Gaussian::from_ints(a, b) * &half
    }));
    out
}

/// Checks that every `(n+1)`-subset of the family has a resultant that is not
/// identically zero, after raising all forms to the common degree.
pub fn is_admissible(fam: &HypersurfaceFamily) -> Result<AdmissibilityVerdict, ResultantError> {
    let n = fam.n();
    if fam.q() < n + 1 {
        return Err(ResultantError::TooFewForms {
            q: fam.q(),
            needed: n + 1,
        });
    }
    let raised = fam.raised();
    let subs = subsets(fam.q(), n + 1);
    let pick = |forms: &[HomPoly], s: &[usize]| -> Vec<HomPoly> {
        s.iter().map(|&j| forms[j].clone()).collect()
    };
    let common_degree = fam.common_degree();

    if fam.is_fixed() {
        let values: Vec<Result<Scalar, ResultantError>> = subs
            .par_iter()
            .map(|s| macaulay_resultant(&pick(&raised, s)))
            .collect();
        for (s, v) in subs.iter().zip(values) {
            if v?.is_zero() {
                return Ok(AdmissibilityVerdict {
                    admissible: false,
                    witness: None,
                    failing_subset: Some(s.clone()),
                    common_degree,
                    subsets_checked: subs.len(),
                });
            }
        }
        return Ok(AdmissibilityVerdict {
            admissible: true,
            witness: Some("0".into()),
            failing_subset: None,
            common_degree,
            subsets_checked: subs.len(),
        });
    }

    // Subsets whose symbolic resultant is known to be nonzero.
    let mut certified: HashMap<usize, bool> = HashMap::new();
    let candidates = witness_candidates();
    for z0 in &candidates {
        let Ok(at_z0): Result<Vec<HomPoly>, _> = raised.iter().map(|f| f.specialize(z0)).collect()
        else {
            continue;
        };
        let vanishing: Vec<usize> = subs
            .par_iter()
            .enumerate()
            .map(|(k, s)| macaulay_resultant(&pick(&at_z0, s)).map(|r| (k, r.is_zero())))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .filter(|&(_, z)| z)
            .map(|(k, _)| k)
            .collect();
        if vanishing.is_empty() {
            return Ok(AdmissibilityVerdict {
                admissible: true,
                witness: Some(z0.to_string()),
                failing_subset: None,
                common_degree,
                subsets_checked: subs.len(),
            });
        }
        for k in vanishing {
            if let std::collections::hash_map::Entry::Vacant(e) = certified.entry(k) {
                let r = macaulay_resultant(&pick(&raised, &subs[k]))?;
                e.insert(!r.is_zero());
            }
        }
        let mut dead: Vec<usize> = certified
            .iter()
            .filter(|(_, &ok)| !ok)
            .map(|(&k, _)| k)
            .collect();
        dead.sort_unstable();
        if let Some(&k) = dead.first() {
            return Ok(AdmissibilityVerdict {
                admissible: false,
                witness: None,
                failing_subset: Some(subs[k].clone()),
                common_degree,
                subsets_checked: subs.len(),
            });
        }
    }
    Err(ResultantError::NoWitness(candidates.len()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PowerCertificate {
    pub index: usize,
    pub s: u32,
    pub resultant: Scalar,
    /// `b_ij`, homogeneous of degree `s - d` (or zero).
    pub cofactors: Vec<HomPoly>,
}

impl PowerCertificate {
    /// Expands both sides of `x_i^s·R = Σ b_ij Q_j`.
    pub fn verify(&self, forms: &[HomPoly]) -> bool {
        let Some(first) = forms.first() else { return false };
        let nvars = first.nvars();
        let lhs = HomPoly::monomial(
            ExponentTuple::pure_power(nvars, self.index, self.s),
            self.resultant.clone(),
        );
        let mut rhs = HomPoly::zero(nvars, self.s);
        for (b, q) in self.cofactors.iter().zip(forms) {
            match rhs.add(&b.mul(q)) {
                Ok(v) => rhs = v,
                Err(_) => return false,
            }
        }
        self.cofactors.len() == forms.len() && lhs == rhs
    }
}

/// Smallest `s` with `x_i^s` in the degree-`s` piece of `(Q_0, …, Q_n)`,
/// with cofactors scaled by the resultant.
pub fn power_certificate(forms: &[HomPoly], i: usize) -> Result<PowerCertificate, ResultantError> {
    let (n, d) = check_square_system(forms)?;
    let res = macaulay_resultant(forms)?;
    power_certificate_with(forms, i, n, d, res)
}

/// Certificates for every coordinate; the common exponent is the largest `s`.
pub fn power_certificates(forms: &[HomPoly]) -> Result<(Vec<PowerCertificate>, u32), ResultantError> {
    let (n, d) = check_square_system(forms)?;
    let res = macaulay_resultant(forms)?;
    let certs = (0..=n)
        .map(|i| power_certificate_with(forms, i, n, d, res.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    let s = certs.iter().map(|c| c.s).max().unwrap_or(d);
    Ok((certs, s))
}

fn power_certificate_with(
    forms: &[HomPoly],
    i: usize,
    n: usize,
    d: u32,
    res: Scalar,
) -> Result<PowerCertificate, ResultantError> {
    if i > n {
        return Err(ResultantError::BadIndex {
            index: i,
            nvars: n + 1,
        });
    }
    if res.is_zero() {
        return Err(ResultantError::VanishingResultant);
    }
    let nvars = n + 1;
    let bound = (n as u32 + 1) * (d - 1) + 1;
    for s in d..=bound {
        let index = MonomialIndex::new(enumerate_monomials(n, s));
        let multipliers = enumerate_monomials(n, s - d);
        let mut basis = EchelonBasis::with_tracking();
        let mut ids = Vec::new();
        for (j, q) in forms.iter().enumerate() {
            for beta in &multipliers {
                basis.insert(index.sparse(&q.shift(beta)));
                ids.push((j, beta.clone()));
            }
        }
        let target: SparseVec = [(
            index
                .index(&ExponentTuple::pure_power(nvars, i, s))
                .expect("pure power is a monomial of degree s"),
            Scalar::one(),
        )]
        .into_iter()
        .collect();
        let Some(comb) = basis.express(&target) else {
            continue;
        };
        let mut cofactors = vec![HomPoly::zero(nvars, s - d); nvars];
        for (id, c) in comb {
            let (j, beta) = &ids[id];
            cofactors[*j] = cofactors[*j]
                .add(&HomPoly::monomial(beta.clone(), &c * &res))
                .unwrap();
        }
        let cert = PowerCertificate {
            index: i,
            s,
            resultant: res,
            cofactors,
        };
        assert!(cert.verify(forms), "certificate failed its own expansion check");
        return Ok(cert);
    }
    Err(ResultantError::NoCertificate { index: i, bound })
}
