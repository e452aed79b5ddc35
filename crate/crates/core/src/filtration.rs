//! Graded pieces of complete-intersection ideals, the filtration
//! `V_N = V_N^{I_1} ⊃ … ⊃ V_N^{I_K}` and the ψ-basis adapted to it.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::linalg::{rank, EchelonBasis, MonomialIndex};
use crate::algebra::{binomial, enumerate_monomials, ExponentTuple, HomPoly, Scalar};
use crate::resultant::{HypersurfaceFamily, ResultantError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FiltrationError {
    #[error("d = {d} does not divide N = {big_n}")]
    NotDivisible { d: u32, big_n: u32 },
    #[error("subset must have exactly n = {n} indices, got {got}")]
    SubsetSize { n: usize, got: usize },
    #[error("generators must share one degree and variable count")]
    MixedGenerators,
    #[error("no generators given")]
    NoGenerators,
    #[error(transparent)]
    Resultant(#[from] ResultantError),
}

/// `#{(i_1,…,i_n) : Σ i_s ≤ N, 0 ≤ i_s ≤ d-1}`.
pub fn tuple_count(big_n: u32, d: u32, n: usize) -> u128 {
    // counts[s] = number of tuples so far with sum exactly s
    let cap = big_n as usize;
    let mut counts = vec![0u128; cap + 1];
    counts[0] = 1;
    for _ in 0..n {
        let mut next = vec![0u128; cap + 1];
        for (s, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for i in 0..d as usize {
                if s + i > cap {
                    break;
                }
                next[s + i] += c;
            }
        }
        counts = next;
    }
    counts.iter().sum()
}

fn common_shape(forms: &[HomPoly]) -> Result<(usize, u32), FiltrationError> {
    let first = forms.first().ok_or(FiltrationError::NoGenerators)?;
    if forms
        .iter()
        .any(|f| f.nvars() != first.nvars() || f.degree() != first.degree())
    {
        return Err(FiltrationError::MixedGenerators);
    }
    Ok((first.nvars() - 1, first.degree()))
}

/// Coefficient rows of `{Q·x^I : deg x^I = N - d}` against the degree-`N` monomials.
fn generator_rows(forms: &[HomPoly], big_n: u32, n: usize, d: u32) -> Vec<Vec<Scalar>> {
    if big_n < d {
        return Vec::new();
    }
    let index = MonomialIndex::new(enumerate_monomials(n, big_n));
    let shifts = enumerate_monomials(n, big_n - d);
    forms
        .iter()
        .flat_map(|q| shifts.iter().map(|e| index.dense(&q.shift(e))).collect::<Vec<_>>())
        .collect()
}

/// `dim (Q_{j_1}, …, Q_{j_n}) ∩ V_N`.
pub fn graded_ideal_dim(forms: &[HomPoly], big_n: u32) -> Result<usize, FiltrationError> {
    let (n, d) = common_shape(forms)?;
    Ok(rank(&generator_rows(forms, big_n, n, d)))
}

/// `dim V_N / (Q_{j_1}, …, Q_{j_n}) ∩ V_N`.
pub fn quotient_dim(forms: &[HomPoly], big_n: u32) -> Result<usize, FiltrationError> {
    let (n, _) = common_shape(forms)?;
    Ok(binomial(big_n as usize + n, n) - graded_ideal_dim(forms, big_n)?)
}

/// Cofactors `c_g` with `q = Σ c_g·g`, when `q` lies in the ideal (in degree
/// `deg q`). Generators of degree above `deg q` get a zero cofactor.
pub fn ideal_membership(q: &HomPoly, generators: &[HomPoly]) -> Option<Vec<HomPoly>> {
    let nvars = q.nvars();
    let n = nvars - 1;
    let big_n = q.degree();
    let index = MonomialIndex::new(enumerate_monomials(n, big_n));
    let mut basis = EchelonBasis::with_tracking();
    let mut ids = Vec::new();
    for (j, g) in generators.iter().enumerate() {
        if g.degree() > big_n || g.is_zero() {
            continue;
        }
        for e in enumerate_monomials(n, big_n - g.degree()) {
            basis.insert(index.sparse(&g.shift(&e)));
            ids.push((j, e));
        }
    }
    let comb = basis.express(&index.sparse(q))?;
    let mut cof: Vec<HomPoly> = generators
        .iter()
        .map(|g| HomPoly::zero(nvars, big_n.saturating_sub(g.degree())))
        .collect();
    for (id, c) in comb {
        let (j, e) = &ids[id];
        cof[*j] = cof[*j].add(&HomPoly::monomial(e.clone(), c)).unwrap();
    }
    Some(cof)
}

/// `(d^n/(n+1))·C(N/d, n)·(N/d - n)`.
pub fn a_lower_bound(n: usize, d: u32, big_n: u32) -> BigRational {
    let nd = (big_n / d) as i64;
    let c = binomial_big(nd as u64, n as u64);
    let dn = num_traits::pow(BigInt::from(d), n);
    BigRational::new(dn * c * BigInt::from(nd - n as i64), BigInt::from(n as u64 + 1))
}

fn binomial_big(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let mut acc = BigInt::from(1);
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// All `I ∈ ℕ^n` with `‖I‖ ≤ k`, ascending lexicographically.
pub fn filtration_indices(n: usize, k: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for total in 0..=k {
        out.extend(enumerate_monomials(n - 1, total).into_iter().map(|e| e.0));
    }
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiltrationChecks {
    pub sum_m_equals_m: bool,
    pub a_independent_of_s: bool,
    pub m_equals_d_pow_n_in_range: bool,
    /// `None` when `N/d ≤ n` and the bound does not apply.
    pub a_lower_bound_holds: Option<bool>,
    pub weighted_identity: bool,
    pub quotient_equals_tuple_count: bool,
}

impl FiltrationChecks {
    pub fn all(&self) -> bool {
        self.sum_m_equals_m
            && self.a_independent_of_s
            && self.m_equals_d_pow_n_in_range
            && self.a_lower_bound_holds != Some(false)
            && self.weighted_identity
            && self.quotient_equals_tuple_count
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiltrationTable {
    pub n: usize,
    pub d: u32,
    #[serde(rename = "N")]
    pub big_n: u32,
    pub subset: Vec<usize>,
    pub indices: Vec<Vec<u32>>,
    pub m: Vec<usize>,
    #[serde(rename = "A")]
    pub a: u64,
    /// `Σ_k m_k·i_{sk}` for each `s`.
    pub a_per_s: Vec<u64>,
    #[serde(rename = "A_lower", serialize_with = "ser_rational")]
    pub a_lower: BigRational,
    #[serde(rename = "M")]
    pub big_m: usize,
    #[serde(rename = "K")]
    pub big_k: usize,
    pub checks: FiltrationChecks,
}

pub(crate) fn ser_rational<S: serde::Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

/// Forms `Q_J` raised to the family's common degree.
fn subset_forms(fam: &HypersurfaceFamily, subset: &[usize]) -> Result<Vec<HomPoly>, FiltrationError> {
    if subset.len() != fam.n() {
        return Err(FiltrationError::SubsetSize {
            n: fam.n(),
            got: subset.len(),
        });
    }
    fam.select(subset)?;
    let raised = fam.raised();
    Ok(subset.iter().map(|&j| raised[j].clone()).collect())
}

fn check_divides(d: u32, big_n: u32) -> Result<(), FiltrationError> {
    if !big_n.is_multiple_of(d) {
        return Err(FiltrationError::NotDivisible { d, big_n });
    }
    Ok(())
}

/// Builds the index list, multiplicities `m_k` and the constant `A` for one
/// `(N, J)`, and runs the internal identities.
pub fn build_filtration(
    fam: &HypersurfaceFamily,
    subset: &[usize],
    big_n: u32,
) -> Result<FiltrationTable, FiltrationError> {
    let forms = subset_forms(fam, subset)?;
    let n = fam.n();
    let d = fam.common_degree();
    check_divides(d, big_n)?;
    let level = big_n / d;
    let indices = filtration_indices(n, level);
    let big_k = indices.len();
    let big_m = binomial(big_n as usize + n, n);

    let mut qdims: HashMap<u32, usize> = HashMap::new();
    let mut qt_ok = true;
    let mut m = Vec::with_capacity(big_k);
    for (k, idx) in indices.iter().enumerate() {
        if k + 1 == big_k {
            m.push(1);
            continue;
        }
        let norm: u32 = idx.iter().sum();
        let rest = big_n - d * norm;
        let v = match qdims.get(&rest) {
            Some(&v) => v,
            None => {
                let v = quotient_dim(&forms, rest)?;
                qt_ok &= v as u128 == tuple_count(rest, d, n);
                qdims.insert(rest, v);
                v
            }
        };
        m.push(v);
    }

    let a_per_s: Vec<u64> = (0..n)
        .map(|s| {
            indices
                .iter()
                .zip(&m)
                .map(|(idx, &mk)| mk as u64 * idx[s] as u64)
                .sum()
        })
        .collect();
    let a = a_per_s.first().copied().unwrap_or(0);
    let a_lower = a_lower_bound(n, d, big_n);
    let dn = (d as usize).pow(n as u32);
    let weighted: u64 = indices
        .iter()
        .zip(&m)
        .map(|(idx, &mk)| mk as u64 * (level as u64 - idx.iter().map(|&x| x as u64).sum::<u64>()))
        .sum();
    // MN/d - nA, kept in integers: M·(N/d) - n·A.
    let weighted_rhs = big_m as i128 * level as i128 - n as i128 * a as i128;
    let checks = FiltrationChecks {
        sum_m_equals_m: m.iter().sum::<usize>() == big_m,
        a_independent_of_s: a_per_s.iter().all(|&x| x == a),
        m_equals_d_pow_n_in_range: indices.iter().zip(&m).all(|(idx, &mk)| {
            let norm: u32 = idx.iter().sum();
            big_n - d * norm < n as u32 * d || mk == dn
        }),
        a_lower_bound_holds: (level as usize > n)
            .then(|| BigRational::from_integer(BigInt::from(a)) >= a_lower),
        weighted_identity: weighted as i128 == weighted_rhs,
        quotient_equals_tuple_count: qt_ok,
    };
    Ok(FiltrationTable {
        n,
        d,
        big_n,
        subset: subset.to_vec(),
        indices,
        m,
        a,
        a_per_s,
        a_lower,
        big_m,
        big_k,
        checks,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PsiElement {
    /// 0-based block index `k`.
    pub block: usize,
    /// `I_k`: exponent of `Q_{j_s}` in this element.
    pub exponents: Vec<u32>,
    /// `γ_ℓ` (a monomial here).
    pub gamma: HomPoly,
    pub psi: HomPoly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PsiBasis {
    /// Ordered `ψ_1, …, ψ_M`: block 1 first, block `K` last.
    pub elements: Vec<PsiElement>,
    pub block_sizes: Vec<usize>,
    /// `Σ_ℓ` exponent of `Q_{j_s}` in `ψ_ℓ`, per `s`.
    pub exponent_sums: Vec<u64>,
    pub rank: usize,
}

/// Greedy basis: for `k = K, …, 1`, add `Q^{I_k}·x^β` (monomials `x^β` in
/// descending lexicographic order) whenever it enlarges the span.
pub fn construct_psi_basis(
    fam: &HypersurfaceFamily,
    subset: &[usize],
    big_n: u32,
) -> Result<PsiBasis, FiltrationError> {
    let forms = subset_forms(fam, subset)?;
    let n = fam.n();
    let nvars = n + 1;
    let d = fam.common_degree();
    check_divides(d, big_n)?;
    let indices = filtration_indices(n, big_n / d);
    let index = MonomialIndex::new(enumerate_monomials(n, big_n));

    let mut powers: Vec<Vec<HomPoly>> = forms
        .iter()
        .map(|q| vec![HomPoly::monomial(ExponentTuple::zero(nvars), Scalar::one()), q.clone()])
        .collect();
    let level = (big_n / d) as usize;
    for p in powers.iter_mut() {
        while p.len() <= level {
            let next = p.last().unwrap().mul(&p[1]);
            p.push(next);
        }
    }

    let mut basis = EchelonBasis::new();
    let mut blocks: Vec<Vec<PsiElement>> = vec![Vec::new(); indices.len()];
    for (k, idx) in indices.iter().enumerate().rev() {
        let mut qi = HomPoly::monomial(ExponentTuple::zero(nvars), Scalar::one());
        for (s, &e) in idx.iter().enumerate() {
            qi = qi.mul(&powers[s][e as usize]);
        }
        let rest = big_n - d * idx.iter().sum::<u32>();
        for beta in enumerate_monomials(n, rest) {
            let psi = qi.shift(&beta);
            if basis.insert(index.sparse(&psi)) {
                blocks[k].push(PsiElement {
                    block: k,
                    exponents: idx.clone(),
                    gamma: HomPoly::monomial(beta, Scalar::one()),
                    psi,
                });
            }
        }
    }
    let block_sizes: Vec<usize> = blocks.iter().map(Vec::len).collect();
    let elements: Vec<PsiElement> = blocks.into_iter().flatten().collect();
    let exponent_sums = (0..n)
        .map(|s| elements.iter().map(|e| e.exponents[s] as u64).sum())
        .collect();
    Ok(PsiBasis {
        rank: basis.rank(),
        elements,
        block_sizes,
        exponent_sums,
    })
}

impl PsiBasis {
    /// Independent rank check of the tail starting at block `k`.
    pub fn tail_rank(&self, k: usize) -> usize {
        let tail: Vec<&PsiElement> = self.elements.iter().filter(|e| e.block >= k).collect();
        let Some(first) = tail.first() else { return 0 };
        let index = MonomialIndex::new(first.psi.monomial_basis());
        let rows: Vec<Vec<Scalar>> = tail.iter().map(|e| index.dense(&e.psi)).collect();
        rank(&rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(nvars: usize, k: usize) -> HomPoly {
        HomPoly::var(nvars, k)
    }

    fn pure(nvars: usize, k: usize, d: u32) -> HomPoly {
        HomPoly::monomial(ExponentTuple::pure_power(nvars, k, d), Scalar::one())
    }

    #[test]
    fn tuple_counts() {
        assert_eq!(tuple_count(2, 2, 2), 4);
        assert_eq!(tuple_count(7, 2, 2), 4);
        assert_eq!(tuple_count(1, 2, 2), 3);
        assert_eq!(tuple_count(0, 5, 3), 1);
        assert_eq!(tuple_count(2, 3, 1), 3);
    }

    #[test]
    fn ideal_dimensions() {
        let sq = [pure(3, 0, 2), pure(3, 1, 2)];
        assert_eq!(graded_ideal_dim(&sq, 1).unwrap(), 0);
        assert_eq!(graded_ideal_dim(&[pure(2, 0, 2)], 3).unwrap(), 2);
        assert_eq!(graded_ideal_dim(&sq, 4).unwrap(), 11);
        assert_eq!(quotient_dim(&sq, 4).unwrap(), 4);
        assert_eq!(quotient_dim(&[pure(2, 0, 3)], 2).unwrap(), 3);
        let cubes = [pure(3, 0, 3), pure(3, 1, 3)];
        assert_eq!(quotient_dim(&cubes, 5).unwrap() as u128, tuple_count(5, 3, 2));
    }

    #[test]
    fn membership() {
        let g = [x(2, 0)];
        let cof = ideal_membership(&pure(2, 0, 2), &g).unwrap();
        assert_eq!(cof[0], x(2, 0));
        assert!(ideal_membership(&pure(2, 1, 2), &g).is_none());
    }

    #[test]
    fn line_filtration() {
        let fam = HypersurfaceFamily::new(1, vec![x(2, 0), x(2, 1)]).unwrap();
        let t = build_filtration(&fam, &[0], 2).unwrap();
        assert_eq!(t.big_k, 3);
        assert_eq!(t.m, vec![1, 1, 1]);
        assert_eq!(t.a, 3);
        assert!(t.checks.all(), "{:?}", t.checks);
        let b = construct_psi_basis(&fam, &[0], 2).unwrap();
        assert_eq!(b.elements.len(), 3);
        let exps: Vec<u32> = b.elements.iter().map(|e| e.exponents[0]).collect();
        assert_eq!(exps, vec![0, 1, 2]);
        assert_eq!(b.exponent_sums, vec![3]);
    }

    #[test]
    fn indices_are_sorted() {
        let idx = filtration_indices(2, 2);
        assert_eq!(idx.len(), 6);
        assert_eq!(idx.first().unwrap(), &vec![0, 0]);
        assert_eq!(idx.last().unwrap(), &vec![2, 0]);
        assert!(idx.windows(2).all(|w| w[0] < w[1]));
    }
}
