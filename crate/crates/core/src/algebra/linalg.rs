//! Exact linear algebra over the coefficient tower.
//!
//! Ranks and determinants clear denominators row by row and run fraction-free
//! (Bareiss) elimination over the smallest integral domain that holds the
//! entries: `ℤ`, `ℤ[i]`, or `ℚ(i)[z]`. Incremental span/membership work goes
//! through [`EchelonBasis`], a field elimination with optional tracking of the
//! combination that produced each row.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::gaussian::Gaussian;
use super::monomial::ExponentTuple;
use super::ratfunc::RatFunc;
use super::scalar::Scalar;
use super::upoly::Poly;
use super::HomPoly;

/// Integral domain with exact division, enough for Bareiss elimination.
trait Domain: Clone {
    fn is_nil(&self) -> bool;
    fn mul(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `self / o`, known to be exact.
    fn div_exact(&self, o: &Self) -> Self;
    fn unit() -> Self;
    /// Size heuristic for pivot choice.
    fn size(&self) -> u64;
}

impl Domain for BigInt {
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
    fn unit() -> Self {
        One::one()
    }
    fn size(&self) -> u64 {
        self.bits()
    }
}

#[derive(Clone, Debug, PartialEq)]
struct GaussInt {
    re: BigInt,
    im: BigInt,
}

impl Domain for GaussInt {
    fn is_nil(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
    fn mul(&self, o: &Self) -> Self {
        GaussInt {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
    fn sub(&self, o: &Self) -> Self {
        GaussInt {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
    fn neg(&self) -> Self {
        GaussInt {
            re: -&self.re,
            im: -&self.im,
        }
    }
    fn div_exact(&self, o: &Self) -> Self {
        if Zero::is_zero(&o.im) {
            return GaussInt {
                re: &self.re / &o.re,
                im: &self.im / &o.re,
            };
        }
        let n = &o.re * &o.re + &o.im * &o.im;
        GaussInt {
            re: (&self.re * &o.re + &self.im * &o.im) / &n,
            im: (&self.im * &o.re - &self.re * &o.im) / &n,
        }
    }
    fn unit() -> Self {
        GaussInt {
            re: <BigInt as One>::one(),
            im: BigInt::zero(),
        }
    }
    fn size(&self) -> u64 {
        self.re.bits().max(self.im.bits())
    }
}

/// Fraction-free forward elimination in place. Returns the rank and, for
/// square input, the determinant.
fn bareiss<R: Domain>(a: &mut [Vec<R>], want_det: bool) -> (usize, Option<R>) {
    let m = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let square = want_det && m == ncols;
    let mut prev = R::unit();
    let mut r = 0;
    let mut negate = false;
    for c in 0..ncols {
        if r == m {
            break;
        }
        let pivot = (r..m)
            .filter(|&i| !a[i][c].is_nil())
            .min_by_key(|&i| a[i][c].size());
        let Some(p) = pivot else {
            if square {
                return (r, Some(zero_like(&prev)));
            }
            continue;
        };
        if p != r {
            a.swap(p, r);
            negate = !negate;
        }
        let (top, rest) = a.split_at_mut(r + 1);
        let prow = &top[r];
        let pv = prow[c].clone();
        for row in rest.iter_mut() {
            let f = row[c].clone();
            for j in c + 1..ncols {
                let v = if f.is_nil() {
                    if row[j].is_nil() {
                        continue;
                    }
                    pv.mul(&row[j])
                } else {
                    pv.mul(&row[j]).sub(&f.mul(&prow[j]))
                };
                row[j] = v.div_exact(&prev);
            }
            row[c] = zero_like(&prev);
        }
        prev = pv;
        r += 1;
    }
    let det = square.then(|| {
        if r < m {
            zero_like(&prev)
        } else if m == 0 {
            R::unit()
        } else if negate {
            prev.neg()
        } else {
            prev
        }
    });
    (r, det)
}

fn zero_like<R: Domain>(x: &R) -> R {
    x.sub(x)
}

fn lcm_denominators<'a>(qs: impl Iterator<Item = &'a BigRational>) -> BigInt {
    qs.fold(<BigInt as One>::one(), |acc, q| acc.lcm(q.denom()))
}

fn scaled_int(q: &BigRational, s: &BigInt) -> BigInt {
    q.numer() * (s / q.denom())
}

enum Converted {
    Int(Vec<Vec<BigInt>>, Vec<BigInt>),
    Gauss(Vec<Vec<GaussInt>>, Vec<BigInt>),
    Func(Vec<Vec<Poly>>, Vec<Poly>),
}

/// Clears denominators row by row; row `i` was multiplied by the returned
/// factor `c_i`.
fn convert(rows: &[Vec<Scalar>]) -> Converted {
    let any_func = rows.iter().flatten().any(|s| matches!(s, Scalar::Function(_)));
    let any_gauss = rows.iter().flatten().any(|s| matches!(s, Scalar::Gaussian(_)));
    if any_func {
        let mut out = Vec::with_capacity(rows.len());
        let mut factors = Vec::with_capacity(rows.len());
        for row in rows {
            let fs: Vec<RatFunc> = row.iter().map(Scalar::to_ratfunc).collect();
            let mut l = Poly::one();
            for f in &fs {
                if !f.denom().is_one() {
                    let g = l.gcd(f.denom());
                    l = (&l * f.denom()).exact_div(&g).unwrap();
                }
            }
            out.push(
                fs.iter()
                    .map(|f| &f.numer().clone() * &l.exact_div(f.denom()).unwrap())
                    .collect(),
            );
            factors.push(l);
        }
        Converted::Func(out, factors)
    } else if any_gauss {
        let mut out = Vec::with_capacity(rows.len());
        let mut factors = Vec::with_capacity(rows.len());
        for row in rows {
            let gs: Vec<Gaussian> = row.iter().map(|s| s.to_gaussian().unwrap()).collect();
            let l = lcm_denominators(gs.iter().flat_map(|g| [&g.re, &g.im]));
            out.push(
                gs.iter()
                    .map(|g| GaussInt {
                        re: scaled_int(&g.re, &l),
                        im: scaled_int(&g.im, &l),
                    })
                    .collect(),
            );
            factors.push(l);
        }
        Converted::Gauss(out, factors)
    } else {
        let mut out = Vec::with_capacity(rows.len());
        let mut factors = Vec::with_capacity(rows.len());
        for row in rows {
            let qs: Vec<&BigRational> = row.iter().map(|s| s.as_rational().unwrap()).collect();
            let l = lcm_denominators(qs.iter().copied());
            out.push(qs.iter().map(|q| scaled_int(q, &l)).collect());
            factors.push(l);
        }
        Converted::Int(out, factors)
    }
}

/// Rank over the coefficient field of the row vectors.
pub fn rank(rows: &[Vec<Scalar>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    match convert(rows) {
        Converted::Int(mut a, _) => bareiss(&mut a, false).0,
        Converted::Gauss(mut a, _) => bareiss(&mut a, false).0,
        Converted::Func(a, _) => function_rank(&a),
    }
}

fn evaluate_rows(a: &[Vec<Poly>], z0: &Gaussian) -> Vec<Vec<Scalar>> {
    a.iter()
        .map(|row| row.iter().map(|p| Scalar::from_gaussian(p.eval(z0))).collect())
        .collect()
}

fn row_degrees(a: &[Vec<Poly>]) -> Vec<usize> {
    let mut degs: Vec<usize> = a
        .iter()
        .map(|row| row.iter().filter_map(Poly::degree).max().unwrap_or(0))
        .collect();
    degs.sort_unstable_by(|x, y| y.cmp(x));
    degs
}

/// Rank over `ℚ(i)(z)` of a polynomial matrix, by evaluation.
///
/// Each evaluation rank is a lower bound. Once `r` is the largest rank seen and
/// more than `D` points all gave rank `≤ r`, where `D` bounds the degree of any
/// `(r+1)`-minor (the sum of the `r+1` largest row degrees), every such minor
/// has more roots than its degree and vanishes identically, so the rank is `r`.
fn function_rank(a: &[Vec<Poly>]) -> usize {
    let (constant, moving): (Vec<&Vec<Poly>>, Vec<&Vec<Poly>>) =
        a.iter().partition(|row| row.iter().all(Poly::is_constant));
    if constant.is_empty() || moving.is_empty() {
        return evaluation_rank(a);
    }
    // Constant rows are eliminated once over ℚ(i); the moving rows are reduced
    // against them power by power in z, leaving a smaller matrix on the
    // non-pivot columns.
    let mut basis = EchelonBasis::new();
    for row in &constant {
        let v: SparseVec = row
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(j, p)| (j, Scalar::from_gaussian(p.coeff(0))))
            .collect();
        basis.insert(v);
    }
    let ncols = a[0].len();
    let free: Vec<usize> = (0..ncols).filter(|j| !basis.rows.contains_key(j)).collect();
    if free.is_empty() {
        return basis.rank();
    }
    let position: BTreeMap<usize, usize> = free.iter().enumerate().map(|(k, &j)| (j, k)).collect();
    let mut reduced = Vec::with_capacity(moving.len());
    for row in moving {
        let top = row.iter().filter_map(Poly::degree).max().unwrap_or(0);
        let mut entries = vec![vec![Gaussian::zero(); top + 1]; free.len()];
        for k in 0..=top {
            let v: SparseVec = row
                .iter()
                .enumerate()
                .map(|(j, p)| (j, p.coeff(k)))
                .filter(|(_, c)| !c.is_zero())
                .map(|(j, c)| (j, Scalar::from_gaussian(c)))
                .collect();
            for (j, x) in basis.reduce(v).0 {
                entries[position[&j]][k] = x.to_gaussian().unwrap();
            }
        }
        let polys: Vec<Poly> = entries.into_iter().map(Poly::from_coeffs).collect();
        if polys.iter().any(|p| !p.is_zero()) {
            reduced.push(polys);
        }
    }
    if reduced.is_empty() {
        return basis.rank();
    }
    basis.rank() + evaluation_rank(&reduced)
}

fn evaluation_rank(a: &[Vec<Poly>]) -> usize {
    let ncols = a.first().map_or(0, Vec::len);
    let cap = a.len().min(ncols);
    let degs = row_degrees(a);
    let mut best = 0;
    let mut points = 0usize;
    let mut k: i64 = 0;
    loop {
        let z0 = Gaussian::from_int(k);
        k += 1;
        let r = rank(&evaluate_rows(a, &z0));
        points += 1;
        best = best.max(r);
        if best == cap {
            return best;
        }
        let bound: usize = degs.iter().take(best + 1).sum();
        if points > bound {
            return best;
        }
    }
}

/// Determinant of a square polynomial matrix by evaluation at `0, 1, …, D`
/// (with `D` the sum of row degrees) and Newton interpolation.
fn function_determinant(a: &[Vec<Poly>]) -> Poly {
    let total: usize = row_degrees(a).iter().sum();
    let xs: Vec<Gaussian> = (0..=total as i64).map(Gaussian::from_int).collect();
    let ys: Vec<Gaussian> = xs
        .iter()
        .map(|x| determinant(&evaluate_rows(a, x)).to_gaussian().unwrap())
        .collect();
    newton_interpolate(&xs, ys)
}

/// The polynomial of degree `< xs.len()` through the points `(xs[i], ys[i])`.
pub fn newton_interpolate(xs: &[Gaussian], mut coef: Vec<Gaussian>) -> Poly {
    let n = xs.len();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = &coef[i] - &coef[i - 1];
            let den = &xs[i] - &xs[i - j];
            coef[i] = &num / &den;
        }
    }
    let mut p = Poly::zero();
    for i in (0..n).rev() {
        p = &(&p * &Poly::linear_root(&xs[i])) + &Poly::constant(coef[i].clone());
    }
    p
}

/// Determinant of a square matrix.
pub fn determinant(m: &[Vec<Scalar>]) -> Scalar {
    assert!(m.iter().all(|r| r.len() == m.len()), "determinant of non-square matrix");
    if m.is_empty() {
        return Scalar::one();
    }
    match convert(m) {
        Converted::Int(mut a, fs) => {
            let d = bareiss(&mut a, true).1.unwrap();
            let s: BigInt = fs.iter().product();
            Scalar::Rational(BigRational::new(d, s))
        }
        Converted::Gauss(mut a, fs) => {
            let d = bareiss(&mut a, true).1.unwrap();
            let s: BigInt = fs.iter().product();
            let s = BigRational::from_integer(s);
            Scalar::from_gaussian(Gaussian::new(
                BigRational::from_integer(d.re) / &s,
                BigRational::from_integer(d.im) / &s,
            ))
        }
        Converted::Func(a, fs) => {
            let d = function_determinant(&a);
            let s = fs.iter().fold(Poly::one(), |acc, f| &acc * f);
            Scalar::from_ratfunc(RatFunc::new(d, s))
        }
    }
}

/// Sparse vector: column index to nonzero entry.
pub type SparseVec = BTreeMap<usize, Scalar>;

fn axpy(acc: &mut SparseVec, f: &Scalar, v: &SparseVec) {
    for (k, x) in v {
        let t = f * x;
        match acc.get_mut(k) {
            Some(cur) => {
                let s = &*cur - &t;
                if s.is_zero() {
                    acc.remove(k);
                } else {
                    *cur = s;
                }
            }
            None => {
                acc.insert(*k, -t);
            }
        }
    }
}

#[derive(Clone, Debug)]
struct EchelonRow {
    vec: SparseVec,
    comb: SparseVec,
}

/// Incrementally built row-echelon basis over the coefficient field.
///
/// Every inserted vector gets an id (its insertion index, counted whether or
/// not it was independent). With tracking on, [`EchelonBasis::express`]
/// writes a vector in the span as a combination of inserted ids.
#[derive(Clone, Debug, Default)]
pub struct EchelonBasis {
    rows: BTreeMap<usize, EchelonRow>,
    tracking: bool,
    inserted: usize,
}

impl EchelonBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_tracking() -> Self {
        EchelonBasis {
            tracking: true,
            ..Self::default()
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Returns `(residue, combination)` with `v = Σ comb_k·input_k + residue`.
    fn reduce(&self, mut v: SparseVec) -> (SparseVec, SparseVec) {
        let mut comb = SparseVec::new();
        let mut cursor = 0;
        loop {
            let next = v
                .range(cursor..)
                .find(|(k, _)| self.rows.contains_key(k))
                .map(|(k, x)| (*k, x.clone()));
            let Some((p, f)) = next else { break };
            let row = &self.rows[&p];
            axpy(&mut v, &f, &row.vec);
            if self.tracking {
                axpy(&mut comb, &-&f, &row.comb);
            }
            cursor = p + 1;
        }
        (v, comb)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v.clone()).0.is_empty()
    }

    /// Adds `v`; returns true when it enlarged the span.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let id = self.inserted;
        self.inserted += 1;
        let (mut res, mut comb) = self.reduce(v);
        let Some((&p, lead)) = res.iter().next() else {
            return false;
        };
        let inv = lead.inv().unwrap();
        for x in res.values_mut() {
            *x = &*x * &inv;
        }
        if self.tracking {
            for x in comb.values_mut() {
                *x = -(&*x * &inv);
            }
            comb.insert(id, inv);
        }
        self.rows.insert(p, EchelonRow { vec: res, comb });
        true
    }

    /// Combination of inserted ids equal to `v`, if `v` is in the span.
    /// Requires tracking.
    pub fn express(&self, v: &SparseVec) -> Option<SparseVec> {
        assert!(self.tracking, "express needs a tracking basis");
        let (res, comb) = self.reduce(v.clone());
        res.is_empty().then_some(comb)
    }
}

/// Column index for a fixed list of monomials.
#[derive(Clone, Debug)]
pub struct MonomialIndex {
    map: HashMap<ExponentTuple, usize>,
    list: Vec<ExponentTuple>,
}

impl MonomialIndex {
    pub fn new(list: Vec<ExponentTuple>) -> Self {
        let map = list.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        MonomialIndex { map, list }
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn monomials(&self) -> &[ExponentTuple] {
        &self.list
    }

    pub fn index(&self, e: &ExponentTuple) -> Option<usize> {
        self.map.get(e).copied()
    }

    /// Sparse coefficient vector; panics on a monomial outside the index.
    pub fn sparse(&self, p: &HomPoly) -> SparseVec {
        p.terms()
            .map(|(e, c)| (self.map[e], c.clone()))
            .collect()
    }

    pub fn dense(&self, p: &HomPoly) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(); self.list.len()];
        for (e, c) in p.terms() {
            v[self.map[e]] = c.clone();
        }
        v
    }
}

/// Numerical rank of a complex matrix by Gaussian elimination with full
/// pivoting; entries below `rel_tol·max|a_ij|` count as zero.
pub fn numeric_rank(mut a: Vec<Vec<Complex64>>, rel_tol: f64) -> usize {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let scale = a
        .iter()
        .flatten()
        .map(|z| z.norm())
        .fold(0.0_f64, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let tol = rel_tol * scale;
    let mut cols: Vec<usize> = (0..n).collect();
    for r in 0..m.min(n) {
        let mut best = (r, r, 0.0);
        for (i, row) in a.iter().enumerate().skip(r) {
            for (jj, &j) in cols.iter().enumerate().skip(r) {
                let v = row[j].norm();
                if v > best.2 {
                    best = (i, jj, v);
                }
            }
        }
        if best.2 <= tol {
            return r;
        }
        a.swap(r, best.0);
        cols.swap(r, best.1);
        let pc = cols[r];
        let pv = a[r][pc];
        let prow = a[r].clone();
        for row in a.iter_mut().skip(r + 1) {
            let f = row[pc] / pv;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for &j in &cols[r..] {
                row[j] -= f * prow[j];
            }
        }
    }
    m.min(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    fn mat(rows: &[&[&str]]) -> Vec<Vec<Scalar>> {
        rows.iter().map(|r| r.iter().map(|x| s(x)).collect()).collect()
    }

    #[test]
    fn integer_determinants() {
        let m = mat(&[&["2", "1"], &["1", "3"]]);
        assert_eq!(determinant(&m), Scalar::from_int(5));
        let m = mat(&[&["0", "1"], &["1", "0"]]);
        assert_eq!(determinant(&m), Scalar::from_int(-1));
        let m = mat(&[&["1/2", "1/3"], &["1/4", "1/5"]]);
        assert_eq!(determinant(&m), Scalar::from_ratio(1, 60));
    }

    #[test]
    fn gaussian_and_function_determinants() {
        let m = mat(&[&["i", "1"], &["1", "i"]]);
        assert_eq!(determinant(&m), Scalar::from_int(-2));
        let m = mat(&[&["z", "1"], &["1/(z+1)", "z"]]);
        assert_eq!(determinant(&m), s("z^2 - 1/(z+1)"));
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = Poly::from_int_coeffs(&[3, 0, -2, 1]);
        let xs: Vec<Gaussian> = (0..4).map(Gaussian::from_int).collect();
        let ys = xs.iter().map(|x| p.eval(x)).collect();
        assert_eq!(newton_interpolate(&xs, ys), p);
    }

    #[test]
    fn mixed_function_rank_matches_plain_evaluation() {
        use crate::random::{rng, scalar};
        let mut g = rng(11);
        for trial in 0..30 {
            let rows: Vec<Vec<Poly>> = (0..6)
                .map(|r| {
                    (0..5)
                        .map(|_| {
                            if r < 3 || trial % 4 == 0 {
                                Poly::constant(scalar(&mut g, crate::algebra::Variant::GaussianRational).to_gaussian().unwrap())
                            } else {
                                crate::random::poly(&mut g, 1)
                            }
                        })
                        .collect()
                })
                .collect();
            // force a dependency between a moving row and a constant one
            let mut rows = rows;
            rows[5] = rows[3].iter().zip(&rows[0]).map(|(p, q)| p + q).collect();
            assert_eq!(function_rank(&rows), evaluation_rank(&rows), "trial {trial}");
        }
    }

    #[test]
    fn rank_with_skipped_columns() {
        let m = mat(&[&["0", "1", "2"], &["0", "2", "4"], &["0", "0", "1"]]);
        assert_eq!(rank(&m), 2);
        let m = mat(&[&["z", "z^2"], &["1", "z"]]);
        assert_eq!(rank(&m), 1);
    }

    #[test]
    fn echelon_tracking_expresses_members() {
        let mut b = EchelonBasis::with_tracking();
        let v = |xs: &[i64]| -> SparseVec {
            xs.iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(k, &x)| (k, Scalar::from_int(x)))
                .collect()
        };
        assert!(b.insert(v(&[1, 1, 0])));
        assert!(b.insert(v(&[0, 1, 1])));
        assert!(!b.insert(v(&[1, 2, 1])));
        assert_eq!(b.rank(), 2);
        let target = v(&[2, 5, 3]);
        let comb = b.express(&target).unwrap();
        // 2*(1,1,0) + 3*(0,1,1)
        assert_eq!(comb.get(&0), Some(&Scalar::from_int(2)));
        assert_eq!(comb.get(&1), Some(&Scalar::from_int(3)));
        assert!(b.express(&v(&[0, 0, 1])).is_none());
    }

    #[test]
    fn numeric_rank_detects_dependence() {
        let c = |x: f64| Complex64::new(x, 0.0);
        let a = vec![vec![c(1.0), c(2.0)], vec![c(2.0), c(4.0 + 1e-14)]];
        assert_eq!(numeric_rank(a, 1e-9), 1);
    }
}
