//! Explicit constants `N, M, K, p_0`, the `t`-bounds and the truncation
//! levels `L_j`, with exact verification of the error margin.

pub mod interval;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{linalg::EchelonBasis, linalg::SparseVec, Poly, RatFunc, Scalar};
use crate::filtration::{a_lower_bound, ser_rational};
use interval::{ln, Interval};

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(String),
    #[error("n must be at least 1")]
    ZeroN,
    #[error("need q ≥ n+1 hypersurfaces (q = {q}, n = {n})")]
    TooFewHypersurfaces { q: usize, n: usize },
    #[error("{found} degrees given for q = {q}")]
    DegreeCount { q: usize, found: usize },
    #[error("degrees must be positive")]
    ZeroDegree,
    #[error("p must be at least 1")]
    ZeroP,
    #[error("could not separate the floor of the p_0 ratio at {0} bits")]
    Precision(u32),
}

/// Largest accepted `ε`; larger inputs are clamped to it.
pub fn epsilon_cap() -> BigRational {
    BigRational::one() - BigRational::new(BigInt::one(), BigInt::one() << 20u32)
}

/// `ε` as used by the formulas.
pub fn effective_epsilon(eps: &BigRational) -> Result<BigRational, BoundsError> {
    if !eps.is_positive() {
        return Err(BoundsError::NonPositiveEpsilon(eps.to_string()));
    }
    if eps >= &BigRational::one() {
        log::warn!("epsilon {eps} ≥ 1 clamped to 1 - 2^-20");
        return Ok(epsilon_cap());
    }
    Ok(eps.clone())
}

pub fn binomial_big(n: &BigInt, k: u64) -> BigInt {
    if n < &BigInt::from(k) {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * (n - BigInt::from(j)) / BigInt::from(j + 1);
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct Constants {
    pub N: u64,
    #[serde(serialize_with = "ser_int")]
    pub M: BigInt,
    #[serde(serialize_with = "ser_int")]
    pub K: BigInt,
}

fn ser_int<S: serde::Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// `N = d·⌊2(n+1)(2^n−1)(nd+1)/ε + n + 1⌋`, `M = C(N+n, n)`, `K = C(N/d+n, n)`.
pub fn compute_constants(n: usize, d: u32, eps: &BigRational) -> Result<Constants, BoundsError> {
    if n == 0 {
        return Err(BoundsError::ZeroN);
    }
    if d == 0 {
        return Err(BoundsError::ZeroDegree);
    }
    let eps = effective_epsilon(eps)?;
    let n_big = BigInt::from(n);
    let coeff = BigInt::from(2u32)
        * (&n_big + 1u32)
        * ((BigInt::one() << n) - 1u32)
        * (&n_big * d + 1u32);
    let inner = BigRational::from_integer(coeff) / &eps + BigRational::from_integer(&n_big + 1u32);
    let nd = inner.floor().to_integer();
    let big_n = (nd.clone() * d).to_u64().expect("N fits in 64 bits");
    let m = binomial_big(&BigInt::from(big_n + n as u64), n as u64);
    let k = binomial_big(&(nd + n), n as u64);
    Ok(Constants { N: big_n, M: m, K: k })
}

/// `X = C(n+N, n)²·C(q, n)`, the size parameter of the `t`-bounds.
pub fn size_parameter(n: usize, big_n: u64, q: usize) -> BigInt {
    let m = binomial_big(&BigInt::from(big_n + n as u64), n as u64);
    &m * &m * binomial_big(&BigInt::from(q), n as u64)
}

/// `p_0 = ⌊(X−1)·log X / log(1 + ε/(2MN)) + 1⌋²`, evaluated with validated
/// logarithms at increasing precision until the floor is determined.
pub fn compute_p0(n: usize, big_n: u64, q: usize, eps: &BigRational) -> Result<BigInt, BoundsError> {
    if q < n + 1 {
        return Err(BoundsError::TooFewHypersurfaces { q, n });
    }
    Ok(p0_with_enclosure(n, big_n, q, eps)?.0)
}

/// `p_0` together with the enclosure of the inner ratio that settled it.
pub fn p0_with_enclosure(
    n: usize,
    big_n: u64,
    q: usize,
    eps: &BigRational,
) -> Result<(BigInt, Interval, u32), BoundsError> {
    let eps = effective_epsilon(eps)?;
    let x = size_parameter(n, big_n, q);
    let m = binomial_big(&BigInt::from(big_n + n as u64), n as u64);
    let delta = eps / BigRational::from_integer(BigInt::from(2u32) * m * big_n);
    let xr = BigRational::from_integer(x.clone());
    let arg = BigRational::one() + &delta;
    let mut prec = 64;
    while prec <= 1 << 16 {
        // Relative accuracy of ln(1+δ) needs about log2(1/δ) extra bits.
        let extra = delta.denom().bits() as u32;
        let num = ln(&xr, prec).scale(&BigRational::from_integer(&x - 1));
        let den = ln(&arg, prec + extra);
        if den.lo.is_positive() && num.lo.is_positive() {
            let one = Interval::point(BigRational::one());
            let v = num.div_positive(&den).add(&one);
            if v.floor_lo() == v.floor_hi() {
                let f = v.floor_lo();
                return Ok((&f * &f, v, prec));
            }
        } else if x.is_one() {
            // X = 1 makes the numerator vanish exactly.
            return Ok((BigInt::one(), Interval::point(BigRational::one()), prec));
        }
        prec *= 2;
    }
    Err(BoundsError::Precision(prec))
}

/// An integer that is either known exactly or only through bounds on `log2`.
#[derive(Clone, Debug, PartialEq)]
pub enum Magnitude {
    Exact(BigInt),
    Huge { log2_lo: f64, log2_hi: f64 },
}

impl Magnitude {
    pub fn log2_bounds(&self) -> (f64, f64) {
        match self {
            Magnitude::Exact(v) => log2_big(v),
            Magnitude::Huge { log2_lo, log2_hi } => (*log2_lo, *log2_hi),
        }
    }

    pub fn exact(&self) -> Option<&BigInt> {
        match self {
            Magnitude::Exact(v) => Some(v),
            Magnitude::Huge { .. } => None,
        }
    }

    /// Certified `self ≤ other`, when the information suffices.
    pub fn provably_le(&self, other: &Magnitude) -> bool {
        match (self, other) {
            (Magnitude::Exact(a), Magnitude::Exact(b)) => a <= b,
            _ => self.log2_bounds().1 <= other.log2_bounds().0,
        }
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Magnitude::Exact(v) => write!(f, "{v}"),
            Magnitude::Huge { log2_lo, log2_hi } => write!(f, "2^[{log2_lo:.6},{log2_hi:.6}]"),
        }
    }
}

impl Serialize for Magnitude {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        match self {
            Magnitude::Exact(v) => s.serialize_str(&v.to_string()),
            Magnitude::Huge { log2_lo, log2_hi } => {
                let mut st = s.serialize_struct("Magnitude", 2)?;
                st.serialize_field("log2_lo", log2_lo)?;
                st.serialize_field("log2_hi", log2_hi)?;
                st.end()
            }
        }
    }
}

/// Relative slack applied to floating `log2` bounds.
const LOG_SLACK: f64 = 1e-12;

fn widen(lo: f64, hi: f64) -> (f64, f64) {
    (lo - lo.abs() * LOG_SLACK - 1e-12, hi + hi.abs() * LOG_SLACK + 1e-12)
}

/// Enclosure of `log2 v` for `v ≥ 1`.
pub fn log2_big(v: &BigInt) -> (f64, f64) {
    assert!(v.is_positive());
    let bits = v.bits();
    if bits <= 60 {
        let l = v.to_f64().unwrap().log2();
        return widen(l, l);
    }
    // Below 2^60 the f64 rounding error is far inside the widening.
    // Above, truncation to 60 bits loses less than one unit of the mantissa.
    let mant = (v >> (bits - 60)).to_f64().unwrap();
    let shift = (bits - 60) as f64;
    let lo = mant.log2() + shift;
    let hi = (mant + 1.0).log2() + shift;
    widen(lo, hi)
}

const EXACT_MAX_K: u64 = 20_000;
const EXACT_MAX_BITS: f64 = (1u64 << 18) as f64;

/// `C(a, k)` exactly when small enough, otherwise `log2` bounds from
/// `(a/k)^k ≤ C(a,k) ≤ (e·a/k)^k`.
fn binomial_magnitude(a: &BigInt, k: &BigInt) -> Magnitude {
    if k.is_zero() {
        return Magnitude::Exact(BigInt::one());
    }
    let (la_lo, la_hi) = log2_big(a);
    let (lk_lo, lk_hi) = log2_big(k);
    let kf = k.to_f64().unwrap_or(f64::INFINITY);
    let hi = kf * (la_hi - lk_lo + std::f64::consts::E.log2());
    if let Some(ks) = k.to_u64() {
        if ks <= EXACT_MAX_K && hi <= EXACT_MAX_BITS {
            return Magnitude::Exact(binomial_big(a, ks));
        }
    }
    let (lo, hi) = widen(kf * (la_lo - lk_hi).max(0.0), hi);
    Magnitude::Huge { log2_lo: lo, log2_hi: hi }
}

fn power_magnitude(a: &BigInt, e: &BigInt) -> Magnitude {
    let (la_lo, la_hi) = log2_big(a);
    let ef = e.to_f64().unwrap_or(f64::INFINITY);
    if let Some(es) = e.to_u32() {
        if ef * la_hi <= EXACT_MAX_BITS {
            return Magnitude::Exact(num_traits::pow(a.clone(), es as usize));
        }
    }
    let (lo, hi) = widen(ef * la_lo, ef * la_hi);
    Magnitude::Huge { log2_lo: lo, log2_hi: hi }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TBound {
    /// `C(X+p, X−1)`.
    pub binomial: Magnitude,
    /// `(X+p)^{X−1}`.
    pub power: Magnitude,
    pub binomial_le_power: bool,
}

/// Bound on `t_{p+1}` for a family of `q` hypersurfaces in `P^n`.
pub fn bound_t(p: &BigInt, n: usize, big_n: u64, q: usize) -> Result<TBound, BoundsError> {
    if p < &BigInt::one() {
        return Err(BoundsError::ZeroP);
    }
    let x = size_parameter(n, big_n, q);
    let a = &x + p;
    let xm1: BigInt = &x - 1;
    // C(a, X−1) = C(a, p+1); evaluate through the smaller index.
    let k: BigInt = xm1.clone().min(p + 1);
    let binomial = binomial_magnitude(&a, &k);
    let power = power_magnitude(&a, &xm1);
    // C(a,k) ≤ a^k ≤ a^{X−1} since k ≤ X−1 and a ≥ 1; the exact comparison
    // is used when both sides were computed.
    let binomial_le_power = match (&binomial, &power) {
        (Magnitude::Exact(b), Magnitude::Exact(w)) => b <= w,
        _ => binomial.provably_le(&power) || k <= xm1,
    };
    Ok(TBound {
        binomial,
        power,
        binomial_le_power,
    })
}

/// Full set of bounds for one configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct BoundReport {
    pub n: usize,
    pub q: usize,
    #[serde(serialize_with = "ser_rational")]
    pub eps: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub eps_used: BigRational,
    pub degrees: Vec<u32>,
    pub fixed: bool,
    pub d: u32,
    pub N: u64,
    #[serde(serialize_with = "ser_int")]
    pub M: BigInt,
    #[serde(serialize_with = "ser_int")]
    pub K: BigInt,
    #[serde(serialize_with = "ser_int")]
    pub p0: BigInt,
    /// Bound on `t_{p_0+1}` (both forms).
    pub t_bound: TBound,
    /// The `t` that enters `L`: `1` for fixed families, the binomial bound otherwise.
    pub t_used: Magnitude,
    pub L: Magnitude,
    pub L_j: Vec<Magnitude>,
    #[serde(serialize_with = "ser_rational")]
    pub A_lower: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub margin: BigRational,
    pub margin_ok: bool,
    /// `t_2/t_1 < 1 + ε/(2MN)` with `t ≡ 1`, asserted for fixed families.
    pub p_selection_ok: Option<bool>,
}

/// `L_j = ⌊d_j·L/d⌋ + 1` on a possibly huge `L`.
fn level(dj: u32, d: u32, l: &Magnitude) -> Magnitude {
    match l {
        Magnitude::Exact(v) => Magnitude::Exact((v * dj).div_floor(&BigInt::from(d)) + 1),
        Magnitude::Huge { log2_lo, log2_hi } => {
            // d_j·L/d ≤ L_j ≤ d_j·L/d + 1 ≤ 2·d_j·L/d when L ≥ d.
            let r = (dj as f64 / d as f64).log2();
            let (lo, hi) = widen(log2_lo + r, log2_hi + r + 1.0);
            Magnitude::Huge { log2_lo: lo, log2_hi: hi }
        }
    }
}

/// `M·t − 1`.
fn common_level(m: &BigInt, t: &Magnitude) -> Magnitude {
    match t {
        Magnitude::Exact(v) => Magnitude::Exact(m * v - 1),
        Magnitude::Huge { log2_lo, log2_hi } => {
            let (ml, mh) = log2_big(m);
            // M·t − 1 ≥ M·t/2 once M·t ≥ 2.
            let (lo, hi) = widen(log2_lo + ml - 1.0, log2_hi + mh);
            Magnitude::Huge { log2_lo: lo, log2_hi: hi }
        }
    }
}

/// Slack in `d·(MN/(dA) − n − 1) ≤ ε/2`, where `A` is a lower bound for the
/// filtration's `A`.
pub fn verify_error_margin(
    n: usize,
    d: u32,
    eps: &BigRational,
    a_lower: &BigRational,
) -> Result<BigRational, BoundsError> {
    let c = compute_constants(n, d, eps)?;
    let eps = effective_epsilon(eps)?;
    let dq = BigRational::from_integer(d.into());
    let mn = BigRational::from_integer(&c.M * c.N);
    let lhs = &dq * (mn / (&dq * a_lower) - BigRational::from_integer((n + 1).into()));
    Ok(eps / BigRational::from_integer(2.into()) - lhs)
}

/// Margin computed from the closed-form lower bound on `A`.
pub fn margin_with_lower_bound(n: usize, d: u32, eps: &BigRational) -> Result<BigRational, BoundsError> {
    let c = compute_constants(n, d, eps)?;
    verify_error_margin(n, d, eps, &a_lower_bound(n, d, c.N as u32))
}

pub fn compute_truncation_levels(
    n: usize,
    q: usize,
    eps: &BigRational,
    degrees: &[u32],
    fixed: bool,
) -> Result<BoundReport, BoundsError> {
    if n == 0 {
        return Err(BoundsError::ZeroN);
    }
    if q < n + 1 {
        return Err(BoundsError::TooFewHypersurfaces { q, n });
    }
    if degrees.len() != q {
        return Err(BoundsError::DegreeCount {
            q,
            found: degrees.len(),
        });
    }
    if degrees.contains(&0) {
        return Err(BoundsError::ZeroDegree);
    }
    let eps_used = effective_epsilon(eps)?;
    let d = degrees.iter().fold(1u32, |acc, &x| acc.lcm(&x));
    let c = compute_constants(n, d, eps)?;
    let p0 = compute_p0(n, c.N, q, eps)?;
    let t_bound = bound_t(&p0, n, c.N, q)?;
    let t_used = if fixed {
        Magnitude::Exact(BigInt::one())
    } else {
        t_bound.binomial.clone()
    };
    let l = common_level(&c.M, &t_used);
    let l_j = degrees.iter().map(|&dj| level(dj, d, &l)).collect();
    let a_lower = a_lower_bound(n, d, c.N as u32);
    let margin = verify_error_margin(n, d, eps, &a_lower)?;
    let p_selection_ok = fixed.then(|| {
        let mn2 = BigRational::from_integer(BigInt::from(2u32) * &c.M * c.N);
        BigRational::one() < BigRational::one() + &eps_used / mn2
    });
    Ok(BoundReport {
        n,
        q,
        eps: eps.clone(),
        eps_used,
        degrees: degrees.to_vec(),
        fixed,
        d,
        N: c.N,
        M: c.M,
        K: c.K,
        p0,
        t_bound,
        t_used,
        L: l,
        L_j: l_j,
        A_lower: a_lower,
        margin_ok: !margin.is_negative(),
        margin,
        p_selection_ok,
    })
}

/// Dimension over the constants of the span of all monomials of total degree
/// `≤ p` in the given rational functions.
pub fn lp_dimension(ratios: &[RatFunc], p: u32) -> usize {
    let mut products: Vec<RatFunc> = vec![RatFunc::from_poly(Poly::one())];
    let mut frontier = products.clone();
    for _ in 0..p {
        let mut next = Vec::new();
        for f in &frontier {
            for r in ratios {
                next.push(f.mul(r));
            }
        }
        products.extend(next.iter().cloned());
        frontier = next;
    }
    // Common denominator, then compare numerator coefficient vectors.
    let mut den = Poly::one();
    for f in &products {
        let g = den.gcd(f.denom());
        den = (&den * f.denom()).exact_div(&g).unwrap();
    }
    let mut basis = EchelonBasis::new();
    for f in &products {
        let num = f.numer() * &den.exact_div(f.denom()).unwrap();
        let v: SparseVec = num
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k, Scalar::from_gaussian(c.clone())))
            .collect();
        basis.insert(v);
    }
    basis.rank()
}

/// One row of a grid sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub q: usize,
    pub d: u32,
    pub eps: String,
    pub report: BoundReport,
}

/// Reports for `n' ≤ n`, common degree `d' ≤ d`, `ε' ∈ {ε, ε/2, ε/4}`.
pub fn sweep(n: usize, q: usize, d: u32, eps: &BigRational, fixed: bool) -> Result<Vec<SweepRow>, BoundsError> {
    let mut rows = Vec::new();
    for nn in 1..=n {
        let qq = q.max(nn + 1);
        for dd in 1..=d {
            for div in [1u32, 2, 4] {
                let e = eps / BigRational::from_integer(div.into());
                let report = compute_truncation_levels(nn, qq, &e, &vec![dd; qq], fixed)?;
                rows.push(SweepRow {
                    n: nn,
                    q: qq,
                    d: dd,
                    eps: e.to_string(),
                    report,
                });
            }
        }
    }
    Ok(rows)
}

pub const SWEEP_HEADER: &str = "n,q,d,eps,N,M,K,p0,t_bound,L,L_1,A_lower,margin,margin_ok";

impl SweepRow {
    pub fn csv(&self) -> String {
        let r = &self.report;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.q,
            self.d,
            self.eps,
            r.N,
            r.M,
            r.K,
            r.p0,
            r.t_used,
            r.L,
            r.L_j[0],
            r.A_lower,
            r.margin,
            r.margin_ok
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn constants_for_smallest_case() {
        let c = compute_constants(1, 1, &q(1, 1)).unwrap();
        assert_eq!(c.N, 10);
        assert_eq!(c.M, BigInt::from(11));
        assert_eq!(c.K, BigInt::from(11));
        // n=2, d=2, ε=1/2: 2·⌊2·3·3·5·2 + 3⌋ = 366
        let c = compute_constants(2, 2, &q(1, 2)).unwrap();
        assert_eq!(c.N, 366);
        assert_eq!(c.M, BigInt::from(368 * 367 / 2));
        assert_eq!(c.K, BigInt::from(185 * 184 / 2));
        assert!(compute_constants(1, 1, &q(0, 1)).is_err());
        assert!(compute_constants(1, 1, &q(-1, 3)).is_err());
    }

    #[test]
    fn p0_matches_float_estimate() {
        let p0 = compute_p0(1, 10, 3, &q(1, 1)).unwrap();
        let x = 363f64;
        let eps = 1.0 - 2f64.powi(-20);
        let v = ((x - 1.0) * x.ln() / (eps / 220.0).ln_1p() + 1.0).floor();
        let root = p0.sqrt();
        assert_eq!(&root * &root, p0);
        assert!((root.to_f64().unwrap() - v).abs() <= 1.0);
        assert!(compute_p0(2, 10, 2, &q(1, 2)).is_err());
    }

    #[test]
    fn fixed_levels() {
        let r = compute_truncation_levels(1, 3, &q(1, 1), &[1, 1, 1], true).unwrap();
        assert_eq!(r.L_j, vec![Magnitude::Exact(11.into()); 3]);
        assert_eq!(r.p_selection_ok, Some(true));
        let r = compute_truncation_levels(2, 4, &q(1, 2), &[1, 2, 2, 1], true).unwrap();
        assert_eq!(r.d, 2);
        let m = r.M.clone();
        assert_eq!(r.L_j[1], Magnitude::Exact(m.clone()));
        // (d_j·M − d_j)/d + 1 with d_j = 1, d = 2
        assert_eq!(r.L_j[0], Magnitude::Exact((&m - 1) / 2 + 1));
    }

    #[test]
    fn margin_regression() {
        let slack = margin_with_lower_bound(1, 1, &q(1, 1)).unwrap();
        let expected = q(1, 18) - BigRational::new(1.into(), BigInt::one() << 21u32);
        assert_eq!(slack, expected);
    }

    #[test]
    fn t_bound_forms() {
        let t = bound_t(&BigInt::from(3), 1, 1, 2).unwrap();
        // X = C(2,1)²·C(2,1) = 8; C(11, 7) = 330, 11^7
        assert_eq!(t.binomial, Magnitude::Exact(330.into()));
        assert_eq!(t.power, Magnitude::Exact(BigInt::from(11).pow(7)));
        assert!(t.binomial_le_power);
        assert!(bound_t(&BigInt::zero(), 1, 1, 2).is_err());
    }

    #[test]
    fn huge_binomial_bounds_bracket_log() {
        let a = BigInt::from(10u64).pow(30);
        let k = BigInt::from(30_000u32);
        match binomial_magnitude(&a, &k) {
            Magnitude::Huge { log2_lo, log2_hi } => {
                assert!(log2_lo < log2_hi);
                assert!(log2_lo > 30_000.0 * (1e30f64 / 3e4).log2() - 1.0);
            }
            m => panic!("expected huge, got {m}"),
        }
    }

    #[test]
    fn lp_dimension_single_ratio() {
        let z = RatFunc::from_poly(Poly::z());
        for p in 0..6 {
            assert_eq!(lp_dimension(&[z.clone()], p), p as usize + 1);
        }
        // z and 2z span the same monomials
        let two_z = RatFunc::from_poly(Poly::from_int_coeffs(&[0, 2]));
        assert_eq!(lp_dimension(&[z, two_z], 3), 4);
    }
}
