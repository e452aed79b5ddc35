//! Modular gcd over the Gaussian rationals.
//!
//! Each prime `p ≡ 1 (mod 4)` has a square root `s` of `−1`, so `ℚ(i)` maps
//! to `𝔽_p` in two ways (`i ↦ s` and `i ↦ −s`). The two images of a monic
//! gcd determine real and imaginary parts mod `p`; these are lifted by CRT and
//! rational reconstruction and checked by trial division.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::gaussian::Gaussian;
use super::upoly::Poly;

const MAX_PRIMES: usize = 400;

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller–Rabin for 64-bit inputs.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'base: for &b in &BASES {
        let mut x = pow_mod(b, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

/// Primes `≡ 1 (mod 4)` below `2^62`, in decreasing order.
struct Primes {
    next: u64,
}

impl Primes {
    fn new() -> Self {
        let top = 1u64 << 62;
        Primes { next: top - (top % 4) + 1 - 4 }
    }
}

impl Iterator for Primes {
    type Item = u64;
    fn next(&mut self) -> Option<u64> {
        loop {
            let c = self.next;
            self.next -= 4;
            if is_prime(c) {
                return Some(c);
            }
        }
    }
}

fn sqrt_minus_one(p: u64) -> u64 {
    (2..)
        .map(|c| pow_mod(c, (p - 1) / 4, p))
        .find(|&s| mul_mod(s, s, p) == p - 1)
        .unwrap()
}

fn int_mod(v: &BigInt, p: u64) -> u64 {
    let r = v.mod_floor(&BigInt::from(p));
    r.to_u64().unwrap()
}

fn rational_mod(q: &BigRational, p: u64) -> Option<u64> {
    let den = int_mod(q.denom(), p);
    if den == 0 {
        return None;
    }
    Some(mul_mod(int_mod(q.numer(), p), inv_mod(den, p), p))
}

/// Image of `a` under `i ↦ s`, or `None` if a denominator vanishes mod `p`.
fn image(a: &Poly, s: u64, p: u64) -> Option<Vec<u64>> {
    a.coeffs()
        .iter()
        .map(|c| {
            let re = rational_mod(&c.re, p)?;
            let im = rational_mod(&c.im, p)?;
            Some((re + mul_mod(im, s, p)) % p)
        })
        .collect()
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Remainder of `a` by `b` (nonzero, trimmed) over `𝔽_p`.
fn rem_mod(mut a: Vec<u64>, b: &[u64], p: u64) -> Vec<u64> {
    let db = b.len() - 1;
    let inv = inv_mod(b[db], p);
    while a.len() > db {
        let k = a.len() - 1 - db;
        let c = mul_mod(*a.last().unwrap(), inv, p);
        if c != 0 {
            for (j, &bj) in b.iter().enumerate() {
                a[k + j] = (a[k + j] + p - mul_mod(c, bj, p)) % p;
            }
        }
        a.pop();
        trim(&mut a);
    }
    a
}

fn monic_gcd_mod(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem_mod(a, &b, p);
        a = b;
        b = r;
    }
    let inv = inv_mod(*a.last().unwrap(), p);
    a.iter().map(|&c| mul_mod(c, inv, p)).collect()
}

/// `r/s ≡ x (mod m)` with `|r|, s ≤ √(m/2)`.
fn reconstruct(x: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / 2u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), x.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    if t1.sign() == Sign::Minus {
        r1 = -r1;
        t1 = -t1;
    }
    Some(BigRational::new(r1, t1))
}

fn crt(acc: &mut BigInt, m: &BigInt, v: u64, p: u64) {
    let cur = int_mod(acc, p);
    let diff = (v + p - cur) % p;
    let k = mul_mod(diff, inv_mod(int_mod(m, p), p), p);
    *acc += m * BigInt::from(k);
}

/// Monic gcd of two nonzero polynomials, or `None` if the prime budget runs
/// out (the caller then falls back to Euclid).
pub fn modular_gcd(a: &Poly, b: &Poly) -> Option<Poly> {
    let mut deg: Option<usize> = None;
    let mut re: Vec<BigInt> = Vec::new();
    let mut im: Vec<BigInt> = Vec::new();
    let mut modulus = BigInt::one();
    let mut last: Option<Poly> = None;
    let half = |p: u64| inv_mod(2, p);
    for p in Primes::new().take(MAX_PRIMES) {
        let s = sqrt_minus_one(p);
        let (Some(a1), Some(b1), Some(a2), Some(b2)) = (
            image(a, s, p),
            image(b, s, p),
            image(a, p - s, p),
            image(b, p - s, p),
        ) else {
            continue;
        };
        // leading coefficients must survive the reduction
        if [&a1, &b1, &a2, &b2].iter().any(|v| *v.last().unwrap() == 0) {
            continue;
        }
        let g1 = monic_gcd_mod(a1, b1, p);
        let g2 = monic_gcd_mod(a2, b2, p);
        if g1.len() != g2.len() {
            continue;
        }
        let dp = g1.len() - 1;
        if dp == 0 {
            return Some(Poly::one());
        }
        match deg {
            Some(d) if dp > d => continue,
            Some(d) if dp == d => {}
            _ => {
                deg = Some(dp);
                re = vec![BigInt::zero(); dp];
                im = vec![BigInt::zero(); dp];
                modulus = BigInt::one();
                last = None;
            }
        }
        let (h, hs) = (half(p), inv_mod(mul_mod(2, s, p), p));
        for k in 0..dp {
            let x = mul_mod((g1[k] + g2[k]) % p, h, p);
            let y = mul_mod((g1[k] + p - g2[k]) % p, hs, p);
            crt(&mut re[k], &modulus, x, p);
            crt(&mut im[k], &modulus, y, p);
        }
        modulus *= BigInt::from(p);
        let coeffs: Option<Vec<Gaussian>> = (0..dp)
            .map(|k| Some(Gaussian::new(reconstruct(&re[k], &modulus)?, reconstruct(&im[k], &modulus)?)))
            .collect();
        let Some(mut coeffs) = coeffs else { continue };
        coeffs.push(Gaussian::one());
        let g = Poly::from_coeffs(coeffs);
        if last.as_ref() == Some(&g) && a.div_rem(&g).1.is_zero() && b.div_rem(&g).1.is_zero() {
            return Some(g);
        }
        last = Some(g);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roots(rs: &[(i64, i64, i64)]) -> Poly {
        rs.iter().fold(Poly::one(), |acc, &(a, b, q)| {
            let r = Gaussian::new(BigRational::new(a.into(), q.into()), BigRational::new(b.into(), q.into()));
            &acc * &Poly::linear_root(&r)
        })
    }

    #[test]
    fn primes_are_one_mod_four() {
        for p in Primes::new().take(5) {
            assert_eq!(p % 4, 1);
            let s = sqrt_minus_one(p);
            assert_eq!(mul_mod(s, s, p), p - 1);
        }
    }

    #[test]
    fn matches_euclid() {
        let common = roots(&[(1, 2, 3), (-5, 1, 2), (7, 0, 1)]);
        let a = &common * &roots(&[(2, -3, 5), (0, 1, 1)]);
        let b = &common.scale(&Gaussian::from_ints(3, 4)) * &roots(&[(9, 9, 7)]);
        let g = modular_gcd(&a, &b).unwrap();
        assert_eq!(g, common.monic());
        assert_eq!(modular_gcd(&roots(&[(1, 0, 1)]), &roots(&[(2, 0, 1)])), Some(Poly::one()));
    }

    #[test]
    fn reconstruction() {
        let m = BigInt::from(1_000_003u64) * BigInt::from(998_244_353u64);
        let q = BigRational::new((-37).into(), 91.into());
        let x = (q.numer() * q.denom().modinv(&m).unwrap()).mod_floor(&m);
        assert_eq!(reconstruct(&x, &m), Some(q));
    }
}
