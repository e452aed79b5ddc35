//! Validated natural logarithms on rationals.
//!
//! Values are carried as closed intervals with dyadic endpoints. The series
//! `atanh(u) = Σ u^{2j+1}/(2j+1)` is summed in fixed point with floor/ceil
//! rounding on the two ends, plus a geometric tail bound.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Interval {
    pub fn point(x: BigRational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    /// Product by an exact rational.
    pub fn scale(&self, c: &BigRational) -> Interval {
        if c.is_negative() {
            Interval {
                lo: &self.hi * c,
                hi: &self.lo * c,
            }
        } else {
            Interval {
                lo: &self.lo * c,
                hi: &self.hi * c,
            }
        }
    }

    /// Quotient of two intervals with strictly positive lower ends.
    pub fn div_positive(&self, o: &Interval) -> Interval {
        assert!(self.lo.is_positive() && o.lo.is_positive());
        Interval {
            lo: &self.lo / &o.hi,
            hi: &self.hi / &o.lo,
        }
    }

    pub fn floor_lo(&self) -> BigInt {
        self.lo.floor().to_integer()
    }

    pub fn floor_hi(&self) -> BigInt {
        self.hi.floor().to_integer()
    }
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

/// `atanh(u)` for `0 ≤ u ≤ 1/2`, to absolute accuracy about `2^-prec`.
fn atanh(u: &BigRational, prec: u32) -> Interval {
    assert!(!u.is_negative() && u <= &BigRational::new(1.into(), 2.into()));
    let scale = BigInt::one() << prec;
    let a = u.numer();
    let b = u.denom();
    let a2 = a * a;
    let b2 = b * b;
    let mut pw_lo = (a * &scale).div_floor(b);
    let mut pw_hi = ceil_div(&(a * &scale), b);
    let mut sum_lo = BigInt::zero();
    let mut sum_hi = BigInt::zero();
    let mut j: u64 = 0;
    while pw_hi > BigInt::one() {
        let k = BigInt::from(2 * j + 1);
        sum_lo += pw_lo.div_floor(&k);
        sum_hi += ceil_div(&pw_hi, &k);
        pw_lo = (&pw_lo * &a2).div_floor(&b2);
        pw_hi = ceil_div(&(&pw_hi * &a2), &b2);
        j += 1;
    }
    // Remaining terms are at most pw_hi·(1 + u² + u⁴ + …) ≤ 2·pw_hi since u² ≤ 1/4.
    sum_hi += pw_hi * 2;
    Interval {
        lo: BigRational::new(sum_lo, scale.clone()),
        hi: BigRational::new(sum_hi, scale),
    }
}

/// `ln 2 = 2·atanh(1/3)`.
pub fn ln2(prec: u32) -> Interval {
    atanh(&BigRational::new(1.into(), 3.into()), prec + 1).scale(&BigRational::from_integer(2.into()))
}

/// Enclosure of `ln x` for rational `x > 0`.
pub fn ln(x: &BigRational, prec: u32) -> Interval {
    assert!(x.is_positive(), "logarithm of a non-positive number");
    // x = 2^k·y with 1 ≤ y < 2
    let mut k = x.numer().bits() as i64 - x.denom().bits() as i64;
    let pow2 = |e: i64| -> BigRational {
        if e >= 0 {
            BigRational::from_integer(BigInt::one() << e as u64)
        } else {
            BigRational::new(BigInt::one(), BigInt::one() << (-e) as u64)
        }
    };
    let mut y = x / pow2(k);
    let one = BigRational::one();
    let two = BigRational::from_integer(2.into());
    while y < one {
        y *= &two;
        k -= 1;
    }
    while y >= two {
        y /= &two;
        k += 1;
    }
    let u = (&y - &one) / (&y + &one);
    let guard = 8 + (64 - k.unsigned_abs().leading_zeros());
    let ln_y = atanh(&u, prec + guard).scale(&two);
    if k == 0 {
        return ln_y;
    }
    ln_y.add(&ln2(prec + guard).scale(&BigRational::from_integer(k.into())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn encloses_float_values() {
        for (a, b) in [(2, 1), (3, 1), (1, 3), (10, 7), (1_000_000, 1), (1, 1024), (12345, 17)] {
            let x = q(a, b);
            let iv = ln(&x, 80);
            let f = (a as f64 / b as f64).ln();
            assert!(iv.lo.to_f64().unwrap() <= f + 1e-15, "{a}/{b}");
            assert!(iv.hi.to_f64().unwrap() >= f - 1e-15, "{a}/{b}");
            assert!(iv.width() < q(1, 1 << 60));
        }
    }

    #[test]
    fn ln_one_is_zero_and_tiny_arguments_resolve() {
        let iv = ln(&BigRational::one(), 64);
        assert!(iv.contains(&BigRational::zero()));
        // ln(1 + 1e-12) ≈ 1e-12 needs relative resolution, hence the extra bits.
        let x = BigRational::one() + q(1, 1_000_000_000_000);
        let iv = ln(&x, 120);
        let lo = iv.lo.to_f64().unwrap();
        let hi = iv.hi.to_f64().unwrap();
        assert!((lo - 1e-12).abs() < 1e-24 && (hi - 1e-12).abs() < 1e-24);
    }

    #[test]
    fn ln2_digits() {
        let iv = ln2(200);
        let s = "0.693147180559945309417232121458176568075500134360255254120680009";
        let approx: f64 = s.parse().unwrap();
        assert!((iv.lo.to_f64().unwrap() - approx).abs() < 1e-15);
        assert!(iv.width() < q(1, 1) / BigRational::from_integer(BigInt::one() << 190u32));
    }
}
