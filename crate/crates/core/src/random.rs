//! Seeded generators for random scalars, forms and families.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

use crate::algebra::{
    enumerate_monomials, ExponentTuple, Gaussian, HomPoly, Poly, RatFunc, Scalar, Variant,
};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_int(rng: &mut Rng64, bound: i64) -> i64 {
    rng.gen_range(-bound..=bound)
}

pub fn rational(rng: &mut Rng64) -> Scalar {
    let q = rng.gen_range(1..=4);
    Scalar::from_ratio(small_int(rng, 6), q)
}

pub fn gaussian(rng: &mut Rng64) -> Gaussian {
    let a = rational(rng).to_gaussian().unwrap();
    let b = rational(rng).to_gaussian().unwrap();
    &a + &(&b * &Gaussian::i())
}

/// Polynomial in `z` of degree at most `deg` with small Gaussian integer
/// coefficients.
pub fn poly(rng: &mut Rng64, deg: usize) -> Poly {
    Poly::from_coeffs(
        (0..=deg)
            .map(|_| Gaussian::from_ints(small_int(rng, 3), small_int(rng, 1)))
            .collect(),
    )
}

fn nonzero_poly(rng: &mut Rng64, deg: usize) -> Poly {
    loop {
        let p = poly(rng, deg);
        if !p.is_zero() {
            return p;
        }
    }
}

/// A random scalar at the requested level of the tower (it may demote when
/// the draw happens to be simpler).
pub fn scalar(rng: &mut Rng64, v: Variant) -> Scalar {
    match v {
        Variant::Rational => rational(rng),
        Variant::GaussianRational => Scalar::from_gaussian(gaussian(rng)),
        Variant::RationalFunction => {
            let deg_n = rng.gen_range(0..=2);
            let deg_d = rng.gen_range(0..=2);
            Scalar::from_ratfunc(RatFunc::new(poly(rng, deg_n), nonzero_poly(rng, deg_d)))
        }
    }
}

pub fn nonzero_scalar(rng: &mut Rng64, v: Variant) -> Scalar {
    loop {
        let s = scalar(rng, v);
        if !s.is_zero() {
            return s;
        }
    }
}

/// Random form of degree `d` in `n+1` variables with integer coefficients in
/// `[-bound, bound]`; every monomial is present with probability `density`.
pub fn integer_form(rng: &mut Rng64, n: usize, d: u32, bound: i64, density: f64) -> HomPoly {
    loop {
        let mut terms: Vec<(ExponentTuple, Scalar)> = Vec::new();
        for e in enumerate_monomials(n, d) {
            if rng.gen_bool(density) {
                terms.push((e, Scalar::from_int(small_int(rng, bound))));
            }
        }
        let p = HomPoly::from_terms(n + 1, d, terms).unwrap();
        if !p.is_zero() {
            return p;
        }
    }
}

/// Random form whose coefficients are drawn at level `v`.
pub fn form(rng: &mut Rng64, n: usize, d: u32, v: Variant, density: f64) -> HomPoly {
    loop {
        let mut terms: Vec<(ExponentTuple, Scalar)> = Vec::new();
        for e in enumerate_monomials(n, d) {
            if rng.gen_bool(density) {
                terms.push((e, scalar(rng, v)));
            }
        }
        let p = HomPoly::from_terms(n + 1, d, terms).unwrap();
        if !p.is_zero() {
            return p;
        }
    }
}

/// Integer form plus a moving perturbation `z·x_k^d` or `1/(z+c)·x^e` on one
/// monomial, so the coefficients genuinely depend on the parameter.
pub fn moving_form(rng: &mut Rng64, n: usize, d: u32) -> HomPoly {
    let base = integer_form(rng, n, d, 3, 0.8);
    let monos = enumerate_monomials(n, d);
    let e = monos[rng.gen_range(0..monos.len())].clone();
    let c = if rng.gen_bool(0.5) {
        Scalar::z()
    } else {
        let shift = rng.gen_range(2..=9);
        Scalar::from_int(1) / (&Scalar::z() + &Scalar::from_int(shift))
    };
    base.add(&HomPoly::monomial(e, c)).unwrap()
}
