//! Truncated counting functions and the Jensen identity.

use num_complex::Complex64;
use serde::Serialize;

use super::exppoly::MeroFn;
use super::quadrature::{circle_mean, tolerance};
use super::zeros::{mero_divisors, Divisor};
use super::NevanlinnaError;

/// `Σ min(ν_a, L)·log(r / max(|a|, 1))` over zeros with `|a| ≤ r`;
/// `level = None` means no truncation.
pub fn counting_function(div: &Divisor, r: f64, level: Option<u64>) -> Result<f64, NevanlinnaError> {
    if r > div.radius * (1.0 + 1e-12) {
        return Err(NevanlinnaError::DivisorRadius {
            have: div.radius,
            need: r,
        });
    }
    let mut total = 0.0;
    for p in &div.points {
        let a = p.at.norm();
        if a > r {
            continue;
        }
        let m = match level {
            Some(l) => (p.multiplicity as u64).min(l),
            None => p.multiplicity as u64,
        };
        total += m as f64 * (r / a.max(1.0)).ln();
    }
    Ok(total)
}

#[derive(Clone, Debug, Serialize)]
pub struct JensenReport {
    pub r: f64,
    /// `N_φ(r) − N_{1/φ}(r)`.
    pub counting_side: f64,
    /// Circle mean of `log|φ|` at `r` minus the same at `1`.
    pub integral_side: f64,
    pub residual: f64,
    pub quadrature_error: f64,
    pub zeros: Divisor,
    pub poles: Divisor,
}

/// Both sides of Jensen's formula for `φ` at radius `r ≥ 1`.
pub fn jensen_check(phi: &MeroFn, r: f64) -> Result<JensenReport, NevanlinnaError> {
    if phi.is_zero() {
        return Err(NevanlinnaError::IdenticallyZero);
    }
    if !(r >= 1.0) {
        return Err(NevanlinnaError::BadRadius(r));
    }
    let (zeros, poles) = mero_divisors(phi, r)?;
    let counting_side = counting_function(&zeros, r, None)? - counting_function(&poles, r, None)?;
    let tol = tolerance();
    let g = |z: Complex64| phi.log_abs(z);
    let outer = circle_mean(g, r, tol);
    let inner = circle_mean(g, 1.0, tol);
    for q in [&outer, &inner] {
        if !q.converged {
            return Err(NevanlinnaError::Quadrature { achieved: q.error });
        }
    }
    let integral_side = outer.value - inner.value;
    Ok(JensenReport {
        r,
        counting_side,
        integral_side,
        residual: (counting_side - integral_side).abs(),
        quadrature_error: outer.error + inner.error,
        zeros,
        poles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Gaussian, Poly};
    use crate::nevanlinna::exppoly::ExpPoly;
    use crate::nevanlinna::zeros::zeros_in_disk;

    #[test]
    fn closed_forms() {
        let cube = zeros_in_disk(&ExpPoly::from_poly(Poly::from_int_coeffs(&[0, 0, 0, 1])), 10.0).unwrap();
        let r = 7.5f64;
        assert!((counting_function(&cube, r, Some(2)).unwrap() - 2.0 * r.ln()).abs() < 1e-12);
        assert!((counting_function(&cube, r, None).unwrap() - 3.0 * r.ln()).abs() < 1e-12);
        let sq = zeros_in_disk(&ExpPoly::from_poly(Poly::from_int_coeffs(&[-1, 0, 1])), 3.0).unwrap();
        let e = std::f64::consts::E;
        assert!((counting_function(&sq, e, None).unwrap() - 2.0).abs() < 1e-12);
        assert!(counting_function(&sq, 4.0, None).is_err());
    }

    #[test]
    fn jensen_examples() {
        let z = MeroFn::from_exppoly(ExpPoly::z());
        assert!(jensen_check(&z, 3.0).unwrap().residual < 1e-9);
        let phi = MeroFn::new(
            ExpPoly::from_poly(Poly::from_int_coeffs(&[-2, 1])),
            Poly::from_int_coeffs(&[3, 1]),
        );
        for r in [2.5, 5.0, 10.0] {
            assert!(jensen_check(&phi, r).unwrap().residual < 1e-6);
        }
        let ez = MeroFn::from_exppoly(ExpPoly::exp(Gaussian::one()));
        let rep = jensen_check(&ez, 6.0).unwrap();
        assert_eq!(rep.counting_side, 0.0);
        assert!(rep.residual < 1e-8);
    }
}
