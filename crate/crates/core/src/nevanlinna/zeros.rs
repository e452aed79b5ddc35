//! Zeros in a disk: algebraic for polynomials, argument principle otherwise.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::exppoly::{ExpPoly, MeroFn};
use super::NevanlinnaError;
use crate::algebra::Poly;

/// Relative band around the circle inside which a zero counts as lying on it.
pub const BOUNDARY_BAND: f64 = 1e-9;
/// Relative offset applied to the radius when a zero lies on the circle.
pub const BOUNDARY_NUDGE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DivisorPoint {
    #[serde(serialize_with = "ser_complex")]
    pub at: Complex64,
    pub multiplicity: u32,
}

pub(crate) fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

/// Zeros with multiplicities in the closed disk of radius `radius`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Divisor {
    pub points: Vec<DivisorPoint>,
    pub radius: f64,
    /// A zero sat on the circle and the radius was pushed outward.
    pub boundary_nudged: bool,
    /// Winding number of the full circle, when it was computed.
    pub winding: Option<i64>,
}

impl Divisor {
    pub fn empty(radius: f64) -> Self {
        Divisor {
            points: Vec::new(),
            radius,
            boundary_nudged: false,
            winding: None,
        }
    }

    pub fn degree(&self) -> u64 {
        self.points.iter().map(|p| p.multiplicity as u64).sum()
    }

    fn from_candidates(mut cands: Vec<DivisorPoint>, r: f64) -> Divisor {
        let band = BOUNDARY_BAND * r.max(1.0);
        let nudged = cands.iter().any(|p| (p.at.norm() - r).abs() <= band);
        cands.retain(|p| p.at.norm() <= r + band);
        cands.sort_by(|a, b| {
            (a.at.norm(), a.at.arg())
                .partial_cmp(&(b.at.norm(), b.at.arg()))
                .unwrap()
        });
        Divisor {
            points: cands,
            radius: if nudged { r * (1.0 + BOUNDARY_NUDGE) } else { r },
            boundary_nudged: nudged,
            winding: None,
        }
    }
}

/// Roots of a squarefree polynomial (Aberth iteration, Newton polish).
fn squarefree_roots(p: &Poly) -> Vec<Complex64> {
    let c = p.complex_coeffs();
    let deg = c.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    if deg == 1 {
        return vec![-c[0] / c[1]];
    }
    let lead = c[deg];
    let monic: Vec<Complex64> = c.iter().map(|x| x / lead).collect();
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut dv = Complex64::new(0.0, 0.0);
        for a in monic.iter().rev() {
            dv = dv * z + v;
            v = v * z + a;
        }
        (v, dv)
    };
    // Cauchy bound for the initial circle
    let bound = 1.0 + monic[..deg].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(0.5 * bound, 2.0 * PI * k as f64 / deg as f64 + 0.4))
        .collect();
    for _ in 0..1000 {
        let mut moved = 0.0f64;
        for k in 0..deg {
            let (v, dv) = eval(z[k]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dv;
            let s: Complex64 = (0..deg)
                .filter(|&j| j != k)
                .map(|j| Complex64::new(1.0, 0.0) / (z[k] - z[j]))
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[k] -= w;
                moved = moved.max(w.norm() / z[k].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    for zk in &mut z {
        for _ in 0..3 {
            let (v, dv) = eval(*zk);
            if dv.norm() > 0.0 {
                let step = v / dv;
                if step.is_finite() {
                    *zk -= step;
                }
            }
        }
    }
    z
}

/// Roots of a nonzero polynomial with exact multiplicities.
pub fn poly_roots(p: &Poly) -> Vec<DivisorPoint> {
    let mut out = Vec::new();
    for (k, f) in p.squarefree_decomposition() {
        for at in squarefree_roots(&f) {
            out.push(DivisorPoint { at, multiplicity: k });
        }
    }
    out
}

/// Zeros of an exponential polynomial in `|z| ≤ r`.
pub fn zeros_in_disk(f: &ExpPoly, r: f64) -> Result<Divisor, NevanlinnaError> {
    if f.is_zero() {
        return Err(NevanlinnaError::IdenticallyZero);
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(NevanlinnaError::BadRadius(r));
    }
    // p·e^{cz} vanishes exactly where p does
    if let [(_, p)] = f.terms() {
        return Ok(Divisor::from_candidates(poly_roots(p), r));
    }
    let search = ArgumentSearch::new(f);
    let cands = search.run(r)?;
    let mut div = Divisor::from_candidates(cands, r);
    let check_r = if div.boundary_nudged {
        r * (1.0 + 1e-6)
    } else {
        r
    };
    let w = search.circle_winding(check_r)?;
    let inside: i64 = search
        .points
        .borrow()
        .iter()
        .filter(|p| p.at.norm() < check_r)
        .map(|p| p.multiplicity as i64)
        .sum();
    if w != inside {
        return Err(NevanlinnaError::WindingMismatch {
            radius: r,
            winding: w,
            found: inside,
        });
    }
    div.winding = Some(w);
    Ok(div)
}

/// Zeros and poles of `num/den`, cancelling common points.
pub fn mero_divisors(phi: &MeroFn, r: f64) -> Result<(Divisor, Divisor), NevanlinnaError> {
    let zeros = zeros_in_disk(phi.numer(), r)?;
    let poles = Divisor::from_candidates(poly_roots(phi.denom()), r);
    let mut z_pts = zeros.points.clone();
    let mut p_pts = Vec::new();
    for pole in &poles.points {
        let tol = 1e-7 * pole.at.norm().max(1.0);
        let mut m = pole.multiplicity as i64;
        if let Some(zp) = z_pts.iter_mut().find(|zp| (zp.at - pole.at).norm() < tol) {
            let c = (zp.multiplicity as i64).min(m);
            zp.multiplicity -= c as u32;
            m -= c;
        }
        if m > 0 {
            p_pts.push(DivisorPoint {
                at: pole.at,
                multiplicity: m as u32,
            });
        }
    }
    z_pts.retain(|p| p.multiplicity > 0);
    let zd = Divisor {
        points: z_pts,
        ..zeros
    };
    let pd = Divisor {
        points: p_pts,
        ..poles
    };
    Ok((zd, pd))
}

/// Sampled value with a scale for judging "numerically zero".
struct Sample {
    w: Complex64,
    scale: f64,
}

struct ArgumentSearch<'a> {
    f: &'a ExpPoly,
    df: ExpPoly,
    rate: f64,
    points: std::cell::RefCell<Vec<DivisorPoint>>,
}

#[derive(Debug)]
struct OnContour;

const SPLITS: [f64; 4] = [0.5137, 0.4711, 0.5523, 0.4291];

impl<'a> ArgumentSearch<'a> {
    fn new(f: &'a ExpPoly) -> Self {
        ArgumentSearch {
            f,
            df: f.derivative(),
            rate: f.exponent_radius() + 1.0,
            points: Default::default(),
        }
    }

    fn sample(&self, z: Complex64) -> Sample {
        let (w, s) = self.f.eval_scaled(z);
        let scale: f64 = self
            .f
            .terms()
            .iter()
            .map(|(c, p)| {
                let mag: f64 = p
                    .complex_coeffs()
                    .iter()
                    .enumerate()
                    .map(|(k, a)| a.norm() * z.norm().powi(k as i32))
                    .sum();
                mag * ((c.to_complex() * z).re - s).exp()
            })
            .sum();
        Sample { w, scale }
    }

    /// Total change of `arg f` along `path(t)`, `t ∈ [t0, t1]`.
    fn path_arg(&self, path: &dyn Fn(f64) -> Complex64, t0: f64, t1: f64, length: f64) -> Result<f64, OnContour> {
        let n0 = 8 + (length * self.rate * 2.0).ceil() as usize;
        let mut total = 0.0;
        let mut prev_t = t0;
        let mut prev = self.sample(path(t0));
        if prev.w.norm() <= 1e-12 * prev.scale {
            return Err(OnContour);
        }
        for k in 1..=n0 {
            let t = t0 + (t1 - t0) * k as f64 / n0 as f64;
            let cur = self.sample(path(t));
            total += self.refine(path, prev_t, t, &prev, &cur, 0)?;
            prev_t = t;
            prev = cur;
        }
        Ok(total)
    }

    fn refine(
        &self,
        path: &dyn Fn(f64) -> Complex64,
        ta: f64,
        tb: f64,
        fa: &Sample,
        fb: &Sample,
        depth: u32,
    ) -> Result<f64, OnContour> {
        if fb.w.norm() <= 1e-12 * fb.scale {
            return Err(OnContour);
        }
        let d = (fb.w / fa.w).arg();
        let ratio = fb.w.norm() / fa.w.norm();
        if d.abs() <= PI / 4.0 && (0.25..=4.0).contains(&ratio) {
            return Ok(d);
        }
        if depth > 48 {
            return Err(OnContour);
        }
        let tm = 0.5 * (ta + tb);
        let fm = self.sample(path(tm));
        if fm.w.norm() <= 1e-12 * fm.scale {
            return Err(OnContour);
        }
        Ok(self.refine(path, ta, tm, fa, &fm, depth + 1)? + self.refine(path, tm, tb, &fm, fb, depth + 1)?)
    }

    fn box_count(&self, lo: Complex64, hi: Complex64) -> Result<i64, OnContour> {
        let corners = [
            lo,
            Complex64::new(hi.re, lo.im),
            hi,
            Complex64::new(lo.re, hi.im),
        ];
        let mut total = 0.0;
        for k in 0..4 {
            let a = corners[k];
            let b = corners[(k + 1) % 4];
            let path = move |t: f64| a + (b - a) * t;
            total += self.path_arg(&path, 0.0, 1.0, (b - a).norm())?;
        }
        let w = total / (2.0 * PI);
        let k = w.round();
        if (w - k).abs() > 0.05 {
            return Err(OnContour);
        }
        Ok(k as i64)
    }

    fn circle_winding(&self, r: f64) -> Result<i64, NevanlinnaError> {
        let path = move |t: f64| Complex64::from_polar(r, t);
        let total = self
            .path_arg(&path, 0.0, 2.0 * PI, 2.0 * PI * r)
            .map_err(|_| NevanlinnaError::ContourZero(r))?;
        Ok((total / (2.0 * PI)).round() as i64)
    }

    /// Newton with multiplicity `m`; returns a point when it settles.
    fn newton(&self, start: Complex64, m: u32) -> Option<Complex64> {
        let mut z = start;
        for _ in 0..100 {
            let v = self.f.eval_scaled(z);
            let dv = self.df.eval_scaled(z);
            let step = v.0 / dv.0 * (v.1 - dv.1).exp() * m as f64;
            if !step.is_finite() {
                return None;
            }
            z -= step;
            if step.norm() <= 1e-14 * z.norm().max(1.0) {
                return Some(z);
            }
        }
        None
    }

    fn run(&self, r: f64) -> Result<Vec<DivisorPoint>, NevanlinnaError> {
        let mut half = r * 1.0371 + 1e-3;
        for _ in 0..4 {
            let lo = Complex64::new(-half, -half * 0.9989);
            let hi = Complex64::new(half * 1.0017, half);
            if let Ok(count) = self.box_count(lo, hi) {
                self.search(lo, hi, count, 0)?;
                return Ok(self.points.borrow().clone());
            }
            half *= 1.013;
        }
        Err(NevanlinnaError::ContourZero(half))
    }

    fn search(&self, lo: Complex64, hi: Complex64, count: i64, depth: u32) -> Result<(), NevanlinnaError> {
        if count <= 0 {
            return Ok(());
        }
        let size = (hi.re - lo.re).max(hi.im - lo.im);
        let center = 0.5 * (lo + hi);
        let scale = lo.norm().max(hi.norm()).max(1.0);
        if size < 0.5 {
            if let Some(z) = self.newton(center, count as u32) {
                let pad = 0.01 * size;
                let inside = z.re >= lo.re - pad && z.re <= hi.re + pad && z.im >= lo.im - pad && z.im <= hi.im + pad;
                if inside && self.confirm(z, count, size) {
                    self.points.borrow_mut().push(DivisorPoint {
                        at: z,
                        multiplicity: count as u32,
                    });
                    return Ok(());
                }
            }
        }
        if size < 1e-10 * scale || depth > 80 {
            self.points.borrow_mut().push(DivisorPoint {
                at: center,
                multiplicity: count as u32,
            });
            return Ok(());
        }
        for t in SPLITS {
            let mx = lo.re + (hi.re - lo.re) * t;
            let my = lo.im + (hi.im - lo.im) * t;
            let quads = [
                (lo, Complex64::new(mx, my)),
                (Complex64::new(mx, lo.im), Complex64::new(hi.re, my)),
                (Complex64::new(lo.re, my), Complex64::new(mx, hi.im)),
                (Complex64::new(mx, my), hi),
            ];
            let counts: Result<Vec<i64>, OnContour> = quads.iter().map(|(a, b)| self.box_count(*a, *b)).collect();
            match counts {
                Ok(c) if c.iter().sum::<i64>() == count => {
                    for ((a, b), k) in quads.iter().zip(c) {
                        self.search(*a, *b, k, depth + 1)?;
                    }
                    return Ok(());
                }
                _ => continue,
            }
        }
        Err(NevanlinnaError::ContourZero(scale))
    }

    /// Winding around a small circle at `z` equals the expected multiplicity.
    fn confirm(&self, z: Complex64, m: i64, size: f64) -> bool {
        let rho = (0.25 * size).max(1e-9 * z.norm().max(1.0));
        let path = move |t: f64| z + Complex64::from_polar(rho, t);
        match self.path_arg(&path, 0.0, 2.0 * PI, 2.0 * PI * rho) {
            Ok(total) => ((total / (2.0 * PI)).round() as i64) == m,
            Err(_) => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Gaussian;

    fn has(div: &Divisor, at: Complex64, m: u32) -> bool {
        div.points
            .iter()
            .any(|p| (p.at - at).norm() < 1e-8 && p.multiplicity == m)
    }

    #[test]
    fn polynomial_zeros() {
        let cube = ExpPoly::from_poly(Poly::from_int_coeffs(&[0, 0, 0, 1]));
        let d = zeros_in_disk(&cube, 2.0).unwrap();
        assert_eq!(d.points.len(), 1);
        assert!(has(&d, Complex64::new(0.0, 0.0), 3));
        let sq = ExpPoly::from_poly(Poly::from_int_coeffs(&[-1, 0, 1]));
        let d = zeros_in_disk(&sq, 2.0).unwrap();
        assert!(has(&d, Complex64::new(1.0, 0.0), 1) && has(&d, Complex64::new(-1.0, 0.0), 1));
        assert!(zeros_in_disk(&sq, 0.5).unwrap().points.is_empty());
        // zero on the circle is flagged
        let d = zeros_in_disk(&sq, 1.0).unwrap();
        assert!(d.boundary_nudged && d.degree() == 2);
    }

    #[test]
    fn exponential_zeros() {
        let f = ExpPoly::exp(Gaussian::one()).sub(&ExpPoly::one());
        let d = zeros_in_disk(&f, 7.0).unwrap();
        assert_eq!(d.degree(), 3);
        assert_eq!(d.winding, Some(3));
        for at in [0.0, 2.0 * PI, -2.0 * PI] {
            assert!(has(&d, Complex64::new(0.0, at), 1));
        }
    }

    #[test]
    fn multiple_zero_of_mixed_function() {
        // z²·(e^z − 1) has a triple zero at 0
        let f = ExpPoly::exp(Gaussian::one())
            .sub(&ExpPoly::one())
            .mul(&ExpPoly::from_poly(Poly::from_int_coeffs(&[0, 0, 1])));
        let d = zeros_in_disk(&f, 3.0).unwrap();
        assert_eq!(d.degree(), 3);
        assert!(has(&d, Complex64::new(0.0, 0.0), 3));
    }

    #[test]
    fn many_zeros_at_large_radius() {
        // 1 + e^z vanishes at iπ(2k+1): 16 of them within |z| ≤ 50
        let f = ExpPoly::exp(Gaussian::one()).add(&ExpPoly::one());
        let d = zeros_in_disk(&f, 50.0).unwrap();
        assert_eq!(d.degree(), 16);
        assert!(d.points.iter().all(|p| p.at.re.abs() < 1e-9));
    }

    #[test]
    fn poles_cancel_against_zeros() {
        // (e^z − 1)/z has no zero at the origin
        let phi = MeroFn::new(ExpPoly::exp(Gaussian::one()).sub(&ExpPoly::one()), Poly::z());
        let (z, p) = mero_divisors(&phi, 4.0).unwrap();
        assert_eq!(z.degree(), 0);
        assert_eq!(p.degree(), 0);
    }
}
