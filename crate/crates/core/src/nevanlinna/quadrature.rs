//! Adaptive Gauss–Kronrod (7/15) quadrature for circle means.
#![allow(clippy::excessive_precision)]

use std::collections::BinaryHeap;
use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;

/// Default absolute tolerance for circle means.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Evaluation budget before giving up.
const MAX_EVALS: usize = 2_000_000;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Tolerance from `SMTKIT_QUAD_TOL` when set and valid.
pub fn tolerance() -> f64 {
    std::env::var("SMTKIT_QUAD_TOL")
        .ok()
        .and_then(|s| s.trim().parse::<f64>().ok())
        .filter(|t| *t > 0.0 && t.is_finite())
        .unwrap_or(DEFAULT_TOL)
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    let (k, g) = (k * h, g * h);
    let err = if k.is_finite() && g.is_finite() {
        (k - g).abs()
    } else {
        f64::INFINITY
    };
    (k, err)
}

/// `∫_a^b f` to absolute accuracy `tol`, subdividing the worst panel first.
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, initial_panels: usize, tol: f64) -> Quadrature {
    let mut heap = BinaryHeap::new();
    let mut evals = 0;
    let n = initial_panels.max(1);
    for k in 0..n {
        let lo = a + (b - a) * k as f64 / n as f64;
        let hi = a + (b - a) * (k + 1) as f64 / n as f64;
        let (value, error) = gk15(&mut f, lo, hi);
        evals += 15;
        heap.push(Panel { a: lo, b: hi, value, error });
    }
    loop {
        let total_err: f64 = heap.iter().map(|p| p.error).sum();
        if total_err <= tol || evals >= MAX_EVALS {
            let value = heap.iter().map(|p| p.value).sum();
            return Quadrature {
                value,
                error: total_err,
                evaluations: evals,
                converged: total_err <= tol,
            };
        }
        let worst = heap.pop().unwrap();
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // cannot split further; accept the panel as is
            heap.push(Panel { error: 0.0, ..worst });
            continue;
        }
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gk15(&mut f, lo, hi);
            evals += 15;
            heap.push(Panel { a: lo, b: hi, value, error });
        }
    }
}

/// Mean of `g(r·e^{iθ})` over `θ ∈ [0, 2π]`.
pub fn circle_mean(mut g: impl FnMut(Complex64) -> f64, r: f64, tol: f64) -> Quadrature {
    let panels = 16 + (r.max(1.0) as usize).min(512);
    let q = integrate(
        |t| g(Complex64::from_polar(r, t)),
        0.0,
        2.0 * PI,
        panels,
        tol * 2.0 * PI,
    );
    Quadrature {
        value: q.value / (2.0 * PI),
        error: q.error / (2.0 * PI),
        ..q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_trig_integrals() {
        let q = integrate(|x| x * x, 0.0, 3.0, 1, 1e-12);
        assert!((q.value - 9.0).abs() < 1e-12);
        let q = circle_mean(|z| z.re * z.re, 2.0, 1e-12);
        assert!((q.value - 2.0).abs() < 1e-10);
        assert!(q.converged);
    }

    #[test]
    fn kinked_max_integrand() {
        // mean of max(0, r cos θ) is r/π
        let q = circle_mean(|z| z.re.max(0.0), 30.0, 1e-10);
        assert!((q.value - 30.0 / PI).abs() < 1e-9);
    }

    #[test]
    fn log_singularity_on_contour() {
        // mean of log|z - 1| over the unit circle is 0
        let q = circle_mean(|z| (z - 1.0).norm().ln(), 1.0, 1e-9);
        assert!(q.value.abs() < 1e-7, "{q:?}");
    }
}
