//! Defect estimates, the Second Main Theorem harness and the logarithmic
//! derivative diagnostic.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;
use serde::Serialize;

use super::counting::counting_function;
use super::curve::EntireCurve;
use super::exppoly::{ExpPoly, MeroFn};
use super::quadrature::{circle_mean, tolerance};
use super::wronskian::checked_wronskian;
use super::zeros::{mero_divisors, Divisor};
use super::NevanlinnaError;
use crate::algebra::linalg::numeric_rank;
use crate::algebra::{binomial, enumerate_monomials, HomPoly};
use crate::bounds::{compute_truncation_levels, Magnitude};
use crate::filtration::ser_rational;
use crate::random::rng;
use crate::resultant::{is_admissible, AdmissibilityVerdict, HypersurfaceFamily};

/// `steps` radii evenly spaced on `[rmin, rmax]`.
pub fn radius_grid(rmin: f64, rmax: f64, steps: usize) -> Result<Vec<f64>, NevanlinnaError> {
    if steps == 0 || !(rmin >= 1.0) || rmax < rmin {
        return Err(NevanlinnaError::EmptyGrid);
    }
    if steps == 1 {
        return Ok(vec![rmin]);
    }
    Ok((0..steps)
        .map(|k| rmin + (rmax - rmin) * k as f64 / (steps - 1) as f64)
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct DefectEstimate {
    pub value: f64,
    /// `(r, 1 − N(r)/(d·T(r)))` over the grid.
    pub series: Vec<(f64, f64)>,
}

fn defect_from(radii: &[f64], ts: &[f64], ns: &[f64], d: u32) -> DefectEstimate {
    let series: Vec<(f64, f64)> = radii
        .iter()
        .zip(ts.iter().zip(ns))
        .map(|(&r, (&t, &n))| (r, 1.0 - n / (d as f64 * t)))
        .collect();
    let start = radii.len() / 2;
    let value = series[start..].iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    DefectEstimate { value, series }
}

/// Zeros of `Q(f)` (normalized target) out to the largest radius.
fn target_divisor(f: &EntireCurve, q: &HomPoly, rmax: f64, index: usize) -> Result<Divisor, NevanlinnaError> {
    let phi = f.compose_normalized(q)?;
    if phi.is_zero() {
        return Err(NevanlinnaError::TargetVanishes(index));
    }
    Ok(mero_divisors(&phi, rmax)?.0)
}

fn characteristics(f: &EntireCurve, radii: &[f64]) -> Result<Vec<f64>, NevanlinnaError> {
    radii.iter().map(|&r| f.characteristic(r)).collect()
}

/// Running infimum of `1 − N^{(L)}(r,Q)/(d·T_f(r))` over the upper half of
/// the grid.
pub fn defect_estimate(
    f: &EntireCurve,
    q: &HomPoly,
    radii: &[f64],
    level: Option<u64>,
) -> Result<DefectEstimate, NevanlinnaError> {
    let rmax = *radii.last().ok_or(NevanlinnaError::EmptyGrid)?;
    let div = target_divisor(f, q, rmax, 0)?;
    let ts = characteristics(f, radii)?;
    let ns: Vec<f64> = radii
        .iter()
        .map(|&r| counting_function(&div, r, level))
        .collect::<Result<_, _>>()?;
    Ok(defect_from(radii, &ts, &ns, q.degree()))
}

#[derive(Clone, Debug, Serialize)]
pub struct NondegeneracyReport {
    /// `(e, numerical rank, number of monomials of degree e)`.
    pub ranks: Vec<(u32, usize, usize)>,
    pub max_degree: u32,
    pub nondegenerate: bool,
}

/// Monomials `f^I` with `|I| = e` sampled at `3·C(n+e, n)` seeded random
/// points; full column rank for every `e ≤ max_degree` passes.
pub fn algebraic_nondegeneracy(f: &EntireCurve, max_degree: u32, seed: u64) -> NondegeneracyReport {
    let n = f.n();
    let mut g = rng(seed);
    let mut ranks = Vec::new();
    let mut ok = true;
    for e in 1..=max_degree {
        let monos = enumerate_monomials(n, e);
        let count = binomial(n + e as usize, n);
        let points = 3 * count;
        let mut rows = Vec::with_capacity(points);
        for _ in 0..points {
            let z = Complex64::from_polar(g.gen_range(0.2..1.5), g.gen_range(0.0..std::f64::consts::TAU));
            let vals: Vec<(Complex64, f64)> = f.components().iter().map(|c| c.eval_scaled(z)).collect();
            let row: Vec<(Complex64, f64)> = monos
                .iter()
                .map(|m| {
                    m.as_slice().iter().zip(&vals).fold(
                        (Complex64::new(1.0, 0.0), 0.0),
                        |(w, s), (&k, (v, sv))| (w * v.powu(k), s + sv * k as f64),
                    )
                })
                .collect();
            // common scale per row keeps magnitudes comparable
            let top = row.iter().map(|(_, s)| *s).fold(f64::NEG_INFINITY, f64::max);
            rows.push(row.iter().map(|(w, s)| w * (s - top).exp()).collect());
        }
        let rank = numeric_rank(rows, 1e-9);
        ok &= rank == count;
        ranks.push((e, rank, count));
    }
    NondegeneracyReport {
        ranks,
        max_degree,
        nondegenerate: ok,
    }
}

#[derive(Clone, Debug)]
pub struct SmtOptions {
    /// Highest monomial degree in the nondegeneracy test.
    pub nondegeneracy_degree: u32,
    pub seed: u64,
    /// Replaces the computed truncation levels.
    pub levels: Option<Vec<u64>>,
}

impl Default for SmtOptions {
    fn default() -> Self {
        SmtOptions {
            nondegeneracy_degree: 4,
            seed: 0,
            levels: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SmtRow {
    pub r: f64,
    pub characteristic: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    /// `N^{(L_j)}_f(r, Q_j)`.
    pub counting: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TargetSummary {
    pub index: usize,
    pub degree: u32,
    pub moving: bool,
    pub normalized: String,
    /// `null` stands for no truncation (the level exceeds every multiplicity).
    pub level: Option<u64>,
    pub level_bound: String,
    pub zeros_found: u64,
    pub defect: f64,
    /// `max_r (N(r) − d·T(r))` over the grid.
    pub first_main_constant: f64,
    /// `T_coef(r_max)/T_f(r_max)` for moving targets.
    pub coefficient_growth: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SmtReport {
    pub n: usize,
    pub q: usize,
    #[serde(serialize_with = "ser_rational")]
    pub eps: BigRational,
    pub admissibility: AdmissibilityVerdict,
    pub nondegeneracy: NondegeneracyReport,
    pub targets: Vec<TargetSummary>,
    pub rows: Vec<SmtRow>,
    pub holds_everywhere: bool,
    /// Smallest sampled radius from which the inequality holds at every
    /// larger sampled radius.
    pub r0: Option<f64>,
    /// Total grid spacing attached to violating radii.
    pub violating_measure: f64,
    pub defect_sum: f64,
    pub defect_bound: f64,
    pub defect_relation_ok: bool,
    pub verdict: bool,
}

fn level_cap(m: &Magnitude) -> Option<u64> {
    m.exact().and_then(|v| v.to_u64())
}

pub fn smt_verify(
    f: &EntireCurve,
    fam: &HypersurfaceFamily,
    eps: &BigRational,
    radii: &[f64],
    opts: &SmtOptions,
) -> Result<SmtReport, NevanlinnaError> {
    let n = f.n();
    if fam.n() != n {
        return Err(NevanlinnaError::DimensionMismatch {
            curve: n,
            target: fam.n(),
        });
    }
    if radii.is_empty() {
        return Err(NevanlinnaError::EmptyGrid);
    }
    let q = fam.q();
    let admissibility = is_admissible(fam)?;
    if !admissibility.admissible {
        return Err(NevanlinnaError::NotAdmissible {
            failing_subset: admissibility.failing_subset.clone().unwrap_or_default(),
        });
    }
    let nondegeneracy = algebraic_nondegeneracy(f, opts.nondegeneracy_degree, opts.seed);
    if !nondegeneracy.nondegenerate {
        let e = nondegeneracy
            .ranks
            .iter()
            .find(|(_, r, c)| r != c)
            .map_or(0, |x| x.0);
        return Err(NevanlinnaError::Degenerate { degree: e });
    }
    let degrees = fam.degrees();
    let bounds = compute_truncation_levels(n, q, eps, &degrees, fam.is_fixed())?;
    let levels: Vec<Option<u64>> = match &opts.levels {
        Some(ls) if ls.len() == q => ls.iter().map(|&l| Some(l)).collect(),
        Some(ls) => return Err(NevanlinnaError::LevelCount { expected: q, found: ls.len() }),
        None => bounds.L_j.iter().map(level_cap).collect(),
    };
    let rmax = *radii.last().unwrap();
    let divisors: Vec<Divisor> = fam
        .forms()
        .iter()
        .enumerate()
        .map(|(j, qj)| target_divisor(f, qj, rmax, j))
        .collect::<Result<_, _>>()?;
    let ts = characteristics(f, radii)?;
    let eps_f = eps.to_f64().unwrap();
    let coef = q as f64 - n as f64 - 1.0 - eps_f;
    let mut rows = Vec::with_capacity(radii.len());
    let mut untruncated = vec![Vec::with_capacity(radii.len()); q];
    for (&r, &t) in radii.iter().zip(&ts) {
        let mut counting = Vec::with_capacity(q);
        let mut rhs = 0.0;
        for j in 0..q {
            let nj = counting_function(&divisors[j], r, levels[j])?;
            rhs += nj / degrees[j] as f64;
            counting.push(nj);
            untruncated[j].push(counting_function(&divisors[j], r, None)?);
        }
        let lhs = coef * t;
        rows.push(SmtRow {
            r,
            characteristic: t,
            lhs,
            rhs,
            margin: rhs - lhs,
            counting,
        });
    }
    let holds_everywhere = rows.iter().all(|row| row.margin > 0.0);
    let mut r0 = None;
    for row in rows.iter().rev() {
        if row.margin > 0.0 {
            r0 = Some(row.r);
        } else {
            break;
        }
    }
    let spacing = if radii.len() > 1 {
        (rmax - radii[0]) / (radii.len() - 1) as f64
    } else {
        0.0
    };
    let violating_measure = rows.iter().filter(|row| row.margin <= 0.0).count() as f64 * spacing;
    let t_max = *ts.last().unwrap();
    let mut targets = Vec::with_capacity(q);
    let mut defect_sum = 0.0;
    for (j, qj) in fam.forms().iter().enumerate() {
        let defect = defect_from(radii, &ts, &untruncated[j], qj.degree());
        defect_sum += defect.value;
        let first_main_constant = untruncated[j]
            .iter()
            .zip(&ts)
            .map(|(nv, t)| nv - qj.degree() as f64 * t)
            .fold(f64::NEG_INFINITY, f64::max);
        let coefficient_growth = match EntireCurve::coefficient_curve(qj) {
            Some(c) => Some(c.characteristic(rmax)? / t_max),
            None => None,
        };
        targets.push(TargetSummary {
            index: j,
            degree: qj.degree(),
            moving: !qj.is_fixed(),
            normalized: qj.normalized().to_string(),
            level: levels[j],
            level_bound: bounds.L_j[j].to_string(),
            zeros_found: divisors[j].degree(),
            defect: defect.value,
            first_main_constant,
            coefficient_growth,
        });
    }
    let defect_bound = n as f64 + 1.0 + 0.1;
    let defect_relation_ok = defect_sum <= defect_bound;
    Ok(SmtReport {
        n,
        q,
        eps: eps.clone(),
        admissibility,
        nondegeneracy,
        targets,
        verdict: r0.is_some() && defect_relation_ok,
        rows,
        holds_everywhere,
        r0,
        violating_measure,
        defect_sum,
        defect_bound,
        defect_relation_ok,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LogDerivativeRow {
    pub r: f64,
    /// Circle mean of `log⁺|W/(f_0⋯f_n)|`.
    pub integral: f64,
    pub characteristic: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LogDerivativeDiagnostic {
    pub rows: Vec<LogDerivativeRow>,
    /// Least-squares slope of the ratio against `r`.
    pub slope: f64,
    /// Share of consecutive steps where the ratio does not increase.
    pub nonincreasing_fraction: f64,
    pub all_finite: bool,
}

pub fn log_derivative_diagnostic(f: &EntireCurve, radii: &[f64]) -> Result<LogDerivativeDiagnostic, NevanlinnaError> {
    let comps: Vec<MeroFn> = f.components().iter().cloned().map(MeroFn::from_exppoly).collect();
    let w = checked_wronskian(&comps)?;
    let prod = f.components().iter().fold(ExpPoly::one(), |acc, c| acc.mul(c));
    if prod.is_zero() {
        return Err(NevanlinnaError::IdenticallyZero);
    }
    let tol = tolerance();
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        let qd = circle_mean(|z| (w.log_abs(z) - prod.log_abs(z)).max(0.0), r, tol);
        let t = f.characteristic(r)?;
        rows.push(LogDerivativeRow {
            r,
            integral: qd.value,
            characteristic: t,
            ratio: qd.value / t,
        });
    }
    let k = rows.len() as f64;
    let mr = rows.iter().map(|x| x.r).sum::<f64>() / k;
    let my = rows.iter().map(|x| x.ratio).sum::<f64>() / k;
    let sxx: f64 = rows.iter().map(|x| (x.r - mr).powi(2)).sum();
    let sxy: f64 = rows.iter().map(|x| (x.r - mr) * (x.ratio - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let steps = rows.len().saturating_sub(1);
    let down = rows.windows(2).filter(|p| p[1].ratio <= p[0].ratio + 1e-12).count();
    Ok(LogDerivativeDiagnostic {
        all_finite: rows.iter().all(|x| x.ratio.is_finite()),
        slope,
        nonincreasing_fraction: if steps == 0 { 1.0 } else { down as f64 / steps as f64 },
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Gaussian, Poly, Scalar};

    fn exp_curve() -> EntireCurve {
        EntireCurve::new(vec![ExpPoly::one(), ExpPoly::exp(Gaussian::one())]).unwrap()
    }

    fn lin(a: i64, b: i64) -> HomPoly {
        HomPoly::from_int_terms(2, 1, &[(&[1, 0], a), (&[0, 1], b)])
    }

    #[test]
    fn defect_examples() {
        let f = exp_curve();
        let radii = radius_grid(10.0, 50.0, 9).unwrap();
        let d0 = defect_estimate(&f, &lin(1, 0), &radii, None).unwrap();
        assert!((d0.value - 1.0).abs() < 1e-9);
        let d2 = defect_estimate(&f, &lin(1, 1), &radii, None).unwrap();
        assert!(d2.value.abs() <= 0.05, "{}", d2.value);
        let line = EntireCurve::from_polys(&[Poly::one(), Poly::z()]).unwrap();
        let d1 = defect_estimate(&line, &lin(0, 1), &radii, None).unwrap();
        assert!(d1.value.abs() < 1e-6);
    }

    #[test]
    fn smt_on_exponential_curve() {
        let f = exp_curve();
        let fam = HypersurfaceFamily::new(1, vec![lin(1, 0), lin(0, 1), lin(1, 1)]).unwrap();
        let radii = radius_grid(10.0, 50.0, 20).unwrap();
        let eps = BigRational::new(1.into(), 2.into());
        let rep = smt_verify(&f, &fam, &eps, &radii, &SmtOptions::default()).unwrap();
        assert!(rep.holds_everywhere && rep.verdict);
        assert!(rep.defect_sum <= 2.1);
        // moving third target x0 + x1/(z+10)
        let c = &Scalar::from_int(1) / &(&Scalar::z() + &Scalar::from_int(10));
        let moving = lin(1, 0)
            .add(&HomPoly::monomial(crate::algebra::ExponentTuple(vec![0, 1]), c))
            .unwrap();
        let fam = HypersurfaceFamily::new(1, vec![lin(1, 0), lin(0, 1), moving]).unwrap();
        let rep = smt_verify(&f, &fam, &eps, &radii, &SmtOptions::default()).unwrap();
        assert!(rep.holds_everywhere, "{:?}", rep.rows.iter().map(|r| r.margin).collect::<Vec<_>>());
        assert!(rep.targets[2].coefficient_growth.unwrap() < 0.5);
    }

    #[test]
    fn degenerate_curve_is_rejected() {
        // (1 : 2) is constant, hence degenerate
        let f = EntireCurve::from_polys(&[Poly::one(), Poly::from_int_coeffs(&[2])]).unwrap();
        let rep = algebraic_nondegeneracy(&f, 2, 1);
        assert!(!rep.nondegenerate);
        let g = EntireCurve::from_polys(&[Poly::one(), Poly::z()]).unwrap();
        assert!(algebraic_nondegeneracy(&g, 3, 1).nondegenerate);
    }

    #[test]
    fn log_derivative_series() {
        let radii = radius_grid(10.0, 50.0, 5).unwrap();
        let diag = log_derivative_diagnostic(&exp_curve(), &radii).unwrap();
        assert!(diag.all_finite);
        assert!(diag.rows.iter().all(|x| x.ratio.abs() < 1e-6));
        let line = EntireCurve::from_polys(&[Poly::one(), Poly::z()]).unwrap();
        let diag = log_derivative_diagnostic(&line, &radii).unwrap();
        assert!(diag.rows.iter().all(|x| x.ratio < 1e-6));
    }
}
