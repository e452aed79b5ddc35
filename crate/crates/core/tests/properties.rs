use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;

use smtkit::algebra::{enumerate_monomials, ExponentTuple, Gaussian, HomPoly, Poly, RatFunc, Scalar};
use smtkit::bounds::{compute_truncation_levels, Magnitude};
use smtkit::filtration::build_filtration;
use smtkit::nevanlinna::zeros::DivisorPoint;
use smtkit::nevanlinna::{counting_function, wronskian, zeros_in_disk, Divisor, EntireCurve, ExpPoly, MeroFn};
use smtkit::resultant::{
    is_admissible, macaulay_resultant_seeded, power_certificates, sylvester_resultant,
    sylvester_resultant_general, HypersurfaceFamily,
};

fn rational() -> impl Strategy<Value = BigRational> {
    (-12i64..=12, 1i64..=6).prop_map(|(p, q)| BigRational::new(p.into(), q.into()))
}

fn gaussian() -> impl Strategy<Value = Gaussian> {
    (rational(), rational()).prop_map(|(a, b)| Gaussian::new(a, b))
}

fn small_poly(max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec((-4i64..=4, -4i64..=4), 1..=max_deg + 1)
        .prop_map(|c| Poly::from_coeffs(c.into_iter().map(|(a, b)| Gaussian::from_ints(a, b)).collect()))
}

fn ratfunc() -> impl Strategy<Value = RatFunc> {
    (small_poly(2), (-5i64..=5, -3i64..=3)).prop_map(|(num, (a, b))| {
        // monic linear denominator z - (a+bi)
        RatFunc::new(num, Poly::linear_root(&Gaussian::from_ints(a, b)))
    })
}

fn scalar() -> impl Strategy<Value = Scalar> {
    prop_oneof![
        rational().prop_map(Scalar::from),
        gaussian().prop_map(Scalar::from_gaussian),
        ratfunc().prop_map(Scalar::from_ratfunc),
    ]
}

fn int_scalar() -> impl Strategy<Value = Scalar> {
    (-5i64..=5).prop_map(Scalar::from_int)
}

/// A homogeneous form with `nvars` variables and degree `d`, coefficients
/// from `coef`, on a random support.
fn form<S>(nvars: usize, d: u32, coef: S) -> impl Strategy<Value = HomPoly>
where
    S: Strategy<Value = Scalar>,
{
    let basis = enumerate_monomials(nvars - 1, d);
    let len = basis.len();
    prop::collection::vec(prop::option::weighted(0.6, coef), len).prop_map(move |cs| {
        let terms: Vec<(ExponentTuple, Scalar)> = basis
            .iter()
            .cloned()
            .zip(cs)
            .filter_map(|(e, c)| c.map(|c| (e, c)))
            .collect();
        HomPoly::from_terms(nvars, d, terms).unwrap()
    })
}

fn any_form() -> impl Strategy<Value = HomPoly> {
    (2usize..=4, 1u32..=4).prop_flat_map(|(nv, d)| form(nv, d, scalar()))
}

#[allow(clippy::eq_op)]
fn field_axioms(a: &Scalar, b: &Scalar, c: &Scalar) -> Result<(), TestCaseError> {
    prop_assert_eq!(&(a + b) + c, a + &(b + c));
    prop_assert_eq!(&(a * b) * c, a * &(b * c));
    prop_assert_eq!(a * &(b + c), &(a * b) + &(a * c));
    prop_assert_eq!(a + b, b + a);
    prop_assert_eq!(a * b, b * a);
    prop_assert!((a - a).is_zero());
    if a.is_zero() {
        prop_assert!(a.inv().is_none());
    } else {
        prop_assert!((a * &a.inv().unwrap()).is_one());
        prop_assert_eq!(&(b / a) * a, b.clone());
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rational_field_axioms(a in rational(), b in rational(), c in rational()) {
        field_axioms(&Scalar::from(a), &Scalar::from(b), &Scalar::from(c))?;
    }

    #[test]
    fn gaussian_field_axioms(a in gaussian(), b in gaussian(), c in gaussian()) {
        let f = Scalar::from_gaussian;
        field_axioms(&f(a), &f(b), &f(c))?;
    }

    #[test]
    fn rational_function_field_axioms(a in ratfunc(), b in ratfunc(), c in ratfunc()) {
        let f = Scalar::from_ratfunc;
        field_axioms(&f(a), &f(b), &f(c))?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mixed_field_axioms(a in scalar(), b in scalar(), c in scalar()) {
        field_axioms(&a, &b, &c)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn euler_identity(q in any_form()) {
        let nv = q.nvars();
        let mut sum = HomPoly::zero(nv, q.degree());
        for k in 0..nv {
            sum = sum.add(&HomPoly::var(nv, k).mul(&q.partial(k))).unwrap();
        }
        prop_assert_eq!(sum, q.scale(&Scalar::from_int(q.degree() as i64)));
    }

    #[test]
    fn evaluation_is_homogeneous(
        (q, x) in (2usize..=4, 1u32..=4).prop_flat_map(|(nv, d)| (form(nv, d, scalar()), prop::collection::vec(scalar(), nv))),
        lambda in scalar(),
    ) {
        let scaled: Vec<Scalar> = x.iter().map(|xi| &lambda * xi).collect();
        let lhs = q.eval(&scaled).unwrap();
        let rhs = &lambda.pow(q.degree() as i32) * &q.eval(&x).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn specialize_commutes_with_eval(
        (q, x) in (2usize..=4, 1u32..=3).prop_flat_map(|(nv, d)| (form(nv, d, scalar()), prop::collection::vec(gaussian(), nv))),
        z0 in gaussian(),
    ) {
        let Ok(spec) = q.specialize(&z0) else { return Ok(()) };
        let xs: Vec<Scalar> = x.iter().cloned().map(Scalar::from_gaussian).collect();
        let a = spec.eval(&xs).unwrap().to_gaussian().unwrap();
        let b = q.eval(&xs).unwrap().eval_at(&z0);
        // the unspecialized value may have a removable pole at z0 only if
        // specialization failed, which was excluded above
        prop_assert_eq!(Some(a), b);
    }
}

/// `∏ (x_0 − r_i x_1)` times `lead`, as a binary form.
fn binary_from_roots(lead: i64, roots: &[i64]) -> HomPoly {
    let mut p = HomPoly::from_terms(2, 0, [(ExponentTuple(vec![0, 0]), Scalar::from_int(lead))]).unwrap();
    for &r in roots {
        let lin = HomPoly::from_int_terms(2, 1, &[(&[1, 0], 1), (&[0, 1], -r)]);
        p = p.mul(&lin);
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn sylvester_matches_root_product(
        a in prop_oneof![-3i64..=-1, 1i64..=3],
        b in prop_oneof![-3i64..=-1, 1i64..=3],
        ra in prop::collection::vec(-4i64..=4, 1..=3),
        rb in prop::collection::vec(-4i64..=4, 1..=3),
    ) {
        let p = binary_from_roots(a, &ra);
        let q = binary_from_roots(b, &rb);
        let (m, n) = (rb.len() as u32, ra.len() as u32);
        let mut expect = BigInt::from(a).pow(m) * BigInt::from(b).pow(n);
        for x in &ra {
            for y in &rb {
                expect *= BigInt::from(x - y);
            }
        }
        let expect = Scalar::from(BigRational::from_integer(expect));
        prop_assert_eq!(sylvester_resultant_general(&p, &q).unwrap(), expect);
    }

    #[test]
    fn resultant_is_multiplicative(
        (p1, p2, q) in (1u32..=2, 1u32..=2, 1u32..=2)
            .prop_flat_map(|(d1, d2, e)| (form(2, d1, int_scalar()), form(2, d2, int_scalar()), form(2, e, int_scalar())))
    ) {
        prop_assume!(!p1.is_zero() && !p2.is_zero() && !q.is_zero());
        let res = |a: &HomPoly, b: &HomPoly| sylvester_resultant_general(a, b).unwrap();
        prop_assert_eq!(res(&p1.mul(&p2), &q), &res(&p1, &q) * &res(&p2, &q));
    }

    #[test]
    fn macaulay_agrees_with_sylvester(
        (p, q) in (1u32..=3).prop_flat_map(|d| (form(2, d, int_scalar()), form(2, d, int_scalar())))
    ) {
        prop_assume!(!p.is_zero() && !q.is_zero());
        let m = macaulay_resultant_seeded(&[p.clone(), q.clone()], 1).unwrap();
        let s = sylvester_resultant(&p, &q).unwrap();
        prop_assert!(m == s || m == -&s, "macaulay {} sylvester {}", m, s);
    }
}

/// Forms in three variables that all vanish at `(1 : a : b)`.
fn planted(forms: &[HomPoly], a: i64, b: i64) -> Vec<HomPoly> {
    let pt = [Scalar::one(), Scalar::from_int(a), Scalar::from_int(b)];
    forms
        .iter()
        .map(|f| {
            let v = f.eval(&pt).unwrap();
            let lead = HomPoly::monomial(ExponentTuple(vec![f.degree(), 0, 0]), v);
            f.sub(&lead).unwrap()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn planted_common_zero_kills_resultant(
        forms in (1u32..=2).prop_flat_map(|d| prop::collection::vec(form(3, d, int_scalar()), 3)),
        a in -3i64..=3,
        b in -3i64..=3,
    ) {
        let f = planted(&forms, a, b);
        prop_assert!(macaulay_resultant_seeded(&f, 0).unwrap().is_zero());
    }

    #[test]
    fn resultant_scales_by_power(
        forms in (1u32..=2).prop_flat_map(|d| prop::collection::vec(form(3, d, int_scalar()), 3)),
        c in prop_oneof![-3i64..=-2, 2i64..=3],
    ) {
        prop_assume!(forms.iter().all(|f| !f.is_zero()));
        let d = forms[0].degree() as i32;
        let r = macaulay_resultant_seeded(&forms, 0).unwrap();
        let mut scaled = forms.clone();
        scaled[1] = scaled[1].scale(&Scalar::from_int(c));
        let rs = macaulay_resultant_seeded(&scaled, 0).unwrap();
        // homogeneous of degree d^n = d^2 in the coefficients of each form
        prop_assert_eq!(rs, &Scalar::from_int(c).pow(d * d) * &r);
    }

    #[test]
    fn certificates_verify(
        forms in (1u32..=2).prop_flat_map(|d| prop::collection::vec(form(3, d, int_scalar()), 3)),
    ) {
        let Ok((certs, s)) = power_certificates(&forms) else { return Ok(()) };
        let d = forms[0].degree();
        prop_assert!(s <= 3 * (d - 1) + 1);
        for c in &certs {
            prop_assert!(c.verify(&forms));
            prop_assert!(!c.resultant.is_zero());
        }
    }
}

/// Coefficients that are constants or the moving `1/(z+5)`, `z`.
fn family_coef() -> impl Strategy<Value = Scalar> {
    prop_oneof![
        3 => int_scalar(),
        1 => Just(&Scalar::one() / &(&Scalar::z() + &Scalar::from_int(5))),
        1 => Just(Scalar::z()),
    ]
}

fn small_family() -> impl Strategy<Value = (usize, Vec<HomPoly>)> {
    (1usize..=2, 1u32..=2).prop_flat_map(|(n, d)| {
        (Just(n), prop::collection::vec(form(n + 1, d, family_coef()), n + 2))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn admissibility_ignores_order_and_scaling(
        (n, forms) in small_family(),
        rot in 0usize..4,
        k in 0usize..4,
        c in prop_oneof![Just(Scalar::from_int(-2)), Just(Scalar::i()), Just(Scalar::z())],
    ) {
        prop_assume!(forms.iter().all(|f| !f.is_zero()));
        let base = is_admissible(&HypersurfaceFamily::new(n, forms.clone()).unwrap()).unwrap();
        let mut perm = forms.clone();
        let len = perm.len();
        perm.rotate_left(rot % len);
        perm.swap(0, len - 1);
        let permuted = is_admissible(&HypersurfaceFamily::new(n, perm).unwrap()).unwrap();
        prop_assert_eq!(base.admissible, permuted.admissible);
        let mut scaled = forms.clone();
        let j = k % len;
        scaled[j] = scaled[j].scale(&c);
        let scaled = is_admissible(&HypersurfaceFamily::new(n, scaled).unwrap()).unwrap();
        prop_assert_eq!(base.admissible, scaled.admissible);
    }

    #[test]
    fn filtration_identities(
        (n, forms) in small_family(),
        level in 1u32..=3,
        c in prop_oneof![Just(Scalar::from_int(3)), Just(Scalar::z())],
    ) {
        prop_assume!(forms.iter().all(|f| !f.is_zero()));
        let fam = HypersurfaceFamily::new(n, forms.clone()).unwrap();
        prop_assume!(is_admissible(&fam).unwrap().admissible);
        let d = fam.common_degree();
        let big_n = level * d;
        let subset: Vec<usize> = (0..n).collect();
        let t = build_filtration(&fam, &subset, big_n).unwrap();
        prop_assert!(t.checks.all());

        // Σ m_k = C(N+n, n)
        let m_total: usize = t.m.iter().sum();
        let binom = (1..=n).fold(1usize, |acc, i| acc * (big_n as usize + i) / i);
        prop_assert_eq!(m_total, binom);
        prop_assert_eq!(t.big_m, binom);

        // Σ m_k (N/d − |I_k|) = M N/d − n A
        let lhs: i64 = t
            .m
            .iter()
            .zip(&t.indices)
            .map(|(&m, i)| m as i64 * (level as i64 - i.iter().sum::<u32>() as i64))
            .sum();
        prop_assert_eq!(lhs, binom as i64 * level as i64 - n as i64 * t.a as i64);

        // A does not depend on the order of J nor on scaling
        let rev: Vec<usize> = subset.iter().rev().copied().collect();
        prop_assert_eq!(build_filtration(&fam, &rev, big_n).unwrap().a, t.a);
        let mut scaled = forms.clone();
        scaled[0] = scaled[0].scale(&c);
        let sfam = HypersurfaceFamily::new(n, scaled).unwrap();
        prop_assert_eq!(build_filtration(&sfam, &subset, big_n).unwrap().a, t.a);
    }
}

fn not_smaller(small_eps: &Magnitude, big_eps: &Magnitude) -> bool {
    match (small_eps.exact(), big_eps.exact()) {
        (Some(a), Some(b)) => a >= b,
        _ => small_eps.log2_bounds().1 >= big_eps.log2_bounds().0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn truncation_levels_grow_as_eps_shrinks(
        n in 1usize..=3,
        extra in 0usize..=3,
        degs in prop::collection::vec(1u32..=3, 7),
        p in 1i64..=4,
        q in 1i64..=4,
        fixed in any::<bool>(),
    ) {
        let qn = n + 1 + extra;
        let degrees = &degs[..qn];
        let (a, b) = (p.min(q), p.max(q));
        let e1 = BigRational::new(a.into(), (2 * b).into());
        let e2 = &e1 / BigRational::from_integer(2.into());
        let r1 = compute_truncation_levels(n, qn, &e1, degrees, fixed).unwrap();
        let r2 = compute_truncation_levels(n, qn, &e2, degrees, fixed).unwrap();
        prop_assert!(r2.N >= r1.N);
        prop_assert!(r2.M >= r1.M);
        for (l2, l1) in r2.L_j.iter().zip(&r1.L_j) {
            prop_assert!(not_smaller(l2, l1), "{} < {}", l2, l1);
        }
        prop_assert!(r1.margin_ok && r2.margin_ok);
        if fixed {
            prop_assert_eq!(r1.p_selection_ok, Some(true));
        }
    }
}

fn divisor() -> impl Strategy<Value = Divisor> {
    prop::collection::vec((0.05f64..9.0, 0.0f64..std::f64::consts::TAU, 1u32..=4), 0..8).prop_map(|pts| Divisor {
        points: pts
            .into_iter()
            .map(|(m, a, k)| DivisorPoint { at: Complex64::from_polar(m, a), multiplicity: k })
            .collect(),
        radius: 10.0,
        boundary_nudged: false,
        winding: None,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn counting_is_monotone(div in divisor(), r1 in 1.0f64..10.0, r2 in 1.0f64..10.0, l in 1u64..=4) {
        let (lo, hi) = (r1.min(r2), r1.max(r2));
        let n = |r, lv| counting_function(&div, r, lv).unwrap();
        prop_assert!(n(lo, Some(l)) <= n(hi, Some(l)) + 1e-12);
        prop_assert!(n(hi, Some(l)) <= n(hi, Some(l + 1)) + 1e-12);
        prop_assert!(n(hi, Some(l)) <= n(hi, None) + 1e-12);
        let top = div.points.iter().map(|p| p.multiplicity as u64).max().unwrap_or(1);
        prop_assert!((n(hi, Some(top)) - n(hi, None)).abs() <= 1e-12);
    }
}

fn exppoly() -> impl Strategy<Value = ExpPoly> {
    prop::collection::vec((small_poly(2), (-2i64..=2, -2i64..=2)), 1..=2).prop_map(|ts| {
        ExpPoly::from_terms(ts.into_iter().map(|(p, (a, b))| (Gaussian::from_ints(a, b), p)).collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn wronskian_scaling_law(fs in prop::collection::vec(exppoly(), 2..=3), h in exppoly()) {
        prop_assume!(!h.is_zero());
        let f: Vec<MeroFn> = fs.iter().cloned().map(MeroFn::from_exppoly).collect();
        let hf: Vec<MeroFn> = fs.iter().map(|x| MeroFn::from_exppoly(x.mul(&h))).collect();
        let hm = MeroFn::from_exppoly(h);
        prop_assert_eq!(wronskian(&hf), hm.pow(f.len() as u32).mul(&wronskian(&f)));
    }

    #[test]
    fn zero_count_matches_winding(
        p in small_poly(2),
        c in (-2i64..=2, -2i64..=2),
        q in small_poly(1),
        r in 1.5f64..4.0,
    ) {
        let f = ExpPoly::from_terms(vec![(Gaussian::zero(), p), (Gaussian::from_ints(c.0, c.1), q)]);
        prop_assume!(!f.is_polynomial() && !f.is_zero());
        let div = zeros_in_disk(&f, r).unwrap();
        if let Some(w) = div.winding {
            prop_assert_eq!(div.degree() as i64, w);
        }
    }

    #[test]
    fn characteristic_ignores_common_factor(
        fs in prop::collection::vec(exppoly(), 2..=3),
        k in (1i64..=4, -3i64..=3),
        r in 2.0f64..6.0,
    ) {
        let Ok(f) = EntireCurve::new(fs.clone()) else { return Ok(()) };
        let c = Gaussian::from_ints(k.0, k.1);
        let g = EntireCurve::new(fs.iter().map(|x| x.scale(&c)).collect()).unwrap();
        let (tf, tg) = (f.characteristic(r).unwrap(), g.characteristic(r).unwrap());
        prop_assert!((tf - tg).abs() <= 1e-7 * (1.0 + tf.abs()), "{} vs {}", tf, tg);
    }
}

#[test]
fn constant_curve_has_zero_characteristic() {
    let f = EntireCurve::new(vec![
        ExpPoly::constant(Gaussian::from_ints(2, 1)),
        ExpPoly::constant(Gaussian::from_ints(-1, 3)),
        ExpPoly::one(),
    ])
    .unwrap();
    for r in [1.0, 2.0, 7.5, 30.0] {
        assert!(f.characteristic(r).unwrap().abs() < 1e-9);
    }
}

fn det3(m: [[i64; 3]; 3]) -> i64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn grid_zero_forces_vanishing_resultant(
        forms in (1u32..=2).prop_flat_map(|d| prop::collection::vec(form(3, d, (-2i64..=2).prop_map(Scalar::from_int)), 3)),
    ) {
        let r = macaulay_resultant_seeded(&forms, 0).unwrap();
        let mut found = false;
        for a in -3i64..=3 {
            for b in -3i64..=3 {
                for c in -3i64..=3 {
                    if (a, b, c) == (0, 0, 0) {
                        continue;
                    }
                    let pt = [Scalar::from_int(a), Scalar::from_int(b), Scalar::from_int(c)];
                    found |= forms.iter().all(|f| f.eval(&pt).unwrap().is_zero());
                }
            }
        }
        if found {
            prop_assert!(r.is_zero());
        }
    }

    #[test]
    fn linear_resultant_is_determinant(m in prop::array::uniform3(prop::array::uniform3(-4i64..=4))) {
        let forms: Vec<HomPoly> = m
            .iter()
            .map(|row| {
                let terms: Vec<(&[u32], i64)> = vec![(&[1, 0, 0], row[0]), (&[0, 1, 0], row[1]), (&[0, 0, 1], row[2])];
                HomPoly::from_int_terms(3, 1, &terms)
            })
            .collect();
        prop_assert_eq!(macaulay_resultant_seeded(&forms, 0).unwrap(), Scalar::from_int(det3(m)));
    }
}
