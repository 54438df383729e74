//! Property tests for the structural invariants, on random inputs.

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use qkroots_core::algebra::{rat, BigRat, Cyclo, Field, Fp, Mat, Poly, RatFun, Ring};
use qkroots_core::bethe::{bethe_residual, solve_bethe, GrassmannianData};
use qkroots_core::frobenius::{compute_intertwiner, pole_certificate, IntertwinerOptions};
use qkroots_core::pcurvature::{
    log_identity_check, p_curvature, p_curvature_recursive, pencil_spectrum_check, pi_lemma_check, ConnectionData,
};
use qkroots_core::qde::{characteristic_residual_cleared, iterated_product_cleared, ModelKind, QdeModel};

fn nonzero_rat() -> impl Strategy<Value = BigRat> {
    (prop_oneof![-9i64..=-1, 1i64..=9], 1i64..=5).prop_map(|(n, d)| rat(n, d))
}

fn cyclo5() -> impl Strategy<Value = Cyclo<5>> {
    proptest::collection::vec((-6i64..=6, 1i64..=4), 4)
        .prop_map(|cs| Cyclo::<5>::from_poly(&Poly::from_coeffs(cs.into_iter().map(|(n, d)| rat(n, d)).collect())))
}

/// `T*P¹` parameters with `a1^p ≠ a2^p` and `ħ^{2p} ≠ 1`.
fn tpp1_params(p: u64) -> impl Strategy<Value = (BigRat, BigRat, BigRat)> {
    (nonzero_rat(), nonzero_rat(), nonzero_rat())
        .prop_filter("degenerate", move |(a1, a2, h)| Ring::pow(a1, p) != Ring::pow(a2, p) && !Ring::pow(h, 2 * p).is_one())
}

fn relation_zero<const P: u64>(a1: &BigRat, a2: &BigRat, h: &BigRat) -> bool {
    let lift = |x: &BigRat| Cyclo::<P>::from_rat(x.clone());
    let m = QdeModel::new(ModelKind::Tpp1, lift(a1), lift(a2), lift(h)).unwrap();
    let (num, den) = iterated_product_cleared(&m, P, &Cyclo::zeta());
    characteristic_residual_cleared(&num, &den, &m.a1, &m.a2, &m.hbar, P).is_zero()
}

fn connection<const P: u64>(entries: &[(Vec<i64>, Vec<i64>)], n: usize) -> ConnectionData<P> {
    let poly = |cs: &[i64]| Poly::from_coeffs(cs.iter().map(|&c| Fp::<P>::new(c)).collect());
    let a = Mat::from_fn(n, n, |i, j| {
        let (num, den) = &entries[i * n + j];
        let den = if poly(den).is_zero() { Poly::constant(Fp::one()) } else { poly(den) };
        RatFun::new(poly(num), den).unwrap()
    });
    ConnectionData::new(a)
}

fn entries(n: usize) -> impl Strategy<Value = Vec<(Vec<i64>, Vec<i64>)>> {
    proptest::collection::vec((proptest::collection::vec(0i64..7, 3), proptest::collection::vec(0i64..7, 2)), n * n)
}

fn int_matrix(n: usize) -> impl Strategy<Value = Mat<BigRat>> {
    proptest::collection::vec(-9i64..=9, n * n)
        .prop_map(move |v| Mat::from_fn(n, n, |i, j| rat(v[i * n + j], 1)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cyclotomic_field_laws(x in cyclo5(), y in cyclo5()) {
        prop_assert_eq!(x.mul(&y), y.mul(&x));
        prop_assert_eq!(Cyclo::<5>::zeta().pow(5), Cyclo::one());
        if !y.is_zero() {
            prop_assert_eq!(x.mul(&y).mul(&y.inv().unwrap()), x);
        }
    }

    #[test]
    fn quadratic_relation_at_zeta_3((a1, a2, h) in tpp1_params(3)) {
        prop_assert!(relation_zero::<3>(&a1, &a2, &h));
    }

    #[test]
    fn pencil_char_polys_agree_at_7(u1 in 0i64..7, u2 in 0i64..7, h in 0i64..7) {
        let r = pencil_spectrum_check::<7>(Fp::new(u1), Fp::new(u2), Fp::new(h)).unwrap();
        prop_assert!(r.charpoly_equal, "{:?}", r.mismatch);
    }

    #[test]
    fn p_curvature_matches_recursion_and_log_form(e in entries(2)) {
        let conn = connection::<3>(&e, 2);
        prop_assert_eq!(p_curvature(&conn).unwrap(), p_curvature_recursive(&conn));
        prop_assert!(log_identity_check(&conn).passed);
    }

    #[test]
    fn pi_adic_power_identity(alpha in int_matrix(2), beta in int_matrix(2), p in prop_oneof![Just(3u64), Just(5)]) {
        let r = pi_lemma_check(p, &alpha, &beta).unwrap();
        prop_assert!(r.passed, "valuation {:?}", r.valuation);
    }

    #[test]
    fn bethe_k1_count_and_residual(
        a in proptest::collection::vec((0.5f64..2.0, 0.0f64..6.28), 3),
        h in (0.5f64..1.5, 0.0f64..6.28),
        z in (0.05f64..0.5, 0.0f64..6.28),
    ) {
        let a: Vec<C64> = a.into_iter().map(|(r, t)| C64::from_polar(r, t)).collect();
        if let Ok(d) = GrassmannianData::new(1, a, C64::from_polar(h.0, h.1), C64::from_polar(z.0, z.1)) {
            let sols = solve_bethe(&d).unwrap();
            prop_assert_eq!(sols.len(), 3);
            for s in &sols {
                let r = bethe_residual(&s.roots, &d).unwrap();
                prop_assert!(r.iter().all(|v| v.norm() <= 1e-10));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn intertwiner_has_no_cyclotomic_poles_p2((a1, a2, h) in tpp1_params(2)) {
        let m = QdeModel::new(ModelKind::Tpp1, a1, a2, h).unwrap();
        let raw = compute_intertwiner(&m, 2, 4, IntertwinerOptions::default()).unwrap();
        let cert = pole_certificate(&raw).unwrap();
        prop_assert!(cert.passed(), "violations {:?}", cert.violations());
    }
}
