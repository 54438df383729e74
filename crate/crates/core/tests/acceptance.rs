//! Acceptance suite: one line per criterion, `PASS` or `FAIL`, with timing.
//!
//! Runs with a custom harness (`harness = false`) so the report is always
//! printed. Exits nonzero if a criterion outside [`KNOWN_FAILURES`] fails, or
//! if a known failure unexpectedly passes.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qkroots_core::algebra::{rat, BigRat, Cyclo, Fp, Mat, Poly, RatFun, Ring};
use qkroots_core::bethe::{
    bethe_residual, cleared_polynomial_k1, powered_residual, qde_spectrum_match, solve_bethe, GrassmannianData,
};
use qkroots_core::frobenius::{
    compute_intertwiner, conjugation_check, pole_certificate, reduce_at_zeta, tpp0_closed_form, tpp0_exact_limit,
    IntertwinerOptions,
};
use qkroots_core::numeric::{eigenvalues, match_multisets, poly_roots, root_of_unity};
use qkroots_core::pcurvature::{
    log_identity_check, p_curvature, p_curvature_recursive, pencil_spectrum_check, pi_lemma_check,
    root_reduction_check, stirling_row, ConnectionData, Fz,
};
use qkroots_core::qde::{
    characteristic_residual, characteristic_residual_cleared, cohomological_limit, iterated_product,
    iterated_product_at, iterated_product_cleared, HConvention, ModelKind,
    ProductOrder, QdeModel,
};
use qkroots_core::vertex::{gradient_check, scalar_vertex_asymptotics};

/// Criteria expected to fail, with the reason recorded in the report.
const KNOWN_FAILURES: &[(u32, &str)] = &[(
    6,
    "the product formula omits the finite remainder of the p|m terms; the exact \
     limit carries an extra factor ((1-h^p z^p)/(1-z^p))^((p-1)/(2p)), first visible at z^p",
)];

type Verdict = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Verdict,
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

// ---------------------------------------------------------------- sampling

fn rand_rat(rng: &mut ChaCha8Rng) -> BigRat {
    loop {
        let n = rng.gen_range(-9i64..=9);
        if n != 0 {
            return rat(n, rng.gen_range(1..=5));
        }
    }
}

/// `T*P¹` parameters over ℚ with `a1^p ≠ a2^p` and `ħ^{2p} ≠ 1`.
fn rand_tpp1(rng: &mut ChaCha8Rng, p: u64) -> QdeModel<BigRat> {
    loop {
        let (a1, a2, h) = (rand_rat(rng), rand_rat(rng), rand_rat(rng));
        if Ring::pow(&a1, p) == Ring::pow(&a2, p) || Ring::pow(&h, 2 * p).is_one() {
            continue;
        }
        if let Ok(m) = QdeModel::new(ModelKind::Tpp1, a1, a2, h) {
            return m;
        }
    }
}

fn rand_hbar(rng: &mut ChaCha8Rng) -> BigRat {
    loop {
        let h = rand_rat(rng);
        if !Ring::pow(&h, 2).is_one() {
            return h;
        }
    }
}

fn polar(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> C64 {
    C64::from_polar(rng.gen_range(lo..hi), rng.gen_range(0.0..std::f64::consts::TAU))
}

fn rand_gr(rng: &mut ChaCha8Rng, k: usize, n: usize, z_max: f64) -> GrassmannianData {
    loop {
        let a: Vec<C64> = (0..n).map(|_| polar(rng, 0.5, 2.0)).collect();
        if let Ok(d) = GrassmannianData::new(k, a, polar(rng, 0.5, 1.5), polar(rng, 0.05, z_max)) {
            return d;
        }
    }
}

fn rand_connection<const P: u64>(rng: &mut ChaCha8Rng, n: usize) -> ConnectionData<P> {
    let mut poly = |deg: usize| Poly::from_coeffs((0..=deg).map(|_| Fp::<P>::new(rng.gen_range(0..P as i64))).collect());
    let mut a = Mat::from_fn(n, n, |_, _| Fz::<P>::zero());
    for i in 0..n {
        for j in 0..n {
            let num = poly(2);
            let mut den = poly(1);
            if den.is_zero() {
                den = Poly::constant(Fp::one());
            }
            a.set(i, j, RatFun::new(num, den).expect("nonzero denominator"));
        }
    }
    ConnectionData::new(a)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------- criteria

fn c01_quadratic_relation() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let z = RatFun::<BigRat>::var();
    let c = |x: &BigRat| RatFun::constant(x.clone());
    for draw in 0..20 {
        let m = rand_tpp1(&mut rng, 1);
        let x = iterated_product(&m, 1, &BigRat::one());
        let r = characteristic_residual(&x, &c(&m.a1), &c(&m.a2), &c(&m.hbar), &z, 1);
        ensure(r.is_zero(), || format!("draw {draw}: nonzero residual for {m:?}"))?;
    }
    Ok("20/20 residuals exactly zero over Q(z)".into())
}

fn cyclo_relation<const P: u64>(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let zeta = Cyclo::<P>::zeta();
    for draw in 0..10 {
        let m = rand_tpp1(rng, P).map(|x| Cyclo::<P>::from_rat(x.clone()));
        let (num, den) = iterated_product_cleared(&m, P, &zeta);
        let r = characteristic_residual_cleared(&num, &den, &m.a1, &m.a2, &m.hbar, P);
        ensure(r.is_zero(), || format!("p = {P}, draw {draw}: nonzero residual"))?;
    }
    Ok(())
}

fn c02_relation_at_roots() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    cyclo_relation::<2>(&mut rng)?;
    cyclo_relation::<3>(&mut rng)?;
    cyclo_relation::<5>(&mut rng)?;
    Ok("p = 2, 3, 5: 10/10 residuals exactly zero over Q(zeta_p)(z)".into())
}

fn c03_frobenius_spectrum() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let one = C64::new(1.0, 0.0);
    let (mut worst, mut worst_ind) = (0.0f64, 0.0f64);
    for p in [2u64, 3, 5, 7] {
        let pu = p as u32;
        for draw in 0..50 {
            let (a1, a2, h) = (polar(&mut rng, 0.5, 2.0), polar(&mut rng, 0.5, 2.0), polar(&mut rng, 0.5, 2.0));
            let z = polar(&mut rng, 0.05, 0.5);
            let m = QdeModel::new(ModelKind::Tpp1, a1, a2, h).map_err(|e| e.to_string())?;
            let spectrum = |k: u64| -> Result<Vec<C64>, String> {
                let prod = iterated_product_at(&m, &z, &root_of_unity(p, k), p, ProductOrder::Ascending)
                    .ok_or(format!("p = {p}, draw {draw}: pole"))?;
                eigenvalues(&prod).map_err(|e| e.to_string())
            };
            let ev = spectrum(1)?;
            // oracle: the operator at powered parameters and q = 1
            let powered = QdeModel::new(ModelKind::Tpp1, a1.powu(pu), a2.powu(pu), h.powu(pu)).map_err(|e| e.to_string())?;
            let target = eigenvalues(&powered.matrix_at(&z.powu(pu), &one).ok_or("pole in powered operator")?)
                .map_err(|e| e.to_string())?;
            let d = match_multisets(&ev, &target).ok_or("length mismatch")?.max_rel;
            worst = worst.max(d);
            ensure(d <= 1e-8, || format!("p = {p}, draw {draw}: pairing distance {d:.2e}"))?;
            if p >= 3 {
                let d2 = match_multisets(&ev, &spectrum(2)?).ok_or("length mismatch")?.max_rel;
                worst_ind = worst_ind.max(d2);
                ensure(d2 <= 1e-10, || format!("p = {p}, draw {draw}: zeta vs zeta^2 distance {d2:.2e}"))?;
            }
        }
    }
    Ok(format!("200 draws; max pairing {worst:.1e} (tol 1e-8); max zeta/zeta^2 {worst_ind:.1e} (tol 1e-10)"))
}

fn c04_pole_certificates() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut lines = Vec::new();
    for p in [2u64, 3] {
        let d = 2 * p as usize;
        let models = [
            ("tpp0", QdeModel::tpp0(rand_hbar(&mut rng)).map_err(|e| e.to_string())?),
            ("tpp1", rand_tpp1(&mut rng, p)),
        ];
        for (name, m) in models {
            let raw = compute_intertwiner(&m, p, d, IntertwinerOptions::default()).map_err(|e| e.to_string())?;
            let cert = pole_certificate(&raw).map_err(|e| e.to_string())?;
            ensure(cert.violations().is_empty(), || {
                format!("{name} p = {p}: Phi_p in denominators at {:?}", cert.violations())
            })?;
            ensure(cert.positive_control.is_some(), || format!("{name} p = {p}: positive control did not fire"))?;
            lines.push(format!(
                "{name}/p={p}: {} entries coprime, control at {:?}",
                cert.entries.len(),
                cert.positive_control.unwrap()
            ));
        }
    }
    Ok(lines.join("; "))
}

fn c05_conjugation() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for m in [QdeModel::tpp0(rand_hbar(&mut rng)).map_err(|e| e.to_string())?, rand_tpp1(&mut rng, 2)] {
        let r = conjugation_check::<2>(&m, 4).map_err(|e| e.to_string())?;
        ensure(r.is_zero(), || format!("{:?}: residual nonzero", m.kind))?;
    }
    Ok("tpp0 and tpp1 residuals identically zero to z^4 over Q(zeta_2)".into())
}

fn closed_form_case<const P: u64>(hbar: &BigRat) -> Result<(Option<usize>, bool), String> {
    const D: usize = 12;
    let m = QdeModel::tpp0(hbar.clone()).map_err(|e| e.to_string())?;
    let raw = compute_intertwiner(&m, P, D, IntertwinerOptions::default()).map_err(|e| e.to_string())?;
    let f = reduce_at_zeta::<P>(&raw).map_err(|e| e.to_string())?;
    let computed: Vec<Cyclo<P>> = f.coeffs().iter().map(|c| c.get(0, 0).clone()).collect();
    let product_form = tpp0_closed_form::<P>(hbar, D).map_err(|e| e.to_string())?;
    let exact = tpp0_exact_limit::<P>(hbar, D).map_err(|e| e.to_string())?;
    let first_diff = (0..=D).find(|&k| &computed[k] != product_form.coeff(k));
    let exact_ok = (0..=D).all(|k| &computed[k] == exact.coeff(k));
    Ok((first_diff, exact_ok))
}

fn c06_closed_form() -> Verdict {
    let hbar = rat(5, 1);
    let cases = [
        (2, closed_form_case::<2>(&hbar)?),
        (3, closed_form_case::<3>(&hbar)?),
        (5, closed_form_case::<5>(&hbar)?),
    ];
    let exact_all = cases.iter().all(|(_, (_, ok))| *ok);
    let summary: Vec<String> = cases
        .iter()
        .map(|(p, (diff, _))| match diff {
            None => format!("p={p}: equal to z^12"),
            Some(k) => format!("p={p}: differs at z^{k}"),
        })
        .collect();
    let note = format!(
        "{}; corrected limit {}",
        summary.join(", "),
        if exact_all { "matches for all p" } else { "ALSO differs" }
    );
    if cases.iter().all(|(_, (diff, _))| diff.is_none()) {
        Ok(note)
    } else {
        Err(note)
    }
}

fn c07_bethe() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let mut worst_qde = 0.0f64;
    for draw in 0..20 {
        let d = rand_gr(&mut rng, 1, 2, 0.5);
        let dist = qde_spectrum_match(&d).map_err(|e| format!("k=1 draw {draw}: {e}"))?;
        worst_qde = worst_qde.max(dist);
        ensure(dist <= 1e-10, || format!("k=1 draw {draw}: distance {dist:.2e}"))?;
    }
    let mut worst_res = 0.0f64;
    for draw in 0..20 {
        let d = rand_gr(&mut rng, 2, 4, 0.3);
        let sols = solve_bethe(&d).map_err(|e| format!("k=2 draw {draw}: {e}"))?;
        ensure(sols.len() == 6, || format!("k=2 draw {draw}: {} solutions", sols.len()))?;
        for s in &sols {
            let r = bethe_residual(&s.roots, &d).map_err(|e| e.to_string())?;
            let norm = r.iter().map(|v| v.norm()).fold(0.0, f64::max);
            worst_res = worst_res.max(norm);
            ensure(norm <= 1e-10, || format!("k=2 draw {draw}: residual {norm:.2e}"))?;
        }
        for i in 0..6 {
            for j in 0..i {
                let m = match_multisets(&sols[i].roots, &sols[j].roots).ok_or("length mismatch")?;
                ensure(m.max_rel > 1e-8, || format!("k=2 draw {draw}: solutions {i} and {j} coincide"))?;
            }
        }
    }
    Ok(format!(
        "k=1: max eigenvalue distance {worst_qde:.1e}; k=2,n=4: 20 x 6 solutions, max residual {worst_res:.1e}"
    ))
}

fn c08_yang_yang() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let (mut worst, mut count) = (0.0f64, 0usize);
    for (k, n) in [(1, 2), (1, 3), (2, 4)] {
        for draw in 0..10 {
            let d = rand_gr(&mut rng, k, n, 0.3);
            let yy = d.yang_yang();
            for s in solve_bethe(&d).map_err(|e| e.to_string())? {
                let dev = gradient_check(&s.roots, &yy, 1e-5)
                    .map_err(|e| format!("k={k}, n={n}, draw {draw}: {e}"))?
                    .ok_or(format!("k={k}, n={n}, draw {draw}: root on a logarithmic singularity"))?;
                worst = worst.max(dev);
                count += 1;
                ensure(dev <= 1e-4, || format!("k={k}, n={n}, draw {draw}: gradient {dev:.2e}"))?;
            }
        }
    }
    Ok(format!("{count} roots; max exponentiated gradient {worst:.1e} (tol 1e-4)"))
}

fn c09_powered_system() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let mut worst = 0.0f64;
    for draw in 0..20 {
        let d = rand_gr(&mut rng, 1, 2, 0.5);
        // powered system, cleared: the base polynomial at powered data in y = x²
        let base = cleared_polynomial_k1(&d.powered(2));
        let mut coeffs = vec![C64::new(0.0, 0.0); 2 * base.len() - 1];
        for (i, c) in base.iter().enumerate() {
            coeffs[2 * i] = *c;
        }
        let xs = poly_roots(&coeffs).map_err(|e| e.to_string())?;
        for x in &xs {
            let r = powered_residual(&[*x], &d, 2).map_err(|e| e.to_string())?[0].norm();
            ensure(r <= 1e-8, || format!("draw {draw}: powered residual {r:.2e} at {x}"))?;
        }
        let mut sqrt_set = Vec::new();
        for s in solve_bethe(&d.powered(2)).map_err(|e| e.to_string())? {
            let y = s.roots[0].sqrt();
            sqrt_set.extend([y, -y]);
        }
        let dist = match_multisets(&xs, &sqrt_set).ok_or("root counts differ")?.max_rel;
        worst = worst.max(dist);
        ensure(dist <= 1e-8, || format!("draw {draw}: distance {dist:.2e}"))?;
    }
    Ok(format!("20 draws, 4 roots each; max distance {worst:.1e} (tol 1e-8)"))
}

fn ladder_errors(hbar: C64, z: C64, p: u64) -> Result<Vec<(String, [f64; 3])>, String> {
    let ladder = [1e-2, 3e-3, 1e-3];
    let reports = ladder
        .iter()
        .map(|&e| scalar_vertex_asymptotics(hbar, z, p, e).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((0..reports[0].cases.len())
        .map(|c| (reports[0].cases[c].name.clone(), [0, 1, 2].map(|i| reports[i].cases[c].rel_err)))
        .collect())
}

fn c10_asymptotics() -> Verdict {
    // gating tolerance on the worked example (ħ = 0.7, z = 0.2, p = 2)
    let mut worst = 0.0f64;
    for (name, errs) in ladder_errors(C64::new(0.7, 0.0), C64::new(0.2, 0.0), 2)? {
        ensure(errs.windows(2).all(|w| w[1] < w[0]), || format!("example, {name}: not monotone {errs:?}"))?;
        ensure(errs[2] <= 2e-2, || format!("example, {name}: {:.2e} at eps=1e-3", errs[2]))?;
        worst = worst.max(errs[2]);
    }
    // fixed grid at |z| = 0.25, |ħ| = 0.8: monotone decrease gates, the
    // tolerance is reported. For p = 2 the leading relative correction is
    // about 2ε/(|z||1+ħ|), so the bound is not uniform over the disc.
    let (mut within, mut total, mut grid_worst) = (0, 0, 0.0f64);
    for (theta, phi) in [(0.0, 0.5), (1.0, -1.5), (2.5, 3.0), (-2.0, 1.0)] {
        let (hbar, z) = (C64::from_polar(0.8, phi), C64::from_polar(0.25, theta));
        for (name, errs) in ladder_errors(hbar, z, 2)? {
            ensure(errs.windows(2).all(|w| w[1] < w[0]), || {
                format!("hbar={hbar:.3}, z={z:.3}, {name}: not monotone {errs:?}")
            })?;
            total += 1;
            within += usize::from(errs[2] <= 2e-2);
            grid_worst = grid_worst.max(errs[2]);
        }
    }
    // p = 3: the correction is of order p²ε|z|^{1−p}, above 2e-2 in the disc
    let p3 = ladder_errors(C64::new(0.7, 0.0), C64::new(0.2, 0.0), 3)?;
    let p3_worst = p3.iter().map(|(_, e)| e[2]).fold(0.0, f64::max);
    Ok(format!(
        "example: max error at eps=1e-3 {worst:.1e} (tol 2e-2), ladders monotone; \
         grid: {within}/{total} within tol (worst {grid_worst:.1e}), all monotone; p = 3 example {p3_worst:.1e}"
    ))
}

fn pcurv_grid<const P: u64>(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for n in [2usize, 3] {
        for draw in 0..20 {
            let conn = rand_connection::<P>(rng, n);
            let c = p_curvature(&conn).map_err(|e| format!("N={n}, p={P}, draw {draw}: {e}"))?;
            ensure(c == p_curvature_recursive(&conn), || format!("N={n}, p={P}, draw {draw}: recursion differs"))?;
            let log = log_identity_check(&conn);
            ensure(log.passed, || format!("N={n}, p={P}, draw {draw}: log identity fails at {:?}", log.mismatch))?;
        }
    }
    Ok(())
}

fn c11_pcurvature() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(111);
    pcurv_grid::<2>(&mut rng)?;
    pcurv_grid::<3>(&mut rng)?;
    pcurv_grid::<5>(&mut rng)?;
    pcurv_grid::<7>(&mut rng)?;
    Ok("160 connections: structure, recursion and log identity exact".into())
}

fn c12_stirling() -> Verdict {
    let primes = [2u64, 3, 5, 7, 11, 13, 17, 19, 23];
    for p in primes {
        stirling_row(p).map_err(|e| e.to_string())?;
    }
    Ok(format!("rows {primes:?} all satisfy the congruences"))
}

fn c13_pi_lemma() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(113);
    let mut min_val = i64::MAX;
    for p in [3u64, 5] {
        for draw in 0..20 {
            let n = if draw % 2 == 0 { 2 } else { 3 };
            let mut m = || {
                let vals: Vec<Vec<BigRat>> =
                    (0..n).map(|_| (0..n).map(|_| rat(rng.gen_range(-9..=9), 1)).collect()).collect();
                Mat::from_rows(vals)
            };
            let (alpha, beta) = (m(), m());
            let r = pi_lemma_check(p, &alpha, &beta).map_err(|e| e.to_string())?;
            ensure(r.passed, || format!("p = {p}, draw {draw}: valuation {:?} at {:?}", r.valuation, r.at))?;
            if let Some(v) = r.valuation {
                min_val = min_val.min(v);
            }
        }
    }
    Ok(format!("40 pairs; minimum valuation {min_val} (need >= p+1)"))
}

fn pencil_exhaustive<const P: u64>() -> Result<usize, String> {
    let mut count = 0;
    for u1 in 0..P as i64 {
        for u2 in 0..P as i64 {
            for h in 0..P as i64 {
                let r = pencil_spectrum_check::<P>(Fp::new(u1), Fp::new(u2), Fp::new(h)).map_err(|e| e.to_string())?;
                ensure(r.charpoly_equal, || format!("p = {P}, (u1,u2,h) = ({u1},{u2},{h}): {:?}", r.mismatch))?;
                count += 1;
            }
        }
    }
    Ok(count)
}

fn c14_pencil() -> Verdict {
    let n2 = pencil_exhaustive::<2>()?;
    let n3 = pencil_exhaustive::<3>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(114);
    for draw in 0..20 {
        let mut f = || Fp::<5>::new(rng.gen_range(0..5));
        let (u1, u2, h) = (f(), f(), f());
        let r = pencil_spectrum_check::<5>(u1, u2, h).map_err(|e| e.to_string())?;
        ensure(r.charpoly_equal, || format!("p = 5, draw {draw}: {:?}", r.mismatch))?;
    }
    Ok(format!("all of F_2^3 ({n2}) and F_3^3 ({n3}), 20 draws at p = 5"))
}

fn c15_root_reduction() -> Verdict {
    let mut agree = 0;
    let mut findings = Vec::new();
    for u1 in 0..2 {
        for u2 in 0..2 {
            for h in 0..2 {
                let r = root_reduction_check::<2>(u1, u2, h, 2).map_err(|e| e.to_string())?;
                if r.status == "agree" {
                    agree += 1;
                } else {
                    let fallback = r.primary.charpoly_agree;
                    findings.push(format!("finding at ({u1},{u2},{h}): char poly mod lambda agrees = {fallback}"));
                }
            }
        }
    }
    let conv = format!("{:?}", cohomological_limit().matching_conventions());
    if findings.is_empty() {
        Ok(format!("p = 2, D_z = 2: {agree}/8 lifts agree digitwise (h convention {conv}, s = 1)"))
    } else {
        Err(format!("{agree}/8 agree; {}", findings.join("; ")))
    }
}

fn c16_cohomological_limit() -> Verdict {
    let m = cohomological_limit().matching_conventions();
    if m.len() == 1 {
        let name = match m[0] {
            HConvention::H => "h",
            HConvention::TwoH => "2h",
        };
        Ok(format!("exactly one convention matches: {name}"))
    } else {
        Err(format!("matching conventions {m:?}"))
    }
}

// ---------------------------------------------------------------- slow, non-gating

fn conjugation_p3() -> Verdict {
    let m = QdeModel::new(ModelKind::Tpp1, rat(2, 1), rat(3, 1), rat(5, 1)).map_err(|e| e.to_string())?;
    let r = conjugation_check::<3>(&m, 6).map_err(|e| e.to_string())?;
    ensure(r.is_zero(), || "residual nonzero".into())?;
    Ok("tpp1 p = 3 residual identically zero to z^6".into())
}

// ---------------------------------------------------------------- driver

fn run(c: &Criterion) -> (bool, String, Duration) {
    let start = Instant::now();
    let verdict = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {msg}"))
    });
    let elapsed = start.elapsed();
    match verdict {
        Ok(detail) if elapsed <= c.budget => (true, detail, elapsed),
        Ok(detail) => (false, format!("{detail}; over budget {:?}", c.budget), elapsed),
        Err(detail) => (false, detail, elapsed),
    }
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "quadratic relation over Q(z)", budget: secs(1), run: c01_quadratic_relation },
        Criterion { id: 2, name: "relation at roots of unity", budget: secs(30), run: c02_relation_at_roots },
        Criterion { id: 3, name: "spectrum at zeta_p is Frobenius-twisted", budget: secs(10), run: c03_frobenius_spectrum },
        Criterion { id: 4, name: "intertwiner pole certificates", budget: secs(300), run: c04_pole_certificates },
        Criterion { id: 5, name: "conjugation identity p=2", budget: secs(300), run: c05_conjugation },
        Criterion { id: 6, name: "tpp0 product formula to z^12", budget: secs(60), run: c06_closed_form },
        Criterion { id: 7, name: "Bethe roots and homotopy count", budget: secs(30), run: c07_bethe },
        Criterion { id: 8, name: "Yang-Yang gradient at Bethe roots", budget: secs(30), run: c08_yang_yang },
        Criterion { id: 9, name: "powered Bethe system", budget: secs(5), run: c09_powered_system },
        Criterion { id: 10, name: "scalar vertex asymptotics", budget: secs(5), run: c10_asymptotics },
        Criterion { id: 11, name: "p-curvature structure and log identity", budget: secs(120), run: c11_pcurvature },
        Criterion { id: 12, name: "Stirling rows", budget: secs(1), run: c12_stirling },
        Criterion { id: 13, name: "pi-adic lemma", budget: secs(30), run: c13_pi_lemma },
        Criterion { id: 14, name: "pencil characteristic polynomials", budget: secs(300), run: c14_pencil },
        Criterion { id: 15, name: "root-of-unity reduction digits", budget: secs(300), run: c15_root_reduction },
        Criterion { id: 16, name: "cohomological limit convention", budget: secs(1), run: c16_cohomological_limit },
    ];
    let mut unexpected = Vec::new();
    for c in &criteria {
        let (passed, detail, elapsed) = run(c);
        let known = KNOWN_FAILURES.iter().find(|(id, _)| *id == c.id);
        println!(
            "{} #{:<2} {:<42} {:>9.1} ms  {}",
            if passed { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            elapsed.as_secs_f64() * 1e3,
            detail
        );
        match (passed, known) {
            (false, Some((_, why))) => println!("      known failure: {why}"),
            (false, None) => unexpected.push(format!("#{} failed", c.id)),
            (true, Some(_)) => unexpected.push(format!("#{} is listed as a known failure but passed", c.id)),
            (true, None) => {}
        }
    }
    if std::env::var_os("QKROOTS_SLOW").is_some() {
        let slow = Criterion { id: 0, name: "conjugation identity p=3 (slow)", budget: secs(3600), run: conjugation_p3 };
        let (passed, detail, elapsed) = run(&slow);
        println!("INFO {:<46} {:>9.1} ms  {} {}", slow.name, elapsed.as_secs_f64() * 1e3, if passed { "ok" } else { "failed:" }, detail);
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("acceptance: {}", unexpected.join(", "));
        ExitCode::FAILURE
    }
}
