use num_complex::Complex64 as C64;
use qkroots_core::bethe::{
    bethe_residual, cleared_polynomial_k1, powered_residual, qde_spectrum_match, solve_bethe, spectrum_frobenius_check,
    GrassmannianData,
};
use qkroots_core::numeric::{match_multisets, poly_roots, root_of_unity};
use qkroots_core::vertex::{gradient_check, scalar_vertex_asymptotics};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{c_json, cs_json, draws, missing, only_fields, polar, primes, settle, Case, Outcome};
use crate::config::{CheckConfig, Mode};
use crate::ConfigError;

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn data_json(d: &GrassmannianData) -> Value {
    json!({"k": d.k, "a": cs_json(&d.a), "hbar": c_json(d.hbar), "z": c_json(d.z)})
}

/// Grassmannian parameter sets: `draws` random ones or the explicit one.
fn grassmannian(
    config: &CheckConfig,
    rng: &mut ChaCha8Rng,
    (k, n): (usize, usize),
    default_draws: usize,
) -> Result<(Vec<GrassmannianData>, Mode), ConfigError> {
    let mode = config.mode_or(Mode::NumericRandom, &[Mode::NumericRandom, Mode::Explicit])?;
    let err = |e: qkroots_core::bethe::BetheError| ConfigError::new(format!("{}: {e}", config.check));
    if mode == Mode::Explicit {
        let p = config.params();
        let a = p
            .a
            .ok_or_else(|| missing(config, "a"))?
            .into_iter()
            .map(|s| s.to_complex())
            .collect::<Result<Vec<_>, _>>()?;
        if a.len() != n {
            return Err(ConfigError::new(format!("{}: params.a has {} entries, n = {n}", config.check, a.len())));
        }
        let hbar = p.hbar.ok_or_else(|| missing(config, "hbar"))?.to_complex()?;
        let z = p.z.ok_or_else(|| missing(config, "z"))?.to_complex()?;
        return Ok((vec![GrassmannianData::new(k, a, hbar, z).map_err(err)?], mode));
    }
    let z_max = if k == 1 { 0.5 } else { 0.3 };
    let count = draws(config, default_draws)?;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a: Vec<C64> = (0..n).map(|_| polar(rng, 0.5, 2.0)).collect();
        if let Ok(d) = GrassmannianData::new(k, a, polar(rng, 0.5, 1.5), polar(rng, 0.05, z_max)) {
            out.push(d);
        }
    }
    Ok((out, mode))
}

fn shape(config: &CheckConfig, allowed: &[(usize, usize)]) -> Result<(usize, usize), ConfigError> {
    let kn = (config.k.unwrap_or(allowed[0].0), config.n.unwrap_or(allowed[0].1));
    if !allowed.contains(&kn) {
        return Err(ConfigError::new(format!("{}: (k, n) = {kn:?} not supported; use one of {allowed:?}", config.check)));
    }
    Ok(kn)
}

pub(super) fn solve(config: &CheckConfig, rng: &mut ChaCha8Rng) -> Result<(Vec<Case>, Value), ConfigError> {
    only_fields(config, &["k", "n", "mode", "draws", "params", "tolerances"])?;
    config.allow_tolerances(&["residual", "qde", "distinct"])?;
    let (k, n) = shape(config, &[(1, 2), (1, 3), (2, 4)])?;
    let (tol_res, tol_qde, tol_distinct) =
        (config.tolerance("residual", 1e-10), config.tolerance("qde", 1e-10), config.tolerance("distinct", 1e-8));
    let (sets, mode) = grassmannian(config, rng, (k, n), 20)?;
    let cases = sets
        .into_iter()
        .map(|d| {
            Case::new(data_json(&d), move || {
                settle(solve_case(&d, tol_res, tol_qde, tol_distinct))
            })
        })
        .collect();
    let effective = json!({"k": k, "n": n, "mode": mode, "draws": config.draws.unwrap_or(20),
        "tolerances": {"residual": tol_res, "qde": tol_qde, "distinct": tol_distinct}});
    Ok((cases, effective))
}

fn solve_case(d: &GrassmannianData, tol_res: f64, tol_qde: f64, tol_distinct: f64) -> Result<Outcome, String> {
    let sols = solve_bethe(d).map_err(|e| e.to_string())?;
    let expected = binomial(d.n(), d.k);
    let mut worst_res = 0.0f64;
    for s in &sols {
        let r = bethe_residual(&s.roots, d).map_err(|e| e.to_string())?;
        worst_res = worst_res.max(r.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let mut min_sep = f64::INFINITY;
    for i in 0..sols.len() {
        for j in 0..i {
            let m = match_multisets(&sols[i].roots, &sols[j].roots).ok_or("root counts differ")?;
            min_sep = min_sep.min(m.max_rel);
        }
    }
    let qde = if d.k == 1 && d.n() == 2 {
        Some(qde_spectrum_match(d).map_err(|e| e.to_string())?)
    } else {
        None
    };
    let ok = sols.len() == expected
        && worst_res <= tol_res
        && (sols.len() < 2 || min_sep > tol_distinct)
        && qde.is_none_or(|q| q <= tol_qde);
    let data = json!({
        "solutions": sols.iter().map(|s| cs_json(&s.roots)).collect::<Vec<_>>(),
        "eigenvalues": cs_json(&sols.iter().map(|s| s.eigenvalue).collect::<Vec<_>>()),
        "expected_count": expected,
        "max_residual": worst_res,
        "min_separation": if sols.len() < 2 { None } else { Some(min_sep) },
        "qde_distance": qde,
    });
    Ok(Outcome::judge(ok, data, || {
        format!(
            "{} of {expected} solutions, residual {worst_res:.2e}, separation {min_sep:.2e}, qde {qde:?}",
            sols.len()
        )
    }))
}

pub(super) fn frobenius(config: &CheckConfig, rng: &mut ChaCha8Rng) -> Result<(Vec<Case>, Value), ConfigError> {
    only_fields(config, &["primes", "mode", "draws", "params", "tolerances"])?;
    config.allow_tolerances(&["pairing", "powered"])?;
    let ps = primes(config, &[2, 3], |p| (2..=7).contains(&p) && qkroots_core::algebra::is_prime(p))?;
    let (tol, tol_pow) = (config.tolerance("pairing", 1e-8), config.tolerance("powered", 1e-8));
    let (sets, mode) = grassmannian(config, rng, (1, 2), 20)?;
    let mut cases = Vec::new();
    for &p in &ps {
        for d in &sets {
            let d = d.clone();
            let mut params = data_json(&d);
            params["p"] = json!(p);
            cases.push(Case::new(params, move || settle(frobenius_case(&d, p, tol, tol_pow))));
        }
    }
    let effective = json!({"primes": ps, "mode": mode, "draws": config.draws.unwrap_or(20),
        "tolerances": {"pairing": tol, "powered": tol_pow}});
    Ok((cases, effective))
}

fn frobenius_case(d: &GrassmannianData, p: u64, tol: f64, tol_pow: f64) -> Result<Outcome, String> {
    let report = match spectrum_frobenius_check(d, p, tol) {
        Ok(r) => r,
        Err(e) => return Ok(Outcome::judge(false, Value::Null, || e.to_string())),
    };
    // roots of the powered system: the base polynomial at powered data, in y = x^p
    let pu = p as usize;
    let base = cleared_polynomial_k1(&d.powered(p as u32));
    let mut coeffs = vec![C64::new(0.0, 0.0); pu * (base.len() - 1) + 1];
    for (i, c) in base.iter().enumerate() {
        coeffs[pu * i] = *c;
    }
    let xs = poly_roots(&coeffs).map_err(|e| e.to_string())?;
    let mut worst_res = 0.0f64;
    for x in &xs {
        worst_res = worst_res.max(powered_residual(&[*x], d, p as u32).map_err(|e| e.to_string())?[0].norm());
    }
    let mut roots = Vec::new();
    for s in solve_bethe(&d.powered(p as u32)).map_err(|e| e.to_string())? {
        let y = s.roots[0].powf(1.0 / p as f64);
        roots.extend((0..p).map(|j| y * root_of_unity(p, j)));
    }
    let dist = match_multisets(&xs, &roots).ok_or("root counts differ")?.max_rel;
    let ok = worst_res <= tol_pow && dist <= tol_pow;
    let data = json!({"spectrum": report, "powered_roots": cs_json(&xs), "powered_residual": worst_res, "pth_root_distance": dist});
    Ok(Outcome::judge(ok, data, || format!("powered residual {worst_res:.2e}, p-th root distance {dist:.2e}")))
}

pub(super) fn yang_yang(config: &CheckConfig, rng: &mut ChaCha8Rng) -> Result<(Vec<Case>, Value), ConfigError> {
    only_fields(config, &["k", "n", "mode", "draws", "params", "tolerances"])?;
    config.allow_tolerances(&["gradient"])?;
    let (k, n) = shape(config, &[(1, 2), (1, 3), (2, 4)])?;
    let tol = config.tolerance("gradient", 1e-4);
    let h_step = config.params().h_step.unwrap_or(1e-5);
    if !(h_step > 0.0 && h_step < 1e-1) {
        return Err(ConfigError::new(format!("yangyang-grad: h_step {h_step} outside (0, 0.1)")));
    }
    let (sets, mode) = grassmannian(config, rng, (k, n), 10)?;
    let cases = sets
        .into_iter()
        .map(|d| {
            let mut params = data_json(&d);
            params["h_step"] = json!(h_step);
            Case::new(params, move || {
                settle((|| -> Result<Outcome, String> {
                    let yy = d.yang_yang();
                    let mut devs = Vec::new();
                    for s in solve_bethe(&d).map_err(|e| e.to_string())? {
                        match gradient_check(&s.roots, &yy, h_step).map_err(|e| e.to_string())? {
                            Some(dev) => devs.push(dev),
                            None => {
                                return Ok(Outcome::finding(
                                    json!({"roots": cs_json(&s.roots)}),
                                    "root on a logarithmic singularity".into(),
                                ))
                            }
                        }
                    }
                    let worst = devs.iter().copied().fold(0.0, f64::max);
                    Ok(Outcome::judge(worst <= tol, json!({"deviations": devs, "max_deviation": worst}), || {
                        format!("exponentiated gradient {worst:.2e} > {tol:.0e}")
                    }))
                })())
            })
        })
        .collect();
    let effective = json!({"k": k, "n": n, "mode": mode, "draws": config.draws.unwrap_or(10), "h_step": h_step,
        "tolerances": {"gradient": tol}});
    Ok((cases, effective))
}

pub(super) fn asymptotics(config: &CheckConfig, _rng: &mut ChaCha8Rng) -> Result<(Vec<Case>, Value), ConfigError> {
    only_fields(config, &["primes", "mode", "params", "epsilons", "tolerances"])?;
    config.allow_tolerances(&["relative"])?;
    config.mode_or(Mode::Explicit, &[Mode::Explicit])?;
    let ps = primes(config, &[2], |p| p >= 2 && qkroots_core::algebra::is_prime(p))?;
    let tol = config.tolerance("relative", 2e-2);
    let eps = config.epsilons.clone().unwrap_or_else(|| vec![1e-2, 3e-3, 1e-3]);
    if eps.is_empty() || eps.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(ConfigError::new("vertex-asymptotics: epsilons must lie in (0, 1)"));
    }
    let p = config.params();
    let hbar = p.hbar.map_or(Ok(C64::new(0.7, 0.0)), |s| s.to_complex())?;
    let z = p.z.map_or(Ok(C64::new(0.2, 0.0)), |s| s.to_complex())?;
    let cases = ps
        .iter()
        .map(|&p| {
            let eps = eps.clone();
            Case::new(json!({"p": p, "hbar": c_json(hbar), "z": c_json(z), "epsilons": eps}), move || {
                settle((|| -> Result<Outcome, String> {
                    let reports = eps
                        .iter()
                        .map(|&e| scalar_vertex_asymptotics(hbar, z, p, e).map_err(|e| e.to_string()))
                        .collect::<Result<Vec<_>, _>>()?;
                    let mut ladders = serde_json::Map::new();
                    let mut problems = Vec::new();
                    for c in 0..reports[0].cases.len() {
                        let name = reports[0].cases[c].name.clone();
                        let errs: Vec<f64> = reports.iter().map(|r| r.cases[c].rel_err).collect();
                        if !errs.windows(2).all(|w| w[1] < w[0]) {
                            problems.push(format!("{name}: not monotone"));
                        }
                        let last = errs[errs.len() - 1];
                        if last > tol {
                            problems.push(format!("{name}: {last:.2e} at the smallest epsilon"));
                        }
                        ladders.insert(name, json!(errs));
                    }
                    let data = json!({"rel_err": ladders, "reports": reports});
                    Ok(Outcome::judge(problems.is_empty(), data, || problems.join("; ")))
                })())
            })
        })
        .collect();
    let effective = json!({"primes": ps, "hbar": c_json(hbar), "z": c_json(z), "epsilons": eps,
        "tolerances": {"relative": tol}});
    Ok((cases, effective))
}
