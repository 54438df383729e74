use qkroots_core::algebra::{is_prime, rat, BigRat, Fp, Mat, Poly, RatFun, Ring};
use qkroots_core::pcurvature::{
    log_identity_check, p_curvature, p_curvature_recursive, parse_matrix, pencil_spectrum_check, pi_lemma_check,
    root_reduction_check, stirling_row, ConnectionData, Fz,
};
use qkroots_core::with_prime;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{draws, missing, only_fields, primes, settle, supported_prime, Case, Outcome};
use crate::config::{CheckConfig, Mode};
use crate::ConfigError;

/// Entries `num/den` with `deg num ≤ 2`, `deg den ≤ 1`, coefficients uniform in `𝔽_p`.
fn random_connection<const P: u64>(rng: &mut ChaCha8Rng, n: usize) -> Mat<Fz<P>> {
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
    a
}

fn matrix_json<const P: u64>(a: &Mat<Fz<P>>) -> Value {
    let rows: Vec<Vec<String>> = (0..a.rows()).map(|i| (0..a.cols()).map(|j| a.get(i, j).fmt_var("z")).collect()).collect();
    json!(rows)
}

fn structure_case<const P: u64>(a: Mat<Fz<P>>, log: bool) -> Outcome {
    let conn = ConnectionData::<P>::new(a);
    if log {
        let r = log_identity_check(&conn);
        let why = format!("sides differ at (order, row, col) = {:?}", r.mismatch);
        return Outcome::judge(r.passed, json!(r), || why);
    }
    match p_curvature(&conn) {
        Ok(c) => {
            let agrees = c == p_curvature_recursive(&conn);
            Outcome::judge(agrees, json!({"structure": true, "recursion_agrees": agrees}), || {
                "composition and recursion disagree".into()
            })
        }
        Err(e) => Outcome::judge(false, json!({"structure": false}), || e.to_string()),
    }
}

/// `pcurv-structure` and `pcurv-log`: random connections or one read from
/// `matrix_file`.
pub(super) fn structure(config: &CheckConfig, rng: &mut ChaCha8Rng, log: bool) -> Result<(Vec<Case>, Value), ConfigError> {
    only_fields(config, &["primes", "dims", "mode", "draws", "matrix_file"])?;
    let ps = primes(config, &[2, 3, 5, 7], supported_prime)?;
    let text = match &config.matrix_file {
        Some(path) => Some(
            std::fs::read_to_string(path)
                .map_err(|e| ConfigError::new(format!("{}: reading {}: {e}", config.check, path.display())))?,
        ),
        None => None,
    };
    let mode = if text.is_some() { Mode::Explicit } else { Mode::ExactRandomRational };
    if config.mode.is_some_and(|m| m != mode) {
        return Err(ConfigError::new(format!(
            "{}: mode must be {} ({})",
            config.check,
            if text.is_some() { "explicit" } else { "exact-random-rational" },
            if text.is_some() { "matrix_file given" } else { "no matrix_file" }
        )));
    }
    let dims = config.dims.clone().unwrap_or_else(|| vec![2, 3]);
    if dims.is_empty() || dims.iter().any(|&n| !(1..=4).contains(&n)) {
        return Err(ConfigError::new(format!("{}: dims must lie in 1..=4", config.check)));
    }
    let n = draws(config, 20)?;
    let mut cases = Vec::new();
    for &p in &ps {
        let built = with_prime!(p, P => (|| -> Result<(), ConfigError> {
            let mats: Vec<Mat<Fz<P>>> = match &text {
                Some(t) => vec![parse_matrix::<P>(t).map_err(|e| ConfigError::new(format!("{}: {e}", config.check)))?],
                None => dims.iter().flat_map(|&d| (0..n).map(move |_| d)).map(|d| random_connection::<P>(rng, d)).collect(),
            };
            for a in mats {
                let params = json!({"p": P, "dim": a.rows(), "matrix": matrix_json(&a)});
                cases.push(Case::new(params, move || structure_case::<P>(a, log)));
            }
            Ok(())
        })());
        built.expect("prime validated")?;
    }
    let effective = match &config.matrix_file {
        Some(path) => json!({"primes": ps, "mode": mode, "matrix_file": path}),
        None => json!({"primes": ps, "mode": mode, "dims": dims, "draws": n}),
    };
    Ok((cases, effective))
}

pub(super) fn stirling(config: &CheckConfig) -> Result<(Vec<Case>, Value), ConfigError> {
    only_fields(config, &["primes"])?;
    let ps = primes(config, &[2, 3, 5, 7, 11, 13, 17, 19, 23], supported_prime)?;
    let cases = ps
        .iter()
        .map(|&p| {
            Case::new(json!({"p": p}), move || match stirling_row(p) {
                Ok(row) => {
                    let row: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                    Outcome::judge(true, json!({"row": row}), String::new)
                }
                Err(e) => Outcome::judge(false, Value::Null, || e.to_string()),
            })
        })
        .collect();
    Ok((cases, json!({"primes": ps})))
}

fn int_matrix(rows: &[Vec<i64>]) -> Mat<BigRat> {
    Mat::from_rows(rows.iter().map(|r| r.iter().map(|&v| rat(v, 1)).collect()).collect())
}

fn square(config: &CheckConfig, rows: &Option<Vec<Vec<i64>>>, name: &str) -> Result<Vec<Vec<i64>>, ConfigError> {
    let rows = rows.clone().ok_or_else(|| missing(config, name))?;
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows.len()) {
        return Err(ConfigError::new(format!("pi-lemma: params.{name} must be a nonempty square matrix")));
    }
    Ok(rows)
}

pub(super) fn pi_lemma(config: &CheckConfig, rng: &mut ChaCha8Rng) -> Result<(Vec<Case>, Value), ConfigError> {
    only_fields(config, &["primes", "dims", "mode", "draws", "params"])?;
    let ps = primes(config, &[3, 5], |p| p >= 3 && p <= 23 && is_prime(p))?;
    let mode = config.mode_or(Mode::ExactRandomRational, &[Mode::ExactRandomRational, Mode::Explicit])?;
    let dims = config.dims.clone().unwrap_or_else(|| vec![2, 3]);
    if dims.is_empty() || dims.iter().any(|&n| !(1..=6).contains(&n)) {
        return Err(ConfigError::new("pi-lemma: dims must lie in 1..=6"));
    }
    let n = draws(config, 20)?;
    let explicit = if mode == Mode::Explicit {
        let p = config.params();
        let (alpha, beta) = (square(config, &p.alpha, "alpha")?, square(config, &p.beta, "beta")?);
        if alpha.len() != beta.len() {
            return Err(ConfigError::new("pi-lemma: alpha and beta differ in size"));
        }
        Some((alpha, beta))
    } else {
        None
    };
    let mut cases = Vec::new();
    for &p in &ps {
        let pairs: Vec<(Vec<Vec<i64>>, Vec<Vec<i64>>)> = match &explicit {
            Some(pair) => vec![pair.clone()],
            None => (0..n)
                .map(|draw| {
                    let d = dims[draw % dims.len()];
                    let mut m = || (0..d).map(|_| (0..d).map(|_| rng.gen_range(-9..=9)).collect()).collect();
                    (m(), m())
                })
                .collect(),
        };
        for (alpha, beta) in pairs {
            let params = json!({"p": p, "alpha": alpha, "beta": beta});
            cases.push(Case::new(params, move || {
                settle(pi_lemma_check(p, &int_matrix(&alpha), &int_matrix(&beta)).map(|r| {
                    let why = format!("valuation {:?} at {:?}, need > {p}", r.valuation, r.at);
                    Outcome::judge(r.passed, json!(r), || why)
                }))
            }));
        }
    }
    Ok((cases, json!({"primes": ps, "mode": mode, "dims": dims, "draws": n})))
}

/// The explicit `(u1, u2, h)` triple, if the config is in explicit mode.
fn explicit_triple(config: &CheckConfig) -> Result<Option<[i64; 3]>, ConfigError> {
    if config.mode != Some(Mode::Explicit) {
        return Ok(None);
    }
    let q = config.params();
    let get = |v: Option<i64>, name: &str| v.ok_or_else(|| missing(config, name));
    Ok(Some([get(q.u1, "u1")?, get(q.u2, "u2")?, get(q.h, "h")?]))
}

/// Every triple in `𝔽_p³`.
fn all_triples(p: u64) -> Vec<[i64; 3]> {
    let pi = p as i64;
    (0..pi * pi * pi).map(|i| [i / (pi * pi), (i / pi) % pi, i % pi]).collect()
}

pub(super) fn pencil(config: &CheckConfig, rng: &mut ChaCha8Rng) -> Result<(Vec<Case>, Value), ConfigError> {
    only_fields(config, &["primes", "mode", "draws", "params", "exhaustive"])?;
    let ps = primes(config, &[2, 3, 5], supported_prime)?;
    let mode = config.mode_or(Mode::ExactRandomRational, &[Mode::ExactRandomRational, Mode::Explicit])?;
    let n = draws(config, 20)?;
    let mut cases = Vec::new();
    for &p in &ps {
        let exhaustive = config.exhaustive.unwrap_or(p <= 3);
        let set = match explicit_triple(config)? {
            Some(t) => vec![t],
            None if exhaustive => all_triples(p),
            None => (0..n).map(|_| [0, 1, 2].map(|_| rng.gen_range(0..p as i64))).collect(),
        };
        for [u1, u2, h] in set {
            cases.push(Case::new(json!({"p": p, "u1": u1, "u2": u2, "h": h}), move || {
                let r = with_prime!(p, P => pencil_spectrum_check::<P>(Fp::new(u1), Fp::new(u2), Fp::new(h)))
                    .expect("prime validated");
                settle(r.map(|r| {
                    let why = format!("characteristic polynomials differ: {:?}", r.mismatch);
                    Outcome::judge(r.charpoly_equal, json!(r), || why)
                }))
            }));
        }
    }
    let effective = json!({"primes": ps, "mode": mode, "draws": n, "exhaustive": config.exhaustive});
    Ok((cases, effective))
}

pub(super) fn root_reduction(config: &CheckConfig) -> Result<(Vec<Case>, Value), ConfigError> {
    only_fields(config, &["primes", "mode", "params", "dz", "exhaustive"])?;
    let ps = primes(config, &[2], |p| p == 2 || p == 3)?;
    let mode = config.mode_or(Mode::ExactRandomRational, &[Mode::ExactRandomRational, Mode::Explicit])?;
    if config.exhaustive == Some(false) && mode != Mode::Explicit {
        return Err(ConfigError::new("root-reduction: non-explicit runs are exhaustive"));
    }
    let dz = config.dz.unwrap_or(2);
    if dz == 0 {
        return Err(ConfigError::new("root-reduction: dz must be positive"));
    }
    let mut cases = Vec::new();
    for &p in &ps {
        let set = explicit_triple(config)?.map_or_else(|| all_triples(p), |t| vec![t]);
        for [u1, u2, h] in set {
            cases.push(Case::new(json!({"p": p, "u1": u1, "u2": u2, "h": h, "dz": dz}), move || {
                let r = with_prime!(p, P => root_reduction_check::<P>(u1, u2, h, dz)).expect("prime validated");
                settle(r.map(|r| {
                    let data = json!(r);
                    if r.status == "agree" {
                        Outcome::judge(true, data, String::new)
                    } else {
                        let msg = format!("digit mismatch; char poly mod lambda agrees = {}", r.primary.charpoly_agree);
                        Outcome::finding(data, msg)
                    }
                }))
            }));
        }
    }
    Ok((cases, json!({"primes": ps, "mode": mode, "dz": dz})))
}
