use qkroots_core::algebra::{is_prime, rat, BigRat, Cyclo, Ring};
use qkroots_core::frobenius::{
    compute_intertwiner, conjugation_check, pole_certificate, reduce_at_zeta, tpp0_closed_form, tpp0_exact_limit,
    IntertwinerOptions, QPower,
};
use qkroots_core::qde::{ModelKind, QdeModel};
use qkroots_core::with_prime;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::qde::{explicit_tpp1, model_json, sample_tpp1};
use super::{draws, missing, only_fields, primes, rand_rat, settle, supported_prime, Case, Outcome};
use crate::config::{CheckConfig, Mode};
use crate::ConfigError;

fn sample_hbar(rng: &mut ChaCha8Rng) -> BigRat {
    loop {
        let h = rand_rat(rng);
        if !Ring::pow(&h, 2).is_one() {
            return h;
        }
    }
}

fn kinds(config: &CheckConfig) -> Result<Vec<ModelKind>, ConfigError> {
    let names = config.models.clone().unwrap_or_else(|| vec!["tpp0".into(), "tpp1".into()]);
    names
        .iter()
        .map(|n| match n.as_str() {
            "tpp0" => Ok(ModelKind::Tpp0),
            "tpp1" => Ok(ModelKind::Tpp1),
            other => Err(ConfigError::new(format!("{}: unknown model `{other}`", config.check))),
        })
        .collect()
}

fn explicit_hbar(config: &CheckConfig) -> Result<BigRat, ConfigError> {
    config.params().hbar.ok_or_else(|| missing(config, "hbar"))?.to_rat()
}

/// Models for one `(kind, p)` cell of the grid.
fn models(
    config: &CheckConfig,
    rng: &mut ChaCha8Rng,
    kind: ModelKind,
    p: u64,
    mode: Mode,
    n: usize,
) -> Result<Vec<QdeModel<BigRat>>, ConfigError> {
    let wrap = |r: Result<QdeModel<BigRat>, qkroots_core::qde::QdeError>| r.map_err(|e| ConfigError::new(format!("{}: {e}", config.check)));
    match (mode, kind) {
        (Mode::Explicit, ModelKind::Tpp0) => Ok(vec![wrap(QdeModel::tpp0(explicit_hbar(config)?))?]),
        (Mode::Explicit, ModelKind::Tpp1) => Ok(vec![explicit_tpp1(config)?]),
        (_, ModelKind::Tpp0) => (0..n).map(|_| wrap(QdeModel::tpp0(sample_hbar(rng)))).collect(),
        (_, ModelKind::Tpp1) => Ok((0..n).map(|_| sample_tpp1(rng, p)).collect()),
    }
}

fn options(config: &CheckConfig) -> Result<IntertwinerOptions, ConfigError> {
    let q_power = match config.q_power.as_deref() {
        None | Some("p_squared") => QPower::PSquared,
        Some("p") => QPower::P,
        Some(other) => return Err(ConfigError::new(format!("{}: q_power `{other}` (use p_squared or p)", config.check))),
    };
    Ok(IntertwinerOptions {
        align: config.align.unwrap_or(true),
        q_power,
    })
}

fn order_for(config: &CheckConfig, p: u64) -> usize {
    config.order.unwrap_or(2 * p as usize)
}

pub(super) fn pole(config: &CheckConfig, rng: &mut ChaCha8Rng) -> Result<(Vec<Case>, Value), ConfigError> {
    only_fields(config, &["primes", "models", "order", "mode", "draws", "params", "align", "q_power"])?;
    let ps = primes(config, &[2, 3], |p| p >= 2 && is_prime(p))?;
    let mode = config.mode_or(Mode::ExactRandomRational, &[Mode::ExactRandomRational, Mode::Explicit])?;
    let n = draws(config, 1)?;
    let opts = options(config)?;
    let exploratory = opts != IntertwinerOptions::default();
    let ks = kinds(config)?;
    let mut cases = Vec::new();
    for &p in &ps {
        let d = order_for(config, p);
        for &kind in &ks {
            for m in models(config, rng, kind, p, mode, n)? {
                let mut params = model_json(&m);
                params["p"] = json!(p);
                params["order"] = json!(d);
                cases.push(Case::new(params, move || {
                    settle(pole_case(&m, p, d, opts, exploratory))
                }));
            }
        }
    }
    let effective = json!({"primes": ps, "models": ks, "mode": mode, "draws": n, "order": config.order, "align": opts.align, "q_power": opts.q_power});
    Ok((cases, effective))
}

fn pole_case(m: &QdeModel<BigRat>, p: u64, d: usize, opts: IntertwinerOptions, exploratory: bool) -> Result<Outcome, String> {
    let raw = compute_intertwiner(m, p, d, opts).map_err(|e| e.to_string())?;
    let cert = pole_certificate(&raw).map_err(|e| e.to_string())?;
    let violations = cert.violations();
    let data = json!({"violations": violations, "positive_control": cert.positive_control, "certificate": cert});
    if cert.passed() {
        Ok(Outcome::judge(true, data, String::new))
    } else if exploratory {
        Ok(Outcome::finding(data, format!("non-default options: Phi_p divides denominators at {violations:?}")))
    } else if violations.is_empty() {
        Ok(Outcome::judge(false, data, || format!("positive control did not fire up to z^{d}")))
    } else {
        Ok(Outcome::judge(false, data, || format!("Phi_p divides denominators at {violations:?}")))
    }
}

pub(super) fn conj(config: &CheckConfig, rng: &mut ChaCha8Rng) -> Result<(Vec<Case>, Value), ConfigError> {
    only_fields(config, &["primes", "models", "order", "mode", "draws", "params"])?;
    let ps = primes(config, &[2], supported_prime)?;
    let mode = config.mode_or(Mode::ExactRandomRational, &[Mode::ExactRandomRational, Mode::Explicit])?;
    let n = draws(config, 1)?;
    let ks = kinds(config)?;
    let mut cases = Vec::new();
    for &p in &ps {
        let d = order_for(config, p);
        for &kind in &ks {
            for m in models(config, rng, kind, p, mode, n)? {
                let mut params = model_json(&m);
                params["p"] = json!(p);
                params["order"] = json!(d);
                cases.push(Case::new(params, move || {
                    let degrees = with_prime!(p, P => conjugation_check::<P>(&m, d).map(|r| {
                        r.coeffs().iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, _)| k).collect::<Vec<_>>()
                    }))
                    .expect("prime validated");
                    settle(degrees.map(|nz| {
                        let data = json!({"zero": nz.is_empty(), "nonzero_degrees": nz});
                        Outcome::judge(nz.is_empty(), data, || format!("residual nonzero at z^{nz:?}"))
                    }))
                }));
            }
        }
    }
    Ok((cases, json!({"primes": ps, "models": ks, "mode": mode, "draws": n, "order": config.order})))
}

fn closed_form_case<const P: u64>(hbar: &BigRat, d: usize, corrected: bool) -> Result<Outcome, String> {
    let m = QdeModel::tpp0(hbar.clone()).map_err(|e| e.to_string())?;
    let raw = compute_intertwiner(&m, P, d, IntertwinerOptions::default()).map_err(|e| e.to_string())?;
    let f = reduce_at_zeta::<P>(&raw).map_err(|e| e.to_string())?;
    let computed: Vec<Cyclo<P>> = f.coeffs().iter().map(|c| c.get(0, 0).clone()).collect();
    let first_diff = |s: &qkroots_core::series::TruncSeries<Cyclo<P>>| (0..=d).find(|&k| &computed[k] != s.coeff(k));
    let product_form = first_diff(&tpp0_closed_form::<P>(hbar, d).map_err(|e| e.to_string())?);
    let exact = first_diff(&tpp0_exact_limit::<P>(hbar, d).map_err(|e| e.to_string())?);
    let data = json!({
        "product_first_difference": product_form,
        "corrected_first_difference": exact,
        "coefficients": computed.iter().map(|c| c.to_poly().fmt_var("zeta")).collect::<Vec<_>>(),
    });
    let (diff, name) = if corrected { (exact, "corrected") } else { (product_form, "product") };
    Ok(Outcome::judge(diff.is_none(), data, || {
        format!("{name} formula differs from the intertwiner at z^{}", diff.unwrap())
    }))
}

pub(super) fn closed_form(config: &CheckConfig, rng: &mut ChaCha8Rng) -> Result<(Vec<Case>, Value), ConfigError> {
    only_fields(config, &["primes", "order", "mode", "draws", "params", "variant"])?;
    let ps = primes(config, &[2, 3, 5], supported_prime)?;
    let mode = config.mode_or(Mode::Explicit, &[Mode::ExactRandomRational, Mode::Explicit])?;
    let n = draws(config, 1)?;
    let d = config.order.unwrap_or(12);
    let corrected = match config.variant.as_deref() {
        None | Some("product") => false,
        Some("corrected") => true,
        Some(other) => return Err(ConfigError::new(format!("tpp0-closed: variant `{other}` (use product or corrected)"))),
    };
    let hbars: Vec<BigRat> = match mode {
        Mode::Explicit => vec![config.params().hbar.map_or(Ok(rat(5, 1)), |h| h.to_rat())?],
        _ => (0..n).map(|_| sample_hbar(rng)).collect(),
    };
    for h in &hbars {
        QdeModel::tpp0(h.clone()).map_err(|e| ConfigError::new(format!("tpp0-closed: {e}")))?;
    }
    let mut cases = Vec::new();
    for &p in &ps {
        for h in &hbars {
            let h = h.clone();
            let params = json!({"p": p, "hbar": h.to_string(), "order": d});
            cases.push(Case::new(params, move || {
                settle(with_prime!(p, P => closed_form_case::<P>(&h, d, corrected)).expect("prime validated"))
            }));
        }
    }
    let variant = if corrected { "corrected" } else { "product" };
    Ok((cases, json!({"primes": ps, "order": d, "mode": mode, "variant": variant})))
}
