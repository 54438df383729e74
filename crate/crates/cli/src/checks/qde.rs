use num_complex::Complex64 as C64;
use qkroots_core::algebra::{BigRat, Cyclo, Ring};
use qkroots_core::numeric::{eigenvalues, match_multisets, root_of_unity};
use qkroots_core::qde::{
    characteristic_residual_cleared, cohomological_limit, iterated_product_at, iterated_product_cleared, HConvention,
    ModelKind, ProductOrder, QdeModel,
};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{c_json, cs_json, draws, missing, only_fields, polar, primes, rand_rat, rat_json, settle, supported_prime, Case, Outcome};
use crate::config::{CheckConfig, Mode};
use crate::ConfigError;

/// `T*P¹` over ℚ with `a1^p ≠ a2^p` and `ħ^{2p} ≠ 1`.
pub(super) fn sample_tpp1(rng: &mut ChaCha8Rng, p: u64) -> QdeModel<BigRat> {
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

/// Explicit `T*P¹` parameters from the config.
pub(super) fn explicit_tpp1(config: &CheckConfig) -> Result<QdeModel<BigRat>, ConfigError> {
    let p = config.params();
    let get = |v: Option<crate::Scalar>, name: &str| v.ok_or_else(|| missing(config, name))?.to_rat();
    let m = QdeModel::new(ModelKind::Tpp1, get(p.a1, "a1")?, get(p.a2, "a2")?, get(p.hbar, "hbar")?)
        .map_err(|e| ConfigError::new(format!("{}: {e}", config.check)))?;
    Ok(m)
}

pub(super) fn model_json(m: &QdeModel<BigRat>) -> Value {
    match m.kind {
        ModelKind::Tpp0 => json!({"model": "tpp0", "hbar": rat_json(&m.hbar)}),
        ModelKind::Tpp1 => json!({"model": "tpp1", "a1": rat_json(&m.a1), "a2": rat_json(&m.a2), "hbar": rat_json(&m.hbar)}),
    }
}

fn relation_holds(m: &QdeModel<BigRat>, p: u64) -> Option<bool> {
    if p == 1 {
        let (num, den) = iterated_product_cleared(m, 1, &BigRat::one());
        return Some(characteristic_residual_cleared(&num, &den, &m.a1, &m.a2, &m.hbar, 1).is_zero());
    }
    qkroots_core::with_prime!(p, P => {
        let mc = m.map(|x| Cyclo::<P>::from_rat(x.clone()));
        let (num, den) = iterated_product_cleared(&mc, P, &Cyclo::zeta());
        characteristic_residual_cleared(&num, &den, &mc.a1, &mc.a2, &mc.hbar, P).is_zero()
    })
}

pub(super) fn char_relation(config: &CheckConfig, rng: &mut ChaCha8Rng) -> Result<(Vec<Case>, Value), ConfigError> {
    only_fields(config, &["primes", "mode", "draws", "params"])?;
    let ps = primes(config, &[1, 2, 3, 5], |p| p == 1 || supported_prime(p))?;
    let mode = config.mode_or(Mode::ExactRandomRational, &[Mode::ExactRandomRational, Mode::Explicit])?;
    let n = draws(config, 10)?;
    let mut cases = Vec::new();
    for &p in &ps {
        let models = match mode {
            Mode::Explicit => vec![explicit_tpp1(config)?],
            _ => (0..n).map(|_| sample_tpp1(rng, p)).collect(),
        };
        for m in models {
            let mut params = model_json(&m);
            params["p"] = json!(p);
            cases.push(Case::new(params, move || {
                let ok = relation_holds(&m, p).expect("prime validated");
                Outcome::judge(ok, json!({"residual_zero": ok}), || "residual matrix is not zero".into())
            }));
        }
    }
    Ok((cases, json!({"primes": ps, "mode": mode, "draws": n})))
}

pub(super) fn spectrum(config: &CheckConfig, rng: &mut ChaCha8Rng) -> Result<(Vec<Case>, Value), ConfigError> {
    only_fields(config, &["primes", "mode", "draws", "params", "tolerances"])?;
    config.allow_tolerances(&["pairing", "independence"])?;
    let ps = primes(config, &[2, 3, 5, 7], |p| p >= 2 && qkroots_core::algebra::is_prime(p))?;
    let mode = config.mode_or(Mode::NumericRandom, &[Mode::NumericRandom, Mode::Explicit])?;
    let n = draws(config, 50)?;
    let (tol, tol_ind) = (config.tolerance("pairing", 1e-8), config.tolerance("independence", 1e-10));
    let explicit = if mode == Mode::Explicit {
        let p = config.params();
        let get = |v: Option<crate::Scalar>, name: &str| v.ok_or_else(|| missing(config, name))?.to_complex();
        Some([get(p.a1, "a1")?, get(p.a2, "a2")?, get(p.hbar, "hbar")?, get(p.z, "z")?])
    } else {
        None
    };
    let mut cases = Vec::new();
    for &p in &ps {
        let draws: Vec<[C64; 4]> = match explicit {
            Some(e) => vec![e],
            None => (0..n)
                .map(|_| [polar(rng, 0.5, 2.0), polar(rng, 0.5, 2.0), polar(rng, 0.5, 2.0), polar(rng, 0.05, 0.5)])
                .collect(),
        };
        for [a1, a2, h, z] in draws {
            let params = json!({"p": p, "a1": c_json(a1), "a2": c_json(a2), "hbar": c_json(h), "z": c_json(z)});
            cases.push(Case::new(params, move || settle(spectrum_case(p, a1, a2, h, z, tol, tol_ind))));
        }
    }
    let effective = json!({"primes": ps, "mode": mode, "draws": n, "tolerances": {"pairing": tol, "independence": tol_ind}});
    Ok((cases, effective))
}

fn spectrum_case(p: u64, a1: C64, a2: C64, h: C64, z: C64, tol: f64, tol_ind: f64) -> Result<Outcome, String> {
    let pu = p as u32;
    let m = QdeModel::new(ModelKind::Tpp1, a1, a2, h).map_err(|e| e.to_string())?;
    let spectrum = |k: u64| -> Result<Vec<C64>, String> {
        let prod = iterated_product_at(&m, &z, &root_of_unity(p, k), p, ProductOrder::Ascending).ok_or("z at a pole of the product")?;
        eigenvalues(&prod).map_err(|e| e.to_string())
    };
    let ev = spectrum(1)?;
    let powered = QdeModel::new(ModelKind::Tpp1, a1.powu(pu), a2.powu(pu), h.powu(pu)).map_err(|e| e.to_string())?;
    let one = C64::new(1.0, 0.0);
    let target = eigenvalues(&powered.matrix_at(&z.powu(pu), &one).ok_or("z^p at a pole of the powered operator")?)
        .map_err(|e| e.to_string())?;
    let max_rel = match_multisets(&ev, &target).ok_or("spectra of different sizes")?.max_rel;
    let independence = if p >= 3 {
        Some(match_multisets(&ev, &spectrum(2)?).ok_or("spectra of different sizes")?.max_rel)
    } else {
        None
    };
    let ok = max_rel <= tol && independence.is_none_or(|d| d <= tol_ind);
    let data = json!({"product": cs_json(&ev), "powered": cs_json(&target), "max_rel": max_rel, "root_independence": independence});
    Ok(Outcome::judge(ok, data, || format!("pairing {max_rel:.3e}, zeta vs zeta^2 {independence:?}")))
}

pub(super) fn coh_limit(config: &CheckConfig) -> Result<(Vec<Case>, Value), ConfigError> {
    only_fields(config, &[])?;
    let case = Case::new(json!({}), || {
        let c = cohomological_limit();
        let names: Vec<&str> = c
            .matching_conventions()
            .iter()
            .map(|h| match h {
                HConvention::H => "h",
                HConvention::TwoH => "2h",
            })
            .collect();
        let fmt = |m: &qkroots_core::algebra::Mat<qkroots_core::algebra::RatFun<BigRat>>| m.fmt_with(|e| e.fmt_var("z"));
        let data = json!({
            "matching": names,
            "d_u1": fmt(&c.du1),
            "d_u2": fmt(&c.du2),
            "d_h": fmt(&c.dh),
        });
        if names.len() == 1 {
            Outcome::judge(true, data, String::new)
        } else {
            Outcome::finding(data, format!("{} conventions match", names.len()))
        }
    });
    Ok((vec![case], json!({})))
}
