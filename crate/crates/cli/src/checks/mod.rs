//! Case grids for each catalog entry. Builders validate the config, draw all
//! random parameters up front from one seeded stream, and return closures;
//! nothing random happens inside a case.

mod bethe;
mod frobenius;
mod pcurv;
mod qde;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_complex::Complex64 as C64;
use qkroots_core::algebra::{is_prime, rat, BigRat};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::CheckConfig;
use crate::report::{CaseRecord, Status};
use crate::ConfigError;

pub(crate) struct Outcome {
    status: Status,
    data: Value,
    message: Option<String>,
}

impl Outcome {
    fn judge(ok: bool, data: Value, why: impl FnOnce() -> String) -> Self {
        Outcome {
            status: if ok { Status::Pass } else { Status::Fail },
            message: (!ok).then(why),
            data,
        }
    }

    fn finding(data: Value, msg: String) -> Self {
        Outcome {
            status: Status::Finding,
            data,
            message: Some(msg),
        }
    }

    fn error(e: impl std::fmt::Display) -> Self {
        Outcome {
            status: Status::Fail,
            data: Value::Null,
            message: Some(format!("error: {e}")),
        }
    }
}

/// Turns a `Result<Outcome, E>` from a case body into an outcome.
fn settle<E: std::fmt::Display>(r: Result<Outcome, E>) -> Outcome {
    r.unwrap_or_else(Outcome::error)
}

pub(crate) struct Case {
    params: Value,
    job: Box<dyn FnOnce() -> Outcome + Send>,
}

impl Case {
    fn new(params: Value, job: impl FnOnce() -> Outcome + Send + 'static) -> Self {
        Case {
            params,
            job: Box::new(job),
        }
    }

    pub(crate) fn execute(self, index: usize) -> CaseRecord {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(self.job)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            Outcome::error(format!("panicked: {msg}"))
        });
        CaseRecord {
            index,
            parameters: self.params,
            status: outcome.status,
            data: outcome.data,
            message: outcome.message,
            runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        }
    }
}

pub(crate) fn build(config: &CheckConfig, seed: u64) -> Result<(Vec<Case>, Value), ConfigError> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match config.check.as_str() {
        "qde-char" => qde::char_relation(config, &mut rng),
        "qde-spectrum" => qde::spectrum(config, &mut rng),
        "coh-limit" => qde::coh_limit(config),
        "frobenius-pole" => frobenius::pole(config, &mut rng),
        "frobenius-conj" => frobenius::conj(config, &mut rng),
        "tpp0-closed" => frobenius::closed_form(config, &mut rng),
        "bethe-solve" => bethe::solve(config, &mut rng),
        "bethe-frobenius" => bethe::frobenius(config, &mut rng),
        "yangyang-grad" => bethe::yang_yang(config, &mut rng),
        "vertex-asymptotics" => bethe::asymptotics(config, &mut rng),
        "pcurv-structure" => pcurv::structure(config, &mut rng, false),
        "pcurv-log" => pcurv::structure(config, &mut rng, true),
        "stirling" => pcurv::stirling(config),
        "pi-lemma" => pcurv::pi_lemma(config, &mut rng),
        "pencil-spectrum" => pcurv::pencil(config, &mut rng),
        "root-reduction" => pcurv::root_reduction(config),
        other => Err(ConfigError::new(format!("unknown check `{other}`"))),
    }
}

// ---------------------------------------------------------------- helpers

/// Primes supported by the const-generic kernels.
const SUPPORTED: [u64; 9] = [2, 3, 5, 7, 11, 13, 17, 19, 23];

fn primes(config: &CheckConfig, default: &[u64], allowed: impl Fn(u64) -> bool) -> Result<Vec<u64>, ConfigError> {
    let ps = config.primes.clone().unwrap_or_else(|| default.to_vec());
    if ps.is_empty() {
        return Err(ConfigError::new(format!("{}: empty prime list", config.check)));
    }
    for &p in &ps {
        if !allowed(p) {
            return Err(ConfigError::new(format!("{}: p = {p} not supported", config.check)));
        }
    }
    Ok(ps)
}

fn supported_prime(p: u64) -> bool {
    is_prime(p) && SUPPORTED.contains(&p)
}

/// Rejects config fields the check does not read (`check`, `seed` and
/// `output` always apply).
fn only_fields(config: &CheckConfig, allowed: &[&str]) -> Result<(), ConfigError> {
    let v = serde_json::to_value(config).expect("config serializes");
    let map = v.as_object().expect("config is an object");
    for (key, value) in map {
        let set = match value {
            Value::Null => false,
            Value::Object(m) => !m.is_empty(),
            _ => true,
        };
        if set && !["check", "seed", "output"].contains(&key.as_str()) && !allowed.contains(&key.as_str()) {
            return Err(ConfigError::new(format!("{}: field `{key}` does not apply", config.check)));
        }
    }
    Ok(())
}

fn draws(config: &CheckConfig, default: usize) -> Result<usize, ConfigError> {
    match config.draws.unwrap_or(default) {
        0 => Err(ConfigError::new(format!("{}: draws must be positive", config.check))),
        n => Ok(n),
    }
}

fn rand_rat(rng: &mut ChaCha8Rng) -> BigRat {
    loop {
        let n = rng.gen_range(-9i64..=9);
        if n != 0 {
            return rat(n, rng.gen_range(1..=5));
        }
    }
}

fn polar(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> C64 {
    C64::from_polar(rng.gen_range(lo..hi), rng.gen_range(0.0..std::f64::consts::TAU))
}

fn rat_json(r: &BigRat) -> Value {
    json!(r.to_string())
}

fn c_json(c: C64) -> Value {
    json!([c.re, c.im])
}

fn cs_json(cs: &[C64]) -> Value {
    Value::Array(cs.iter().map(|c| c_json(*c)).collect())
}

fn missing(config: &CheckConfig, field: &str) -> ConfigError {
    ConfigError::new(format!("{}: explicit mode needs params.{field}", config.check))
}
