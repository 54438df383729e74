//! Batch runner for the qkroots checks: JSON configuration in, JSON report
//! out, deterministic for a fixed seed.

pub mod catalog;
mod checks;
pub mod config;
pub mod report;

use std::time::Instant;

use rayon::prelude::*;
use serde_json::Value;

pub use catalog::{CatalogEntry, CATALOG};
pub use config::{parse_config, CheckConfig, Mode, Params, Scalar};
pub use report::{CaseRecord, CheckReport, Conventions, RunReport, Status, SCHEMA_VERSION};

use checks::Case;

/// Invalid configuration: unknown check, malformed file, unusable parameters.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

impl ConfigError {
    pub fn new(msg: impl Into<String>) -> Self {
        ConfigError(msg.into())
    }
}

pub fn list_checks() -> &'static [CatalogEntry] {
    CATALOG
}

pub fn conventions() -> Conventions {
    let h = match qkroots_core::qde::cohomological_limit().matching_conventions().as_slice() {
        [qkroots_core::qde::HConvention::H] => "h",
        [qkroots_core::qde::HConvention::TwoH] => "2h",
        _ => "ambiguous",
    };
    Conventions {
        q_restoration: "M(z, q) = M(zq)".into(),
        powered_q: "q^(p^2), powered solution conjugated into the frame of L^p".into(),
        h_convention: h.into(),
        uniformizer: "lambda = zeta_p - 1".into(),
        sqrt_hbar_branch: "principal".into(),
        product_order: "M(z) M(zq) ... M(zq^(p-1)); reversed order for the conjugation identity".into(),
        pencil_factor: "s^p - s".into(),
        connection: "A(z) = C(z)/z".into(),
    }
}

/// Builds the case grid for `config` (validating it) without running it.
fn plan(config: &CheckConfig, seed: u64) -> Result<(Vec<Case>, Value), ConfigError> {
    catalog::find(&config.check).ok_or_else(|| {
        let names: Vec<&str> = CATALOG.iter().map(|e| e.name).collect();
        ConfigError::new(format!("unknown check `{}`; available: {}", config.check, names.join(", ")))
    })?;
    checks::build(config, seed)
}

/// Runs one check on `jobs` worker threads (0 = rayon default). Cases are
/// assembled in index order, so the report does not depend on scheduling.
pub fn run_check(config: &CheckConfig, seed: u64, jobs: usize) -> Result<CheckReport, ConfigError> {
    let entry = catalog::find(&config.check);
    let (cases, effective) = plan(config, seed)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| ConfigError::new(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let records: Vec<CaseRecord> = pool.install(|| {
        cases
            .into_par_iter()
            .enumerate()
            .map(|(index, case)| case.execute(index))
            .collect()
    });
    let status = report::aggregate(records.iter().map(|r| r.status));
    Ok(CheckReport {
        check: config.check.clone(),
        seed,
        config: effective,
        status,
        cases: records,
        budget_ms: entry.map_or(0, |e| e.default_budget_ms),
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Runs every config in order. `seed` overrides per-config seeds; otherwise
/// each config uses its own seed or 0.
pub fn run_all(configs: &[CheckConfig], seed: Option<u64>, jobs: usize) -> Result<RunReport, ConfigError> {
    // validate everything before running anything
    for c in configs {
        plan(c, seed.or(c.seed).unwrap_or(0))?;
    }
    let checks = configs
        .iter()
        .map(|c| run_check(c, seed.or(c.seed).unwrap_or(0), jobs))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
        conventions: conventions(),
        status: report::aggregate(checks.iter().map(|c| c.status)),
        checks,
    })
}
