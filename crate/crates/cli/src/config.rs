use std::collections::BTreeMap;
use std::path::PathBuf;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use qkroots_core::algebra::BigRat;
use serde::{Deserialize, Serialize};

use crate::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    ExactRandomRational,
    NumericRandom,
    Explicit,
}

/// A scalar in a config file: an integer, a float, a rational string such
/// as `"-3/7"`, or a complex pair `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Float(f64),
    Text(String),
    Pair([f64; 2]),
}

impl Scalar {
    pub fn to_rat(&self) -> Result<BigRat, ConfigError> {
        match self {
            Scalar::Int(n) => Ok(BigRat::from_integer((*n).into())),
            Scalar::Text(s) => parse_rat(s),
            other => Err(ConfigError::new(format!("expected an exact rational, got {other:?}"))),
        }
    }

    pub fn to_complex(&self) -> Result<Complex64, ConfigError> {
        match self {
            Scalar::Int(n) => Ok(Complex64::new(*n as f64, 0.0)),
            Scalar::Float(x) => Ok(Complex64::new(*x, 0.0)),
            Scalar::Pair([re, im]) => Ok(Complex64::new(*re, *im)),
            Scalar::Text(s) => {
                let r = parse_rat(s)?;
                Ok(Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0))
            }
        }
    }
}

fn parse_rat(s: &str) -> Result<BigRat, ConfigError> {
    let bad = || ConfigError::new(format!("bad rational `{s}`"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRat::new(n, d))
}

/// Explicit parameters; which fields apply depends on the check.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub a1: Option<Scalar>,
    pub a2: Option<Scalar>,
    pub hbar: Option<Scalar>,
    pub z: Option<Scalar>,
    /// Equivariant parameters `a_1..a_n` for the Bethe checks.
    pub a: Option<Vec<Scalar>>,
    pub u1: Option<i64>,
    pub u2: Option<i64>,
    pub h: Option<i64>,
    pub alpha: Option<Vec<Vec<i64>>>,
    pub beta: Option<Vec<Vec<i64>>>,
    /// Finite-difference step for the gradient check.
    pub h_step: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    pub check: String,
    pub primes: Option<Vec<u64>>,
    /// Truncation order in `z` (`D`).
    pub order: Option<usize>,
    /// Truncation order for the root-of-unity reduction (`D_z`).
    pub dz: Option<usize>,
    pub mode: Option<Mode>,
    pub draws: Option<usize>,
    pub seed: Option<u64>,
    /// Check-specific tolerance overrides, e.g. `{"pairing": 1e-8}`.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub params: Option<Params>,
    /// `"tpp0"` / `"tpp1"`.
    pub models: Option<Vec<String>>,
    pub k: Option<usize>,
    pub n: Option<usize>,
    pub dims: Option<Vec<usize>>,
    /// Plain-text connection matrix for the p-curvature checks.
    pub matrix_file: Option<PathBuf>,
    pub epsilons: Option<Vec<f64>>,
    /// Conjugate the powered solution into the frame of `L^p`.
    pub align: Option<bool>,
    /// `"p_squared"` (default) or `"p"`.
    pub q_power: Option<String>,
    /// `tpp0-closed`: `"product"` (default) or `"corrected"`.
    pub variant: Option<String>,
    pub exhaustive: Option<bool>,
    pub output: Option<PathBuf>,
}

/// Parses a config file holding one check object or an array of them.
pub fn parse_config(text: &str) -> Result<Vec<CheckConfig>, ConfigError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| ConfigError::new(format!("malformed JSON: {e}")))?;
    let parse_one = |v: serde_json::Value| {
        serde_json::from_value::<CheckConfig>(v).map_err(|e| ConfigError::new(format!("malformed config: {e}")))
    };
    match value {
        serde_json::Value::Array(items) => items.into_iter().map(parse_one).collect(),
        other => Ok(vec![parse_one(other)?]),
    }
}

impl CheckConfig {
    pub fn new(check: &str) -> Self {
        CheckConfig {
            check: check.to_string(),
            ..Default::default()
        }
    }

    pub fn tolerance(&self, key: &str, default: f64) -> f64 {
        self.tolerances.get(key).copied().unwrap_or(default)
    }

    pub fn params(&self) -> Params {
        self.params.clone().unwrap_or_default()
    }

    /// Rejects tolerance keys the check does not read.
    pub fn allow_tolerances(&self, keys: &[&str]) -> Result<(), ConfigError> {
        match self.tolerances.keys().find(|k| !keys.contains(&k.as_str())) {
            Some(k) => Err(ConfigError::new(format!("{}: unknown tolerance `{k}` (expected one of {keys:?})", self.check))),
            None => Ok(()),
        }
    }

    pub fn mode_or(&self, default: Mode, allowed: &[Mode]) -> Result<Mode, ConfigError> {
        let m = self.mode.unwrap_or(default);
        if allowed.contains(&m) {
            Ok(m)
        } else {
            Err(ConfigError::new(format!("{}: mode {m:?} not supported (use one of {allowed:?})", self.check)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qkroots_core::algebra::rat;

    #[test]
    fn scalars() {
        assert_eq!(Scalar::Text("-3/6".into()).to_rat().unwrap(), rat(-1, 2));
        assert_eq!(Scalar::Int(4).to_rat().unwrap(), rat(4, 1));
        assert!(Scalar::Text("1/0".into()).to_rat().is_err());
        assert!(Scalar::Float(0.5).to_rat().is_err());
        assert_eq!(Scalar::Pair([1.0, -2.0]).to_complex().unwrap(), Complex64::new(1.0, -2.0));
        assert_eq!(Scalar::Text("1/4".into()).to_complex().unwrap(), Complex64::new(0.25, 0.0));
    }

    #[test]
    fn single_and_batch() {
        let one = parse_config(r#"{"check": "stirling", "primes": [2, 3]}"#).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].primes, Some(vec![2, 3]));
        let many = parse_config(r#"[{"check": "stirling"}, {"check": "coh-limit"}]"#).unwrap();
        assert_eq!(many.len(), 2);
        let err = parse_config(r#"{"check": "stirling", "prime": [2]}"#).unwrap_err();
        assert!(err.to_string().contains("prime"), "{err}");
        assert!(parse_config("{").is_err());
    }

    #[test]
    fn explicit_params() {
        let c = parse_config(
            r#"{"check": "qde-char", "mode": "explicit", "params": {"a1": 2, "a2": "3", "hbar": "5/1"}}"#,
        )
        .unwrap();
        let p = c[0].params();
        assert_eq!(p.a2.unwrap().to_rat().unwrap(), rat(3, 1));
        assert_eq!(c[0].mode, Some(Mode::Explicit));
    }
}
