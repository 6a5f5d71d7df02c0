//! JSON spec configs:
//!
//! ```json
//! { "dim": 4, "mean": 0.0, "cov": { "isotropic": 1.0 } }
//! { "dim": 2, "mean": [0.0, 1.0], "cov": { "diagonal": [1.0, 0.5] } }
//! ```

use std::path::Path;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::latent::{Covariance, GaussianSpec, Mean};

fn err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::SpecConfig {
        path: path.into(),
        message: message.into(),
    }
}

fn number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| err(path, "expected a finite number"))
}

fn number_array(v: &[Value], path: &str, dim: usize) -> Result<Vec<f64>> {
    if v.len() != dim {
        return Err(err(
            path,
            format!("expected {dim} entries, found {}", v.len()),
        ));
    }
    v.iter()
        .enumerate()
        .map(|(i, x)| number(x, &format!("{path}[{i}]")))
        .collect()
}

pub fn parse_spec_value(value: &Value) -> Result<GaussianSpec> {
    let obj = value
        .as_object()
        .ok_or_else(|| err("$", "expected a JSON object"))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "dim" | "mean" | "cov") {
            return Err(err(key.as_str(), "unknown field"));
        }
    }
    let dim = obj
        .get("dim")
        .ok_or_else(|| err("dim", "missing field"))?
        .as_u64()
        .filter(|d| *d >= 1)
        .ok_or_else(|| err("dim", "expected a positive integer"))? as usize;

    let mean = match obj
        .get("mean")
        .ok_or_else(|| err("mean", "missing field"))?
    {
        Value::Array(a) => Mean::Vector(number_array(a, "mean", dim)?),
        other => Mean::Scalar(number(other, "mean")?),
    };

    let cov_obj = obj
        .get("cov")
        .ok_or_else(|| err("cov", "missing field"))?
        .as_object()
        .ok_or_else(|| err("cov", "expected an object with `isotropic` or `diagonal`"))?;
    let cov = parse_cov(cov_obj, dim)?;

    GaussianSpec::new(dim, mean, cov).map_err(|e| err("$", e.to_string()))
}

fn parse_cov(obj: &Map<String, Value>, dim: usize) -> Result<Covariance> {
    if obj.len() != 1 {
        return Err(err(
            "cov",
            "expected exactly one of `isotropic` or `diagonal`",
        ));
    }
    let (key, v) = obj.iter().next().unwrap();
    let positive = |x: f64, path: &str| {
        if x > 0.0 {
            Ok(x)
        } else {
            Err(err(path, "variance must be positive"))
        }
    };
    match key.as_str() {
        "isotropic" => Ok(Covariance::Isotropic(positive(
            number(v, "cov.isotropic")?,
            "cov.isotropic",
        )?)),
        "diagonal" => {
            let a = v
                .as_array()
                .ok_or_else(|| err("cov.diagonal", "expected an array"))?;
            let vs = number_array(a, "cov.diagonal", dim)?;
            for (i, x) in vs.iter().enumerate() {
                positive(*x, &format!("cov.diagonal[{i}]"))?;
            }
            Ok(Covariance::Diagonal(vs))
        }
        "full" => Err(err(
            "cov.full",
            "full covariance matrices are not supported",
        )),
        other => Err(err(format!("cov.{other}"), "unknown covariance form")),
    }
}

pub fn parse_spec_str(s: &str) -> Result<GaussianSpec> {
    let value: Value = serde_json::from_str(s).map_err(|e| err("$", e.to_string()))?;
    parse_spec_value(&value)
}

pub fn read_spec(path: impl AsRef<Path>) -> Result<GaussianSpec> {
    parse_spec_str(&std::fs::read_to_string(path)?)
}

pub fn spec_to_value(spec: &GaussianSpec) -> Value {
    let mean = match spec.mean() {
        Mean::Scalar(m) => json!(m),
        Mean::Vector(v) => json!(v),
    };
    let cov = match spec.cov() {
        Covariance::Isotropic(v) => json!({ "isotropic": v }),
        Covariance::Diagonal(vs) => json!({ "diagonal": vs }),
    };
    json!({ "dim": spec.dim(), "mean": mean, "cov": cov })
}
