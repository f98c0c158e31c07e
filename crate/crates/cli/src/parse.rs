//! Turning `--model/--family` plus `--param` pairs into core types.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde_json::{Map, Value};
use tra_core::physics::{PotentialModel, Route};
use tra_core::polyfam::FamilyParams;

use crate::CliError;

const INTEGER_KEYS: [&str; 2] = ["ell", "row"];

/// Builds the model through its serde form, so unknown keys and missing
/// fields are reported by name, then checks the model's own constraints.
pub fn model(name: &str, params: &BTreeMap<String, f64>) -> Result<PotentialModel, CliError> {
    let mut obj = Map::new();
    obj.insert("model".into(), Value::String(name.to_string()));
    for (k, &v) in params {
        let value = if INTEGER_KEYS.contains(&k.as_str()) {
            if v < 0.0 || v.fract() != 0.0 {
                return Err(CliError::usage(format!("{k} must be a non-negative integer, got {v}")));
            }
            Value::from(v as u64)
        } else {
            Value::from(v)
        };
        obj.insert(k.clone(), value);
    }
    let model: PotentialModel =
        serde_json::from_value(Value::Object(obj)).map_err(|e| CliError::usage(format!("model '{name}': {e}")))?;
    model.validate()?;
    Ok(model)
}

pub fn route(model: &PotentialModel, requested: Option<&str>) -> Result<Route, CliError> {
    match requested {
        Some(r) => {
            let route: Route = r.parse()?;
            model.validate_for(route)?;
            Ok(route)
        }
        None => model.default_route().ok_or_else(|| CliError::usage(format!("the {} model has no polynomial route", model.name()))),
    }
}

struct Keys<'a> {
    family: &'a str,
    left: BTreeMap<String, f64>,
}

impl Keys<'_> {
    fn req(&mut self, key: &str) -> Result<f64, CliError> {
        self.left.remove(key).ok_or_else(|| CliError::usage(format!("family {} needs --param {key}=...", self.family)))
    }

    fn opt(&mut self, key: &str, default: f64) -> f64 {
        self.left.remove(key).unwrap_or(default)
    }

    fn size(&mut self) -> Result<usize, CliError> {
        let n = self.req("N")?;
        if n < 0.0 || n.fract() != 0.0 {
            return Err(CliError::usage(format!("N must be a non-negative integer, got {n}")));
        }
        Ok(n as usize)
    }

    fn complex(&mut self, key: &str) -> Result<Complex64, CliError> {
        let re = self.req(key)?;
        Ok(Complex64::new(re, self.opt(&format!("{key}_im"), 0.0)))
    }

    fn finish(self) -> Result<(), CliError> {
        match self.left.keys().next() {
            Some(k) => Err(CliError::usage(format!("unknown parameter '{k}' for family {}", self.family))),
            None => Ok(()),
        }
    }
}

/// Family names and their parameter keys; complex `a`, `b` take `a_im`, `b_im`.
pub fn family(name: &str, params: &BTreeMap<String, f64>) -> Result<FamilyParams, CliError> {
    let mut k = Keys { family: name, left: params.clone() };
    let p = match name {
        "mp" | "meixner_pollaczek" => FamilyParams::meixner_pollaczek(k.req("mu")?, k.req("theta")?)?,
        "meixner" => FamilyParams::meixner(k.req("mu")?, k.req("beta")?)?,
        "krawtchouk" => FamilyParams::krawtchouk(k.size()?, k.req("gamma")?)?,
        "cdh" | "continuous_dual_hahn" => FamilyParams::continuous_dual_hahn(k.req("mu")?, k.complex("a")?, k.complex("b")?)?,
        "dual_hahn" => FamilyParams::dual_hahn(k.size()?, k.req("alpha")?, k.req("beta")?)?,
        "wilson" => FamilyParams::wilson(k.req("mu")?, k.req("nu")?, k.complex("a")?, k.complex("b")?)?,
        "racah" => FamilyParams::racah(k.size()?, k.req("alpha")?, k.req("beta")?, k.req("gamma")?)?,
        "h_poly" | "h" => FamilyParams::h_poly(k.req("mu")?, k.req("nu")?, k.req("alpha")?, k.req("theta")?)?,
        other => {
            return Err(CliError::usage(format!(
                "unknown family '{other}' (mp, meixner, krawtchouk, cdh, dual_hahn, wilson, racah, h_poly)"
            )))
        }
    };
    k.finish()?;
    Ok(p)
}
