//! Scenario files and the JSON encodings of algebra elements. All rationals
//! travel as strings `p/q`, complex scalars as `{"re","im"}` pairs, base
//! elements as `[degree, re, im]` triples and bundle elements as
//! `[weight, base]` pairs.

use crate::base::BaseElem;
use crate::bundle::{build_model, BundleElem, ModelConfig};
use crate::connections::Perturbation;
use crate::horizontal::HorForm;
use crate::scalar::{parse_rational, rational_string, Scalar};
use crate::vh::VHForm;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("scenario is not valid JSON: {0}")]
    Json(String),
    #[error("cannot read scenario file: {0}")]
    Io(String),
}

fn field_err(field: &str, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Field {
        field: field.to_string(),
        message: message.into(),
    }
}

/// A parsed and validated scenario: the model plus named perturbations.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub model: ModelConfig,
    pub perturbations: BTreeMap<String, Perturbation>,
    pub seed: u64,
    pub raw: Value,
}

impl Scenario {
    pub fn from_str(text: &str) -> Result<Self, ScenarioError> {
        let raw: Value = serde_json::from_str(text).map_err(|e| ScenarioError::Json(e.to_string()))?;
        let t_str = raw
            .get("t")
            .and_then(|v| v.as_str())
            .ok_or_else(|| field_err("t", "missing rational string"))?;
        let t = parse_rational(t_str).map_err(|e| field_err("t", e))?;
        let alpha = raw
            .get("alpha")
            .ok_or_else(|| field_err("alpha", "missing base element"))?;
        let alpha = base_from_json(alpha).map_err(|e| field_err("alpha", e))?;
        let window = raw.get("window").and_then(|v| v.as_i64()).unwrap_or(6);
        let seed = raw.get("seed").and_then(|v| v.as_u64()).unwrap_or(0);
        let model = build_model(t, alpha, window).map_err(|e| field_err("t/alpha/window", e.to_string()))?;
        let mut perturbations = BTreeMap::new();
        if let Some(obj) = raw.get("perturbations") {
            let obj = obj
                .as_object()
                .ok_or_else(|| field_err("perturbations", "expected an object of named {a, b} pairs"))?;
            for (name, entry) in obj {
                let a = entry
                    .get("a")
                    .map(bundle_from_json)
                    .transpose()
                    .map_err(|e| field_err(&format!("perturbations.{name}.a"), e))?
                    .unwrap_or_else(BundleElem::zero);
                let b = entry
                    .get("b")
                    .map(bundle_from_json)
                    .transpose()
                    .map_err(|e| field_err(&format!("perturbations.{name}.b"), e))?
                    .unwrap_or_else(BundleElem::zero);
                let pert = Perturbation::new(&model, a, b)
                    .map_err(|e| field_err(&format!("perturbations.{name}"), e.to_string()))?;
                perturbations.insert(name.clone(), pert);
            }
        }
        Ok(Scenario {
            model,
            perturbations,
            seed,
            raw,
        })
    }

    pub fn from_path(path: &str) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io(format!("{path}: {e}")))?;
        Scenario::from_str(&text)
    }
}

pub fn scalar_to_json(s: &Scalar) -> Value {
    json!({ "re": rational_string(&s.re), "im": rational_string(&s.im) })
}

pub fn base_to_json(b: &BaseElem) -> Value {
    Value::Array(
        b.terms()
            .map(|(d, c)| json!([d, rational_string(&c.re), rational_string(&c.im)]))
            .collect(),
    )
}

pub fn base_from_json(v: &Value) -> Result<BaseElem, String> {
    let arr = v.as_array().ok_or("expected a list of [degree, re, im] triples")?;
    let mut out = BaseElem::zero();
    for (i, term) in arr.iter().enumerate() {
        let triple = term.as_array().filter(|t| t.len() == 3).ok_or(format!(
            "term {i}: expected [degree, re, im]"
        ))?;
        let d = triple[0]
            .as_i64()
            .ok_or(format!("term {i}: degree must be an integer"))?;
        let re = triple[1]
            .as_str()
            .ok_or(format!("term {i}: re must be a rational string"))
            .and_then(|s| parse_rational(s).map_err(|e| format!("term {i}: {e}")))?;
        let im = triple[2]
            .as_str()
            .ok_or(format!("term {i}: im must be a rational string"))
            .and_then(|s| parse_rational(s).map_err(|e| format!("term {i}: {e}")))?;
        out = &out + &BaseElem::monomial(d, Scalar::new(re, im));
    }
    Ok(out)
}

pub fn bundle_to_json(b: &BundleElem) -> Value {
    Value::Array(
        b.components()
            .map(|(m, f)| json!([m, base_to_json(f)]))
            .collect(),
    )
}

pub fn bundle_from_json(v: &Value) -> Result<BundleElem, String> {
    let arr = v.as_array().ok_or("expected a list of [weight, base] pairs")?;
    let mut out = BundleElem::zero();
    for (i, term) in arr.iter().enumerate() {
        let pair = term
            .as_array()
            .filter(|t| t.len() == 2)
            .ok_or(format!("component {i}: expected [weight, base]"))?;
        let m = pair[0]
            .as_i64()
            .ok_or(format!("component {i}: weight must be an integer"))?;
        let f = base_from_json(&pair[1]).map_err(|e| format!("component {i}: {e}"))?;
        out = out.add(&BundleElem::embed(m, f));
    }
    Ok(out)
}

pub fn hor_to_json(h: &HorForm) -> Value {
    let keys = ["", "1", "2", "12"];
    let mut obj = serde_json::Map::new();
    for (idx, key) in keys.iter().enumerate() {
        if !h.get(idx).is_zero() {
            obj.insert(key.to_string(), bundle_to_json(h.get(idx)));
        }
    }
    Value::Object(obj)
}

pub fn vh_to_json(v: &VHForm) -> Value {
    json!({ "h0": hor_to_json(&v.h0), "h1": hor_to_json(&v.h1) })
}

/// The canonical regression scenario: `t = 2`, `α = x`, window 6, with the
/// named perturbation fixtures used by the verification suite.
pub fn default_scenario_text() -> String {
    serde_json::to_string_pretty(&json!({
        "t": "2",
        "alpha": [[1, "1", "0"]],
        "window": 6,
        "seed": 42,
        "perturbations": {
            "chi_plus":     { "a": [[1, [[0, "1", "0"]]]], "b": [] },
            "paths_scalar": { "a": [[1, [[0, "1", "1"]]]], "b": [[-1, [[0, "-1", "1"]]]] },
            "hermitian_x2": { "a": [[1, [[2, "1", "0"]]]], "b": [[-1, [[2, "-1/16", "0"]]]] },
            "module_x1":    { "a": [[1, [[1, "1", "0"]]]], "b": [[-1, [[1, "-1/2", "0"]]]] }
        }
    }))
    .expect("static scenario serializes")
}


#[cfg(test)]
mod form_serialization_tests {
    use super::*;
    use crate::bundle::BundleElem;

    #[test]
    fn hor_and_vh_json_shapes() {
        let h = HorForm::component(3, BundleElem::u_pow(1))
            .add(&HorForm::from_bundle(BundleElem::from_base(BaseElem::x_pow(-2))));
        let v = hor_to_json(&h);
        assert!(v.get("12").is_some() && v.get("").is_some() && v.get("1").is_none());
        let vhf = crate::vh::VHForm {
            h0: h.clone(),
            h1: HorForm::one(),
        };
        let j = vh_to_json(&vhf);
        assert_eq!(j["h0"], v);
        assert!(j["h1"].get("").is_some());
        let s = scalar_to_json(&Scalar::from_ratio(-3, 4));
        assert_eq!(s["re"], "-3/4");
        assert_eq!(s["im"], "0");
    }
}
