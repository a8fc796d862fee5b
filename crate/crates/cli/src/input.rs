//! Reader for Wigner-function input files.
//!
//! ```json
//! {"type": "thermal", "c": 1.0, "convention": "vacuum-identity"}
//! {"type": "fock", "n": 3, "convention": "vacuum-identity"}
//! {"type": "extremal", "mu_g": 0.5, "branch": "two_root", "param": 1.2, "convention": "vacuum-identity"}
//! {"type": "extremal", "a1": 0.1, "a2": 0.2, "a3": -0.01, "c": 1.0, "r_lo": 0.5, "r_hi": 4.0, "convention": "vacuum-identity"}
//! {"type": "sampled", "r": [0.0, 0.1, ...], "w": [0.3, 0.29, ...], "convention": "vacuum-identity"}
//! ```
//!
//! `vacuum-identity` means the vacuum has covariance matrix `I` and
//! `W = (1/π)·e^{−(x²+p²)}`.

use serde_json::{Map, Value};
use wigner_bounds::extremal::solve;
use wigner_bounds::{Branch, Error, ExtremalForm, ExtremalSpec, RadialFunction, SampledRadial};

use crate::CliError;

pub const CONVENTION: &str = "vacuum-identity";

/// A parsed input file.
#[derive(Debug, Clone)]
pub struct WignerInput {
    pub kind: &'static str,
    pub function: RadialFunction,
}

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn check_fields(obj: &Map<String, Value>, allowed: &[&str]) -> Result<(), CliError> {
    for key in obj.keys() {
        if key != "type" && key != "convention" && !allowed.contains(&key.as_str()) {
            return Err(schema(format!("field `{key}`: not recognised for this type")));
        }
    }
    Ok(())
}

fn number(obj: &Map<String, Value>, field: &str) -> Result<f64, CliError> {
    match obj.get(field) {
        None => Err(schema(format!("field `{field}`: missing"))),
        Some(v) => v
            .as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| schema(format!("field `{field}`: expected a finite number, got {v}"))),
    }
}

fn numbers(obj: &Map<String, Value>, field: &str) -> Result<Vec<f64>, CliError> {
    let arr = obj
        .get(field)
        .ok_or_else(|| schema(format!("field `{field}`: missing")))?
        .as_array()
        .ok_or_else(|| schema(format!("field `{field}`: expected an array of numbers")))?;
    arr.iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_f64()
                .filter(|x| x.is_finite())
                .ok_or_else(|| schema(format!("field `{field}[{i}]`: expected a finite number, got {v}")))
        })
        .collect()
}

/// Re-labels library validation errors with the input field they came from.
fn field_error(field: &str, e: Error) -> CliError {
    match e {
        Error::ParamOutOfRange { name, value, lo, hi } => {
            let field = if name == "mu_g" { name } else { field };
            schema(format!("field `{field}`: {value} outside [{lo}, {hi}]"))
        }
        Error::InvalidInput(msg) => schema(format!("field `{field}`: {msg}")),
        other => CliError::from(other),
    }
}

pub fn parse_branch(s: &str) -> Option<Branch> {
    match s {
        "two_root" | "two-root" => Some(Branch::TwoRoot),
        "one_root" | "one-root" => Some(Branch::OneRoot),
        _ => None,
    }
}

pub fn parse_wigner_file(text: &str) -> Result<WignerInput, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| schema(format!("invalid JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| schema("top level: expected a JSON object"))?;
    match obj.get("convention") {
        None => return Err(schema("field `convention`: missing (expected \"vacuum-identity\")")),
        Some(Value::String(s)) if s == CONVENTION => {}
        Some(other) => {
            return Err(schema(format!(
                "field `convention`: expected \"{CONVENTION}\", got {other}"
            )))
        }
    }
    let kind = obj
        .get("type")
        .ok_or_else(|| schema("field `type`: missing"))?
        .as_str()
        .ok_or_else(|| schema("field `type`: expected a string"))?;
    match kind {
        "thermal" => {
            check_fields(obj, &["c"])?;
            let c = number(obj, "c")?;
            let function = RadialFunction::thermal(c).map_err(|e| field_error("c", e))?;
            Ok(WignerInput {
                kind: "thermal",
                function,
            })
        }
        "fock" => {
            check_fields(obj, &["n"])?;
            let n = obj
                .get("n")
                .ok_or_else(|| schema("field `n`: missing"))?
                .as_u64()
                .and_then(|n| u32::try_from(n).ok())
                .ok_or_else(|| schema("field `n`: expected a non-negative integer"))?;
            Ok(WignerInput {
                kind: "fock",
                function: RadialFunction::Fock { n },
            })
        }
        "extremal" if obj.contains_key("branch") => {
            check_fields(obj, &["mu_g", "branch", "param"])?;
            let mu_g = number(obj, "mu_g")?;
            let param = number(obj, "param")?;
            let branch = obj
                .get("branch")
                .and_then(Value::as_str)
                .and_then(parse_branch)
                .ok_or_else(|| schema("field `branch`: expected \"two_root\" or \"one_root\""))?;
            let spec = ExtremalSpec::new(mu_g, branch, param).map_err(|e| field_error("param", e))?;
            let solution = solve(&spec)?;
            Ok(WignerInput {
                kind: "extremal",
                function: solution.radial(),
            })
        }
        "extremal" => {
            let fields = ["a1", "a2", "a3", "c", "r_lo", "r_hi"];
            check_fields(obj, &fields)?;
            let [a1, a2, a3, c, r_lo, r_hi] = fields.map(|f| number(obj, f));
            let (c, r_lo, r_hi) = (c?, r_lo?, r_hi?);
            let culprit = if c <= 0.0 {
                "c"
            } else if r_lo < 0.0 {
                "r_lo"
            } else {
                "r_hi"
            };
            let form =
                ExtremalForm::from_coefficients(a1?, a2?, a3?, c, r_lo, r_hi).map_err(|e| field_error(culprit, e))?;
            Ok(WignerInput {
                kind: "extremal",
                function: RadialFunction::Extremal(form),
            })
        }
        "sampled" => {
            check_fields(obj, &["r", "w"])?;
            let r = numbers(obj, "r")?;
            let w = numbers(obj, "w")?;
            let field = if r.len() != w.len() { "w" } else { "r" };
            let sampled = SampledRadial::new(r, w).map_err(|e| field_error(field, e))?;
            Ok(WignerInput {
                kind: "sampled",
                function: RadialFunction::Sampled(sampled),
            })
        }
        other => Err(schema(format!(
            "field `type`: unknown type \"{other}\" (expected thermal, extremal, fock or sampled)"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn message(text: &str) -> String {
        match parse_wigner_file(text) {
            Err(CliError::Usage(m)) => m,
            other => panic!("expected a schema error, got {other:?}"),
        }
    }

    #[test]
    fn thermal_round_trip() {
        let w = parse_wigner_file(r#"{"type":"thermal","c":1.5,"convention":"vacuum-identity"}"#).unwrap();
        assert_eq!(w.function, RadialFunction::Thermal { c: 1.5 });
    }

    #[test]
    fn convention_is_mandatory() {
        assert!(message(r#"{"type":"thermal","c":1.0}"#).contains("`convention`"));
        assert!(message(r#"{"type":"thermal","c":1.0,"convention":"hbar-1"}"#).contains("`convention`"));
    }

    #[test]
    fn errors_name_the_field() {
        let base = r#""convention":"vacuum-identity""#;
        assert!(message(&format!(r#"{{"type":"thermal","c":-1,{base}}}"#)).contains("`c`"));
        assert!(message(&format!(r#"{{"type":"thermal",{base}}}"#)).contains("`c`"));
        assert!(message(&format!(r#"{{"type":"fock","n":-1,{base}}}"#)).contains("`n`"));
        assert!(message(&format!(r#"{{"type":"blob",{base}}}"#)).contains("`type`"));
        assert!(message(&format!(r#"{{"type":"thermal","c":1,"extra":2,{base}}}"#)).contains("`extra`"));
        assert!(message(&format!(r#"{{"type":"sampled","r":[0,1,2],"w":[1,1,1],{base}}}"#)).contains("`r`"));
        assert!(message(&format!(r#"{{"type":"sampled","r":[0,1,2,3],"w":[1,1,1],{base}}}"#)).contains("`w`"));
        assert!(message(&format!(r#"{{"type":"sampled","r":[0,2,1,3],"w":[1,1,1,1],{base}}}"#)).contains("`r`"));
        assert!(message(&format!(
            r#"{{"type":"extremal","mu_g":0.5,"branch":"two_root","param":5,{base}}}"#
        ))
        .contains("`param`"));
        assert!(message(&format!(
            r#"{{"type":"extremal","a1":0,"a2":0,"a3":0,"c":1,"r_lo":2,"r_hi":1,{base}}}"#
        ))
        .contains("`r_hi`"));
        assert!(message(&format!(
            r#"{{"type":"extremal","mu_g":0.5,"branch":"sideways","param":1,{base}}}"#
        ))
        .contains("`branch`"));
    }

    #[test]
    fn extremal_by_parameters() {
        let w = parse_wigner_file(
            r#"{"type":"extremal","mu_g":0.5,"branch":"one_root","param":3.0,"convention":"vacuum-identity"}"#,
        )
        .unwrap();
        assert!(matches!(w.function, RadialFunction::Extremal(_)));
    }
}
