//! JSON report envelope.

use serde_json::{json, Map, Value};
use symmcouple_core::{EquivalenceReport, Witness};

use crate::csv_io::step_to_string;

pub const SCHEMA: u32 = 1;

/// JSON has no infinities; non-finite values become strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|x| num(*x)).collect())
}

/// Step-function witnesses are embedded as CSV text.
pub fn witness(w: &Witness) -> Value {
    match w {
        Witness::None => Value::Null,
        Witness::Values(v) => json!({ "values": nums(v) }),
        Witness::Family(xs) => json!({ "family": xs.iter().map(step_to_string).collect::<Vec<_>>() }),
    }
}

pub fn equivalence(r: &EquivalenceReport) -> Value {
    json!({
        "p": num(r.p_used),
        "trials": r.trials,
        "min_ratio": num(r.min_ratio),
        "max_ratio": num(r.max_ratio),
        "constant": num(r.constant()),
        "passed_at_c": r.passed_at_c.map(num),
        "witness_min": witness(&r.witness_min),
        "witness_max": witness(&r.witness_max),
        "notes": r.notes,
    })
}

/// Wraps a command's result with the schema, tool version, seed and the
/// configuration that produced it.
pub fn envelope(command: &str, seed: u64, config: Value, result: Value) -> Value {
    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("tool".into(), json!("symmcouple"));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("command".into(), json!(command));
    m.insert("seed".into(), json!(seed));
    m.insert("config".into(), config);
    m.insert("result".into(), result);
    Value::Object(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use symmcouple_core::StepFunction;

    #[test]
    fn non_finite_numbers() {
        assert_eq!(num(f64::INFINITY), json!("inf"));
        assert_eq!(num(1.5), json!(1.5));
    }

    #[test]
    fn family_witness_is_csv() {
        let x = StepFunction::block(0.0, 0.5, 2.0).unwrap();
        let v = witness(&Witness::Family(vec![x.clone()]));
        let s = v["family"][0].as_str().unwrap();
        assert_eq!(crate::csv_io::step_from_str(s).unwrap(), x);
    }

    #[test]
    fn envelope_fields() {
        let e = envelope("norm", 7, json!({}), json!(1.0));
        assert_eq!(e["schema"], 1);
        assert_eq!(e["seed"], 7);
        assert!(e["version"].is_string());
    }
}
