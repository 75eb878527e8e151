//! Report envelope, schema check and CSV rendering.

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::numeric::{Exponent, Mode};
use crate::summability::CheckpointPolicy;

const OUTCOMES: [&str; 3] = ["ConvergesTo", "Diverges", "Inconclusive"];
const REQUIRED: [&str; 8] = [
    "operation",
    "spec",
    "p",
    "policy",
    "mode",
    "checkpoints",
    "outcome",
    "notes",
];

/// Wraps an operation body with the run context. Missing `checkpoints`,
/// `outcome`, `candidate_L` and `notes` are filled with empty values.
pub fn envelope(
    operation: &str,
    spec: Map<String, Value>,
    p: Option<Exponent>,
    policy: &CheckpointPolicy,
    mode: Mode,
    body: Value,
) -> Value {
    let mut out = match body {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    out.insert("operation".into(), operation.into());
    out.insert("spec".into(), Value::Object(spec));
    out.insert("p".into(), p.map_or(Value::Null, |p| p.to_string().into()));
    out.insert("policy".into(), policy.to_json());
    out.insert("mode".into(), mode.to_string().into());
    out.entry("checkpoints").or_insert_with(|| Value::Array(Vec::new()));
    out.entry("outcome").or_insert(Value::Null);
    out.entry("candidate_L").or_insert(Value::Null);
    out.entry("notes").or_insert_with(|| Value::Array(Vec::new()));
    Value::Object(out)
}

fn schema_error(msg: impl Into<String>) -> Error {
    Error::invalid(format!("report schema: {}", msg.into()))
}

pub fn validate_report(v: &Value) -> Result<()> {
    let obj = v.as_object().ok_or_else(|| schema_error("not an object"))?;
    for key in REQUIRED {
        if !obj.contains_key(key) {
            return Err(schema_error(format!("missing '{key}'")));
        }
    }
    if !obj["operation"].is_string() || !obj["mode"].is_string() {
        return Err(schema_error("operation and mode must be strings"));
    }
    if !obj["spec"].is_object() || !obj["policy"].is_object() {
        return Err(schema_error("spec and policy must be objects"));
    }
    match &obj["outcome"] {
        Value::Null => {}
        Value::String(s) if OUTCOMES.contains(&s.as_str()) => {}
        other => return Err(schema_error(format!("bad outcome {other}"))),
    }
    let cps = obj["checkpoints"]
        .as_array()
        .ok_or_else(|| schema_error("checkpoints must be an array"))?;
    for cp in cps {
        match cp.as_array().map(Vec::as_slice) {
            Some([n, _]) if n.is_u64() => {}
            _ => return Err(schema_error(format!("bad checkpoint {cp}"))),
        }
    }
    let notes_ok = obj["notes"]
        .as_array()
        .is_some_and(|ns| ns.iter().all(Value::is_string));
    if !notes_ok {
        return Err(schema_error("notes must be an array of strings"));
    }
    Ok(())
}

pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report values serialize");
    s.push('\n');
    s
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => format!("({})", items.iter().map(cell).collect::<Vec<_>>().join(",")),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// The checkpoint table as `n,value` rows, ready for plotting.
pub fn render_csv(v: &Value) -> Result<String> {
    let cps = v
        .get("checkpoints")
        .and_then(Value::as_array)
        .ok_or_else(|| schema_error("no checkpoints"))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.into());
    w.write_record(["n", "value"]).map_err(io)?;
    for cp in cps {
        let pair = cp.as_array().ok_or_else(|| schema_error("bad checkpoint"))?;
        w.write_record([cell(&pair[0]), cell(&pair[1])]).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn envelope_fills_required_keys() {
        let v = envelope(
            "density",
            Map::new(),
            None,
            &CheckpointPolicy::default(),
            Mode::Float,
            json!({"outcome": "ConvergesTo"}),
        );
        validate_report(&v).unwrap();
        let back: Value = serde_json::from_str(&render_json(&v)).unwrap();
        validate_report(&back).unwrap();
        assert!(validate_report(&json!({"operation": "x"})).is_err());
    }

    #[test]
    fn csv_rows() {
        let v = json!({"checkpoints": [[1, "1/2"], [2, ["1", "0"]]]});
        assert_eq!(render_csv(&v).unwrap(), "n,value\n1,1/2\n2,\"(1,0)\"\n");
    }
}
