//! Versioned report envelope for machine-readable command output.
//!
//! Every JSON report has the shape
//! `{"schema": 1, "command": ..., "params": ..., "result": ...}` with
//! alphabetically ordered keys, so identical runs produce byte-identical
//! output.

use crate::error::{Error, Result};
use serde::Serialize;
use serde_json::{json, Value};

/// Current report schema version.
pub const SCHEMA_VERSION: u32 = 1;

/// Wrap a command result in the versioned envelope.
pub fn envelope(command: &str, params: Value, result: Value) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "command": command,
        "params": params,
        "result": result,
    })
}

/// Serialize any report type into a JSON value.
pub fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Config(format!("serialization failed: {e}")))
}

/// Render a JSON value as the final report text (pretty, trailing
/// newline).
pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON value renders");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_shape_and_determinism() {
        let e1 = envelope("qchar", json!({"degcap": 2}), json!({"terms": 4}));
        let e2 = envelope("qchar", json!({"degcap": 2}), json!({"terms": 4}));
        assert_eq!(render_json(&e1), render_json(&e2));
        assert_eq!(e1["schema"], 1);
        assert_eq!(e1["command"], "qchar");
        assert_eq!(e1["result"]["terms"], 4);
        // Keys serialize in sorted order, so "command" precedes "schema".
        let text = render_json(&e1);
        assert!(text.find("\"command\"").unwrap() < text.find("\"schema\"").unwrap());
        assert!(text.ends_with('\n'));
    }
}
