//! Report layout.
//!
//! Every command writes one JSON object with the keys `schema_version`,
//! `command`, `inputs`, `results` and `provenance`. Keys are emitted in
//! sorted order, floats in shortest round-trip form, big integers as decimal
//! strings and complex numbers as `re+imi` strings. Nothing that depends on
//! the machine or on the number of workers is recorded.

use maxcompact_core::extension::{FactorPoint, UEPoint};
use serde_json::{json, Value};

use crate::text::format_complex;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub inputs: Value,
    pub results: Value,
    pub provenance: Value,
    /// Short human-readable lines for the diagnostic stream.
    pub summary: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str, inputs: Value, results: Value) -> Self {
        Report {
            command,
            inputs,
            results,
            provenance: json!({ "tool": concat!("maxcompact ", env!("CARGO_PKG_VERSION")) }),
            summary: Vec::new(),
        }
    }

    /// Adds `key: value` to the provenance map.
    pub fn note(mut self, key: &str, value: Value) -> Self {
        if let Value::Object(m) = &mut self.provenance {
            m.insert(key.into(), value);
        }
        self
    }

    pub fn summary(mut self, line: impl Into<String>) -> Self {
        self.summary.push(line.into());
        self
    }

    pub fn to_value(&self) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "provenance": self.provenance,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("report serialises");
        s.push('\n');
        s
    }
}

pub fn complex(z: maxcompact_core::C64) -> Value {
    Value::String(format_complex(z))
}

pub fn point(pt: &UEPoint) -> Value {
    Value::Array(
        pt.factors
            .iter()
            .map(|f| {
                let kind = match f {
                    FactorPoint::Fiber(_) => "fiber",
                    FactorPoint::Affine(_) => "affine",
                };
                json!({ "kind": kind, "coords": f.coords().map(complex).to_vec() })
            })
            .collect(),
    )
}
