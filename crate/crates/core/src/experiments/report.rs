//! Machine-readable experiment reports.
//!
//! Reports are deterministic: identical parameters produce byte-identical
//! JSON and CSV. Maps are ordered, floats serialize through the shortest
//! round-trip form, and non-finite scores become explicit strings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::info::ChargePolicy;

/// Common experiment parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ExperimentParams {
    pub qubits: u32,
    pub budget: u64,
    pub samples: u64,
    pub seed: u64,
    pub charge_transforms: bool,
}

impl ExperimentParams {
    pub fn new(qubits: u32, budget: u64) -> Self {
        Self {
            qubits,
            budget,
            samples: 0,
            seed: 0,
            charge_transforms: true,
        }
    }

    pub fn with_samples(mut self, samples: u64) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_charge(mut self, charge: bool) -> Self {
        self.charge_transforms = charge;
        self
    }

    pub fn policy(&self) -> ChargePolicy {
        if self.charge_transforms {
            ChargePolicy::charged()
        } else {
            ChargePolicy::free()
        }
    }
}

/// A single record field; floats that are not finite are stored as text so
/// the JSON form stays lossless.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldValue {
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
}

impl FieldValue {
    pub fn float(x: f64) -> Self {
        if x.is_finite() {
            FieldValue::Float(x)
        } else if x.is_nan() {
            FieldValue::Text("nan".into())
        } else if x > 0.0 {
            FieldValue::Text("inf".into())
        } else {
            FieldValue::Text("-inf".into())
        }
    }

    fn render(&self) -> String {
        match self {
            FieldValue::Bool(b) => b.to_string(),
            FieldValue::Int(i) => i.to_string(),
            FieldValue::Float(x) => {
                let mut buf = ryu_format(*x);
                if !buf.contains('.') && !buf.contains('e') && !buf.contains("inf") {
                    buf.push_str(".0");
                }
                buf
            }
            FieldValue::Text(s) => s.clone(),
        }
    }
}

fn ryu_format(x: f64) -> String {
    // serde_json's shortest round-trip form keeps CSV and JSON consistent.
    serde_json::to_string(&x).unwrap_or_else(|_| x.to_string())
}

/// One check or instance row in a report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub passed: bool,
    pub fields: BTreeMap<String, FieldValue>,
}

/// Verdict-carrying experiment output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment_id: String,
    pub parameters: ExperimentParams,
    pub verdict: bool,
    pub measured_constants: BTreeMap<String, f64>,
    pub records: Vec<CheckRecord>,
}

impl ExperimentReport {
    pub fn new(experiment_id: impl Into<String>, parameters: ExperimentParams) -> Self {
        Self {
            experiment_id: experiment_id.into(),
            parameters,
            verdict: true,
            measured_constants: BTreeMap::new(),
            records: Vec::new(),
        }
    }

    pub fn constant(&mut self, name: impl Into<String>, value: f64) {
        self.measured_constants.insert(name.into(), value);
    }

    /// Appends a record; a failing record fails the whole report.
    pub fn check(
        &mut self,
        id: impl Into<String>,
        passed: bool,
        fields: BTreeMap<String, FieldValue>,
    ) {
        self.verdict &= passed;
        self.records.push(CheckRecord {
            id: id.into(),
            passed,
            fields,
        });
    }

    /// Appends an informational record that cannot fail.
    pub fn info(&mut self, id: impl Into<String>, fields: BTreeMap<String, FieldValue>) {
        self.records.push(CheckRecord {
            id: id.into(),
            passed: true,
            fields,
        });
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Flat CSV form: one row per (record, field) plus verdict and constant
    /// rows. Deterministic row order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("record,key,value\n");
        out.push_str(&format!("_experiment,id,{}\n", self.experiment_id));
        out.push_str(&format!(
            "_experiment,verdict,{}\n",
            if self.verdict { "pass" } else { "fail" }
        ));
        out.push_str(&format!("_experiment,qubits,{}\n", self.parameters.qubits));
        out.push_str(&format!("_experiment,budget,{}\n", self.parameters.budget));
        out.push_str(&format!("_experiment,samples,{}\n", self.parameters.samples));
        out.push_str(&format!("_experiment,seed,{}\n", self.parameters.seed));
        out.push_str(&format!(
            "_experiment,charge_transforms,{}\n",
            self.parameters.charge_transforms
        ));
        for (name, value) in &self.measured_constants {
            out.push_str(&format!(
                "_constant,{name},{}\n",
                FieldValue::float(*value).render()
            ));
        }
        for record in &self.records {
            out.push_str(&format!(
                "{},passed,{}\n",
                record.id, record.passed
            ));
            for (key, value) in &record.fields {
                out.push_str(&format!("{},{key},{}\n", record.id, value.render()));
            }
        }
        out
    }
}

/// Convenience macro-free field map builder.
pub fn fields(pairs: Vec<(&str, FieldValue)>) -> BTreeMap<String, FieldValue> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Mean and standard error of a sample.
#[derive(Debug, Clone, Copy)]
pub struct MeanWithError {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

pub fn mean_with_error(values: &[f64]) -> MeanWithError {
    let n = values.len() as f64;
    if values.is_empty() {
        return MeanWithError {
            mean: 0.0,
            std_error: 0.0,
            samples: 0,
        };
    }
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    MeanWithError {
        mean,
        std_error: (var / n).sqrt(),
        samples: values.len() as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_round_trips_and_is_deterministic() {
        let build = || {
            let mut r = ExperimentReport::new("demo", ExperimentParams::new(2, 30).with_seed(7));
            r.constant("c_test", 3.5);
            r.check(
                "inst-0",
                true,
                fields(vec![
                    ("lhs", FieldValue::float(1.25)),
                    ("rhs", FieldValue::float(f64::NEG_INFINITY)),
                ]),
            );
            r
        };
        let a = build();
        let b = build();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        assert_eq!(a.to_csv(), b.to_csv());
        assert!(a.to_csv().contains("inst-0,rhs,-inf"));
        let parsed: ExperimentReport = serde_json::from_str(&a.to_json().unwrap()).unwrap();
        assert_eq!(parsed.experiment_id, "demo");
        assert!(parsed.verdict);
    }

    #[test]
    fn failing_record_fails_verdict() {
        let mut r = ExperimentReport::new("demo", ExperimentParams::new(1, 20));
        r.check("bad", false, BTreeMap::new());
        assert!(!r.verdict);
    }

    #[test]
    fn mean_with_error_basics() {
        let m = mean_with_error(&[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(m.mean, 1.0);
        assert_eq!(m.std_error, 0.0);
        let m = mean_with_error(&[0.0, 2.0]);
        assert_eq!(m.mean, 1.0);
        assert!(m.std_error > 0.0);
    }
}
