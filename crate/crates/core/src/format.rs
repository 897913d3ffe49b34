//! On-disk scenario format and trace CSV.
//!
//! A scenario is a JSON document. Every real number is written as a string
//! (`"1.1"`, `"-1"`, `"1/3"`) so values stay exact; JSON numbers are only
//! accepted for integers (version, period, initial state, horizon).
//!
//! ```json
//! {
//!   "version": 1,
//!   "transmitters": ["a", "b"],
//!   "horizon": 20,
//!   "neurons": [
//!     {
//!       "name": "N1",
//!       "type": "tonic",
//!       "inhibition_threshold": "-1",
//!       "excitation_threshold": "1",
//!       "pir_gain": "2",
//!       "inputs": { "b": "-1" },
//!       "outputs": { "a": "1.1" }
//!     }
//!   ]
//! }
//! ```
//!
//! Unknown fields are rejected. Weights and outputs omitted from the
//! `inputs`/`outputs` maps are zero. `period` is required for, and only
//! allowed on, `"oscillator"` neurons; so is the optional `initial_state`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{ValidationError, Violation};
use crate::model::{NetworkSpec, NeuronSpec, NeuronType};
use crate::quantity::Quantity;
use crate::simulator::Trace;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid scenario: {0}")]
    Invalid(#[from] ValidationError),
}

impl ScenarioError {
    /// Individual violations, empty for syntax errors.
    pub fn violations(&self) -> &[Violation] {
        match self {
            ScenarioError::Syntax { .. } => &[],
            ScenarioError::Invalid(err) => &err.0,
        }
    }
}

/// A parsed scenario: the network plus an optional default horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub network: NetworkSpec,
    pub horizon: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    version: u32,
    transmitters: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    horizon: Option<usize>,
    neurons: Vec<RawNeuron>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawKind {
    Oscillator,
    Tonic,
    Follower,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNeuron {
    name: String,
    #[serde(rename = "type")]
    kind: RawKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    period: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial_state: Option<u64>,
    inhibition_threshold: String,
    excitation_threshold: String,
    pir_gain: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    inputs: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    outputs: BTreeMap<String, String>,
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let raw: RawScenario = serde_json::from_str(text).map_err(|err| ScenarioError::Syntax {
        line: err.line(),
        column: err.column(),
        message: err.to_string(),
    })?;

    let mut violations = Vec::new();
    if raw.version != FORMAT_VERSION {
        violations.push(Violation::network(format!(
            "unsupported format version {} (expected {FORMAT_VERSION})",
            raw.version
        )));
    }
    let neurons: Vec<NeuronSpec> = raw
        .neurons
        .iter()
        .map(|n| convert_neuron(n, &raw.transmitters, &mut violations))
        .collect();

    match NetworkSpec::new(raw.transmitters.clone(), neurons) {
        Ok(network) if violations.is_empty() => Ok(Scenario {
            network,
            horizon: raw.horizon,
        }),
        Ok(_) => Err(ValidationError(violations).into()),
        Err(ValidationError(more)) => {
            violations.extend(more);
            Err(ValidationError(violations).into())
        }
    }
}

fn parse_number(field: &str, text: &str, fallback: i64, problems: &mut Vec<String>) -> Quantity {
    text.parse().unwrap_or_else(|err| {
        problems.push(format!("{field}: {err}"));
        Quantity::from_integer(fallback)
    })
}

fn parse_row(
    field: &str,
    entries: &BTreeMap<String, String>,
    transmitters: &[String],
    problems: &mut Vec<String>,
) -> Vec<Quantity> {
    let mut values = vec![Quantity::zero(); transmitters.len()];
    for (name, text) in entries {
        let parsed = parse_number(&format!("{field}.{name}"), text, 0, problems);
        match transmitters.iter().position(|t| t == name) {
            Some(j) => values[j] = parsed,
            None => problems.push(format!(
                "{field} references undeclared transmitter '{name}'"
            )),
        }
    }
    values
}

fn convert_neuron(
    raw: &RawNeuron,
    transmitters: &[String],
    violations: &mut Vec<Violation>,
) -> NeuronSpec {
    let mut problems = Vec::new();

    let kind = match (raw.kind, raw.period) {
        (RawKind::Oscillator, Some(period)) => NeuronType::Oscillator { period },
        (RawKind::Oscillator, None) => {
            problems.push("oscillator neurons require a period".to_string());
            NeuronType::Oscillator { period: u64::MAX }
        }
        (RawKind::Tonic | RawKind::Follower, period) => {
            let kind = if matches!(raw.kind, RawKind::Tonic) {
                NeuronType::Tonic
            } else {
                NeuronType::Follower
            };
            if period.is_some() {
                problems.push(format!(
                    "period is only valid for oscillator neurons, not {}",
                    kind.label()
                ));
            }
            kind
        }
    };

    let inhibition_threshold = parse_number(
        "inhibition_threshold",
        &raw.inhibition_threshold,
        -1,
        &mut problems,
    );
    let excitation_threshold = parse_number(
        "excitation_threshold",
        &raw.excitation_threshold,
        1,
        &mut problems,
    );
    let pir_gain = parse_number("pir_gain", &raw.pir_gain, 1, &mut problems);
    let inputs = parse_row("inputs", &raw.inputs, transmitters, &mut problems);
    let outputs = parse_row("outputs", &raw.outputs, transmitters, &mut problems);

    violations.extend(
        problems
            .into_iter()
            .map(|msg| Violation::neuron(&raw.name, msg)),
    );
    NeuronSpec {
        name: raw.name.clone(),
        kind,
        inhibition_threshold,
        excitation_threshold,
        pir_gain,
        inputs,
        outputs,
        initial_state: raw.initial_state,
    }
}

/// Serializes a network (and optional horizon) in the scenario format.
/// Zero weights and outputs are omitted.
pub fn write_scenario(spec: &NetworkSpec, horizon: Option<usize>) -> String {
    let names: Vec<String> = spec.transmitters().iter().map(|t| t.name.clone()).collect();
    let sparse = |row: &[Quantity]| -> BTreeMap<String, String> {
        row.iter()
            .zip(&names)
            .filter(|(v, _)| !v.is_zero())
            .map(|(v, name)| (name.clone(), v.to_string()))
            .collect()
    };
    let neurons = spec
        .neurons()
        .iter()
        .map(|n| {
            let (kind, period) = match n.kind {
                NeuronType::Oscillator { period } => (RawKind::Oscillator, Some(period)),
                NeuronType::Tonic => (RawKind::Tonic, None),
                NeuronType::Follower => (RawKind::Follower, None),
            };
            RawNeuron {
                name: n.name.clone(),
                kind,
                period,
                initial_state: n.initial_state,
                inhibition_threshold: n.inhibition_threshold.to_string(),
                excitation_threshold: n.excitation_threshold.to_string(),
                pir_gain: n.pir_gain.to_string(),
                inputs: sparse(&n.inputs),
                outputs: sparse(&n.outputs),
            }
        })
        .collect();
    let raw = RawScenario {
        version: FORMAT_VERSION,
        transmitters: names.clone(),
        horizon,
        neurons,
    };
    let mut text = serde_json::to_string_pretty(&raw).expect("scenario serializes");
    text.push('\n');
    text
}

fn flag(on: bool) -> &'static str {
    if on {
        "1"
    } else {
        "0"
    }
}

/// Renders a trace as CSV: `t`, activity per neuron, ECS amount per
/// transmitter, inhibition flag per neuron. One row per step.
pub fn write_trace_csv(trace: &Trace) -> String {
    let spec = &trace.spec;
    let mut out = String::from("t");
    for n in spec.neurons() {
        write!(out, ",y:{}", n.name).unwrap();
    }
    for tr in spec.transmitters() {
        write!(out, ",x:{}", tr.name).unwrap();
    }
    for n in spec.neurons() {
        write!(out, ",z0:{}", n.name).unwrap();
    }
    out.push('\n');

    for (idx, step) in trace.steps.iter().enumerate() {
        write!(out, "{}", idx + 1).unwrap();
        for &on in &step.active {
            write!(out, ",{}", flag(on)).unwrap();
        }
        for amount in step.ecs.amounts() {
            write!(out, ",{amount}").unwrap();
        }
        for &on in &step.inhibited {
            write!(out, ",{}", flag(on)).unwrap();
        }
        out.push('\n');
    }
    out
}
