//! Naive reference implementation of the step semantics, used for
//! differential testing of the engine.
//!
//! Nothing here calls into `competition` or the evaluation methods on
//! `NeuronSpec`: sums are recomputed inline on every pass, the automaton is
//! written as a lookup on the state table, and previous-step excitation is
//! recomputed from the previous ECS rather than read from the runtime.

#![allow(clippy::needless_range_loop)]

use std::fmt;

use crate::competition::{Deactivation, StepResult};
use crate::error::ModelError;
use crate::model::{EcsState, NetworkSpec, NeuronRuntime, NeuronType};
use crate::quantity::Quantity;
use crate::simulator::Trace;

fn dot(weights: &[Quantity], amounts: &[Quantity]) -> Quantity {
    let mut total = Quantity::zero();
    for j in 0..weights.len() {
        total = total + weights[j].clone() * amounts[j].clone();
    }
    total
}

/// Activity from the oscillator state table given column (inhibited, excited).
/// Inhibition dominates a simultaneous excitation.
fn table_output(s: u64, period: u64, inhibited: bool, excited: bool) -> bool {
    match (inhibited, excited) {
        (true, _) => false,
        (false, true) => true,
        (false, false) => s == period,
    }
}

/// Next oscillator state from the table, with the `s_T` row resolved by
/// whether the neuron actually fired after competition.
fn table_next(s: u64, period: u64, inhibited: bool, prev_excited: bool, fired: bool) -> u64 {
    match (inhibited, prev_excited) {
        (false, true) => 0,
        (true, _) if s == period => period,
        (true, _) => s + 1,
        (false, false) if s == period => {
            if fired {
                0
            } else {
                period
            }
        }
        (false, false) => s + 1,
    }
}

pub fn reference_resolve(
    spec: &NetworkSpec,
    runtimes: &[NeuronRuntime],
    prev_ecs: &EcsState,
) -> Result<StepResult, ModelError> {
    let n = spec.neurons().len();
    let m = spec.transmitters().len();
    if runtimes.len() != n {
        return Err(ModelError::DimensionMismatch {
            what: "runtimes",
            expected: n,
            found: runtimes.len(),
        });
    }
    if prev_ecs.amounts().len() != m {
        return Err(ModelError::DimensionMismatch {
            what: "ECS",
            expected: m,
            found: prev_ecs.amounts().len(),
        });
    }

    // potential activity, inhibition forced to 0
    let mut y = vec![false; n];
    for i in 0..n {
        let neuron = &spec.neurons()[i];
        let excited_before = dot(&neuron.inputs, prev_ecs.amounts()) >= neuron.excitation_threshold;
        y[i] = match (neuron.kind, runtimes[i].state) {
            (NeuronType::Tonic, None) => true,
            (NeuronType::Follower, None) => excited_before,
            (NeuronType::Oscillator { period }, Some(s)) if s <= period => {
                table_output(s, period, false, excited_before)
            }
            _ => {
                return Err(ModelError::RuntimeMismatch {
                    neuron: neuron.name.clone(),
                })
            }
        };
    }

    let mut log = Vec::new();
    let mut iteration = 0;
    let x = loop {
        let mut x = vec![Quantity::zero(); m];
        for i in 0..n {
            if !y[i] {
                continue;
            }
            let neuron = &spec.neurons()[i];
            let gain = if runtimes[i].prev_inhibited {
                neuron.pir_gain.clone()
            } else {
                Quantity::one()
            };
            for j in 0..m {
                x[j] = x[j].clone() + gain.clone() * neuron.outputs[j].clone();
            }
        }

        let mut worst: Option<usize> = None;
        let mut worst_margin = Quantity::zero();
        for i in 0..n {
            let neuron = &spec.neurons()[i];
            let u = dot(&neuron.inputs, &x);
            if y[i] && u <= neuron.inhibition_threshold {
                let margin = u - neuron.inhibition_threshold.clone();
                if worst.is_none() || margin < worst_margin {
                    worst = Some(i);
                    worst_margin = margin;
                }
            }
        }
        match worst {
            None => break x,
            Some(k) => {
                iteration += 1;
                y[k] = false;
                log.push(Deactivation {
                    iteration,
                    neuron: k,
                    margin: worst_margin,
                });
            }
        }
    };

    let mut z0 = vec![false; n];
    let mut z1 = vec![false; n];
    for i in 0..n {
        let neuron = &spec.neurons()[i];
        let u = dot(&neuron.inputs, &x);
        z0[i] = u <= neuron.inhibition_threshold;
        z1[i] = u >= neuron.excitation_threshold;
    }
    Ok(StepResult {
        active: y,
        ecs: EcsState::from_amounts(x)?,
        inhibited: z0,
        excited: z1,
        deactivations: log,
    })
}

/// Full run through the reference path: its own resolver and its own
/// automaton transitions.
pub fn reference_run(spec: &NetworkSpec, horizon: usize) -> Result<Trace, ModelError> {
    let mut runtimes = spec.initial_runtimes();
    let mut x = EcsState::zero(spec.transmitters().len());
    let mut steps = Vec::new();
    for _ in 0..horizon {
        let step = reference_resolve(spec, &runtimes, &x)?;
        for i in 0..runtimes.len() {
            let r = &mut runtimes[i];
            if let (NeuronType::Oscillator { period }, Some(s)) = (spec.neurons()[i].kind, r.state)
            {
                r.state = Some(table_next(
                    s,
                    period,
                    step.inhibited[i],
                    r.prev_excited,
                    step.active[i],
                ));
            }
            r.prev_inhibited = step.inhibited[i];
            r.prev_excited = step.excited[i];
        }
        x = step.ecs.clone();
        steps.push(step);
    }
    Ok(Trace {
        spec: spec.clone(),
        steps,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixedPointViolation {
    /// Vector lengths in the result disagree with the network.
    Shape {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    /// An active neuron is inhibited by the final ECS.
    ActiveInhibited {
        neuron: usize,
        weighted_input: Quantity,
    },
    /// The final ECS is not the release sum of the active neurons.
    ReleaseMismatch {
        transmitter: usize,
        expected: Quantity,
        found: Quantity,
    },
}

impl fmt::Display for FixedPointViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixedPointViolation::Shape {
                what,
                expected,
                found,
            } => {
                write!(f, "{what} has length {found}, expected {expected}")
            }
            FixedPointViolation::ActiveInhibited {
                neuron,
                weighted_input,
            } => {
                write!(
                    f,
                    "active neuron {neuron} is inhibited (weighted input {weighted_input})"
                )
            }
            FixedPointViolation::ReleaseMismatch {
                transmitter,
                expected,
                found,
            } => write!(
                f,
                "transmitter {transmitter} holds {found}, active releases sum to {expected}"
            ),
        }
    }
}

/// Lists every way `result` fails to be a conflict-free state for the step
/// entered with `runtimes`. Empty means the result is a valid fixed point.
pub fn check_fixed_point(
    spec: &NetworkSpec,
    runtimes: &[NeuronRuntime],
    result: &StepResult,
) -> Vec<FixedPointViolation> {
    let n = spec.neurons().len();
    let m = spec.transmitters().len();
    let shapes = [
        ("runtimes", n, runtimes.len()),
        ("activity", n, result.active.len()),
        ("ECS", m, result.ecs.amounts().len()),
    ];
    let bad_shapes: Vec<_> = shapes
        .iter()
        .filter(|(_, expected, found)| expected != found)
        .map(|&(what, expected, found)| FixedPointViolation::Shape {
            what,
            expected,
            found,
        })
        .collect();
    if !bad_shapes.is_empty() {
        return bad_shapes;
    }

    let mut violations = Vec::new();
    let x = result.ecs.amounts();
    for i in 0..n {
        let neuron = &spec.neurons()[i];
        let u = dot(&neuron.inputs, x);
        if result.active[i] && u <= neuron.inhibition_threshold {
            violations.push(FixedPointViolation::ActiveInhibited {
                neuron: i,
                weighted_input: u,
            });
        }
    }
    for j in 0..m {
        let mut expected = Quantity::zero();
        for i in 0..n {
            if result.active[i] {
                let neuron = &spec.neurons()[i];
                let gain = if runtimes[i].prev_inhibited {
                    neuron.pir_gain.clone()
                } else {
                    Quantity::one()
                };
                expected = expected + gain * neuron.outputs[j].clone();
            }
        }
        if expected != x[j] {
            violations.push(FixedPointViolation::ReleaseMismatch {
                transmitter: j,
                expected,
                found: x[j].clone(),
            });
        }
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::competition::resolve_step;
    use crate::quantity::q;
    use crate::simulator::run;

    #[test]
    fn agrees_with_engine_on_bundled_scenarios() {
        for (scenario, horizon) in [(builtin::hco(), 20), (builtin::lymnaea(), 30)] {
            let spec = &scenario.network;
            assert_eq!(
                reference_run(spec, horizon).unwrap(),
                run(spec, horizon).unwrap()
            );
        }
    }

    #[test]
    fn engine_steps_are_fixed_points() {
        let spec = builtin::lymnaea().network;
        let mut runtimes = spec.initial_runtimes();
        let mut ecs = spec.zero_ecs();
        for _ in 0..12 {
            let step = resolve_step(&spec, &runtimes, &ecs).unwrap();
            assert_eq!(check_fixed_point(&spec, &runtimes, &step), vec![]);
            let oracle = reference_resolve(&spec, &runtimes, &ecs).unwrap();
            assert_eq!(oracle, step);
            // advance via the oracle transitions
            for (i, r) in runtimes.iter_mut().enumerate() {
                if let (NeuronType::Oscillator { period }, Some(s)) = (spec.neuron(i).kind, r.state)
                {
                    r.state = Some(table_next(
                        s,
                        period,
                        step.inhibited[i],
                        r.prev_excited,
                        step.active[i],
                    ));
                }
                r.prev_inhibited = step.inhibited[i];
                r.prev_excited = step.excited[i];
            }
            ecs = step.ecs;
        }
    }

    #[test]
    fn both_hco_neurons_active_gives_two_violations() {
        let spec = builtin::hco().network;
        let runtimes = spec.initial_runtimes();
        let forged = StepResult {
            active: vec![true, true],
            ecs: EcsState::from_amounts(vec![q("1.1"), q("1")]).unwrap(),
            inhibited: vec![true, true],
            excited: vec![false, false],
            deactivations: vec![],
        };
        let violations = check_fixed_point(&spec, &runtimes, &forged);
        assert_eq!(
            violations,
            vec![
                FixedPointViolation::ActiveInhibited {
                    neuron: 0,
                    weighted_input: q("-1")
                },
                FixedPointViolation::ActiveInhibited {
                    neuron: 1,
                    weighted_input: q("-1.1")
                },
            ]
        );
    }

    #[test]
    fn tampered_ecs_is_caught() {
        let spec = builtin::hco().network;
        let runtimes = spec.initial_runtimes();
        let mut step = resolve_step(&spec, &runtimes, &spec.zero_ecs()).unwrap();
        step.ecs = EcsState::from_amounts(vec![q("1.2"), q("0")]).unwrap();
        let violations = check_fixed_point(&spec, &runtimes, &step);
        assert_eq!(
            violations,
            vec![FixedPointViolation::ReleaseMismatch {
                transmitter: 0,
                expected: q("1.1"),
                found: q("1.2")
            }]
        );
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let spec = builtin::hco().network;
        let runtimes = spec.initial_runtimes();
        let mut step = resolve_step(&spec, &runtimes, &spec.zero_ecs()).unwrap();
        step.active.pop();
        assert!(matches!(
            check_fixed_point(&spec, &runtimes, &step)[..],
            [FixedPointViolation::Shape {
                what: "activity",
                ..
            }]
        ));
    }

    #[test]
    fn table_transcription_matches_rows() {
        // s_0 .. s_k rows, T = 2
        assert_eq!(
            (
                table_output(0, 2, false, false),
                table_next(0, 2, false, false, false)
            ),
            (false, 1)
        );
        assert_eq!(
            (
                table_output(1, 2, true, false),
                table_next(1, 2, true, false, false)
            ),
            (false, 2)
        );
        assert_eq!(
            (
                table_output(1, 2, false, true),
                table_next(1, 2, false, true, true)
            ),
            (true, 0)
        );
        // s_T row
        assert_eq!(
            (
                table_output(2, 2, false, false),
                table_next(2, 2, false, false, true)
            ),
            (true, 0)
        );
        assert_eq!(
            (
                table_output(2, 2, true, false),
                table_next(2, 2, true, false, false)
            ),
            (false, 2)
        );
        assert_eq!(
            (
                table_output(2, 2, false, true),
                table_next(2, 2, false, true, true)
            ),
            (true, 0)
        );
    }
}
