//! Step loop over a finite horizon and rhythm detection on the result.

use crate::competition::{resolve_step, StepResult};
use crate::error::ModelError;
use crate::model::{EcsState, NetworkSpec, NeuronRuntime, StepFlags};

/// Signature shared by the engine's step resolver and any substitute
/// (reference implementation, fault injection).
pub type Resolver =
    dyn Fn(&NetworkSpec, &[NeuronRuntime], &EcsState) -> Result<StepResult, ModelError>;

/// Recorded run: `steps[t - 1]` holds the state at time t.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub spec: NetworkSpec,
    pub steps: Vec<StepResult>,
}

impl Trace {
    pub fn horizon(&self) -> usize {
        self.steps.len()
    }

    /// Activity vector at time `t` (1-based).
    pub fn activity(&self, t: usize) -> &[bool] {
        &self.steps[t - 1].active
    }
}

pub fn run(spec: &NetworkSpec, horizon: usize) -> Result<Trace, ModelError> {
    run_with(spec, horizon, &resolve_step)
}

/// Runs `horizon` steps starting from the spec's initial runtimes and an
/// empty ECS, resolving each step with `resolver`.
pub fn run_with(
    spec: &NetworkSpec,
    horizon: usize,
    resolver: &Resolver,
) -> Result<Trace, ModelError> {
    let mut runtimes = spec.initial_runtimes();
    let mut ecs = spec.zero_ecs();
    let mut steps = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let result = resolver(spec, &runtimes, &ecs)?;
        runtimes = spec
            .neurons()
            .iter()
            .zip(&runtimes)
            .enumerate()
            .map(|(i, (neuron, runtime))| {
                neuron.advance_state(
                    runtime,
                    StepFlags {
                        inhibited: result.inhibited[i],
                        excited: result.excited[i],
                        fired: result.active[i],
                    },
                )
            })
            .collect::<Result<_, _>>()?;
        ecs = result.ecs.clone();
        steps.push(result);
    }
    Ok(Trace {
        spec: spec.clone(),
        steps,
    })
}

/// A repeating activity pattern: `rows[k][i]` is the activity of neuron i in
/// phase k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhythmPattern {
    pub period: usize,
    pub rows: Vec<Vec<bool>>,
}

impl RhythmPattern {
    /// Compact rendering such as `[N1][N2][N3]`; co-active neurons share a
    /// bracket separated by commas, silent phases print as `[]`.
    pub fn describe(&self, spec: &NetworkSpec) -> String {
        self.rows
            .iter()
            .map(|row| {
                let names: Vec<&str> = row
                    .iter()
                    .zip(spec.neurons())
                    .filter(|(&on, _)| on)
                    .map(|(_, n)| n.name.as_str())
                    .collect();
                format!("[{}]", names.join(","))
            })
            .collect()
    }
}

/// Smallest period p such that the activity after `transient` steps repeats
/// with period p over the rest of the trace. Only periods that repeat at
/// least twice (p ≤ (H - transient) / 2) are considered.
pub fn detect_rhythm(trace: &Trace, transient: usize) -> Option<RhythmPattern> {
    if transient >= trace.horizon() {
        return None;
    }
    let tail: Vec<&[bool]> = trace.steps[transient..]
        .iter()
        .map(|s| s.active.as_slice())
        .collect();
    let period =
        (1..=tail.len() / 2).find(|&p| (0..tail.len() - p).all(|i| tail[i] == tail[i + p]))?;
    Some(RhythmPattern {
        period,
        rows: tail[..period].iter().map(|row| row.to_vec()).collect(),
    })
}
