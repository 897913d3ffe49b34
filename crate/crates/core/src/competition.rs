//! Resolution of a single time step by neuronal competition.
//!
//! Every neuron that could fire is first assumed active and its release is
//! put into an empty ECS. While some active neuron is inhibited by that ECS,
//! the active inhibited neuron with the smallest margin (ties: lowest index)
//! is switched off and the ECS is rebuilt from the survivors.

use crate::error::ModelError;
use crate::model::{EcsState, NetworkSpec, NeuronRuntime};
use crate::quantity::Quantity;

/// One neuron switched off during competition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Deactivation {
    /// 1-based iteration of the conflict-resolution loop.
    pub iteration: usize,
    pub neuron: usize,
    pub margin: Quantity,
}

/// Outcome of one resolved time step.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StepResult {
    /// Resolved activity y(t).
    pub active: Vec<bool>,
    /// Final extracellular state x(t).
    pub ecs: EcsState,
    /// Inhibition flags under the final ECS.
    pub inhibited: Vec<bool>,
    /// Excitation flags under the final ECS.
    pub excited: Vec<bool>,
    pub deactivations: Vec<Deactivation>,
}

impl StepResult {
    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }
}

/// Builds the ECS from scratch as the sum of rebound-scaled releases of the
/// active neurons.
pub fn release_sums(spec: &NetworkSpec, runtimes: &[NeuronRuntime], active: &[bool]) -> EcsState {
    let mut amounts = vec![Quantity::zero(); spec.transmitter_count()];
    for ((neuron, runtime), _) in spec
        .neurons()
        .iter()
        .zip(runtimes)
        .zip(active)
        .filter(|(_, &on)| on)
    {
        for (j, amount) in amounts.iter_mut().enumerate() {
            let released = neuron.effective_output(runtime, j);
            if !released.is_zero() {
                *amount = &*amount + &released;
            }
        }
    }
    EcsState::from_amounts(amounts).expect("releases are non-negative")
}

/// Resolves step t given the runtimes left by step t-1.
///
/// Excitation of the previous step is read from `runtimes`, which the
/// simulator fills from `prev_ecs`; `prev_ecs` itself is only checked for
/// shape. Rebound gains use the inhibition flags frozen in `runtimes`.
pub fn resolve_step(
    spec: &NetworkSpec,
    runtimes: &[NeuronRuntime],
    prev_ecs: &EcsState,
) -> Result<StepResult, ModelError> {
    spec.check_shapes(runtimes, prev_ecs)?;

    let mut active = spec
        .neurons()
        .iter()
        .zip(runtimes)
        .map(|(neuron, runtime)| neuron.potential_output(runtime))
        .collect::<Result<Vec<_>, _>>()?;

    let mut deactivations = Vec::new();
    let ecs = loop {
        let ecs = release_sums(spec, runtimes, &active);
        let mut loser: Option<(usize, Quantity)> = None;
        for (i, neuron) in spec.neurons().iter().enumerate() {
            if !active[i] {
                continue;
            }
            let margin = neuron.margin(&ecs)?;
            if margin > 0 {
                continue;
            }
            if loser.as_ref().is_none_or(|(_, best)| margin < *best) {
                loser = Some((i, margin));
            }
        }
        match loser {
            None => break ecs,
            Some((neuron, margin)) => {
                active[neuron] = false;
                deactivations.push(Deactivation {
                    iteration: deactivations.len() + 1,
                    neuron,
                    margin,
                });
            }
        }
    };

    let mut inhibited = Vec::with_capacity(active.len());
    let mut excited = Vec::with_capacity(active.len());
    for neuron in spec.neurons() {
        inhibited.push(neuron.inhibition(&ecs)?);
        excited.push(neuron.excitation(&ecs)?);
    }
    Ok(StepResult {
        active,
        ecs,
        inhibited,
        excited,
        deactivations,
    })
}
