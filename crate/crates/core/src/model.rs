//! Network description and per-neuron semantics.
//!
//! A network is a set of neurons sharing one extracellular space (ECS). Each
//! neuron reads the ECS through a row of weights, one per transmitter, and
//! when active releases a row of transmitter amounts into it. Whether a
//! neuron is active depends on its type (oscillator, tonic, follower), its
//! automaton state, and its inhibition/excitation flags.

use std::collections::HashSet;

use crate::error::{ModelError, ValidationError, Violation};
use crate::quantity::Quantity;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TransmitterId {
    pub index: usize,
    pub name: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NeuronType {
    /// Endogenous burster that fires once every `period + 1` steps when left
    /// alone, immediately on excitation, and holds its ready state while
    /// inhibited.
    Oscillator { period: u64 },
    /// Active whenever not inhibited.
    Tonic,
    /// Active in the step after being excited, unless inhibited.
    Follower,
}

impl NeuronType {
    pub fn label(&self) -> &'static str {
        match self {
            NeuronType::Oscillator { .. } => "oscillator",
            NeuronType::Tonic => "tonic",
            NeuronType::Follower => "follower",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeuronSpec {
    pub name: String,
    pub kind: NeuronType,
    /// Weighted input at or below this value inhibits the neuron. Negative.
    pub inhibition_threshold: Quantity,
    /// Weighted input at or above this value excites the neuron. Positive.
    pub excitation_threshold: Quantity,
    /// Release multiplier applied in the step after the neuron was inhibited.
    pub pir_gain: Quantity,
    /// Receptor weight per transmitter.
    pub inputs: Vec<Quantity>,
    /// Release amount per transmitter.
    pub outputs: Vec<Quantity>,
    /// Oscillators only: automaton state at t = 0. Defaults to the period,
    /// i.e. ready to fire.
    pub initial_state: Option<u64>,
}

/// Mutable per-neuron state carried between steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct NeuronRuntime {
    /// Oscillator automaton state in `0..=period`; `None` for other types.
    pub state: Option<u64>,
    /// Inhibition flag of the previous step.
    pub prev_inhibited: bool,
    /// Excitation flag of the previous step.
    pub prev_excited: bool,
}

/// Resolved flags of one neuron at the end of a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepFlags {
    pub inhibited: bool,
    pub excited: bool,
    pub fired: bool,
}

/// Amount of each transmitter currently present in the extracellular space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EcsState {
    amounts: Vec<Quantity>,
}

impl EcsState {
    pub fn zero(transmitters: usize) -> Self {
        EcsState {
            amounts: vec![Quantity::zero(); transmitters],
        }
    }

    pub fn from_amounts(amounts: Vec<Quantity>) -> Result<Self, ModelError> {
        if let Some(index) = amounts.iter().position(Quantity::is_negative) {
            return Err(ModelError::NegativeAmount { index });
        }
        Ok(EcsState { amounts })
    }

    pub fn amounts(&self) -> &[Quantity] {
        &self.amounts
    }

    pub fn len(&self) -> usize {
        self.amounts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amounts.is_empty()
    }

    pub fn get(&self, transmitter: usize) -> &Quantity {
        &self.amounts[transmitter]
    }
}

fn check_len(what: &'static str, expected: usize, found: usize) -> Result<(), ModelError> {
    if expected == found {
        Ok(())
    } else {
        Err(ModelError::DimensionMismatch {
            what,
            expected,
            found,
        })
    }
}

impl NeuronSpec {
    /// A neuron with no receptors or releases over `transmitters` channels.
    pub fn new(name: impl Into<String>, kind: NeuronType, transmitters: usize) -> Self {
        NeuronSpec {
            name: name.into(),
            kind,
            inhibition_threshold: Quantity::from_integer(-1),
            excitation_threshold: Quantity::one(),
            pir_gain: Quantity::one(),
            inputs: vec![Quantity::zero(); transmitters],
            outputs: vec![Quantity::zero(); transmitters],
            initial_state: None,
        }
    }

    /// Σ_j w_j · x_j over the current ECS.
    pub fn weighted_input(&self, ecs: &EcsState) -> Result<Quantity, ModelError> {
        check_len("ECS", self.inputs.len(), ecs.len())?;
        Ok(self
            .inputs
            .iter()
            .zip(ecs.amounts())
            .map(|(w, x)| w * x)
            .sum())
    }

    pub fn excitation(&self, ecs: &EcsState) -> Result<bool, ModelError> {
        Ok(self.weighted_input(ecs)? >= self.excitation_threshold)
    }

    pub fn inhibition(&self, ecs: &EcsState) -> Result<bool, ModelError> {
        Ok(self.weighted_input(ecs)? <= self.inhibition_threshold)
    }

    /// Weighted input minus the inhibition threshold. Zero or below means
    /// inhibited; the most negative margin loses a competition first.
    pub fn margin(&self, ecs: &EcsState) -> Result<Quantity, ModelError> {
        Ok(self.weighted_input(ecs)? - self.inhibition_threshold.clone())
    }

    pub fn initial_runtime(&self) -> NeuronRuntime {
        let state = match self.kind {
            NeuronType::Oscillator { period } => Some(self.initial_state.unwrap_or(period)),
            NeuronType::Tonic | NeuronType::Follower => None,
        };
        NeuronRuntime {
            state,
            prev_inhibited: false,
            prev_excited: false,
        }
    }

    fn oscillator_state(&self, runtime: &NeuronRuntime) -> Result<Option<(u64, u64)>, ModelError> {
        let mismatch = || ModelError::RuntimeMismatch {
            neuron: self.name.clone(),
        };
        match (self.kind, runtime.state) {
            (NeuronType::Oscillator { period }, Some(s)) if s <= period => Ok(Some((s, period))),
            (NeuronType::Tonic | NeuronType::Follower, None) => Ok(None),
            _ => Err(mismatch()),
        }
    }

    /// Output function of the neuron automaton: whether it fires given the
    /// previous-step excitation stored in `runtime` and the current
    /// inhibition flag. Inhibition dominates a simultaneous excitation.
    pub fn output(&self, runtime: &NeuronRuntime, inhibited: bool) -> Result<bool, ModelError> {
        let osc = self.oscillator_state(runtime)?;
        if inhibited {
            return Ok(false);
        }
        Ok(match (self.kind, osc) {
            (NeuronType::Tonic, _) => true,
            (NeuronType::Follower, _) => runtime.prev_excited,
            (NeuronType::Oscillator { .. }, Some((s, period))) => {
                runtime.prev_excited || s == period
            }
            (NeuronType::Oscillator { .. }, None) => unreachable!("checked above"),
        })
    }

    /// Activity before competition: the output function with inhibition
    /// forced off.
    pub fn potential_output(&self, runtime: &NeuronRuntime) -> Result<bool, ModelError> {
        self.output(runtime, false)
    }

    /// Automaton transition at the end of a step.
    ///
    /// Oscillators reset to 0 when excited in the previous step and not
    /// inhibited now; otherwise they count up towards the period and, once
    /// there, reset only after actually firing.
    pub fn advance_state(
        &self,
        runtime: &NeuronRuntime,
        flags: StepFlags,
    ) -> Result<NeuronRuntime, ModelError> {
        let state = self.oscillator_state(runtime)?.map(|(s, period)| {
            if runtime.prev_excited && !flags.inhibited {
                0
            } else if s < period {
                s + 1
            } else if flags.fired {
                0
            } else {
                period
            }
        });
        Ok(NeuronRuntime {
            state,
            prev_inhibited: flags.inhibited,
            prev_excited: flags.excited,
        })
    }

    /// Amount of transmitter `j` released when active, scaled by the rebound
    /// gain if the neuron was inhibited in the previous step.
    pub fn effective_output(&self, runtime: &NeuronRuntime, transmitter: usize) -> Quantity {
        let base = &self.outputs[transmitter];
        if runtime.prev_inhibited {
            base * &self.pir_gain
        } else {
            base.clone()
        }
    }

    /// True when some transmitter is both released and inhibitory for this
    /// neuron, so it can inhibit itself.
    pub fn self_inhibiting(&self) -> bool {
        self.inputs
            .iter()
            .zip(&self.outputs)
            .any(|(w, d)| w.is_negative() && d.is_positive())
    }

    fn violations(&self, transmitters: usize) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut bad = |msg: String| out.push(Violation::neuron(&self.name, msg));
        if !self.inhibition_threshold.is_negative() {
            bad("inhibition threshold must be negative".into());
        }
        if !self.excitation_threshold.is_positive() {
            bad("excitation threshold must be positive".into());
        }
        if self.pir_gain < 1 {
            bad("pir_gain must be ≥ 1".into());
        }
        if self.inputs.len() != transmitters {
            bad(format!(
                "input row has {} entries, expected {transmitters}",
                self.inputs.len()
            ));
        }
        if self.outputs.len() != transmitters {
            bad(format!(
                "output row has {} entries, expected {transmitters}",
                self.outputs.len()
            ));
        }
        for (j, d) in self.outputs.iter().enumerate() {
            if d.is_negative() {
                bad(format!("output for transmitter {j} must be non-negative"));
            }
        }
        match (self.kind, self.initial_state) {
            (NeuronType::Oscillator { period }, Some(s)) if s > period => {
                bad(format!("initial_state {s} exceeds period {period}"));
            }
            (NeuronType::Tonic | NeuronType::Follower, Some(_)) => {
                bad(format!(
                    "initial_state is only valid for oscillator neurons, not {}",
                    self.kind.label()
                ));
            }
            _ => {}
        }
        out
    }
}

/// Immutable, validated description of a multi-transmitter network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkSpec {
    transmitters: Vec<TransmitterId>,
    neurons: Vec<NeuronSpec>,
}

impl NetworkSpec {
    /// Validates and assembles a network. All violations are reported at once.
    pub fn new(
        transmitters: Vec<String>,
        neurons: Vec<NeuronSpec>,
    ) -> Result<Self, ValidationError> {
        let mut violations = Vec::new();
        let mut seen = HashSet::new();
        for name in &transmitters {
            if !seen.insert(name.as_str()) {
                violations.push(Violation::network(format!(
                    "duplicate transmitter '{name}'"
                )));
            }
        }
        let mut seen = HashSet::new();
        for neuron in &neurons {
            if !seen.insert(neuron.name.as_str()) {
                violations.push(Violation::network(format!(
                    "duplicate neuron '{}'",
                    neuron.name
                )));
            }
            violations.extend(neuron.violations(transmitters.len()));
        }
        if !violations.is_empty() {
            return Err(ValidationError(violations));
        }
        let transmitters = transmitters
            .into_iter()
            .enumerate()
            .map(|(index, name)| TransmitterId { index, name })
            .collect();
        Ok(NetworkSpec {
            transmitters,
            neurons,
        })
    }

    pub fn transmitters(&self) -> &[TransmitterId] {
        &self.transmitters
    }

    pub fn transmitter_index(&self, name: &str) -> Option<usize> {
        self.transmitters.iter().position(|t| t.name == name)
    }

    pub fn neurons(&self) -> &[NeuronSpec] {
        &self.neurons
    }

    pub fn neuron(&self, index: usize) -> &NeuronSpec {
        &self.neurons[index]
    }

    pub fn neuron_count(&self) -> usize {
        self.neurons.len()
    }

    pub fn transmitter_count(&self) -> usize {
        self.transmitters.len()
    }

    pub fn initial_runtimes(&self) -> Vec<NeuronRuntime> {
        self.neurons
            .iter()
            .map(NeuronSpec::initial_runtime)
            .collect()
    }

    pub fn zero_ecs(&self) -> EcsState {
        EcsState::zero(self.transmitters.len())
    }

    pub fn has_self_inhibition(&self) -> bool {
        self.neurons.iter().any(NeuronSpec::self_inhibiting)
    }

    /// Checks that runtimes and ECS have the shapes this network expects.
    pub fn check_shapes(
        &self,
        runtimes: &[NeuronRuntime],
        ecs: &EcsState,
    ) -> Result<(), ModelError> {
        check_len("runtimes", self.neurons.len(), runtimes.len())?;
        check_len("ECS", self.transmitters.len(), ecs.len())
    }
}
