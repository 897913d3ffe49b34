//! Discrete simulation of multi-transmitter neuronal networks.
//!
//! Neurons are finite automata that talk only through a shared
//! extracellular space (ECS): each active neuron releases transmitters into
//! it, and each neuron reads it through its own receptor weights. Inhibition
//! acts within the same time step, so every step is settled by a
//! competition that switches off the most strongly inhibited active neuron
//! until no active neuron is inhibited.
//!
//! All arithmetic is exact ([`Quantity`]); threshold comparisons never
//! depend on rounding.
//!
//! ```
//! use ecsnet::{builtin, simulator};
//!
//! let hco = builtin::hco().network;
//! let trace = simulator::run(&hco, 4).unwrap();
//! let n1: Vec<bool> = trace.steps.iter().map(|s| s.active[0]).collect();
//! assert_eq!(n1, [true, false, true, false]);
//! ```

pub mod builtin;
pub mod competition;
pub mod error;
pub mod format;
pub mod model;
pub mod oracle;
pub mod quantity;
pub mod simulator;
pub mod verify;

pub use competition::{resolve_step, Deactivation, StepResult};
pub use error::{ModelError, ValidationError, Violation};
pub use format::{parse_scenario, write_scenario, write_trace_csv, Scenario, ScenarioError};
pub use model::{
    EcsState, NetworkSpec, NeuronRuntime, NeuronSpec, NeuronType, StepFlags, TransmitterId,
};
pub use quantity::Quantity;
pub use simulator::{detect_rhythm, run, RhythmPattern, Trace};
