//! Scenarios shipped with the crate.

use crate::format::{parse_scenario, Scenario};

/// Two tonic neurons inhibiting each other through separate transmitters.
pub const HCO: &str = include_str!("../scenarios/hco.scenario");

/// Three-phase feeding generator: oscillator, follower and tonic neuron.
pub const LYMNAEA: &str = include_str!("../scenarios/lymnaea.scenario");

pub fn hco() -> Scenario {
    parse_scenario(HCO).expect("bundled hco.scenario is valid")
}

pub fn lymnaea() -> Scenario {
    parse_scenario(LYMNAEA).expect("bundled lymnaea.scenario is valid")
}

/// All bundled scenarios with their file names.
pub fn all() -> Vec<(&'static str, Scenario)> {
    vec![("hco.scenario", hco()), ("lymnaea.scenario", lymnaea())]
}
