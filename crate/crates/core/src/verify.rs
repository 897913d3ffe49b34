//! Randomized differential verification of the engine against the oracle.
//!
//! Each case draws two small random networks from a per-case seed: one with
//! no self-inhibiting neuron and one without that restriction. Both are run
//! step by step through the engine resolver and the reference resolver on
//! identical inputs, and the full traces of both paths are compared. The
//! self-inhibition-free network additionally has to keep at least one
//! neuron active whenever some neuron was a candidate.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::competition::resolve_step;
use crate::model::{NetworkSpec, NeuronSpec, NeuronType, StepFlags};
use crate::oracle::{check_fixed_point, reference_resolve, reference_run};
use crate::quantity::Quantity;
use crate::simulator::{run_with, Resolver};

pub const DEFAULT_SEED: u64 = 20_170_607;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub cases: usize,
    pub horizon: usize,
    pub max_neurons: usize,
    pub max_transmitters: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: DEFAULT_SEED,
            cases: 1000,
            horizon: 16,
            max_neurons: 5,
            max_transmitters: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corpus {
    SelfInhibitionFree,
    Unrestricted,
}

impl fmt::Display for Corpus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Corpus::SelfInhibitionFree => "self-inhibition-free",
            Corpus::Unrestricted => "unrestricted",
        })
    }
}

/// Property that failed on some step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckFailure {
    Error(String),
    Divergence,
    TraceDivergence,
    FixedPoint(String),
    MutualExclusion { neuron: usize },
    Termination { deactivations: usize },
    EmptyActiveSet,
}

impl fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckFailure::Error(msg) => write!(f, "resolver error: {msg}"),
            CheckFailure::Divergence => f.write_str("engine and reference step results differ"),
            CheckFailure::TraceDivergence => f.write_str("engine and reference traces differ"),
            CheckFailure::FixedPoint(msg) => write!(f, "not a fixed point: {msg}"),
            CheckFailure::MutualExclusion { neuron } => {
                write!(f, "neuron {neuron} both inhibited and excited")
            }
            CheckFailure::Termination { deactivations } => {
                write!(f, "{deactivations} deactivations exceed the neuron count")
            }
            CheckFailure::EmptyActiveSet => f.write_str("competition silenced every candidate"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CaseFailure {
    pub case: usize,
    pub corpus: Corpus,
    /// 1-based step where the (shrunk) reproducer fails.
    pub step: usize,
    pub failure: CheckFailure,
    pub network: NetworkSpec,
    pub horizon: usize,
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub cases: usize,
    pub passed: usize,
    pub steps_checked: usize,
    pub failures: Vec<CaseFailure>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn ratio(rng: &mut ChaCha8Rng, numer: std::ops::RangeInclusive<i64>, max_denom: i64) -> Quantity {
    Quantity::new(rng.gen_range(numer), rng.gen_range(1..=max_denom))
}

/// Draws a small valid network with small-denominator rational parameters.
pub fn random_network(
    rng: &mut ChaCha8Rng,
    corpus: Corpus,
    max_neurons: usize,
    max_transmitters: usize,
) -> NetworkSpec {
    let n = rng.gen_range(1..=max_neurons.max(1));
    let m = rng.gen_range(1..=max_transmitters.max(1));
    let transmitters: Vec<String> = (0..m).map(|j| format!("t{j}")).collect();
    let neurons = (0..n)
        .map(|i| {
            let kind = match rng.gen_range(0..3) {
                0 => NeuronType::Oscillator {
                    period: rng.gen_range(0..=4),
                },
                1 => NeuronType::Tonic,
                _ => NeuronType::Follower,
            };
            let initial_state = match kind {
                NeuronType::Oscillator { period } if rng.gen_bool(0.5) => {
                    Some(rng.gen_range(0..=period))
                }
                _ => None,
            };
            let mut inputs = Vec::with_capacity(m);
            let mut outputs = Vec::with_capacity(m);
            for _ in 0..m {
                let d = if rng.gen_bool(0.6) {
                    ratio(rng, 1..=3, 2)
                } else {
                    Quantity::zero()
                };
                let mut w = if rng.gen_bool(0.6) {
                    ratio(rng, -3..=3, 3)
                } else {
                    Quantity::zero()
                };
                if corpus == Corpus::SelfInhibitionFree && d.is_positive() && w.is_negative() {
                    w = -w;
                }
                inputs.push(w);
                outputs.push(d);
            }
            NeuronSpec {
                name: format!("N{}", i + 1),
                kind,
                inhibition_threshold: -ratio(rng, 1..=4, 2),
                excitation_threshold: ratio(rng, 1..=4, 2),
                pir_gain: Quantity::one() + ratio(rng, 0..=4, 2),
                inputs,
                outputs,
                initial_state,
            }
        })
        .collect();
    NetworkSpec::new(transmitters, neurons).expect("generated networks are valid")
}

pub fn case_rng(seed: u64, case: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (case as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Runs every property over `horizon` steps. Returns the first failing step.
pub fn check_network(
    spec: &NetworkSpec,
    horizon: usize,
    corpus: Corpus,
    resolver: &Resolver,
) -> Result<(), (usize, CheckFailure)> {
    let n = spec.neuron_count();
    let mut runtimes = spec.initial_runtimes();
    let mut ecs = spec.zero_ecs();
    for t in 1..=horizon {
        let fail = |f: CheckFailure| Err((t, f));
        let step = match resolver(spec, &runtimes, &ecs) {
            Ok(step) => step,
            Err(err) => return fail(CheckFailure::Error(err.to_string())),
        };
        match reference_resolve(spec, &runtimes, &ecs) {
            Ok(reference) if reference == step => {}
            Ok(_) => return fail(CheckFailure::Divergence),
            Err(err) => return fail(CheckFailure::Error(err.to_string())),
        }
        if let Some(v) = check_fixed_point(spec, &runtimes, &step).first() {
            return fail(CheckFailure::FixedPoint(v.to_string()));
        }
        if let Some(neuron) = (0..n).find(|&i| step.inhibited[i] && step.excited[i]) {
            return fail(CheckFailure::MutualExclusion { neuron });
        }
        if step.deactivations.len() > n {
            return fail(CheckFailure::Termination {
                deactivations: step.deactivations.len(),
            });
        }
        if corpus == Corpus::SelfInhibitionFree
            && step.active_count() == 0
            && !step.deactivations.is_empty()
        {
            return fail(CheckFailure::EmptyActiveSet);
        }

        let mut next = Vec::with_capacity(n);
        for (i, (neuron, runtime)) in spec.neurons().iter().zip(&runtimes).enumerate() {
            let flags = StepFlags {
                inhibited: step.inhibited[i],
                excited: step.excited[i],
                fired: step.active[i],
            };
            match neuron.advance_state(runtime, flags) {
                Ok(r) => next.push(r),
                Err(err) => return fail(CheckFailure::Error(err.to_string())),
            }
        }
        runtimes = next;
        ecs = step.ecs;
    }

    let engine = run_with(spec, horizon, resolver);
    let reference = reference_run(spec, horizon);
    match (engine, reference) {
        (Ok(a), Ok(b)) => match a.steps.iter().zip(&b.steps).position(|(x, y)| x != y) {
            None => Ok(()),
            Some(idx) => Err((idx + 1, CheckFailure::TraceDivergence)),
        },
        (Err(err), _) | (_, Err(err)) => Err((horizon, CheckFailure::Error(err.to_string()))),
    }
}

/// Candidate simplifications of a failing network, simplest first.
fn shrink_candidates(spec: &NetworkSpec) -> Vec<NetworkSpec> {
    let names: Vec<String> = spec.transmitters().iter().map(|t| t.name.clone()).collect();
    let neurons = spec.neurons();
    let mut out = Vec::new();

    for i in 0..neurons.len() {
        let mut fewer = neurons.to_vec();
        fewer.remove(i);
        out.extend(NetworkSpec::new(names.clone(), fewer).ok());
    }
    for j in 0..names.len() {
        let mut tnames = names.clone();
        tnames.remove(j);
        let reduced = neurons
            .iter()
            .map(|n| {
                let mut n = n.clone();
                n.inputs.remove(j);
                n.outputs.remove(j);
                n
            })
            .collect();
        out.extend(NetworkSpec::new(tnames, reduced).ok());
    }
    for i in 0..neurons.len() {
        let neuron = &neurons[i];
        let mut variants = Vec::new();
        for j in 0..names.len() {
            if !neuron.inputs[j].is_zero() {
                let mut v = neuron.clone();
                v.inputs[j] = Quantity::zero();
                variants.push(v);
            }
            if !neuron.outputs[j].is_zero() {
                let mut v = neuron.clone();
                v.outputs[j] = Quantity::zero();
                variants.push(v);
            }
        }
        if neuron.pir_gain != 1 {
            let mut v = neuron.clone();
            v.pir_gain = Quantity::one();
            variants.push(v);
        }
        if neuron.initial_state.is_some() {
            let mut v = neuron.clone();
            v.initial_state = None;
            variants.push(v);
        }
        if let NeuronType::Oscillator { period } = neuron.kind {
            if period > 0 && neuron.initial_state.is_none() {
                let mut v = neuron.clone();
                v.kind = NeuronType::Oscillator { period: period - 1 };
                variants.push(v);
            }
        }
        for v in variants {
            let mut all = neurons.to_vec();
            all[i] = v;
            out.extend(NetworkSpec::new(names.clone(), all).ok());
        }
    }
    out
}

/// Greedily simplifies a failing network while it keeps failing.
pub fn shrink(
    spec: &NetworkSpec,
    horizon: usize,
    corpus: Corpus,
    resolver: &Resolver,
) -> (NetworkSpec, usize, usize, CheckFailure) {
    let Err((mut step, mut failure)) = check_network(spec, horizon, corpus, resolver) else {
        panic!("shrink called on a passing network");
    };
    let mut current = spec.clone();
    let mut horizon = step;
    'outer: loop {
        for candidate in shrink_candidates(&current) {
            if let Err((s, f)) = check_network(&candidate, horizon, corpus, resolver) {
                current = candidate;
                step = s;
                horizon = s;
                failure = f;
                continue 'outer;
            }
        }
        break;
    }
    (current, horizon, step, failure)
}

/// Runs the full corpus with the given step resolver.
pub fn verify_with(config: &VerifyConfig, resolver: &Resolver) -> VerifyReport {
    let mut report = VerifyReport::default();
    for case in 0..config.cases {
        let mut rng = case_rng(config.seed, case);
        let mut ok = true;
        for corpus in [Corpus::SelfInhibitionFree, Corpus::Unrestricted] {
            let spec = random_network(
                &mut rng,
                corpus,
                config.max_neurons,
                config.max_transmitters,
            );
            report.steps_checked += config.horizon;
            if check_network(&spec, config.horizon, corpus, resolver).is_err() {
                ok = false;
                let (network, horizon, step, failure) =
                    shrink(&spec, config.horizon, corpus, resolver);
                report.failures.push(CaseFailure {
                    case,
                    corpus,
                    step,
                    failure,
                    network,
                    horizon,
                });
            }
        }
        report.cases += 1;
        if ok {
            report.passed += 1;
        }
    }
    report
}

pub fn verify(config: &VerifyConfig) -> VerifyReport {
    verify_with(config, &resolve_step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::competition::{release_sums, StepResult};
    use crate::error::ModelError;
    use crate::model::{EcsState, NeuronRuntime};

    /// Engine variant that skips competition entirely.
    fn no_competition(
        spec: &NetworkSpec,
        runtimes: &[NeuronRuntime],
        _: &EcsState,
    ) -> Result<StepResult, ModelError> {
        let active: Vec<bool> = spec
            .neurons()
            .iter()
            .zip(runtimes)
            .map(|(n, r)| n.potential_output(r))
            .collect::<Result<_, _>>()?;
        let ecs = release_sums(spec, runtimes, &active);
        let inhibited = spec
            .neurons()
            .iter()
            .map(|n| n.inhibition(&ecs))
            .collect::<Result<_, _>>()?;
        let excited = spec
            .neurons()
            .iter()
            .map(|n| n.excitation(&ecs))
            .collect::<Result<_, _>>()?;
        Ok(StepResult {
            active,
            ecs,
            inhibited,
            excited,
            deactivations: vec![],
        })
    }

    #[test]
    fn generated_networks_respect_corpus() {
        let mut rng = case_rng(7, 0);
        for _ in 0..200 {
            let free = random_network(&mut rng, Corpus::SelfInhibitionFree, 5, 4);
            assert!(!free.has_self_inhibition());
            assert!((1..=5).contains(&free.neuron_count()));
            assert!((1..=4).contains(&free.transmitter_count()));
        }
    }

    #[test]
    fn unrestricted_corpus_contains_self_inhibition() {
        let mut rng = case_rng(7, 1);
        let found = (0..200)
            .any(|_| random_network(&mut rng, Corpus::Unrestricted, 5, 4).has_self_inhibition());
        assert!(found);
    }

    #[test]
    fn small_corpus_passes() {
        let report = verify(&VerifyConfig {
            cases: 50,
            ..VerifyConfig::default()
        });
        assert_eq!(report.cases, 50);
        assert_eq!(report.passed, 50, "{:?}", report.failures.first());
    }

    #[test]
    fn zero_cases_is_trivially_green() {
        let report = verify(&VerifyConfig {
            cases: 0,
            ..VerifyConfig::default()
        });
        assert_eq!((report.cases, report.passed), (0, 0));
        assert!(report.all_passed());
    }

    #[test]
    fn faulty_resolver_is_caught_and_shrunk() {
        let report = verify_with(
            &VerifyConfig {
                cases: 20,
                ..VerifyConfig::default()
            },
            &no_competition,
        );
        assert!(!report.all_passed());
        let failure = &report.failures[0];
        // shrunk reproducer still fails and is no larger than the generator's bound
        assert!(check_network(
            &failure.network,
            failure.horizon,
            failure.corpus,
            &no_competition
        )
        .is_err());
        assert!(failure.network.neuron_count() <= 2, "{:?}", failure.network);
        assert_eq!(failure.step, failure.horizon);
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = random_network(&mut case_rng(99, 3), Corpus::Unrestricted, 5, 4);
        let b = random_network(&mut case_rng(99, 3), Corpus::Unrestricted, 5, 4);
        assert_eq!(a, b);
    }
}
