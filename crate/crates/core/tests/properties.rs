use ecsnet::builtin;
use ecsnet::competition::resolve_step;
use ecsnet::format::{parse_scenario, write_scenario};
use ecsnet::model::{NetworkSpec, NeuronSpec, NeuronType, StepFlags};
use ecsnet::oracle::{check_fixed_point, reference_resolve};
use ecsnet::simulator::run;
use ecsnet::verify::{case_rng, random_network, Corpus};
use proptest::prelude::*;

fn corpus_strategy() -> impl Strategy<Value = Corpus> {
    prop_oneof![Just(Corpus::SelfInhibitionFree), Just(Corpus::Unrestricted)]
}

fn network(seed: u64, corpus: Corpus) -> NetworkSpec {
    random_network(&mut case_rng(seed, 0), corpus, 5, 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn every_step_is_a_fixed_point(seed: u64, corpus in corpus_strategy()) {
        let spec = network(seed, corpus);
        let mut runtimes = spec.initial_runtimes();
        let mut ecs = spec.zero_ecs();
        for _ in 0..12 {
            let step = resolve_step(&spec, &runtimes, &ecs).unwrap();
            prop_assert!(check_fixed_point(&spec, &runtimes, &step).is_empty());
            prop_assert!(step.deactivations.len() <= spec.neuron_count());
            for i in 0..spec.neuron_count() {
                prop_assert!(!(step.inhibited[i] && step.excited[i]));
                prop_assert!(!(step.active[i] && step.inhibited[i]));
            }
            prop_assert_eq!(&reference_resolve(&spec, &runtimes, &ecs).unwrap(), &step);
            prop_assert_eq!(&resolve_step(&spec, &runtimes, &ecs).unwrap(), &step);
            runtimes = spec
                .neurons()
                .iter()
                .zip(&runtimes)
                .enumerate()
                .map(|(i, (n, r))| {
                    n.advance_state(r, StepFlags {
                        inhibited: step.inhibited[i],
                        excited: step.excited[i],
                        fired: step.active[i],
                    })
                    .unwrap()
                })
                .collect();
            ecs = step.ecs;
        }
    }

    #[test]
    fn self_inhibition_free_networks_keep_a_winner(seed: u64) {
        let spec = network(seed, Corpus::SelfInhibitionFree);
        for step in run(&spec, 12).unwrap().steps {
            let candidates = step.active_count() + step.deactivations.len();
            prop_assert!(candidates == 0 || step.active_count() > 0);
        }
    }

    #[test]
    fn deactivation_margins_are_non_positive_and_distinct(seed: u64, corpus in corpus_strategy()) {
        let spec = network(seed, corpus);
        for step in run(&spec, 8).unwrap().steps {
            let mut seen = std::collections::HashSet::new();
            for (k, d) in step.deactivations.iter().enumerate() {
                prop_assert_eq!(d.iteration, k + 1);
                prop_assert!(d.margin <= 0);
                prop_assert!(seen.insert(d.neuron));
                prop_assert!(!step.active[d.neuron]);
            }
        }
    }

    #[test]
    fn runs_are_prefix_closed(seed: u64, corpus in corpus_strategy(), short in 0usize..10) {
        let spec = network(seed, corpus);
        let long = run(&spec, 12).unwrap();
        prop_assert_eq!(&run(&spec, short).unwrap().steps[..], &long.steps[..short]);
    }

    #[test]
    fn scenario_round_trip(seed: u64, corpus in corpus_strategy(), horizon in proptest::option::of(1usize..100)) {
        let spec = network(seed, corpus);
        let text = write_scenario(&spec, horizon);
        let parsed = parse_scenario(&text).unwrap();
        prop_assert_eq!(parsed.network, spec);
        prop_assert_eq!(parsed.horizon, horizon);
    }
}

#[test]
fn hco_has_exactly_one_active_neuron_for_100_steps() {
    let trace = run(&builtin::hco().network, 100).unwrap();
    assert!(trace.steps.iter().all(|s| s.active_count() == 1));
}

#[test]
fn feeding_neurons_take_turns_for_99_steps() {
    let trace = run(&builtin::lymnaea().network, 99).unwrap();
    assert!(trace.steps.iter().all(|s| s.active_count() == 1));
    for window in trace.steps.chunks(3) {
        for i in 0..3 {
            assert_eq!(window.iter().filter(|s| s.active[i]).count(), 1);
        }
    }
}

#[test]
fn lone_oscillator_fires_on_schedule() {
    for period in 0..=5u64 {
        let spec = NetworkSpec::new(
            vec!["a".into()],
            vec![NeuronSpec::new("O", NeuronType::Oscillator { period }, 1)],
        )
        .unwrap();
        let trace = run(&spec, 40).unwrap();
        let fired: Vec<usize> = (1..=40).filter(|&t| trace.activity(t)[0]).collect();
        let expected: Vec<usize> = (1..=40).step_by(period as usize + 1).collect();
        assert_eq!(fired, expected, "period {period}");
    }
}
