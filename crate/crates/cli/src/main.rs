use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ecsnet::competition::{release_sums, StepResult};
use ecsnet::format::{parse_scenario, write_scenario, write_trace_csv, Scenario, ScenarioError};
use ecsnet::model::{EcsState, NetworkSpec, NeuronRuntime};
use ecsnet::simulator::{detect_rhythm, run, Trace};
use ecsnet::verify::{verify, verify_with, VerifyConfig, DEFAULT_SEED};
use ecsnet::ModelError;

const DEFAULT_HORIZON: usize = 30;

#[derive(Parser)]
#[command(
    name = "ecsnet",
    version,
    about = "Simulate multi-transmitter neuronal networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and print its trace.
    Run {
        scenario: PathBuf,
        /// Number of steps; overrides the scenario's own horizon.
        #[arg(long)]
        horizon: Option<usize>,
        /// Write the trace as CSV to PATH (`-` for stdout).
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
        /// Print one activity row per neuron: `#` active, `.` silent.
        #[arg(long)]
        raster: bool,
        /// Print the detected period and activity pattern.
        #[arg(long)]
        rhythm: bool,
        /// Steps skipped before rhythm detection (default: neuron count).
        #[arg(long)]
        transient: Option<usize>,
    },
    /// Parse a scenario and report every invariant violation.
    Validate { scenario: PathBuf },
    /// Differential check of the engine against the reference resolver.
    Verify {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        #[arg(long, default_value_t = VerifyConfig::default().horizon)]
        horizon: usize,
        /// Replace the engine with a resolver that skips competition.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

enum Failure {
    Invalid(String),
    Io(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Io(_) => 2,
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|err| Failure::Io(format!("{}: {err}", path.display())))
}

fn describe(path: &Path, err: &ScenarioError) -> String {
    match err {
        ScenarioError::Syntax { .. } => format!("{}: {err}", path.display()),
        ScenarioError::Invalid(_) => err
            .violations()
            .iter()
            .map(|v| format!("{}: {v}", path.display()))
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

fn load(path: &Path) -> Result<Scenario, Failure> {
    let text = read(path)?;
    parse_scenario(&text).map_err(|err| Failure::Invalid(describe(path, &err)))
}

fn raster(trace: &Trace) -> String {
    let width = trace
        .spec
        .neurons()
        .iter()
        .map(|n| n.name.len())
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    for (i, neuron) in trace.spec.neurons().iter().enumerate() {
        let cells: String = trace
            .steps
            .iter()
            .map(|s| if s.active[i] { '#' } else { '.' })
            .collect();
        out.push_str(&format!("{:<width$} {cells}\n", neuron.name));
    }
    out
}

fn cmd_run(
    path: &Path,
    horizon: Option<usize>,
    csv: Option<&Path>,
    show_raster: bool,
    show_rhythm: bool,
    transient: Option<usize>,
) -> Result<(), Failure> {
    let scenario = load(path)?;
    let horizon = horizon.or(scenario.horizon).unwrap_or(DEFAULT_HORIZON);
    let trace = run(&scenario.network, horizon).map_err(|err| Failure::Invalid(err.to_string()))?;

    let csv_text = write_trace_csv(&trace);
    match csv {
        Some(p) if p == Path::new("-") => print!("{csv_text}"),
        Some(p) => {
            fs::write(p, &csv_text).map_err(|err| Failure::Io(format!("{}: {err}", p.display())))?
        }
        None if !show_raster && !show_rhythm => print!("{csv_text}"),
        None => {}
    }
    if show_raster {
        print!("{}", raster(&trace));
    }
    if show_rhythm {
        let transient = transient.unwrap_or(trace.spec.neuron_count());
        match detect_rhythm(&trace, transient) {
            Some(rhythm) => println!(
                "period={} pattern={}",
                rhythm.period,
                rhythm.describe(&trace.spec)
            ),
            None => println!("period=none"),
        }
    }
    Ok(())
}

fn cmd_validate(path: &Path) -> Result<(), Failure> {
    let scenario = load(path)?;
    println!(
        "{}: ok ({} neurons, {} transmitters)",
        path.display(),
        scenario.network.neuron_count(),
        scenario.network.transmitter_count()
    );
    Ok(())
}

fn skip_competition(
    spec: &NetworkSpec,
    runtimes: &[NeuronRuntime],
    _: &EcsState,
) -> Result<StepResult, ModelError> {
    let active = spec
        .neurons()
        .iter()
        .zip(runtimes)
        .map(|(n, r)| n.potential_output(r))
        .collect::<Result<Vec<_>, _>>()?;
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

fn cmd_verify(seed: u64, cases: usize, horizon: usize, inject_fault: bool) -> Result<(), Failure> {
    let config = VerifyConfig {
        seed,
        cases,
        horizon,
        ..VerifyConfig::default()
    };
    let report = if inject_fault {
        verify_with(&config, &skip_competition)
    } else {
        verify(&config)
    };
    println!(
        "seed={seed} {} cases: {} passed, {} failed ({} steps checked)",
        report.cases,
        report.passed,
        report.cases - report.passed,
        report.steps_checked
    );
    match report.failures.first() {
        None => Ok(()),
        Some(first) => {
            eprintln!(
                "case {} ({} corpus) fails at step {}: {}",
                first.case, first.corpus, first.step, first.failure
            );
            eprintln!("minimal reproducer follows on stdout");
            print!("{}", write_scenario(&first.network, Some(first.horizon)));
            Err(Failure::Invalid(format!(
                "{} divergent case(s)",
                report.failures.len()
            )))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run {
            scenario,
            horizon,
            csv,
            raster,
            rhythm,
            transient,
        } => cmd_run(
            scenario,
            *horizon,
            csv.as_deref(),
            *raster,
            *rhythm,
            *transient,
        ),
        Command::Validate { scenario } => cmd_validate(scenario),
        Command::Verify {
            seed,
            cases,
            horizon,
            inject_fault,
        } => cmd_verify(*seed, *cases, *horizon, *inject_fault),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Invalid(msg) | Failure::Io(msg) => eprintln!("error: {msg}"),
            }
            ExitCode::from(failure.exit_code())
        }
    }
}
