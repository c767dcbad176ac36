use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use onmt_core::noise::{
    generate_bursts, generate_poisson_impulses, generate_rrc_signal, generate_thermal,
    poisson_pileup_expected,
};
use onmt_core::waveform::{
    generate_impulse_train, generate_square, generate_tone, generate_triangle,
};
use onmt_core::RngSeed;
use onmt_harness::formats::{
    design_from_json, read_signal, write_signal, DesignJson, SignalFormat,
};
use onmt_harness::runner::{run, RunOptions};
use onmt_harness::scenario::{self, Scenario};

#[derive(Parser)]
#[command(
    name = "onmt",
    version,
    about = "Streaming outlier-noise mitigation toolkit: signal generation, \
             nonlinear filtering chains, and reproduction scenarios"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a test signal and write it to a file.
    Generate(GenerateArgs),
    /// Apply a filter design (JSON) to a signal file.
    Filter(FilterArgs),
    /// Run a scenario: all grid points, result table, traces and plots.
    Run(RunArgs),
    /// Run a scenario's sweep grid, emitting only the result table.
    Sweep(RunArgs),
    /// Check a scenario file against the schema without running it.
    Validate { scenario: String },
    /// Show a scenario resolved to its full parameter set.
    Describe { scenario: String },
    /// List the bundled scenarios.
    List,
}

#[derive(Args)]
struct GenerateArgs {
    /// thermal | poisson | bursts | rrc | tone | square | triangle | impulse-train
    #[arg(long)]
    kind: String,
    #[arg(long, default_value_t = 64_000.0)]
    rate: f64,
    #[arg(long, default_value_t = 1.0)]
    duration: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Mean-square power (thermal, bursts).
    #[arg(long, default_value_t = 1.0)]
    power: f64,
    /// Event rate in Hz (poisson).
    #[arg(long, default_value_t = 100.0)]
    lambda: f64,
    /// Impulse area standard deviation (poisson).
    #[arg(long, default_value_t = 1.0)]
    amp_std: f64,
    /// Signal bandwidth in Hz (rrc).
    #[arg(long, default_value_t = 1000.0)]
    b0: f64,
    /// Waveform period in seconds (tone, square, triangle, impulse-train).
    #[arg(long, default_value_t = 0.01)]
    period: f64,
    /// Waveform amplitude, or impulse area for impulse-train.
    #[arg(long, default_value_t = 1.0)]
    amplitude: f64,
    /// Burst repetition period in seconds (bursts).
    #[arg(long, default_value_t = 0.01)]
    burst_period: f64,
    /// Burst duty cycle in (0, 1] (bursts).
    #[arg(long, default_value_t = 0.25)]
    duty: f64,
    /// Output file.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "csv")]
    format: SignalFormat,
}

#[derive(Args)]
struct FilterArgs {
    /// Filter design JSON file (see the design schema in the README).
    #[arg(long)]
    design: PathBuf,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value = "csv")]
    format: SignalFormat,
}

#[derive(Args)]
struct RunArgs {
    /// Bundled scenario name or path to a scenario TOML file.
    scenario: String,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Override the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Signal container for any emitted signals.
    #[arg(long, default_value = "csv")]
    format: SignalFormat,
}

fn main() {
    if let Err(e) = main_inner() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn main_inner() -> Result<()> {
    match Cli::parse().command {
        Command::Generate(args) => generate(args),
        Command::Filter(args) => filter(args),
        Command::Run(args) => run_scenario(args, true),
        Command::Sweep(args) => run_scenario(args, false),
        Command::Validate { scenario } => {
            let sc = scenario::load(&scenario)?;
            sc.validate()?;
            println!("ok: {} ({})", sc.name, sc.kind_name());
            Ok(())
        }
        Command::Describe { scenario } => {
            let sc = scenario::load(&scenario)?;
            sc.validate()?;
            print!("{}", sc.to_toml()?);
            Ok(())
        }
        Command::List => {
            for (name, _, desc) in scenario::BUNDLED {
                println!("{name:<20} {desc}");
            }
            Ok(())
        }
    }
}

fn generate(args: GenerateArgs) -> Result<()> {
    let seed = RngSeed(args.seed);
    let signal = match args.kind.as_str() {
        "thermal" => generate_thermal(args.duration, args.power, args.rate, seed)?,
        "poisson" => {
            if poisson_pileup_expected(args.lambda, args.rate) {
                eprintln!(
                    "warning: lambda {} /s at {} Hz means multiple arrivals per sample; \
                     they are merged by summation",
                    args.lambda, args.rate
                );
            }
            generate_poisson_impulses(args.duration, args.lambda, args.amp_std, args.rate, seed)?
        }
        "bursts" => generate_bursts(
            args.duration,
            args.burst_period,
            args.duty,
            args.power,
            args.rate,
            seed,
        )?,
        "rrc" => generate_rrc_signal(args.b0, args.duration, args.rate, seed)?,
        "tone" => generate_tone(args.period, args.amplitude, args.rate, args.duration)?,
        "square" => generate_square(args.period, args.amplitude, args.rate, args.duration)?,
        "triangle" => generate_triangle(args.period, args.amplitude, args.rate, args.duration)?,
        "impulse-train" => {
            generate_impulse_train(args.period, args.amplitude, args.rate, args.duration)?
        }
        other => bail!("unknown signal kind {other:?}"),
    };
    write_signal(&args.out, &signal, args.format)?;
    println!(
        "wrote {} samples at {} Hz to {}",
        signal.len(),
        signal.sample_rate(),
        args.out.display()
    );
    Ok(())
}

fn filter(args: FilterArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.design)
        .with_context(|| args.design.display().to_string())?;
    let json: DesignJson = serde_json::from_str(&text).context("parsing filter design")?;
    let design = design_from_json(&json)?;
    let input = read_signal(&args.input)?;
    let output = design.apply(&input)?;
    write_signal(&args.output, &output, args.format)?;
    println!(
        "filtered {} samples -> {}",
        input.len(),
        args.output.display()
    );
    Ok(())
}

fn run_scenario(args: RunArgs, emit_traces: bool) -> Result<()> {
    let sc: Scenario = scenario::load(&args.scenario)?;
    let opts = RunOptions {
        out_dir: Some(args.out_dir.clone()),
        seed_override: args.seed,
        emit_traces,
    };
    let outcome = run(&sc, &opts)?;
    for note in &outcome.notes {
        println!("{note}");
    }
    println!(
        "{}: {} result rows, {} files under {}",
        sc.name,
        outcome.rows.len(),
        outcome.files.len(),
        args.out_dir.join(&sc.name).display()
    );
    Ok(())
}
