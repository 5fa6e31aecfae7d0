//! `mauc`: batch experiments for the memory-assisted universal coder.
//!
//! Every command prints its result table to stdout (and to `--out` when
//! given) and a wall-clock line to stderr. Tables embed the resolved config
//! and seed, so any output file describes how to regenerate itself. Exit
//! codes: 0 success, 2 usage error, 3 numeric failure, 4 round-trip
//! failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mauc::config::{CommandKind, ExperimentConfig, OutputFormat};
use mauc::error::RunError;

/// The headline operating point, in bytes, before reinterpretation.
const HEADLINE_BLOCK_BYTES: u64 = 131_072;
const HEADLINE_MEMORY_BYTES: u64 = 8_388_608;

#[derive(Parser)]
#[command(
    name = "mauc",
    version,
    about = "Memory-assisted universal source coding experiments",
    propagate_version = true
)]
struct Cli {
    /// Worker threads for the Monte Carlo pool (default: all cores).
    /// Results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the closed-form gain lower bound, one row per memory size.
    Bound(BoundArgs),
    /// Measure the gain distribution at one memory size, next to the bound.
    Simulate(SimulateArgs),
    /// Empirical gain and bound across an increasing memory schedule.
    Sweep(SweepArgs),
    /// Warm-started per-symbol cost against the source entropy rate.
    EntropyCheck(EntropyCheckArgs),
    /// The 128 KiB / 8 MiB headline point under explicit interpretation flags.
    ReproducePaper(ReproducePaperArgs),
    /// Randomized encode/decode round-trip gate.
    RoundtripFuzz(RoundtripFuzzArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Root seed for every random stream; the MAUC_SEED environment
    /// variable supplies the default.
    #[arg(long, env = "MAUC_SEED", default_value_t = 0)]
    seed: u64,
    /// Also write the table here; stdout always gets a copy.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Table format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

#[derive(Args)]
struct ModelArgs {
    /// Alphabet size.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Source memory order (0 or 1).
    #[arg(long, default_value_t = 0)]
    order: usize,
    /// Confidence parameter in (0, 1).
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
}

#[derive(Args)]
struct TrialArgs {
    /// Parameter draws.
    #[arg(long, default_value_t = 200)]
    theta_trials: usize,
    /// Payload draws per parameter.
    #[arg(long, default_value_t = 20)]
    x_trials: usize,
}

#[derive(Args)]
struct BoundArgs {
    /// Block length in symbols.
    #[arg(long, default_value_t = 1024)]
    n: u64,
    /// Memory sizes in symbols; a comma-separated list sweeps the bound.
    #[arg(long, value_delimiter = ',', default_value = "65536")]
    m: Vec<u64>,
    /// Assumed entropy rate in bits per symbol; when omitted, a seeded
    /// parameter draw supplies the block entropy.
    #[arg(long)]
    entropy_rate: Option<f64>,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SimulateArgs {
    /// Block length in symbols.
    #[arg(long, default_value_t = 512)]
    n: u64,
    /// Memory size in symbols.
    #[arg(long, default_value_t = 16384)]
    m: u64,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    trials: TrialArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Block length in symbols.
    #[arg(long, default_value_t = 512)]
    n: u64,
    /// Strictly increasing memory sizes in symbols.
    #[arg(long, value_delimiter = ',', required = true)]
    m: Vec<u64>,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    trials: TrialArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct EntropyCheckArgs {
    /// Block length in symbols.
    #[arg(long, default_value_t = 1024)]
    n: u64,
    /// Strictly increasing memory sizes in symbols.
    #[arg(long, value_delimiter = ',', default_value = "256,4096,65536")]
    m: Vec<u64>,
    /// Alphabet size.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Source memory order (0 or 1).
    #[arg(long, default_value_t = 1)]
    order: usize,
    /// Payload draws scored per memory size.
    #[arg(long, default_value_t = 100)]
    x_trials: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ReproducePaperArgs {
    /// Bits per symbol for reinterpreting the headline byte counts.
    #[arg(long, required = true)]
    symbol_width: u32,
    /// Assumed source entropy rate, bits per symbol.
    #[arg(long, required = true)]
    entropy_rate: f64,
    /// Alphabet size; the headline does not state it.
    #[arg(long, required = true)]
    k: usize,
    /// Source memory order; the headline claim is first-order.
    #[arg(long, default_value_t = 1)]
    order: usize,
    /// Confidence parameter in (0, 1).
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    /// Block length in symbols; default is 131072 bytes converted.
    #[arg(long)]
    n: Option<u64>,
    /// Memory size in symbols; default is 8388608 bytes converted.
    #[arg(long)]
    m: Option<u64>,
    /// Shrink factor for the empirical leg.
    #[arg(long, default_value_t = 64)]
    scale: u64,
    /// Parameter draws for the empirical leg.
    #[arg(long, default_value_t = 40)]
    theta_trials: usize,
    /// Payload draws per parameter for the empirical leg.
    #[arg(long, default_value_t = 5)]
    x_trials: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct RoundtripFuzzArgs {
    /// Round trips to run.
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Flip one payload bit per block; decoding must not round-trip it.
    #[arg(long)]
    corrupt: bool,
    #[command(flatten)]
    output: OutputArgs,
}

/// Bytes reinterpreted as width-bit symbols; refuses remainders.
fn bytes_to_symbols(bytes: u64, width: u32, what: &str) -> Result<u64, RunError> {
    if width == 0 || width > 16 {
        return Err(RunError::Usage(format!(
            "symbol width must lie in 1..=16 bits, got {width}"
        )));
    }
    let bits = bytes * 8;
    if !bits.is_multiple_of(u64::from(width)) {
        return Err(RunError::Usage(format!(
            "symbol width {width} does not divide the {bits}-bit {what}"
        )));
    }
    Ok(bits / u64::from(width))
}

fn build_config(command: Command) -> Result<(ExperimentConfig, OutputArgs), RunError> {
    let (cfg, output) = match command {
        Command::Bound(a) => (
            ExperimentConfig {
                command: CommandKind::Bound,
                n: a.n,
                m: a.m,
                k: a.model.k,
                order: a.model.order,
                epsilon: a.model.epsilon,
                theta_trials: usize::from(a.entropy_rate.is_none()),
                x_trials: 0,
                seed: a.output.seed,
                format: a.output.format,
                entropy_rate: a.entropy_rate,
                symbol_width: None,
                scale: None,
                fuzz_trials: None,
                corrupt: None,
            },
            a.output,
        ),
        Command::Simulate(a) => (
            ExperimentConfig {
                command: CommandKind::Simulate,
                n: a.n,
                m: vec![a.m],
                k: a.model.k,
                order: a.model.order,
                epsilon: a.model.epsilon,
                theta_trials: a.trials.theta_trials,
                x_trials: a.trials.x_trials,
                seed: a.output.seed,
                format: a.output.format,
                entropy_rate: None,
                symbol_width: None,
                scale: None,
                fuzz_trials: None,
                corrupt: None,
            },
            a.output,
        ),
        Command::Sweep(a) => (
            ExperimentConfig {
                command: CommandKind::Sweep,
                n: a.n,
                m: a.m,
                k: a.model.k,
                order: a.model.order,
                epsilon: a.model.epsilon,
                theta_trials: a.trials.theta_trials,
                x_trials: a.trials.x_trials,
                seed: a.output.seed,
                format: a.output.format,
                entropy_rate: None,
                symbol_width: None,
                scale: None,
                fuzz_trials: None,
                corrupt: None,
            },
            a.output,
        ),
        Command::EntropyCheck(a) => (
            ExperimentConfig {
                command: CommandKind::EntropyCheck,
                n: a.n,
                m: a.m,
                k: a.k,
                order: a.order,
                epsilon: 0.05,
                theta_trials: 1,
                x_trials: a.x_trials,
                seed: a.output.seed,
                format: a.output.format,
                entropy_rate: None,
                symbol_width: None,
                scale: None,
                fuzz_trials: None,
                corrupt: None,
            },
            a.output,
        ),
        Command::ReproducePaper(a) => {
            let n = match a.n {
                Some(n) => n,
                None => bytes_to_symbols(HEADLINE_BLOCK_BYTES, a.symbol_width, "block")?,
            };
            let m = match a.m {
                Some(m) => m,
                None => bytes_to_symbols(HEADLINE_MEMORY_BYTES, a.symbol_width, "memory")?,
            };
            (
                ExperimentConfig {
                    command: CommandKind::ReproducePaper,
                    n,
                    m: vec![m],
                    k: a.k,
                    order: a.order,
                    epsilon: a.epsilon,
                    theta_trials: a.theta_trials,
                    x_trials: a.x_trials,
                    seed: a.output.seed,
                    format: a.output.format,
                    entropy_rate: Some(a.entropy_rate),
                    symbol_width: Some(a.symbol_width),
                    scale: Some(a.scale),
                    fuzz_trials: None,
                    corrupt: None,
                },
                a.output,
            )
        }
        Command::RoundtripFuzz(a) => (
            ExperimentConfig {
                command: CommandKind::RoundtripFuzz,
                n: 0,
                m: Vec::new(),
                k: 2,
                order: 0,
                epsilon: 0.5,
                theta_trials: 0,
                x_trials: 0,
                seed: a.output.seed,
                format: a.output.format,
                entropy_rate: None,
                symbol_width: None,
                scale: None,
                fuzz_trials: Some(a.trials),
                corrupt: Some(a.corrupt),
            },
            a.output,
        ),
    };
    Ok((cfg, output))
}

fn run(cli: Cli) -> Result<(), RunError> {
    let (cfg, output) = build_config(cli.command)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
        .map_err(|e| RunError::Numeric(format!("thread pool: {e}")))?;
    let outcome = pool.install(|| mauc::run_config(&cfg))?;

    let text = outcome.record.render(cfg.format);
    print!("{text}");
    if let Some(path) = &output.out {
        std::fs::write(path, &text)
            .map_err(|e| RunError::Numeric(format!("writing {}: {e}", path.display())))?;
    }
    eprintln!(
        "# {} finished in {:.3} s",
        cfg.command.name(),
        outcome.record.wall_clock_seconds
    );
    match outcome.gate_failure {
        None => Ok(()),
        Some(err) => Err(err),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("mauc: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
