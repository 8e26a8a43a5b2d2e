use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nbl_cli::{
    run_error_curve, run_gates, run_hyperspace, run_orthogonator, run_verify, verify_transcript,
    Carrier, ErrorCurveSpec, Format, GatesSpec, HyperspaceSpec, OrthogonatorKind, OrthogonatorSpec,
    ResultTable, VerifySpec,
};
use nbl_core::continuum::DEFAULT_THRESHOLD;

/// Noise-based logic experiments.
///
/// Exit status: 0 on success, 1 when an exact invariant check fails,
/// 2 on usage or resource errors.
#[derive(Debug, Parser)]
#[command(name = "nbl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Master seed of every stream used by the experiment.
    #[arg(long, global = true, env = "NBL_SEED", default_value_t = 1)]
    seed: u64,

    /// Number of Monte Carlo trials (experiment-specific default).
    #[arg(long, global = true)]
    trials: Option<usize>,

    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Truth tables of NOT, AND, OR, NAND, NOR and XOR.
    Gates {
        #[arg(long, value_enum, default_value_t = Carrier::Rtw)]
        mode: Carrier,
        /// Use the squeezed scheme (L is the zero signal or the empty train).
        #[arg(long)]
        squeezed: bool,
        /// Steps or slots per context.
        #[arg(long, default_value_t = 1000)]
        window: usize,
        /// Spike probability of the spike references.
        #[arg(long, default_value_t = 0.3)]
        p: f64,
    },
    /// Partition N neuro-bits or demultiplex one spike train onto m wires.
    Orthogonator {
        #[arg(long, value_enum, default_value_t = OrthogonatorKind::Nonsequential)]
        kind: OrthogonatorKind,
        /// N inputs (nonsequential) or m outputs (sequential).
        #[arg(long, short = 'n', default_value_t = 3)]
        order: usize,
        #[arg(long, default_value_t = 10_000)]
        window: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        /// Correlation time of the driving noise, in slots.
        #[arg(long, default_value_t = 5.0)]
        tau: f64,
    },
    /// Correlator error rate against the averaging window.
    ErrorCurve {
        /// Windows in units of tau.
        #[arg(long, value_delimiter = ',', default_value = "5,50,500")]
        windows: Vec<f64>,
        #[arg(long, default_value_t = 2)]
        n_refs: usize,
        /// Samples per correlation time.
        #[arg(long, default_value_t = 4.0)]
        tau: f64,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        /// Gain of independent background noise added to the input.
        #[arg(long, default_value_t = 0.0)]
        noise_gain: f64,
    },
    /// Agreement statistics of an RTW hyperspace basis.
    Hyperspace {
        /// Number of noise-bits N; the basis has 2^N vectors.
        #[arg(long, short = 'n', default_value_t = 2)]
        bits: usize,
        #[arg(long, default_value_t = 100_000)]
        steps: usize,
    },
    /// Monte Carlo of the string verification protocol.
    Verify {
        /// String length in bits.
        #[arg(long, short = 'n', default_value_t = 64)]
        n: usize,
        /// Signature length in bits.
        #[arg(long, short = 'k', default_value_t = 10)]
        k: usize,
        /// Number of flipped bits between the two strings.
        #[arg(long, default_value_t = 1)]
        differ: usize,
        /// Emit the JSON transcript of a single run instead of the table.
        #[arg(long)]
        transcript: bool,
    },
}

fn run(cli: &Cli) -> nbl_cli::Result<Option<ResultTable>> {
    let seed = cli.seed;
    let table = match cli.command {
        Command::Gates {
            mode,
            squeezed,
            window,
            p,
        } => run_gates(&GatesSpec {
            carrier: mode,
            squeezed,
            seed,
            trials: cli.trials.unwrap_or(100),
            window,
            p,
        })?,
        Command::Orthogonator {
            kind,
            order,
            window,
            p,
            tau,
        } => run_orthogonator(&OrthogonatorSpec {
            kind,
            order,
            seed,
            window,
            p,
            tau,
        })?,
        Command::ErrorCurve {
            ref windows,
            n_refs,
            tau,
            threshold,
            noise_gain,
        } => run_error_curve(&ErrorCurveSpec {
            windows: windows.clone(),
            trials: cli.trials.unwrap_or(1000),
            n_refs,
            seed,
            tau,
            threshold,
            noise_gain,
        })?,
        Command::Hyperspace { bits, steps } => run_hyperspace(&HyperspaceSpec {
            n_bits: bits,
            steps,
            seed,
        })?,
        Command::Verify {
            n,
            k,
            differ,
            transcript,
        } => {
            let spec = VerifySpec {
                n,
                k,
                trials: cli.trials.unwrap_or(100_000),
                differ,
                seed,
            };
            if transcript {
                let mut json = serde_json::to_string_pretty(&verify_transcript(&spec)?)?;
                json.push('\n');
                emit(cli, &json)?;
                return Ok(None);
            }
            run_verify(&spec)?
        }
    };
    emit(cli, &table.render(cli.format)?)?;
    Ok(Some(table))
}

fn emit(cli: &Cli, text: &str) -> io::Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Some(table)) if table.failures > 0 => {
            eprintln!("nbl: {} invariant check(s) failed", table.failures);
            ExitCode::from(1)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nbl: {e}");
            ExitCode::from(2)
        }
    }
}
