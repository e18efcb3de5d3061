use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use junta_lc::analysis::fraction_low_influence;
use junta_lc::bench::{run_criterion, CRITERIA};
use junta_lc::harness::{
    emit_json_line, emit_report, run_correction_experiment, Algo, ExperimentConfig, XMode,
};
use junta_lc::lowerbound::{maj_ambiguity_check, run_distinguisher, Strategy};

#[derive(Parser)]
#[command(name = "junta-lc", version, about = "Local correction experiments for juntas")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded correction trials and write a JSON-lines report.
    Correct {
        #[arg(long)]
        algo: String,
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "none")]
        corruption: String,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "random")]
        x_mode: String,
        #[arg(long)]
        repeat_t: Option<usize>,
        /// Core truth-table file (`k=<k>` line, then hex) instead of a random core.
        #[arg(long)]
        core: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Measure a distinguisher between the two hard distributions.
    Lowerbound {
        #[arg(long)]
        strategy: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        queries: u64,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fraction of random k-variable cores with some influence below 1/50.
    Influence {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Exhaustive check of the Maj_{n-1} relabeling ambiguity.
    Ambiguity {
        #[arg(long)]
        n: usize,
    },
    /// Run the acceptance suite.
    Bench {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Run only these criteria (1..=10).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        /// Directory for the reproducibility reports; a temporary one otherwise.
        #[arg(long)]
        scratch: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct InfluenceSurvey {
    k: usize,
    samples: u64,
    seed: u64,
    low_fraction: f64,
}

fn print_json<T: Serialize>(value: &T) -> junta_lc::Result<()> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

fn run(cli: Cli) -> junta_lc::Result<bool> {
    match cli.command {
        Command::Correct {
            algo,
            k,
            n,
            corruption,
            trials,
            seed,
            x_mode,
            repeat_t,
            core,
            out,
        } => {
            let mut cfg = ExperimentConfig::new(algo.parse::<Algo>()?, k, n, &corruption, trials, seed)
                .with_x_mode(x_mode.parse::<XMode>()?);
            cfg.repeat_t = repeat_t;
            cfg.core = core;
            let outcome = run_correction_experiment(&cfg)?;
            emit_report(&outcome.records, &outcome.summary, &out)?;
            print_json(&outcome.summary)?;
        }
        Command::Lowerbound {
            strategy,
            n,
            k,
            queries,
            trials,
            seed,
            out,
        } => {
            let strategy: Strategy = strategy.parse()?;
            let report = run_distinguisher(&strategy, queries, n, k, trials, seed)?;
            emit_json_line(&report, &out)?;
            print_json(&report)?;
        }
        Command::Influence { k, samples, seed } => {
            let low_fraction = fraction_low_influence(k, samples, seed)?;
            print_json(&InfluenceSurvey {
                k,
                samples,
                seed,
                low_fraction,
            })?;
        }
        Command::Ambiguity { n } => print_json(&maj_ambiguity_check(n)?)?,
        Command::Bench {
            seed,
            only,
            scratch,
        } => {
            let ids: Vec<u8> = if only.is_empty() { CRITERIA.to_vec() } else { only };
            let dir = scratch.unwrap_or_else(|| {
                std::env::temp_dir().join(format!("junta-lc-bench-{}", std::process::id()))
            });
            std::fs::create_dir_all(&dir)?;
            let mut all_passed = true;
            for id in ids {
                let outcome = run_criterion(id, seed, &dir)?;
                all_passed &= outcome.passed;
                println!("{outcome}");
            }
            return Ok(all_passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 1 })
        }
    }
}
