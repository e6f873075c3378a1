//! The `cvforge` command line: config-driven cross-validation runs,
//! comparison of runs that share a fold plan, inspection exports and
//! single-fit preprocessing dumps.

pub mod commands;
pub mod config;
pub mod error;
pub mod result_doc;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{CompareArgs, FoldId, InspectArgs, PreprocessArgs, RunArgs, What};

#[derive(Parser)]
#[command(name = "cvforge", version, about = "Leakage-free cross-validated evaluation of ML pipelines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhatArg {
    Predictions,
    Params,
}

#[derive(Subcommand)]
enum Command {
    /// Cross-validate the pipeline described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Data file, overriding the config's `data`.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Overrides the config's `seed` and CVFORGE_SEED.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for fold evaluation; results do not depend on it.
        #[arg(long)]
        jobs: Option<usize>,
        /// Result JSON path, overriding the config's `out`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pairwise corrected t-tests between results on the same fold plan.
    Compare {
        #[arg(required = true, num_args = 2..)]
        results: Vec<PathBuf>,
        /// Defaults to the first metric of the first result.
        #[arg(long)]
        metric: Option<String>,
        /// Comparison JSON path; the text table and long-format fold scores
        /// are written next to it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export held-out predictions (CSV) or fitted parameters (JSON).
    Inspect {
        result: PathBuf,
        /// Restrict to one fold, as REPEAT:FOLD.
        #[arg(long)]
        fold: Option<FoldId>,
        #[arg(long, value_enum, default_value = "predictions")]
        what: WhatArg,
        /// Output path; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the pipeline up to a step on the full data and dump the table.
    /// Not cross-validated; for inspection only.
    Preprocess {
        #[arg(long)]
        config: PathBuf,
        /// Name of the last transformer step to apply.
        #[arg(long)]
        until: String,
        /// Output CSV path; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match cli.command {
        Command::Run {
            config,
            data,
            seed,
            jobs,
            out,
        } => commands::run(&RunArgs {
            config,
            data,
            seed,
            jobs: jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
            out,
        }),
        Command::Compare { results, metric, out } => commands::compare(&CompareArgs { results, metric, out }),
        Command::Inspect { result, fold, what, out } => commands::inspect(&InspectArgs {
            result,
            fold,
            what: match what {
                WhatArg::Predictions => What::Predictions,
                WhatArg::Params => What::Params,
            },
            out,
        }),
        Command::Preprocess { config, until, out } => commands::preprocess(&PreprocessArgs { config, until, out }),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
