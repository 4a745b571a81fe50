//! `fsets`: forbidden sets of rational difference equations from the
//! command line.
//!
//! Every command reads plain equation files and writes its outputs, plus a
//! `manifest.json` recording the arguments and file hashes, into `--out`.
//! `fsets replay` reruns a manifest and compares the output hashes.

mod catalog_cmd;
mod classify;
mod fs_cmd;
mod grid_cmd;
mod input;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "fsets", version, about = "Forbidden sets of rational difference equations")]
pub struct Cli {
    /// Worker threads for parallel stages (default: all cores). Outputs do
    /// not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Report the family, degenerate tags and any known reduction.
    Classify(classify::ClassifyArgs),
    /// Compute and verify forbidden-set data.
    Fs(fs_cmd::FsArgs),
    /// Classify a planar grid of initial values and render it.
    Grid(grid_cmd::GridArgs),
    /// Manage the equation catalog.
    Catalog(catalog_cmd::CatalogArgs),
    /// Rerun a manifest and compare output hashes.
    Replay {
        manifest: PathBuf,
        /// Directory for the rerun outputs (default: `replay/` next to the
        /// manifest).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Error classes with their own exit codes.
#[derive(Debug)]
pub enum CliError {
    Mismatch(String),
}

impl std::error::Error for CliError {}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Mismatch(m) => write!(f, "outputs differ: {m}"),
        }
    }
}

pub const EXIT_PARSE: u8 = 3;
pub const EXIT_NOT_APPLICABLE: u8 = 4;
pub const EXIT_STALE: u8 = 5;
pub const EXIT_CATALOG: u8 = 6;
pub const EXIT_IO: u8 = 7;
pub const EXIT_MISMATCH: u8 = 8;
pub const EXIT_INVALID: u8 = 9;

fn exit_code(err: &anyhow::Error) -> u8 {
    use fsets::Error as E;
    if let Some(e) = err.downcast_ref::<E>() {
        return match e {
            E::Parse { .. } | E::ArityMismatch { .. } | E::UnboundSymbols(_) | E::ZeroDenominator => EXIT_PARSE,
            E::NotApplicable(_) | E::NotAdmissible(_) => EXIT_NOT_APPLICABLE,
            E::StaleResult { .. } => EXIT_STALE,
            E::Catalog(_) => EXIT_CATALOG,
            E::Io(_) | E::Json(_) => EXIT_IO,
            E::Budget(_) | E::NotInvertible | E::Invalid(_) | E::RootFinding(_) => EXIT_INVALID,
        };
    }
    if err.downcast_ref::<CliError>().is_some() {
        return EXIT_MISMATCH;
    }
    if err.downcast_ref::<std::io::Error>().is_some() || err.downcast_ref::<serde_json::Error>().is_some() {
        return EXIT_IO;
    }
    1
}

pub fn run(cli: Cli, argv: &[String]) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        // a second call (replay) keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match cli.command {
        Command::Classify(a) => classify::run(&a, argv),
        Command::Fs(a) => fs_cmd::run(&a, argv),
        Command::Grid(a) => grid_cmd::run(&a, argv),
        Command::Catalog(a) => catalog_cmd::run(&a),
        Command::Replay { manifest, out } => manifest::replay(&manifest, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli, &argv[1..]) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
