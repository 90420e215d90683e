//! The `retrolift` command line: workspace checks, congruence semilattices,
//! unfoldings, lift replays and corpus generation.
//!
//! Exit codes: 0 clean, 1 verification failures, 2 input errors.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub mod commands;
pub mod workspace;

pub const EXIT_CLEAN: i32 = 0;
pub const EXIT_FAILURES: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Structured,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RetractionChoice {
    /// The Boolean cover of each (distributive) node; arrows must be embeddings.
    Boolean,
    /// `D̂ = D` with `ε = μ = id`.
    Identity,
    /// `D̂ = D × 2` with `ε = id × 0` and `μ` the first projection.
    Product,
    /// The `retraction` block stored with the diagram.
    Given,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FunctorChoice {
    /// The identity functor on semilattices; the unfolding lifts itself.
    Id,
    /// Congruence semilattices of finite lattices; needs `--lift`.
    Conc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TowerChoice {
    Stable,
    Collapsing,
}

#[derive(Debug, Parser)]
#[command(name = "retrolift", version, about = "Verify retracted diagrams, their unfoldings and lift replays")]
pub struct Cli {
    /// Output style for reports.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Element budget for unfoldings: `|D̂(X)|^N` may not exceed it.
    #[arg(long, env = "RETROLIFT_BUDGET", global = true)]
    pub budget: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate every object of a workspace.
    Check { path: PathBuf },
    /// Print the semilattice of compact congruences of a named lattice.
    Conc { path: PathBuf, lattice: String },
    /// Unfold a diagram and verify the unfolding identities.
    Unfold {
        path: PathBuf,
        diagram: String,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Defaults to `given` when the diagram stores a retraction, else `boolean`.
        #[arg(long, value_enum)]
        retraction: Option<RetractionChoice>,
        /// Write the retracted diagram and bundle marker as a workspace.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay the lifting construction and verify every identity.
    Replay {
        path: PathBuf,
        /// Defaults to the bundle's or the lift package's diagram.
        diagram: Option<String>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, value_enum, default_value_t = FunctorChoice::Id)]
        functor: FunctorChoice,
        /// Name of a lift package in the workspace.
        #[arg(long)]
        lift: Option<String>,
        #[arg(long, value_enum)]
        retraction: Option<RetractionChoice>,
    },
    /// Write a seeded corpus workspace.
    GenCorpus {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        max_size: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a `Conc` lift package over a chain of identical nodes.
    GenFixture {
        #[arg(value_enum)]
        tower: TowerChoice,
        #[arg(long, default_value_t = 1)]
        nodes: usize,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Parse {
        path: String,
        source: workspace::ParseError,
    },
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Input(_) => EXIT_INPUT,
            CliError::Verification(_) => EXIT_FAILURES,
        }
    }
}

/// What a command produced.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub(crate) fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub(crate) fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> Outcome {
    match commands::dispatch(&cli) {
        Ok((code, stdout)) => Outcome {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
