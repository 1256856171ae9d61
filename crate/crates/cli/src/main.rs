//! `catkit`: codimension, determinacy, unfoldings, classification and
//! mean-field phase diagrams from JSON inputs.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use catkit_core::group::ActionSpec;

/// Process exit statuses.
pub mod status {
    pub const OK: u8 = 0;
    pub const INPUT: u8 = 2;
    pub const CAP: u8 = 3;
    pub const NUMERIC: u8 = 4;
}

/// An error with the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn input(e: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: status::INPUT,
            error: e.into(),
        }
    }

    pub fn numeric(e: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: status::NUMERIC,
            error: e.into(),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "catkit",
    version,
    about = "Equivariant singularity theory and mean-field phase diagrams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct AlgebraArgs {
    /// Order cap for jet-order escalation.
    #[arg(long, default_value_t = 16)]
    pub cap: u32,
    /// Pivot tolerance for float jets.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Symmetry action overriding the one in the file: full, overall, trivial
    /// or an explicit JSON action.
    #[arg(long)]
    pub action: Option<String>,
}

impl AlgebraArgs {
    pub fn action_spec(&self) -> Result<Option<ActionSpec>, Failure> {
        let Some(a) = &self.action else {
            return Ok(None);
        };
        let t = a.trim();
        if t.starts_with('{') {
            serde_json::from_str(t)
                .map(Some)
                .map_err(|e| Failure::input(anyhow::anyhow!("--action: {e}")))
        } else {
            Ok(Some(ActionSpec::Named(t.to_string())))
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct OutArgs {
    /// Output file (stdout when absent).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Γ-codimension, complement basis and determinacy of a germ.
    Codim {
        germ: PathBuf,
        /// Jet order to read the germ at.
        #[arg(long)]
        order: Option<u32>,
        #[command(flatten)]
        alg: AlgebraArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Determinacy degree of a germ.
    Determine {
        germ: PathBuf,
        #[arg(long)]
        order: Option<u32>,
        #[command(flatten)]
        alg: AlgebraArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Transversality of an unfolding.
    Transversal {
        unfolding: PathBuf,
        #[command(flatten)]
        alg: AlgebraArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Universal unfolding of a germ.
    Unfold {
        germ: PathBuf,
        #[arg(long)]
        order: Option<u32>,
        #[command(flatten)]
        alg: AlgebraArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Classification against the Z2 tables.
    Classify {
        germ: PathBuf,
        /// Relative threshold for vanishing quartic coefficients.
        #[arg(long, default_value_t = 1e-9)]
        zero_tol: f64,
        /// Absolute threshold for vanishing Hessian entries.
        #[arg(long, default_value_t = 1e-6)]
        hess_tol: f64,
        #[command(flatten)]
        alg: AlgebraArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Critical points of a mean-field objective.
    Critical {
        params: PathBuf,
        /// Search box `lo:hi` per order parameter, comma separated.
        #[arg(long = "box", allow_hyphen_values = true)]
        search_box: Option<String>,
        /// Replace the couplings by the degenerate tuning before solving.
        #[arg(long)]
        tune: bool,
        /// Classify degenerate critical points.
        #[arg(long)]
        classify: bool,
        #[arg(long, default_value_t = 1e-6)]
        degeneracy: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Phase diagram over two couplings, as CSV.
    PhaseDiagram {
        params: PathBuf,
        /// Two axes, `name=start:stop:step,name=start:stop:step`.
        #[arg(long)]
        sweep: String,
        #[arg(long = "box", allow_hyphen_values = true)]
        search_box: Option<String>,
        /// Worker threads for cells.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// JSON summary path (defaults to the CSV path with `.json` appended).
        #[arg(long)]
        summary: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
}

fn run(cli: Cli) -> Result<u8, Failure> {
    use commands::*;
    match cli.command {
        Command::Codim {
            germ,
            order,
            alg,
            out,
        } => codim(&germ, order, &alg, &out, false),
        Command::Determine {
            germ,
            order,
            alg,
            out,
        } => codim(&germ, order, &alg, &out, true),
        Command::Transversal {
            unfolding,
            alg,
            out,
        } => transversal(&unfolding, &alg, &out),
        Command::Unfold {
            germ,
            order,
            alg,
            out,
        } => unfold(&germ, order, &alg, &out),
        Command::Classify {
            germ,
            zero_tol,
            hess_tol,
            alg,
            out,
        } => classify(&germ, zero_tol, hess_tol, &alg, &out),
        Command::Critical {
            params,
            search_box,
            tune,
            classify,
            degeneracy,
            out,
        } => critical(
            &params,
            search_box.as_deref(),
            tune,
            classify,
            degeneracy,
            &out,
        ),
        Command::PhaseDiagram {
            params,
            sweep,
            search_box,
            jobs,
            summary,
            out,
        } => phase(
            &params,
            &sweep,
            search_box.as_deref(),
            jobs,
            summary.as_deref(),
            &out,
        ),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CATKIT_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                status::INPUT
            } else {
                status::OK
            });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
