mod commands;
mod config;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::RunOptions;
use config::CatalogParamsDoc;
use error::CliError;

/// Gravitational n-body simulations in spaces of constant curvature.
#[derive(Parser)]
#[command(name = "curved-nbody", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Number of equally spaced samples, including both ends.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
    /// Seed for randomly drawn initial states.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl From<Common> for RunOptions {
    fn from(c: Common) -> Self {
        RunOptions {
            config: c.config,
            out: c.out,
            t_end: c.t_end,
            samples: c.samples,
            rel_tol: c.rel_tol,
            abs_tol: c.abs_tol,
            seed: c.seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configuration; writes a CSV trajectory and a JSON report.
    Simulate(Common),
    /// Evaluate the existence criterion of a relative equilibrium.
    Verify(Common),
    /// List or emit catalog orbits.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Classify a trajectory CSV.
    Classify {
        trajectory: PathBuf,
        /// Curvature; inferred from the positions when omitted.
        #[arg(long, allow_hyphen_values = true)]
        kappa: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Linear stability of the Lagrangian family on the unit sphere.
    ScanStability {
        #[arg(long, default_value_t = 0.3)]
        r_min: f64,
        #[arg(long, default_value_t = 0.99)]
        r_max: f64,
        #[arg(long, default_value_t = 80)]
        steps: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    /// Print a configuration describing the named orbit.
    Emit {
        name: String,
        #[arg(long, allow_hyphen_values = true)]
        kappa: Option<f64>,
        #[arg(long)]
        mass: Option<f64>,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        angle: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(c) => commands::simulate(&c.into()),
        Command::Verify(c) => commands::verify(&c.into()),
        Command::Catalog { action: CatalogAction::List } => {
            commands::catalog_list();
            Ok(())
        }
        Command::Catalog {
            action: CatalogAction::Emit { name, kappa, mass, r, eta, alpha, beta, angle, t_end, samples, out },
        } => {
            let params = CatalogParamsDoc { kappa, mass, r, eta, alpha, beta, angle, ..Default::default() };
            commands::catalog_emit(&name, params, t_end, samples, out.as_deref())
        }
        Command::Classify { trajectory, kappa, common } => commands::classify_file(&trajectory, &common.into(), kappa),
        Command::ScanStability { r_min, r_max, steps, common } => commands::scan_stability(r_min, r_max, steps, &common.into()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
