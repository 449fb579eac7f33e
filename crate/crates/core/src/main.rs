use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ssa2d::cli::{self, Boundary, RunConfig, Truncation};
use ssa2d::{Error, WindowGeometry};

#[derive(Parser)]
#[command(
    name = "ssa2d",
    version,
    about = "2D singular spectrum analysis filter bank"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose an image into K eigenfilter components.
    Decompose(Common),
    /// Rank-truncated reconstruction scored against a clean reference.
    Denoise {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        reference: PathBuf,
        /// Rank ℓ in 1..=K, or "auto" for the minimizer of D(ℓ).
        #[arg(long, default_value = "auto")]
        truncate: String,
    },
    /// Check all structural identities of the decomposition.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Zero out the eigenvector of this rank before checking.
        #[arg(long, hide = true)]
        zero_filter: Option<usize>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    input: PathBuf,
    /// Window size as MxN.
    #[arg(long)]
    window: String,
    #[arg(long, default_value = "periodic")]
    boundary: String,
    #[arg(long)]
    noise_sigma: Option<f64>,
    #[arg(long)]
    noise_seed: Option<u64>,
    /// Grid spacing for Taylor coefficients; 1/3 suits an 11x11 window.
    #[arg(long, default_value_t = 1.0)]
    mesh_scale: f64,
    /// Use the explicit trajectory-matrix covariance instead of the FFT path.
    #[arg(long)]
    no_fast_cov: bool,
    #[arg(long)]
    emit_components: bool,
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
}

impl Common {
    fn config(&self) -> Result<RunConfig, Error> {
        let window: WindowGeometry = self.window.parse()?;
        let boundary: Boundary = self.boundary.parse()?;
        Ok(RunConfig {
            input_path: self.input.clone(),
            window,
            boundary,
            noise_sigma: self.noise_sigma,
            noise_seed: self.noise_seed,
            mesh_scale: self.mesh_scale,
            output_dir: self.output_dir.clone(),
            fast_covariance: !self.no_fast_cov,
            emit_components: self.emit_components,
        })
    }
}

fn run(cli: Cli) -> Result<cli::Outcome, Error> {
    cli::configure_threads()?;
    match cli.command {
        Command::Decompose(common) => cli::cmd_decompose(&common.config()?),
        Command::Denoise {
            common,
            reference,
            truncate,
        } => {
            let truncate: Truncation = truncate.parse()?;
            cli::cmd_denoise(&common.config()?, &reference, truncate)
        }
        Command::Verify {
            common,
            zero_filter,
        } => cli::cmd_verify(&common.config()?, zero_filter),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {}: {}", e.kind(), e);
            ExitCode::from(2)
        }
    }
}
