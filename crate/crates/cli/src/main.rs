//! `isoatlas`: experiments on isospectral tridiagonal matrices from the shell.

mod commands;
mod exit;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use isoatlas::Tolerances;

use commands::{GSpec, ShiftSpec};

#[derive(Parser, Debug)]
#[command(name = "isoatlas", version, about = "Bidiagonal coordinates, QR steps and Toda flows on isospectral manifolds")]
struct Cli {
    /// Multiplier applied to every numerical tolerance.
    #[arg(long, global = true, env = "ISOATLAS_TOL", default_value_t = 1.0)]
    tol_scale: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues, norming constants and residual of a matrix document.
    Eigen {
        /// Matrix document `{n, diag, off}`.
        #[arg(long, short)]
        input: PathBuf,
        /// Output file; stdout if omitted.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Bidiagonal coordinates of a matrix, or the matrix at given coordinates.
    ///
    /// Forward mode reads `--input` (and optionally `--pi`); inverse mode
    /// takes `--spectrum`, `--pi` and `--beta`.
    Chart {
        /// Matrix document to chart (forward mode).
        #[arg(long, short, conflicts_with_all = ["spectrum", "beta"])]
        input: Option<PathBuf>,
        /// One-based permutation, e.g. `3,1,2`.
        #[arg(long)]
        pi: Option<String>,
        /// Eigenvalues, e.g. `4,5,7` (inverse mode).
        #[arg(long, requires_all = ["pi", "beta"])]
        spectrum: Option<String>,
        /// Coordinates `β_1..β_{n-1}` (inverse mode).
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<String>,
        /// Output file; stdout if omitted.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// QR iteration trajectory as CSV (`k, b_1..b_{n-1}, measure`).
    Qr {
        /// Matrix document `{n, diag, off}`.
        #[arg(long, short)]
        input: PathBuf,
        /// `identity`, `shift=VALUE` or `rayleigh`.
        #[arg(long, default_value = "identity", allow_hyphen_values = true)]
        shift: ShiftSpec,
        /// Maximum number of steps.
        #[arg(long, default_value_t = 50)]
        steps: usize,
        /// Output file; stdout if omitted.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Toda flow of a matrix or particle state, compared against chart and RK4 solutions.
    Toda {
        /// Matrix document `{n, diag, off}` or particle document `{x, y}`.
        #[arg(long, short)]
        input: PathBuf,
        /// `id`, `square` or `table=V1,...,Vn` (values at ascending eigenvalues).
        #[arg(long, default_value = "id", allow_hyphen_values = true)]
        g: GSpec,
        /// Final time; negative values run the flow backwards.
        #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
        tmax: f64,
        /// Number of output intervals on `[0, tmax]`.
        #[arg(long, default_value_t = 50)]
        steps: usize,
        /// Output file; stdout if omitted.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Asymptotic velocities and phases, scattering map and ODE fits.
    Scatter {
        /// Particle document `{x, y}`; a default three-particle state if omitted.
        #[arg(long, short)]
        input: Option<PathBuf>,
        /// Fitting horizon; tails are fitted on `±[0.8 tmax, tmax]`.
        #[arg(long, default_value_t = 30.0)]
        tmax: f64,
        /// Largest force allowed on the fitted tail window.
        #[arg(long, default_value_t = 1e-8)]
        force_tol: f64,
        /// Output file; stdout if omitted.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// OBJ mesh of the 3×3 isospectral surface with a CSV attribute sidecar.
    Mesh {
        /// Three distinct eigenvalues.
        #[arg(long, default_value = "4,5,7", allow_hyphen_values = true)]
        spectrum: String,
        /// Grid points per side of each chart patch.
        #[arg(long, default_value_t = 41)]
        grid: usize,
        /// Coordinates range over `[-range, range]²`.
        #[arg(long, default_value_t = 3.0)]
        range: f64,
        /// OBJ path (stdout if omitted); the sidecar defaults to the same path
        /// with a `.csv` extension.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Attribute CSV path.
        #[arg(long)]
        attributes: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<()> {
    if !(cli.tol_scale > 0.0) || !cli.tol_scale.is_finite() {
        return Err(exit::ParseError(format!("tolerance scale must be positive, got {}", cli.tol_scale)).into());
    }
    let tol = Tolerances::scaled(cli.tol_scale);
    match cli.command {
        Command::Eigen { input, output } => commands::eigen(&input, &output, tol),
        Command::Chart {
            input,
            pi,
            spectrum,
            beta,
            output,
        } => {
            let pi = pi.as_deref().map(io::parse_permutation).transpose()?;
            match (input, spectrum, beta) {
                (Some(input), None, None) => commands::chart_forward(&input, pi, &output, tol),
                (None, Some(spectrum), Some(beta)) => {
                    let pi = pi.ok_or_else(|| exit::ParseError("--pi is required in inverse mode".into()))?;
                    let spectrum = io::parse_list(&spectrum, "--spectrum")?;
                    let beta = io::parse_list(&beta, "--beta")?;
                    commands::chart_inverse(&spectrum, pi, beta, &output, tol)
                }
                _ => Err(exit::ParseError("give --input, or --spectrum with --pi and --beta".into()).into()),
            }
        }
        Command::Qr {
            input,
            shift,
            steps,
            output,
        } => commands::qr(&input, &shift, steps, &output, tol),
        Command::Toda {
            input,
            g,
            tmax,
            steps,
            output,
        } => commands::toda(&input, &g, tmax, steps, &output, tol),
        Command::Scatter {
            input,
            tmax,
            force_tol,
            output,
        } => commands::scatter(&input, tmax, force_tol, &output, tol),
        Command::Mesh {
            spectrum,
            grid,
            range,
            output,
            attributes,
        } => {
            let spectrum = io::parse_list(&spectrum, "--spectrum")?;
            commands::mesh(&spectrum, grid, range, &output, &attributes, tol)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::from(exit::OK as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::code_of(&e) as u8)
        }
    }
}
