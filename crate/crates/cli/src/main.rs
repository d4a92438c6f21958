//! `mellin`: algebraic Mellin transforms, Koszul reductions and numerical
//! verification runs from the command line.

mod commands;
mod config;
mod functions;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mellin_core::ore::Algebra;
use mellin_core::Error;

/// Exit codes.
pub mod exit {
    pub const PASS: u8 = 0;
    pub const FAIL: u8 = 1;
    pub const PARSE: u8 = 2;
    pub const ALGEBRA: u8 = 3;
    pub const TRUNCATION: u8 = 4;
    pub const GUARD: u8 = 5;
    pub const QUADRATURE: u8 = 6;
}

#[derive(Debug, Parser)]
#[command(name = "mellin", version, about = "Algebraic Mellin transform toolkit")]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgebraArg {
    D,
    S,
    Dtilde,
}

impl From<AlgebraArg> for Algebra {
    fn from(a: AlgebraArg) -> Self {
        match a {
            AlgebraArg::D => Algebra::D,
            AlgebraArg::S => Algebra::S,
            AlgebraArg::Dtilde => Algebra::Dtilde,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Map an operator in D to S (or back with --inverse) and print its canonical form.
    Transform {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long)]
        inverse: bool,
    },
    /// Parse an operator and print its canonical form.
    Parse {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, value_enum)]
        algebra: Option<AlgebraArg>,
        #[arg(long)]
        arity: Option<usize>,
        /// Print the normal-form terms as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Reduce the Koszul complex of τ_j t_j⁻¹ − 1 over directions I (0-type) and J (∞-type).
    Koszul {
        /// 0-type directions, e.g. "1,2" (may be empty).
        #[arg(long = "I", default_value = "")]
        i: String,
        /// ∞-type directions.
        #[arg(long = "J", default_value = "")]
        j: String,
        /// Truncation order.
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long)]
        degree_bound: Option<u32>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check that the Mellin image of an annihilating operator annihilates the transform.
    Verify {
        #[arg(allow_hyphen_values = true)]
        operator: String,
        #[arg(long)]
        function: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        start: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        stop: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
        /// Imaginary part of every grid point.
        #[arg(long, allow_negative_numbers = true)]
        offset: Option<f64>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Haar moments with the Stokes and moment-transport identities.
    Moments {
        function: Option<String>,
        /// Largest moment index.
        #[arg(long, default_value_t = 8)]
        k: i32,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        s: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        s_im: f64,
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Taylor coefficients in a parameter by contour quadrature, with bound checks.
    Expand {
        function: Option<String>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t0: f64,
        #[arg(long = "R", default_value_t = 0.5)]
        radius: f64,
        #[arg(long, default_value_t = 12)]
        alpha_max: usize,
        /// Reconstruction radius; defaults to R/2.
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Syntax { .. } => exit::PARSE,
        Error::MixedAlgebra { .. } => exit::ALGEBRA,
        Error::TruncationOverflow(_) => exit::TRUNCATION,
        Error::PreconditionFailed(_) => exit::GUARD,
        Error::QuadratureFailure(_) => exit::QUADRATURE,
        _ => exit::FAIL,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
