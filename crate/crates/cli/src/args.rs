//! Command-line grammar.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "hypwave", version, about = "Spherical Fourier analysis and Schrodinger maximal estimates on hyperbolic and Euclidean spaces")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand; they override the configuration file.
#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// h3, dr:m_v,m_z or rn:n
    #[arg(long, global = true)]
    pub space: Option<String>,
    /// Annulus radii r1,r2
    #[arg(long, global = true)]
    pub annulus: Option<String>,
    /// Time horizon
    #[arg(long = "T", global = true)]
    pub t_max: Option<f64>,
    /// vertical, parabolic:C7 or custom:FILE
    #[arg(long, global = true)]
    pub curve: Option<String>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output directory (also HYPWAVE_OUT)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 keeps the default pool
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Also write SVG plots
    #[arg(long, global = true)]
    pub plot: bool,
    /// TOML configuration file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RouteArg {
    Closed,
    Series,
    Ode,
    Anker,
    All,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Spherical functions by every available route
    Specfun {
        #[arg(long, value_enum)]
        route: Option<RouteArg>,
        /// Comma-separated frequencies
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        lambda: Vec<f64>,
        /// Comma-separated radii
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        s: Vec<f64>,
    },
    /// Spherical transform round trip of a Gaussian
    Transform {
        /// Gaussian exponent a in exp(-a s^2)
        #[arg(long)]
        width: Option<f64>,
    },
    /// Solution slices along a curve family
    Propagate {
        /// Knapp band centre N
        #[arg(long, conflicts_with = "gaussian")]
        band: Option<f64>,
        /// Gaussian band centre,width
        #[arg(long)]
        gaussian: Option<String>,
    },
    /// Curve regularity and growth checks
    Curvecheck,
    /// Blow-up construction on H^3
    Counterexample {
        /// Number of reported indices
        #[arg(long)]
        k: Option<usize>,
    },
    /// Maximal-estimate ratio sweep over dyadic bands
    Maxest {
        /// Comma-separated band centres
        #[arg(long, value_delimiter = ',')]
        n: Vec<f64>,
        /// Use seeded random-phase bands
        #[arg(long)]
        random_phase: bool,
    },
    /// Convergence table e(tau)
    Converge {
        /// Comma-separated tau values
        #[arg(long, value_delimiter = ',')]
        tau: Vec<f64>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Specfun { .. } => "specfun",
            Command::Transform { .. } => "transform",
            Command::Propagate { .. } => "propagate",
            Command::Curvecheck => "curvecheck",
            Command::Counterexample { .. } => "counterexample",
            Command::Maxest { .. } => "maxest",
            Command::Converge { .. } => "converge",
        }
    }
}
