use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use free_entropy::energy::{DEFAULT_DIVERGENCE_FLOOR, DEFAULT_TOL};

#[derive(Debug, Parser)]
#[command(name = "freeent", version, about = "Logarithmic energies, free entropy and free Hausdorff entropy bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format; csv is available for `series` and `microstate`.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write the output to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct EnergyKnobs {
    /// Absolute tolerance for the energy quadrature.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,

    /// Energies below this value are reported as -inf.
    #[arg(long, default_value_t = DEFAULT_DIVERGENCE_FLOOR, allow_negative_numbers = true)]
    pub floor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MicrostateArg {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeriesArg {
    /// k^-2 log prod Γ(j+1)Γ(j)²/Γ(k+j) against -log 4
    #[value(alias = "lemma41")]
    Gamma,
    /// regularized pair product of A_k against the regularized energy
    Regularized,
    /// off-diagonal pair sum of B_k against the energy
    Offdiag,
    /// k^-2 log C_k + 1/2 log k against its limit
    Packing,
    /// k^-2 log L_k + 1/2 log k against 1/2 log 2πe
    Ball,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a measure file and report violated invariants.
    Validate {
        #[arg(long, value_name = "PATH")]
        measure: PathBuf,
    },
    /// Off-diagonal logarithmic energy.
    Energy {
        #[arg(long, value_name = "PATH")]
        measure: PathBuf,
        #[command(flatten)]
        knobs: EnergyKnobs,
    },
    /// Free entropy chi.
    Chi {
        #[arg(long, value_name = "PATH")]
        measure: PathBuf,
        #[command(flatten)]
        knobs: EnergyKnobs,
    },
    /// Free Hausdorff dimension 1 - Σc_i².
    Dim {
        #[arg(long, value_name = "PATH")]
        measure: PathBuf,
    },
    /// Lower and upper bounds on the free Hausdorff entropy.
    Bounds {
        #[arg(long, value_name = "PATH")]
        measure: PathBuf,
        #[command(flatten)]
        knobs: EnergyKnobs,
    },
    /// Bounds for a free family, one --measure per variable.
    FamilyBounds {
        #[arg(long = "measure", value_name = "PATH", required = true)]
        measures: Vec<PathBuf>,
        #[command(flatten)]
        knobs: EnergyKnobs,
    },
    /// Build A_k or B_k. With --eps and --t, A_k also reports the volume bound.
    Microstate {
        #[arg(value_enum)]
        kind: MicrostateArg,
        #[arg(long, value_name = "PATH")]
        measure: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
    },
    /// Evaluate a convergence series over --ks.
    Series {
        #[arg(value_enum)]
        which: SeriesArg,
        #[arg(long, value_delimiter = ',', required = true)]
        ks: Vec<usize>,
        #[arg(long, value_name = "PATH")]
        measure: Option<PathBuf>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        floor: Option<f64>,
    },
    /// Monte Carlo check of the Selberg integral on [-eps, eps]^k.
    Selberg {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Everything known about one or more measures in a single document.
    Report {
        #[arg(long = "measure", value_name = "PATH", required = true)]
        measures: Vec<PathBuf>,
        #[command(flatten)]
        knobs: EnergyKnobs,
    },
}
