use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qregion_core::{ContainmentMode, Tolerances};

#[derive(Debug, Parser)]
#[command(name = "qregion", version, about = "Conic approximations of quantum testing regions")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Seed for every random choice
    #[arg(long, global = true, env = "QREGION_SEED")]
    pub seed: Option<u64>,

    /// Proceed with ensembles that fail validation
    #[arg(long, global = true)]
    pub allow_invalid: bool,

    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[arg(long, global = true, env = "QREGION_TOL_HERM", value_name = "TOL")]
    pub tol_herm: Option<f64>,
    #[arg(long, global = true, env = "QREGION_TOL_PSD", value_name = "TOL")]
    pub tol_psd: Option<f64>,
    #[arg(long, global = true, env = "QREGION_TOL_RECON", value_name = "TOL")]
    pub tol_recon: Option<f64>,
    #[arg(long, global = true, env = "QREGION_TOL_PENROSE", value_name = "TOL")]
    pub tol_penrose: Option<f64>,
    #[arg(long, global = true, env = "QREGION_TOL_RANGE", value_name = "TOL")]
    pub tol_range: Option<f64>,
    #[arg(long, global = true, env = "QREGION_TOL_MEMBER", value_name = "TOL")]
    pub tol_member: Option<f64>,
}

pub const DEFAULT_SEED: u64 = 0;

impl GlobalArgs {
    pub fn tolerances(&self) -> Tolerances {
        let d = Tolerances::default();
        Tolerances {
            herm: self.tol_herm.unwrap_or(d.herm),
            psd: self.tol_psd.unwrap_or(d.psd),
            recon: self.tol_recon.unwrap_or(d.recon),
            penrose: self.tol_penrose.unwrap_or(d.penrose),
            range: self.tol_range.unwrap_or(d.range),
            member: self.tol_member.unwrap_or(d.member),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Auto,
    Facets,
    Sampled,
}

impl From<Mode> for ContainmentMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Auto => ContainmentMode::Auto,
            Mode::Facets => ContainmentMode::Facets,
            Mode::Sampled => ContainmentMode::Sampled,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that an ensemble is a measurement or a family of states
    Validate {
        /// Ensemble file, or `builtin:NAME`
        input: String,
    },
    /// Emit the approximation data (covariance, centre, slices)
    Region {
        input: String,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        /// Add a polyline for plotting
        #[arg(long)]
        profile: bool,
        /// Coordinates of the ellipsoid cross-section, e.g. `0,1`
        #[arg(long, default_value = "0,1")]
        coords: String,
        /// Vertices of the cross-section polyline
        #[arg(long, default_value_t = 128)]
        profile_points: usize,
    },
    /// Test whether a probability vector lies in the approximation
    Member {
        input: String,
        /// Comma-separated vector
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        /// Test a single d-cone slice instead of the whole cone
        #[arg(long)]
        k: Option<usize>,
    },
    /// Minimal-norm operator mapped onto a probability vector
    Reconstruct {
        input: String,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Trace of the effect (state families only)
        #[arg(long)]
        k: Option<usize>,
    },
    /// Sufficient simulability test against an observed cloud
    Simtest {
        /// Reference ensemble
        reference: String,
        /// Observed probability vectors, one per line
        cloud: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        slack: f64,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
        /// Sampled directions when facets are unavailable
        #[arg(long, default_value_t = 10_000)]
        directions: usize,
    },
    /// Monte-Carlo check of the inclusions
    Verify {
        input: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Sample probability vectors produced by an ensemble
    Images {
        input: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Pull each vector towards the centre by this fraction
        #[arg(long, default_value_t = 0.0)]
        shrink: f64,
        /// Output file (stdout if omitted)
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Write a built-in ensemble as an ensemble file
    Builtin {
        /// Name such as `tetrahedron` or `sic(3)`; omit to list
        name: Option<String>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}
