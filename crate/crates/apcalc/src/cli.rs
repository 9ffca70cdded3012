//! Command-line definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Coefficients in ℚ(i)(2π), computed exactly.
    Exact,
    /// Complex double-precision coefficients.
    Float,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "apcalc", version, about = "Almost periodic Gevrey pseudodifferential calculus")]
pub struct Cli {
    /// Expected dimension of every input; also the dimension of generated sets.
    #[arg(long, global = true)]
    pub dim: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,

    /// Seed of the sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Directory receiving the JSON report and CSV tables.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

/// Parameters of the hypoellipticity class.
#[derive(Clone, Debug, Default, Args)]
pub struct HypoArgs {
    /// Upper order m (default: ξ-degree of the symbol).
    #[arg(long)]
    pub m: Option<f64>,
    /// Lower order m₀ (default: m).
    #[arg(long)]
    pub m0: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    /// Gevrey index (default: max(1, 1/ρ)).
    #[arg(long)]
    pub s: Option<f64>,
    /// Radius A beyond which the lower bound is required.
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub c1: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FreqSet {
    /// The integer lattice ℤ^d.
    Lattice,
    /// A bounded set accumulating at 1, refined as R grows.
    Bounded,
    /// Frequencies listed in a CSV file.
    Points,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WindowArg {
    Box,
    Fejer,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply a symbol or amplitude to a trigonometric polynomial.
    Apply {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long)]
        input: PathBuf,
        /// Frequencies below this norm are rejected when the symbol has a quotient.
        #[arg(long, default_value_t = 0.0)]
        radius: f64,
    },
    /// Compare a(x,D)b(x,D)f with the action of the composed symbol.
    Compose {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        input: PathBuf,
        /// Terms of the symbol expansion.
        #[arg(long, default_value_t = 4)]
        terms: usize,
    },
    /// Build a parametrix and measure its residual.
    Parametrix {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[command(flatten)]
        hp: HypoArgs,
        /// Derivative order of the class checks.
        #[arg(long, default_value_t = 2)]
        check_order: u32,
    },
    /// Test whether two formal sums are equivalent.
    Equiv {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 3)]
        n_max: usize,
    },
    /// Constant-coefficient hypoellipticity tools.
    #[command(subcommand)]
    Hypo(HypoCommand),
    /// Fit |f̂_ξ| ≈ C exp(-ε|ξ|^{1/s}) to CSV rows `ξ_1, ..., ξ_d, magnitude`.
    GevreyFit {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        s_min: f64,
        #[arg(long, default_value_t = 4.0)]
        s_max: f64,
        #[arg(long, default_value_t = 0.01)]
        s_step: f64,
        /// Gevrey index of the membership table (default: fitted s).
        #[arg(long)]
        membership_s: Option<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,1")]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
    },
    /// Partial sums of Σ exp(-ε|ξ|^{1/s}) over a frequency set.
    FreqCheck {
        #[arg(long, value_enum, default_value_t = FreqSet::Lattice)]
        set: FreqSet,
        /// CSV of frequencies for `--set points`.
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 50.0)]
        r_max: f64,
        #[arg(long, default_value_t = 4)]
        steps: usize,
        #[arg(long, default_value_t = apcalc_core::regularity::TAIL_TOL)]
        tol: f64,
    },
    /// Derivative growth of the non-Gevrey almost periodic example.
    Counterexample {
        /// Gevrey index, decimal or p/q, above 1.
        #[arg(long, default_value = "2")]
        s: String,
        /// Constant C, or `auto` for the estimated C₀.
        #[arg(long = "C", default_value = "auto")]
        c: String,
        #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
        n_list: Vec<u32>,
        #[arg(long, default_value_t = 20)]
        j_max: u32,
    },
    /// Numerical mean value or Bohr coefficient.
    Mean {
        /// Trigonometric polynomial to average.
        #[arg(long, conflicts_with = "partial_sum")]
        input: Option<PathBuf>,
        /// Average the partial sum f_N of the non-Gevrey example instead.
        #[arg(long)]
        partial_sum: Option<u32>,
        /// Gevrey index of the example.
        #[arg(long, default_value = "2")]
        s: String,
        /// Frequency of the Bohr coefficient, as rational coordinates.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        xi: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',', default_value = "25,50,100")]
        t_values: Vec<f64>,
        #[arg(long, default_value_t = 16)]
        points_per_unit: usize,
        #[arg(long, value_enum, default_value_t = WindowArg::Fejer)]
        window: WindowArg,
    },
    /// Solve p(x,D)u = f approximately through the parametrix.
    Solve {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[command(flatten)]
        hp: HypoArgs,
    },
    /// Norms of a(x,D)u - f.
    Residual {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
        sobolev_t: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        gevrey_s: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,1")]
        gevrey_eps: Vec<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum HypoCommand {
    /// Fit the hypoellipticity exponent of a polynomial.
    Fit {
        #[arg(long)]
        poly: PathBuf,
    },
    /// Test whether q is weaker than p.
    Weaker {
        #[arg(long)]
        q: PathBuf,
        #[arg(long)]
        p: PathBuf,
    },
    /// Squared strength Σ_α |∂^α P|².
    Strength {
        #[arg(long)]
        poly: PathBuf,
        /// Evaluate at this rational point.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        at: Option<Vec<String>>,
    },
    /// Check that Σ c_j(x) P_j(ξ) has constant strength.
    ConstantStrength {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// x samples per unit length along each axis.
        #[arg(long, default_value_t = 8)]
        per_unit: usize,
    },
}
