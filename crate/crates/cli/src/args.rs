//! Command-line surface. Every global flag can also be set through a
//! `COORBIT_*` environment variable; explicit flags win.

use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};

const CSV_HELP: &str = "\
Reports are JSON (\"schema\": 1) and embed the configuration, seed, budgets and radii.
With --out FILE.json the report goes to FILE.json and CSV tables to FILE.<table>.csv:

  nerve        i,j,status              nerve edges at the largest radius (status yes|indeterminate)
  truncations  radius,sets,admissibility_lower,admissibility_upper,undecided_pairs
  counts       radius,sets_q,sets_p,n_q_in_p_lower,n_q_in_p_upper,n_p_in_q_lower,n_p_in_q_upper
  distances    i,j,chain_lower,chain_upper,hop       (covering metric, explicit points)
  alpha_law    radius,sets,pairs,l,c                 (covering metric, alpha-modulation)
  envelope     radius,d_source,d_image_min,d_image_max,pairs
  witness      n,increment_log10,image_word_lower
  conjugator   row,col,value                         (exact rationals p/q)

Exit codes: 0 EQUIVALENT / EMBEDDING-EVIDENCE / success, 1 NOT-EQUIVALENT / REJECT,
2 INDETERMINATE, 64 usage error, 65 malformed or invalid input, 74 I/O error.";

#[derive(Debug, Parser)]
#[command(name = "coorbit", version, about = "Decomposition-space coverings, word metrics and coorbit equivalence of shearlet groups", after_help = CSV_HELP)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Arithmetic {
    /// Exact rationals wherever the computation allows it.
    ExactPreferred,
    Float,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Truncation radii, strictly increasing (comma separated).
    #[arg(long, global = true, env = "COORBIT_RADII", value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    #[arg(long, global = true, env = "COORBIT_SEED", default_value_t = 0x5eed)]
    pub seed: u64,
    /// Bisection depth of the set-intersection oracle.
    #[arg(long, global = true, env = "COORBIT_BUDGET_DEPTH", default_value_t = 12)]
    pub budget_depth: u32,
    /// Sampled pairs per truncation level.
    #[arg(long, global = true, env = "COORBIT_BUDGET_PAIRS", default_value_t = 20_000)]
    pub budget_pairs: usize,
    /// Multistart seeds of the conjugator search.
    #[arg(long, global = true, env = "COORBIT_BUDGET_SEEDS", default_value_t = 200)]
    pub budget_seeds: usize,
    /// Prefer exact rational arithmetic (default).
    #[arg(long, global = true, conflicts_with = "float", action = ArgAction::SetTrue)]
    pub exact: bool,
    /// Use floating point where exact arithmetic is optional.
    #[arg(long, global = true, env = "COORBIT_FLOAT", action = ArgAction::SetTrue)]
    pub float: bool,
    /// Report path; CSV tables are written next to it.
    #[arg(long, global = true, env = "COORBIT_OUT")]
    pub out: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "COORBIT_THREADS")]
    pub threads: Option<usize>,
}

impl Global {
    pub fn arithmetic(&self) -> Arithmetic {
        if self.float && !self.exact {
            Arithmetic::Float
        } else {
            Arithmetic::ExactPreferred
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build, compare and measure coverings.
    #[command(subcommand)]
    Covering(CoveringCmd),
    /// Create and inspect shearlet group specs.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Decide coorbit equivalence of two shearlet groups.
    #[command(subcommand)]
    Equivalence(EquivalenceCmd),
    /// Empirical quasi-isometry probes.
    #[command(subcommand, name = "qi-probe")]
    QiProbe(ProbeCmd),
    /// Witness sequence for groups with different diagonal exponents.
    Witness(WitnessArgs),
}

#[derive(Debug, Subcommand)]
pub enum CoveringCmd {
    /// Truncate a covering at each radius and report its admissibility.
    Make { file: PathBuf },
    /// Weak equivalence of two coverings from subordination counts.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Overall growth factor that certifies divergence.
        #[arg(long, default_value_t = 2.0)]
        growth: f64,
    },
    /// Chain distances at the largest radius.
    Metric {
        file: PathBuf,
        /// A point, coordinates comma separated; repeat for more points.
        #[arg(long = "point", allow_hyphen_values = true)]
        points: Vec<String>,
        /// Random pairs when no points are given.
        #[arg(long, default_value_t = 600)]
        pairs: usize,
        /// Additive allowance of the alpha-modulation law fit.
        #[arg(long, default_value_t = 4.0)]
        additive_cap: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum GroupCmd {
    /// Write a group spec file.
    #[command(subcommand)]
    Make(GroupMake),
    /// Invariants, dual orbit and word-lattice summary of a group.
    Info {
        file: PathBuf,
        /// Scale and shear truncation `K,M` of the summarized lattice.
        #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [1, 1])]
        lattice: Vec<i64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum GroupMake {
    /// Standard shearlet group with exponents `λ_2..λ_d`.
    Standard {
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        lambda: Vec<String>,
    },
    /// Toeplitz shearlet group with `λ_k = 1 − (k−1)δ`.
    Toeplitz {
        #[arg(long)]
        d: usize,
        #[arg(long, allow_hyphen_values = true)]
        delta: String,
    },
    /// The four-dimensional family with `X_3² = α X_4`.
    D4 {
        #[arg(long, allow_hyphen_values = true)]
        alpha: i8,
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        lambda: Vec<String>,
    },
    /// `C⁻¹ S C` for a group file `S` and a matrix given as `r1;r2;…`.
    Conjugate {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        by: String,
        #[arg(long)]
        label: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum EquivalenceCmd {
    Check {
        a: PathBuf,
        b: PathBuf,
        /// Candidate conjugator `r1;r2;…`, verified before any search.
        #[arg(long = "candidate", allow_hyphen_values = true)]
        candidates: Vec<String>,
        /// Witness length on a diagonal mismatch (at most 60).
        #[arg(long, default_value_t = 30)]
        witness_cap: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum ProbeCmd {
    /// Orbit map from the word-metric lattice to the induced covering.
    Orbit {
        group: PathBuf,
        /// `δ = ln a_0` of the lattice.
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long, default_value_t = 1.0)]
        shear_step: f64,
    },
    /// Identity map between the chain metrics of two coverings.
    Identity {
        a: PathBuf,
        b: PathBuf,
        /// Sample points per level.
        #[arg(long, default_value_t = 600)]
        max_points: usize,
    },
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    /// Coordinate `i ∈ 2..=d` with `λ_i ≠ λ′_i` (first such by default).
    #[arg(long)]
    pub coordinate: Option<usize>,
    /// Probe caps; the largest is the sequence length (at most 60).
    #[arg(long, value_delimiter = ',', default_values_t = [15, 30, 60])]
    pub caps: Vec<usize>,
}
