use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "period-lab", version, about = "Period functions of twisted Maass forms")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Print the report as JSON instead of a text summary.
    #[arg(long, global = true)]
    pub json: bool,
    /// Pass/fail tolerance (each command has its own default).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for grid jobs (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Write the artifact (table or report) here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Artifact format for `--out`.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Representation checks.
    #[command(subcommand)]
    Rep(RepCmd),
    /// Maass form fixture checks.
    #[command(subcommand)]
    Maass(MaassCmd),
    /// Period function pipelines on a grid.
    Lewis(LewisArgs),
    /// Operator-valued Hurwitz zeta.
    #[command(subcommand)]
    Zeta(ZetaCmd),
    /// Transfer operators and continuation.
    #[command(subcommand)]
    Transfer(TransferCmd),
    /// Completed L-functions.
    #[command(subcommand)]
    Lfun(LfunCmd),
    /// Exact group-ring algebra.
    #[command(subcommand)]
    Algebra(AlgebraCmd),
}

#[derive(Debug, Clone, Args)]
pub struct EtaArgs {
    /// Representation preset: trivial, sixth-root or char:a,b.
    #[arg(long, default_value = "trivial")]
    pub eta: String,
    /// Representation JSON file; overrides --eta.
    #[arg(long)]
    pub eta_file: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum RepCmd {
    /// Relations, parabolic triviality and (optionally) unipotent order.
    Validate {
        path: PathBuf,
        /// Also check that eta kills I^{q+1}.
        #[arg(long)]
        q: Option<usize>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum MaassCmd {
    /// Laplace eigen-equation and automorphy under S and T at random points.
    Check {
        fixture: String,
        #[command(flatten)]
        eta: EtaArgs,
        #[arg(long, default_value_t = 8)]
        points: usize,
        /// Finite-difference step for the Laplacian.
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Pipeline {
    Transform,
    Residual,
    Roundtrip,
}

#[derive(Debug, Args)]
pub struct LewisArgs {
    #[arg(value_enum)]
    pub pipeline: Pipeline,
    pub fixture: String,
    #[command(flatten)]
    pub eta: EtaArgs,
    /// Spectral parameter override, `re` or `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<String>,
    /// Real-part range `lo,hi`.
    #[arg(long, allow_hyphen_values = true, default_value = "0.3,2")]
    pub re: String,
    /// Imaginary-part range `lo,hi` (default -1,1; 0.2,1 for roundtrip).
    #[arg(long, allow_hyphen_values = true)]
    pub im: Option<String>,
    /// Points per axis.
    #[arg(long, default_value_t = 15)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct ZetaArgs {
    #[command(flatten)]
    pub eta: EtaArgs,
    /// `re` or `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    /// `re` or `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    /// Use the weights eta(T' T^j)^{-1}.
    #[arg(long)]
    pub primed: bool,
}

#[derive(Debug, Subcommand)]
pub enum ZetaCmd {
    /// Closed-form value.
    Eval {
        #[command(flatten)]
        args: ZetaArgs,
        /// Compare against this many terms of the defining series.
        #[arg(long)]
        direct_terms: Option<usize>,
    },
    /// Large-x expansion against the closed form.
    Asym {
        #[command(flatten)]
        args: ZetaArgs,
        #[arg(long, default_value_t = 4)]
        m: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    L0,
    Linf,
    #[value(alias = "linfremark")]
    LinfRemark,
}

#[derive(Debug, Subcommand)]
pub enum TransferCmd {
    /// Fixed-point residual |L psi - psi| on the positive axis.
    Residual {
        fixture: String,
        #[command(flatten)]
        eta: EtaArgs,
        #[arg(long, value_enum, ignore_case = true, default_value_t = Which::L0)]
        which: Which,
        /// Comma-separated sample points.
        #[arg(long, default_value = "0.5,1,2")]
        x: String,
        #[arg(long, default_value_t = 1000)]
        n_max: usize,
        /// Taylor order of the tail acceleration.
        #[arg(long, default_value_t = 4)]
        order: usize,
        #[arg(long, default_value_t = 0.5)]
        radius: f64,
    },
    /// Continuation through Q_n compared with direct evaluation.
    Continue {
        fixture: String,
        #[command(flatten)]
        eta: EtaArgs,
        /// `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, default_value_t = 6)]
        n: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Parity {
    #[value(name = "0")]
    Even,
    #[value(name = "1")]
    Odd,
    Both,
}

#[derive(Debug, Args)]
pub struct QuadArgs {
    #[arg(long, value_enum, default_value_t = Parity::Both)]
    pub eps: Parity,
    /// Lower quadrature limit; below it the integral is folded (default 1e-4 for check, 0.3 for fe).
    #[arg(long)]
    pub y_min: Option<f64>,
    #[arg(long, default_value_t = 12.0)]
    pub y_max: f64,
}

#[derive(Debug, Subcommand)]
pub enum LfunCmd {
    /// Dirichlet series against quadrature at one point of absolute convergence.
    Check {
        fixture: String,
        #[command(flatten)]
        eta: EtaArgs,
        /// `re` or `re,im`.
        #[arg(long, allow_hyphen_values = true, default_value = "2.5,0.7")]
        s: String,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Functional equation at a list of points.
    Fe {
        fixture: String,
        #[command(flatten)]
        eta: EtaArgs,
        /// Semicolon-separated `re,im` points.
        #[arg(long, allow_hyphen_values = true, default_value = "0.5,0;0.5,1;0.5,2")]
        s: String,
        #[command(flatten)]
        quad: QuadArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum AlgebraCmd {
    /// gamma - 1 = x_S (S - 1) + x_T (T - 1), rebuilt exactly.
    Decompose {
        /// Word in S, T and t = T^{-1}.
        #[arg(long)]
        word: String,
    },
    /// Sampled and exact check that eta kills I^{q+1}.
    Unipotent {
        /// Generator values of a character, comma-separated integers or p/q.
        #[arg(long, allow_hyphen_values = true)]
        chi: Option<String>,
        /// Group for --chi: `modular` or `free:n`.
        #[arg(long, default_value = "free:2")]
        group: String,
        #[command(flatten)]
        eta: EtaArgs,
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}
