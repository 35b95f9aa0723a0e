use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "sepprob", version, about = "Generalized separability probabilities of random 4x4 density matrices")]
pub struct Cli {
    /// Named-constant table (JSON) replacing the built-in one.
    #[arg(long, global = true, value_name = "FILE")]
    pub constants: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Monte Carlo over random density matrices.
    #[command(subcommand)]
    Mc(McCommand),
    /// Legendre reconstruction of the determinant density from moments.
    Reconstruct(ReconstructArgs),
    /// Generalized hypergeometric series.
    #[command(subcommand)]
    Hyper(HyperCommand),
    /// Formulas built from the 7F6 family.
    #[command(subcommand)]
    Formula(FormulaCommand),
    /// Exact rationals or a + b C forms from a decimal.
    Recognize(RecognizeArgs),
    /// Slope of ln P against alpha through the origin.
    Fitline(FitlineArgs),
    /// Probability tables.
    #[command(subcommand)]
    Table(TableCommand),
    /// Monte Carlo check of the alpha = 1/2, 1, 2 rows of a table.
    Verify(VerifyArgs),
}

#[derive(Subcommand, Debug)]
pub enum McCommand {
    /// Estimate the probability that det(rho^PT) >= 0.
    Estimate(McEstimateArgs),
    /// Empirical moments <det(rho^PT)^n det(rho)^k>.
    Moments(McMomentsArgs),
}

#[derive(Args, Debug)]
pub struct SamplingArgs {
    /// rebit, qubit or quabit.
    #[arg(long)]
    pub ensemble: String,
    #[arg(long, default_value_t = 4_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Args, Debug)]
pub struct McEstimateArgs {
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct McMomentsArgs {
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[arg(long, default_value_t = 4)]
    pub max_n: u32,
    #[arg(long, default_value_t = 0)]
    pub max_k: u32,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Also write the k = 0 column as a moment file for `reconstruct`.
    #[arg(long, value_name = "FILE")]
    pub sequence: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Exact,
    Float,
}

#[derive(Args, Debug)]
pub struct ReconstructArgs {
    #[arg(long, value_name = "FILE")]
    pub moments: PathBuf,
    #[arg(long)]
    pub degree: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    /// Significant digits in float mode.
    #[arg(long, default_value_t = 50)]
    pub digits: usize,
    /// Convergence trace CSV.
    #[arg(long, value_name = "FILE")]
    pub trace: Option<PathBuf>,
    /// Spacing of trace degrees.
    #[arg(long, default_value_t = 1)]
    pub trace_step: usize,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum HyperCommand {
    /// Evaluate pFq(upper; lower; z).
    Eval(HyperEvalArgs),
    /// Evaluate member k of the 7F6 family.
    Family(HyperFamilyArgs),
}

#[derive(Args, Debug)]
pub struct HyperEvalArgs {
    /// Comma-separated rationals.
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    pub upper: String,
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    pub lower: String,
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    #[arg(long, default_value_t = 50)]
    pub digits: usize,
}

#[derive(Args, Debug)]
pub struct HyperFamilyArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long)]
    pub k: u32,
    #[arg(long, default_value_t = 50)]
    pub digits: usize,
}

#[derive(Subcommand, Debug)]
pub enum FormulaCommand {
    /// Evaluate a formula config at alpha.
    Eval(FormulaEvalArgs),
    /// Fit a formula config to a table.
    Fit(FormulaFitArgs),
}

#[derive(Args, Debug)]
pub struct FormulaEvalArgs {
    #[arg(long, value_name = "FILE")]
    pub config: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long, default_value_t = 50)]
    pub digits: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Holdout {
    /// Fit on half-integral alpha, predict integral alpha.
    Integers,
    /// Fit on integral alpha, predict half-integral alpha.
    HalfIntegers,
}

#[derive(Args, Debug)]
pub struct FormulaFitArgs {
    #[arg(long, value_name = "FILE")]
    pub table: PathBuf,
    #[arg(long)]
    pub ansatz_degree: usize,
    #[arg(long, value_enum, default_value_t = Holdout::HalfIntegers)]
    pub holdout: Holdout,
    /// Shared denominator coefficients, ascending powers of alpha.
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    pub denominator: String,
    #[arg(long, default_value_t = 60)]
    pub digits: usize,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct RecognizeArgs {
    /// A decimal literal, or a file holding one.
    #[arg(long, allow_hyphen_values = true)]
    pub value: String,
    #[arg(long, default_value = "1000000000000")]
    pub max_den: String,
    /// Constant name for a + b C recognition.
    #[arg(long)]
    pub constant: Option<String>,
    /// Comma-separated candidate values of a.
    #[arg(long, allow_hyphen_values = true, default_value = "2,0")]
    pub a_candidates: String,
    /// Digits the candidate must be verified to; defaults to the input's.
    #[arg(long)]
    pub digits_required: Option<usize>,
}

#[derive(Args, Debug)]
pub struct FitlineArgs {
    #[arg(long, value_name = "FILE")]
    pub table: PathBuf,
    #[arg(long, value_name = "FILE", default_value = "fitline.csv")]
    pub out_csv: PathBuf,
    #[arg(long, value_name = "FILE", default_value = "fitline.svg")]
    pub out_svg: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum TableCommand {
    /// Compare a table with the printed reference decimals.
    Check(TableCheckArgs),
    /// Write the twenty reference rows as a table file.
    Reference(TableReferenceArgs),
}

#[derive(Args, Debug)]
pub struct TableCheckArgs {
    #[arg(long, value_name = "FILE")]
    pub table: PathBuf,
}

#[derive(Args, Debug)]
pub struct TableReferenceArgs {
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_name = "FILE")]
    pub table: PathBuf,
    #[arg(long, default_value_t = 4_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, value_name = "FILE", default_value = "verdict.json")]
    pub out: PathBuf,
}
