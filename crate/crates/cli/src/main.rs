//! `apx`: run the approximation algorithms on instance files.

mod bench;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use apx_core::format::InstanceKind;
use apx_core::gen::Shape;
use apx_core::minconv::Mode;
use apx_core::treesparsity::SparsityMode;
use apx_core::{ApxError, Ratio};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "apx", version, about = "Approximation schemes for subset sum, min-plus convolution, tree sparsity and kSUM")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum EngineArg {
    Det,
    Rand,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Min,
    Max,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Min => Mode::Min,
            ModeArg::Max => Mode::Max,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SparsityArg {
    Head,
    Tail,
}

impl From<SparsityArg> for SparsityMode {
    fn from(m: SparsityArg) -> Self {
        match m {
            SparsityArg::Head => SparsityMode::Head,
            SparsityArg::Tail => SparsityMode::Tail,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum KindArg {
    Ssum,
    Partition,
    Seqpair,
    Tree,
    Ksum,
}

impl From<KindArg> for InstanceKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Ssum => InstanceKind::Ssum,
            KindArg::Partition => InstanceKind::Partition,
            KindArg::Seqpair => InstanceKind::Seqpair,
            KindArg::Tree => InstanceKind::Tree,
            KindArg::Ksum => InstanceKind::Ksum,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ShapeArg {
    Uniform,
    Planted,
    Dense,
    Sparse,
}

impl From<ShapeArg> for Shape {
    fn from(s: ShapeArg) -> Self {
        match s {
            ShapeArg::Uniform => Shape::Uniform,
            ShapeArg::Planted => Shape::Planted,
            ShapeArg::Dense => Shape::Dense,
            ShapeArg::Sparse => Shape::Sparse,
        }
    }
}

#[derive(Args, Debug)]
pub struct SsumArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Accuracy in (0,1), as a decimal or a fraction `a/b`.
    #[arg(long)]
    pub eps: Ratio,
    /// Large/small threshold; defaults to eps^(2/3).
    #[arg(long)]
    pub gamma: Option<Ratio>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = EngineArg::Det)]
    pub engine: EngineArg,
    /// Failure probability of the randomized engine.
    #[arg(long, default_value = "1/100")]
    pub delta: Ratio,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct MinconvArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Exact convolution; requires --w-bound.
    #[arg(long, requires = "w_bound", conflicts_with = "eps")]
    pub exact: bool,
    /// Upper bound on finite entries for --exact.
    #[arg(long)]
    pub w_bound: Option<u64>,
    #[arg(long, required_unless_present = "exact")]
    pub eps: Option<Ratio>,
    #[arg(long, value_enum, default_value_t = ModeArg::Min)]
    pub mode: ModeArg,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct TreeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub eps: Ratio,
    #[arg(long, value_enum)]
    pub mode: SparsityArg,
    /// Report one entry and its subtree instead of the whole vector.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct KsumArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, required_unless_present = "exact")]
    pub eps: Option<Ratio>,
    /// Must match the k in the file when given.
    #[arg(long)]
    pub k: Option<usize>,
    /// Run the exact algorithm instead of the scaling loop.
    #[arg(long)]
    pub exact: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub w: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ShapeArg::Uniform)]
    pub shape: ShapeArg,
    /// kSUM arity.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Write to a file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long)]
    pub input: PathBuf,
    /// Convolution mode for seqpair instances.
    #[arg(long, value_enum, default_value_t = ModeArg::Min)]
    pub mode: ModeArg,
    #[arg(long)]
    pub json: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum BenchCommand {
    MinconvApprox,
    MinconvExact,
    SsumWeak,
    Partition,
    TreeSparsity,
    Threesum,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub command: BenchCommand,
    /// Comma-separated instance sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Comma-separated accuracies.
    #[arg(long, value_delimiter = ',', required = true)]
    pub eps: Vec<Ratio>,
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Value bound for generated instances.
    #[arg(long, default_value_t = 1_000_000)]
    pub w: u64,
    #[arg(long, value_enum, default_value_t = ShapeArg::Uniform)]
    pub shape: ShapeArg,
    /// Worker threads across grid cells.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Weak (1-ε)-approximate subset sum.
    SsumWeak(SsumArgs),
    /// (1-ε)-approximate Partition.
    Partition(SsumArgs),
    /// Exact or approximate (min,+)/(max,+) convolution of a sequence pair.
    Minconv(MinconvArgs),
    /// Head or tail tree sparsity.
    TreeSparsity(TreeArgs),
    /// Approximate 3SUM.
    Threesum(KsumArgs),
    /// Approximate or exact kSUM.
    Ksum(KsumArgs),
    /// Generate a reproducible instance file.
    Gen(GenArgs),
    /// Exhaustive ground truth for small instances.
    Oracle(OracleArgs),
    /// Time a command over a grid of sizes and accuracies; prints CSV.
    Bench(BenchArgs),
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::SsumWeak(a) => commands::ssum_weak(&a),
        Command::Partition(a) => commands::partition(&a),
        Command::Minconv(a) => commands::minconv(&a),
        Command::TreeSparsity(a) => commands::tree_sparsity(&a),
        Command::Threesum(a) => commands::ksum(&a, Some(3)),
        Command::Ksum(a) => commands::ksum(&a, None),
        Command::Gen(a) => commands::gen(&a),
        Command::Oracle(a) => commands::oracle(&a),
        Command::Bench(a) => bench::run(&a),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<ApxError>() {
        return e.exit_code() as u8;
    }
    if err.downcast_ref::<std::io::Error>().is_some() {
        return 2;
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) if err.downcast_ref::<std::io::Error>().is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe) => {
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
