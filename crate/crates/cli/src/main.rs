//! `gbmech`: solve, decompose, verify, benchmark and generate scheduling instances.

mod bench;
mod check;
mod common;
mod solve;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gbmech::instances::{generate, GeneratorParams, InstanceFile, FAMILY_NAMES};

use common::{CliError, ObjectiveKind};

#[derive(Parser)]
#[command(name = "gbmech", version, about = "Truthful scheduling mechanisms on stars, hyperstars and graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a mechanism on an instance file and compare it with the optimum.
    Solve(solve::SolveArgs),
    /// Orientation, degeneracy and star decomposition of a graph instance.
    Decompose(solve::DecomposeArgs),
    /// Truthfulness battery for one mechanism.
    Verify(check::VerifyArgs),
    /// Ratio sweep over a family, written as CSV.
    Benchmark(bench::BenchArgs),
    /// Write one generated instance to a file.
    Gen(GenArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    LocalLb,
    StarLb,
    TreeLb,
    LpLb,
    LpSmallLb,
    LpSmallLbDeviation,
    MaxLb,
    MaxLbDeviation,
    RandomStar,
    RandomHyperstar,
    RandomTree,
    RandomGraph,
    RandomMultigraph,
    RandomDegenerate,
}

impl Family {
    fn name(self) -> &'static str {
        let v = self.to_possible_value().expect("no skipped variants");
        FAMILY_NAMES
            .iter()
            .copied()
            .find(|&f| f == v.get_name())
            .expect("every variant is a known family")
    }
}

#[derive(Args, Clone)]
pub(crate) struct FamilyArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Number of tasks (star families).
    #[arg(long, default_value_t = 4)]
    m: usize,
    /// Roots, star leaves, or degeneracy, depending on the family.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Number of nodes (graph families).
    #[arg(long, default_value_t = 6)]
    n: usize,
    /// Geometric base.
    #[arg(long, default_value_t = 2.0)]
    a: f64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = gbmech::instances::DEFAULT_EPSILON)]
    epsilon: f64,
    /// Dummy-node cost for tree-lb.
    #[arg(long, default_value_t = gbmech::instances::DEFAULT_DUMMY_COST)]
    h: f64,
    /// Edge probability for random graphs.
    #[arg(long, default_value_t = 0.5)]
    prob: f64,
    /// Multiplicity bound for random multigraphs.
    #[arg(long, default_value_t = 2)]
    w: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl FamilyArgs {
    pub(crate) fn params(&self) -> GeneratorParams {
        GeneratorParams {
            family: self.family.name().to_string(),
            m: self.m,
            k: self.k,
            n: self.n,
            a: self.a,
            p: self.p,
            epsilon: self.epsilon,
            h: self.h,
            prob: self.prob,
            w: self.w,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Objective stored in the file.
    #[arg(long, value_enum)]
    objective: Option<ObjectiveKind>,
    /// Norm parameter of the stored objective.
    #[arg(long)]
    objective_p: Option<f64>,
    #[arg(long, short)]
    output: PathBuf,
}

fn cmd_gen(args: &GenArgs) -> Result<(), CliError> {
    let inst = generate(&args.family.params())?;
    let objective = args.objective.map(|o| o.build(args.objective_p)).transpose()?;
    InstanceFile::new(inst, objective)
        .write(&args.output)
        .map_err(|e| CliError::at(&args.output, e))?;
    println!("wrote {} instance to {}", args.family.family.name(), args.output.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => solve::cmd_solve(a),
        Command::Decompose(a) => solve::cmd_decompose(a),
        Command::Verify(a) => check::cmd_verify(a),
        Command::Benchmark(a) => bench::cmd_benchmark(a),
        Command::Gen(a) => cmd_gen(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::Verification(_)) {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
