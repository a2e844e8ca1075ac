use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ssg_core::equilibria::EquilibriumError;
use ssg_core::instances::InstanceError;
use ssg_core::joint_schedules::ScheduleError;
use ssg_core::SolveMode;

mod experiment;
mod gen;
mod solve;

const EXIT_USAGE: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_GUARD: u8 = 4;

#[derive(Parser)]
#[command(name = "ssg", version, about = "Exact Stackelberg security game solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one game file and print a JSON report.
    Solve {
        #[command(subcommand)]
        query: solve::Query,
        /// How the joint-schedule LPs are built.
        #[arg(long, value_enum, default_value_t = Mode::Auto, global = true)]
        mode: Mode,
    },
    /// Run a batch of random trials and write CSV.
    Experiment {
        #[arg(value_enum)]
        kind: experiment::Kind,
        #[command(flatten)]
        opts: experiment::Options,
    },
    /// Generate a random game file.
    Gen(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Auto,
    Enumerate,
    Cg,
}

impl From<Mode> for SolveMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Auto => SolveMode::Auto,
            Mode::Enumerate => SolveMode::Enumerate,
            Mode::Cg => SolveMode::ColumnGeneration,
        }
    }
}

#[derive(Args)]
struct GeneratorArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 8)]
    schedules: usize,
    #[arg(long, default_value_t = 6)]
    l: usize,
    #[arg(long, default_value_t = 1)]
    resources: usize,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    generator: GeneratorArgs,
    /// Close the schedules under nonempty subsets (l at most 4).
    #[arg(long)]
    ssas: bool,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<InstanceError>() {
            return match e {
                InstanceError::InvalidConfig(_) => EXIT_USAGE,
                InstanceError::ClosureTooLarge(_) => EXIT_GUARD,
                _ => EXIT_VALIDATION,
            };
        }
        if let Some(e) = cause.downcast_ref::<EquilibriumError>() {
            return match e {
                EquilibriumError::DigitBudget { .. } | EquilibriumError::Schedules(_) => EXIT_GUARD,
                EquilibriumError::Internal(_) => 1,
                _ => EXIT_VALIDATION,
            };
        }
        if cause.downcast_ref::<ScheduleError>().is_some() {
            return EXIT_GUARD;
        }
        if cause.downcast_ref::<solve::InputError>().is_some() {
            return EXIT_VALIDATION;
        }
    }
    1
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve { query, mode } => solve::run(query, mode.into()),
        Command::Experiment { kind, opts } => experiment::run(kind, &opts),
        Command::Gen(args) => gen::run(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err)
            if err.chain().any(|c| {
                c.downcast_ref::<std::io::Error>().map(|e| e.kind()) == Some(std::io::ErrorKind::BrokenPipe)
            }) =>
        {
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
