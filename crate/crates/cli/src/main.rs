mod commands;
mod fixture;
mod output;
mod report;
mod selftest;

use clap::{Args, Parser, Subcommand};
use output::{Format, Outcome};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Census, Galois groups, module oracle and ramification data for degree
/// `p^ell` extensions of a p-adic field without intermediate fields.
#[derive(Debug, Parser)]
#[command(name = "plext", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Residue characteristic of the base field.
    #[arg(long, global = true)]
    pub p: Option<u32>,
    /// Prime with degree `p^ell`.
    #[arg(long, global = true)]
    pub ell: Option<u32>,
    /// Ramification index of K over Q_p.
    #[arg(long = "eK", global = true)]
    pub e_k: Option<u32>,
    /// Inertia degree of K over Q_p.
    #[arg(long = "fK", global = true)]
    pub f_k: Option<u32>,
    #[arg(long, value_enum, default_value = "plain", global = true)]
    pub format: Format,
    /// Override e(F/K) of the auxiliary tame field.
    #[arg(long = "e-rel", global = true)]
    pub e_rel: Option<u128>,
    /// Override f(F/K) of the auxiliary tame field.
    #[arg(long = "f-rel", global = true)]
    pub f_rel: Option<u128>,
    /// Evaluate the formulas for p = ell as well.
    #[arg(long = "allow-p-eq-ell", global = true)]
    pub allow_p_eq_ell: bool,
    /// Worker threads for the oracle enumeration; never changes the output.
    #[arg(long = "seed-parallelism", global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub seed_parallelism: Option<u16>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form census, in total and per group.
    Count,
    /// Group catalog with matrix representatives.
    Groups,
    /// Isotypic decomposition of every residue level.
    Module,
    /// Census rebuilt from the explicit modules, compared with the closed form.
    Oracle,
    /// Ramification filtration, Herbrand function and discriminant.
    Ramify(RamifyArgs),
    /// Cross-checks of the published formulas; exit 2 on disagreement.
    Audit,
    /// Property grid over all modules.
    Selftest,
    /// Compare counts with an exported fixture file.
    Crosscheck(CrosscheckArgs),
}

/// Raw inputs, used instead of `--ell/--eK/--fK` when all three are given.
#[derive(Debug, Clone, Args)]
pub struct RamifyArgs {
    #[arg(long = "eF")]
    pub e_f: Option<u128>,
    #[arg(long = "fF")]
    pub f_f: Option<u128>,
    /// Exponent d with p^d the degree of the composite.
    #[arg(long = "d")]
    pub d: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct CrosscheckArgs {
    /// JSON fixture: a list of records.
    pub fixture: PathBuf,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(plext_core::Error),
}

impl From<plext_core::Error> for CliError {
    fn from(e: plext_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let c = &cli.common;
    match &cli.command {
        Command::Count => commands::count(c),
        Command::Groups => commands::groups(c),
        Command::Module => commands::module(c),
        Command::Oracle => commands::oracle(c),
        Command::Ramify(args) => commands::ramify(c, args),
        Command::Audit => commands::audit(c),
        Command::Selftest => selftest::run(),
        Command::Crosscheck(args) => fixture::crosscheck(c, &args.fixture),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let threads = cli.common.seed_parallelism.map_or(0, usize::from);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(outcome) => {
            let text = outcome.render(cli.common.format);
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            if let Some(note) = &outcome.note {
                eprintln!("{note}");
            }
            ExitCode::from(outcome.exit as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
