//! `rdsym`: classification, mapping, verification and catalog commands.
//! Results go to stdout as JSON, diagnostics to stderr.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "rdsym",
    version,
    about = "Symmetries, mappings and exact solutions of reaction-diffusion equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Match an equation against the classification lists.
    Classify(EqArgs),
    /// Map an equation to another class or along an additional equivalence transformation.
    Map(MapArgs),
    /// Check a solution, a Lie or reduction operator, or an operator algebra.
    Verify(VerifyArgs),
    /// Browse or check the shipped solution catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Class {
    Initial,
    Imaged,
    Double,
}

/// Coefficients of one equation. Which flags apply depends on the class.
#[derive(Args, Debug, Clone)]
struct EqArgs {
    #[arg(long, value_enum, default_value = "initial")]
    class: Class,
    /// f in f u_t = (g u_x)_x + h u^m.
    #[arg(long, allow_hyphen_values = true)]
    f: Option<String>,
    /// g; defaults to f.
    #[arg(long, allow_hyphen_values = true)]
    g: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    h: Option<String>,
    /// F in v_t = v_xx + H v^m + F v.
    #[arg(long = "F", allow_hyphen_values = true)]
    big_f: Option<String>,
    /// H of the imaged or double-imaged class.
    #[arg(long = "H", allow_hyphen_values = true)]
    big_h: Option<String>,
    /// G in w_t = w_xx + H w² + G.
    #[arg(long = "G", allow_hyphen_values = true)]
    big_g: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    m: Option<f64>,
    /// x-interval, e.g. "x:0.5..3".
    #[arg(long, default_value = "x:0.5..2")]
    domain: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MapTarget {
    Gauged,
    Imaged,
    Double,
}

#[derive(Args, Debug)]
struct MapArgs {
    #[arg(long, value_enum, conflicts_with = "additional")]
    to: Option<MapTarget>,
    /// Additional equivalence transformation, e.g. "imaged-2-2".
    #[arg(long)]
    additional: Option<String>,
    /// Row parameter for --additional, as name=value; repeatable.
    #[arg(long = "param", allow_hyphen_values = true)]
    params: Vec<String>,
    /// Base point of the gauge x' = ∫ dx/g from x0.
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<f64>,
    #[command(flatten)]
    eq: EqArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum What {
    Solution,
    Lie,
    Nonclassical,
    Algebra,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    what: What,
    /// Catalog entry id (solution checks).
    #[arg(long)]
    entry: Option<String>,
    /// Closed-form solution u(t, x).
    #[arg(long, allow_hyphen_values = true)]
    solution: Option<String>,
    /// Operator coefficients τ, ξ, η.
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<String>,
    /// Basis operator "τ;ξ;η" for algebra checks; repeatable.
    #[arg(long = "op", allow_hyphen_values = true)]
    ops: Vec<String>,
    #[arg(long)]
    tol: Option<f64>,
    /// Jet or sample points for operator and algebra checks.
    #[arg(long, default_value_t = 64)]
    samples: usize,
    /// Grid points per axis for solution checks.
    #[arg(long, default_value_t = 20)]
    grid: usize,
    /// Verification box, e.g. "t:0.5..2,x:0.5..2".
    #[arg(long = "box")]
    grid_box: Option<String>,
    /// Random constant bindings for a catalog entry; 0 uses its defaults.
    #[arg(long, default_value_t = 0)]
    bindings: usize,
    #[command(flatten)]
    eq: EqArgs,
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    /// Print entries matching every filter (tag, id fragment, class=…, name=value).
    List {
        #[arg(long = "filter")]
        filters: Vec<String>,
    },
    /// Verify every matching entry on its grid.
    VerifyAll {
        #[arg(long = "filter")]
        filters: Vec<String>,
        #[arg(long, default_value_t = 3)]
        bindings: usize,
    },
}

/// How a command ended, mapped to the process exit code.
pub enum Outcome {
    /// Result printed; the check passed or there was nothing to check.
    Pass,
    /// Result printed; the check failed.
    Fail,
}

/// Errors that stop a command before a result is printed.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 64,
            CliError::Validation(_) => 2,
        }
    }
}

fn seed() -> Result<u64, CliError> {
    match std::env::var("RDSYM_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| {
            CliError::Usage(format!(
                "RDSYM_SEED must be a non-negative integer, got `{s}`"
            ))
        }),
        Err(_) => Ok(0),
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let seed = seed()?;
    rdsym_core::expr::set_default_seed(seed);
    match cli.command {
        Command::Classify(eq) => commands::classify(&eq),
        Command::Map(args) => commands::map(&args),
        Command::Verify(args) => commands::verify(&args, seed),
        Command::Catalog { action } => match action {
            CatalogAction::List { filters } => commands::catalog_list(&filters),
            CatalogAction::VerifyAll { filters, bindings } => {
                commands::catalog_verify_all(&filters, bindings, seed)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            match &e {
                CliError::Usage(m) => eprintln!("usage error: {m}"),
                CliError::Validation(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(e.code())
        }
    }
}
