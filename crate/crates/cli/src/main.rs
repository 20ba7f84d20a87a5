mod commands;
mod report;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mlakit_core::{Limits, MlaError};

use commands::{Inputs, Outcome};
use report::{Report, Verdict, SCHEMA};

/// Exhaustive computations with finite multiplicative Lie algebras.
///
/// Algebras are given as `catalog:<key>`, as inline JSON or as a path to a
/// JSON file. Exit status is 0 on pass, 1 on a mathematical failure and 2 on
/// usage errors or exceeded search ceilings.
#[derive(Parser)]
#[command(name = "mlakit", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Print the full report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Candidate ceiling for every exhaustive search.
    #[arg(long, global = true, value_name = "N")]
    limit: Option<u64>,
    /// Seed for randomized tie-breaking (currently unused, recorded in the report).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an algebra's tables against the defining laws.
    Verify { algebra: String },
    /// Evaluate the derived identities exhaustively.
    Identities { algebra: String },
    /// Group center, left-zero set, null set and algebraic center.
    Centers { algebra: String },
    /// Every ideal.
    Ideals { algebra: String },
    /// Lower central and derived series.
    Series { algebra: String },
    /// Build the crossed product of a cocycle.
    Extend {
        #[arg(long, num_args = 2, value_names = ["Q", "I"])]
        datum: Option<Vec<String>>,
        #[arg(long)]
        cocycle: String,
    },
    /// Classify all extensions of a datum up to equivalence.
    Census {
        #[arg(long, num_args = 2, value_names = ["Q", "I"], required = true)]
        datum: Vec<String>,
        /// Restrict to cocycles with these action terms.
        #[arg(long)]
        action: Option<String>,
        #[arg(long, value_name = "N")]
        max_candidates: Option<u64>,
    },
    /// Decide whether two cocycles define equivalent extensions.
    Equiv {
        first: String,
        second: String,
        #[arg(long, num_args = 2, value_names = ["Q", "I"])]
        datum: Option<Vec<String>>,
    },
    /// Second cohomology with abelian kernel.
    H2(DatumAction),
    /// First cohomology with abelian kernel.
    H1(DatumAction),
    /// All derivations and the principal ones.
    Derivations(DatumAction),
    /// Stabilizing automorphisms of an abelian-kernel extension and their derivations.
    Stab {
        #[arg(long)]
        extension: String,
    },
    /// Check that H² of the center acts freely and transitively on extension classes.
    Correspondence(DatumAction),
    /// Check exactness of the automorphism sequence of an extension.
    Wells {
        #[arg(long)]
        extension: String,
    },
    /// Check exactness of the five-term inflation-restriction sequence.
    Hs {
        #[arg(long)]
        extension: String,
        /// Abelian coefficient algebra.
        #[arg(long)]
        coeff: String,
        /// Action terms of the total algebra on the coefficients.
        #[arg(long)]
        action: String,
    },
    /// The built-in algebras.
    Catalog {
        #[command(subcommand)]
        command: CatalogCommand,
    },
}

#[derive(Args)]
struct DatumAction {
    #[arg(long, num_args = 2, value_names = ["Q", "I"], required = true)]
    datum: Vec<String>,
    /// Action-terms file, or `trivial`.
    #[arg(long)]
    action: String,
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// List the standard keys.
    List,
    /// Print an algebra file for a key.
    Emit { key: String },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Verify { .. } => "verify",
            Command::Identities { .. } => "identities",
            Command::Centers { .. } => "centers",
            Command::Ideals { .. } => "ideals",
            Command::Series { .. } => "series",
            Command::Extend { .. } => "extend",
            Command::Census { .. } => "census",
            Command::Equiv { .. } => "equiv",
            Command::H2(_) => "h2",
            Command::H1(_) => "h1",
            Command::Derivations(_) => "derivations",
            Command::Stab { .. } => "stab",
            Command::Correspondence(_) => "correspondence",
            Command::Wells { .. } => "wells",
            Command::Hs { .. } => "hs",
            Command::Catalog { .. } => "catalog",
        }
    }
}

fn run(cmd: &Command, inputs: &mut Inputs, limits: &Limits) -> anyhow::Result<Outcome> {
    use commands as c;
    match cmd {
        Command::Verify { algebra } => c::verify(inputs, algebra),
        Command::Identities { algebra } => c::identities(inputs, algebra),
        Command::Centers { algebra } => c::centers_cmd(inputs, algebra),
        Command::Ideals { algebra } => c::ideals(inputs, algebra, limits),
        Command::Series { algebra } => c::series(inputs, algebra),
        Command::Extend { datum, cocycle } => c::extend(inputs, datum.as_deref(), cocycle, limits),
        Command::Census {
            datum,
            action,
            max_candidates,
        } => {
            let mut limits = *limits;
            if let Some(n) = max_candidates {
                limits.max_candidates = *n;
            }
            c::census(inputs, datum, action.as_deref(), &limits)
        }
        Command::Equiv { first, second, datum } => c::equiv(inputs, datum.as_deref(), first, second, limits),
        Command::H2(d) => c::h2(inputs, &d.datum, &d.action, limits),
        Command::H1(d) => c::h1(inputs, &d.datum, &d.action, limits),
        Command::Derivations(d) => c::derivations_cmd(inputs, &d.datum, &d.action, limits),
        Command::Stab { extension } => c::stab(inputs, extension, limits),
        Command::Correspondence(d) => c::correspondence(inputs, &d.datum, &d.action, limits),
        Command::Wells { extension } => c::wells(inputs, extension, limits),
        Command::Hs {
            extension,
            coeff,
            action,
        } => c::hs(inputs, extension, coeff, action, limits),
        Command::Catalog { command: CatalogCommand::List } => Ok(c::catalog_list()),
        Command::Catalog { .. } => unreachable!("emit is handled before dispatch"),
    }
}

/// Exceeded ceilings and malformed input are usage-level; everything else
/// the core reports is a mathematical failure of the input.
fn is_usage_error(e: &anyhow::Error) -> bool {
    match e.downcast_ref::<MlaError>() {
        Some(
            MlaError::SearchBound { .. }
            | MlaError::SizeBound { .. }
            | MlaError::OrderOverflow { .. }
            | MlaError::SizeMismatch { .. }
            | MlaError::UnknownKey(_)
            | MlaError::Format(_),
        ) => true,
        Some(_) => false,
        None => true,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    if let Some(n) = g.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot set up {n} worker threads: {e}");
            return ExitCode::from(2);
        }
    }
    if let Command::Catalog {
        command: CatalogCommand::Emit { key },
    } = &cli.command
    {
        return match commands::catalog_emit(key) {
            Ok(text) => {
                println!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        };
    }

    let mut limits = Limits::default();
    if let Some(n) = g.limit {
        limits.max_candidates = n;
        limits.max_pairs = n;
    }
    let mut inputs = Inputs::default();
    let outcome = match run(&cli.command, &mut inputs, &limits) {
        Ok(o) => o,
        Err(e) if is_usage_error(&e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
        Err(e) => Outcome {
            verdict: Verdict::Fail,
            payload: serde_json::json!({ "error": format!("{e:#}") }),
            counterexamples: Vec::new(),
        },
    };
    let report = Report {
        schema: SCHEMA.to_string(),
        command: cli.command.name().to_string(),
        inputs: inputs.digests,
        seed: g.seed,
        verdict: outcome.verdict,
        payload: outcome.payload,
        counterexamples: outcome.counterexamples,
    };
    if g.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.render());
    }
    ExitCode::from(report.exit_code() as u8)
}
