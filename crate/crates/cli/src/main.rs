//! `gammaring` command line front end.
//!
//! Exit codes: 0 pass, 1 property fails, 2 usage or parse error,
//! 3 budget exhausted or result partial, 4 internal inconsistency.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{Family, HuntOptions, Options};
use gammaring::format::GrdfDocument;
use gammaring::GammaError;
use report::Report;

#[derive(Parser)]
#[command(name = "gammaring", version, about = "Finite Gamma-ring toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Args)]
struct Common {
    /// GRDF document describing the ring, frames and maps.
    #[arg(long)]
    input: PathBuf,
    /// Product arity.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Word length for the defect hypotheses (defaults to n - 1).
    #[arg(long)]
    k: Option<usize>,
    /// Evaluation budget for exhaustive checks and search nodes.
    #[arg(long, default_value_t = 100_000_000)]
    budget: u64,
    /// Seed for sampled checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Treat a non-additive map as a failure.
    #[arg(long)]
    require_additive: bool,
}

#[derive(Args)]
struct HuntArgs {
    #[arg(long, value_enum, default_value_t = Family::Trivial)]
    family: Family,
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Node budget per qualifying ring.
    #[arg(long, default_value_t = 100_000_000)]
    budget: u64,
    /// Largest |M| in the trivial family.
    #[arg(long, default_value_t = 8)]
    max_order: u64,
    /// Invariant factors of Gamma in the trivial family.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    gamma: Vec<u64>,
    /// Largest rows * cols in the matrix family.
    #[arg(long, default_value_t = 4)]
    max_cells: usize,
    #[arg(long, default_value_t = 2)]
    modulus: u64,
    /// Search cap on rings that miss the conditions.
    #[arg(long, default_value_t = 2000)]
    witness_limit: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Check the Barnes axioms (and report Nobusawa readings when present).
    Axioms(Common),
    /// List unities and idempotents.
    Idempotents(Common),
    /// Peirce decomposition for each frame.
    Peirce(Common),
    /// Check the structural conditions over the frame family.
    Conditions(Common),
    /// Verify the listed maps are n-multiplicative.
    VerifyIso(Common),
    /// Enumerate all n-multiplicative bijection pairs.
    SearchIso(Common),
    /// Verify the listed n-derivations.
    VerifyDerivation(Common),
    /// Enumerate all n-derivations.
    SearchDerivations(Common),
    /// Run the additivity pipeline on the listed maps and derivations.
    Theorem(Common),
    /// Survey a ring family for non-additive maps.
    Hunt(HuntArgs),
}

fn error_code(e: &GammaError) -> u8 {
    match e {
        GammaError::InternalInconsistency(_) => 4,
        GammaError::BudgetExceeded { .. } => 3,
        GammaError::Precondition(_) | GammaError::EmptyFrameFamily => 1,
        _ => 2,
    }
}

fn emit(report: &Report, format: OutputFormat) {
    let text = match format {
        OutputFormat::Json => {
            let mut t = serde_json::to_string_pretty(&report.to_json()).expect("report serializes");
            t.push('\n');
            t
        }
        OutputFormat::Text => report.to_text(),
    };
    // a closed pipe downstream is not an error worth a panic
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

type Handler = fn(&GrdfDocument, &Options) -> gammaring::Result<Report>;

fn run(cli: Cli) -> (gammaring::Result<Report>, OutputFormat) {
    let (common, handler): (Common, Handler) =
        match cli.command {
            Command::Hunt(h) => {
                let opts = HuntOptions {
                    family: h.family,
                    n: h.n,
                    budget: h.budget,
                    max_order: h.max_order,
                    gamma: h.gamma,
                    max_cells: h.max_cells,
                    modulus: h.modulus,
                    witness_limit: h.witness_limit,
                };
                return (commands::hunt(&opts), h.format);
            }
            Command::Axioms(c) => (c, commands::axioms),
            Command::Idempotents(c) => (c, commands::idempotents),
            Command::Peirce(c) => (c, commands::peirce),
            Command::Conditions(c) => (c, commands::conditions),
            Command::VerifyIso(c) => (c, commands::verify_iso),
            Command::SearchIso(c) => (c, commands::search_iso),
            Command::VerifyDerivation(c) => (c, commands::verify_derivation),
            Command::SearchDerivations(c) => (c, commands::search_derivations),
            Command::Theorem(c) => (c, commands::theorem),
        };
    let opts = Options {
        n: common.n,
        k: common.k,
        budget: common.budget,
        seed: common.seed,
        require_additive: common.require_additive,
    };
    let result = commands::load(&common.input).and_then(|doc| handler(&doc, &opts));
    (result, common.format)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let (result, format) = run(cli);
    let code = match result {
        Ok(report) => {
            emit(&report, format);
            report.outcome.exit_code() as u8
        }
        Err(e) => {
            eprintln!("error: {e}");
            error_code(&e)
        }
    };
    eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
    ExitCode::from(code)
}
