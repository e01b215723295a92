//! Library surface of the `rlr` command-line tool, separated from the
//! binary so the dispatch logic is directly testable.
//!
//! Exit codes: 0 success, 1 check failure, 2 input error, 3 budget
//! exceeded.

pub mod commands;
pub mod format;
pub mod report;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "rlr",
    about = "Exact verification, cohomology and deformation calculus for restricted Lie-Rinehart algebras over prime fields"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Input definition file (JSON).
    #[arg(long, global = true)]
    pub input: Option<std::path::PathBuf>,

    /// Built-in example name (see `rlr examples list`).
    #[arg(long, global = true)]
    pub example: Option<String>,

    /// Truncation order for deformation commands.
    #[arg(long, global = true)]
    pub order: Option<usize>,

    /// Maximum cochain degree for the optional complex certification.
    #[arg(long, global = true)]
    pub degree: Option<usize>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: OutputFormat,

    /// Enumeration budget for exhaustive quantifiers, in evaluations.
    #[arg(long, global = true, default_value_t = 1 << 16)]
    pub budget: u64,

    /// First p-map parameter of the parameterized abelian example.
    #[arg(long, global = true, default_value_t = 1)]
    pub lambda1: u32,

    /// Second p-map parameter of the parameterized abelian example.
    #[arg(long, global = true, default_value_t = 0)]
    pub lambda2: u32,

    /// Use the a-linear degree-1 constraint variant in the p >= 3
    /// triviality test instead of the p-semilinear one.
    #[arg(long, global = true, default_value_t = false)]
    pub a_linear_c1: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify every defining axiom of the input (commutativity and
    /// associativity, restricted Lie axioms, anchor compatibilities).
    Verify,
    /// Canonical basis of the derivation algebra of the A-section.
    Derivations,
    /// Extend proposed basis p-map images to the unique p-map, verifying
    /// the inner-power hypothesis.
    PmapExtend,
    /// Characteristic-2 degree-2 cohomology: cocycles, coboundaries,
    /// quotient dimension and named membership verdicts.
    Cohomology,
    /// Pointwise deformation 2-cocycle verification, p >= 3.
    VerifyCocycle,
    /// Expand the deformation equations modulo t^{order+1}.
    DeformCheck,
    /// Obstruction residuals and extendability at the next order.
    Obstruct,
    /// Conjugate the deformation by the automorphism section.
    Transport,
    /// Coboundary membership of the infinitesimal (char 2), or candidate
    /// triviality of the cochain section (p >= 3).
    TrivialTest,
    /// Built-in catalogue.
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum ExamplesAction {
    /// Print every catalogue name.
    List,
    /// Verify a catalogue entry, optionally running the cohomology solver
    /// on it as well.
    Run {
        name: String,
        #[arg(long, default_value_t = false)]
        cohomology: bool,
    },
}

/// Exit classification for command outcomes.
#[derive(Debug, Clone)]
pub enum Outcome {
    Ok(report::Report),
    CheckFailure(report::Report),
    InputError(String),
    BudgetExceeded(String),
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Ok(_) => 0,
            Outcome::CheckFailure(_) => 1,
            Outcome::InputError(_) => 2,
            Outcome::BudgetExceeded(_) => 3,
        }
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match self {
            Outcome::Ok(r) | Outcome::CheckFailure(r) => r.render(format),
            Outcome::InputError(msg) => format!("input error: {msg}\n"),
            Outcome::BudgetExceeded(msg) => format!("budget exceeded: {msg}\n"),
        }
    }
}
