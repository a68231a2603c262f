mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Alternating approximate bisimulation toolkit.
#[derive(Parser, Debug)]
#[command(name = "altbisim", version, about)]
pub struct Cli {
    /// Print a JSON document instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct FormulaSource {
    /// Formula text.
    #[arg(long, visible_alias = "spec", conflicts_with = "spec_file")]
    pub formula: Option<String>,
    /// Read the formula from a file.
    #[arg(long)]
    pub spec_file: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct PairArgs {
    #[arg(long)]
    pub sys1: String,
    #[arg(long)]
    pub sys2: String,
    /// Coalition as a comma-separated list (empty for none); defaults to all agents.
    #[arg(long)]
    pub agents: Option<String>,
    #[arg(long)]
    pub eps: f64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a system file and report structural violations.
    Validate { file: String },
    /// Greatest alternating approximate bisimulation between two agent systems.
    Bisim {
        #[command(flatten)]
        pair: PairArgs,
        /// Also extract a distinguishing formula pair for two states.
        #[arg(long, num_args = 2, value_names = ["Q1", "Q2"])]
        distinguish: Option<Vec<String>>,
    },
    /// Greatest alternating approximate bisimulation between two labeled systems.
    AeaBisim {
        #[arg(long)]
        sys1: String,
        #[arg(long)]
        sys2: String,
        #[arg(long)]
        eps: f64,
    },
    /// Check a state formula at a state.
    Check {
        #[arg(long)]
        sys: String,
        #[arg(long)]
        state: String,
        #[command(flatten)]
        formula: FormulaSource,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        /// Three-valued check over prefixes with this many states.
        #[arg(long)]
        bounded: Option<usize>,
        /// Print a memoryless strategy for the outermost coalition.
        #[arg(long)]
        witness: bool,
    },
    /// Partner of a formula under the syntactic partner relation.
    Partner {
        #[command(flatten)]
        formula: FormulaSource,
        #[arg(long)]
        agents: String,
        #[arg(long)]
        eps: f64,
        /// Read a path formula instead of a state formula.
        #[arg(long)]
        path: bool,
        /// Map a right formula back to its left partner.
        #[arg(long)]
        inverse: bool,
        /// Print the rule applications (state formulas only).
        #[arg(long)]
        derivation: bool,
    },
    /// Widen every atom of a negation-free LTL formula to an approximate atom.
    Tr {
        #[command(flatten)]
        formula: FormulaSource,
        #[arg(long)]
        eps: f64,
    },
    /// Distinguishing formula pair for two states, or a bisimilarity verdict.
    Distinguish {
        #[command(flatten)]
        pair: PairArgs,
        q1: String,
        q2: String,
    },
    /// Synthesize a control strategy for a negation-free LTL specification.
    Synth {
        #[arg(long)]
        sys: String,
        #[arg(long)]
        state: String,
        #[command(flatten)]
        formula: FormulaSource,
    },
    /// Check that specifications enforceable on an abstraction transfer to a sample.
    Transfer {
        #[arg(long)]
        sample: String,
        #[arg(long = "abstract")]
        abstraction: String,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        formula: FormulaSource,
    },
    /// Compare a main algorithm against its brute-force reference.
    Oracle {
        #[command(subcommand)]
        which: OracleCommand,
    },
    /// Print a seeded random system.
    Gen {
        #[arg(long, value_parser = ["ats", "lats"], default_value = "ats")]
        kind: String,
        /// Overridden by the ALTBISIM_SEED environment variable.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        states: usize,
        #[arg(long, default_value_t = 2)]
        observations: usize,
        #[arg(long, default_value_t = 2)]
        agents: u32,
        #[arg(long, default_value_t = 2)]
        max_choices: usize,
        #[arg(long, default_value_t = 2)]
        controls: usize,
        #[arg(long, default_value_t = 2)]
        disturbances: usize,
        #[arg(long, default_value_t = 2)]
        max_successors: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum OracleCommand {
    /// Refinement against enumeration of all relations (agent or labeled systems).
    Bisim {
        #[arg(long)]
        sys1: String,
        #[arg(long)]
        sys2: String,
        #[arg(long)]
        agents: Option<String>,
        #[arg(long)]
        eps: f64,
    },
    /// Bounded checker against plain game-tree recursion.
    Bounded {
        #[arg(long)]
        sys: String,
        #[arg(long)]
        state: String,
        #[command(flatten)]
        formula: FormulaSource,
        #[arg(long)]
        bounded: usize,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
    },
    /// Synthesis against forward search over history-dependent strategies.
    Synth {
        #[arg(long)]
        sys: String,
        #[arg(long)]
        state: String,
        #[command(flatten)]
        formula: FormulaSource,
        #[arg(long, default_value_t = altbisim::oracle::ENUM_STRATEGIES_HORIZON)]
        horizon: usize,
    },
    /// Lasso evaluation against evaluation on a finite unrolling.
    Lasso {
        #[arg(long)]
        sys: String,
        /// Comma-separated state names (may be empty).
        #[arg(long, default_value = "")]
        prefix: String,
        /// Comma-separated state names.
        #[arg(long)]
        cycle: String,
        #[command(flatten)]
        formula: FormulaSource,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = commands::run(&cli.command);
    // A closed pipe downstream is not an error worth reporting.
    let _ = if cli.json {
        writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&report.json).expect("serializable"))
    } else if report.code == 2 {
        write!(std::io::stderr(), "{}", report.text)
    } else {
        write!(std::io::stdout(), "{}", report.text)
    };
    ExitCode::from(report.code)
}
