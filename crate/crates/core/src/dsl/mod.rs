//! Text formats for systems and formulas.

mod formula;
mod lexer;
mod system;

pub use formula::{parse_formula, parse_ltl, parse_path_formula, parse_state_formula, Formula, FormulaKind};
pub use system::{parse_system, parse_system_in, print_system};
