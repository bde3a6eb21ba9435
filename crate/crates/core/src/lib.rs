//! Proof search and countermodel generation for bi-intuitionistic
//! propositional logic.

pub mod countermodel;
pub mod emit;
pub mod error;
pub mod formula;
pub mod fuzz;
pub mod parse;
pub mod print;
pub mod prover;
pub mod semantics;
pub mod sequent;
pub mod universe;
pub mod verdict;

pub use error::{ModelError, ParseError, ProveError, RuleError};
pub use formula::{Connective, Formula, FormulaSet};
pub use parse::{parse_formula, parse_input, parse_plain, parse_sequent};
pub use print::print_formula;
pub use sequent::{ExtendedFormula, RuleId, RuleInstance, Sequent, Status, VarSets};
