//! A toolkit for first-order formulas over membership and equality:
//! an AST with a text syntax, exhaustive finite-model checking, verbatim
//! catalog of the formulas under study, the syntactic rewrites that
//! relate them, and executable hereditarily-finite set theory.

pub mod catalog;
pub mod formula;
pub mod gen;
pub mod hf;
pub mod model;
pub mod parser;
pub mod printer;
pub mod schema;
pub mod suite;
pub mod transforms;

pub use formula::{Formula, Quantifier, Var};
pub use model::{
    check_equiv, check_valid, evaluate, structures, Assignment, FinStructure, FreeVarPolicy,
    Verdict,
};
pub use parser::parse;
pub use printer::print;
