//! Text front-end and reports.
//!
//! A document is a sequence of `;`-terminated items:
//!
//! ```text
//! ring p=1 q=2;
//! relation x1^2 + t1*t2;
//! bounds d=4 D=6;
//! element a = x1 + t1*t2;
//! derivation E2 = t1*d/dt1 + t2*d/dt2;
//! cover { chart A: ring p=1 q=2; chart B: ring p=1 q=2; overlap A B;
//!         transition A->B { x1 -> x1 + t1*t2; t1 -> t1; t2 -> t2 }; weights A=1/2 B=1/2; }
//! split; gr 2; member x1^4; batchelor;
//! ```
//!
//! Even generators are `x1..xp`, odd generators `t1..tq`. [`parse_model`] resolves every
//! name and returns positioned [`Diagnostic`]s on failure; [`run_model`] executes the
//! commands and [`emit_report`] serializes the results as deterministic JSON.

mod diagnostic;
mod lexer;
mod model;
mod parser;
mod runner;

pub use diagnostic::Diagnostic;
pub use lexer::{lex, Pos, Tok, Token};
pub use model::{resolve_bounds, ChartDecl, Command, CoverDecl, Item, Model, TransitionDecl, EULER};
pub use parser::{parse_model, MAX_EVEN_GENERATORS, MAX_EXPR_DEGREE, MAX_ODD_GENERATORS};
pub use runner::{
    cocycle_violation_json, derivation_json, emit_report, run_model, split_json, CommandResult, Outcome, RunOptions,
    RunReport, DEFAULT_LEIBNIZ_TRIALS,
};
