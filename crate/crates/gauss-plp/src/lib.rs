//! Exact symbolic inference for probabilistic logic programs with discrete
//! and Gaussian random switches and linear equality constraints.
//!
//! Programs are Prolog-style clause sets where `msw(Switch, Outcome)` draws
//! a random outcome, `values/2` declares outcome spaces (finite lists or
//! `real`), `set_sw/2` declares parameters (probability lists or
//! `norm(Mean, Variance)`), and `=` goals over arithmetic terms impose
//! linear equality constraints. The engine explores every derivation of a
//! query symbolically and returns its success function: a closed-form sum
//! of weighted delta and Gaussian density factors under linear constraints,
//! computed exactly, with no sampling or discretization.
//!
//! ```
//! use gauss_plp::{answer_query, Program, QueryConfig};
//!
//! let program = Program::parse(
//!     "widget(X) :- msw(m, M), msw(st(M), Z), msw(pt, Y), X = Y + Z.
//!      :- values(m, [a, b]), values(st(_), real), values(pt, real).
//!      :- set_sw(m, [0.3, 0.7]).
//!      :- set_sw(st(a), norm(2.0, 1.0)), set_sw(st(b), norm(3.0, 1.0)).
//!      :- set_sw(pt, norm(0.5, 0.1)).",
//! ).unwrap();
//! let result = answer_query(&program, "widget(X)", &QueryConfig::default()).unwrap();
//! assert_eq!(
//!     result.sf.to_string(),
//!     "0.3 * N(X; 2.5, 1.1) + 0.7 * N(X; 3.5, 1.1)",
//! );
//! ```
//!
//! The `examples/` directory demonstrates each capability end to end:
//! mixture densities, discrete queries, Kalman filtering, hybrid
//! discrete-continuous densities, the constraint algebra, and cross-checks
//! against numeric oracles.

pub mod cli;
pub mod constraint;
pub mod engine;
pub mod linear;
pub mod num;
pub mod oracle;
pub mod parse;
pub mod program;
pub mod render;
pub mod sf;
pub mod term;

/// Crate-wide error type. `Parse` and `Program` cover everything wrong
/// with the program text; `Eval` covers failures during derivation (type
/// conflicts, unbound arithmetic, depth exhaustion, misuse of switches).
#[derive(thiserror::Error, Debug)]
pub enum Error {
    #[error("{0}")]
    Parse(#[from] parse::ParseError),
    #[error("program error: {0}")]
    Program(String),
    #[error("evaluation error: {0}")]
    Eval(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use engine::{answer_query, solve_goals, QueryConfig, QueryResult};
pub use linear::LinearForm;
pub use program::{Distribution, Program, ValuesSpec};
pub use sf::{DeltaFactor, GaussianFactor, PpdfTerm, SuccessFunction};
pub use term::{Term, Var};
