//! Boolean polynomials over GF(2) with idempotent variables.

mod parse;
mod poly;
mod var;

pub use parse::{parse, parse_forms, parse_with, render, render_with, Names, ParseError, ParseErrorKind};
pub use poly::{Assignment, EvalError, FactorError, Monomial, Polynomial, Substitution, TermBudgetExceeded};
pub use var::{Instance, VarClass, VarId, STATE_BITS, UNIVERSE};

pub(crate) use poly::BitIter;
