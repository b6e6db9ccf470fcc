//! Exact-bookkeeping polynomial and jet arithmetic over complex coefficients.
//!
//! Coefficients are `f64` complex numbers; "exact" refers to term
//! bookkeeping. Terms are kept in graded lexicographic order, lowest degree
//! first, so the leading (lowest-degree) form of a polynomial is a prefix of
//! its term list and equal polynomials compare structurally.

mod affine;
mod jet;
mod monomial;
mod parse;
mod poly;

pub use affine::AffineMap;
pub use jet::{Jet, DEFAULT_JET_ORDER};
pub use monomial::Monomial;
pub use parse::{parse_poly, ParseError, ParseErrorKind};
pub use poly::{default_variable_names, Poly, DROP_TOLERANCE};
