//! Numerical estimation of Łojasiewicz regular-separation exponents.
//!
//! Given two algebraic sets `X`, `Y` through a base point `x0`, the exponent
//! `L(X, Y; x0)` is the smallest `ν` for which
//!
//! ```text
//! ρ(x, X) + ρ(x, Y) ≥ c · ρ(x, X ∩ Y)^ν     (x near x0)
//! ```
//!
//! holds. This crate estimates `ν` from samples, sections sets by generic
//! hyperplanes, computes orders of tangency of graph manifolds from Taylor
//! jets, and runs scenario-driven checks of the relations between these
//! quantities.
//!
//! Module map:
//!
//! - [`algebra`]: sparse complex polynomials, jets, affine maps, the
//!   expression parser.
//! - [`geometry`]: hyperplanes through a point, the angle metric, frames.
//! - [`variety`]: set specifications and distance oracles.
//! - [`lojasiewicz`]: separation samples and the exponent estimator.
//! - [`tangency`]: order of tangency and the exponent lower bound it gives.
//! - [`harness`]: scenarios, checks and reports.

pub mod algebra;
pub mod cvec;
mod error;
pub mod geometry;
pub mod harness;
mod linalg;
pub mod lojasiewicz;
pub mod seed;
pub mod tangency;
pub mod variety;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use algebra::{AffineMap, Jet, Monomial, ParseError, Poly};
pub use geometry::{Frame, Hyperplane};
pub use lojasiewicz::{ExponentEstimate, Mode, SampleSet, SeparationSample};
pub use tangency::TangencyReport;
pub use variety::{DistanceResult, VarietySpec};
