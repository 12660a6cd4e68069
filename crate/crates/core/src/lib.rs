//! Monomial random dynamical systems `x ↦ x^{S_n(ω)}` on the p-adic integers.
//!
//! - [`padic`]: fixed-precision `Z_p` arithmetic, valuations, the measurement map.
//! - [`unity`]: roots of unity, Teichmüller lifts, fixed-point groups.
//! - [`analysis`]: exact attractors, invariant subsets, basins and Markov chains.
//! - [`engine`]: seeded Monte Carlo simulation of the cocycle.
//! - [`pattern`]: interference-strip sampling and histograms.
//! - [`cli`]: the `padic-rds` command-line front end.
//!
//! Linear algebra is generic over [`Scalar`]; the aliases below fix the
//! exact (`BigRational`) and floating-point instantiations.

pub mod analysis;
pub mod arith;
pub mod cli;
pub mod engine;
pub mod error;
pub mod padic;
pub mod pattern;
pub mod scalar;
pub mod unity;

pub use error::{Error, Result};
pub use padic::{PadicInt, Valuation};
pub use scalar::Scalar;
pub use unity::{RootIndex, UnityTable};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

pub type ExactMatrix = analysis::markov::TransitionMatrix<Rational>;
pub type FloatMatrix = analysis::markov::TransitionMatrix<f64>;
pub type ExactAbsorption = analysis::markov::Absorption<Rational>;
pub type FloatAbsorption = analysis::markov::Absorption<f64>;
