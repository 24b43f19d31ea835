//! Numerical analysis of finite-dimensional quantum Markov semigroups.
//!
//! The crate computes the decoherence-free algebra of a GKSL generator, its
//! block structure, the tracial reference state and the associated conditional
//! expectations, and from those the decoherence-free Poincaré constant, upper
//! estimates of the decoherence-free modified log-Sobolev constant, regularity
//! margins of the Dirichlet form, and decoherence-time bounds.
//!
//! Layout:
//!
//! * [`matops`]: dense complex matrices, spectral calculus, divided differences.
//! * [`lindblad`]: generators, superoperators, semigroups, invariant states.
//! * [`catalog`]: constructors for the standard example models.
//! * [`dfstructure`]: decoherence-free algebra, blocks, conditional expectations.
//! * [`functionals`]: variances, entropies, Dirichlet forms, regularity checks.
//! * [`constants`]: spectral gap and log-Sobolev estimates.
//! * [`dynamics`]: trajectories, bound curves and decoherence times.

pub mod catalog;
pub mod constants;
pub mod dfstructure;
pub mod dynamics;
pub mod error;
pub mod functionals;
pub mod lindblad;
pub mod matops;
pub mod optim;
pub mod report;
pub mod sampling;
pub mod tolerances;

pub use catalog::ModelSpec;
pub use constants::{GapResult, MlsiEstimate};
pub use dfstructure::{BlockStructure, ConditionalExpectation, DfAnalysis};
pub use dynamics::{DecayCurve, DecoTimeResult};
pub use error::{Error, Result};
pub use functionals::Functionals;
pub use lindblad::{Lindbladian, Picture, QmsContext, Superoperator};
pub use matops::{CMatrix, DensityMatrix, InnerKind, MatFn, WeightedInner};
pub use report::DecoherenceReport;
pub use tolerances::NumericPolicy;

pub use num_complex::Complex64 as C64;
