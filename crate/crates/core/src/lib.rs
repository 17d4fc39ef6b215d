//! Computational free probability for a single selfadjoint variable and for
//! free families.
//!
//! Given the spectral measure `μ` of a selfadjoint `x`, the crate computes
//!
//! * the off-diagonal logarithmic energy `∫∫_{R²-D} log|y-z| dμ dμ` and its
//!   regularized variant ([`energy`]);
//! * the free entropy `χ(x)`, the free Hausdorff dimension `δ₀(x) = 1 - Σc_i²`
//!   and the two-sided bounds on the free Hausdorff `δ₀`-entropy, for one
//!   variable and for free families ([`entropy`]);
//! * the diagonal microstates `A_k`, `B_k` behind those bounds, their
//!   convergence series and bound constants ([`microstates`]);
//! * the special-function constants they rest on ([`asymptotics`]).
//!
//! Measures are read from a small JSON format ([`spec_file`]).

// `!(x > 0.0)` is the idiom for rejecting NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod energy;
pub mod entropy;
pub mod error;
pub mod ext_real;
pub mod measure;
pub mod microstates;
mod par;
pub mod quadrature;
pub mod spec_file;
pub mod sum;

pub use energy::{offdiag_energy, regularized_energy, EnergyOptions, EnergyResult};
pub use error::{Error, Result};
pub use measure::{Atom, AtomFamily, DiffusePart, FamilyKind, SpectralMeasure, ValidationReport};
