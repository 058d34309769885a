//! Numerical laboratory for matrix Li–Yau/Harnack estimates of the semilinear
//! heat equation `u_t = Δu + u^p` on flat tori.
//!
//! The crate is organised around four layers:
//!
//! * [`params`]: the admissible parameter cone `(a, b, c, d, θ)`, the exponent
//!   bounds `G1`, `G2`, `G`, `G̃(n)` and the cubic root machinery behind them.
//! * [`solver`]: an IMEX spectral integrator for positive solutions on `T¹`/`T²`.
//! * [`fields`]: `f = log u`, its spectral derivatives and the Harnack tensors.
//! * [`verifier`]: margin certification of the matrix, trace, claim and
//!   path-integrated Harnack inequalities.
//!
//! [`cli`] glues these into the `harnack-lab` binary.

pub mod cli;
pub mod error;
pub mod fields;
pub mod params;
pub mod solver;
pub mod verifier;

pub use error::{Error, Result};

pub use fields::{derive, DerivedFields, SymMat, TensorField};
pub use params::{ConeFamilyPoint, Quintuple};
pub use solver::{Grid, ScalarField, Trajectory};
pub use verifier::{MarginReport, PathQuery, Variant};
