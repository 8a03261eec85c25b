//! Dissipative stabilization of a one-dimensional Z2 lattice gauge theory.
//!
//! The crate builds the model operators on a `2N`-qubit register
//! ([`operator`], [`model`]), integrates the Lindblad master equation and
//! solves for Liouvillian steady states ([`engine`]), evaluates the gauge and
//! correlation diagnostics ([`observables`]), simulates the noisy Trotterized
//! circuit with mid-circuit syndrome measurement and feedback ([`circuit`]),
//! and drives configurable experiments that write CSV output ([`runner`]).

pub mod circuit;
pub mod dense;
pub mod engine;
pub mod error;
pub mod model;
pub mod observables;
pub mod operator;
pub mod runner;
pub mod sparse;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
