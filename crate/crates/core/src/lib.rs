//! Exact constructions on finitely presented zero-dimensional dynamical
//! systems: pseudo-orbit tracing with certificates, chain decomposition,
//! embedded full shifts, specification points, regularly recurrent cascades,
//! and invariant-measure approximation in the weak-* metric.
//!
//! Everything is computed in exact dyadic/rational arithmetic, and every
//! construction emits a certificate that an independent checker can replay.

pub mod analysis;
pub mod certificate;
pub mod chains;
pub mod dyadic;
pub mod embedding;
pub mod error;
pub mod measures;
pub mod shadowing;
pub mod specification;
pub mod systems;

pub use dyadic::Dyadic;
pub use error::{Error, Result};
