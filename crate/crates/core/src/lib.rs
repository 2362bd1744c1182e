//! Thermodynamics of a spin-1/2 particle under one, two, or three
//! noncommuting observables: the Jaynesian maximum-entropy (semiclassical)
//! model and the Bures-metric (quantum-theoretic) model.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod analysis;
pub mod bures_model;
pub mod cli;
pub mod error;
pub mod output;
pub mod quadrature;
pub mod selftest;
pub mod semiclassical;
pub mod specfun;

pub use error::{Error, Result};
