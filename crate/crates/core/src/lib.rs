//! Numerical toolkit for convex envelopes, moduli of uniform and asymptotic
//! convexity and smoothness, and polynomial norms.

pub mod asymptotic;
pub mod envelope;
pub mod error;
pub mod expr;
pub mod extremal;
pub mod form;
pub mod lp;
pub mod moduli;
pub mod normcore;
pub mod sampling;
pub mod sequence;

pub use error::{Error, Result};
