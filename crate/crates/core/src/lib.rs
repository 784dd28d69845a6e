//! Classical wave-particle model of a hydrogen-like atom in a weak uniform
//! magnetic field.
//!
//! A point charge circles a Coulomb centre while guided by a pair of
//! counter-rotating field modes. The crate solves the circular orbits,
//! evaluates the guiding modes, and checks that switching on the field is
//! equivalent to a slow rotation at the Larmor frequency.

// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod error;
pub mod field;
pub mod harmony;
pub mod larmor;
pub mod model;
pub mod orbit;
pub mod specfun;

pub use error::{Error, Result};
