//! Classical electrodynamics of point charges in 2+1 dimensions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod geometry;
pub mod helium;
pub mod ledger;
pub mod quadrature;
pub mod segment;
pub mod selfforce;
pub mod validation;
pub mod worldline;

pub use error::{Error, Result};
pub use geometry::{lorentz_force, mdot, raise_indices, wedge, AngularMomentum2, FieldStrength, MVec3};
