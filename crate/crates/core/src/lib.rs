//! Pseudospectral laboratory for the low-Mach, inviscid and semiclassical
//! limit of the barotropic quantum Navier-Stokes system on the 2-torus.
//!
//! The crate evolves the Mach-scaled system with an exact acoustic stage,
//! builds the acoustic correction and the incompressible Euler reference, and
//! measures the relative-entropy distance between them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acoustic;
pub mod constitutive;
pub mod diagnostics;
pub mod error;
pub mod euler;
pub mod grid;
pub mod harness;
pub mod solver;
pub mod spectral;

pub use constitutive::{BohmForm, LimitParams, DENSITY_FLOOR};
pub use error::{QnsError, Result};
pub use grid::{Grid2D, ScalarField, VectorField, TORUS_AREA};
