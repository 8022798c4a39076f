//! Littlewood-Paley analysis, Besov norms, Bony paraproducts and
//! pseudo-spectral Navier-Stokes/Euler solvers on the 2D torus, with
//! sampling harnesses that measure the constants and rates in the
//! uniform-in-viscosity well-posedness and inviscid-limit estimates.

pub mod bony;
pub mod error;
pub mod estimates;
pub mod harness;
pub mod littlewood_paley;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
