//! Grid, transforms, differential operators, Leray projection and discrete
//! `L^p` norms on the periodic square.

mod fft;
mod field;
mod grid;
mod ops;
pub mod snapshot;

pub use fft::Fft2;
pub use field::{transform_forward, transform_inverse, PhysicalField, SpectralField};
pub use grid::Grid;
pub use ops::{
    advect, dealias, dealias_in_place, dealias_mask, divergence, divergence_defect, gradient,
    inverse_neg_laplacian, jacobian, laplacian, laplacian_symbol, leray_project,
    leray_project_in_place, lp_norm, lp_of_values, multiply, LpExponent,
};
