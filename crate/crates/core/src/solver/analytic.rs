use crate::spectral::{Grid, PhysicalField, SpectralField};

/// Taylor-Green vortex `(sin x₁ cos x₂, −cos x₁ sin x₂) e^{−2εt}`, an exact
/// Navier-Stokes solution whose pressure is `¼(cos 2x₁ + cos 2x₂) e^{−4εt}`.
pub fn taylor_green(grid: Grid, t: f64, epsilon: f64) -> SpectralField {
    let amp = (-2.0 * epsilon * t).exp();
    PhysicalField::from_fn(grid, 2, |x, y| vec![amp * x.sin() * y.cos(), -amp * x.cos() * y.sin()])
        .to_spectral()
        .with_time(t)
}

/// Steady shear `(sin x₂, 0)`.
pub fn shear(grid: Grid, amplitude: f64) -> SpectralField {
    PhysicalField::from_fn(grid, 2, |_, y| vec![amplitude * y.sin(), 0.0]).to_spectral()
}
