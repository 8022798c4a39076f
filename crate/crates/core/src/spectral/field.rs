use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::fft::Fft2;
use super::grid::Grid;
use crate::error::{Error, Result};

/// Real scalar or vector field on the torus, stored as Fourier coefficients.
///
/// Coefficients are component-major; within a component the layout is
/// row-major over `(k1, k2)` in FFT-standard order. The forward transform is
/// normalized so that `e^{ik·x}` has coefficient exactly 1 at `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    components: usize,
    coeffs: Vec<Complex64>,
    time: Option<f64>,
}

/// Point values of a field on the collocation grid, component-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalField {
    pub grid: Grid,
    pub components: usize,
    pub values: Vec<f64>,
}

impl PhysicalField {
    pub fn component(&self, c: usize) -> &[f64] {
        let len = self.grid.len();
        &self.values[c * len..(c + 1) * len]
    }

    /// Euclidean magnitude at every grid point.
    pub fn magnitudes(&self) -> Vec<f64> {
        let len = self.grid.len();
        (0..len)
            .map(|i| {
                (0..self.components)
                    .map(|c| self.values[c * len + i].powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }

    /// Sample a closure `f(x1, x2) -> [components]` on the grid.
    pub fn from_fn<F>(grid: Grid, components: usize, f: F) -> Self
    where
        F: Fn(f64, f64) -> Vec<f64>,
    {
        let n = grid.n();
        let len = grid.len();
        let mut values = vec![0.0; components * len];
        for i1 in 0..n {
            for i2 in 0..n {
                let v = f(grid.coordinate(i1), grid.coordinate(i2));
                for (c, vc) in v.iter().take(components).enumerate() {
                    values[c * len + i1 * n + i2] = *vc;
                }
            }
        }
        Self { grid, components, values }
    }
}

impl SpectralField {
    pub fn zeros(grid: Grid, components: usize) -> Self {
        Self {
            grid,
            components,
            coeffs: vec![Complex64::default(); components * grid.len()],
            time: None,
        }
    }

    pub fn from_coeffs(grid: Grid, components: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if components == 0 || coeffs.len() != components * grid.len() {
            return Err(Error::Config(format!(
                "expected {} coefficients for {components} components on n={}, got {}",
                components * grid.len(),
                grid.n(),
                coeffs.len()
            )));
        }
        Ok(Self { grid, components, coeffs, time: None })
    }

    /// Single complex mode `amplitude · e^{ik·x}` in one component. Not real
    /// unless combined with its conjugate partner.
    pub fn single_mode(grid: Grid, components: usize, component: usize, k: (i64, i64), amplitude: Complex64) -> Self {
        let mut f = Self::zeros(grid, components);
        let idx = grid.index_of(k.0, k.1);
        f.coeffs[component * grid.len() + idx] = amplitude;
        f
    }

    /// Real mode `amplitude · cos(k·x)` (split over `±k`).
    pub fn cosine_mode(grid: Grid, components: usize, component: usize, k: (i64, i64), amplitude: f64) -> Self {
        let mut f = Self::zeros(grid, components);
        let len = grid.len();
        let a = grid.index_of(k.0, k.1);
        let b = grid.index_of(-k.0, -k.1);
        if a == b {
            f.coeffs[component * len + a] += Complex64::new(amplitude, 0.0);
        } else {
            f.coeffs[component * len + a] += Complex64::new(amplitude / 2.0, 0.0);
            f.coeffs[component * len + b] += Complex64::new(amplitude / 2.0, 0.0);
        }
        f
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.grid
    }

    #[inline]
    pub fn components(&self) -> usize {
        self.components
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    #[inline]
    pub fn component(&self, c: usize) -> &[Complex64] {
        let len = self.grid.len();
        &self.coeffs[c * len..(c + 1) * len]
    }

    #[inline]
    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let len = self.grid.len();
        &mut self.coeffs[c * len..(c + 1) * len]
    }

    /// Extract a single component as a scalar field.
    pub fn component_field(&self, c: usize) -> SpectralField {
        SpectralField {
            grid: self.grid,
            components: 1,
            coeffs: self.component(c).to_vec(),
            time: self.time,
        }
    }

    /// Stack scalar fields into one multi-component field.
    pub fn stack(parts: &[SpectralField]) -> Result<SpectralField> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Config("cannot stack zero fields".into()))?;
        let grid = first.grid;
        let mut coeffs = Vec::with_capacity(parts.iter().map(|p| p.coeffs.len()).sum());
        let mut components = 0;
        for p in parts {
            p.expect_grid(grid)?;
            coeffs.extend_from_slice(&p.coeffs);
            components += p.components;
        }
        Ok(SpectralField { grid, components, coeffs, time: first.time })
    }

    #[inline]
    pub fn time(&self) -> Option<f64> {
        self.time
    }

    pub fn set_time(&mut self, t: Option<f64>) {
        self.time = t;
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.time = Some(t);
        self
    }

    pub fn expect_grid(&self, grid: Grid) -> Result<()> {
        if self.grid != grid {
            return Err(Error::GridMismatch { expected: grid.n(), found: self.grid.n() });
        }
        Ok(())
    }

    pub fn expect_components(&self, components: usize) -> Result<()> {
        if self.components != components {
            return Err(Error::ComponentMismatch { expected: components, found: self.components });
        }
        Ok(())
    }

    pub fn expect_compatible(&self, other: &SpectralField) -> Result<()> {
        other.expect_grid(self.grid)?;
        other.expect_components(self.components)
    }

    /// Multiply every component by a real multiplier defined per lattice index.
    pub fn apply_multiplier(&self, multiplier: &[f64]) -> SpectralField {
        let mut out = self.clone();
        let len = self.grid.len();
        for c in 0..self.components {
            for (z, m) in out.coeffs[c * len..(c + 1) * len].iter_mut().zip(multiplier) {
                *z *= *m;
            }
        }
        out
    }

    pub fn scale(&self, a: f64) -> SpectralField {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|z| *z *= a);
        out
    }

    /// `self += a · other`.
    pub fn axpy(&mut self, a: f64, other: &SpectralField) {
        debug_assert_eq!(self.coeffs.len(), other.coeffs.len());
        for (z, w) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *z += a * w;
        }
    }

    /// `Σ_k |f̂(k)|²` summed over components; equals the squared normalized L² norm.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest coefficient magnitude.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest violation of `f̂(-k) = conj f̂(k)` across components.
    pub fn hermitian_defect(&self) -> f64 {
        let len = self.grid.len();
        let mut worst = 0.0_f64;
        for c in 0..self.components {
            let comp = &self.coeffs[c * len..(c + 1) * len];
            for idx in 0..len {
                let j = self.grid.conjugate_index(idx);
                worst = worst.max((comp[j] - comp[idx].conj()).norm());
            }
        }
        worst
    }

    /// Project onto real-valued fields by averaging each mode with its conjugate partner.
    pub fn symmetrize(&mut self) {
        let len = self.grid.len();
        for c in 0..self.components {
            let comp = &mut self.coeffs[c * len..(c + 1) * len];
            for idx in 0..len {
                let j = self.grid.conjugate_index(idx);
                if j >= idx {
                    let avg = 0.5 * (comp[idx] + comp[j].conj());
                    comp[idx] = avg;
                    comp[j] = avg.conj();
                }
            }
        }
    }

    /// Inverse transform to point values.
    pub fn to_physical(&self) -> PhysicalField {
        transform_inverse(self)
    }

    /// Coefficient-wise maximum distance, scaled by the larger max coefficient.
    pub fn relative_distance(&self, other: &SpectralField) -> f64 {
        let diff = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let scale = self.max_abs_coeff().max(other.max_abs_coeff());
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;

    fn add(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;

    fn sub(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;

    fn mul(self, rhs: f64) -> SpectralField {
        self.scale(rhs)
    }
}

/// Forward transform of point values (component-major) into a spectral field.
pub fn transform_forward(grid: Grid, components: usize, values: &[f64]) -> Result<SpectralField> {
    let len = grid.len();
    if components == 0 || values.len() != components * len {
        return Err(Error::Config(format!(
            "expected {} point values for {components} components on n={}, got {}",
            components * len,
            grid.n(),
            values.len()
        )));
    }
    let plan = Fft2::for_size(grid.n());
    let norm = 1.0 / len as f64;
    let mut coeffs = vec![Complex64::default(); components * len];
    let mut c = 0;
    // Two real components share one complex transform.
    while c < components {
        let a = &values[c * len..(c + 1) * len];
        if c + 1 < components {
            let b = &values[(c + 1) * len..(c + 2) * len];
            let mut z: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| Complex64::new(*x, *y)).collect();
            plan.forward(&mut z);
            let (lo, hi) = coeffs.split_at_mut((c + 1) * len);
            let out_a = &mut lo[c * len..];
            let out_b = &mut hi[..len];
            for idx in 0..len {
                let zk = z[idx];
                let zm = z[grid.conjugate_index(idx)].conj();
                out_a[idx] = 0.5 * (zk + zm) * norm;
                out_b[idx] = Complex64::new(0.0, -0.5) * (zk - zm) * norm;
            }
            c += 2;
        } else {
            let mut z: Vec<Complex64> = a.iter().map(|x| Complex64::new(*x, 0.0)).collect();
            plan.forward(&mut z);
            for (o, zk) in coeffs[c * len..(c + 1) * len].iter_mut().zip(z) {
                *o = zk * norm;
            }
            c += 1;
        }
    }
    Ok(SpectralField { grid, components, coeffs, time: None })
}

/// Inverse transform; imaginary parts (nonzero only for non-Hermitian input) are dropped.
pub fn transform_inverse(field: &SpectralField) -> PhysicalField {
    let grid = field.grid;
    let len = grid.len();
    let plan = Fft2::for_size(grid.n());
    let mut values = vec![0.0; field.components * len];
    let mut c = 0;
    while c < field.components {
        let a = field.component(c);
        if c + 1 < field.components {
            let b = field.component(c + 1);
            let i = Complex64::new(0.0, 1.0);
            let mut z: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x + i * y).collect();
            plan.inverse(&mut z);
            for idx in 0..len {
                values[c * len + idx] = z[idx].re;
                values[(c + 1) * len + idx] = z[idx].im;
            }
            c += 2;
        } else {
            let mut z = a.to_vec();
            plan.inverse(&mut z);
            for (o, zk) in values[c * len..(c + 1) * len].iter_mut().zip(z) {
                *o = zk.re;
            }
            c += 1;
        }
    }
    PhysicalField { grid, components: field.components, values }
}

impl PhysicalField {
    pub fn to_spectral(&self) -> SpectralField {
        transform_forward(self.grid, self.components, &self.values)
            .expect("physical field has consistent size")
    }
}
