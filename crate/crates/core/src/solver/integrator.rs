use crate::error::Result;
use crate::spectral::{laplacian_symbol, Grid, SpectralField};

/// Exact viscous propagators `e^{-ε|k|²h}` and `e^{-ε|k|²h/2}`.
pub(crate) struct IntegratingFactor {
    full: Vec<f64>,
    half: Vec<f64>,
}

impl IntegratingFactor {
    pub fn new(grid: Grid, epsilon: f64, h: f64) -> Self {
        let sym = laplacian_symbol(grid);
        Self {
            full: sym.iter().map(|l| (epsilon * l * h).exp()).collect(),
            half: sym.iter().map(|l| (epsilon * l * h / 2.0).exp()).collect(),
        }
    }
}

fn scale_in_place(f: &mut SpectralField, m: &[f64]) {
    let len = m.len();
    for c in 0..f.components() {
        for (z, w) in f.coeffs_mut()[c * len..(c + 1) * len].iter_mut().zip(m) {
            *z *= *w;
        }
    }
}

/// One Lawson (integrating-factor) RK4 step for `u' = -ε|k|²u + N(u, t)`.
/// `rhs` returns `N` and the advecting speed at the stage; the speed of the
/// first stage is returned alongside the new state.
pub(crate) fn lawson_rk4<F>(u: &SpectralField, t: f64, h: f64, ifac: &IntegratingFactor, mut rhs: F) -> Result<(SpectralField, f64)>
where
    F: FnMut(&SpectralField, f64) -> Result<(SpectralField, f64)>,
{
    let (k1, speed) = rhs(u, t)?;

    let mut stage = u.clone();
    stage.axpy(h / 2.0, &k1);
    scale_in_place(&mut stage, &ifac.half);
    let (k2, _) = rhs(&stage, t + h / 2.0)?;

    let mut eu_half = u.clone();
    scale_in_place(&mut eu_half, &ifac.half);
    let mut stage = eu_half;
    stage.axpy(h / 2.0, &k2);
    let (k3, _) = rhs(&stage, t + h / 2.0)?;

    let mut eu = u.clone();
    scale_in_place(&mut eu, &ifac.full);
    let mut stage = k3.clone();
    scale_in_place(&mut stage, &ifac.half);
    let mut k4_in = eu;
    k4_in.axpy(h, &stage);
    let (k4, _) = rhs(&k4_in, t + h)?;

    // u_{n+1} = E(u + h/6 k1) + h/3 E½(k2 + k3) + h/6 k4
    let mut next = u.clone();
    next.axpy(h / 6.0, &k1);
    scale_in_place(&mut next, &ifac.full);
    let mut mid = k2;
    mid.axpy(1.0, &k3);
    scale_in_place(&mut mid, &ifac.half);
    next.axpy(h / 3.0, &mid);
    next.axpy(h / 6.0, &k4);
    Ok((next, speed))
}
