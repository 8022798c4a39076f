//! Dyadic partition of unity on the frequency lattice, the block operators
//! `Δ_j` and `S_N`, and the Besov and Lipschitz norms built from them.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{jacobian, lp_norm, Grid, LpExponent, SpectralField};

/// Plateau radius: `χ ≡ 1` for `|ξ| <= 5/4`.
pub const CHI_INNER: f64 = 5.0 / 4.0;
/// Support radius: `χ ≡ 0` for `|ξ| >= 4/3`.
pub const CHI_OUTER: f64 = 4.0 / 3.0;

fn smooth_q(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// The radial cut-off `χ(t)`: 1 on `[0, 5/4]`, 0 on `[4/3, ∞)`, and the
/// `C^∞` step `h((4/3 - t) / (4/3 - 5/4))` in between, with
/// `h(x) = q(x) / (q(x) + q(1 - x))`, `q(x) = e^{-1/x}`.
pub fn chi(t: f64) -> f64 {
    if t <= CHI_INNER {
        1.0
    } else if t >= CHI_OUTER {
        0.0
    } else {
        let x = (CHI_OUTER - t) / (CHI_OUTER - CHI_INNER);
        let a = smooth_q(x);
        a / (a + smooth_q(1.0 - x))
    }
}

/// `φ(ξ) = χ(ξ/2) - χ(ξ)`.
pub fn phi(t: f64) -> f64 {
    chi(t / 2.0) - chi(t)
}

/// Multiplier of `Δ_j` at radius `t`.
pub fn block_profile(j: i32, t: f64) -> f64 {
    match j {
        j if j <= -2 => 0.0,
        -1 => chi(t),
        j => {
            let scale = 2f64.powi(-j);
            chi(t * scale / 2.0) - chi(t * scale)
        }
    }
}

/// Largest block index with a ring that can reach the lattice:
/// `⌈log₂((n√2/2) / (3/4))⌉`.
pub fn max_block(grid: Grid) -> i32 {
    (grid.max_radius() / 0.75).log2().ceil() as i32
}

#[derive(Debug)]
struct Block {
    /// Dense multiplier over the lattice.
    profile: Vec<f64>,
    /// Lattice indices where the multiplier is nonzero, with weights.
    support: Vec<(usize, f64)>,
}

/// Precomputed multipliers `χ(ξ)` and `φ(2^{-j}ξ)` for `j = -1..=j_max`.
#[derive(Debug)]
pub struct DyadicFilterBank {
    grid: Grid,
    j_max: i32,
    blocks: Vec<Block>,
}

impl DyadicFilterBank {
    pub fn build(grid: Grid) -> Self {
        let j_max = max_block(grid);
        let radii: Vec<f64> = (0..grid.len()).map(|idx| grid.radius(idx)).collect();
        let blocks = (-1..=j_max)
            .map(|j| {
                let profile: Vec<f64> = radii.iter().map(|&t| block_profile(j, t)).collect();
                let support = profile
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| **w != 0.0)
                    .map(|(i, w)| (i, *w))
                    .collect();
                Block { profile, support }
            })
            .collect();
        Self { grid, j_max, blocks }
    }

    /// Shared bank for `grid`.
    pub fn for_grid(grid: Grid) -> Arc<DyadicFilterBank> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<DyadicFilterBank>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().expect("filter bank cache poisoned");
        map.entry(grid.n()).or_insert_with(|| Arc::new(Self::build(grid))).clone()
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.grid
    }

    #[inline]
    pub fn j_min(&self) -> i32 {
        -1
    }

    #[inline]
    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn block_indices(&self) -> impl Iterator<Item = i32> {
        -1..=self.j_max
    }

    /// Multiplier of `Δ_j` on the lattice, `None` when the block is empty by definition.
    pub fn profile(&self, j: i32) -> Option<&[f64]> {
        if j < -1 || j > self.j_max {
            None
        } else {
            Some(&self.blocks[(j + 1) as usize].profile)
        }
    }

    pub fn support(&self, j: i32) -> &[(usize, f64)] {
        if j < -1 || j > self.j_max {
            &[]
        } else {
            &self.blocks[(j + 1) as usize].support
        }
    }

    /// Multiplier of `S_N`, i.e. `χ(2^{-N}ξ)`.
    pub fn low_pass_profile(&self, n_cut: i32) -> Vec<f64> {
        let scale = 2f64.powi(-n_cut);
        (0..self.grid.len()).map(|idx| chi(self.grid.radius(idx) * scale)).collect()
    }

    fn expect_grid(&self, u: &SpectralField) -> Result<()> {
        u.expect_grid(self.grid)
    }

    /// `Δ_j u`.
    pub fn dyadic_block(&self, u: &SpectralField, j: i32) -> Result<SpectralField> {
        self.expect_grid(u)?;
        Ok(match self.profile(j) {
            Some(m) => u.apply_multiplier(m),
            None => SpectralField::zeros(u.grid(), u.components()),
        })
    }

    /// `S_N u`.
    pub fn low_pass(&self, u: &SpectralField, n_cut: i32) -> Result<SpectralField> {
        self.expect_grid(u)?;
        if n_cut < 0 {
            return Err(Error::Config(format!("low-pass level must be >= 0, got {n_cut}")));
        }
        Ok(u.apply_multiplier(&self.low_pass_profile(n_cut)))
    }

    /// `‖Δ_j u‖_{L^p}` for every block `j = -1..=j_max`.
    pub fn block_norms(&self, u: &SpectralField, p: LpExponent) -> Result<Vec<f64>> {
        self.expect_grid(u)?;
        let len = self.grid.len();
        Ok(self
            .block_indices()
            .map(|j| {
                let support = self.support(j);
                if support.is_empty() {
                    return 0.0;
                }
                if p == LpExponent::Finite(2.0) {
                    // Parseval on the block support.
                    let mut sum = 0.0;
                    for c in 0..u.components() {
                        let comp = &u.coeffs()[c * len..(c + 1) * len];
                        for &(idx, w) in support {
                            sum += w * w * comp[idx].norm_sqr();
                        }
                    }
                    sum.sqrt()
                } else {
                    lp_norm(&u.apply_multiplier(self.profile(j).unwrap()), p)
                }
            })
            .collect())
    }

    /// Weighted block profile `(j, 2^{js}‖Δ_j u‖_{L^p})`.
    pub fn weighted_blocks(&self, u: &SpectralField, s: f64, p: LpExponent) -> Result<Vec<(i32, f64)>> {
        let norms = self.block_norms(u, p)?;
        Ok(self
            .block_indices()
            .zip(norms)
            .map(|(j, v)| (j, 2f64.powf(j as f64 * s) * v))
            .collect())
    }

    /// `‖u‖_{B^s_{p,r}}` aggregated over the finite block range.
    pub fn besov_norm(&self, u: &SpectralField, idx: &BesovIndex) -> Result<f64> {
        let blocks = self.weighted_blocks(u, idx.s, idx.p)?;
        Ok(sequence_norm(blocks.iter().map(|(_, v)| *v), idx.r))
    }

    /// Besov norms at several regularities sharing one set of block norms.
    pub fn besov_norms(&self, u: &SpectralField, p: LpExponent, r: LpExponent, regularities: &[f64]) -> Result<Vec<f64>> {
        let norms = self.block_norms(u, p)?;
        Ok(regularities
            .iter()
            .map(|&s| {
                sequence_norm(
                    self.block_indices().zip(&norms).map(|(j, v)| 2f64.powf(j as f64 * s) * v),
                    r,
                )
            })
            .collect())
    }
}

/// `ℓ^r` norm of a finite nonnegative sequence.
pub fn sequence_norm<I: IntoIterator<Item = f64>>(values: I, r: LpExponent) -> f64 {
    match r {
        LpExponent::Infinity => values.into_iter().fold(0.0, f64::max),
        LpExponent::Finite(r) if r == 1.0 => values.into_iter().sum(),
        LpExponent::Finite(r) if r == 2.0 => values.into_iter().map(|v| v * v).sum::<f64>().sqrt(),
        LpExponent::Finite(r) => values.into_iter().map(|v| v.powf(r)).sum::<f64>().powf(1.0 / r),
    }
}

/// Besov index `(s, p, r)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovIndex {
    pub s: f64,
    pub p: LpExponent,
    pub r: LpExponent,
}

impl BesovIndex {
    pub fn new(s: f64, p: LpExponent, r: LpExponent) -> Self {
        Self { s, p, r }
    }

    /// Finite-exponent shorthand.
    pub fn finite(s: f64, p: f64, r: f64) -> Result<Self> {
        Ok(Self { s, p: LpExponent::new(p)?, r: LpExponent::new(r)? })
    }

    pub fn with_s(self, s: f64) -> Self {
        Self { s, ..self }
    }

    /// Critical regularity `d/p + 1`.
    pub fn critical_s(&self) -> f64 {
        Grid::DIMENSION as f64 * self.p.reciprocal() + 1.0
    }

    /// Well-posedness range: `s > d/p + 1` with `r ∈ (1, ∞)`, or `s = d/p + 1` with `r = 1`.
    pub fn is_admissible(&self) -> bool {
        let crit = self.critical_s();
        let r = self.r.value();
        if (self.s - crit).abs() <= 1e-12 {
            r == 1.0
        } else {
            self.s > crit && r > 1.0 && r.is_finite()
        }
    }

    pub fn require_admissible(&self) -> Result<()> {
        if self.is_admissible() {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "index {self} is outside the well-posedness range (s > d/p+1 with 1 < r < inf, or s = d/p+1 with r = 1)"
            )))
        }
    }
}

impl fmt::Display for BesovIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(s={}, p={}, r={})", self.s, self.p, self.r)
    }
}

/// `‖u‖_{C^{0,1}} = ‖u‖_{L^∞} + ‖∇u‖_{L^∞}` on the collocation grid.
pub fn lipschitz_norm(u: &SpectralField) -> Result<f64> {
    Ok(lp_norm(u, LpExponent::Infinity) + lp_norm(&jacobian(u)?, LpExponent::Infinity))
}

/// `Δ_j u` using the shared bank for `u`'s grid.
pub fn dyadic_block(u: &SpectralField, j: i32) -> Result<SpectralField> {
    DyadicFilterBank::for_grid(u.grid()).dyadic_block(u, j)
}

/// `S_N u` using the shared bank for `u`'s grid.
pub fn low_pass(u: &SpectralField, n_cut: i32) -> Result<SpectralField> {
    DyadicFilterBank::for_grid(u.grid()).low_pass(u, n_cut)
}

/// `‖u‖_{B^s_{p,r}}` using the shared bank for `u`'s grid.
pub fn besov_norm(u: &SpectralField, idx: &BesovIndex) -> Result<f64> {
    DyadicFilterBank::for_grid(u.grid()).besov_norm(u, idx)
}
