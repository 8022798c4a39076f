//! Random divergence-free fields with a prescribed dyadic block profile.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::littlewood_paley::{BesovIndex, DyadicFilterBank};
use crate::spectral::{leray_project_in_place, Grid, SpectralField};

/// Target values of `2^{js}‖Δ_j u‖_p` per block.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralProfile {
    /// `2^{js}‖Δ_j u‖_p = 2^{-2j}`, i.e. amplitudes `2^{-j(s+2)}`.
    Smooth,
    /// `2^{js}‖Δ_j u‖_p = (1 + j)^{-2}` (`j = -1` uses the `j = 0` value).
    Borderline,
    /// A single nonzero block `j₀`.
    SingleBlock(i32),
}

impl SpectralProfile {
    pub fn target(&self, j: i32) -> f64 {
        match *self {
            SpectralProfile::Smooth => 2f64.powi(-2 * j),
            SpectralProfile::Borderline => (1.0 + j.max(0) as f64).powi(-2),
            SpectralProfile::SingleBlock(j0) => {
                if j == j0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Seed, profile and scale of a synthesized datum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSpec {
    pub seed: u64,
    pub profile: SpectralProfile,
    /// Multiplies every block target.
    #[serde(default = "one")]
    pub amplitude: f64,
    /// Restrict to blocks `<= max_block` exactly (band-limited data).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_block: Option<i32>,
}

fn one() -> f64 {
    1.0
}

impl DataSpec {
    pub fn new(seed: u64, profile: SpectralProfile) -> Self {
        Self { seed, profile, amplitude: 1.0, max_block: None }
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn with_max_block(mut self, max_block: i32) -> Self {
        self.max_block = Some(max_block);
        self
    }
}

/// Counter-based stream `job` of the generator seeded by `seed`.
pub fn job_rng(seed: u64, job: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(job);
    rng
}

/// Relative tolerance on each realized block value.
pub const PROFILE_TOLERANCE: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Solenoidal,
    Scalar,
}

/// Largest `j` such that every mode seen by blocks `<= j` survives dealiasing.
/// Data beyond it would be cut by the 2/3 rule.
pub fn resolved_top(grid: Grid) -> i32 {
    let cutoff = grid.dealias_cutoff() as f64;
    let mut j = -1;
    while ((crate::littlewood_paley::CHI_OUTER * 2f64.powi(j + 2)).ceil() - 1.0) <= cutoff {
        j += 1;
    }
    j
}

/// Divergence-free field whose weighted blocks `2^{js}‖Δ_j u‖_p` follow
/// `spec.profile` (times `spec.amplitude`) within 5%.
pub fn synthesize_besov_data(grid: Grid, idx: &BesovIndex, spec: &DataSpec) -> Result<SpectralField> {
    synthesize(grid, idx, spec, FieldKind::Solenoidal, &mut job_rng(spec.seed, 0))
}

/// As [`synthesize_besov_data`] but drawing from a caller-provided stream and
/// optionally producing a scalar field.
pub fn synthesize(grid: Grid, idx: &BesovIndex, spec: &DataSpec, kind: FieldKind, rng: &mut ChaCha8Rng) -> Result<SpectralField> {
    let bank = DyadicFilterBank::for_grid(grid);
    let top = spec.max_block.map_or(resolved_top(grid), |m| m.min(resolved_top(grid)));
    if let SpectralProfile::SingleBlock(j0) = spec.profile {
        if j0 < -1 || j0 > bank.j_max() {
            return Err(Error::Infeasible(format!(
                "block {j0} outside -1..={} on n={}",
                bank.j_max(),
                grid.n()
            )));
        }
    }
    let cutoff = grid.dealias_cutoff();
    let len = grid.len();
    let blocks: Vec<i32> = bank.block_indices().collect();

    // Candidate modes and their home block.
    let mut home = vec![None; len];
    for (i, slot) in home.iter_mut().enumerate() {
        let (k1, k2) = grid.frequency(i);
        if (k1, k2) == (0, 0) || k1.abs() > cutoff || k2.abs() > cutoff {
            continue;
        }
        let weights: Vec<f64> = blocks.iter().map(|&j| bank.profile(j).unwrap()[i]).collect();
        let (best, _) = weights
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (b, &w)| if w > acc.1 { (b, w) } else { acc });
        let j = blocks[best];
        // Plateau modes only, so each block is controlled by its own group.
        let keep = weights[best] == 1.0
            && j <= top
            && match spec.profile {
                SpectralProfile::SingleBlock(j0) => j == j0,
                _ => spec.profile.target(j) > 0.0,
            };
        if keep {
            *slot = Some(j);
        }
    }
    if home.iter().all(Option::is_none) {
        return Err(Error::Infeasible(format!("profile {:?} has no admissible modes on n={}", spec.profile, grid.n())));
    }

    // Random stream function on the candidate modes, then u = ∇^⊥ψ / |k|.
    let comps = match kind {
        FieldKind::Solenoidal => 2,
        FieldKind::Scalar => 1,
    };
    let mut psi = SpectralField::zeros(grid, 1);
    for (i, h) in home.iter().enumerate() {
        // Draw for every lattice site so the stream layout is independent of the profile.
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        if h.is_some() {
            psi.coeffs_mut()[i] = Complex64::new(re, im);
        }
    }
    psi.symmetrize();
    let mut u = SpectralField::zeros(grid, comps);
    for i in 0..len {
        if home[i].is_none() {
            continue;
        }
        let z = psi.coeffs()[i];
        match kind {
            FieldKind::Scalar => u.coeffs_mut()[i] = z,
            FieldKind::Solenoidal => {
                let k1 = grid.derivative_wavenumber(i / grid.n());
                let k2 = grid.derivative_wavenumber(i % grid.n());
                let k = (k1 * k1 + k2 * k2).sqrt();
                u.coeffs_mut()[i] = Complex64::new(0.0, k2 / k) * z;
                u.coeffs_mut()[len + i] = Complex64::new(0.0, -k1 / k) * z;
            }
        }
    }

    // Rescale each home group until the realized block values hit their targets.
    let target = |j: i32| spec.amplitude * spec.profile.target(j);
    let populated: Vec<bool> = blocks.iter().map(|&j| home.iter().any(|h| *h == Some(j))).collect();
    for _ in 0..60 {
        let realized = bank.weighted_blocks(&u, idx.s, idx.p)?;
        let mut worst = 0.0_f64;
        let mut factors = vec![1.0; blocks.len()];
        for (b, &(j, value)) in realized.iter().enumerate() {
            if !populated[b] || value == 0.0 {
                continue;
            }
            let goal = target(j);
            factors[b] = goal / value;
            worst = worst.max((value / goal - 1.0).abs());
        }
        if worst <= PROFILE_TOLERANCE / 5.0 {
            break;
        }
        for (i, h) in home.iter().enumerate() {
            if let Some(j) = h {
                let f = factors[(j + 1) as usize];
                for c in 0..comps {
                    u.coeffs_mut()[c * len + i] *= f;
                }
            }
        }
    }
    if kind == FieldKind::Solenoidal {
        leray_project_in_place(&mut u)?;
    }
    Ok(u)
}
