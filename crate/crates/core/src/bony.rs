//! Bony decomposition `uv = T_u v + T_v u + R(u, v)` for scalar fields.
//!
//! `S_q` is the `χ(2^{-q}·)` multiplier for `q >= 0` and zero for `q <= -1`,
//! so `S_{j-1} = Σ_{j' <= j-2} Δ_{j'}` for every `j`. Every physical-space
//! product is dealiased with the 2/3 rule.

use crate::error::Result;
use crate::littlewood_paley::DyadicFilterBank;
use crate::spectral::{dealias_in_place, transform_forward, Grid, SpectralField};

/// Physical-space block decomposition of a scalar field.
struct Blocks {
    j_max: i32,
    /// `Δ_j u` for `j = -1..=j_max`.
    blocks: Vec<Vec<f64>>,
}

impl Blocks {
    fn new(bank: &DyadicFilterBank, u: &SpectralField) -> Result<Self> {
        u.expect_components(1)?;
        let parts: Vec<SpectralField> = bank
            .block_indices()
            .map(|j| bank.dyadic_block(u, j))
            .collect::<Result<_>>()?;
        // Two blocks per complex transform.
        let stacked = SpectralField::stack(&parts)?.to_physical();
        let blocks = (0..parts.len()).map(|i| stacked.component(i).to_vec()).collect();
        Ok(Self { j_max: bank.j_max(), blocks })
    }

    fn block(&self, j: i32) -> Option<&[f64]> {
        if j < -1 || j > self.j_max {
            None
        } else {
            Some(&self.blocks[(j + 1) as usize])
        }
    }

    /// `S_q` in physical space as the partial block sum.
    fn low(&self, q: i32) -> Vec<f64> {
        let len = self.blocks[0].len();
        let mut out = vec![0.0; len];
        for j in -1..q.min(self.j_max + 1) {
            for (o, b) in out.iter_mut().zip(self.block(j).unwrap()) {
                *o += b;
            }
        }
        out
    }
}

fn finish(grid: Grid, values: &[f64]) -> Result<SpectralField> {
    let mut out = transform_forward(grid, 1, values)?;
    dealias_in_place(&mut out);
    Ok(out)
}

fn accumulate_product(acc: &mut [f64], a: &[f64], b: &[f64]) {
    for ((o, x), y) in acc.iter_mut().zip(a).zip(b) {
        *o += x * y;
    }
}

fn paraproduct_values(u: &Blocks, v: &Blocks) -> Vec<f64> {
    let len = u.blocks[0].len();
    let mut acc = vec![0.0; len];
    for j in 1..=v.j_max {
        let low = u.low(j - 1);
        accumulate_product(&mut acc, &low, v.block(j).unwrap());
    }
    acc
}

fn remainder_values(u: &Blocks, v: &Blocks) -> Vec<f64> {
    let len = u.blocks[0].len();
    let mut acc = vec![0.0; len];
    for j in -1..=u.j_max {
        let uj = u.block(j).unwrap();
        for k in (j - 1)..=(j + 1) {
            if let Some(vk) = v.block(k) {
                accumulate_product(&mut acc, uj, vk);
            }
        }
    }
    acc
}

/// `T_u v = Σ_j S_{j-1}u Δ_j v`.
pub fn paraproduct(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    u.expect_compatible(v)?;
    let bank = DyadicFilterBank::for_grid(u.grid());
    let (bu, bv) = (Blocks::new(&bank, u)?, Blocks::new(&bank, v)?);
    finish(u.grid(), &paraproduct_values(&bu, &bv))
}

/// `R(u, v) = Σ_j Σ_{|k-j| <= 1} Δ_j u Δ_k v`.
pub fn remainder(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    u.expect_compatible(v)?;
    let bank = DyadicFilterBank::for_grid(u.grid());
    let (bu, bv) = (Blocks::new(&bank, u)?, Blocks::new(&bank, v)?);
    finish(u.grid(), &remainder_values(&bu, &bv))
}

/// The three Bony terms of a product.
#[derive(Clone, Debug)]
pub struct BonyTerms {
    pub t_uv: SpectralField,
    pub t_vu: SpectralField,
    pub remainder: SpectralField,
}

impl BonyTerms {
    pub fn sum(&self) -> SpectralField {
        let mut s = &self.t_uv + &self.t_vu;
        s.axpy(1.0, &self.remainder);
        s
    }
}

pub fn decompose(u: &SpectralField, v: &SpectralField) -> Result<BonyTerms> {
    u.expect_compatible(v)?;
    let bank = DyadicFilterBank::for_grid(u.grid());
    let (bu, bv) = (Blocks::new(&bank, u)?, Blocks::new(&bank, v)?);
    Ok(BonyTerms {
        t_uv: finish(u.grid(), &paraproduct_values(&bu, &bv))?,
        t_vu: finish(u.grid(), &paraproduct_values(&bv, &bu))?,
        remainder: finish(u.grid(), &remainder_values(&bu, &bv))?,
    })
}

/// `T_u v + T_v u + R(u, v)`.
pub fn bony_reconstruct(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    Ok(decompose(u, v)?.sum())
}

/// Dealiased pointwise product, the reference for [`bony_reconstruct`].
pub fn dealiased_product(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    crate::spectral::multiply(u, v)
}

/// The single paraproduct term `S_{j-1}u Δ_j v`.
pub fn paraproduct_term(u: &SpectralField, v: &SpectralField, j: i32) -> Result<SpectralField> {
    u.expect_compatible(v)?;
    let bank = DyadicFilterBank::for_grid(u.grid());
    let (bu, bv) = (Blocks::new(&bank, u)?, Blocks::new(&bank, v)?);
    let len = u.grid().len();
    let mut acc = vec![0.0; len];
    if let Some(vj) = bv.block(j) {
        if j >= 1 {
            accumulate_product(&mut acc, &bu.low(j - 1), vj);
        }
    }
    finish(u.grid(), &acc)
}
