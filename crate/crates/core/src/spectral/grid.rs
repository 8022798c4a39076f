use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform collocation grid on the periodic square `[0, 2π)²`.
///
/// Wavenumbers follow the FFT-standard layout: index `i` carries wavenumber
/// `i` for `i <= n/2` and `i - n` otherwise, so the lattice is
/// `{-n/2+1, …, n/2}²` with the Nyquist frequency counted as positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub const DIMENSION: usize = 2;

    pub fn new(n: usize) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::Config(format!(
                "grid size must be a power of two >= 16, got {n}"
            )));
        }
        Ok(Self { n })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of lattice points `n²`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i <= n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Wavenumber used by odd-order derivatives. The Nyquist mode has no
    /// real-valued derivative on the grid and maps to zero.
    #[inline]
    pub fn derivative_wavenumber(&self, i: usize) -> f64 {
        if i == self.n / 2 {
            0.0
        } else {
            self.wavenumber(i) as f64
        }
    }

    /// Flat index of the lattice frequency `(k1, k2)`.
    #[inline]
    pub fn index_of(&self, k1: i64, k2: i64) -> usize {
        let n = self.n as i64;
        let i1 = k1.rem_euclid(n) as usize;
        let i2 = k2.rem_euclid(n) as usize;
        i1 * self.n + i2
    }

    /// Flat index of `-k` for the frequency stored at flat index `idx`.
    #[inline]
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let (i1, i2) = (idx / self.n, idx % self.n);
        ((self.n - i1) % self.n) * self.n + (self.n - i2) % self.n
    }

    #[inline]
    pub fn frequency(&self, idx: usize) -> (i64, i64) {
        (self.wavenumber(idx / self.n), self.wavenumber(idx % self.n))
    }

    /// Euclidean length of the frequency at flat index `idx`.
    #[inline]
    pub fn radius(&self, idx: usize) -> f64 {
        let (k1, k2) = self.frequency(idx);
        ((k1 * k1 + k2 * k2) as f64).sqrt()
    }

    /// Largest `|ξ|` present on the lattice, `n√2/2`.
    pub fn max_radius(&self) -> f64 {
        self.n as f64 * std::f64::consts::SQRT_2 / 2.0
    }

    /// Largest retained max-norm wavenumber under the 2/3 rule.
    #[inline]
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n / 3) as i64
    }

    /// Physical coordinate of collocation index `i` along either axis.
    #[inline]
    pub fn coordinate(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }
}

impl TryFrom<usize> for Grid {
    type Error = Error;

    fn try_from(n: usize) -> Result<Self> {
        Grid::new(n)
    }
}

impl From<Grid> for usize {
    fn from(g: Grid) -> usize {
        g.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(8).is_err());
        assert!(Grid::new(48).is_err());
        assert!(Grid::new(64).is_ok());
    }

    #[test]
    fn lattice_layout() {
        let g = Grid::new(16).unwrap();
        assert_eq!(g.wavenumber(0), 0);
        assert_eq!(g.wavenumber(8), 8);
        assert_eq!(g.wavenumber(9), -7);
        assert_eq!(g.wavenumber(15), -1);
        assert_eq!(g.derivative_wavenumber(8), 0.0);
        let idx = g.index_of(3, -2);
        assert_eq!(g.frequency(idx), (3, -2));
        assert_eq!(g.frequency(g.conjugate_index(idx)), (-3, 2));
        assert_eq!(g.dealias_cutoff(), 5);
    }
}
