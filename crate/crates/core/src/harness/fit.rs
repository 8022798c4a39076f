//! Least-squares rates in log-log coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Straight-line fit of `log₁₀ y` against `log₁₀ x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    /// `log₁₀ x` of the points used.
    pub abscissae: Vec<f64>,
    /// `log₁₀ y` of the points used.
    pub ordinates: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// RMS deviation from the line, in decades.
    pub residual: f64,
    /// Inclusive `x` range the points were drawn from.
    pub window: [f64; 2],
}

impl RateFit {
    pub fn points(&self) -> usize {
        self.abscissae.len()
    }

    /// Fitted `y` at `x`.
    pub fn predict(&self, x: f64) -> f64 {
        10f64.powf(self.intercept + self.slope * x.log10())
    }
}

/// Fit the points whose `x` lies in `window` (all points when `None`).
pub fn fit_rate(points: &[(f64, f64)], window: Option<[f64; 2]>) -> Result<RateFit> {
    let window = window.unwrap_or([0.0, f64::INFINITY]);
    let used: Vec<(f64, f64)> = points.iter().copied().filter(|(x, _)| *x >= window[0] && *x <= window[1]).collect();
    if used.len() < 3 {
        return Err(Error::InsufficientPoints(used.len()));
    }
    if let Some((x, y)) = used.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(Error::Config(format!("rate fit needs positive finite points, got ({x}, {y})")));
    }
    let xs: Vec<f64> = used.iter().map(|p| p.0.log10()).collect();
    let ys: Vec<f64> = used.iter().map(|p| p.1.log10()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Config("rate fit needs at least two distinct abscissae".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum::<f64>() / m).sqrt();
    Ok(RateFit { abscissae: xs, ordinates: ys, slope, intercept, residual, window })
}

/// Fit only the points with `y >= floor`; the window becomes their `x` range.
pub fn fit_rate_above(points: &[(f64, f64)], floor: f64) -> Result<RateFit> {
    let kept: Vec<(f64, f64)> = points.iter().copied().filter(|(_, y)| *y >= floor).collect();
    let lo = kept.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = kept.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    if kept.len() < 3 {
        return Err(Error::InsufficientPoints(kept.len()));
    }
    fit_rate(&kept, Some([lo, hi]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws() {
        let pts: Vec<(f64, f64)> = [0.1, 0.2, 0.5, 1.0].iter().map(|&x| (x, 3.0 * x)).collect();
        let f = fit_rate(&pts, None).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-12);
        assert!((f.predict(0.3) - 0.9).abs() < 1e-12);
        let pts: Vec<(f64, f64)> = (0..=10).map(|i| 10f64.powf(i as f64 / 10.0)).map(|x| (x, x * x)).collect();
        let f = fit_rate(&pts, None).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn window_excludes_floor() {
        let pts: Vec<(f64, f64)> = (0..=40).map(|i| 10f64.powf(-(i as f64) / 4.0)).map(|x| (x, x + 1e-8)).collect();
        let f = fit_rate(&pts, Some([1e-5, 1.0])).unwrap();
        assert!((0.95..=1.05).contains(&f.slope), "{}", f.slope);
        let g = fit_rate_above(&pts, 10.0 * 1e-8).unwrap();
        assert!((0.95..=1.05).contains(&g.slope), "{}", g.slope);
        let all = fit_rate(&pts, None).unwrap();
        assert!(all.slope < 0.95);
    }

    #[test]
    fn errors() {
        assert!(matches!(fit_rate(&[(1.0, 1.0), (2.0, 2.0)], None), Err(Error::InsufficientPoints(2))));
        assert!(matches!(fit_rate(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)], Some([1.5, 9.0])), Err(Error::InsufficientPoints(2))));
        assert!(fit_rate(&[(1.0, 1.0), (2.0, 0.0), (3.0, 3.0)], None).is_err());
        assert!(matches!(fit_rate_above(&[(1.0, 1e-20), (2.0, 2.0), (3.0, 3.0)], 1e-10), Err(Error::InsufficientPoints(2))));
    }
}
