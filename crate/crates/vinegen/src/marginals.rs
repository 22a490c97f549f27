//! Univariate Gaussian-kernel marginals with CDF/quantile evaluators and the
//! probability-integral-transform layer.
//!
//! The CDF is a normalized trapezoid integral of the kernel density over a
//! fixed grid spanning the data range plus four bandwidths on each side;
//! quantiles invert that piecewise-linear CDF. PIT outputs are clamped away
//! from 0 and 1 so downstream normal-score transforms stay finite.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;

/// Grid resolution for the CDF/quantile tables.
pub const GRID_SIZE: usize = 512;

/// Clamp applied to PIT outputs and pseudo-observations.
pub const UNIT_CLAMP: f64 = 1e-10;

/// Fitted univariate kernel density with precomputed CDF grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelMarginal {
    sample_points: Vec<f64>,
    bandwidth: f64,
    grid: Vec<f64>,
    pdf_grid: Vec<f64>,
    cdf_grid: Vec<f64>,
}

/// Fit a Gaussian-kernel density to `x`.
///
/// The default bandwidth is the normal-reference rule
/// `1.06 * min(sd, iqr/1.34) * n^(-1/5)`; pass `bandwidth` to override.
pub fn fit_marginal(x: &[f64], bandwidth: Option<f64>) -> Result<KernelMarginal> {
    if x.len() < 10 {
        return Err(Error::DegenerateInput(format!(
            "need at least 10 observations to fit a marginal, got {}",
            x.len()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite value in marginal input".into()));
    }
    let sd = stats::sample_sd(x);
    if sd == 0.0 {
        return Err(Error::DegenerateInput(
            "constant column: zero sample variance".into(),
        ));
    }
    let h = match bandwidth {
        Some(h) if h > 0.0 => h,
        Some(h) => {
            return Err(Error::Domain(format!("bandwidth must be positive, got {h}")));
        }
        None => {
            let iqr = stats::quantile(x, 0.75) - stats::quantile(x, 0.25);
            let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
            1.06 * spread * (x.len() as f64).powf(-0.2)
        }
    };

    let lo = x.iter().cloned().fold(f64::INFINITY, f64::min) - 4.0 * h;
    let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 4.0 * h;
    let step = (hi - lo) / (GRID_SIZE - 1) as f64;
    let grid: Vec<f64> = (0..GRID_SIZE).map(|i| lo + step * i as f64).collect();
    let pdf_grid: Vec<f64> = grid.iter().map(|&g| kde_pdf(x, h, g)).collect();

    // Cumulative trapezoid, rescaled so the last entry is exactly 1.
    let mut cdf_grid = vec![0.0; GRID_SIZE];
    for i in 1..GRID_SIZE {
        cdf_grid[i] =
            cdf_grid[i - 1] + 0.5 * (pdf_grid[i - 1] + pdf_grid[i]) * (grid[i] - grid[i - 1]);
    }
    let total = cdf_grid[GRID_SIZE - 1];
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::Numeric("kernel density integrated to zero".into()));
    }
    for c in cdf_grid.iter_mut() {
        *c /= total;
    }

    Ok(KernelMarginal {
        sample_points: x.to_vec(),
        bandwidth: h,
        grid,
        pdf_grid,
        cdf_grid,
    })
}

fn kde_pdf(x: &[f64], h: f64, at: f64) -> f64 {
    let sum: f64 = x.iter().map(|&xi| stats::norm_pdf((at - xi) / h)).sum();
    sum / (h * x.len() as f64)
}

impl KernelMarginal {
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn cdf_grid(&self) -> &[f64] {
        &self.cdf_grid
    }

    /// Kernel density estimate at `at` (exact sum over the sample).
    pub fn pdf(&self, at: f64) -> f64 {
        kde_pdf(&self.sample_points, self.bandwidth, at)
    }

    /// Log density, floored to keep it finite far from the data.
    pub fn log_pdf(&self, at: f64) -> f64 {
        self.pdf(at).max(1e-300).ln()
    }

    /// Estimated CDF by linear interpolation on the grid; clamps to [0,1]
    /// outside the grid span.
    pub fn cdf(&self, at: f64) -> f64 {
        let n = self.grid.len();
        if at <= self.grid[0] {
            return 0.0;
        }
        if at >= self.grid[n - 1] {
            return 1.0;
        }
        let idx = match self
            .grid
            .binary_search_by(|g| g.partial_cmp(&at).unwrap())
        {
            Ok(i) => return self.cdf_grid[i],
            Err(i) => i,
        };
        let (x0, x1) = (self.grid[idx - 1], self.grid[idx]);
        let (c0, c1) = (self.cdf_grid[idx - 1], self.cdf_grid[idx]);
        c0 + (c1 - c0) * (at - x0) / (x1 - x0)
    }

    /// Quantile by inverting the piecewise-linear CDF.
    pub fn quantile(&self, q: f64) -> f64 {
        let n = self.grid.len();
        if q <= 0.0 {
            return self.grid[0];
        }
        if q >= 1.0 {
            return self.grid[n - 1];
        }
        // First index with cdf >= q.
        let idx = self.cdf_grid.partition_point(|&c| c < q);
        if idx == 0 {
            return self.grid[0];
        }
        let (c0, c1) = (self.cdf_grid[idx - 1], self.cdf_grid[idx]);
        let (x0, x1) = (self.grid[idx - 1], self.grid[idx]);
        if c1 <= c0 {
            return x0;
        }
        x0 + (x1 - x0) * (q - c0) / (c1 - c0)
    }

    /// Probability integral transform, clamped to stay inside (0,1).
    pub fn pit(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .map(|&v| self.cdf(v).clamp(UNIT_CLAMP, 1.0 - UNIT_CLAMP))
            .collect()
    }

    /// Inverse probability integral transform; inputs must lie strictly in
    /// (0,1).
    pub fn inverse_pit(&self, u: &[f64]) -> Result<Vec<f64>> {
        for &v in u {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Domain(format!(
                    "inverse_pit requires u in (0,1), got {v}"
                )));
            }
        }
        Ok(u.iter().map(|&v| self.quantile(v)).collect())
    }
}
