//! Bivariate copula models: independence, Gaussian, and the nonparametric
//! transformation kernel estimator on a grid.
//!
//! The kernel estimator maps pseudo-observations to normal scores, applies a
//! bivariate Gaussian kernel with covariance `n^(-1/3) * Cor(normal scores)`,
//! and divides out the normal densities. Densities are stored on a grid over
//! the unit square whose nodes are the normal CDF of equally spaced points in
//! [-3.25, 3.25], so resolution concentrates near the corners. Evaluation is
//! bilinear interpolation; h-functions integrate the interpolant along one
//! axis and renormalize each conditional slice; inverses use bisection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::marginals::UNIT_CLAMP;
use crate::stats::{norm_pdf, norm_quantile};
use crate::vine::kendall_tau;

/// Nodes per axis of the density grid.
pub const GRID_M: usize = 30;

/// Normal-score half-width spanned by the grid.
pub const GRID_Z_MAX: f64 = 3.25;

const BISECT_MAX_ITER: usize = 200;
const BISECT_TOL: f64 = 1e-10;

// Post-normalization floor for kernel density grids. Keeps every conditional
// CDF strictly increasing with a slope bisection can resolve, so h-functions
// stay invertible even far from the data; adds at most 1e-4 probability mass.
const MIN_GRID_DENSITY: f64 = 1e-4;

/// Copula family selector for fitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CopulaFamily {
    Independence,
    Gaussian,
    TransformationKernel,
}

impl std::str::FromStr for CopulaFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "indep" | "independence" => Ok(CopulaFamily::Independence),
            "gaussian" => Ok(CopulaFamily::Gaussian),
            "tll" | "kernel" => Ok(CopulaFamily::TransformationKernel),
            other => Err(Error::Format(format!(
                "unknown copula family '{other}' (expected indep|gaussian|tll)"
            ))),
        }
    }
}

/// Density values on a grid over the unit square.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityGrid {
    nodes: Vec<f64>,
    /// Row-major: `values[i * m + j]` is the density at `(nodes[i], nodes[j])`.
    values: Vec<f64>,
}

/// A fitted bivariate copula.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum BivariateCopula {
    Independence,
    Gaussian { rho: f64 },
    TransformationKernel { grid: DensityGrid },
}

/// Gaussian-copula correlation from Kendall's tau.
pub fn rho_from_tau(tau: f64) -> f64 {
    (std::f64::consts::PI * tau / 2.0).sin()
}

fn check_unit_interval(u: &[f64]) -> Result<()> {
    for &v in u {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::Domain(format!(
                "copula arguments must lie strictly in (0,1), got {v}"
            )));
        }
    }
    Ok(())
}

/// Fit a bivariate copula of the given family to pseudo-observations.
pub fn fit(u: &[f64], v: &[f64], family: CopulaFamily) -> Result<BivariateCopula> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch(format!(
            "column lengths differ: {} vs {}",
            u.len(),
            v.len()
        )));
    }
    if u.len() < 30 {
        return Err(Error::DegenerateInput(format!(
            "need at least 30 observations to fit a pair copula, got {}",
            u.len()
        )));
    }
    check_unit_interval(u)?;
    check_unit_interval(v)?;

    match family {
        CopulaFamily::Independence => Ok(BivariateCopula::Independence),
        CopulaFamily::Gaussian => {
            let tau = kendall_tau(u, v)?;
            let mut rho = rho_from_tau(tau);
            if rho.abs() > 0.99 {
                log::warn!("near-monotone dependence (tau = {tau:.4}); clamping rho to ±0.99");
                rho = rho.clamp(-0.99, 0.99);
            }
            Ok(BivariateCopula::Gaussian { rho })
        }
        CopulaFamily::TransformationKernel => {
            Ok(BivariateCopula::TransformationKernel {
                grid: fit_kernel_grid(u, v),
            })
        }
    }
}

/// Standard grid nodes: normal CDF of equally spaced normal scores.
pub fn grid_nodes() -> Vec<f64> {
    (0..GRID_M)
        .map(|k| {
            let z = -GRID_Z_MAX + 2.0 * GRID_Z_MAX * k as f64 / (GRID_M - 1) as f64;
            crate::stats::norm_cdf(z)
        })
        .collect()
}

fn fit_kernel_grid(u: &[f64], v: &[f64]) -> DensityGrid {
    let n = u.len();
    let zu: Vec<f64> = u.iter().map(|&x| norm_quantile(x)).collect();
    let zv: Vec<f64> = v.iter().map(|&x| norm_quantile(x)).collect();

    let mu = zu.iter().sum::<f64>() / n as f64;
    let mv = zv.iter().sum::<f64>() / n as f64;
    let mut suu = 0.0;
    let mut svv = 0.0;
    let mut suv = 0.0;
    for i in 0..n {
        let du = zu[i] - mu;
        let dv = zv[i] - mv;
        suu += du * du;
        svv += dv * dv;
        suv += du * dv;
    }
    let r = (suv / (suu.sqrt() * svv.sqrt())).clamp(-0.999, 0.999);

    // Sigma = n^(-1/3) * [[1, r], [r, 1]], applied to normal scores.
    let b = (n as f64).powf(-1.0 / 3.0);
    let det = b * b * (1.0 - r * r);
    let norm_const = 1.0 / (2.0 * std::f64::consts::PI * det.sqrt());
    let inv_scale = 1.0 / (b * (1.0 - r * r));

    let nodes = grid_nodes();
    let zs: Vec<f64> = nodes.iter().map(|&p| norm_quantile(p)).collect();
    let mut values = vec![0.0; GRID_M * GRID_M];
    for i in 0..GRID_M {
        for j in 0..GRID_M {
            let (zi, zj) = (zs[i], zs[j]);
            let mut sum = 0.0;
            for k in 0..n {
                let dx = zi - zu[k];
                let dy = zj - zv[k];
                let q = (dx * dx - 2.0 * r * dx * dy + dy * dy) * inv_scale;
                sum += (-0.5 * q).exp();
            }
            values[i * GRID_M + j] =
                sum * norm_const / (n as f64 * norm_pdf(zi) * norm_pdf(zj));
        }
    }

    let mut grid = DensityGrid { nodes, values };
    grid.normalize();
    grid
}

impl DensityGrid {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn m(&self) -> usize {
        self.nodes.len()
    }

    // Rescale so the trapezoid integral over the unit square (with constant
    // extension beyond the node hull) is 1, then floor the values so
    // conditional CDFs stay strictly increasing.
    fn normalize(&mut self) {
        let total = self.unit_square_integral();
        if total > 0.0 {
            for v in self.values.iter_mut() {
                *v /= total;
            }
        }
        for v in self.values.iter_mut() {
            *v = v.max(MIN_GRID_DENSITY);
        }
    }

    /// Trapezoid integral of the interpolant over the whole unit square.
    pub fn unit_square_integral(&self) -> f64 {
        let xs = self.augmented_nodes();
        let m = self.m();
        let value_at = |ai: usize, aj: usize| -> f64 {
            let i = ai.saturating_sub(1).min(m - 1);
            let j = aj.saturating_sub(1).min(m - 1);
            self.values[i * m + j]
        };
        let mut total = 0.0;
        for ai in 0..xs.len() - 1 {
            for aj in 0..xs.len() - 1 {
                let cell = (xs[ai + 1] - xs[ai]) * (xs[aj + 1] - xs[aj]);
                let corners = value_at(ai, aj)
                    + value_at(ai + 1, aj)
                    + value_at(ai, aj + 1)
                    + value_at(ai + 1, aj + 1);
                total += 0.25 * cell * corners;
            }
        }
        total
    }

    fn augmented_nodes(&self) -> Vec<f64> {
        let mut xs = Vec::with_capacity(self.m() + 2);
        xs.push(0.0);
        xs.extend_from_slice(&self.nodes);
        xs.push(1.0);
        xs
    }

    /// Bilinear interpolation with constant extension beyond the node hull.
    pub fn interpolate(&self, u: f64, v: f64) -> f64 {
        let m = self.m();
        let x = u.clamp(self.nodes[0], self.nodes[m - 1]);
        let y = v.clamp(self.nodes[0], self.nodes[m - 1]);
        let i = segment_index(&self.nodes, x);
        let j = segment_index(&self.nodes, y);
        let (x0, x1) = (self.nodes[i], self.nodes[i + 1]);
        let (y0, y1) = (self.nodes[j], self.nodes[j + 1]);
        let tx = (x - x0) / (x1 - x0);
        let ty = (y - y0) / (y1 - y0);
        let v00 = self.values[i * m + j];
        let v01 = self.values[i * m + j + 1];
        let v10 = self.values[(i + 1) * m + j];
        let v11 = self.values[(i + 1) * m + j + 1];
        (1.0 - tx) * ((1.0 - ty) * v00 + ty * v01) + tx * ((1.0 - ty) * v10 + ty * v11)
    }

    // Density profile along one axis at a fixed value of the other, sampled
    // at the augmented nodes. `free_axis_first` selects whether the free
    // coordinate is the first argument.
    fn slice(&self, fixed: f64, free_axis_first: bool) -> ConditionalSlice {
        let xs = self.augmented_nodes();
        let vals: Vec<f64> = xs
            .iter()
            .map(|&t| {
                if free_axis_first {
                    self.interpolate(t, fixed)
                } else {
                    self.interpolate(fixed, t)
                }
            })
            .collect();
        let mut cum = vec![0.0; xs.len()];
        for k in 1..xs.len() {
            cum[k] = cum[k - 1] + 0.5 * (vals[k - 1] + vals[k]) * (xs[k] - xs[k - 1]);
        }
        ConditionalSlice { xs, vals, cum }
    }
}

fn segment_index(nodes: &[f64], x: f64) -> usize {
    let idx = nodes.partition_point(|&n| n <= x);
    idx.clamp(1, nodes.len() - 1) - 1
}

// A one-dimensional conditional density slice with its cumulative trapezoid
// integral; `cdf` is exact for the piecewise-linear density.
struct ConditionalSlice {
    xs: Vec<f64>,
    vals: Vec<f64>,
    cum: Vec<f64>,
}

impl ConditionalSlice {
    fn cdf(&self, t: f64) -> f64 {
        let total = *self.cum.last().unwrap();
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return 1.0;
        }
        let k = segment_index(&self.xs, t);
        let (x0, x1) = (self.xs[k], self.xs[k + 1]);
        let (v0, v1) = (self.vals[k], self.vals[k + 1]);
        let vt = v0 + (v1 - v0) * (t - x0) / (x1 - x0);
        (self.cum[k] + 0.5 * (v0 + vt) * (t - x0)) / total
    }
}

impl BivariateCopula {
    pub fn family(&self) -> CopulaFamily {
        match self {
            BivariateCopula::Independence => CopulaFamily::Independence,
            BivariateCopula::Gaussian { .. } => CopulaFamily::Gaussian,
            BivariateCopula::TransformationKernel { .. } => CopulaFamily::TransformationKernel,
        }
    }

    /// Copula density.
    pub fn pdf(&self, u: f64, v: f64) -> Result<f64> {
        check_unit_interval(&[u, v])?;
        Ok(self.pdf_unchecked(u, v))
    }

    pub(crate) fn pdf_unchecked(&self, u: f64, v: f64) -> f64 {
        match self {
            BivariateCopula::Independence => 1.0,
            BivariateCopula::Gaussian { rho } => {
                let r = *rho;
                let z1 = norm_quantile(u);
                let z2 = norm_quantile(v);
                let omr2 = 1.0 - r * r;
                let q = (r * r * (z1 * z1 + z2 * z2) - 2.0 * r * z1 * z2) / (2.0 * omr2);
                (-q).exp() / omr2.sqrt()
            }
            BivariateCopula::TransformationKernel { grid } => grid.interpolate(u, v),
        }
    }

    /// Conditional CDF (h-function). `which = 2` returns
    /// `P[U1 <= u1 | U2 = u2]`; `which = 1` the mirrored conditional
    /// `P[U2 <= u2 | U1 = u1]`.
    pub fn hfunc(&self, u1: f64, u2: f64, which: u8) -> Result<f64> {
        check_unit_interval(&[u1, u2])?;
        Ok(self.hfunc_unchecked(u1, u2, which))
    }

    pub(crate) fn hfunc_unchecked(&self, u1: f64, u2: f64, which: u8) -> f64 {
        debug_assert!(which == 1 || which == 2);
        match self {
            BivariateCopula::Independence => {
                if which == 2 {
                    u1
                } else {
                    u2
                }
            }
            BivariateCopula::Gaussian { rho } => {
                let (arg, cond) = if which == 2 { (u1, u2) } else { (u2, u1) };
                let z = norm_quantile(arg);
                let zc = norm_quantile(cond);
                crate::stats::norm_cdf((z - rho * zc) / (1.0 - rho * rho).sqrt())
            }
            BivariateCopula::TransformationKernel { grid } => {
                let (arg, cond) = if which == 2 { (u1, u2) } else { (u2, u1) };
                grid.slice(cond, which == 2).cdf(arg)
            }
        }
    }

    /// Inverse h-function: returns the conditioned value `x` such that the
    /// conditional CDF given `u_cond` equals `p`. For `which = 2` this solves
    /// `hfunc(x, u_cond, 2) = p`; for `which = 1` it solves
    /// `hfunc(u_cond, x, 1) = p`.
    pub fn hinv(&self, p: f64, u_cond: f64, which: u8) -> Result<f64> {
        check_unit_interval(&[p, u_cond])?;
        Ok(self.hinv_unchecked(p, u_cond, which))
    }

    pub(crate) fn hinv_unchecked(&self, p: f64, u_cond: f64, which: u8) -> f64 {
        match self {
            BivariateCopula::Independence => p,
            BivariateCopula::Gaussian { .. } => {
                // Bisection on the closed-form conditional.
                let f = |x: f64| self.hfunc_unchecked_oriented(x, u_cond, which);
                bisect_increasing(f, p)
            }
            BivariateCopula::TransformationKernel { grid } => {
                let slice = grid.slice(u_cond, which == 2);
                bisect_increasing(|x| slice.cdf(x), p)
            }
        }
    }

    // h-function with the conditioned argument first regardless of `which`.
    fn hfunc_unchecked_oriented(&self, x: f64, cond: f64, which: u8) -> f64 {
        if which == 2 {
            self.hfunc_unchecked(x, cond, 2)
        } else {
            self.hfunc_unchecked(cond, x, 1)
        }
    }

    /// Draw `n` pairs by conditional inversion: `u2` uniform, `u1` from the
    /// inverse h-function.
    pub fn simulate_pair(&self, n: usize, seed: u64) -> Vec<[f64; 2]> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let w1: f64 = rng.gen_range(UNIT_CLAMP..1.0 - UNIT_CLAMP);
            let w2: f64 = rng.gen_range(UNIT_CLAMP..1.0 - UNIT_CLAMP);
            let u2 = w2;
            let u1 = self.hinv_unchecked(w1, u2, 2);
            out.push([u1.clamp(UNIT_CLAMP, 1.0 - UNIT_CLAMP), u2]);
        }
        out
    }

    /// Log-likelihood of pseudo-observations, with the density floored at
    /// 1e-20 before taking logs.
    pub fn loglik(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "column lengths differ: {} vs {}",
                u.len(),
                v.len()
            )));
        }
        check_unit_interval(u)?;
        check_unit_interval(v)?;
        if matches!(self, BivariateCopula::Independence) {
            return Ok(0.0);
        }
        Ok(u.iter()
            .zip(v.iter())
            .map(|(&a, &b)| self.pdf_unchecked(a, b).max(1e-20).ln())
            .sum())
    }
}

// Bisection for a nondecreasing function on (0,1); returns the abscissa where
// `f` crosses `target`.
fn bisect_increasing(f: impl Fn(f64) -> f64, target: f64) -> f64 {
    let mut lo = UNIT_CLAMP;
    let mut hi = 1.0 - UNIT_CLAMP;
    if f(lo) >= target {
        return lo;
    }
    if f(hi) <= target {
        return hi;
    }
    for _ in 0..BISECT_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < BISECT_TOL {
            break;
        }
    }
    0.5 * (lo + hi)
}
