//! Two-sample and density-based evaluation: maximum mean discrepancy,
//! highest-density-region coverage, mean log-likelihood, and a
//! nearest-neighbor classifier two-sample test.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Results of an evaluation run; only the metrics actually computed are set.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct EvalReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mmd: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_loglik: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c2st_accuracy: Option<f64>,
    pub n_a: usize,
    pub n_b: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn check_same_dim(x: &[Vec<f64>], y: &[Vec<f64>]) -> Result<usize> {
    let d = x.first().map(|r| r.len()).unwrap_or(0);
    if x.iter().chain(y.iter()).any(|r| r.len() != d) {
        return Err(Error::DimensionMismatch(
            "samples must share one dimension".into(),
        ));
    }
    Ok(d)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&p, &q)| (p - q) * (p - q)).sum()
}

/// Maximum mean discrepancy with a Gaussian kernel: the square root of the
/// biased V-statistic estimate of squared MMD. The kernel bandwidth defaults
/// to the median pairwise distance of the pooled sample.
pub fn mmd(x: &[Vec<f64>], y: &[Vec<f64>], bandwidth: Option<f64>) -> Result<f64> {
    check_same_dim(x, y)?;
    if x.len() < 2 || y.len() < 2 {
        return Err(Error::DegenerateInput("mmd needs at least 2 points per sample".into()));
    }
    // Canonical argument order makes the float summation order, and hence
    // the result, exactly symmetric in (x, y).
    let swap = match x.len().cmp(&y.len()) {
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Equal => {
            let xf = x.iter().flatten();
            let yf = y.iter().flatten();
            xf.partial_cmp(yf) == Some(std::cmp::Ordering::Greater)
        }
    };
    let (x, y) = if swap { (y, x) } else { (x, y) };

    let sigma = match bandwidth {
        Some(b) if b > 0.0 => b,
        Some(b) => return Err(Error::Domain(format!("bandwidth must be positive, got {b}"))),
        None => median_pooled_distance(x, y),
    };
    let gamma = 1.0 / (2.0 * sigma * sigma).max(1e-300);

    let kernel_sum = |a: &[Vec<f64>], b: &[Vec<f64>]| -> f64 {
        a.par_iter()
            .map(|ra| {
                b.iter()
                    .map(|rb| (-gamma * sq_dist(ra, rb)).exp())
                    .sum::<f64>()
            })
            .collect::<Vec<f64>>()
            .iter()
            .sum()
    };
    let (n, m) = (x.len() as f64, y.len() as f64);
    let sxx = kernel_sum(x, x) / (n * n);
    let syy = kernel_sum(y, y) / (m * m);
    let sxy = kernel_sum(x, y) / (n * m);
    Ok((sxx + syy - 2.0 * sxy).max(0.0).sqrt())
}

// Exact median of all pairwise distances in the pooled sample.
fn median_pooled_distance(x: &[Vec<f64>], y: &[Vec<f64>]) -> f64 {
    let pooled: Vec<&Vec<f64>> = x.iter().chain(y.iter()).collect();
    let n = pooled.len();
    let pooled = &pooled;
    let mut dists: Vec<f64> = (0..n - 1)
        .into_par_iter()
        .flat_map_iter(|i| {
            let pi = pooled[i];
            (i + 1..n).map(move |j| sq_dist(pi, pooled[j]).sqrt())
        })
        .collect();
    let mid = dists.len() / 2;
    let (_, med, _) = dists.select_nth_unstable_by(mid, |a, b| a.partial_cmp(b).unwrap());
    (*med).max(1e-12)
}

/// Fraction of `data` falling inside the model's alpha-level
/// highest-density region, with the region threshold calibrated on
/// `model_sample`: t is chosen so a fraction alpha of the model's own
/// sample has density above t.
pub fn coverage<F: Fn(&[f64]) -> f64>(
    model_logpdf: F,
    data: &[Vec<f64>],
    model_sample: &[Vec<f64>],
    alpha: f64,
) -> Result<f64> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must be in (0,1), got {alpha}")));
    }
    if data.is_empty() || model_sample.is_empty() {
        return Err(Error::DegenerateInput("coverage needs nonempty samples".into()));
    }
    let mut model_ld: Vec<f64> = model_sample.iter().map(|r| model_logpdf(r)).collect();
    model_ld.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = ((1.0 - alpha) * model_ld.len() as f64).floor() as usize;
    let t = model_ld[k.min(model_ld.len() - 1)];
    let hits = data.iter().filter(|r| model_logpdf(r) > t).count();
    Ok(hits as f64 / data.len() as f64)
}

/// Mean log-likelihood of `data` under a log-density evaluator.
pub fn mean_loglik<F: Fn(&[f64]) -> f64>(model_logpdf: F, data: &[Vec<f64>]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::DegenerateInput("mean_loglik needs nonempty data".into()));
    }
    Ok(data.iter().map(|r| model_logpdf(r)).sum::<f64>() / data.len() as f64)
}

/// Classifier two-sample test with a 1-nearest-neighbor classifier: label
/// the samples 0 and 1, split 50/50, and return held-out accuracy. An
/// accuracy near 0.5 means the samples are indistinguishable.
pub fn c2st(x: &[Vec<f64>], y: &[Vec<f64>], seed: u64) -> Result<f64> {
    use rand::{Rng, SeedableRng};
    check_same_dim(x, y)?;
    let n = x.len().min(y.len());
    if n < 20 {
        return Err(Error::DegenerateInput(format!(
            "c2st needs at least 20 points per sample, got {n}"
        )));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut pick = |len: usize| -> Vec<usize> {
        let mut idx: Vec<usize> = (0..len).collect();
        for i in (1..len).rev() {
            let j = rng.gen_range(0..=i);
            idx.swap(i, j);
        }
        idx.truncate(n);
        idx
    };
    let xi = pick(x.len());
    let yi = pick(y.len());

    // First half of each shuffled class trains, the second half tests.
    let half = n / 2;
    let mut train: Vec<(&Vec<f64>, u8)> = Vec::with_capacity(2 * half);
    let mut test: Vec<(&Vec<f64>, u8)> = Vec::with_capacity(2 * (n - half));
    for (ids, rows, lab) in [(&xi, x, 0u8), (&yi, y, 1u8)] {
        for (pos, &i) in ids.iter().enumerate() {
            if pos < half {
                train.push((&rows[i], lab));
            } else {
                test.push((&rows[i], lab));
            }
        }
    }

    let correct: usize = test
        .par_iter()
        .map(|(row, lab)| {
            let mut best = (f64::INFINITY, 0u8);
            for (tr, tl) in &train {
                let d = sq_dist(row, tr);
                if d < best.0 {
                    best = (d, *tl);
                }
            }
            usize::from(best.1 == *lab)
        })
        .sum();
    Ok(correct as f64 / test.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn normal2d(n: usize, seed: u64, shift: f64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                vec![
                    crate::stats::norm_quantile(rng.gen_range(1e-12..1.0 - 1e-12)) + shift,
                    crate::stats::norm_quantile(rng.gen_range(1e-12..1.0 - 1e-12)) + shift,
                ]
            })
            .collect()
    }

    #[test]
    fn mmd_zero_on_identical_and_small_under_null() {
        let x = normal2d(400, 1, 0.0);
        assert_eq!(mmd(&x, &x, None).unwrap(), 0.0);

        let y = normal2d(1000, 2, 0.0);
        let x = normal2d(1000, 3, 0.0);
        let v = mmd(&x, &y, None).unwrap();
        assert!(v < 0.05, "null mmd = {v}");
    }

    #[test]
    fn mmd_symmetric_and_sensitive() {
        let x = normal2d(300, 4, 0.0);
        let y = normal2d(500, 5, 1.5);
        let a = mmd(&x, &y, None).unwrap();
        let b = mmd(&y, &x, None).unwrap();
        assert_eq!(a, b);
        assert!(a > 0.2, "shifted mmd = {a}");
        // Fixed bandwidth path.
        let c = mmd(&x, &y, Some(1.0)).unwrap();
        assert!(c > 0.0);
        assert!(mmd(&x, &y, Some(-1.0)).is_err());
        assert!(mmd(&x, &vec![vec![0.0; 3]; 5], None).is_err());
    }

    #[test]
    fn coverage_of_true_model() {
        let logpdf = |r: &[f64]| -> f64 {
            -0.5 * (r[0] * r[0] + r[1] * r[1]) - (2.0 * std::f64::consts::PI).ln()
        };
        let data = normal2d(2000, 6, 0.0);
        let model_sample = normal2d(2000, 7, 0.0);
        let c = coverage(logpdf, &data, &model_sample, 0.95).unwrap();
        assert!((0.92..=0.98).contains(&c), "coverage = {c}");

        // Disjoint supports: data far away from the model mass.
        let far = normal2d(500, 8, 50.0);
        let c = coverage(logpdf, &far, &model_sample, 0.95).unwrap();
        assert!(c < 0.02, "coverage = {c}");
    }

    #[test]
    fn coverage_monotone_in_alpha() {
        let logpdf = |r: &[f64]| -> f64 { -0.5 * (r[0] * r[0] + r[1] * r[1]) };
        let data = normal2d(500, 9, 0.5);
        let sample = normal2d(800, 10, 0.0);
        let mut prev = 0.0;
        for alpha in [0.5, 0.7, 0.9, 0.95, 0.99] {
            let c = coverage(logpdf, &data, &sample, alpha).unwrap();
            assert!(c >= prev, "coverage not monotone at alpha={alpha}");
            prev = c;
        }
    }

    #[test]
    fn mean_loglik_of_uniform_independence() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let data: Vec<Vec<f64>> = (0..500)
            .map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()])
            .collect();
        // Independence with exact U[0,1] marginals has density one.
        let v = mean_loglik(|_| 0.0, &data).unwrap();
        assert!(v.abs() < 0.02);
    }

    #[test]
    fn c2st_null_disjoint_and_duplicate() {
        let x = normal2d(1000, 12, 0.0);
        let y = normal2d(1000, 13, 0.0);
        let acc = c2st(&x, &y, 1).unwrap();
        assert!((0.45..=0.55).contains(&acc), "null accuracy = {acc}");

        let far = normal2d(1000, 14, 25.0);
        let acc = c2st(&x, &far, 2).unwrap();
        assert!(acc > 0.95, "disjoint accuracy = {acc}");

        let acc = c2st(&x, &x.clone(), 3).unwrap();
        assert!(acc <= 0.55, "duplicate accuracy = {acc}");

        assert!(c2st(&x[..10], &y, 4).is_err());
    }

    #[test]
    fn c2st_null_calibration_over_seeds() {
        let x = normal2d(600, 15, 0.0);
        let y = normal2d(600, 16, 0.0);
        let mean: f64 = (0..20)
            .map(|s| c2st(&x, &y, s).unwrap())
            .sum::<f64>()
            / 20.0;
        assert!((mean - 0.5).abs() < 0.05, "mean accuracy = {mean}");
    }
}
