//! Batch-means error bars, jackknife for ratios, two-sample KS, weighted
//! least squares in log coordinates.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("need at least {need} samples to form {batches} batches, got {got}")]
    TooFewSamples { need: usize, batches: usize, got: usize },
    #[error("fit needs at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("fit inputs must be positive and finite")]
    NonPositiveFit,
}

/// Mean and batch-means standard error of one scalar stream.
/// Replicas are split into `batches` contiguous blocks in replica order,
/// so the reduction is associative and bit-exact for any worker layout.
pub fn batch_mean_stderr(values: &[f64], batches: usize) -> Result<(f64, f64), StatsError> {
    let n = values.len();
    if batches < 16 || n < batches {
        return Err(StatsError::TooFewSamples { need: batches.max(16), batches, got: n });
    }
    let means = batch_means(values, batches);
    let grand = values.iter().sum::<f64>() / n as f64;
    Ok((grand, stderr_of_batch_means(&means)))
}

pub fn batch_means(values: &[f64], batches: usize) -> Vec<f64> {
    let n = values.len();
    let base = n / batches;
    let extra = n % batches;
    let mut out = Vec::with_capacity(batches);
    let mut idx = 0;
    for b in 0..batches {
        let len = base + usize::from(b < extra);
        let sum: f64 = values[idx..idx + len].iter().sum();
        out.push(sum / len as f64);
        idx += len;
    }
    out
}

pub fn stderr_of_batch_means(means: &[f64]) -> f64 {
    let b = means.len() as f64;
    let m = means.iter().sum::<f64>() / b;
    let var = means.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (b - 1.0);
    (var / b).sqrt()
}

/// Jackknife point estimate and stderr of a statistic of batch means.
/// `stat` maps a slice of per-batch mean vectors to the statistic value.
pub fn jackknife<F>(batch_rows: &[Vec<f64>], stat: F) -> (f64, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let b = batch_rows.len();
    let k = batch_rows[0].len();
    let totals: Vec<f64> = (0..k).map(|j| batch_rows.iter().map(|r| r[j]).sum()).collect();
    let full: Vec<f64> = totals.iter().map(|t| t / b as f64).collect();
    let theta = stat(&full);
    let mut loo = Vec::with_capacity(b);
    for row in batch_rows {
        let means: Vec<f64> =
            (0..k).map(|j| (totals[j] - row[j]) / (b as f64 - 1.0)).collect();
        loo.push(stat(&means));
    }
    let loo_mean = loo.iter().sum::<f64>() / b as f64;
    let var = loo.iter().map(|x| (x - loo_mean) * (x - loo_mean)).sum::<f64>()
        * (b as f64 - 1.0)
        / b as f64;
    (theta, var.sqrt())
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(|p, q| p.partial_cmp(q).unwrap());
    xb.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (na, nb) = (xa.len(), xb.len());
    let (mut i, mut j, mut d) = (0usize, 0usize, 0f64);
    while i < na && j < nb {
        let x = xa[i].min(xb[j]);
        while i < na && xa[i] <= x {
            i += 1;
        }
        while j < nb && xb[j] <= x {
            j += 1;
        }
        let diff = (i as f64 / na as f64 - j as f64 / nb as f64).abs();
        if diff > d {
            d = diff;
        }
    }
    d
}

/// Critical KS distance at significance `level` (asymptotic formula).
pub fn ks_critical(na: usize, nb: usize, level: f64) -> f64 {
    let c = (-0.5 * (level / 2.0).ln()).sqrt();
    c * ((na + nb) as f64 / (na as f64 * nb as f64)).sqrt()
}

/// Weighted least squares for `y = a + b x` with known per-point sigma.
/// Returns `(a, b, sigma_a, sigma_b)`; parameter errors propagate the input
/// sigmas through `(X^T W X)^{-1}`.
pub fn wls_line(x: &[f64], y: &[f64], sigma: &[f64]) -> (f64, f64, f64, f64) {
    let mut s = 0.0;
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..x.len() {
        let w = 1.0 / (sigma[i] * sigma[i]);
        s += w;
        sx += w * x[i];
        sy += w * y[i];
        sxx += w * x[i] * x[i];
        sxy += w * x[i] * y[i];
    }
    let det = s * sxx - sx * sx;
    let a = (sxx * sy - sx * sxy) / det;
    let b = (s * sxy - sx * sy) / det;
    (a, b, (sxx / det).sqrt(), (s / det).sqrt())
}
