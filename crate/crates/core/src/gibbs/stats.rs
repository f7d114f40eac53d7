//! Weighted and autocorrelated sample summaries.

use serde::Serialize;

/// Mean, standard error and effective sample size of one observable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub ess: f64,
}

fn pairwise(xs: &[f64]) -> f64 {
    if xs.len() <= 64 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise(&xs[..mid]) + pairwise(&xs[mid..])
}

/// Normalized weights `exp(lw_i − max)/Σ` from log-weights.
pub fn normalized_weights(log_weights: &[f64]) -> Option<Vec<f64>> {
    let max = log_weights
        .iter()
        .copied()
        .filter(|x| x.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return None;
    }
    let w: Vec<f64> = log_weights
        .iter()
        .map(|&l| if l.is_finite() { (l - max).exp() } else { 0.0 })
        .collect();
    let total = pairwise(&w);
    if !(total > 0.0) {
        return None;
    }
    Some(w.into_iter().map(|x| x / total).collect())
}

/// `log Σ exp(lw_i)`.
pub fn log_sum_exp(log_weights: &[f64]) -> f64 {
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let terms: Vec<f64> = log_weights.iter().map(|&l| (l - max).exp()).collect();
    max + pairwise(&terms).ln()
}

/// Self-normalized importance estimate with delta-method standard error.
pub fn weighted_estimate(values: &[f64], weights: &[f64]) -> Estimate {
    let terms: Vec<f64> = values.iter().zip(weights).map(|(v, w)| v * w).collect();
    let mean = pairwise(&terms);
    let sq: Vec<f64> = values
        .iter()
        .zip(weights)
        .map(|(v, w)| (w * (v - mean)).powi(2))
        .collect();
    let w2: Vec<f64> = weights.iter().map(|w| w * w).collect();
    Estimate {
        mean,
        stderr: pairwise(&sq).sqrt(),
        ess: 1.0 / pairwise(&w2),
    }
}

/// Integrated autocorrelation time by Geyer's initial positive sequence.
pub fn autocorrelation_time(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 4 {
        return 1.0;
    }
    let mean = pairwise(values) / n as f64;
    let c: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let var = pairwise(&c.iter().map(|x| x * x).collect::<Vec<_>>()) / n as f64;
    if !(var > 0.0) {
        return 1.0;
    }
    let rho = |k: usize| -> f64 {
        let s: f64 = (0..n - k).map(|i| c[i] * c[i + k]).sum();
        s / (n as f64 * var)
    };
    let mut tau = -1.0;
    let mut k = 0;
    let mut prev_pair = f64::INFINITY;
    while k + 1 < n {
        let mut pair = rho(k) + rho(k + 1);
        if pair <= 0.0 {
            break;
        }
        pair = pair.min(prev_pair);
        tau += 2.0 * pair;
        prev_pair = pair;
        k += 2;
    }
    tau.max(1.0)
}

/// Estimate for an autocorrelated chain.
pub fn chain_estimate(values: &[f64]) -> Estimate {
    let n = values.len() as f64;
    let mean = pairwise(values) / n;
    let var = pairwise(&values.iter().map(|v| (v - mean).powi(2)).collect::<Vec<_>>())
        / (n - 1.0).max(1.0);
    let ess = n / autocorrelation_time(values);
    Estimate {
        mean,
        stderr: (var / ess).sqrt(),
        ess,
    }
}

/// Estimate for independent, equally weighted samples.
pub fn iid_estimate(values: &[f64]) -> Estimate {
    let n = values.len() as f64;
    let mean = pairwise(values) / n;
    let var = pairwise(&values.iter().map(|v| (v - mean).powi(2)).collect::<Vec<_>>())
        / (n - 1.0).max(1.0);
    Estimate {
        mean,
        stderr: (var / n).sqrt(),
        ess: n,
    }
}

/// Wilson score interval for `k` successes out of `n` at normal quantile `z`.
pub fn wilson_interval(k: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k >= n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}
