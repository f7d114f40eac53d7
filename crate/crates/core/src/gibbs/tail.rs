//! Empirical tail of `p |G_M − G_N|` under the free field.

use rayon::prelude::*;
use serde::Serialize;

use super::stats::wilson_interval;
use crate::error::{domain, Result};
use crate::scalar::Real;
use crate::torus_field::{derive_seed, sample_gff};
use crate::wick_functionals::WickEvaluator;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailRow {
    pub lambda: f64,
    pub probability: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Survival function `λ ↦ P(p |G_M − G_N| > λ)` with 95% Wilson bands.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailCurve {
    pub m: usize,
    pub n: u32,
    pub big_m: u32,
    pub samples: usize,
    pub rows: Vec<TailRow>,
}

/// Samples `|G_M − G_N|` for `n_samples` free-field draws of cutoff `M`.
pub fn tail_samples<T: Real>(m: usize, n: u32, big_m: u32, n_samples: usize, seed: u64) -> Result<Vec<f64>> {
    if big_m < n {
        return domain(format!("need M ≥ N, got N = {n}, M = {big_m}"));
    }
    let em = WickEvaluator::<T>::new(m, big_m)?;
    let en = WickEvaluator::<T>::new(m, n)?;
    Ok((0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let f = sample_gff::<T>(derive_seed(seed, i), big_m);
            let gm = em.energy(f.coeffs());
            let gn = en.energy_of(&f).expect("nested cutoff");
            (gm - gn).abs().to_f64_lossy()
        })
        .collect())
}

pub fn tail_curve<T: Real>(
    m: usize,
    n: u32,
    big_m: u32,
    n_samples: usize,
    p: f64,
    seed: u64,
    lambdas: &[f64],
) -> Result<TailCurve> {
    if !(p >= 1.0) {
        return domain(format!("p must be at least 1, got {p}"));
    }
    let mut d = tail_samples::<T>(m, n, big_m, n_samples, seed)?;
    for x in d.iter_mut() {
        *x *= p;
    }
    d.sort_by(|a, b| a.total_cmp(b));
    let rows = lambdas
        .iter()
        .map(|&lambda| {
            let k = d.len() - d.partition_point(|&x| x <= lambda);
            let (lower, upper) = wilson_interval(k, d.len(), 1.959964);
            TailRow {
                lambda,
                probability: k as f64 / d.len() as f64,
                lower,
                upper,
            }
        })
        .collect();
    Ok(TailCurve {
        m,
        n,
        big_m,
        samples: d.len(),
        rows,
    })
}
