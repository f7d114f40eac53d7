//! Empirical check that the truncated Gibbs measure is carried to itself by the flow.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::integrator::{IntegratorConfig, LowModeFlow};
use crate::error::{domain, Result};
use crate::gibbs::{importance_batch, weighted_estimate, GibbsTarget, Observable};
use crate::model::WickModel;
use crate::scalar::Real;

/// Two-sample Kolmogorov–Smirnov distance between weighted empirical distributions.
/// Weights need not be normalized.
pub fn weighted_ks_distance(a: &[f64], wa: &[f64], b: &[f64], wb: &[f64]) -> f64 {
    let mut pooled: Vec<(f64, bool, f64)> = a
        .iter()
        .zip(wa)
        .map(|(&x, &w)| (x, true, w))
        .chain(b.iter().zip(wb).map(|(&x, &w)| (x, false, w)))
        .collect();
    pooled.sort_by(|p, q| p.0.total_cmp(&q.0));
    let order: Vec<f64> = pooled.iter().map(|p| p.0).collect();
    let labels: Vec<bool> = pooled.iter().map(|p| p.1).collect();
    let weights: Vec<f64> = pooled.iter().map(|p| p.2).collect();
    ks_sorted(&order, &labels, &weights)
}

fn ks_sorted(values: &[f64], in_a: &[bool], weights: &[f64]) -> f64 {
    let (mut ta, mut tb) = (0.0, 0.0);
    for (&l, &w) in in_a.iter().zip(weights) {
        if l {
            ta += w;
        } else {
            tb += w;
        }
    }
    if !(ta > 0.0 && tb > 0.0) {
        return 0.0;
    }
    let (mut fa, mut fb, mut d) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..values.len() {
        if in_a[i] {
            fa += weights[i] / ta;
        } else {
            fb += weights[i] / tb;
        }
        let tie_follows = i + 1 < values.len() && values[i + 1] == values[i];
        if !tie_follows {
            d = d.max((fa - fb).abs());
        }
    }
    d
}

/// Weighted KS distance with a label-permutation p-value; every point keeps its
/// weight under relabelling.
pub fn ks_permutation_test(
    a: &[f64],
    wa: &[f64],
    b: &[f64],
    wb: &[f64],
    permutations: usize,
    seed: u64,
) -> (f64, f64) {
    let mut pooled: Vec<(f64, bool, f64)> = a
        .iter()
        .zip(wa)
        .map(|(&x, &w)| (x, true, w))
        .chain(b.iter().zip(wb).map(|(&x, &w)| (x, false, w)))
        .collect();
    pooled.sort_by(|p, q| p.0.total_cmp(&q.0));
    let values: Vec<f64> = pooled.iter().map(|p| p.0).collect();
    let mut labels: Vec<bool> = pooled.iter().map(|p| p.1).collect();
    let weights: Vec<f64> = pooled.iter().map(|p| p.2).collect();
    let observed = ks_sorted(&values, &labels, &weights);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut exceed = 0usize;
    let tol = 1e-12 * observed.max(1e-300);
    for _ in 0..permutations {
        labels.shuffle(&mut rng);
        if ks_sorted(&values, &labels, &weights) >= observed - tol {
            exceed += 1;
        }
    }
    (observed, (1 + exceed) as f64 / (1 + permutations) as f64)
}

/// Pre/post comparison of one observable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservableComparison {
    pub name: String,
    pub pre_mean: f64,
    pub pre_stderr: f64,
    pub post_mean: f64,
    pub post_stderr: f64,
    /// `√(pre_stderr² + post_stderr²)`.
    pub joint_stderr: f64,
    pub ks_distance: f64,
    pub p_value: f64,
}

impl ObservableComparison {
    /// `|post − pre|` in units of the joint standard error.
    pub fn z_score(&self) -> f64 {
        let d = (self.post_mean - self.pre_mean).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.joint_stderr
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    pub m: usize,
    pub n: u32,
    pub basis: &'static str,
    pub t_final: f64,
    pub samples: usize,
    pub ess: f64,
    pub coupling: f64,
    pub permutations: usize,
    pub observables: Vec<ObservableComparison>,
    pub nelson_violations: usize,
}

impl InvarianceReport {
    pub fn to_json(&self) -> Value {
        let obs: Vec<Value> = self
            .observables
            .iter()
            .map(|o| {
                json!({
                    "name": o.name,
                    "mean": o.post_mean,
                    "stderr": o.post_stderr,
                    "pre_mean": o.pre_mean,
                    "pre_stderr": o.pre_stderr,
                    "joint_stderr": o.joint_stderr,
                    "ks_distance": o.ks_distance,
                    "p_value": o.p_value,
                })
            })
            .collect();
        let mut v = json!({
            "m": self.m,
            "N": self.n,
            "sampler": "importance",
            "n": self.samples,
            "ess": self.ess,
            "t": self.t_final,
            "coupling": self.coupling,
            "permutations": self.permutations,
            "observables": obs,
            "nelson_violations": self.nelson_violations,
        });
        if self.basis != "torus" {
            v["basis"] = json!(self.basis);
        }
        v
    }
}

/// Draws `n_samples` weighted samples of `exp(−κ G_N) dμ_N`, evolves each to
/// `t_final`, and compares weighted means and weighted KS distances of `observables`
/// before and after.
#[allow(clippy::too_many_arguments)]
pub fn invariance_experiment<T: Real, M: WickModel<T> + ?Sized>(
    target: GibbsTarget<'_, M>,
    cutoff: u32,
    t_final: f64,
    n_samples: usize,
    observables: &[Observable],
    seed: u64,
    config: &IntegratorConfig,
    permutations: usize,
) -> Result<InvarianceReport> {
    if n_samples < 1000 {
        return domain(format!("need at least 1000 samples, got {n_samples}"));
    }
    let model = target.model;
    let batch = importance_batch::<T, M>(target, n_samples, seed, observables, true)?;
    let weights = batch.weights()?;
    let flow = LowModeFlow::new(model);
    let post: Vec<Vec<f64>> = batch
        .fields
        .par_iter()
        .map(|low| -> Result<Vec<f64>> {
            let (y, _) = flow.integrate(low, t_final, config, |_, _| {})?;
            let g = model.energy(&y);
            Ok(observables
                .iter()
                .map(|o| o.evaluate(model, &y, Some(g)).to_f64_lossy())
                .collect())
        })
        .collect::<Result<_>>()?;

    let mut comparisons = Vec::new();
    for (k, name) in batch.names.iter().enumerate() {
        let pre_vals = &batch.values[k];
        let post_vals: Vec<f64> = post.iter().map(|row| row[k]).collect();
        let pre = weighted_estimate(pre_vals, &weights);
        let po = weighted_estimate(&post_vals, &weights);
        let (ks, p) = ks_permutation_test(
            pre_vals,
            &weights,
            &post_vals,
            &weights,
            permutations,
            seed ^ (0x6b73 + k as u64),
        );
        comparisons.push(ObservableComparison {
            name: name.clone(),
            pre_mean: pre.mean,
            pre_stderr: pre.stderr,
            post_mean: po.mean,
            post_stderr: po.stderr,
            joint_stderr: (pre.stderr.powi(2) + po.stderr.powi(2)).sqrt(),
            ks_distance: ks,
            p_value: p,
        });
    }
    Ok(InvarianceReport {
        m: model.order(),
        n: cutoff,
        basis: model.basis_name(),
        t_final,
        samples: n_samples,
        ess: batch.weight_ess()?,
        coupling: target.coupling,
        permutations,
        observables: comparisons,
        nelson_violations: batch.nelson_violations,
    })
}
