//! Gibbs density `R_N = exp(−G_N)`, Nelson bounds, tail curves, and two samplers of the
//! truncated Gibbs measure: self-normalized importance sampling from the free field
//! and a preconditioned Crank–Nicolson chain.

mod stats;
mod tail;

pub use stats::{
    autocorrelation_time, chain_estimate, iid_estimate, log_sum_exp, normalized_weights,
    weighted_estimate, wilson_interval, Estimate,
};
pub use tail::{tail_curve, TailCurve, TailRow};

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{domain, Error, Result};
use crate::model::{kinetic, mass, WickModel};
use crate::scalar::Real;
use crate::torus_field::{derive_seed, SpectralField};
use crate::wick_functionals::WickEvaluator;
use crate::wickpoly::{generalized_laguerre, laguerre};

fn factorial(k: usize) -> f64 {
    (2..=k).map(|j| j as f64).product()
}

fn signed_laguerre(m: usize, t: f64) -> f64 {
    let l = laguerre(m, t);
    if m.is_multiple_of(2) {
        l
    } else {
        -l
    }
}

/// Critical points of `L_m` on `[0, ∞)`, i.e. the roots of `L^{(1)}_{m−1}`.
pub fn laguerre_critical_points(m: usize) -> Vec<f64> {
    if m < 2 {
        return Vec::new();
    }
    let k = m - 1;
    let upper = 4.0 * k as f64 + 12.0;
    let steps = 4000 * m;
    let f = |t: f64| generalized_laguerre(k, 1, t);
    let mut roots = Vec::new();
    let mut a = 0.0;
    let mut fa = f(a);
    for i in 1..=steps {
        let b = upper * i as f64 / steps as f64;
        let fb = f(b);
        if fa == 0.0 {
            roots.push(a);
        } else if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm == 0.0 || hi - lo < 1e-15 * hi.max(1.0) {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (fm < 0.0) == (flo < 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    roots
}

/// `a_m = −min_{t ≥ 0} (−1)^m L_m(t)`.
pub fn nelson_constant(m: usize) -> f64 {
    let mut min = signed_laguerre(m, 0.0);
    for t in laguerre_critical_points(m) {
        min = min.min(signed_laguerre(m, t));
    }
    -min
}

/// Pointwise lower bound on the Wick energy: `−G_N ≤ (m!/2m) a_m ∫ σ_N^m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NelsonBound {
    pub order: usize,
    pub a_m: f64,
}

impl NelsonBound {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return domain("Wick order must be at least 1");
        }
        Ok(Self {
            order: m,
            a_m: nelson_constant(m),
        })
    }

    /// Bound for a constant variance `σ` on a unit-measure space.
    pub fn bound_value(&self, sigma: f64) -> f64 {
        self.from_moment(sigma.powi(self.order as i32))
    }

    /// Bound from `∫ σ_N(x)^m dx`.
    pub fn from_moment(&self, moment: f64) -> f64 {
        factorial(self.order) / (2 * self.order) as f64 * self.a_m * moment
    }

    pub fn for_model<T: Real, M: WickModel<T> + ?Sized>(&self, model: &M) -> f64 {
        self.from_moment(model.variance_moment(self.order).to_f64_lossy())
    }
}

/// `R_N(u) = exp(−G_N(u))`.
pub fn density_weight<T: Real>(field: &SpectralField<T>, cutoff: u32, m: usize) -> Result<T> {
    let ev = WickEvaluator::<T>::new(m, cutoff)?;
    Ok((-ev.energy_of(field)?).exp())
}

/// Scalar functionals of the low modes recorded by the samplers.
#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    /// `|û(n)|²` for the mode with the given label.
    ModePower([i32; 2]),
    /// `Re û(n)`.
    ModeReal([i32; 2]),
    Mass,
    Kinetic,
    /// `G_N`.
    Energy,
    /// `½ Σ λ_n² |û(n)|² + G_N`.
    Hamiltonian,
    One,
}

impl Observable {
    pub fn name(&self) -> String {
        match self {
            Observable::ModePower(n) => format!("mode_power({},{})", n[0], n[1]),
            Observable::ModeReal(n) => format!("mode_real({},{})", n[0], n[1]),
            Observable::Mass => "mass".into(),
            Observable::Kinetic => "kinetic".into(),
            Observable::Energy => "energy".into(),
            Observable::Hamiltonian => "hamiltonian".into(),
            Observable::One => "one".into(),
        }
    }

    /// Checks that mode labels exist in `model`.
    pub fn validate<T: Real, M: WickModel<T> + ?Sized>(&self, model: &M) -> Result<()> {
        match self {
            Observable::ModePower(n) | Observable::ModeReal(n) => model
                .index_of(*n)
                .map(|_| ())
                .ok_or_else(|| Error::Range(format!("mode {n:?} is not a low mode"))),
            _ => Ok(()),
        }
    }

    /// Value on `low`; `energy` is `G_N(low)` when already known.
    pub fn evaluate<T: Real, M: WickModel<T> + ?Sized>(
        &self,
        model: &M,
        low: &[Complex<T>],
        energy: Option<T>,
    ) -> T {
        let g = || energy.unwrap_or_else(|| model.energy(low));
        match self {
            Observable::ModePower(n) => low[model.index_of(*n).expect("validated")].norm_sqr(),
            Observable::ModeReal(n) => low[model.index_of(*n).expect("validated")].re,
            Observable::Mass => mass(low),
            Observable::Kinetic => kinetic(model, low),
            Observable::Energy => g(),
            Observable::Hamiltonian => kinetic(model, low) + g(),
            Observable::One => T::one(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampler {
    Importance,
    Pcn,
}

/// Target `Z^{−1} exp(−κ G_N) dμ_N`; `κ = 1` is the Gibbs measure and `κ = 0` the free
/// field.
#[derive(Debug)]
pub struct GibbsTarget<'a, M: ?Sized> {
    pub model: &'a M,
    pub coupling: f64,
}

impl<M: ?Sized> Clone for GibbsTarget<'_, M> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<M: ?Sized> Copy for GibbsTarget<'_, M> {}

impl<'a, M: ?Sized> GibbsTarget<'a, M> {
    pub fn new(model: &'a M) -> Self {
        Self {
            model,
            coupling: 1.0,
        }
    }

    pub fn with_coupling(model: &'a M, coupling: f64) -> Self {
        Self { model, coupling }
    }
}

/// Samples with log-weights and recorded observables.
#[derive(Debug, Clone)]
pub struct SampleBatch<T> {
    pub sampler: Sampler,
    pub order: usize,
    pub basis: &'static str,
    pub seeds: Vec<u64>,
    /// Low-mode coefficients per sample; empty unless requested.
    pub fields: Vec<Vec<Complex<T>>>,
    /// `−κ G_N` per sample (importance) or zero (chain).
    pub log_weights: Vec<f64>,
    /// `G_N` per sample.
    pub energies: Vec<f64>,
    pub names: Vec<String>,
    /// `values[k][i]` is observable `k` on sample `i`.
    pub values: Vec<Vec<f64>>,
    pub nelson_violations: usize,
    pub acceptance_rate: Option<f64>,
}

impl<T: Real> SampleBatch<T> {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Normalized weights (uniform for chains).
    pub fn weights(&self) -> Result<Vec<f64>> {
        normalized_weights(&self.log_weights)
            .ok_or_else(|| Error::Estimation("all importance weights vanish".into()))
    }

    /// Effective sample size of the weights.
    pub fn weight_ess(&self) -> Result<f64> {
        let w = self.weights()?;
        Ok(1.0 / w.iter().map(|x| x * x).sum::<f64>())
    }

    /// Estimate of observable `k`.
    pub fn estimate(&self, k: usize) -> Result<Estimate> {
        match self.sampler {
            Sampler::Importance => Ok(weighted_estimate(&self.values[k], &self.weights()?)),
            Sampler::Pcn => Ok(chain_estimate(&self.values[k])),
        }
    }

    pub fn estimate_by_name(&self, name: &str) -> Result<Estimate> {
        let k = self
            .names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Range(format!("no observable named {name}")))?;
        self.estimate(k)
    }

    /// Summary report `{m, N, sampler, n, ess, observables, nelson_violations}`.
    pub fn report(&self, cutoff: u32) -> Result<Value> {
        let ess = match self.sampler {
            Sampler::Importance => self.weight_ess()?,
            Sampler::Pcn => {
                let mut e = f64::INFINITY;
                for k in 0..self.values.len() {
                    e = e.min(self.estimate(k)?.ess);
                }
                if e.is_finite() {
                    e
                } else {
                    self.len() as f64
                }
            }
        };
        let mut obs = Vec::new();
        for (k, name) in self.names.iter().enumerate() {
            let e = self.estimate(k)?;
            obs.push(json!({"name": name, "mean": e.mean, "stderr": e.stderr}));
        }
        let mut v = json!({
            "m": self.order,
            "N": cutoff,
            "sampler": self.sampler,
            "n": self.len(),
            "ess": ess,
            "observables": obs,
            "nelson_violations": self.nelson_violations,
        });
        if let Some(a) = self.acceptance_rate {
            v["acceptance_rate"] = json!(a);
        }
        if self.basis != "torus" {
            v["basis"] = json!(self.basis);
        }
        Ok(v)
    }
}

struct Draw<T> {
    seed: u64,
    low: Vec<Complex<T>>,
    energy: T,
}

fn validate_observables<T: Real, M: WickModel<T> + ?Sized>(
    model: &M,
    observables: &[Observable],
) -> Result<()> {
    observables.iter().try_for_each(|o| o.validate(model))
}

/// Independent draws from the free field weighted by `exp(−κ G_N)`.
pub fn importance_batch<T: Real, M: WickModel<T> + ?Sized>(
    target: GibbsTarget<'_, M>,
    n_samples: usize,
    seed: u64,
    observables: &[Observable],
    keep_fields: bool,
) -> Result<SampleBatch<T>> {
    if n_samples < 100 {
        return domain(format!("need at least 100 samples, got {n_samples}"));
    }
    let model = target.model;
    validate_observables(model, observables)?;
    let bound = NelsonBound::new(model.order())?.for_model(model);
    type Row<T> = (u64, f64, Vec<f64>, Option<Vec<Complex<T>>>);
    let rows: Vec<Row<T>> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let s = derive_seed(seed, i);
            let low = model.sample(s);
            let g = model.energy(&low);
            let vals = observables
                .iter()
                .map(|o| o.evaluate(model, &low, Some(g)).to_f64_lossy())
                .collect();
            (s, g.to_f64_lossy(), vals, keep_fields.then_some(low))
        })
        .collect();
    let mut batch = empty_batch(Sampler::Importance, model, observables, rows.len());
    for (s, g, vals, low) in rows {
        batch.push(s, g, -target.coupling * g, vals, low, bound);
    }
    if normalized_weights(&batch.log_weights).is_none() {
        return Err(Error::Estimation("all importance weights vanish".into()));
    }
    Ok(batch)
}

fn empty_batch<T: Real, M: WickModel<T> + ?Sized>(
    sampler: Sampler,
    model: &M,
    observables: &[Observable],
    capacity: usize,
) -> SampleBatch<T> {
    SampleBatch {
        sampler,
        order: model.order(),
        basis: model.basis_name(),
        seeds: Vec::with_capacity(capacity),
        fields: Vec::new(),
        log_weights: Vec::with_capacity(capacity),
        energies: Vec::with_capacity(capacity),
        names: observables.iter().map(Observable::name).collect(),
        values: vec![Vec::with_capacity(capacity); observables.len()],
        nelson_violations: 0,
        acceptance_rate: None,
    }
}

impl<T: Real> SampleBatch<T> {
    fn push(
        &mut self,
        seed: u64,
        energy: f64,
        log_weight: f64,
        vals: Vec<f64>,
        low: Option<Vec<Complex<T>>>,
        bound: f64,
    ) {
        if -energy > bound {
            self.nelson_violations += 1;
        }
        self.seeds.push(seed);
        self.energies.push(energy);
        self.log_weights.push(log_weight);
        for (col, v) in self.values.iter_mut().zip(vals) {
            col.push(v);
        }
        if let Some(low) = low {
            self.fields.push(low);
        }
    }
}

/// Self-normalized importance estimate of a field functional under the Gibbs measure
/// of order `m` truncated at `N`.
pub fn importance_estimate<T: Real>(
    observable: &(dyn Fn(&SpectralField<T>) -> T + Sync),
    cutoff: u32,
    m: usize,
    n_samples: usize,
    seed: u64,
) -> Result<Estimate> {
    if n_samples < 100 {
        return domain(format!("need at least 100 samples, got {n_samples}"));
    }
    let ev = WickEvaluator::<T>::new(m, cutoff)?;
    let rows: Vec<(f64, f64)> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let low = WickModel::sample(&ev, derive_seed(seed, i));
            let g = ev.energy(&low).to_f64_lossy();
            let field = SpectralField::from_coeffs(cutoff, low).expect("lattice length");
            (-g, observable(&field).to_f64_lossy())
        })
        .collect();
    let (lw, vals): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
    let w = normalized_weights(&lw)
        .ok_or_else(|| Error::Estimation("all importance weights vanish".into()))?;
    Ok(weighted_estimate(&vals, &w))
}

/// Preconditioned Crank–Nicolson chain targeting `exp(−κ G_N) dμ_N`.
///
/// Proposal `√(1−β²) u + β ξ` with `ξ` a fresh free-field draw; acceptance
/// `min(1, exp(κ (G(u) − G(u'))))`. The first 10% of the states are discarded.
pub fn pcn_chain<T: Real, M: WickModel<T> + ?Sized>(
    target: GibbsTarget<'_, M>,
    steps: usize,
    beta: f64,
    seed: u64,
    observables: &[Observable],
    keep_fields: bool,
) -> Result<SampleBatch<T>> {
    if !(beta > 0.0 && beta <= 1.0) {
        return domain(format!("β must lie in (0, 1], got {beta}"));
    }
    if steps < 10 {
        return domain(format!("need at least 10 steps, got {steps}"));
    }
    let model = target.model;
    validate_observables(model, observables)?;
    let bound = NelsonBound::new(model.order())?.for_model(model);
    let keep = T::of((1.0 - beta * beta).sqrt());
    let b = T::of(beta);
    let burn = steps / 10;
    let mut uniforms = ChaCha8Rng::seed_from_u64(seed);
    uniforms.set_stream(1);

    let mut cur = Draw {
        seed: derive_seed(seed, 0),
        low: Vec::new(),
        energy: T::zero(),
    };
    cur.low = model.sample(cur.seed);
    cur.energy = model.energy(&cur.low);
    let mut accepted = 0usize;
    let mut batch = empty_batch(Sampler::Pcn, model, observables, steps - burn);
    for step in 0..steps {
        let xi_seed = derive_seed(seed, step as u64 + 1);
        let xi = model.sample(xi_seed);
        let prop: Vec<Complex<T>> = cur
            .low
            .iter()
            .zip(&xi)
            .map(|(&u, &x)| u * keep + x * b)
            .collect();
        let g = model.energy(&prop);
        let log_alpha = target.coupling * (cur.energy - g).to_f64_lossy();
        let u: f64 = uniforms.gen();
        if -g.to_f64_lossy() > bound {
            batch.nelson_violations += 1;
        }
        if log_alpha >= 0.0 || u < log_alpha.exp() {
            cur = Draw {
                seed: xi_seed,
                low: prop,
                energy: g,
            };
            accepted += 1;
        }
        if step >= burn {
            let vals = observables
                .iter()
                .map(|o| o.evaluate(model, &cur.low, Some(cur.energy)).to_f64_lossy())
                .collect();
            batch.push(
                cur.seed,
                cur.energy.to_f64_lossy(),
                0.0,
                vals,
                keep_fields.then(|| cur.low.clone()),
                f64::INFINITY,
            );
        }
    }
    batch.acceptance_rate = Some(accepted as f64 / steps as f64);
    Ok(batch)
}

/// Runs `chains` independent chains (seeds derived from `seed`) in parallel and pools
/// them in chain order. Estimates then use the summed per-chain effective sizes.
pub fn pcn_chains<T: Real, M: WickModel<T> + ?Sized>(
    target: GibbsTarget<'_, M>,
    chains: usize,
    steps: usize,
    beta: f64,
    seed: u64,
    observables: &[Observable],
) -> Result<Vec<SampleBatch<T>>> {
    (0..chains as u64)
        .into_par_iter()
        .map(|c| pcn_chain(target, steps, beta, derive_seed(seed ^ 0xc4a1, c), observables, false))
        .collect()
}

/// Pooled estimate of observable `k` over several chains.
pub fn pooled_chain_estimate<T: Real>(chains: &[SampleBatch<T>], k: usize) -> Estimate {
    let mut all = Vec::new();
    let mut ess = 0.0;
    for c in chains {
        all.extend_from_slice(&c.values[k]);
        ess += chain_estimate(&c.values[k]).ess;
    }
    let base = iid_estimate(&all);
    Estimate {
        mean: base.mean,
        stderr: base.stderr * (all.len() as f64 / ess).sqrt(),
        ess,
    }
}

/// Empirical `(E R_N^p)^{1/p}` from free-field draws, with `R_N = exp(−G_N)`.
pub fn density_norm<T: Real, M: WickModel<T> + ?Sized>(
    model: &M,
    p: f64,
    n_samples: usize,
    seed: u64,
) -> f64 {
    let lw: Vec<f64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| -p * model.energy(&model.sample(derive_seed(seed, i))).to_f64_lossy())
        .collect();
    ((log_sum_exp(&lw) - (n_samples as f64).ln()) / p).exp()
}
