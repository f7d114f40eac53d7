use anyhow::Result;
use rayon::prelude::*;
use serde_json::{json, Value};

use wick_gibbs::domain_spectral::{
    self, f_distance_surrogate_domain, g_l2_distance_exact_domain, gamma_lp_distance,
    sigma_field, spectral_band_ratio, weyl_count, DirichletModel, DomainField,
};
use wick_gibbs::dynamics::{evolve, invariance_experiment, IntegratorConfig, Trajectory};
use wick_gibbs::gibbs::{
    importance_batch, iid_estimate, pcn_chain, tail_curve, GibbsTarget, Observable, SampleBatch,
};
use wick_gibbs::model::WickModel;
use wick_gibbs::torus_field::{derive_seed, gaussian_at, sample_gff, sigma_n, Lattice};
use wick_gibbs::wick_functionals::{
    appendix_decomposition_m3, f_distance_surrogate, g_l2_distance_exact, WickEvaluator,
};
use wick_gibbs::wickpoly::{wick_abs_power, wick_hermite_split, wick_power_coefficients, WickContext};
use wick_gibbs::Complex;

use crate::output::{num, Artifact, Csv, Format};
use crate::settings::{invalid, Settings};

pub fn dispatch(name: &str, s: &Settings) -> Result<Artifact> {
    match name {
        "wick-identities" => wick_identities(s),
        "gff-stats" => gff_stats(s),
        "g-convergence" => g_convergence(s),
        "f-convergence" => f_convergence(s),
        "gibbs-sample" => gibbs_sample(s),
        "tail-curve" => tail(s),
        "evolve" => evolve_cmd(s),
        "invariance" => invariance(s),
        "domain-covariance" => domain_covariance(s),
        "appendix-check" => appendix_check(s),
        _ => invalid(format!("unknown subcommand {name}")),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Basis {
    Torus,
    Dirichlet,
}

fn basis(s: &Settings) -> Result<Basis> {
    match s.text("basis") {
        None | Some("torus") => Ok(Basis::Torus),
        Some("dirichlet") | Some("dirichlet-square") => Ok(Basis::Dirichlet),
        Some(b) => invalid(format!("unknown --basis {b:?}; use torus or dirichlet")),
    }
}

fn basis_json(v: &mut Value, b: Basis) {
    if b == Basis::Dirichlet {
        v["basis"] = json!(domain_spectral::BASIS_NAME);
    }
}

fn positive(name: &str, v: usize) -> Result<usize> {
    if v == 0 {
        return invalid(format!("--{name} must be positive"));
    }
    Ok(v)
}

/// Least-squares slope of `log y` against `log x`.
fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(_, &y)| y > 0.0)
        .map(|(&x, &y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

fn slope_cell(s: Option<f64>) -> String {
    s.map(num).unwrap_or_default()
}

/// `√(mean d²)` with a delta-method standard error.
fn rms_estimate(squares: &[f64]) -> (f64, f64) {
    let e = iid_estimate(squares);
    let r = e.mean.max(0.0).sqrt();
    let se = if r > 0.0 { e.stderr / (2.0 * r) } else { 0.0 };
    (r, se)
}

fn integrator(s: &Settings) -> Result<IntegratorConfig> {
    let mut c = IntegratorConfig::default();
    c.abs_tol = s.get("atol", c.abs_tol)?;
    c.rel_tol = s.get("rtol", c.rel_tol)?;
    if !(c.abs_tol > 0.0 && c.rel_tol > 0.0) {
        return invalid("--atol and --rtol must be positive");
    }
    Ok(c)
}

fn wick_identities(s: &Settings) -> Result<Artifact> {
    s.restrict("wick-identities", &["m", "samples"])?;
    let seed = s.seed()?;
    let max_order = positive("m", s.get("m", 3usize)?)?;
    if max_order > 12 {
        return invalid("--m must be at most 12");
    }
    let samples = positive("samples", s.get("samples", 10_000usize)?)?;
    let expected: [&[f64]; 3] = [&[-1.0, 1.0], &[2.0, -4.0, 1.0], &[-6.0, 18.0, -9.0, 1.0]];
    let mut orders = Vec::new();
    let mut csv = Csv::new(&["m", "max_relative_error", "exact_match"]);
    let mut worst: f64 = 0.0;
    let mut all_match = true;
    for m in 1..=max_order {
        let mut err: f64 = 0.0;
        for i in 0..samples as u64 {
            let k = derive_seed(seed, i);
            let sigma = 0.25 + gaussian_at(k, [1, 0]).norm_sqr();
            let z = gaussian_at(k, [0, 0]) * (2.0 * sigma).sqrt();
            let ctx = WickContext::new(m, sigma)?;
            let a = wick_abs_power(&z, &ctx);
            let b = wick_hermite_split(&z, &ctx);
            err = err.max((a - b).abs() / a.abs().max(sigma.powi(m as i32)));
        }
        let coeffs = wick_power_coefficients::<f64>(m);
        let (exp, matched) = match expected.get(m - 1) {
            Some(e) => (json!(e), Some(coeffs.as_slice() == *e)),
            None => (Value::Null, None),
        };
        all_match &= matched.unwrap_or(true);
        worst = worst.max(err);
        csv.row(&[
            m.to_string(),
            num(err),
            matched.map(|b| b.to_string()).unwrap_or_default(),
        ]);
        orders.push(json!({
            "m": m,
            "coefficients": coeffs,
            "expected": exp,
            "exact_match": matched,
            "max_relative_error": err,
        }));
    }
    Ok(Artifact {
        json: json!({
            "max_order": max_order,
            "samples": samples,
            "seed": seed,
            "max_relative_error": worst,
            "orders": orders,
        }),
        csv: Some(csv.finish()),
        default_format: Format::Json,
        summary: format!(
            "max relative error {worst:.3e} over {} points; displayed expansions {}",
            samples * max_order,
            if all_match { "match" } else { "DIFFER" }
        ),
    })
}

fn gff_stats(s: &Settings) -> Result<Artifact> {
    s.restrict("gff-stats", &["N", "samples"])?;
    let seed = s.seed()?;
    let n = s.get("N", 8u32)?;
    let samples = s.get("samples", 10_000usize)?;
    if samples < 2 {
        return invalid("--samples must be at least 2");
    }
    let lattice = Lattice::new(n);
    let draws: Vec<(Vec<f64>, f64)> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let f = sample_gff::<f64>(derive_seed(seed, i), n);
            let at_origin: Complex<f64> = f.coeffs().iter().sum();
            (f.coeffs().iter().map(|c| c.norm_sqr()).collect(), at_origin.norm_sqr())
        })
        .collect();
    let mut csv = Csv::new(&["n1", "n2", "expected", "empirical", "stderr"]);
    let mut modes = Vec::new();
    let mut max_z: f64 = 0.0;
    for (k, &p) in lattice.points().iter().enumerate() {
        let col: Vec<f64> = draws.iter().map(|d| d.0[k]).collect();
        let e = iid_estimate(&col);
        let expected = 1.0 / (1.0 + (p[0] * p[0] + p[1] * p[1]) as f64);
        max_z = max_z.max((e.mean - expected).abs() / e.stderr);
        csv.row(&[p[0].to_string(), p[1].to_string(), num(expected), num(e.mean), num(e.stderr)]);
        modes.push(json!({"n": p, "expected": expected, "empirical": e.mean, "stderr": e.stderr}));
    }
    let pv = iid_estimate(&draws.iter().map(|d| d.1).collect::<Vec<_>>());
    let sig = sigma_n::<f64>(n);
    Ok(Artifact {
        json: json!({
            "N": n,
            "samples": samples,
            "sigma_N": sig,
            "pointwise_variance": {"mean": pv.mean, "stderr": pv.stderr},
            "max_abs_z": max_z,
            "modes": modes,
        }),
        csv: Some(csv.finish()),
        default_format: Format::Csv,
        summary: format!(
            "N={n} sigma_N={sig:.6} pointwise variance {:.6} ± {:.6}; largest mode z-score {max_z:.2}",
            pv.mean, pv.stderr
        ),
    })
}

fn check_order(m: usize) -> Result<usize> {
    if m == 0 || m > 6 {
        return invalid("--m must lie in 1..=6");
    }
    Ok(m)
}

fn g_convergence(s: &Settings) -> Result<Artifact> {
    s.restrict("g-convergence", &["m", "n-list", "samples", "basis"])?;
    let seed = s.seed()?;
    let m = check_order(s.get("m", 2usize)?)?;
    let b = basis(s)?;
    let list = s.n_list(&[4, 8, 16, 32])?;
    let samples = s.get("samples", 1000usize)?;
    if samples < 2 {
        return invalid("--samples must be at least 2");
    }
    let mut csv = Csv::new(&["N", "M", "exact_distance", "mc_estimate", "stderr"]);
    let mut rows = Vec::new();
    let (mut xs, mut ex, mut mc) = (Vec::new(), Vec::new(), Vec::new());
    for &n in &list {
        let big = 2 * n;
        let (exact, sq) = match b {
            Basis::Torus => {
                let exact = g_l2_distance_exact::<f64>(m, n, big)?;
                let em = WickEvaluator::<f64>::new(m, big)?;
                let en = WickEvaluator::<f64>::new(m, n)?;
                let sq: Vec<f64> = (0..samples as u64)
                    .into_par_iter()
                    .map(|i| {
                        let f = sample_gff::<f64>(derive_seed(seed, i), big);
                        let d = em.energy(f.coeffs()) - en.energy_of(&f).expect("nested");
                        d * d
                    })
                    .collect();
                (exact, sq)
            }
            Basis::Dirichlet => {
                if n < 2 {
                    return invalid("the Dirichlet square needs N ≥ 2");
                }
                let exact = g_l2_distance_exact_domain::<f64>(m, n, big)?;
                let em = DirichletModel::<f64>::new(m, big)?;
                let en = DirichletModel::<f64>::new(m, n)?;
                let sq: Vec<f64> = (0..samples as u64)
                    .into_par_iter()
                    .map(|i| {
                        let f = DomainField::<f64>::sample(derive_seed(seed, i), big);
                        let d = WickModel::energy(&em, f.coeffs()) - en.energy_of(&f).expect("nested");
                        d * d
                    })
                    .collect();
                (exact, sq)
            }
        };
        let (r, se) = rms_estimate(&sq);
        csv.row(&[n.to_string(), big.to_string(), num(exact), num(r), num(se)]);
        rows.push(json!({"N": n, "M": big, "exact_distance": exact, "mc_estimate": r, "stderr": se}));
        xs.push(n as f64);
        ex.push(exact);
        mc.push(r);
    }
    let (se, sm) = (loglog_slope(&xs, &ex), loglog_slope(&xs, &mc));
    csv.comment(&format!("fitted_slope,{},{}", slope_cell(se), slope_cell(sm)));
    let mut json = json!({
        "m": m,
        "samples": samples,
        "rows": rows,
        "slope_exact": se,
        "slope_mc": sm,
    });
    basis_json(&mut json, b);
    Ok(Artifact {
        json,
        csv: Some(csv.finish()),
        default_format: Format::Csv,
        summary: format!(
            "m={m} fitted slope exact {} sampled {}",
            slope_cell(se),
            slope_cell(sm)
        ),
    })
}

fn f_convergence(s: &Settings) -> Result<Artifact> {
    s.restrict("f-convergence", &["m", "n-list", "samples", "basis", "s"])?;
    let seed = s.seed()?;
    let m = check_order(s.get("m", 2usize)?)?;
    let b = basis(s)?;
    let list = s.n_list(&[4, 8, 16])?;
    let samples = s.get("samples", 500usize)?;
    let sob = s.get("s", -0.5f64)?;
    if samples < 2 {
        return invalid("--samples must be at least 2");
    }
    if sob > 0.0 {
        return invalid("--s must be ≤ 0 (negative Sobolev index)");
    }
    let mut csv = Csv::new(&["N", "M", "exact_distance", "mc_estimate", "stderr"]);
    let mut rows = Vec::new();
    let (mut xs, mut ex, mut mc) = (Vec::new(), Vec::new(), Vec::new());
    for &n in &list {
        let big = 2 * n;
        let (exact2, sq): (f64, Vec<f64>) = match b {
            Basis::Torus => {
                let exact2 = f_distance_surrogate::<f64>(m, n, big, sob)?;
                let em = WickEvaluator::<f64>::new(m, big)?;
                let en = WickEvaluator::<f64>::new(m, n)?;
                let lm = Lattice::new(big);
                let sq = (0..samples as u64)
                    .into_par_iter()
                    .map(|i| {
                        let f = sample_gff::<f64>(derive_seed(seed, i), big);
                        let mut fm = em.nonlinearity(f.coeffs());
                        let low = f.restrict(n).expect("nested");
                        let fn_ = en.nonlinearity(low.coeffs());
                        for (&p, c) in en.labels().iter().zip(fn_) {
                            fm[lm.index(p).expect("nested")] -= c;
                        }
                        lm.points()
                            .iter()
                            .zip(&fm)
                            .map(|(p, c)| {
                                (1.0 + (p[0] * p[0] + p[1] * p[1]) as f64).powf(sob) * c.norm_sqr()
                            })
                            .sum()
                    })
                    .collect();
                (exact2, sq)
            }
            Basis::Dirichlet => {
                if n < 2 {
                    return invalid("the Dirichlet square needs N ≥ 2");
                }
                let exact2 = f_distance_surrogate_domain::<f64>(m, n, big, -sob)?;
                let em = DirichletModel::<f64>::new(m, big)?;
                let en = DirichletModel::<f64>::new(m, n)?;
                let lam = em.eigenvalues().to_vec();
                let sq = (0..samples as u64)
                    .into_par_iter()
                    .map(|i| {
                        let f = DomainField::<f64>::sample(derive_seed(seed, i), big);
                        let mut fm = em.nonlinearity(f.coeffs());
                        let fn_ = en.nonlinearity(&f.coeffs()[..en.len()]);
                        for (a, c) in fm.iter_mut().zip(fn_) {
                            *a -= c;
                        }
                        fm.iter()
                            .zip(&lam)
                            .map(|(c, &l)| (1.0 + l).powf(sob) * c.norm_sqr())
                            .sum()
                    })
                    .collect();
                (exact2, sq)
            }
        };
        let exact = exact2.max(0.0).sqrt();
        let (r, se) = rms_estimate(&sq);
        csv.row(&[n.to_string(), big.to_string(), num(exact), num(r), num(se)]);
        rows.push(json!({"N": n, "M": big, "exact_distance": exact, "mc_estimate": r, "stderr": se}));
        xs.push(n as f64);
        ex.push(exact);
        mc.push(r);
    }
    let (se, sm) = (loglog_slope(&xs, &ex), loglog_slope(&xs, &mc));
    csv.comment(&format!("fitted_slope,{},{}", slope_cell(se), slope_cell(sm)));
    let mut json = json!({
        "m": m,
        "s": sob,
        "samples": samples,
        "rows": rows,
        "slope_exact": se,
        "slope_mc": sm,
    });
    basis_json(&mut json, b);
    Ok(Artifact {
        json,
        csv: Some(csv.finish()),
        default_format: Format::Csv,
        summary: format!(
            "m={m} s={sob} fitted slope exact {} sampled {}",
            slope_cell(se),
            slope_cell(sm)
        ),
    })
}

fn default_observables(b: Basis) -> Vec<Observable> {
    let modes: [[i32; 2]; 3] = match b {
        Basis::Torus => [[0, 0], [1, 0], [1, 1]],
        Basis::Dirichlet => [[1, 1], [1, 2], [2, 1]],
    };
    let mut obs: Vec<Observable> = modes.iter().map(|&n| Observable::ModePower(n)).collect();
    obs.extend([Observable::Energy, Observable::Mass]);
    obs
}

fn batch_artifact(batch: &SampleBatch<f64>, n: u32) -> Result<Artifact> {
    let json = batch.report(n)?;
    let mut csv = Csv::new(&["name", "mean", "stderr"]);
    for (k, name) in batch.names.iter().enumerate() {
        let e = batch.estimate(k)?;
        csv.row(&[name.clone(), num(e.mean), num(e.stderr)]);
    }
    let summary = format!(
        "{} n={} ess={:.1} nelson_violations={}",
        json["sampler"].as_str().unwrap_or_default(),
        batch.len(),
        json["ess"].as_f64().unwrap_or(f64::NAN),
        batch.nelson_violations
    );
    Ok(Artifact {
        json,
        csv: Some(csv.finish()),
        default_format: Format::Json,
        summary,
    })
}

fn gibbs_sample(s: &Settings) -> Result<Artifact> {
    s.restrict("gibbs-sample", &["m", "N", "samples", "sampler", "beta", "coupling", "basis"])?;
    let seed = s.seed()?;
    let m = check_order(s.get("m", 2usize)?)?;
    let n = s.get("N", 4u32)?;
    let samples = s.get("samples", 10_000usize)?;
    let coupling = s.get("coupling", 1.0f64)?;
    let b = basis(s)?;
    let pcn = match s.text("sampler") {
        None => s.has("beta"),
        Some("importance") => {
            if s.has("beta") {
                return invalid("--beta only applies to the pcn sampler");
            }
            false
        }
        Some("pcn") => true,
        Some(o) => return invalid(format!("unknown --sampler {o:?}; use importance or pcn")),
    };
    let beta = s.get("beta", 0.2f64)?;
    let obs = default_observables(b);
    let batch = match b {
        Basis::Torus => {
            let ev = WickEvaluator::<f64>::new(m, n)?;
            let target = GibbsTarget::with_coupling(&ev, coupling);
            if pcn {
                pcn_chain(target, samples, beta, seed, &obs, false)?
            } else {
                importance_batch(target, samples, seed, &obs, false)?
            }
        }
        Basis::Dirichlet => {
            let model = DirichletModel::<f64>::new(m, n)?;
            let target = GibbsTarget::with_coupling(&model, coupling);
            if pcn {
                pcn_chain(target, samples, beta, seed, &obs, false)?
            } else {
                importance_batch(target, samples, seed, &obs, false)?
            }
        }
    };
    batch_artifact(&batch, n)
}

fn tail(s: &Settings) -> Result<Artifact> {
    s.restrict("tail-curve", &["m", "N", "M", "p", "samples"])?;
    let seed = s.seed()?;
    let m = check_order(s.get("m", 2usize)?)?;
    let n = s.get("N", 4u32)?;
    let big = s.get("M", 2 * n)?;
    let p = s.get("p", 1.0f64)?;
    let samples = positive("samples", s.get("samples", 10_000usize)?)?;
    let d = g_l2_distance_exact::<f64>(m, n, big)?;
    let scale = if d > 0.0 { p * d } else { 1.0 };
    let lambdas: Vec<f64> = (0..=40).map(|k| k as f64 / 10.0 * scale).collect();
    let curve = tail_curve::<f64>(m, n, big, samples, p, seed, &lambdas)?;
    let mut csv = Csv::new(&["lambda", "probability", "lower", "upper", "chebyshev"]);
    let mut rows = Vec::new();
    for r in &curve.rows {
        let cheb = if r.lambda > 0.0 {
            ((p * d) / r.lambda).powi(2).min(1.0)
        } else {
            1.0
        };
        csv.row(&[num(r.lambda), num(r.probability), num(r.lower), num(r.upper), num(cheb)]);
        rows.push(json!({
            "lambda": r.lambda,
            "probability": r.probability,
            "lower": r.lower,
            "upper": r.upper,
            "chebyshev": cheb,
        }));
    }
    let half = curve
        .rows
        .iter()
        .find(|r| r.probability <= 0.5)
        .map(|r| r.lambda)
        .unwrap_or(f64::NAN);
    Ok(Artifact {
        json: json!({
            "m": m,
            "N": n,
            "M": big,
            "p": p,
            "samples": curve.samples,
            "exact_distance": d,
            "rows": rows,
        }),
        csv: Some(csv.finish()),
        default_format: Format::Csv,
        summary: format!("m={m} N={n} M={big}: median of p|G_M − G_N| ≤ {half:.4e} (L² distance {d:.4e})"),
    })
}

fn evolve_cmd(s: &Settings) -> Result<Artifact> {
    s.restrict("evolve", &["m", "N", "M", "t", "atol", "rtol"])?;
    let seed = s.seed()?;
    let m = check_order(s.get("m", 2usize)?)?;
    let n = s.get("N", 4u32)?;
    let big = s.get("M", n + 2)?;
    if big < n {
        return invalid("--M must be at least --N");
    }
    let t = s.get("t", 1.0f64)?;
    if !t.is_finite() {
        return invalid("--t must be finite");
    }
    let cfg = integrator(s)?;
    let field = sample_gff::<f64>(seed, big);
    let traj = evolve(&field, n, m, t, &cfg)?;
    let mut modes: Vec<[i32; 2]> = vec![[0, 0], [1, 0], [1, 1]];
    if big > n {
        modes.push([n as i32 + 1, 0]);
    }
    let mass_drift = Trajectory::<f64>::relative_drift(&traj.mass);
    let ham_drift = Trajectory::<f64>::relative_drift(&traj.hamiltonian);
    let last = traj.final_state();
    let final_modes: Vec<Value> = modes
        .iter()
        .map(|&p| {
            let c = last.get(p);
            json!({"n": p, "re": c.re, "im": c.im})
        })
        .collect();
    Ok(Artifact {
        json: json!({
            "m": m,
            "N": n,
            "M": big,
            "t": t,
            "steps": traj.stats,
            "mass_drift": mass_drift,
            "hamiltonian_drift": ham_drift,
            "final_modes": final_modes,
        }),
        csv: Some(traj.to_csv(&modes)),
        default_format: Format::Csv,
        summary: format!(
            "t={t} {} steps, mass drift {mass_drift:.2e}, hamiltonian drift {ham_drift:.2e}",
            traj.stats.accepted
        ),
    })
}

fn invariance(s: &Settings) -> Result<Artifact> {
    s.restrict(
        "invariance",
        &["m", "N", "t", "samples", "permutations", "coupling", "basis", "atol", "rtol"],
    )?;
    let seed = s.seed()?;
    let m = check_order(s.get("m", 2usize)?)?;
    let n = s.get("N", 3u32)?;
    let t = s.get("t", 1.0f64)?;
    let samples = s.get("samples", 10_000usize)?;
    let perms = s.get("permutations", 1000usize)?;
    let coupling = s.get("coupling", 1.0f64)?;
    let b = basis(s)?;
    let cfg = integrator(s)?;
    let obs = default_observables(b);
    let report = match b {
        Basis::Torus => {
            let ev = WickEvaluator::<f64>::new(m, n)?;
            invariance_experiment(GibbsTarget::with_coupling(&ev, coupling), n, t, samples, &obs, seed, &cfg, perms)?
        }
        Basis::Dirichlet => {
            let model = DirichletModel::<f64>::new(m, n)?;
            invariance_experiment(GibbsTarget::with_coupling(&model, coupling), n, t, samples, &obs, seed, &cfg, perms)?
        }
    };
    let mut csv = Csv::new(&[
        "name",
        "pre_mean",
        "pre_stderr",
        "post_mean",
        "post_stderr",
        "joint_stderr",
        "ks_distance",
        "p_value",
    ]);
    for o in &report.observables {
        csv.row(&[
            o.name.clone(),
            num(o.pre_mean),
            num(o.pre_stderr),
            num(o.post_mean),
            num(o.post_stderr),
            num(o.joint_stderr),
            num(o.ks_distance),
            num(o.p_value),
        ]);
    }
    let max_z = report
        .observables
        .iter()
        .map(|o| o.z_score())
        .fold(0.0, f64::max);
    let min_p = report
        .observables
        .iter()
        .map(|o| o.p_value)
        .fold(1.0, f64::min);
    Ok(Artifact {
        json: report.to_json(),
        csv: Some(csv.finish()),
        default_format: Format::Json,
        summary: format!(
            "n={} ess={:.1} largest |Δmean|/stderr {max_z:.2}, smallest KS p-value {min_p:.3}",
            report.samples, report.ess
        ),
    })
}

fn domain_covariance(s: &Settings) -> Result<Artifact> {
    s.restrict("domain-covariance", &["n-list", "s", "p", "samples"])?;
    let seed = s.seed()?;
    let list = s.n_list(&[4, 8, 16, 32, 64])?;
    let sx = s.get("s", 2.0f64)?;
    let p = s.get("p", 2.0f64)?;
    let band_samples = positive("samples", s.get("samples", 1000usize)?)?;
    if list.iter().any(|&n| n < 2) {
        return invalid("--n-list cutoffs must be at least 2");
    }
    let mut csv = Csv::new(&[
        "N",
        "M",
        "weyl_count",
        "weyl_ratio",
        "sigma_max",
        "sigma_max_over_log",
        "band_ratio",
        "gamma_distance",
    ]);
    let mut rows = Vec::new();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for &n in &list {
        let w = weyl_count(n);
        let ratio = w as f64 / (n as f64).powi(2);
        let smax = sigma_field::<f64>(n)?.max();
        let band = spectral_band_ratio(n, band_samples, derive_seed(seed, n as u64));
        let dist = gamma_lp_distance::<f64>(sx, p, n, 2 * n)?;
        csv.row(&[
            n.to_string(),
            (2 * n).to_string(),
            w.to_string(),
            num(ratio),
            num(smax),
            num(smax / (n as f64).ln()),
            num(band),
            num(dist),
        ]);
        rows.push(json!({
            "N": n,
            "M": 2 * n,
            "weyl_count": w,
            "weyl_ratio": ratio,
            "sigma_max": smax,
            "sigma_max_over_log": smax / (n as f64).ln(),
            "band_ratio": band,
            "gamma_distance": dist,
        }));
        xs.push(n as f64);
        ys.push(dist);
    }
    let slope = loglog_slope(&xs, &ys);
    csv.comment(&format!("fitted_slope,{}", slope_cell(slope)));
    Ok(Artifact {
        json: json!({
            "basis": domain_spectral::BASIS_NAME,
            "s": sx,
            "p": p,
            "rows": rows,
            "slope_gamma_distance": slope,
        }),
        csv: Some(csv.finish()),
        default_format: Format::Csv,
        summary: format!("s={sx} p={p} fitted slope of the covariance distance {}", slope_cell(slope)),
    })
}

const APPENDIX_TOL: f64 = 1e-9;

fn appendix_check(s: &Settings) -> Result<Artifact> {
    s.restrict("appendix-check", &["N", "samples"])?;
    let seed = s.seed()?;
    let n = s.get("N", 2u32)?;
    let samples = positive("samples", s.get("samples", 100usize)?)?;
    let per_sample: Vec<Vec<(&'static str, f64)>> = (0..samples as u64)
        .map(|i| {
            let f = sample_gff::<f64>(derive_seed(seed, i), n);
            Ok(appendix_decomposition_m3(&f, n)?.relative_residuals())
        })
        .collect::<Result<_>>()?;
    let mut worst: std::collections::BTreeMap<&str, f64> = Default::default();
    for row in &per_sample {
        for &(name, r) in row {
            let e = worst.entry(name).or_insert(0.0);
            *e = e.max(r);
        }
    }
    let max = worst.values().copied().fold(0.0, f64::max);
    let mut csv = Csv::new(&["identity", "max_relative_residual"]);
    for (name, r) in &worst {
        csv.row(&[name.to_string(), num(*r)]);
    }
    if !(max <= APPENDIX_TOL) {
        anyhow::bail!("max relative residual {max:.3e} exceeds {APPENDIX_TOL:e}");
    }
    Ok(Artifact {
        json: json!({
            "N": n,
            "samples": samples,
            "max_relative_residual": max,
            "tolerance": APPENDIX_TOL,
            "identities": worst,
        }),
        csv: Some(csv.finish()),
        default_format: Format::Json,
        summary: format!("max relative residual {max:.3e} ≤ 1e-9 over {samples} samples"),
    })
}
