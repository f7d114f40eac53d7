//! `wick-gibbs`: reproducible experiments on Wick-ordered Gibbs measures.
// NaN inputs must fail validation, so negated comparisons are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;
mod settings;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use settings::{Flags, Invalid, Settings};

const SCHEMAS: &str = "\
Output schemas (CSV has a header row; JSON keys are sorted):
  wick-identities     json {max_order, samples, seed, max_relative_error, orders: [{m, coefficients, expected, exact_match}]}
                      csv  m,max_relative_error,exact_match
  gff-stats           csv  n1,n2,expected,empirical,stderr
                      json {N, samples, sigma_N, pointwise_variance: {mean, stderr}, max_abs_z, modes: [...]}
  g-convergence       csv  N,M,exact_distance,mc_estimate,stderr then '# fitted_slope,<exact>,<mc>'
  f-convergence       csv  N,M,exact_distance,mc_estimate,stderr then '# fitted_slope,<exact>,<mc>'
  gibbs-sample        json {m, N, sampler, n, ess, observables: [{name, mean, stderr}], nelson_violations}
                      csv  name,mean,stderr
  tail-curve          csv  lambda,probability,lower,upper,chebyshev
  evolve              csv  t,mass_low,hamiltonian,abs_<n1>_<n2>...
                      json {m, N, M, t, steps, mass_drift, hamiltonian_drift, final_modes}
  invariance          json {m, N, sampler, n, ess, t, observables: [{name, mean, stderr, pre_mean, pre_stderr,
                            joint_stderr, ks_distance, p_value}], nelson_violations, ...}
                      csv  name,pre_mean,pre_stderr,post_mean,post_stderr,joint_stderr,ks_distance,p_value
  domain-covariance   csv  N,M,weyl_count,weyl_ratio,sigma_max,sigma_max_over_log,band_ratio,gamma_distance
                      then '# fitted_slope,<gamma_distance>'
  appendix-check      json {N, samples, max_relative_residual, tolerance, identities: {name: residual}}
                      csv  identity,max_relative_residual
Dirichlet-square outputs carry \"basis\": \"dirichlet-square\".
Exit codes: 0 success, 1 runtime error, 2 validation error.";

#[derive(Parser, Debug)]
#[command(name = "wick-gibbs", version, about, after_help = SCHEMAS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Wick powers against the Hermite split and the displayed expansions (--m, --samples).
    WickIdentities(Flags),
    /// Free-field mode variances and σ_N (--N, --samples).
    GffStats(Flags),
    /// Exact and sampled ‖G_2N − G_N‖ (--m, --n-list, --samples, --basis).
    GConvergence(Flags),
    /// Exact and sampled H^s distance of F_2N − F_N (--m, --n-list, --s, --samples, --basis).
    FConvergence(Flags),
    /// Gibbs expectations (--m, --N, --samples, --sampler, --beta, --coupling, --basis).
    GibbsSample(Flags),
    /// Survival curve of p|G_M − G_N| (--m, --N, --M, --p, --samples).
    TailCurve(Flags),
    /// One trajectory of the truncated flow (--m, --N, --M, --t, --atol, --rtol).
    Evolve(Flags),
    /// Pre/post comparison of Gibbs samples under the flow
    /// (--m, --N, --t, --samples, --permutations, --coupling, --basis, --atol, --rtol).
    Invariance(Flags),
    /// Dirichlet-square counts, variance, bands and covariance distances (--n-list, --s, --p).
    DomainCovariance(Flags),
    /// Decomposition identities of the sextic energy (--N, --samples).
    AppendixCheck(Flags),
}

impl Command {
    fn parts(&self) -> (&'static str, &Flags) {
        match self {
            Command::WickIdentities(f) => ("wick-identities", f),
            Command::GffStats(f) => ("gff-stats", f),
            Command::GConvergence(f) => ("g-convergence", f),
            Command::FConvergence(f) => ("f-convergence", f),
            Command::GibbsSample(f) => ("gibbs-sample", f),
            Command::TailCurve(f) => ("tail-curve", f),
            Command::Evolve(f) => ("evolve", f),
            Command::Invariance(f) => ("invariance", f),
            Command::DomainCovariance(f) => ("domain-covariance", f),
            Command::AppendixCheck(f) => ("appendix-check", f),
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Invalid>().is_some() {
        return 2;
    }
    match err.downcast_ref::<wick_gibbs::Error>() {
        Some(
            wick_gibbs::Error::Domain(_)
            | wick_gibbs::Error::Range(_)
            | wick_gibbs::Error::Aliasing { .. }
            | wick_gibbs::Error::Format(_),
        ) => 2,
        _ => 1,
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let (name, flags) = cli.command.parts();
    let settings = Settings::new(flags)?;
    if let Some(t) = settings.threads()? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| anyhow::anyhow!("thread pool: {e}"))?;
    }
    let artifact = commands::dispatch(name, &settings)?;
    output::emit(name, &settings, artifact)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
