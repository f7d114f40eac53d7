//! Flags, the optional `key=value` config file, and their merge.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::Result;
use clap::Args;

/// Every flag a subcommand may take. Unset flags fall back to the config file, then to
/// the subcommand's default.
#[derive(Args, Debug, Clone, Default)]
pub struct Flags {
    /// Wick order m.
    #[arg(long = "m")]
    pub m: Option<usize>,
    /// Cutoff N.
    #[arg(long = "N")]
    pub n: Option<u32>,
    /// Larger cutoff M.
    #[arg(long = "M")]
    pub big_m: Option<u32>,
    /// Sobolev or covariance exponent s.
    #[arg(long = "s", allow_hyphen_values = true)]
    pub s: Option<f64>,
    /// Integrability exponent p.
    #[arg(long = "p")]
    pub p: Option<f64>,
    /// Final time.
    #[arg(long = "t", allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// Number of samples (or chain steps).
    #[arg(long = "samples")]
    pub samples: Option<usize>,
    /// pCN step size in (0, 1].
    #[arg(long = "beta")]
    pub beta: Option<f64>,
    /// Base seed; mandatory.
    #[arg(long = "seed")]
    pub seed: Option<u64>,
    /// Output path; stdout when absent.
    #[arg(long = "output")]
    pub output: Option<PathBuf>,
    /// csv or json.
    #[arg(long = "format")]
    pub format: Option<String>,
    /// key=value file; flags take precedence.
    #[arg(long = "config")]
    pub config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long = "threads")]
    pub threads: Option<usize>,
    /// Comma-separated cutoffs.
    #[arg(long = "n-list")]
    pub n_list: Option<String>,
    /// Absolute integrator tolerance.
    #[arg(long = "atol")]
    pub atol: Option<f64>,
    /// Relative integrator tolerance.
    #[arg(long = "rtol")]
    pub rtol: Option<f64>,
    /// torus or dirichlet.
    #[arg(long = "basis")]
    pub basis: Option<String>,
    /// importance or pcn.
    #[arg(long = "sampler")]
    pub sampler: Option<String>,
    /// Coupling κ of the target exp(−κ G_N) dμ.
    #[arg(long = "coupling", allow_hyphen_values = true)]
    pub coupling: Option<f64>,
    /// Label permutations of the KS test.
    #[arg(long = "permutations")]
    pub permutations: Option<usize>,
}

/// Validation failure, reported with exit code 2.
#[derive(Debug)]
pub struct Invalid(pub String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

pub fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Invalid(msg.into()).into())
}

const KEYS: &[&str] = &[
    "m", "N", "M", "s", "p", "t", "samples", "beta", "seed", "output", "format", "threads",
    "n-list", "atol", "rtol", "basis", "sampler", "coupling", "permutations",
];

/// Flags merged with the config file.
#[derive(Debug, Clone)]
pub struct Settings {
    values: BTreeMap<&'static str, String>,
}

fn parse<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| Invalid(format!("cannot parse --{key} value {raw:?}")).into())
}

impl Settings {
    pub fn new(flags: &Flags) -> Result<Self> {
        let mut values = BTreeMap::new();
        if let Some(path) = &flags.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Invalid(format!("cannot read config {}: {e}", path.display())))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((k, v)) = line.split_once('=') else {
                    return invalid(format!("config line {}: expected key=value", lineno + 1));
                };
                let k = k.trim().trim_start_matches("--");
                let Some(&key) = KEYS.iter().find(|&&x| x == k) else {
                    return invalid(format!("config line {}: unknown key {k:?}", lineno + 1));
                };
                values.insert(key, v.trim().to_string());
            }
        }
        let mut set = |k: &'static str, v: Option<String>| {
            if let Some(v) = v {
                values.insert(k, v);
            }
        };
        set("m", flags.m.map(|v| v.to_string()));
        set("N", flags.n.map(|v| v.to_string()));
        set("M", flags.big_m.map(|v| v.to_string()));
        set("s", flags.s.map(|v| v.to_string()));
        set("p", flags.p.map(|v| v.to_string()));
        set("t", flags.t.map(|v| v.to_string()));
        set("samples", flags.samples.map(|v| v.to_string()));
        set("beta", flags.beta.map(|v| v.to_string()));
        set("seed", flags.seed.map(|v| v.to_string()));
        set("output", flags.output.as_ref().map(|v| v.display().to_string()));
        set("format", flags.format.clone());
        set("threads", flags.threads.map(|v| v.to_string()));
        set("n-list", flags.n_list.clone());
        set("atol", flags.atol.map(|v| v.to_string()));
        set("rtol", flags.rtol.map(|v| v.to_string()));
        set("basis", flags.basis.clone());
        set("sampler", flags.sampler.clone());
        set("coupling", flags.coupling.map(|v| v.to_string()));
        set("permutations", flags.permutations.map(|v| v.to_string()));
        Ok(Self { values })
    }

    /// Rejects settings the subcommand does not use.
    pub fn restrict(&self, command: &str, allowed: &[&str]) -> Result<()> {
        const COMMON: &[&str] = &["seed", "output", "format", "threads"];
        for k in self.values.keys() {
            if !allowed.contains(k) && !COMMON.contains(k) {
                return invalid(format!("{command} does not take --{k}"));
            }
        }
        Ok(())
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn get<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.values.get(key) {
            Some(raw) => parse(key, raw),
            None => Ok(default),
        }
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn seed(&self) -> Result<u64> {
        match self.values.get("seed") {
            Some(raw) => parse("seed", raw),
            None => invalid("--seed is mandatory"),
        }
    }

    pub fn threads(&self) -> Result<Option<usize>> {
        match self.values.get("threads") {
            Some(raw) => {
                let t: usize = parse("threads", raw)?;
                if t == 0 {
                    return invalid("--threads must be positive");
                }
                Ok(Some(t))
            }
            None => Ok(None),
        }
    }

    pub fn output(&self) -> Option<PathBuf> {
        self.values.get("output").map(PathBuf::from)
    }

    pub fn n_list(&self, default: &[u32]) -> Result<Vec<u32>> {
        let Some(raw) = self.values.get("n-list") else {
            return Ok(default.to_vec());
        };
        let list: Vec<u32> = raw
            .split(',')
            .map(|x| parse::<u32>("n-list", x))
            .collect::<Result<_>>()?;
        if list.is_empty() || list.contains(&0) {
            return invalid("--n-list needs positive cutoffs");
        }
        Ok(list)
    }
}
