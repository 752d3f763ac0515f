//! Run configuration: an optional JSON or TOML file overlaid by flags.

use std::fmt;
use std::path::{Path, PathBuf};

use bozdl_core::single_well::rotate_min_to_origin;
use bozdl_core::{Profile, Signal};
use clap::Args;
use serde::{Deserialize, Serialize};

/// Invalid input detected before any numerics run. Maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON or TOML file with the same keys as the flags; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Built-in initial profile (only `cosine`, i.e. `-beta·cos x`).
    #[arg(long)]
    pub builtin: Option<String>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Uniform samples of u₀ on [0, 2π): whitespace or comma separated
    /// values, or a JSON file `{"K": .., "coeffs": [[re, im], ..]}`.
    #[arg(long)]
    pub samples: Option<PathBuf>,
    /// Fourier order kept from `--samples`.
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long = "epsilon")]
    pub epsilon: Vec<f64>,
    #[arg(long = "t")]
    pub t: Vec<f64>,
    #[arg(long = "k")]
    pub k: Vec<usize>,
    /// Fixed Hardy-space truncation N; otherwise chosen by a drift test.
    #[arg(long)]
    pub truncation: Option<usize>,
    /// Existing, writable output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Distance δ kept from the turning points by the quantization windows.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Number of uniform grid points for sampled outputs.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub pde_dt: Option<f64>,
    #[arg(long)]
    pub compare_roots: bool,
    #[arg(long)]
    pub oracle_pde: bool,
    #[arg(long)]
    pub svg: bool,
    /// Force the synthetic admissible spectrum even for a cosine.
    #[arg(long)]
    pub synthetic: bool,
    /// Worker threads (defaults to the number of cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Recorded in the manifest; no command draws random numbers.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// File form of the configuration; every key is optional.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub builtin: Option<String>,
    pub beta: Option<f64>,
    pub samples: Option<PathBuf>,
    pub order: Option<usize>,
    pub epsilon: Option<Vec<f64>>,
    pub t: Option<Vec<f64>>,
    pub k: Option<Vec<usize>>,
    pub truncation: Option<usize>,
    pub out: Option<PathBuf>,
    pub delta: Option<f64>,
    pub points: Option<usize>,
    pub pde_dt: Option<f64>,
    pub compare_roots: Option<bool>,
    pub oracle_pde: Option<bool>,
    pub svg: Option<bool>,
    pub synthetic: Option<bool>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read config {}: {e}", path.display())))?;
        let parsed = if path.extension().is_some_and(|e| e == "toml") {
            toml::from_str(&text).map_err(|e| e.to_string())
        } else {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|e| config_error(format!("invalid config {}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProfileSpec {
    Cosine { beta: f64 },
    Samples { path: PathBuf, order: usize },
}

/// Fully resolved configuration of one run.
#[derive(Debug, Clone, Serialize)]
pub struct Config {
    pub profile: ProfileSpec,
    pub epsilon: Vec<f64>,
    pub t: Vec<f64>,
    pub k: Vec<usize>,
    pub truncation: Option<usize>,
    pub out: PathBuf,
    /// Explicit δ; commands default to `0.2·β`.
    pub delta: Option<f64>,
    pub points: usize,
    pub pde_dt: f64,
    pub compare_roots: bool,
    pub oracle_pde: bool,
    pub svg: bool,
    pub synthetic: bool,
    pub threads: Option<usize>,
    pub seed: u64,
}

/// Per-command fallbacks for lists left unset.
pub struct Defaults {
    pub epsilon: &'static [f64],
    pub t: &'static [f64],
    pub k: &'static [usize],
}

fn pick<T: Clone>(flag: &[T], file: Option<Vec<T>>, default: &[T]) -> Vec<T> {
    if !flag.is_empty() {
        flag.to_vec()
    } else {
        file.unwrap_or_else(|| default.to_vec())
    }
}

impl Config {
    pub fn resolve(args: &CommonArgs, defaults: &Defaults) -> anyhow::Result<Self> {
        let file = match &args.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let builtin = args.builtin.clone().or(file.builtin);
        let samples = args.samples.clone().or(file.samples);
        let beta = args.beta.or(file.beta);
        let profile = match (builtin.as_deref(), samples) {
            (Some(_), Some(_)) => return Err(config_error("--builtin and --samples are mutually exclusive")),
            (Some("cosine") | None, None) => {
                let beta = beta.unwrap_or(1.0);
                if !(beta > 0.0 && beta.is_finite()) {
                    return Err(config_error(format!("beta must be positive, got {beta}")));
                }
                ProfileSpec::Cosine { beta }
            }
            (Some(other), None) => return Err(config_error(format!("unknown builtin profile '{other}'"))),
            (None, Some(path)) => {
                if beta.is_some() {
                    return Err(config_error("--beta only applies to the cosine profile"));
                }
                ProfileSpec::Samples { path, order: args.order.or(file.order).unwrap_or(0) }
            }
        };

        let epsilon = pick(&args.epsilon, file.epsilon, defaults.epsilon);
        let t = pick(&args.t, file.t, defaults.t);
        let k = pick(&args.k, file.k, defaults.k);
        if epsilon.is_empty() {
            return Err(config_error("epsilon list is empty"));
        }
        if let Some(e) = epsilon.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return Err(config_error(format!("epsilon must be positive, got {e}")));
        }
        if epsilon.windows(2).any(|w| !(w[0] > w[1])) {
            return Err(config_error("epsilon list must be strictly descending"));
        }
        if t.is_empty() {
            return Err(config_error("t list is empty"));
        }
        if let Some(v) = t.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(config_error(format!("times must be finite and non-negative, got {v}")));
        }
        if k.is_empty() {
            return Err(config_error("k list is empty"));
        }
        if k.contains(&0) {
            return Err(config_error("Fourier indices k must be at least 1"));
        }

        let out = args.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("."));
        check_writable(&out)?;

        let delta = args.delta.or(file.delta);
        if let Some(d) = delta.filter(|d| !(*d > 0.0)) {
            return Err(config_error(format!("delta must be positive, got {d}")));
        }
        let points = args.points.or(file.points).unwrap_or(256);
        if points < 8 {
            return Err(config_error(format!("points must be at least 8, got {points}")));
        }
        let pde_dt = args.pde_dt.or(file.pde_dt).unwrap_or(1e-4);
        if !(pde_dt > 0.0) {
            return Err(config_error(format!("pde_dt must be positive, got {pde_dt}")));
        }
        Ok(Self {
            profile,
            epsilon,
            t,
            k,
            truncation: args.truncation.or(file.truncation),
            out,
            delta,
            points,
            pde_dt,
            compare_roots: args.compare_roots || file.compare_roots.unwrap_or(false),
            oracle_pde: args.oracle_pde || file.oracle_pde.unwrap_or(false),
            svg: args.svg || file.svg.unwrap_or(false),
            synthetic: args.synthetic || file.synthetic.unwrap_or(false),
            threads: args.threads.or(file.threads),
            seed: args.seed.or(file.seed).unwrap_or(0),
        })
    }

    /// `Some(β)` for the built-in cosine.
    pub fn cosine_beta(&self) -> Option<f64> {
        match self.profile {
            ProfileSpec::Cosine { beta } => Some(beta),
            ProfileSpec::Samples { .. } => None,
        }
    }

    /// `(β, δ)` for commands that need the cosine.
    pub fn cosine_window(&self, command: &str) -> anyhow::Result<(f64, f64)> {
        let beta = self
            .cosine_beta()
            .ok_or_else(|| config_error(format!("{command} needs the cosine profile (--builtin cosine)")))?;
        Ok((beta, self.delta.unwrap_or(0.2 * beta)))
    }
}

fn check_writable(dir: &Path) -> anyhow::Result<()> {
    if !dir.is_dir() {
        return Err(config_error(format!("output directory {} does not exist", dir.display())));
    }
    let probe = dir.join(".bozdl-write-probe");
    std::fs::write(&probe, b"")
        .and_then(|_| std::fs::remove_file(&probe))
        .map_err(|e| config_error(format!("output directory {} is not writable: {e}", dir.display())))
}

/// The initial signal and, when it has a single well, its profile.
///
/// Sampled data is rotated so the minimum sits at the origin; the rotation
/// is returned so outputs can be reported in the original frame.
pub struct Input {
    pub signal: Signal,
    pub shift: f64,
}

impl Input {
    pub fn load(cfg: &Config) -> anyhow::Result<Self> {
        match &cfg.profile {
            ProfileSpec::Cosine { beta } => Ok(Self { signal: Signal::cosine(*beta), shift: 0.0 }),
            ProfileSpec::Samples { path, order } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| config_error(format!("cannot read samples {}: {e}", path.display())))?;
                let raw = if path.extension().is_some_and(|e| e == "json") {
                    let j = serde_json::from_str(&text)
                        .map_err(|e| config_error(format!("invalid signal file {}: {e}", path.display())))?;
                    Signal::from_json(&j)?
                } else {
                    let values = text
                        .split(|c: char| c.is_whitespace() || c == ',')
                        .filter(|s| !s.is_empty())
                        .map(|s| s.parse::<f64>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| config_error(format!("bad sample in {}: {e}", path.display())))?;
                    let k = if *order == 0 { (values.len().saturating_sub(2) / 2).min(32) } else { *order };
                    Signal::from_samples(&values, k)?
                };
                let (signal, shift) = rotate_min_to_origin(&raw);
                Ok(Self { signal, shift })
            }
        }
    }

    pub fn profile(&self) -> anyhow::Result<Profile> {
        Ok(Profile::classify(&self.signal, 4096)?)
    }
}
