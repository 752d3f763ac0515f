//! CSV tables and the JSON run manifest.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::burgers::{signed_sum, BranchSet};
use crate::error::Result;
use crate::evolution::ZdlRecord;
use crate::lax::LaxSpectrum;
use crate::quantization::{Regime, RootMatch, RootRecord};
use crate::scalar::{to64, Real};

fn num<T: Real>(v: T) -> String {
    // Adding zero turns −0 into +0.
    format!("{:e}", to64(v) + 0.0)
}

/// Rows `t, x, P, u_0, …, u_{2P_max}, u_alt`; absent branches are empty cells.
pub fn write_branch_scan<T: Real, W: Write>(out: W, sets: &[BranchSet<T>]) -> Result<()> {
    let width = sets.iter().map(|s| s.values.len()).max().unwrap_or(1);
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string(), "x".into(), "P".into()];
    header.extend((0..width).map(|j| format!("u_{j}")));
    header.push("u_alt".into());
    w.write_record(&header)?;
    for s in sets {
        let mut row = vec![num(s.t), num(s.x), s.folds().to_string()];
        row.extend((0..width).map(|j| s.values.get(j).map_or_else(String::new, |&v| num(v))));
        row.push(num(signed_sum(s)?));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Rows `N, regime, nu0_predicted, nu_solved, residual_action, matrix_match_error`.
pub fn write_root_table<T: Real, W: Write>(out: W, roots: &[RootRecord<T>], matched: Option<&RootMatch<T>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["N", "regime", "nu0_predicted", "nu_solved", "residual_action", "matrix_match_error"])?;
    for (i, r) in roots.iter().enumerate() {
        let regime = match r.regime {
            Regime::Small => "small",
            Regime::Large => "large",
        };
        let err = matched.and_then(|m| m.errors.get(i)).map_or_else(String::new, |&e| num(e));
        w.write_record([r.n.to_string(), regime.into(), num(r.nu0), num(r.nu), num(r.action_residual), err])?;
    }
    w.flush()?;
    Ok(())
}

/// Rows `n, lambda, gap, theta, lambda_predicted` where the prediction may be empty.
pub fn write_spectrum_table<T: Real, W: Write>(out: W, spec: &LaxSpectrum<T>, predicted: &[Option<T>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "lambda", "gap", "theta", "lambda_predicted"])?;
    for n in 0..spec.len() {
        let p = predicted.get(n).copied().flatten().map_or_else(String::new, num);
        w.write_record([n.to_string(), num(spec.lambdas[n]), num(spec.gaps[n]), num(spec.thetas[n]), p])?;
    }
    w.flush()?;
    Ok(())
}

/// Rows `epsilon, t, k, fourier_eps_re, fourier_eps_im, fourier_burgers_re, fourier_burgers_im, abs_error`.
pub fn write_experiment_table<T: Real, W: Write>(out: W, rows: &[ZdlRecord<T>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "epsilon",
        "t",
        "k",
        "fourier_eps_re",
        "fourier_eps_im",
        "fourier_burgers_re",
        "fourier_burgers_im",
        "abs_error",
    ])?;
    for r in rows {
        w.write_record([
            num(r.epsilon),
            num(r.t),
            r.k.to_string(),
            num(r.fourier_eps.re),
            num(r.fourier_eps.im),
            num(r.fourier_burgers.re),
            num(r.fourier_burgers.im),
            num(r.abs_error),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Uniform samples `x, u` (used for reconstructed and reference profiles).
pub fn write_samples<T: Real, W: Write>(out: W, columns: &[&str], rows: &[Vec<T>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns)?;
    for row in rows {
        w.write_record(row.iter().map(|&v| num(v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Everything needed to reproduce a run: inputs, tolerances, truncations,
/// emitted files and every fallback taken along the way.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub config: serde_json::Value,
    pub tolerances: BTreeMap<String, f64>,
    pub truncations: BTreeMap<String, usize>,
    pub fallbacks: Vec<String>,
    pub checks: BTreeMap<String, serde_json::Value>,
    pub files: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        Self { command: command.into(), version: env!("CARGO_PKG_VERSION").into(), config, ..Self::default() }
    }

    pub fn tolerance(&mut self, name: &str, value: f64) -> &mut Self {
        self.tolerances.insert(name.into(), value);
        self
    }

    pub fn fallback(&mut self, note: impl Into<String>) -> &mut Self {
        self.fallbacks.push(note.into());
        self
    }

    pub fn check(&mut self, name: &str, value: impl Serialize) -> &mut Self {
        self.checks.insert(name.into(), serde_json::to_value(value).unwrap_or(serde_json::Value::Null));
        self
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
