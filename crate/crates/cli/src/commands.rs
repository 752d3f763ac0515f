//! The five subcommands. Numerics run in parallel; files are written
//! one after another from the calling thread.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use anyhow::Context;
use bozdl_core::burgers::{breaking_points, l2_norm_ualt, signed_sum, ualt, Characteristics};
use bozdl_core::evolution::{
    bo_direct_solve, evolve, grid_norm, reconstruct, synth_admissible, zdl_experiment, PdeOptions, ZdlOptions,
};
use bozdl_core::io::{self, Manifest};
use bozdl_core::lax::{self, diagonalize, diagonalize_auto, shift_matrix, trace_moment, ShiftSource};
use bozdl_core::quantization::{self, match_roots, solve_roots, Regime};
use bozdl_core::{burgers, evolution, fourier, single_well, Branches, Spectrum};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{config_error, Config, Input};
use crate::svg::{Plot, Series};

/// Accumulates output files and the manifest of one command.
pub struct Run<'c> {
    pub cfg: &'c Config,
    pub manifest: Manifest,
}

impl<'c> Run<'c> {
    pub fn new(command: &str, cfg: &'c Config) -> anyhow::Result<Self> {
        let mut manifest = Manifest::new(command, serde_json::to_value(cfg)?);
        manifest
            .tolerance("mean_zero", fourier::MEAN_TOLERANCE)
            .tolerance("gap_clip", lax::GAP_CLIP)
            .tolerance("phase_overlap_floor", lax::PHASE_OVERLAP_FLOOR)
            .tolerance("truncation_drift", lax::TRUNCATION_DRIFT)
            .tolerance("round_trip", evolution::ROUND_TRIP_TOLERANCE)
            .tolerance("root_bracket", quantization::ROOT_TOLERANCE)
            .tolerance("tangency_shift", burgers::TANGENCY_SHIFT)
            .tolerance("single_well_sign", single_well::SIGN_TOLERANCE)
            .tolerance("inflection", single_well::INFLECTION_TOLERANCE);
        Ok(Self { cfg, manifest })
    }

    fn write(&mut self, name: &str, bytes: impl AsRef<[u8]>) -> anyhow::Result<()> {
        let path = self.cfg.out.join(name);
        std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.manifest.files.push(name.to_string());
        Ok(())
    }

    fn write_csv(&mut self, name: &str, fill: impl FnOnce(&mut Vec<u8>) -> bozdl_core::Result<()>) -> anyhow::Result<()> {
        let mut buf = Vec::new();
        fill(&mut buf)?;
        self.write(name, buf)
    }

    fn write_svg(&mut self, name: &str, plot: &Plot) -> anyhow::Result<()> {
        if self.cfg.svg {
            self.write(name, plot.render())?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> anyhow::Result<Manifest> {
        let name = format!("{}_manifest.json", self.manifest.command);
        self.manifest.files.push(name.clone());
        let text = self.manifest.to_json()?;
        let path = self.cfg.out.join(&name);
        std::fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
        Ok(self.manifest)
    }
}

/// Compact tag for file names, e.g. `0.25`.
fn tag(v: f64) -> String {
    format!("{v}")
}

fn grid(points: usize) -> Vec<f64> {
    (0..points).map(|j| 2.0 * PI * j as f64 / points as f64).collect()
}

fn matrix_spectrum(cfg: &Config, input: &Input, eps: f64) -> bozdl_core::Result<Spectrum> {
    match cfg.truncation {
        Some(n) => diagonalize(&input.signal, eps, n),
        None => diagonalize_auto(&input.signal, eps),
    }
}

fn log_spectrum(run: &mut Run, key: &str, spec: &Spectrum) {
    run.manifest.truncations.insert(key.to_string(), spec.truncation);
    if spec.quality.clipped_gaps > 0 {
        run.manifest.fallback(format!(
            "{key}: {} gaps below {:e} clipped to zero (most negative raw gap {:e})",
            spec.quality.clipped_gaps,
            lax::GAP_CLIP,
            spec.quality.min_raw_gap
        ));
    }
}

pub const SPECTRUM_DEFAULTS: crate::config::Defaults = crate::config::Defaults { epsilon: &[0.5], t: &[0.0], k: &[1] };

pub fn spectrum(cfg: &Config) -> anyhow::Result<Manifest> {
    let mut run = Run::new("spectrum", cfg)?;
    let input = Input::load(cfg)?;
    if cfg.compare_roots {
        cfg.cosine_window("--compare-roots")?;
    }
    let window = cfg.cosine_window("root prediction").ok();
    let results: Vec<_> = cfg
        .epsilon
        .par_iter()
        .map(|&eps| -> bozdl_core::Result<_> {
            let spec = matrix_spectrum(cfg, &input, eps)?;
            let roots = match window {
                Some((beta, delta)) => Some(solve_roots(beta, eps, delta)?),
                None => None,
            };
            Ok((eps, spec, roots))
        })
        .collect::<bozdl_core::Result<_>>()?;

    let (_, u_max) = input.signal.grid_range();
    for (eps, spec, roots) in &results {
        let key = format!("eps={}", tag(*eps));
        log_spectrum(&mut run, &key, spec);
        let data = shift_matrix(spec, ShiftSource::Eigenvectors)?;
        let trace = |k: usize| (trace_moment(&data, k) - input.signal.coeff(k as i64)).norm();
        run.manifest.check(
            &key,
            json!({
                "lambda0": spec.lambdas[0],
                "lambda0_lower_bound": -u_max,
                "lambda0_above_bound": spec.lambdas[0] >= -u_max - 1e-9,
                "parseval_residual": (spec.parseval_norm_sq() - input.signal.norm_sq()).abs(),
                "trace_residual_k1": trace(1),
                "trace_residual_k2": trace(2),
                "tail_estimate": spec.quality.tail_estimate,
            }),
        );

        let mut predicted = vec![None; spec.len()];
        let matched = roots.as_ref().map(|r| match_roots(r, &spec.lambdas));
        if let (Some(r), Some(m)) = (roots, &matched) {
            for (root, &j) in r.iter().zip(&m.indices) {
                if j < predicted.len() {
                    predicted[j] = Some(root.lambda);
                }
            }
        }
        run.write(&format!("spectrum_eps{}.json", tag(*eps)), serde_json::to_string_pretty(&spec.to_json())? + "\n")?;
        run.write_csv(&format!("spectrum_eps{}.csv", tag(*eps)), |b| io::write_spectrum_table(b, spec, &predicted))?;
        if cfg.compare_roots {
            let (r, m) = (roots.as_ref().expect("cosine checked"), matched.as_ref().expect("cosine checked"));
            run.manifest.check(
                &format!("{key}: roots"),
                json!({ "count": r.len(), "max_match_error": m.max_error(), "one_to_one": m.one_to_one }),
            );
            run.write_csv(&format!("roots_eps{}.csv", tag(*eps)), |b| io::write_root_table(b, r, Some(m)))?;
        }
        let gaps: Vec<(f64, f64)> = (1..spec.len()).map(|n| (spec.lambdas[n], spec.gaps[n])).collect();
        run.write_svg(
            &format!("spectrum_eps{}.svg", tag(*eps)),
            &Plot {
                title: format!("Gaps at epsilon = {}", tag(*eps)),
                x_label: "lambda_n".into(),
                y_label: "gamma_n".into(),
                log_y: true,
                series: vec![Series { label: "gamma_n".into(), points: gaps, markers: true }],
                ..Plot::default()
            },
        )?;
    }
    run.finish()
}

pub const BURGERS_DEFAULTS: crate::config::Defaults =
    crate::config::Defaults { epsilon: &[0.5], t: &[0.0, 0.6, 1.0], k: &[1] };

pub fn burgers(cfg: &Config) -> anyhow::Result<Manifest> {
    let mut run = Run::new("burgers", cfg)?;
    let input = Input::load(cfg)?;
    let profile = input.profile()?;
    let xs = grid(cfg.points);
    let scans: Vec<(f64, Vec<Branches>, f64)> = cfg
        .t
        .par_iter()
        .map(|&t| -> bozdl_core::Result<_> {
            let ch = Characteristics::new(&profile, t)?;
            let sets = xs.iter().map(|&x| ch.branches(x)).collect::<bozdl_core::Result<Vec<_>>>()?;
            Ok((t, sets, l2_norm_ualt(&profile, t, cfg.points.max(1024))?))
        })
        .collect::<bozdl_core::Result<_>>()?;

    let all: Vec<Branches> = scans.iter().flat_map(|s| s.1.iter().cloned()).collect();
    for s in all.iter().filter(|s| s.retried()) {
        run.manifest.fallback(format!("tangency retry at t = {}, x = {}: solved at x = {}", s.t, s.x, s.solved_x));
    }
    run.write_csv("branches.csv", |b| io::write_branch_scan(b, &all))?;

    let mut columns = vec!["x".to_string()];
    columns.extend(cfg.t.iter().map(|t| format!("u_alt_t{}", tag(*t))));
    let alt: Vec<Vec<f64>> = scans.iter().map(|s| s.1.iter().map(signed_sum).collect()).collect::<Result<_, _>>()?;
    let rows: Vec<Vec<f64>> = (0..xs.len()).map(|j| std::iter::once(xs[j]).chain(alt.iter().map(|a| a[j])).collect()).collect();
    let names: Vec<&str> = columns.iter().map(String::as_str).collect();
    run.write_csv("ualt.csv", |b| io::write_samples(b, &names, &rows))?;

    let bd = breaking_points(&profile);
    let (t_break, x_break) = if bd.t_plus > 0.0 { (bd.t_plus, bd.x_plus) } else { (bd.t_minus, bd.x_minus) };
    let norm0 = input.signal.norm();
    let mut times = Vec::new();
    for (t, sets, l2) in &scans {
        let max_branches = sets.iter().map(|s| s.values.len()).max().unwrap_or(0);
        times.push(json!({
            "t": t,
            "max_branches": max_branches,
            "l2_norm": l2,
            "l2_drop": norm0 - l2,
        }));
        if *t == 0.0 {
            run.manifest.check("single_branch_at_t0", max_branches == 1);
        }
        if (*t - 0.6).abs() < 1e-12 {
            run.manifest.check("l2_drop_at_t0.6", json!({ "drop": norm0 - l2, "strict": *l2 < norm0 }));
        }
        if *t == 1.0 && cfg.cosine_beta().is_some() {
            run.manifest.check("three_branches_at_t1", max_branches == 3);
        }
    }
    let report = json!({
        "breaking_time": t_break,
        "breaking_position": x_break,
        "initial_l2_norm": norm0,
        "frame_shift": input.shift,
        "times": times,
    });
    run.write("breaking.json", serde_json::to_string_pretty(&report)? + "\n")?;

    let series = cfg
        .t
        .iter()
        .zip(&alt)
        .map(|(t, a)| Series { label: format!("t = {}", tag(*t)), points: xs.iter().copied().zip(a.iter().copied()).collect(), markers: false })
        .collect();
    run.write_svg(
        "ualt.svg",
        &Plot { title: "Alternating branch sum".into(), x_label: "x".into(), y_label: "u_alt".into(), series, ..Plot::default() },
    )?;
    run.finish()
}

pub const QUANTIZE_DEFAULTS: crate::config::Defaults = crate::config::Defaults { epsilon: &[0.25], t: &[0.0], k: &[1] };

pub fn quantize(cfg: &Config) -> anyhow::Result<Manifest> {
    let mut run = Run::new("quantize", cfg)?;
    let (beta, delta) = cfg.cosine_window("quantize")?;
    let input = Input::load(cfg)?;
    let results: Vec<_> = cfg
        .epsilon
        .par_iter()
        .map(|&eps| -> bozdl_core::Result<_> {
            let roots = solve_roots(beta, eps, delta)?;
            let spec = if cfg.compare_roots { Some(matrix_spectrum(cfg, &input, eps)?) } else { None };
            Ok((eps, roots, spec))
        })
        .collect::<bozdl_core::Result<_>>()?;
    for (eps, roots, spec) in &results {
        let key = format!("eps={}", tag(*eps));
        let matched = spec.as_ref().map(|s| match_roots(roots, &s.lambdas));
        if let Some(s) = spec {
            log_spectrum(&mut run, &key, s);
        }
        let count = |r: Regime| roots.iter().filter(|x| x.regime == r).count();
        run.manifest.check(
            &key,
            json!({
                "small_roots": count(Regime::Small),
                "large_roots": count(Regime::Large),
                "max_action_residual": roots.iter().map(|r| r.action_residual.abs()).fold(0.0, f64::max),
                "max_match_error": matched.as_ref().map(|m| m.max_error()),
            }),
        );
        run.write_csv(&format!("quantize_eps{}.csv", tag(*eps)), |b| io::write_root_table(b, roots, matched.as_ref()))?;
    }
    if cfg.svg {
        let series = results
            .iter()
            .map(|(eps, roots, _)| Series {
                label: format!("eps = {}", tag(*eps)),
                points: roots.iter().map(|r| (r.nu0, r.nu - r.nu0)).collect(),
                markers: true,
            })
            .collect();
        run.write_svg(
            "quantize.svg",
            &Plot {
                title: format!("Root shift from prediction, beta = {beta}"),
                x_label: "nu0".into(),
                y_label: "nu - nu0".into(),
                series,
                ..Plot::default()
            },
        )?;
    }
    run.finish()
}

pub const EVOLVE_DEFAULTS: crate::config::Defaults = crate::config::Defaults { epsilon: &[0.5], t: &[0.0, 0.5], k: &[1] };

pub fn evolve_cmd(cfg: &Config) -> anyhow::Result<Manifest> {
    let mut run = Run::new("evolve", cfg)?;
    let input = Input::load(cfg)?;
    let profile = input.profile().ok();
    if cfg.synthetic && profile.is_none() {
        input.profile()?;
    }
    if cfg.oracle_pde && !cfg.points.is_power_of_two() {
        return Err(config_error(format!("--oracle-pde needs a power-of-two point count, got {}", cfg.points)));
    }
    let xs = grid(cfg.points);
    let spectra: Vec<Spectrum> = cfg
        .epsilon
        .par_iter()
        .map(|&eps| match (&profile, cfg.synthetic) {
            (Some(p), true) => synth_admissible(p, eps),
            _ => matrix_spectrum(cfg, &input, eps),
        })
        .collect::<bozdl_core::Result<_>>()?;
    let cells: Vec<(usize, f64)> = (0..spectra.len()).flat_map(|e| cfg.t.iter().map(move |&t| (e, t))).collect();
    type Cell = (Vec<f64>, usize, Option<Vec<f64>>, Option<Vec<f64>>);
    let results: Vec<Cell> = cells
        .par_iter()
        .map(|&(e, t)| -> bozdl_core::Result<Cell> {
            let state = evolve(&spectra[e], t);
            let fallbacks = state.shift_matrix(ShiftSource::SpectralFormula)?.fallback_entries;
            let u = reconstruct(&state, &xs)?;
            let alt = match &profile {
                Some(p) => Some(xs.iter().map(|&x| ualt(p, t, x)).collect::<bozdl_core::Result<Vec<_>>>()?),
                None => None,
            };
            let pde = if cfg.oracle_pde {
                let opts = PdeOptions { grid: cfg.points, dt: cfg.pde_dt, ..PdeOptions::default() };
                Some(bo_direct_solve(&input.signal, spectra[e].epsilon, t, opts)?.u)
            } else {
                None
            };
            Ok((u, fallbacks, alt, pde))
        })
        .collect::<bozdl_core::Result<_>>()?;

    for spec in &spectra {
        log_spectrum(&mut run, &format!("eps={}", tag(spec.epsilon)), spec);
    }
    let mut by_eps: BTreeMap<usize, Vec<Series>> = BTreeMap::new();
    for (&(e, t), (u, fallbacks, alt, pde)) in cells.iter().zip(&results) {
        let eps = spectra[e].epsilon;
        let key = format!("eps={}, t={}", tag(eps), tag(t));
        if *fallbacks > 0 {
            run.manifest.fallback(format!("{key}: {fallbacks} shift-matrix entries taken from eigenvectors (zero gap)"));
        }
        let max_diff = |v: &Option<Vec<f64>>| {
            v.as_ref().map(|w| u.iter().zip(w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        };
        run.manifest.check(
            &key,
            json!({
                "norm": grid_norm(u),
                "parseval_norm": spectra[e].parseval_norm_sq().sqrt(),
                "max_diff_ualt": max_diff(alt),
                "max_diff_pde": max_diff(pde),
            }),
        );
        let mut columns = vec!["x", "u_eps"];
        if alt.is_some() {
            columns.push("u_alt");
        }
        if pde.is_some() {
            columns.push("u_pde");
        }
        let rows: Vec<Vec<f64>> = (0..xs.len())
            .map(|j| {
                let mut r = vec![xs[j], u[j]];
                r.extend(alt.as_ref().map(|a| a[j]));
                r.extend(pde.as_ref().map(|p| p[j]));
                r
            })
            .collect();
        run.write_csv(&format!("evolve_eps{}_t{}.csv", tag(eps), tag(t)), |b| io::write_samples(b, &columns, &rows))?;
        by_eps.entry(e).or_default().push(Series {
            label: format!("t = {}", tag(t)),
            points: xs.iter().copied().zip(u.iter().copied()).collect(),
            markers: false,
        });
    }
    for (e, series) in by_eps {
        let eps = spectra[e].epsilon;
        run.write_svg(
            &format!("evolve_eps{}.svg", tag(eps)),
            &Plot { title: format!("Reconstruction at epsilon = {}", tag(eps)), x_label: "x".into(), y_label: "u".into(), series, ..Plot::default() },
        )?;
    }
    run.manifest.check("frame_shift", input.shift);
    run.finish()
}

pub const ZDL_DEFAULTS: crate::config::Defaults =
    crate::config::Defaults { epsilon: &[1.0, 0.5, 0.25, 0.125], t: &[0.25, 1.0], k: &[1, 2] };

pub fn zdl(cfg: &Config) -> anyhow::Result<Manifest> {
    let mut run = Run::new("zdl", cfg)?;
    let input = Input::load(cfg)?;
    let profile = input.profile()?;
    let opts = ZdlOptions {
        k_list: cfg.k.clone(),
        t_list: cfg.t.clone(),
        epsilon_list: cfg.epsilon.clone(),
        truncation: cfg.truncation,
        force_synthetic: cfg.synthetic,
    };
    let rows = zdl_experiment(&profile, &opts)?;
    for r in &rows {
        let key = format!("eps={}", tag(r.epsilon));
        run.manifest.truncations.insert(key.clone(), r.truncation);
        // The shift matrix is shared by every k of a cell.
        if r.fallback_entries > 0 && r.k == cfg.k[0] {
            run.manifest.fallback(format!(
                "{key}, t={}: {} shift-matrix entries taken from eigenvectors (zero gap)",
                tag(r.t),
                r.fallback_entries
            ));
        }
    }
    if let Some(r) = rows.first() {
        run.manifest.check("spectrum_source", format!("{:?}", r.source).to_lowercase());
    }
    let smallest = cfg.epsilon[cfg.epsilon.len() - 1];
    let mut worst = BTreeMap::new();
    for r in rows.iter().filter(|r| r.epsilon == smallest) {
        worst.insert(format!("t={}, k={}", tag(r.t), r.k), r.abs_error);
    }
    run.manifest.check("error_at_smallest_epsilon", worst);
    run.write_csv("zdl.csv", |b| io::write_experiment_table(b, &rows))?;
    for &k in &cfg.k {
        let series = cfg
            .t
            .iter()
            .map(|&t| Series {
                label: format!("t = {}", tag(t)),
                points: rows.iter().filter(|r| r.k == k && r.t == t).map(|r| (r.epsilon, r.abs_error)).collect(),
                markers: true,
            })
            .collect();
        run.write_svg(
            &format!("zdl_k{k}.svg"),
            &Plot {
                title: format!("Fourier mode k = {k}: error vs epsilon"),
                x_label: "epsilon".into(),
                y_label: "abs error".into(),
                log_x: true,
                log_y: true,
                series,
            },
        )?;
    }
    run.finish()
}
