//! Convergence table `|ε Tr M(t)^k − û_alt(t)(k)|` over a grid of `(ε, t, k)`.

use num_complex::Complex;
use rayon::prelude::*;

use super::{evolve, synth_admissible, validate_phase_convention, ROUND_TRIP_TOLERANCE};
use crate::error::{Error, Result};
use crate::lax::{diagonalize, diagonalize_auto, trace_moment, LaxSpectrum, ShiftSource, SpectrumSource};
use crate::single_well::SingleWellProfile;
use crate::scalar::Real;

/// Inputs of [`zdl_experiment`].
#[derive(Debug, Clone, PartialEq)]
pub struct ZdlOptions<T> {
    pub k_list: Vec<usize>,
    pub t_list: Vec<T>,
    /// Descending dispersion parameters.
    pub epsilon_list: Vec<T>,
    /// Fixed matrix truncation; `None` lets the drift test choose.
    pub truncation: Option<usize>,
    /// Use synthetic spectra even when the profile is a cosine.
    pub force_synthetic: bool,
}

/// One cell of the convergence table.
#[derive(Debug, Clone, PartialEq)]
pub struct ZdlRecord<T> {
    pub epsilon: T,
    pub t: T,
    pub k: usize,
    pub fourier_eps: Complex<T>,
    pub fourier_burgers: Complex<T>,
    pub abs_error: T,
    pub truncation: usize,
    pub fallback_entries: usize,
    pub source: SpectrumSource,
}

/// Runs the zero-dispersion experiment.
///
/// Cosine wells use the true Lax spectrum; other wells use the synthetic
/// admissible spectrum. Rows come out sorted by `(ε, t, k)` in input order.
pub fn zdl_experiment<T: Real>(profile: &SingleWellProfile<T>, opts: &ZdlOptions<T>) -> Result<Vec<ZdlRecord<T>>> {
    if opts.k_list.contains(&0) {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if opts.epsilon_list.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::InvalidParameter("epsilon list must be strictly descending".into()));
    }
    let gate = validate_phase_convention();
    if !(gate <= ROUND_TRIP_TOLERANCE) {
        return Err(Error::ConventionUnvalidated { error: gate });
    }

    let burgers: Vec<Vec<Complex<T>>> = opts
        .t_list
        .par_iter()
        .map(|&t| opts.k_list.iter().map(|&k| profile.branch_fourier(k as i64, t)).collect())
        .collect::<Result<_>>()?;

    let use_matrix = profile.closed_form().is_some() && !opts.force_synthetic;
    let spectra: Vec<LaxSpectrum<T>> = opts
        .epsilon_list
        .par_iter()
        .map(|&eps| match (use_matrix, opts.truncation) {
            (true, Some(n)) => diagonalize(profile.signal(), eps, n),
            (true, None) => diagonalize_auto(profile.signal(), eps),
            (false, _) => synth_admissible(profile, eps),
        })
        .collect::<Result<_>>()?;

    let cells: Vec<(usize, usize)> =
        (0..spectra.len()).flat_map(|e| (0..opts.t_list.len()).map(move |t| (e, t))).collect();
    let rows: Vec<Vec<ZdlRecord<T>>> = cells
        .par_iter()
        .map(|&(e, ti)| {
            let spec = &spectra[e];
            let t = opts.t_list[ti];
            let data = evolve(spec, t).shift_matrix(ShiftSource::SpectralFormula)?;
            Ok(opts
                .k_list
                .iter()
                .enumerate()
                .map(|(ki, &k)| {
                    let fourier_eps = trace_moment(&data, k);
                    let fourier_burgers = burgers[ti][ki];
                    ZdlRecord {
                        epsilon: spec.epsilon,
                        t,
                        k,
                        fourier_eps,
                        fourier_burgers,
                        abs_error: (fourier_eps - fourier_burgers).norm(),
                        truncation: spec.truncation,
                        fallback_entries: data.fallback_entries,
                        source: spec.source,
                    }
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}
