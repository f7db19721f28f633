//! Monte Carlo ensembles of layer-thickness errors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::cavity::CavityAssembly;
use crate::dispersion::{dispersion_minimum, wavelength_grid};
use crate::error::{domain, Error, Result};
use crate::numeric::golden_section_max;
use crate::stack::DielectricStack;

const TRUNCATION: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerturbationSpec {
    /// Relative standard deviation of each layer thickness.
    pub sigma: f64,
    pub trials: usize,
    pub seed: u64,
}

impl PerturbationSpec {
    pub fn new(sigma: f64, trials: usize, seed: u64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(domain(format!("sigma must be non-negative, got {sigma}")));
        }
        if trials == 0 {
            return Err(domain("trials must be at least 1"));
        }
        Ok(Self { sigma, trials, seed })
    }
}

/// Thickness factors for one trial. Each trial has its own ChaCha stream, so
/// the draws do not depend on which thread evaluates it.
pub fn thickness_factors(spec: &PerturbationSpec, trial: u64, layers: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(trial);
    (0..layers)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            1.0 + spec.sigma * z.clamp(-TRUNCATION, TRUNCATION)
        })
        .collect()
}

/// Copy of `stack` with every layer thickness multiplied by an independent
/// factor drawn from N(1, σ), truncated at 10σ.
pub fn perturb_stack(stack: &DielectricStack<f64>, spec: &PerturbationSpec, trial: u64) -> Result<DielectricStack<f64>> {
    let factors = thickness_factors(spec, trial, stack.layers.len());
    let layers = stack
        .layers
        .iter()
        .zip(factors)
        .map(|(l, f)| l.with_thickness(l.thickness() * f))
        .collect::<Result<Vec<_>>>()?;
    DielectricStack::new(stack.ambient, layers, stack.substrate).with_surface_scatter(stack.surface_scatter_loss())
}

/// Where the dispersion curve of each trial is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleSettings {
    /// Expected centre wavelength; the `λ1` grid is placed so that its
    /// `λc` values straddle it.
    pub center_guess: f64,
    pub half_width: f64,
    pub step: f64,
    /// The gap is locked to the resonance nearest `gap_orders·λ1/2`.
    pub gap_orders: f64,
}

impl Default for EnsembleSettings {
    fn default() -> Self {
        Self { center_guess: 847e-9, half_width: 25e-9, step: 0.5e-9, gap_orders: 22.8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialResult {
    pub trial: u64,
    /// Wavelength of minimum mirror transmission.
    pub center_wavelength: f64,
    /// Minimum of the dispersion curve in `λc`.
    pub dispersion_center: f64,
    pub center_transmission: f64,
    pub min_order: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleStats {
    pub trials: usize,
    pub nominal_center_wavelength: f64,
    pub nominal_dispersion_center: f64,
    pub nominal_center_transmission: f64,
    pub nominal_min_order: f64,
    /// RMS shift of the centre from the unperturbed value, nm.
    pub center_rms_shift_nm: f64,
    pub dispersion_center_rms_shift_nm: f64,
    pub mean_center_transmission: f64,
    pub relative_transmission_change: f64,
    pub mean_min_order: f64,
    pub min_order_rms: f64,
    pub per_trial: Vec<TrialResult>,
}

/// Wavelength of minimum transmission near `guess`, from a grid with
/// spacing `step` refined by golden section.
pub fn coating_center(mirror: &DielectricStack<f64>, guess: f64, half_width: f64, step: f64) -> Result<(f64, f64)> {
    let grid = wavelength_grid(guess - half_width, guess + half_width, step)?;
    let values = grid.iter().map(|&w| mirror.transmission(w)).collect::<Result<Vec<_>>>()?;
    let i = (0..grid.len()).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    if i == 0 || i + 1 == grid.len() {
        return Err(Error::Unbracketed(format!("transmission minimum at {} m is on the edge of the grid", grid[i])));
    }
    let (w, neg_t) = golden_section_max(|w| -mirror.transmission(w).unwrap_or(f64::INFINITY), grid[i - 1], grid[i + 1], 1e-15);
    Ok((w, -neg_t))
}

fn evaluate(template: &CavityAssembly<f64>, mirror: &DielectricStack<f64>, grid: &[f64], settings: &EnsembleSettings) -> Result<TrialResult> {
    let (center, t) = coating_center(mirror, settings.center_guess, settings.half_width, settings.step)?;
    let cavity = CavityAssembly::symmetric(mirror.clone(), settings.gap_orders * settings.center_guess / 2.0)?
        .with_curvature(template.roc_a, template.roc_b)?;
    let (dispersion_center, min_order) = dispersion_minimum(&cavity, grid, settings.gap_orders)?;
    Ok(TrialResult { trial: 0, center_wavelength: center, dispersion_center, center_transmission: t, min_order })
}

/// Perturbs both mirrors identically in each trial and records the coating
/// centre (minimum transmission), the transmission there, and the minimum
/// of the fixed-order dispersion curve with its position.
pub fn ensemble_stats(
    template: &CavityAssembly<f64>,
    spec: &PerturbationSpec,
    settings: &EnsembleSettings,
) -> Result<EnsembleStats> {
    // λc sits about half a free spectral range below λ1.
    let lambda_1 = settings.center_guess * (1.0 + 0.5 / settings.gap_orders);
    let grid = wavelength_grid(lambda_1 - settings.half_width, lambda_1 + settings.half_width, settings.step)?;
    let mirror = &template.mirror_a;
    let nominal = evaluate(template, mirror, &grid, settings)?;
    let per_trial = (0..spec.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let perturbed = perturb_stack(mirror, spec, trial)?;
            Ok(TrialResult { trial, ..evaluate(template, &perturbed, &grid, settings)? })
        })
        .collect::<Result<Vec<_>>>()?;

    let n = per_trial.len() as f64;
    let mean = |f: &dyn Fn(&TrialResult) -> f64| per_trial.iter().map(f).sum::<f64>() / n;
    let center_ms = mean(&|r| (r.center_wavelength - nominal.center_wavelength).powi(2));
    let dispersion_ms = mean(&|r| (r.dispersion_center - nominal.dispersion_center).powi(2));
    let mean_t = mean(&|r| r.center_transmission);
    let mean_m = mean(&|r| r.min_order);
    let var_m = mean(&|r| (r.min_order - mean_m).powi(2));
    Ok(EnsembleStats {
        trials: per_trial.len(),
        nominal_center_wavelength: nominal.center_wavelength,
        nominal_dispersion_center: nominal.dispersion_center,
        nominal_center_transmission: nominal.center_transmission,
        nominal_min_order: nominal.min_order,
        center_rms_shift_nm: center_ms.sqrt() * 1e9,
        dispersion_center_rms_shift_nm: dispersion_ms.sqrt() * 1e9,
        mean_center_transmission: mean_t,
        relative_transmission_change: mean_t / nominal.center_transmission - 1.0,
        mean_min_order: mean_m,
        min_order_rms: var_m.sqrt(),
        per_trial,
    })
}
