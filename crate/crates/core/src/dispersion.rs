//! Fitting quarter-wave coating parameters to the wavelength dependence of
//! the free spectral range.
//!
//! Each measured pair `(λ1, λ2)` comes from a different, unknown physical
//! gap. The model reproduces a pair by locking its gap so that `λ1` is
//! resonant at the same cavity order as the measurement and predicting the
//! next shorter resonance. Residuals are differences in `L_expt`, expressed
//! in units of `λ1/2` (cavity orders).

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::cavity::{
    adjacent_resonance, find_resonances, fsr_length, gouy_correction, lock_gap_to_resonance, CavityAssembly,
    FsrLengthSample,
};
use crate::error::{domain, Error, Result};
use crate::numeric::{brent_root, parabola_vertex};
use crate::stack::{closed_form_center_transmission, quarter_wave_stack, DielectricStack, MediumIndex};

/// `(HL)^p H` coating on a substrate, in vacuum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoatingModel {
    pub n_high: f64,
    pub n_low: f64,
    pub n_substrate: f64,
    pub pair_count: usize,
    pub design_center: f64,
    pub thickness_scale: f64,
}

impl CoatingModel {
    /// Ta2O5/SiO2, 37 layers, designed for 852 nm on fused silica.
    pub fn nominal() -> Self {
        Self {
            n_high: 2.0411,
            n_low: 1.455,
            n_substrate: 1.5098,
            pair_count: 18,
            design_center: 852e-9,
            thickness_scale: 1.0,
        }
    }

    pub fn mirror(&self) -> Result<DielectricStack<f64>> {
        quarter_wave_stack(
            MediumIndex::new(self.n_high, 0.0)?,
            MediumIndex::new(self.n_low, 0.0)?,
            MediumIndex::new(self.n_substrate, 0.0)?,
            self.pair_count,
            self.design_center,
            self.thickness_scale,
        )
    }

    pub fn center_wavelength(&self) -> f64 {
        self.design_center * self.thickness_scale
    }

    pub fn closed_form_transmission(&self) -> Result<f64> {
        closed_form_center_transmission(self.n_high, self.n_low, 1.0, self.n_substrate, self.pair_count)
    }

    pub fn transmission_at(&self, vacuum_wavelength: f64) -> Result<f64> {
        self.mirror()?.transmission(vacuum_wavelength)
    }

    /// `1/(n_H - n_L)`, the penetration of both coatings in cavity orders.
    pub fn penetration_orders(&self) -> f64 {
        1.0 / (self.n_high - self.n_low)
    }
}

/// One measured resonance pair with the one-sigma uncertainty of each
/// wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasuredPair {
    pub lambda_1: f64,
    pub lambda_2: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersionDataset {
    pub pairs: Vec<MeasuredPair>,
}

impl DispersionDataset {
    pub fn new(pairs: Vec<MeasuredPair>) -> Result<Self> {
        for p in &pairs {
            if !(p.lambda_1 > p.lambda_2 && p.lambda_2 > 0.0) {
                return Err(domain(format!(
                    "pair ({}, {}) must satisfy lambda_1 > lambda_2 > 0",
                    p.lambda_1, p.lambda_2
                )));
            }
            if !(p.sigma > 0.0) {
                return Err(domain(format!("wavelength uncertainty must be positive, got {}", p.sigma)));
            }
        }
        Ok(Self { pairs })
    }

    pub fn samples(&self) -> Result<Vec<FsrLengthSample<f64>>> {
        self.pairs.iter().map(|p| fsr_length(p.lambda_1, p.lambda_2)).collect()
    }

    /// One-sigma uncertainty of each sample's order fraction, propagated
    /// from the wavelength uncertainties.
    pub fn order_sigmas(&self) -> Vec<f64> {
        self.pairs
            .iter()
            .map(|p| {
                let d = p.lambda_1 - p.lambda_2;
                let dl1 = p.lambda_2 * p.lambda_2 / (2.0 * d * d);
                let dl2 = p.lambda_1 * p.lambda_1 / (2.0 * d * d);
                (dl1 * dl1 + dl2 * dl2).sqrt() * p.sigma / (p.lambda_1 / 2.0)
            })
            .collect()
    }

    /// Copy with independent Gaussian noise of width `sigma` added to every
    /// wavelength, optionally rounded to a fixed resolution.
    pub fn with_noise(&self, sigma: f64, seed: u64, resolution: Option<f64>) -> Result<Self> {
        let normal = Normal::new(0.0, sigma).map_err(|e| domain(e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let round = |x: f64| match resolution {
            Some(r) => (x / r).round() * r,
            None => x,
        };
        let pairs = self
            .pairs
            .iter()
            .map(|p| MeasuredPair {
                lambda_1: round(p.lambda_1 + normal.sample(&mut rng)),
                lambda_2: round(p.lambda_2 + normal.sample(&mut rng)),
                sigma: p.sigma.max(sigma),
            })
            .collect();
        Self::new(pairs)
    }
}

/// A simulated pair with the gap that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulatedSample {
    pub gap: f64,
    pub sample: FsrLengthSample<f64>,
    /// Set when either wavelength sees a mirror reflectance below 0.99,
    /// i.e. the pair is at or beyond the stopband edge.
    pub flagged: bool,
}

const STOPBAND_REFLECTANCE: f64 = 0.99;

fn gouy_orders(cavity: &CavityAssembly<f64>, gap: f64) -> Result<f64> {
    if cavity.roc_a.is_infinite() && cavity.roc_b.is_infinite() {
        return Ok(0.0);
    }
    gouy_correction(gap, cavity.roc_a, cavity.roc_b)
}

fn simulated(cavity: &CavityAssembly<f64>, lambda_1: f64, lambda_2: f64) -> Result<SimulatedSample> {
    let mut sample = fsr_length(lambda_1, lambda_2)?;
    let gouy = gouy_orders(cavity, cavity.gap())?;
    sample.l_expt += gouy * lambda_1 / 2.0;
    sample.order_fraction += gouy;
    let r = |w: f64| -> Result<f64> {
        Ok(cavity.mirror_a.reflectance(w)?.min(cavity.mirror_b.reflectance(w)?))
    };
    let flagged = r(lambda_1)? < STOPBAND_REFLECTANCE || r(lambda_2)? < STOPBAND_REFLECTANCE;
    Ok(SimulatedSample { gap: cavity.gap(), sample, flagged })
}

/// Every pair of adjacent resonances inside `window` for each gap. The
/// Gouy correction is added when the template has curved mirrors.
pub fn simulate_dispersion(template: &CavityAssembly<f64>, gaps: &[f64], window: (f64, f64)) -> Result<Vec<SimulatedSample>> {
    let per_gap = gaps
        .par_iter()
        .map(|&gap| {
            let cavity = template.with_gap(gap)?;
            let set = find_resonances(&cavity, window, None, 1e-18)?;
            set.resonances
                .windows(2)
                .map(|w| simulated(&cavity, w[0].wavelength, w[1].wavelength))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_gap.into_iter().flatten().collect())
}

/// The measurement protocol: for each `λ1`, the gap is set so that `λ1`
/// resonates with `L_expt/(λ1/2)` close to `order_guess`, and the next
/// shorter resonance is `λ2`.
pub fn simulate_fixed_order(template: &CavityAssembly<f64>, model: &CoatingModel, lambda_1: &[f64], order_guess: f64) -> Result<Vec<SimulatedSample>> {
    lambda_1
        .par_iter()
        .map(|&l1| {
            let near = (order_guess - model.penetration_orders()) * l1 / 2.0;
            let gap = lock_gap_to_resonance(template, l1, near)?;
            let cavity = template.with_gap(gap)?;
            let l2 = adjacent_resonance(&cavity, l1, true)?;
            simulated(&cavity, l1, l2)
        })
        .collect()
}

/// Wavelengths `start, start + step, ...` up to `stop` inclusive.
pub fn wavelength_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop >= start) {
        return Err(domain("wavelength grid needs step > 0 and stop >= start"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + step * i as f64).collect())
}

pub fn dataset_from_simulation(samples: &[SimulatedSample], sigma: f64) -> Result<DispersionDataset> {
    DispersionDataset::new(
        samples
            .iter()
            .map(|s| MeasuredPair { lambda_1: s.sample.lambda_1, lambda_2: s.sample.lambda_2, sigma })
            .collect(),
    )
}

/// Vertex of the parabola through the lowest order-fraction sample and its
/// two neighbours in `λc`. Returns `(λc, order fraction)` at the vertex.
pub fn find_center_wavelength(samples: &[FsrLengthSample<f64>]) -> Result<(f64, f64)> {
    if samples.len() < 3 {
        return Err(Error::Unbracketed("need at least three samples".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.lambda_c.total_cmp(&b.lambda_c));
    let i = sorted
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.order_fraction.total_cmp(&b.1.order_fraction))
        .map(|(i, _)| i)
        .unwrap();
    if i == 0 || i + 1 == sorted.len() {
        return Err(Error::Unbracketed(format!(
            "lowest sample at {} m is on the edge of the data",
            sorted[i].lambda_c
        )));
    }
    let x = [sorted[i - 1].lambda_c, sorted[i].lambda_c, sorted[i + 1].lambda_c];
    let y = [sorted[i - 1].order_fraction, sorted[i].order_fraction, sorted[i + 1].order_fraction];
    parabola_vertex(x, y).ok_or_else(|| Error::Unbracketed("samples do not form a minimum".into()))
}

/// How the plane-wave model is compared with measured lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitSettings {
    /// Mirror radii of curvature, needed for the Gouy correction.
    pub roc: Option<(f64, f64)>,
    /// Add the Gouy correction to model lengths in the primary fit.
    pub apply_gouy: bool,
    /// Wavelength at which a measured transmission applies.
    pub measurement_wavelength: f64,
    pub max_iters: u64,
    pub restarts: usize,
}

impl Default for FitSettings {
    fn default() -> Self {
        Self { roc: None, apply_gouy: false, measurement_wavelength: 852e-9, max_iters: 400, restarts: 4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitMode {
    FixedNl,
    BothIndices,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoatingFit {
    pub mode: FitMode,
    pub model: CoatingModel,
    pub center_wavelength: f64,
    /// Closed-form transmission at the coating centre.
    pub inferred_t: f64,
    pub inferred_t_sigma: f64,
    /// Full-matrix transmission at the measurement wavelength.
    pub transmission_at_measurement: f64,
    pub n_high_sigma: f64,
    pub n_low_sigma: f64,
    pub thickness_scale_sigma: f64,
    /// Residuals in cavity orders, in dataset order.
    pub residuals: Vec<f64>,
    pub residual_rms: f64,
    pub chi2: f64,
    pub gouy_applied: bool,
    /// Change of `inferred_t` when the Gouy setting is flipped and the fit
    /// repeated; present when radii of curvature were supplied.
    pub gouy_t_shift: Option<f64>,
}

/// Model-minus-measured `L_expt` for each pair, in units of `λ1/2`.
pub fn dispersion_residuals(data: &DispersionDataset, model: &CoatingModel, settings: &FitSettings) -> Result<Vec<f64>> {
    let mirror = model.mirror()?;
    let mut template = CavityAssembly::symmetric(mirror, 0.0)?;
    if settings.apply_gouy {
        let (ra, rb) = settings
            .roc
            .ok_or_else(|| domain("the Gouy correction needs mirror radii of curvature"))?;
        template = template.with_curvature(ra, rb)?;
    }
    let samples = data.samples()?;
    samples
        .par_iter()
        .map(|s| pair_residual(&template, model, s))
        .collect()
}

fn pair_residual(template: &CavityAssembly<f64>, model: &CoatingModel, measured: &FsrLengthSample<f64>) -> Result<f64> {
    let l1 = measured.lambda_1;
    let half = l1 / 2.0;
    let mut near = (measured.order_fraction - model.penetration_orders()) * half;
    let mut last = f64::NAN;
    // The penetration estimate can be off by a sizeable fraction of an order
    // away from the coating centre; step to the order that matches.
    for _ in 0..3 {
        let gap = lock_gap_to_resonance(template, l1, near)?;
        let cavity = template.with_gap(gap)?;
        let l2 = adjacent_resonance(&cavity, l1, true)?;
        let predicted = fsr_length(l1, l2)?.l_expt + gouy_orders(&cavity, gap)? * half;
        last = (predicted - measured.l_expt) / half;
        if last.abs() < 0.5 {
            return Ok(last);
        }
        near = gap - last.round() * half;
    }
    Ok(last)
}

fn chi2(residuals: &[f64], sigmas: &[f64]) -> f64 {
    residuals.iter().zip(sigmas).map(|(r, s)| (r / s).powi(2)).sum()
}

/// Weighted sum of squared residuals, the objective both fits minimize.
pub fn dispersion_objective(data: &DispersionDataset, model: &CoatingModel, settings: &FitSettings) -> Result<f64> {
    Ok(chi2(&dispersion_residuals(data, model, settings)?, &data.order_sigmas()))
}

const PENALTY: f64 = 1e30;
const SCALE_RANGE: (f64, f64) = (0.8, 1.2);
const N_HIGH_MAX: f64 = 3.5;
const MIN_CONTRAST: f64 = 0.05;

struct Problem<'a> {
    data: &'a DispersionDataset,
    base: CoatingModel,
    settings: FitSettings,
    sigmas: Vec<f64>,
    constraint: Option<f64>,
}

impl Problem<'_> {
    fn model_for(&self, p: &[f64]) -> Result<CoatingModel> {
        let (n_high, scale) = (p[0], p[1]);
        if !(scale > SCALE_RANGE.0 && scale < SCALE_RANGE.1) || !(n_high < N_HIGH_MAX) {
            return Err(domain("parameters out of range"));
        }
        let mut model = CoatingModel { n_high, thickness_scale: scale, ..self.base };
        if let Some(target) = self.constraint {
            model.n_low = solve_n_low(&model, target, self.settings.measurement_wavelength)?;
        }
        if !(model.n_high - model.n_low > MIN_CONTRAST) {
            return Err(domain("index contrast too small"));
        }
        Ok(model)
    }

    fn chi2_at(&self, p: &[f64]) -> f64 {
        self.model_for(p)
            .and_then(|m| dispersion_residuals(self.data, &m, &self.settings))
            .map(|r| chi2(&r, &self.sigmas))
            .unwrap_or(PENALTY)
    }
}

impl CostFunction for Problem<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        Ok(self.chi2_at(p))
    }
}

/// Low index that makes the full-matrix transmission at `wavelength` equal
/// `target` for the model's high index and thickness.
fn solve_n_low(model: &CoatingModel, target: f64, wavelength: f64) -> Result<f64> {
    let f = |n_low: f64| -> f64 {
        let m = CoatingModel { n_low, ..*model };
        m.transmission_at(wavelength).map(|t| (t / target).ln()).unwrap_or(f64::NAN)
    };
    let hi = model.n_high - MIN_CONTRAST;
    let lo = 1.0_f64.max(model.n_high * 0.5);
    brent_root(f, lo, hi, 1e-13, 200)
}

fn minimize<'a>(problem: Problem<'a>, start: [f64; 2], settings: &FitSettings) -> Result<(Vec<f64>, f64, Problem<'a>)> {
    let mut best = start.to_vec();
    let mut best_cost = problem.chi2_at(&best);
    if best_cost >= PENALTY {
        return Err(Error::Fit("model cannot reproduce the data at the starting point".into()));
    }
    let mut size = [0.01, 0.004];
    let mut problem = problem;
    for _ in 0..=settings.restarts {
        let simplex = vec![
            best.clone(),
            vec![best[0] + size[0], best[1]],
            vec![best[0], best[1] + size[1]],
        ];
        let solver = NelderMead::new(simplex)
            .with_sd_tolerance(1e-12)
            .map_err(|e| Error::Fit(e.to_string()))?;
        let res = Executor::new(problem, solver)
            .configure(|s| s.max_iters(settings.max_iters))
            .run()
            .map_err(|e| Error::Fit(e.to_string()))?;
        let state = res.state();
        let cost = state.get_best_cost();
        let param = state.get_best_param().cloned().unwrap_or_else(|| best.clone());
        problem = res.problem.problem.expect("problem is returned by the executor");
        let improved = best_cost - cost;
        if cost < best_cost {
            best = param;
            best_cost = cost;
        }
        if improved.abs() <= 1e-10 * best_cost.max(1e-6) {
            break;
        }
        size = [size[0] * 0.1, size[1] * 0.1];
    }
    if !best_cost.is_finite() || best_cost >= PENALTY {
        return Err(Error::Fit(format!("no admissible parameters found (chi2 = {best_cost})")));
    }
    Ok((best, best_cost, problem))
}

/// Covariance of `(n_H, scale)` from the curvature of chi2.
fn covariance(problem: &Problem<'_>, p: &[f64], scale_factor: f64) -> [[f64; 2]; 2] {
    let h = [2e-5 * p[0], 2e-6 * p[1]];
    let f = |a: f64, b: f64| problem.chi2_at(&[p[0] + a, p[1] + b]);
    let f0 = f(0.0, 0.0);
    let hxx = (f(h[0], 0.0) - 2.0 * f0 + f(-h[0], 0.0)) / (h[0] * h[0]);
    let hyy = (f(0.0, h[1]) - 2.0 * f0 + f(0.0, -h[1])) / (h[1] * h[1]);
    let hxy = (f(h[0], h[1]) - f(h[0], -h[1]) - f(-h[0], h[1]) + f(-h[0], -h[1])) / (4.0 * h[0] * h[1]);
    // chi2 = chi2_min + dp^T (H/2) dp, so cov = 2 H^-1.
    let det = hxx * hyy - hxy * hxy;
    if !(det > 0.0) || !(hxx > 0.0) {
        return [[f64::NAN; 2]; 2];
    }
    let k = 2.0 * scale_factor / det;
    [[k * hyy, -k * hxy], [-k * hxy, k * hxx]]
}

fn fit(data: &DispersionDataset, base: CoatingModel, constraint: Option<(f64, f64)>, settings: &FitSettings, mode: FitMode) -> Result<CoatingFit> {
    if data.pairs.len() < 3 {
        return Err(domain("need at least three resonance pairs"));
    }
    let samples = data.samples()?;
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), s| (a.min(s.lambda_c), b.max(s.lambda_c)));
    if hi - lo < 30e-9 {
        return Err(domain("samples must span at least 30 nm in centre wavelength"));
    }
    let problem = Problem {
        data,
        base,
        settings: *settings,
        sigmas: data.order_sigmas(),
        constraint: constraint.map(|c| c.0),
    };
    let start = [base.n_high, base.thickness_scale];
    let (best, best_chi2, problem) = minimize(problem, start, settings)?;
    let model = problem.model_for(&best)?;
    let residuals = dispersion_residuals(data, &model, settings)?;
    let dof = (residuals.len() as f64 - 2.0).max(1.0);
    let reduced = best_chi2 / dof;
    if mode == FitMode::BothIndices && reduced > 25.0 {
        return Err(Error::Fit(format!(
            "transmission and dispersion constraints disagree: reduced chi2 = {reduced}"
        )));
    }
    let cov = covariance(&problem, &best, reduced.max(1.0));
    let (s_nh, s_scale) = (cov[0][0].sqrt(), cov[1][1].sqrt());

    let t_of = |m: &CoatingModel| m.closed_form_transmission().unwrap_or(f64::NAN);
    let inferred_t = t_of(&model);
    let h = 1e-6;
    let dt_dnh = match problem.model_for(&[best[0] + h, best[1]]) {
        Ok(m) => (t_of(&m) - inferred_t) / h,
        Err(_) => f64::NAN,
    };
    let mut t_var = (dt_dnh * s_nh).powi(2);
    let mut s_nl = 0.0;
    if let Some((target, target_sigma)) = constraint {
        let dnl_dnh = match problem.model_for(&[best[0] + h, best[1]]) {
            Ok(m) => (m.n_low - model.n_low) / h,
            Err(_) => f64::NAN,
        };
        let shifted = solve_n_low(&model, target + target_sigma, settings.measurement_wavelength)?;
        let from_t = shifted - model.n_low;
        s_nl = ((dnl_dnh * s_nh).powi(2) + from_t.powi(2)).sqrt();
        let with_t = CoatingModel { n_low: shifted, ..model };
        t_var += (t_of(&with_t) - inferred_t).powi(2);
    }

    let gouy_t_shift = match settings.roc {
        Some(_) => {
            let flipped = FitSettings { apply_gouy: !settings.apply_gouy, ..*settings };
            let p2 = Problem { data, base, settings: flipped, sigmas: data.order_sigmas(), constraint: constraint.map(|c| c.0) };
            let (b2, _, p2) = minimize(p2, [best[0], best[1]], &flipped)?;
            let other = t_of(&p2.model_for(&b2)?);
            Some(if settings.apply_gouy { inferred_t - other } else { other - inferred_t })
        }
        None => None,
    };

    let rms = (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt();
    Ok(CoatingFit {
        mode,
        center_wavelength: model.center_wavelength(),
        inferred_t,
        inferred_t_sigma: t_var.sqrt(),
        transmission_at_measurement: model.transmission_at(settings.measurement_wavelength)?,
        n_high_sigma: s_nh,
        n_low_sigma: s_nl,
        thickness_scale_sigma: s_scale,
        model,
        residuals,
        residual_rms: rms,
        chi2: best_chi2,
        gouy_applied: settings.apply_gouy,
        gouy_t_shift,
    })
}

/// Fits `n_H` and the thickness scale with `n_L` held fixed.
pub fn fit_fixed_nl(data: &DispersionDataset, n_low: f64, n_substrate: f64, settings: &FitSettings) -> Result<CoatingFit> {
    let base = CoatingModel { n_low, n_substrate, ..CoatingModel::nominal() };
    fit(data, base, None, settings, FitMode::FixedNl)
}

/// Fits `n_H`, `n_L` and the thickness scale so that the dispersion matches
/// and the transmission at the measurement wavelength equals `measured_t`.
pub fn fit_both_indices(
    data: &DispersionDataset,
    measured_t: f64,
    measured_t_sigma: f64,
    n_substrate: f64,
    settings: &FitSettings,
) -> Result<CoatingFit> {
    if !(measured_t > 0.0 && measured_t < 1.0) {
        return Err(domain(format!("measured transmission must be in (0, 1), got {measured_t}")));
    }
    let base = CoatingModel { n_substrate, ..CoatingModel::nominal() };
    fit(data, base, Some((measured_t, measured_t_sigma.max(0.0))), settings, FitMode::BothIndices)
}

/// Minimum of the simulated dispersion curve: `λ1` is stepped over `grid`
/// with the gap locked to the resonance nearest `gap_orders·λ1/2`, and the
/// lowest order fraction is refined by a parabola through its neighbours.
/// Returns `(λc, order)`.
pub fn dispersion_minimum(template: &CavityAssembly<f64>, lambda_1: &[f64], gap_orders: f64) -> Result<(f64, f64)> {
    let samples: Vec<FsrLengthSample<f64>> = lambda_1
        .iter()
        .map(|&l1| {
            let gap = lock_gap_to_resonance(template, l1, gap_orders * l1 / 2.0)?;
            let cavity = template.with_gap(gap)?;
            let l2 = adjacent_resonance(&cavity, l1, true)?;
            Ok(simulated(&cavity, l1, l2)?.sample)
        })
        .collect::<Result<_>>()?;
    find_center_wavelength(&samples)
}
