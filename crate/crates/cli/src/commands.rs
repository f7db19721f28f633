use serde_json::json;

use coatfit::cavity::{
    cavity_transmission, find_resonances, fsr_length, lock_gap_to_resonance, resonance_ladder, CavityAssembly,
};
use coatfit::description::{parse_cavity, parse_pairs_csv, parse_stack};
use coatfit::dispersion::{
    fit_both_indices, fit_fixed_nl, simulate_fixed_order, wavelength_grid, CoatingFit, CoatingModel, DispersionDataset,
    FitSettings,
};
use coatfit::field::{coupling_g0, field_profile, g0_vs_length, gaussian_waist, mode_volume};
use coatfit::loss::{
    cavity_kappa, finesse_from_budget, partition_loss_two_mirror, partition_loss_with_uncertainty, CqedRates as Rates,
    LengthConvention, MirrorBudget, PowerTriple, PowerUncertainty,
};
use coatfit::perturb::{ensemble_stats, EnsembleSettings, PerturbationSpec};
use coatfit::stack::DielectricStack;

use crate::args::*;
use crate::error::{parse_error, CliError, InModule};
use crate::output::{Primary, Rendered, RunManifest, Table};

const NM: f64 = 1e9;
const PPM: f64 = 1e6;

fn stack(manifest: &mut RunManifest, path: &std::path::Path) -> Result<DielectricStack<f64>, CliError> {
    let text = manifest.read(path)?;
    parse_stack(&text).map_err(|e| parse_error(path, e))?.build().in_module("stack_model")
}

fn cavity(manifest: &mut RunManifest, path: &std::path::Path) -> Result<CavityAssembly<f64>, CliError> {
    let text = manifest.read(path)?;
    parse_cavity(&text).map_err(|e| parse_error(path, e))?.build().in_module("cavity_spectra")
}

fn pairs(manifest: &mut RunManifest, path: &std::path::Path) -> Result<DispersionDataset, CliError> {
    let text = manifest.read(path)?;
    let pairs = parse_pairs_csv(&text).map_err(|e| parse_error(path, e))?;
    DispersionDataset::new(pairs).in_module("dispersion_fit")
}

fn csv(table: Table) -> Rendered {
    Rendered { primary: Primary::Csv(table), extra: Vec::new() }
}

pub fn simulate_stack(a: &SimulateStack, m: &mut RunManifest) -> Result<Rendered, CliError> {
    let s = stack(m, &a.stack)?;
    let grid = wavelength_grid(a.from_nm / NM, a.to_nm / NM, a.step_nm / NM).in_module("stack_model")?;
    let mut t = Table::new(&["wavelength_nm", "T_ppm", "R"]);
    for w in grid {
        t.push(&[w * NM, s.transmission(w).in_module("stack_model")? * PPM, s.reflectance(w).in_module("stack_model")?]);
    }
    Ok(csv(t))
}

pub fn find(a: &FindResonances, m: &mut RunManifest) -> Result<Rendered, CliError> {
    let c = cavity(m, &a.cavity)?;
    let set = find_resonances(&c, (a.from_nm / NM, a.to_nm / NM), a.step_nm.map(|s| s / NM), 1e-18)
        .in_module("cavity_spectra")?;
    let mut t = Table::new(&["wavelength_nm", "peak_T"]);
    for r in &set.resonances {
        t.push(&[r.wavelength * NM, r.peak_transmission]);
    }
    Ok(csv(t))
}

pub fn predict(a: &PredictResonances, m: &mut RunManifest) -> Result<Rendered, CliError> {
    let c = cavity(m, &a.cavity)?;
    let lock = a.lock_nm / NM;
    let gap = lock_gap_to_resonance(&c, lock, c.gap()).in_module("cavity_spectra")?;
    let c = c.with_gap(gap).in_module("cavity_spectra")?;
    let ladder = resonance_ladder(&c, lock, a.shorter, a.longer).in_module("cavity_spectra")?;
    let mut t = Table::new(&["order_offset", "wavelength_nm", "peak_T", "gap_nm"]);
    for (i, w) in ladder.iter().enumerate() {
        let offset = i as i64 - a.longer as i64;
        let peak = cavity_transmission(&c, *w).in_module("cavity_spectra")?;
        t.push_raw(vec![offset.to_string(), crate::output::fmt(w * NM), crate::output::fmt(peak), crate::output::fmt(gap * NM)]);
    }
    Ok(csv(t))
}

pub fn fsr_table(a: &FsrTable, m: &mut RunManifest) -> Result<Rendered, CliError> {
    let samples = match (&a.data, &a.stack) {
        (Some(path), None) => pairs(m, path)?.samples().in_module("cavity_spectra")?,
        (None, Some(path)) => {
            let mirror = stack(m, path)?;
            let model = model_for(&mirror);
            let mut template = CavityAssembly::symmetric(mirror, 0.0).in_module("cavity_spectra")?;
            if let Some(r) = a.roc_cm {
                template = template.with_curvature(r / 100.0, r / 100.0).in_module("cavity_spectra")?;
            }
            let grid = wavelength_grid(a.from_nm / NM, a.to_nm / NM, a.step_nm / NM).in_module("dispersion_fit")?;
            simulate_fixed_order(&template, &model, &grid, a.order.unwrap_or_default())
                .in_module("dispersion_fit")?
                .into_iter()
                .map(|s| s.sample)
                .collect()
        }
        _ => return Err(CliError::Usage("give exactly one of --data or --stack".into())),
    };
    let mut t = Table::new(&["lambda1_nm", "lambda2_nm", "lambda_c_nm", "L_expt_nm", "order_fraction"]);
    for s in samples {
        t.push(&[s.lambda_1 * NM, s.lambda_2 * NM, s.lambda_c * NM, s.l_expt * NM, s.order_fraction]);
    }
    Ok(csv(t))
}

/// Penetration estimate for the gap lock, from the first two layers.
fn model_for(mirror: &DielectricStack<f64>) -> CoatingModel {
    let n = |i: usize| mirror.layers.get(i).map(|l| l.index.real_part());
    let (nh, nl) = match (n(0), n(1)) {
        (Some(a), Some(b)) => (a.max(b), a.min(b)),
        _ => (f64::INFINITY, 0.0),
    };
    CoatingModel { n_high: nh, n_low: nl, ..CoatingModel::nominal() }
}

fn fit_json(f: &CoatingFit) -> serde_json::Value {
    json!({
        "mode": f.mode,
        "n_high": f.model.n_high,
        "n_high_sigma": f.n_high_sigma,
        "n_low": f.model.n_low,
        "n_low_sigma": f.n_low_sigma,
        "n_substrate": f.model.n_substrate,
        "layers": 2 * f.model.pair_count + 1,
        "thickness_scale": f.model.thickness_scale,
        "thickness_scale_sigma": f.thickness_scale_sigma,
        "center_wavelength_nm": f.center_wavelength * NM,
        "inferred_T_ppm": f.inferred_t * PPM,
        "inferred_T_sigma_ppm": f.inferred_t_sigma * PPM,
        "T_at_measurement_ppm": f.transmission_at_measurement * PPM,
        "residual_rms_orders": f.residual_rms,
        "chi2": f.chi2,
        "gouy_applied": f.gouy_applied,
        "gouy_T_shift_ppm": f.gouy_t_shift.map(|x| x * PPM),
    })
}

pub fn fit(a: &FitDispersion, m: &mut RunManifest) -> Result<Rendered, CliError> {
    let data = pairs(m, &a.data)?;
    let settings = FitSettings {
        roc: a.roc_cm.map(|r| (r / 100.0, r / 100.0)),
        apply_gouy: a.apply_gouy,
        measurement_wavelength: a.measurement_nm / NM,
        ..FitSettings::default()
    };
    let fit = match a.mode {
        FitModeArg::FixedNl => fit_fixed_nl(&data, a.nl, a.n_sub, &settings),
        FitModeArg::Both => {
            let t = a.measured_t_ppm.ok_or_else(|| CliError::Usage("--measured-t-ppm is required with --mode both".into()))?;
            fit_both_indices(&data, t / PPM, a.measured_t_sigma_ppm / PPM, a.n_sub, &settings)
        }
    }
    .in_module("dispersion_fit")?;
    let mut extra = Vec::new();
    if let Some(path) = &a.residuals_out {
        let sigmas = data.order_sigmas();
        let mut t = Table::new(&["lambda1_nm", "lambda2_nm", "lambda_c_nm", "order_fraction", "residual_orders", "sigma_orders"]);
        for ((p, r), s) in data.pairs.iter().zip(&fit.residuals).zip(&sigmas) {
            let sample = fsr_length(p.lambda_1, p.lambda_2).in_module("cavity_spectra")?;
            t.push(&[p.lambda_1 * NM, p.lambda_2 * NM, sample.lambda_c * NM, sample.order_fraction, *r, *s]);
        }
        extra.push((path.clone(), t));
    }
    Ok(Rendered { primary: Primary::Json(fit_json(&fit)), extra })
}

pub fn loss(a: &LossPartition, _m: &mut RunManifest) -> Result<Rendered, CliError> {
    let uw = 1e-6;
    let triple = PowerTriple { p_in: a.pin_uw * uw, p_reflected: a.pr_uw * uw, p_transmitted: a.pt_uw * uw, finesse: a.finesse };
    let value = match a.known_t1_ppm {
        None => {
            let sigma = PowerUncertainty {
                p_in: a.sigma_pin_uw * uw,
                p_reflected: a.sigma_pr_uw * uw,
                p_transmitted: a.sigma_pt_uw * uw,
                finesse: a.sigma_finesse,
            };
            let (b, u) = partition_loss_with_uncertainty(&triple, &sigma).in_module("loss_analysis")?;
            json!({
                "T_ppm": b.transmission * PPM,
                "l_ppm": b.loss * PPM,
                "total_loss_ppm": b.total_loss * PPM,
                "epsilon": b.mode_matching,
                "uncertainties": {
                    "T_ppm": u.transmission * PPM,
                    "l_ppm": u.loss * PPM,
                    "epsilon": u.mode_matching,
                },
            })
        }
        Some(t1) => {
            let b = partition_loss_two_mirror(&triple, Some(t1 / PPM)).in_module("loss_analysis")?;
            json!({
                "T1_ppm": b.transmission_1 * PPM,
                "T2_ppm": b.transmission_2 * PPM,
                "combined_loss_ppm": b.combined_loss * PPM,
                "epsilon": b.mode_matching,
            })
        }
    };
    Ok(Rendered { primary: Primary::Json(value), extra: Vec::new() })
}

pub fn field(a: &FieldProfile, m: &mut RunManifest) -> Result<Rendered, CliError> {
    let mut c = cavity(m, &a.cavity)?;
    let w = a.wavelength_nm / NM;
    if a.lock {
        let gap = lock_gap_to_resonance(&c, w, c.gap()).in_module("cavity_spectra")?;
        c = c.with_gap(gap).in_module("cavity_spectra")?;
    }
    let p = field_profile(&c, w, a.step_nm.map(|s| s / NM)).in_module("field_mode")?;
    let mut t = Table::new(&["z_nm", "n", "absE"]);
    for ((z, n), e) in p.z.iter().zip(&p.index).zip(&p.abs_e) {
        t.push(&[z * NM, *n, *e]);
    }
    Ok(csv(t))
}

pub fn g0_curve(a: &G0Curve, m: &mut RunManifest) -> Result<Rendered, CliError> {
    let mirror = stack(m, &a.stack)?;
    if a.points < 2 || !(a.from_um > 0.0 && a.to_um > a.from_um) {
        return Err(CliError::Usage("need --points >= 2 and 0 < --from-um < --to-um".into()));
    }
    let ratio = (a.to_um / a.from_um).ln() / (a.points - 1) as f64;
    let gaps: Vec<f64> = (0..a.points).map(|i| a.from_um * 1e-6 * (ratio * i as f64).exp()).collect();
    let curve = g0_vs_length(&mirror, a.roc_cm / 100.0, &gaps, a.gamma_mhz * 1e6, a.lock_nm / NM).in_module("field_mode")?;
    let mut t = Table::new(&["L_um", "g0_real_MHz", "g0_ideal_MHz"]);
    for p in curve {
        t.push(&[p.gap * 1e6, p.g0_real / 1e6, p.g0_ideal / 1e6]);
    }
    Ok(csv(t))
}

pub fn perturb(a: &Perturb, m: &mut RunManifest) -> Result<Rendered, CliError> {
    let mirror = stack(m, &a.stack)?;
    let spec = PerturbationSpec::new(a.sigma, a.trials, a.seed).in_module("perturbation")?;
    let settings = EnsembleSettings {
        center_guess: a.center_nm / NM,
        half_width: a.half_width_nm / NM,
        step: a.step_nm / NM,
        gap_orders: a.gap_orders,
    };
    let template = CavityAssembly::symmetric(mirror, 0.0).in_module("cavity_spectra")?;
    let s = ensemble_stats(&template, &spec, &settings).in_module("perturbation")?;
    let mut extra = Vec::new();
    if let Some(path) = &a.trials_out {
        let mut t = Table::new(&["trial", "center_nm", "dispersion_center_nm", "center_T_ppm", "min_order"]);
        for r in &s.per_trial {
            t.push_raw(vec![
                r.trial.to_string(),
                crate::output::fmt(r.center_wavelength * NM),
                crate::output::fmt(r.dispersion_center * NM),
                crate::output::fmt(r.center_transmission * PPM),
                crate::output::fmt(r.min_order),
            ]);
        }
        extra.push((path.clone(), t));
    }
    let value = json!({
        "trials": s.trials,
        "nominal_center_nm": s.nominal_center_wavelength * NM,
        "nominal_dispersion_center_nm": s.nominal_dispersion_center * NM,
        "nominal_center_T_ppm": s.nominal_center_transmission * PPM,
        "nominal_min_order": s.nominal_min_order,
        "center_rms_shift_nm": s.center_rms_shift_nm,
        "dispersion_center_rms_shift_nm": s.dispersion_center_rms_shift_nm,
        "mean_center_T_ppm": s.mean_center_transmission * PPM,
        "relative_T_change": s.relative_transmission_change,
        "mean_min_order": s.mean_min_order,
        "min_order_rms": s.min_order_rms,
    });
    Ok(Rendered { primary: Primary::Json(value), extra })
}

pub fn cqed(a: &CqedRates, m: &mut RunManifest) -> Result<Rendered, CliError> {
    let mirror = stack(m, &a.stack)?;
    let lock = a.lock_nm / NM;
    let roc = a.roc_cm / 100.0;
    let template = CavityAssembly::symmetric(mirror, 0.0)
        .and_then(|c| c.with_curvature(roc, roc))
        .in_module("cavity_spectra")?;
    let gap = lock_gap_to_resonance(&template, lock, a.gap_nm / NM).in_module("cavity_spectra")?;
    let c = template.with_gap(gap).in_module("cavity_spectra")?;
    let geometry = mode_volume(&c, lock).in_module("field_mode")?;
    let gamma = a.gamma_mhz * 1e6;
    let g0 = coupling_g0(&geometry, lock, gamma).in_module("field_mode")?;
    let (t, l) = (a.t_ppm / PPM, a.l_ppm / PPM);
    let budget = MirrorBudget { transmission: t, loss: l, total_loss: t + l, mode_matching: 1.0 };
    let kappa = cavity_kappa(&budget, gap, LengthConvention::Physical).in_module("loss_analysis")?;
    let rates = Rates::new(g0, kappa, gamma).in_module("loss_analysis")?;
    let waist = gaussian_waist(gap, roc, roc, lock).in_module("field_mode")?;
    let value = json!({
        "gap_nm": gap * NM,
        "finesse": finesse_from_budget(t, t, l, l).in_module("loss_analysis")?,
        "waist_um": waist * 1e6,
        "longitudinal_length_nm": geometry.longitudinal_length * NM,
        "mode_volume_um3": geometry.volume * 1e18,
        "g0_MHz": rates.g0 / 1e6,
        "kappa_MHz": rates.kappa / 1e6,
        "gamma_MHz": rates.gamma_perp / 1e6,
        "n0": rates.n0,
        "N0": rates.big_n0,
    });
    Ok(Rendered { primary: Primary::Json(value), extra: Vec::new() })
}
