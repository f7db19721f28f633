use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Dielectric mirror and short Fabry-Perot cavity modelling.
///
/// Wavelengths and lengths on the command line are in the unit named by the
/// flag. Results go to stdout, or to `--out`; CSV written to a file gets a
/// `<file>.manifest.json` sidecar, JSON embeds its manifest.
#[derive(Debug, Parser)]
#[command(name = "coatfit", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Transmission and reflectance spectrum of a stack.
    SimulateStack(SimulateStack),
    /// All resonances of a cavity in a wavelength window.
    FindResonances(FindResonances),
    /// Lock a cavity to a wavelength and list neighbouring resonances.
    PredictResonances(PredictResonances),
    /// L_expt, λc and order fraction for measured or simulated pairs.
    FsrTable(FsrTable),
    /// Fit coating indices and thickness to resonance pairs.
    FitDispersion(FitDispersion),
    /// Split round-trip loss into transmission and absorption/scatter.
    LossPartition(LossPartition),
    /// |E| through a cavity driven at one wavelength.
    FieldProfile(FieldProfile),
    /// g0 against mirror separation for real and ideal mirrors.
    G0Curve(G0Curve),
    /// Monte Carlo over layer-thickness errors.
    Perturb(Perturb),
    /// Coupling, decay rates and critical numbers of a cavity.
    CqedRates(CqedRates),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::SimulateStack(_) => "simulate-stack",
            Self::FindResonances(_) => "find-resonances",
            Self::PredictResonances(_) => "predict-resonances",
            Self::FsrTable(_) => "fsr-table",
            Self::FitDispersion(_) => "fit-dispersion",
            Self::LossPartition(_) => "loss-partition",
            Self::FieldProfile(_) => "field-profile",
            Self::G0Curve(_) => "g0-curve",
            Self::Perturb(_) => "perturb",
            Self::CqedRates(_) => "cqed-rates",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct Output {
    /// Write the primary result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateStack {
    /// Stack description JSON.
    #[arg(long)]
    pub stack: PathBuf,
    #[arg(long, default_value_t = 700.0)]
    pub from_nm: f64,
    #[arg(long, default_value_t = 1000.0)]
    pub to_nm: f64,
    #[arg(long, default_value_t = 1.0)]
    pub step_nm: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct FindResonances {
    /// Cavity description JSON.
    #[arg(long)]
    pub cavity: PathBuf,
    #[arg(long)]
    pub from_nm: f64,
    #[arg(long)]
    pub to_nm: f64,
    /// Coarse scan step; defaults to 1/200 of the estimated free spectral range.
    #[arg(long)]
    pub step_nm: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct PredictResonances {
    /// Cavity description JSON; its gap is the starting guess for the lock.
    #[arg(long)]
    pub cavity: PathBuf,
    /// Wavelength made exactly resonant by adjusting the gap.
    #[arg(long)]
    pub lock_nm: f64,
    /// Number of resonances listed on the short-wavelength side.
    #[arg(long, default_value_t = 2)]
    pub shorter: usize,
    /// Number of resonances listed on the long-wavelength side.
    #[arg(long, default_value_t = 2)]
    pub longer: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct FsrTable {
    /// Measured pairs CSV (lambda1_nm, lambda2_nm[, sigma_nm]).
    #[arg(long, conflicts_with = "stack")]
    pub data: Option<PathBuf>,
    /// Simulate the fixed-order measurement with this mirror on both sides.
    #[arg(long, requires = "order")]
    pub stack: Option<PathBuf>,
    /// Approximate L_expt/(λ1/2) of the simulated cavity.
    #[arg(long)]
    pub order: Option<f64>,
    #[arg(long, default_value_t = 820.0)]
    pub from_nm: f64,
    #[arg(long, default_value_t = 900.0)]
    pub to_nm: f64,
    #[arg(long, default_value_t = 4.0)]
    pub step_nm: f64,
    /// Mirror radius of curvature; adds the Gouy correction to simulated pairs.
    #[arg(long)]
    pub roc_cm: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitModeArg {
    FixedNl,
    Both,
}

#[derive(Debug, Args, Serialize)]
pub struct FitDispersion {
    /// Measured pairs CSV (lambda1_nm, lambda2_nm[, sigma_nm]).
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum, default_value_t = FitModeArg::FixedNl)]
    pub mode: FitModeArg,
    /// Low index held fixed in `fixed-nl` mode.
    #[arg(long, default_value_t = 1.455)]
    pub nl: f64,
    #[arg(long, default_value_t = 1.5098)]
    pub n_sub: f64,
    /// Measured mirror transmission, required in `both` mode.
    #[arg(long, required_if_eq("mode", "both"))]
    pub measured_t_ppm: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub measured_t_sigma_ppm: f64,
    /// Wavelength of the transmission measurement.
    #[arg(long, default_value_t = 852.0)]
    pub measurement_nm: f64,
    /// Mirror radius of curvature; enables the Gouy comparison.
    #[arg(long)]
    pub roc_cm: Option<f64>,
    /// Include the Gouy correction in the model (needs --roc-cm).
    #[arg(long, requires = "roc_cm")]
    pub apply_gouy: bool,
    /// Also write per-pair residuals as CSV.
    #[arg(long)]
    pub residuals_out: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct LossPartition {
    #[arg(long)]
    pub pin_uw: f64,
    #[arg(long)]
    pub pr_uw: f64,
    #[arg(long)]
    pub pt_uw: f64,
    #[arg(long)]
    pub finesse: f64,
    #[arg(long, default_value_t = 0.0)]
    pub sigma_pin_uw: f64,
    #[arg(long, default_value_t = 0.0)]
    pub sigma_pr_uw: f64,
    #[arg(long, default_value_t = 0.0)]
    pub sigma_pt_uw: f64,
    #[arg(long, default_value_t = 0.0)]
    pub sigma_finesse: f64,
    /// Input-mirror transmission, for the unequal-mirror partition.
    #[arg(long)]
    pub known_t1_ppm: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct FieldProfile {
    #[arg(long)]
    pub cavity: PathBuf,
    #[arg(long)]
    pub wavelength_nm: f64,
    /// Move the gap to the nearest length resonant at --wavelength-nm.
    #[arg(long)]
    pub lock: bool,
    /// Sampling step; defaults to λ/(200 n) in each region.
    #[arg(long)]
    pub step_nm: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct G0Curve {
    #[arg(long)]
    pub stack: PathBuf,
    #[arg(long, default_value_t = 20.0)]
    pub roc_cm: f64,
    #[arg(long, default_value_t = 852.0)]
    pub lock_nm: f64,
    #[arg(long, default_value_t = 2.6)]
    pub gamma_mhz: f64,
    #[arg(long, default_value_t = 0.426)]
    pub from_um: f64,
    #[arg(long, default_value_t = 100.0)]
    pub to_um: f64,
    /// Number of logarithmically spaced gaps.
    #[arg(long, default_value_t = 25)]
    pub points: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct Perturb {
    #[arg(long)]
    pub stack: PathBuf,
    #[arg(long, default_value_t = 0.01)]
    pub sigma: f64,
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Expected coating centre.
    #[arg(long, default_value_t = 847.0)]
    pub center_nm: f64,
    #[arg(long, default_value_t = 25.0)]
    pub half_width_nm: f64,
    #[arg(long, default_value_t = 0.5)]
    pub step_nm: f64,
    /// Gap lock for the dispersion curve, in units of λ1/2.
    #[arg(long, default_value_t = 22.8)]
    pub gap_orders: f64,
    /// Also write one CSV row per trial.
    #[arg(long)]
    pub trials_out: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct CqedRates {
    #[arg(long)]
    pub stack: PathBuf,
    #[arg(long, default_value_t = 20.0)]
    pub roc_cm: f64,
    /// Requested gap; moved to the nearest length resonant at --lock-nm.
    #[arg(long)]
    pub gap_nm: f64,
    #[arg(long, default_value_t = 852.0)]
    pub lock_nm: f64,
    /// Per-mirror transmission.
    #[arg(long)]
    pub t_ppm: f64,
    /// Per-mirror absorption and scatter.
    #[arg(long)]
    pub l_ppm: f64,
    #[arg(long, default_value_t = 2.6)]
    pub gamma_mhz: f64,
    #[command(flatten)]
    pub output: Output,
}
