//! Two mirrors facing each other across a vacuum gap.
//!
//! Light enters through the substrate of mirror A, crosses A's layers in
//! reverse order, the gap, then B's layers in order and leaves through B's
//! substrate. Both mirrors are described with their ambient medium on the
//! gap side.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::numeric::{brent_root, golden_section_max};
use crate::scalar::Scalar;
use crate::stack::{check_wavelength, DielectricStack, TransferMatrix};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CavityAssembly<T> {
    pub mirror_a: DielectricStack<T>,
    pub mirror_b: DielectricStack<T>,
    gap: T,
    /// Radii of curvature; `T::infinity()` for a flat mirror.
    pub roc_a: T,
    pub roc_b: T,
}

impl<T: Scalar> CavityAssembly<T> {
    pub fn new(mirror_a: DielectricStack<T>, mirror_b: DielectricStack<T>, gap: T) -> Result<Self> {
        if !(gap >= T::zero()) || !gap.is_finite() {
            return Err(domain(format!("gap must be non-negative, got {gap}")));
        }
        if mirror_a.ambient != mirror_b.ambient {
            return Err(domain("both mirrors must face the same gap medium"));
        }
        if !mirror_a.ambient.is_lossless() {
            return Err(domain("gap medium must be lossless"));
        }
        Ok(Self { mirror_a, mirror_b, gap, roc_a: T::infinity(), roc_b: T::infinity() })
    }

    /// Cavity with two copies of one mirror.
    pub fn symmetric(mirror: DielectricStack<T>, gap: T) -> Result<Self> {
        Self::new(mirror.clone(), mirror, gap)
    }

    pub fn with_curvature(mut self, roc_a: T, roc_b: T) -> Result<Self> {
        for r in [roc_a, roc_b] {
            if !(r > T::zero()) {
                return Err(domain(format!("radius of curvature must be positive, got {r}")));
            }
        }
        self.roc_a = roc_a;
        self.roc_b = roc_b;
        Ok(self)
    }

    pub fn gap(&self) -> T {
        self.gap
    }

    pub fn with_gap(&self, gap: T) -> Result<Self> {
        let mut c = Self::new(self.mirror_a.clone(), self.mirror_b.clone(), gap)?;
        c.roc_a = self.roc_a;
        c.roc_b = self.roc_b;
        Ok(c)
    }

    pub fn gap_index(&self) -> T {
        self.mirror_a.ambient.real_part()
    }

    pub fn system_matrix(&self, vacuum_wavelength: T) -> Result<TransferMatrix<T>> {
        check_wavelength(vacuum_wavelength)?;
        let gap = TransferMatrix::slab(self.mirror_a.ambient.complex(), self.gap, vacuum_wavelength);
        Ok(self.mirror_a.reversed_layers_matrix(vacuum_wavelength)
            * self.mirror_a.scatter_sheet()
            * gap
            * self.mirror_b.scatter_sheet()
            * self.mirror_b.layers_matrix(vacuum_wavelength))
    }

    pub fn transmission_coefficient(&self, vacuum_wavelength: T) -> Result<Complex<T>> {
        let m = self.system_matrix(vacuum_wavelength)?;
        Ok(m.transmission_coefficient(self.mirror_a.substrate.complex(), self.mirror_b.substrate.complex()))
    }

    /// Phase of `r_A r_B exp(-2ikL)`, wrapped to `(-π, π]`; zero on resonance.
    pub fn round_trip_phase(&self, vacuum_wavelength: T) -> Result<T> {
        let (ra, rb) = self.mirror_reflections(vacuum_wavelength)?;
        let k = T::two() * T::PI() * self.gap_index() / vacuum_wavelength;
        let prop = Complex::from_polar(T::one(), -T::two() * k * self.gap);
        Ok((ra * rb * prop).arg())
    }

    /// Phase of `r_A r_B` alone.
    pub fn mirror_phase(&self, vacuum_wavelength: T) -> Result<T> {
        let (ra, rb) = self.mirror_reflections(vacuum_wavelength)?;
        Ok((ra * rb).arg())
    }

    fn mirror_reflections(&self, vacuum_wavelength: T) -> Result<(Complex<T>, Complex<T>)> {
        let ra = self.mirror_a.reflection_coefficient(vacuum_wavelength)?;
        if self.mirror_a == self.mirror_b {
            return Ok((ra, ra));
        }
        Ok((ra, self.mirror_b.reflection_coefficient(vacuum_wavelength)?))
    }
}

/// Plane-wave intensity transmission of the whole assembly.
pub fn cavity_transmission<T: Scalar>(cavity: &CavityAssembly<T>, vacuum_wavelength: T) -> Result<T> {
    let t = cavity.transmission_coefficient(vacuum_wavelength)?;
    Ok(cavity.mirror_b.substrate.real_part() / cavity.mirror_a.substrate.real_part() * t.norm_sqr())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resonance<T> {
    pub wavelength: T,
    pub peak_transmission: T,
}

/// Resonances in order of decreasing wavelength.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct ResonanceSet<T> {
    pub resonances: Vec<Resonance<T>>,
}

impl<T: Scalar> ResonanceSet<T> {
    pub fn wavelengths(&self) -> Vec<T> {
        self.resonances.iter().map(|r| r.wavelength).collect()
    }

    pub fn len(&self) -> usize {
        self.resonances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.resonances.is_empty()
    }
}

/// Rough wavelength spacing of adjacent resonances, allowing for about one
/// wavelength of penetration into the coatings.
pub fn fsr_estimate<T: Scalar>(gap: T, vacuum_wavelength: T) -> T {
    let length = gap + vacuum_wavelength;
    vacuum_wavelength * vacuum_wavelength / (T::two() * length)
}

/// Transmission maxima inside `window = (short, long)`.
///
/// The window is sampled every `coarse_step` (default: an FSR estimate over
/// 200), each sampled local maximum is bracketed by its neighbours and then
/// refined by golden-section search to `refine_tol`.
pub fn find_resonances<T: Scalar>(
    cavity: &CavityAssembly<T>,
    window: (T, T),
    coarse_step: Option<T>,
    refine_tol: T,
) -> Result<ResonanceSet<T>> {
    let (lo, hi) = window;
    check_wavelength(lo)?;
    if !(hi > lo) {
        return Err(domain("scan window must have its long edge above its short edge"));
    }
    let step = coarse_step.unwrap_or_else(|| fsr_estimate(cavity.gap, lo) / T::lit(200.0));
    if !(step > T::zero()) {
        return Err(domain(format!("coarse step must be positive, got {step}")));
    }
    let steps = ((hi - lo) / step).floor().to_usize().unwrap_or(0);
    if steps > 50_000_000 {
        return Err(domain("scan window holds too many coarse steps"));
    }
    let mut grid: Vec<T> = (0..=steps).map(|i| lo + step * T::from_usize(i).unwrap()).collect();
    if hi - grid[steps] > step * T::lit(1e-6) {
        grid.push(hi);
    }
    let count = grid.len();
    let values = grid
        .par_iter()
        .map(|&w| cavity_transmission(cavity, w))
        .collect::<Result<Vec<T>>>()?;

    let peaks: Vec<usize> = (1..count.saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] >= values[i + 1])
        .collect();
    for w in peaks.windows(2) {
        if w[1] - w[0] <= 3 {
            return Err(Error::ScanTooCoarse {
                first: grid[w[0]].to_f64().unwrap_or(f64::NAN),
                second: grid[w[1]].to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    let mut resonances = peaks
        .par_iter()
        .map(|&i| {
            let (x, fx) = golden_section_max(
                |w| cavity_transmission(cavity, w).unwrap_or(T::zero()),
                grid[i - 1],
                grid[i + 1],
                refine_tol,
            );
            Resonance { wavelength: x, peak_transmission: fx }
        })
        .collect::<Vec<_>>();
    resonances.reverse();
    Ok(ResonanceSet { resonances })
}

/// Resonance wavelength closest to `guess` within `guess ± half_width`,
/// located as a zero of the round-trip phase.
pub fn resonance_near<T: Scalar>(cavity: &CavityAssembly<T>, guess: T, half_width: T) -> Result<T> {
    resonance_near_sampled(cavity, guess, half_width, 128)
}

fn resonance_near_sampled<T: Scalar>(cavity: &CavityAssembly<T>, guess: T, half_width: T, samples: usize) -> Result<T> {
    let lo = guess - half_width;
    let hi = guess + half_width;
    check_wavelength(lo)?;
    let dx = (hi - lo) / T::from_usize(samples).unwrap();
    let xs: Vec<T> = (0..=samples).map(|i| lo + dx * T::from_usize(i).unwrap()).collect();
    let phases = xs
        .iter()
        .map(|&x| cavity.round_trip_phase(x))
        .collect::<Result<Vec<T>>>()?;
    let limit = T::FRAC_PI_2();
    let mut best: Option<(T, T, T)> = None;
    for i in 0..samples {
        let (pa, pb) = (phases[i], phases[i + 1]);
        // A jump through ±π is an anti-resonance, not a root.
        let crosses = pa == T::zero() || (pa.signum() != pb.signum() && pa.abs() < limit && pb.abs() < limit);
        if !crosses {
            continue;
        }
        let mid = (xs[i] + xs[i + 1]) / T::two();
        let dist = (mid - guess).abs();
        if best.is_none_or(|(d, _, _)| dist < d) {
            best = Some((dist, xs[i], xs[i + 1]));
        }
    }
    let (_, a, b) = best.ok_or_else(|| {
        Error::Search(format!("no resonance within {half_width} of {guess}"))
    })?;
    let tol = guess * T::epsilon() * T::lit(4.0);
    brent_root(|x| cavity.round_trip_phase(x).unwrap_or(T::nan()), a, b, tol, 200)
}

/// Local wavelength spacing of resonances, `2π / |dΦ/dλ|`.
pub fn local_fsr<T: Scalar>(cavity: &CavityAssembly<T>, vacuum_wavelength: T) -> Result<T> {
    let h = vacuum_wavelength * T::lit(1e-7);
    let p1 = cavity.round_trip_phase(vacuum_wavelength - h)?;
    let p2 = cavity.round_trip_phase(vacuum_wavelength + h)?;
    let mut d = p2 - p1;
    let two_pi = T::two() * T::PI();
    while d > T::PI() {
        d = d - two_pi;
    }
    while d < -T::PI() {
        d = d + two_pi;
    }
    let slope = (d / (T::two() * h)).abs();
    if !(slope > T::zero()) {
        return Err(Error::Search("round-trip phase is flat".into()));
    }
    Ok(two_pi / slope)
}

/// Next resonance on the short (`shorter = true`) or long side of the
/// resonance at `from`.
pub fn adjacent_resonance<T: Scalar>(cavity: &CavityAssembly<T>, from: T, shorter: bool) -> Result<T> {
    let fsr = local_fsr(cavity, from)?;
    let guess = if shorter { from - fsr } else { from + fsr };
    let found = resonance_near_sampled(cavity, guess, fsr * T::lit(0.6), 48)?;
    let moved = if shorter { found < from } else { found > from };
    if !moved || (found - from).abs() < fsr * T::lit(0.2) {
        return Err(Error::Search(format!("no adjacent resonance found next to {from}")));
    }
    Ok(found)
}

/// `count_shorter` resonances below and `count_longer` above `start`
/// (itself resonant), sorted by decreasing wavelength and including `start`.
pub fn resonance_ladder<T: Scalar>(
    cavity: &CavityAssembly<T>,
    start: T,
    count_shorter: usize,
    count_longer: usize,
) -> Result<Vec<T>> {
    let mut out = vec![start];
    let mut w = start;
    for _ in 0..count_longer {
        w = adjacent_resonance(cavity, w, false)?;
        out.push(w);
    }
    w = start;
    for _ in 0..count_shorter {
        w = adjacent_resonance(cavity, w, true)?;
        out.push(w);
    }
    out.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(out)
}

/// Gap length nearest `nearest_to` that puts a resonance exactly at
/// `lock_wavelength`.
pub fn lock_gap_to_resonance<T: Scalar>(cavity: &CavityAssembly<T>, lock_wavelength: T, nearest_to: T) -> Result<T> {
    check_wavelength(lock_wavelength)?;
    let phi = cavity.mirror_phase(lock_wavelength)?;
    let k = T::two() * T::PI() * cavity.gap_index() / lock_wavelength;
    let two_pi = T::two() * T::PI();
    let q = ((T::two() * k * nearest_to - phi) / two_pi).round();
    let mut gap = (phi + two_pi * q) / (T::two() * k);
    if gap < T::zero() {
        gap = gap + two_pi / (T::two() * k);
    }
    if !gap.is_finite() || (gap - nearest_to).abs() > lock_wavelength / T::two() {
        return Err(Error::Search(format!(
            "no resonant gap within half a wavelength of {nearest_to}"
        )));
    }
    Ok(gap)
}

/// Length and centre wavelength implied by one pair of adjacent resonances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FsrLengthSample<T> {
    pub lambda_1: T,
    pub lambda_2: T,
    pub lambda_c: T,
    pub l_expt: T,
    pub order_fraction: T,
}

/// `L_expt = λ1 λ2 / 2(λ1 - λ2)` and the frequency-averaged centre
/// `λc = 2 λ1 λ2 / (λ1 + λ2)`.
pub fn fsr_length<T: Scalar>(lambda_1: T, lambda_2: T) -> Result<FsrLengthSample<T>> {
    check_wavelength(lambda_2)?;
    if !(lambda_1 > lambda_2) || !lambda_1.is_finite() {
        return Err(domain(format!(
            "resonance pair must satisfy lambda_1 > lambda_2, got {lambda_1} and {lambda_2}"
        )));
    }
    let l_expt = lambda_1 * lambda_2 / (T::two() * (lambda_1 - lambda_2));
    Ok(FsrLengthSample {
        lambda_1,
        lambda_2,
        lambda_c: T::two() * lambda_1 * lambda_2 / (lambda_1 + lambda_2),
        l_expt,
        order_fraction: l_expt / (lambda_1 / T::two()),
    })
}

/// `L + λc / 2(n_H - n_L)`, the penetration-corrected length near the
/// coating centre.
pub fn effective_length<T: Scalar>(n_high: T, n_low: T, physical_length: T, lambda_c: T) -> Result<T> {
    if !(n_high > n_low) {
        return Err(domain(format!("need n_H > n_L, got {n_high} and {n_low}")));
    }
    Ok(physical_length + lambda_c / (T::two() * (n_high - n_low)))
}

/// Gouy phase of the fundamental Gaussian mode per round trip, in cavity
/// orders: `acos(sqrt(g1 g2)) / π` with `g = 1 - L/R`.
pub fn gouy_correction<T: Scalar>(gap: T, roc_a: T, roc_b: T) -> Result<T> {
    let g1 = T::one() - gap / roc_a;
    let g2 = T::one() - gap / roc_b;
    let g = g1 * g2;
    if !(g >= T::zero() && g <= T::one()) || !(gap >= T::zero()) {
        return Err(domain(format!("resonator is not stable: g1 g2 = {g}")));
    }
    Ok(g.sqrt().min(T::one()).acos() / T::PI())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stack::{quarter_wave_stack, Layer, MediumIndex};

    const NSUB: f64 = 1.5098;

    fn mirror(nh: f64, nl: f64, scale: f64) -> DielectricStack<f64> {
        quarter_wave_stack(
            MediumIndex::lossless(nh),
            MediumIndex::lossless(nl),
            MediumIndex::lossless(NSUB),
            18,
            852e-9,
            scale,
        )
        .unwrap()
    }

    fn fitted() -> DielectricStack<f64> {
        mirror(2.0676, 1.455, 847.0 / 852.0)
    }

    /// High-contrast, few-layer mirror with almost no penetration.
    fn near_ideal() -> DielectricStack<f64> {
        quarter_wave_stack(
            MediumIndex::lossless(60.0),
            MediumIndex::lossless(1.0),
            MediumIndex::lossless(1.0),
            2,
            852e-9,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn resonant_symmetric_lossless_cavity_transmits_fully() {
        let m = fitted();
        let cav = CavityAssembly::symmetric(m, 0.0).unwrap();
        let gap = lock_gap_to_resonance(&cav, 850e-9, 10e-6).unwrap();
        let cav = cav.with_gap(gap).unwrap();
        let t = cavity_transmission(&cav, 850e-9).unwrap();
        assert!((t - 1.0).abs() < 1e-6, "{t}");
    }

    #[test]
    fn bare_interfaces_match_vacuum_slab() {
        let glass = MediumIndex::lossless(NSUB);
        let bare = DielectricStack::new(MediumIndex::vacuum(), vec![], glass);
        let gap = 1.234e-6;
        let cav = CavityAssembly::symmetric(bare, gap).unwrap();
        let slab = DielectricStack::new(glass, vec![Layer::new(MediumIndex::vacuum(), gap).unwrap()], glass);
        for w in [600e-9, 777e-9, 1000e-9] {
            let a = cavity_transmission(&cav, w).unwrap();
            let b = slab.transmission(w).unwrap();
            assert!((a - b).abs() < 1e-13);
        }
        let touching = cav.with_gap(0.0).unwrap();
        assert!((cavity_transmission(&touching, 800e-9).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn off_resonance_is_tiny() {
        let cav = CavityAssembly::symmetric(fitted(), 0.0).unwrap();
        let gap = lock_gap_to_resonance(&cav, 850e-9, 10e-6).unwrap();
        let cav = cav.with_gap(gap).unwrap();
        let fsr = local_fsr(&cav, 850e-9).unwrap();
        let t_mirror = fitted().transmission(850e-9 - fsr / 2.0).unwrap();
        let t = cavity_transmission(&cav, 850e-9 - fsr / 2.0).unwrap();
        assert!(t < 1e-10);
        assert!(t <= t_mirror * t_mirror / 4.0 * 1.01);
    }

    #[test]
    fn locked_gap_peaks_at_lock_wavelength() {
        let cav = CavityAssembly::symmetric(fitted(), 0.0).unwrap();
        let gap = lock_gap_to_resonance(&cav, 852.359e-9, 10e-6).unwrap();
        assert!((gap - 10e-6).abs() <= 852.359e-9 / 4.0);
        let cav = cav.with_gap(gap).unwrap();
        let found = find_resonances(&cav, (851e-9, 854e-9), Some(0.02e-9), 1e-16).unwrap();
        assert_eq!(found.len(), 1);
        assert!((found.resonances[0].wavelength - 852.359e-9).abs() < 1e-14);
    }

    #[test]
    fn ideal_mirror_gap_is_half_wave_multiple() {
        let cav = CavityAssembly::symmetric(near_ideal(), 0.0).unwrap();
        let gap = lock_gap_to_resonance(&cav, 852e-9, 5e-6).unwrap();
        let half = 852e-9 / 2.0;
        let q = (gap / half).round();
        // Residual phase of a nearly ideal reflector is of order 1/n_H^2.
        assert!((gap - q * half).abs() < 1e-3 * half);
    }

    #[test]
    fn ideal_mirror_resonances_are_evenly_spaced_in_frequency() {
        // A metallic-like reflector: one thin, very high index layer.
        let thin = Layer::new(MediumIndex::lossless(2000.0), 852e-9 / 8000.0).unwrap();
        let mirror = DielectricStack::new(MediumIndex::vacuum(), vec![thin], MediumIndex::vacuum());
        let cav = CavityAssembly::symmetric(mirror, 20e-6).unwrap();
        let set = find_resonances(&cav, (800e-9, 900e-9), None, 1e-17).unwrap();
        assert!(set.len() >= 4);
        let freqs: Vec<f64> = set.wavelengths().iter().map(|w| 1.0 / w).collect();
        let gaps: Vec<f64> = freqs.windows(2).map(|f| f[1] - f[0]).collect();
        for g in &gaps {
            assert!((g / gaps[0] - 1.0).abs() < 1e-3);
        }
        let l = 1.0 / (2.0 * gaps[0]);
        assert!((l / 20e-6 - 1.0).abs() < 0.01);
    }

    #[test]
    fn resonances_sorted_decreasing_and_peaks_are_maxima() {
        let cav = CavityAssembly::symmetric(fitted(), 9.3909e-6).unwrap();
        let set = find_resonances(&cav, (780e-9, 940e-9), None, 1e-18).unwrap();
        let w = set.wavelengths();
        assert!(w.windows(2).all(|p| p[0] > p[1]));
        for r in &set.resonances {
            let h = 1e-15;
            let c = cavity_transmission(&cav, r.wavelength).unwrap();
            assert!(c >= cavity_transmission(&cav, r.wavelength + 20.0 * h).unwrap());
            assert!(c >= cavity_transmission(&cav, r.wavelength - 20.0 * h).unwrap());
        }
    }

    #[test]
    fn empty_window_gives_no_resonances() {
        // Between the 853 nm and 891 nm resonances of this gap.
        let cav = CavityAssembly::symmetric(fitted(), 9.3909e-6).unwrap();
        let set = find_resonances(&cav, (860e-9, 880e-9), Some(0.05e-9), 1e-16).unwrap();
        assert!(set.is_empty());
    }

    #[test]
    fn too_coarse_scan_is_reported() {
        let cav = CavityAssembly::symmetric(fitted(), 100e-6).unwrap();
        let err = find_resonances(&cav, (840e-9, 860e-9), Some(1.3e-9), 1e-16).unwrap_err();
        assert!(matches!(err, Error::ScanTooCoarse { .. }), "{err:?}");
    }

    #[test]
    fn resonance_prediction_table() {
        let cav = CavityAssembly::symmetric(fitted(), 0.0).unwrap();
        let gap = lock_gap_to_resonance(&cav, 853.255e-9, 9.39e-6).unwrap();
        let cav = cav.with_gap(gap).unwrap();
        let ladder = resonance_ladder(&cav, 853.255e-9, 2, 2).unwrap();
        let expected = [930.683, 890.798, 853.255, 818.659, 787.208];
        for (got, want) in ladder.iter().zip(expected) {
            assert!((got * 1e9 - want).abs() < 0.05, "{} vs {want}", got * 1e9);
        }
        let scanned = find_resonances(&cav, (780e-9, 940e-9), None, 1e-18).unwrap();
        assert_eq!(scanned.len(), 5);
        for (a, b) in scanned.wavelengths().iter().zip(&ladder) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn fsr_length_examples() {
        let s = fsr_length(900e-9_f64, 850e-9).unwrap();
        assert!((s.l_expt - 7.65e-6).abs() < 1e-18);
        assert!(fsr_length(850e-9, 850e-9).is_err());
        assert!(fsr_length(800e-9, 850e-9).is_err());
        let identity = s.l_expt / (s.lambda_1 / 2.0) - s.l_expt / (s.lambda_2 / 2.0);
        assert!((identity + 1.0).abs() < 1e-12);
    }

    #[test]
    fn effective_length_coefficient() {
        let c = effective_length(2.0676_f64, 1.455, 0.0, 2.0).unwrap();
        assert!((c - 1.6324).abs() < 1e-4);
        assert!((c - 1.633).abs() < 1e-3);
        assert!(effective_length(1.4, 1.455, 1e-6, 850e-9).is_err());
        let far = effective_length(1e9_f64, 1.0, 5e-6, 850e-9).unwrap();
        assert!((far - 5e-6).abs() < 1e-15);
    }

    #[test]
    fn gouy_examples() {
        let a = gouy_correction(10e-6_f64, 0.1, 0.1).unwrap();
        let b = gouy_correction(44e-6_f64, 0.2, 0.2).unwrap();
        assert!((a - 0.0045).abs() < 0.0002, "{a}");
        assert!((b - 0.0066).abs() < 0.0002, "{b}");
        assert_eq!(gouy_correction(0.0, 0.1, 0.1).unwrap(), 0.0);
        assert_eq!(gouy_correction(1e-3, f64::INFINITY, f64::INFINITY).unwrap(), 0.0);
        assert!(gouy_correction(0.3, 0.1, 0.1).is_err());
    }

    #[test]
    fn measured_length_round_trips_gap() {
        // Near the coating centre, L_expt - L is the penetration term.
        let cav = CavityAssembly::symmetric(fitted(), 0.0).unwrap();
        let order_guess = 24.4;
        let l1 = 866e-9;
        let gap = lock_gap_to_resonance(&cav, l1, (order_guess - 1.633) * l1 / 2.0).unwrap();
        let cav = cav.with_gap(gap).unwrap();
        let l2 = adjacent_resonance(&cav, l1, true).unwrap();
        let s = fsr_length(l1, l2).unwrap();
        assert!((s.lambda_c - 847e-9).abs() < 3e-9);
        let excess = (s.l_expt - gap) / (s.lambda_c / 2.0);
        let predicted = (effective_length(2.0676, 1.455, gap, s.lambda_c).unwrap() - gap) / (s.lambda_c / 2.0);
        assert!((excess - predicted).abs() < 0.01, "{excess} vs {predicted}");
    }

    #[test]
    fn scatter_leaves_resonances_in_place() {
        let clean = CavityAssembly::symmetric(fitted(), 9.3909e-6).unwrap();
        let lossy_mirror = fitted().with_surface_scatter(2e-6).unwrap();
        let lossy = CavityAssembly::symmetric(lossy_mirror, 9.3909e-6).unwrap();
        let a = find_resonances(&clean, (800e-9, 900e-9), None, 1e-18).unwrap();
        let b = find_resonances(&lossy, (800e-9, 900e-9), None, 1e-18).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.wavelengths().iter().zip(b.wavelengths()) {
            assert!((x - y).abs() < 1e-15);
        }
        assert!(b.resonances[0].peak_transmission < a.resonances[0].peak_transmission);
    }
}
