//! Standing-wave field inside a cavity, its mode volume and the single-atom
//! coupling it implies.
//!
//! The field is solved backwards from the exit substrate, where only an
//! outgoing wave exists. In every homogeneous region the field is the sum
//! of a forward and a backward plane wave,
//! `E(z) = f exp(iκ(z_end - z)) + b exp(-iκ(z_end - z))`, with `f` and `b`
//! referred to the region's far face. Positions are measured from the
//! middle of the gap.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::cavity::{adjacent_resonance, fsr_length, lock_gap_to_resonance, CavityAssembly};
use crate::error::{domain, Error, Result};
use crate::loss::SPEED_OF_LIGHT;
use crate::scalar::Scalar;
use crate::stack::{check_wavelength, DielectricStack, TransferMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegionKind {
    IncidentSubstrate,
    MirrorA,
    Gap,
    MirrorB,
    ExitSubstrate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region<T> {
    pub kind: RegionKind,
    pub index: Complex<T>,
    pub start: T,
    pub end: T,
    forward: Complex<T>,
    backward: Complex<T>,
}

impl<T: Scalar> Region<T> {
    fn wavenumber(&self, vacuum_wavelength: T) -> Complex<T> {
        self.index * (T::two() * T::PI() / vacuum_wavelength)
    }

    /// Complex field at `z`, which should lie in `[start, end]`.
    pub fn field_at(&self, z: T, vacuum_wavelength: T) -> Complex<T> {
        let kw = self.wavenumber(vacuum_wavelength) * (self.end - z);
        let i = Complex::new(T::zero(), T::one());
        self.forward * (i * kw).exp() + self.backward * (-i * kw).exp()
    }

    /// Magnetic partner `H = N (f e^{iκw} - b e^{-iκw})` in the normalized
    /// admittance units of the transfer matrices.
    pub fn h_field_at(&self, z: T, vacuum_wavelength: T) -> Complex<T> {
        let kw = self.wavenumber(vacuum_wavelength) * (self.end - z);
        let i = Complex::new(T::zero(), T::one());
        self.index * (self.forward * (i * kw).exp() - self.backward * (-i * kw).exp())
    }

    pub fn thickness(&self) -> T {
        self.end - self.start
    }

    /// `∫ |E|^2 dz` over the region, in closed form.
    fn intensity_integral(&self, vacuum_wavelength: T) -> T {
        let d = self.thickness();
        let k = self.wavenumber(vacuum_wavelength);
        let c = -T::two() * k.im;
        let zero = T::zero();
        let grow = exp_integral(Complex::new(c, zero), d).re;
        let decay = exp_integral(Complex::new(-c, zero), d).re;
        let cross = exp_integral(Complex::new(zero, T::two() * k.re), d);
        self.forward.norm_sqr() * grow
            + self.backward.norm_sqr() * decay
            + T::two() * (self.forward * self.backward.conj() * cross).re
    }

    /// Largest `|E|` inside a lossless region.
    fn peak_magnitude(&self, vacuum_wavelength: T) -> T {
        let (f, b) = (self.forward.norm(), self.backward.norm());
        if f == T::zero() || b == T::zero() {
            return f.max(b);
        }
        // |E|^2 = |f|^2 + |b|^2 + 2 Re(f b* e^{2iκw}), peaked where the
        // phase of the cross term vanishes.
        let kr = self.wavenumber(vacuum_wavelength).re;
        let phase = (self.forward * self.backward.conj()).arg();
        let period = T::PI() / kr;
        let mut w = (-phase / (T::two() * kr)) % period;
        if w < T::zero() {
            w = w + period;
        }
        if w <= self.thickness() {
            return f + b;
        }
        self.field_at(self.start, vacuum_wavelength)
            .norm()
            .max(self.field_at(self.end, vacuum_wavelength).norm())
    }
}

/// `∫_0^d exp(c w) dw`.
fn exp_integral<T: Scalar>(c: Complex<T>, d: T) -> Complex<T> {
    let x = c * d;
    if x.norm() < T::lit(1e-4) {
        let one = Complex::new(T::one(), T::zero());
        return (one + x / T::two() + x * x / T::lit(6.0) + x * x * x / T::lit(24.0)) * d;
    }
    (x.exp() - Complex::new(T::one(), T::zero())) / c
}

/// Driven field in every region of a cavity, scaled so that the largest
/// `|E|` in the gap is one.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSolution<T> {
    pub regions: Vec<Region<T>>,
    pub vacuum_wavelength: T,
    pub round_trip_phase: T,
    incident_index: T,
    exit_index: T,
}

enum Element<T> {
    Slab(RegionKind, Complex<T>, T),
    Sheet(TransferMatrix<T>),
}

/// Resonance tolerance on the round-trip phase, in radians.
const RESONANCE_TOLERANCE: f64 = 1e-6;

impl<T: Scalar> FieldSolution<T> {
    pub fn solve(cavity: &CavityAssembly<T>, vacuum_wavelength: T) -> Result<Self> {
        check_wavelength(vacuum_wavelength)?;
        let a = &cavity.mirror_a;
        let b = &cavity.mirror_b;
        let mut elements = Vec::new();
        for l in a.layers.iter().rev() {
            elements.push(Element::Slab(RegionKind::MirrorA, l.index.complex(), l.thickness()));
        }
        elements.push(Element::Sheet(a.scatter_sheet()));
        elements.push(Element::Slab(RegionKind::Gap, a.ambient.complex(), cavity.gap()));
        elements.push(Element::Sheet(b.scatter_sheet()));
        for l in &b.layers {
            elements.push(Element::Slab(RegionKind::MirrorB, l.index.complex(), l.thickness()));
        }

        let a_thickness: T = a.layers.iter().map(|l| l.thickness()).sum();
        let b_thickness: T = b.layers.iter().map(|l| l.thickness()).sum();
        let half_gap = cavity.gap() / T::two();
        let outer = vacuum_wavelength;

        let ys = b.substrate.complex();
        let mut field = (Complex::new(T::one(), T::zero()), ys);
        let mut end = half_gap + b_thickness;
        let mut regions = vec![Region {
            kind: RegionKind::ExitSubstrate,
            index: ys,
            start: end,
            end: end + outer,
            forward: Complex::new(T::one(), T::zero()) * exit_phase(ys, outer, vacuum_wavelength),
            backward: Complex::new(T::zero(), T::zero()),
        }];
        for el in elements.iter().rev() {
            match el {
                Element::Sheet(m) => field = m.apply(field),
                Element::Slab(kind, n, d) => {
                    let (f, bw) = split(field, *n);
                    regions.push(Region { kind: *kind, index: *n, start: end - *d, end, forward: f, backward: bw });
                    field = TransferMatrix::slab(*n, *d, vacuum_wavelength).apply(field);
                    end = end - *d;
                }
            }
        }
        let n0 = a.substrate.complex();
        let (f, bw) = split(field, n0);
        regions.push(Region {
            kind: RegionKind::IncidentSubstrate,
            index: n0,
            start: end - outer,
            end,
            forward: f,
            backward: bw,
        });
        regions.reverse();
        debug_assert!((end + half_gap + a_thickness).abs() <= (half_gap + a_thickness) * T::lit(1e-9) + T::epsilon());

        let gap = regions.iter().find(|r| r.kind == RegionKind::Gap).expect("gap region");
        let peak = gap.peak_magnitude(vacuum_wavelength);
        if !(peak > T::zero()) {
            return Err(domain("field vanishes in the gap"));
        }
        for r in &mut regions {
            r.forward = r.forward / peak;
            r.backward = r.backward / peak;
        }
        Ok(Self {
            regions,
            vacuum_wavelength,
            round_trip_phase: cavity.round_trip_phase(vacuum_wavelength)?,
            incident_index: a.substrate.real_part(),
            exit_index: b.substrate.real_part(),
        })
    }

    pub fn is_resonant(&self) -> bool {
        self.round_trip_phase.abs() <= T::lit(RESONANCE_TOLERANCE)
    }

    pub fn gap(&self) -> &Region<T> {
        self.regions.iter().find(|r| r.kind == RegionKind::Gap).expect("gap region")
    }

    /// `(n_exit / n_in) |f_out / f_in|^2`, from the travelling-wave amplitudes.
    pub fn transmission(&self) -> T {
        let first = &self.regions[0];
        let last = &self.regions[self.regions.len() - 1];
        let f_in = first.forward;
        let f_out = last.field_at(last.start, self.vacuum_wavelength);
        self.exit_index / self.incident_index * (f_out.norm_sqr() / f_in.norm_sqr())
    }

    /// `∫ Re(ε) |E|^2 dz` over the coatings and the gap, with the gap peak
    /// of `|E|` normalized to one.
    pub fn energy_integral(&self) -> T {
        self.regions
            .iter()
            .filter(|r| !matches!(r.kind, RegionKind::IncidentSubstrate | RegionKind::ExitSubstrate))
            .map(|r| (r.index * r.index).re * r.intensity_integral(self.vacuum_wavelength))
            .sum()
    }

    /// Length `ℓ = 2 ∫ Re(ε)|E|^2 dz / max_gap |E|^2`; equals the gap for
    /// perfect reflectors.
    pub fn longitudinal_length(&self) -> T {
        T::two() * self.energy_integral()
    }

    pub fn region_at(&self, z: T) -> Option<&Region<T>> {
        self.regions.iter().find(|r| z >= r.start && z <= r.end)
    }
}

fn split<T: Scalar>(field: (Complex<T>, Complex<T>), n: Complex<T>) -> (Complex<T>, Complex<T>) {
    let h = field.1 / n;
    ((field.0 + h) / T::two(), (field.0 - h) / T::two())
}

/// Forward amplitude at the far end of the sampled exit substrate when the
/// wave leaving the last layer has unit amplitude.
fn exit_phase<T: Scalar>(n: Complex<T>, length: T, vacuum_wavelength: T) -> Complex<T> {
    let kw = n * (T::two() * T::PI() / vacuum_wavelength * length);
    (Complex::new(T::zero(), -T::one()) * kw).exp()
}

/// Sampled `|E(z)|` through substrate, coating, gap, coating, substrate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldProfile<T> {
    pub z: Vec<T>,
    pub index: Vec<T>,
    pub abs_e: Vec<T>,
    /// False when the wavelength is off resonance; the gap field is then
    /// not a clean standing wave.
    pub resonant: bool,
    pub round_trip_phase: T,
}

/// Samples the driven field. `sample_step` defaults to a wavelength over 200
/// in each medium. Both faces of every region are included, so interfaces
/// appear twice with the indices on either side.
pub fn field_profile<T: Scalar>(cavity: &CavityAssembly<T>, resonant_wavelength: T, sample_step: Option<T>) -> Result<FieldProfile<T>> {
    let solution = FieldSolution::solve(cavity, resonant_wavelength)?;
    if let Some(s) = sample_step {
        if !(s > T::zero()) {
            return Err(domain(format!("sample step must be positive, got {s}")));
        }
    }
    let mut out = FieldProfile {
        z: Vec::new(),
        index: Vec::new(),
        abs_e: Vec::new(),
        resonant: solution.is_resonant(),
        round_trip_phase: solution.round_trip_phase,
    };
    for r in &solution.regions {
        let n = r.index.re;
        let step = sample_step.unwrap_or(resonant_wavelength / (T::lit(200.0) * n));
        let d = r.thickness();
        let count = (d / step).ceil().to_usize().unwrap_or(1).max(1);
        for i in 0..=count {
            let z = r.start + d * T::from_usize(i).unwrap() / T::from_usize(count).unwrap();
            out.z.push(z);
            out.index.push(n);
            out.abs_e.push(r.field_at(z, resonant_wavelength).norm());
        }
    }
    Ok(out)
}

/// Waist radius of the fundamental Gaussian mode of a two-mirror resonator.
pub fn gaussian_waist<T: Scalar>(gap: T, roc_a: T, roc_b: T, vacuum_wavelength: T) -> Result<T> {
    check_wavelength(vacuum_wavelength)?;
    let g1 = T::one() - gap / roc_a;
    let g2 = T::one() - gap / roc_b;
    let g = g1 * g2;
    let denom = (g1 + g2 - T::two() * g).abs();
    if !(gap > T::zero()) || !(g > T::zero() && g < T::one()) || denom == T::zero() {
        return Err(domain(format!(
            "no confined Gaussian mode: gap {gap}, g1 g2 = {g}"
        )));
    }
    let w2 = vacuum_wavelength * gap / T::PI() * (g * (T::one() - g)).sqrt() / denom;
    Ok(w2.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeGeometry<T> {
    pub waist: T,
    /// `ℓ` with `V = π w0^2 ℓ / 4`.
    pub longitudinal_length: T,
    pub volume: T,
}

impl<T: Scalar> ModeGeometry<T> {
    pub fn new(waist: T, longitudinal_length: T) -> Self {
        Self { waist, longitudinal_length, volume: T::PI() * waist * waist * longitudinal_length / T::lit(4.0) }
    }
}

/// Mode volume from the field energy: a Gaussian transverse profile has
/// area `π w0^2 / 2`, and the longitudinal integral is normalized to the
/// peak energy density in the gap.
pub fn mode_volume<T: Scalar>(cavity: &CavityAssembly<T>, resonant_wavelength: T) -> Result<ModeGeometry<T>> {
    let waist = gaussian_waist(cavity.gap(), cavity.roc_a, cavity.roc_b, resonant_wavelength)?;
    let solution = FieldSolution::solve(cavity, resonant_wavelength)?;
    Ok(ModeGeometry::new(waist, solution.longitudinal_length()))
}

/// Mode volume between perfect reflectors at `±gap/2`.
pub fn ideal_mode_volume<T: Scalar>(gap: T, roc_a: T, roc_b: T, vacuum_wavelength: T) -> Result<ModeGeometry<T>> {
    let waist = gaussian_waist(gap, roc_a, roc_b, vacuum_wavelength)?;
    Ok(ModeGeometry::new(waist, gap))
}

/// `g0/2π` in Hz for a two-level atom at an antinode: `g0 = sqrt(3 c λ^2 γ⊥
/// / 4π V)` in angular units, with `γ⊥` the dipole (half-width) decay rate.
/// `gamma_perp` is `γ⊥/2π` in Hz.
pub fn coupling_g0<T: Scalar>(geometry: &ModeGeometry<T>, vacuum_wavelength: T, gamma_perp: T) -> Result<T> {
    if !(geometry.volume > T::zero()) {
        return Err(domain("mode volume must be positive"));
    }
    let two_pi = T::two() * T::PI();
    let c = T::lit(SPEED_OF_LIGHT);
    let g_angular = (T::lit(3.0) * c * vacuum_wavelength * vacuum_wavelength * two_pi * gamma_perp
        / (T::lit(4.0) * T::PI() * geometry.volume))
        .sqrt();
    Ok(g_angular / two_pi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct G0Point<T> {
    /// Physical mirror separation, locked so the lock wavelength resonates.
    pub gap: T,
    pub g0_real: T,
    pub g0_ideal: T,
}

/// `g0` against mirror separation for real mirrors and for perfect
/// reflectors at the same spacing. Each requested gap is moved to the
/// nearest length that puts a resonance at `lock_wavelength`.
pub fn g0_vs_length<T: Scalar>(
    mirror: &DielectricStack<T>,
    roc: T,
    gaps: &[T],
    gamma_perp: T,
    lock_wavelength: T,
) -> Result<Vec<G0Point<T>>> {
    let template = CavityAssembly::symmetric(mirror.clone(), T::zero())?.with_curvature(roc, roc)?;
    gaps.par_iter()
        .map(|&requested| {
            let gap = lock_gap_to_resonance(&template, lock_wavelength, requested)?;
            let cavity = template.with_gap(gap)?;
            let real = mode_volume(&cavity, lock_wavelength)?;
            let ideal = ideal_mode_volume(gap, roc, roc, lock_wavelength)?;
            Ok(G0Point {
                gap,
                g0_real: coupling_g0(&real, lock_wavelength, gamma_perp)?,
                g0_ideal: coupling_g0(&ideal, lock_wavelength, gamma_perp)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LengthBias<T> {
    pub gap: T,
    pub lambda_1: T,
    pub lambda_2: T,
    pub l_expt: T,
    pub longitudinal_length: T,
    /// Finesse of the cavity at `lambda_2`, from the mirror reflectance there.
    pub finesse_at_lambda_2: T,
    /// `g0(L_expt) / g0(field integral) - 1`.
    pub bias: T,
}

/// Error in `g0` made by using `L_expt` from the resonance pair
/// `(λ1, next shorter)` in place of the integrated mode length, for a gap
/// resonant at `lock_wavelength` nearest `gap_orders` half-wavelengths.
///
/// When the mirrors are so transparent at `λ2` that the cavity finesse there
/// is below `min_finesse`, the pair cannot be measured and an
/// [`Error::Unmeasurable`] is returned.
pub fn length_inference_bias<T: Scalar>(
    mirror: &DielectricStack<T>,
    gap_orders: u32,
    lock_wavelength: T,
    min_finesse: T,
) -> Result<LengthBias<T>> {
    if gap_orders == 0 {
        return Err(domain("gap must span at least one half wavelength"));
    }
    let template = CavityAssembly::symmetric(mirror.clone(), T::zero())?;
    let nominal = T::from_u32(gap_orders).unwrap() * lock_wavelength / T::two();
    let gap = lock_gap_to_resonance(&template, lock_wavelength, nominal)?;
    let cavity = template.with_gap(gap)?;
    let ell = FieldSolution::solve(&cavity, lock_wavelength)?.longitudinal_length();
    let lambda_2 = adjacent_resonance(&cavity, lock_wavelength, true)
        .map_err(|e| Error::Unmeasurable(format!("no second resonance: {e}")))?;
    let r = mirror.reflectance(lambda_2)?;
    let finesse = T::PI() * r.sqrt() / (T::one() - r);
    if finesse < min_finesse {
        return Err(Error::Unmeasurable(format!(
            "second resonance at {lambda_2} m has finesse {finesse}, below {min_finesse}"
        )));
    }
    let sample = fsr_length(lock_wavelength, lambda_2)?;
    Ok(LengthBias {
        gap,
        lambda_1: lock_wavelength,
        lambda_2,
        l_expt: sample.l_expt,
        longitudinal_length: ell,
        finesse_at_lambda_2: finesse,
        bias: (ell / sample.l_expt).sqrt() - T::one(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cavity::{cavity_transmission, effective_length};
    use crate::stack::{quarter_wave_stack, Layer, MediumIndex};
    use proptest::prelude::*;

    const LAMBDA: f64 = 852e-9;

    fn mirror(nh: f64, scale: f64) -> DielectricStack<f64> {
        quarter_wave_stack(
            MediumIndex::lossless(nh),
            MediumIndex::lossless(1.455),
            MediumIndex::lossless(1.5098),
            18,
            LAMBDA,
            scale,
        )
        .unwrap()
    }

    fn fitted() -> DielectricStack<f64> {
        mirror(2.0676, 847.0 / 852.0)
    }

    fn locked(m: DielectricStack<f64>, near: f64) -> CavityAssembly<f64> {
        let c = CavityAssembly::symmetric(m, 0.0).unwrap();
        let gap = lock_gap_to_resonance(&c, LAMBDA, near).unwrap();
        c.with_gap(gap).unwrap().with_curvature(0.2, 0.2).unwrap()
    }

    fn perfect_reflector() -> DielectricStack<f64> {
        let thin = Layer::new(MediumIndex::lossless(5000.0), LAMBDA / 20000.0).unwrap();
        DielectricStack::new(MediumIndex::vacuum(), vec![thin], MediumIndex::vacuum())
    }

    #[test]
    fn exp_integral_limits() {
        let d = 3.0_f64;
        let small = exp_integral(Complex::new(1e-9, 0.0), d);
        assert!((small.re - d).abs() < 1e-8);
        let big = exp_integral(Complex::new(0.5, 0.0), d);
        assert!((big.re - ((1.5f64).exp() - 1.0) / 0.5).abs() < 1e-12);
    }

    #[test]
    fn three_half_wave_cavity_has_three_antinodes() {
        let cav = locked(mirror(2.0411, 1.0), 1.5 * LAMBDA);
        let p = field_profile(&cav, LAMBDA, Some(LAMBDA / 2000.0)).unwrap();
        assert!(p.resonant);
        let half = cav.gap() / 2.0;
        let gap: Vec<f64> = p
            .z
            .iter()
            .zip(&p.abs_e)
            .filter(|(z, _)| z.abs() < half)
            .map(|(_, e)| *e)
            .collect();
        let peaks = (1..gap.len() - 1).filter(|&i| gap[i] > gap[i - 1] && gap[i] >= gap[i + 1]).count();
        assert_eq!(peaks, 3);
        let max = gap.iter().cloned().fold(0.0, f64::max);
        assert!((max - 1.0).abs() < 1e-5);
    }

    #[test]
    fn field_decays_by_index_ratio_per_pair() {
        let cav = locked(mirror(2.0411, 1.0), 5e-6);
        let sol = FieldSolution::solve(&cav, LAMBDA).unwrap();
        let peaks: Vec<f64> = sol
            .regions
            .iter()
            .filter(|r| r.kind == RegionKind::MirrorB && (r.index.re - 2.0411).abs() < 1e-12)
            .map(|r| r.peak_magnitude(LAMBDA))
            .collect();
        for w in peaks.windows(2).take(10) {
            assert!((w[1] / w[0] / (1.455 / 2.0411) - 1.0).abs() < 0.01, "{}", w[1] / w[0]);
        }
    }

    #[test]
    fn perfect_reflector_has_node_at_surface() {
        let cav = locked(perfect_reflector(), 3.0 * LAMBDA);
        let sol = FieldSolution::solve(&cav, LAMBDA).unwrap();
        let g = sol.gap();
        assert!(g.field_at(g.start, LAMBDA).norm() < 1e-3);
        assert!(g.field_at(g.end, LAMBDA).norm() < 1e-3);
        let ell = sol.longitudinal_length();
        assert!((ell / cav.gap() - 1.0).abs() < 2e-3, "{}", ell / cav.gap());
    }

    #[test]
    fn ideal_longitudinal_factor_is_half_gap() {
        // A bare standing wave sin^2 over whole half-waves.
        let region = Region {
            kind: RegionKind::Gap,
            index: Complex::new(1.0, 0.0),
            start: -1.5 * LAMBDA,
            end: 1.5 * LAMBDA,
            forward: Complex::new(0.0, 0.5),
            backward: Complex::new(0.0, -0.5),
        };
        assert!((region.intensity_integral(LAMBDA) - 1.5 * LAMBDA).abs() < 1e-20);
        assert!((region.peak_magnitude(LAMBDA) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boundaries_are_continuous() {
        let cav = locked(fitted(), 10e-6);
        let sol = FieldSolution::solve(&cav, LAMBDA).unwrap();
        for w in sol.regions.windows(2) {
            let (l, r) = (&w[0], &w[1]);
            let e = (l.field_at(l.end, LAMBDA) - r.field_at(r.start, LAMBDA)).norm();
            let h = (l.h_field_at(l.end, LAMBDA) - r.h_field_at(r.start, LAMBDA)).norm();
            assert!(e < 1e-10, "{e}");
            assert!(h < 1e-10 * 2.1, "{h}");
        }
    }

    #[test]
    fn reciprocity_with_cavity_transmission() {
        for w in [852e-9, 852.01e-9, 830e-9] {
            let cav = locked(fitted(), 10e-6);
            let sol = FieldSolution::solve(&cav, w).unwrap();
            let direct = cavity_transmission(&cav, w).unwrap();
            assert!((sol.transmission() - direct).abs() < 1e-8 * direct.max(1e-300) + 1e-20, "{} {direct}", sol.transmission());
        }
        let off = FieldSolution::solve(&locked(fitted(), 10e-6), 852.01e-9).unwrap();
        assert!(!off.is_resonant());
    }

    #[test]
    fn longitudinal_length_tracks_effective_length() {
        let cav = locked(mirror(2.0676, 1.0), 10e-6);
        let ell = FieldSolution::solve(&cav, LAMBDA).unwrap().longitudinal_length();
        let l_eff = effective_length(2.0676, 1.455, cav.gap(), LAMBDA).unwrap();
        assert!((ell / l_eff - 1.0).abs() < 0.01, "{} {}", ell, l_eff);
    }

    #[test]
    fn half_wave_volume_ratio_and_coupling() {
        let cav = locked(fitted(), LAMBDA / 2.0);
        let real = mode_volume(&cav, LAMBDA).unwrap();
        let ideal = ideal_mode_volume(cav.gap(), 0.2, 0.2, LAMBDA).unwrap();
        let ratio = real.volume / ideal.volume;
        assert!((ratio / 2.63 - 1.0).abs() < 0.02, "{ratio}");
        let g_real = coupling_g0(&real, LAMBDA, 2.6e6).unwrap();
        let g_ideal = coupling_g0(&ideal, LAMBDA, 2.6e6).unwrap();
        assert!((g_real / g_ideal - 0.6).abs() < 0.03);
        assert!((g_real / 647e6 - 1.0).abs() < 0.05, "{}", g_real / 1e6);

        let cav10 = locked(fitted(), LAMBDA / 2.0).with_curvature(0.1, 0.1).unwrap();
        let g10 = coupling_g0(&mode_volume(&cav10, LAMBDA).unwrap(), LAMBDA, 2.6e6).unwrap();
        assert!((g10 / 770e6 - 1.0).abs() < 0.05, "{}", g10 / 1e6);
    }

    #[test]
    fn coupling_scales_inverse_sqrt_volume() {
        let a = ModeGeometry::new(10e-6, 1e-6);
        let b = ModeGeometry::new(20e-6, 1e-6);
        let ga = coupling_g0(&a, LAMBDA, 2.6e6).unwrap();
        let gb = coupling_g0(&b, LAMBDA, 2.6e6).unwrap();
        assert!((ga / gb - 2.0).abs() < 1e-12);
    }

    #[test]
    fn waist_formulas() {
        let (l, r) = (10e-6, 0.1);
        let w = gaussian_waist(l, r, r, LAMBDA).unwrap();
        let expected = (LAMBDA / std::f64::consts::PI * (l * (2.0 * r - l)).sqrt() / 2.0).sqrt();
        assert!((w / expected - 1.0).abs() < 1e-12);
        let half = gaussian_waist(l, f64::INFINITY, r, LAMBDA).unwrap();
        let expected = (LAMBDA / std::f64::consts::PI * (l * (r - l)).sqrt()).sqrt();
        assert!((half / expected - 1.0).abs() < 1e-12);
        assert!(gaussian_waist(l, f64::INFINITY, f64::INFINITY, LAMBDA).is_err());
        assert!(gaussian_waist(0.3, 0.1, 0.1, LAMBDA).is_err());
    }

    #[test]
    fn g0_curve_shape() {
        let gaps: Vec<f64> = [1.0, 10e-6 / (LAMBDA / 2.0), 200.0].iter().map(|q| q * LAMBDA / 2.0).collect();
        let curve = g0_vs_length(&fitted(), 0.2, &gaps, 2.6e6, LAMBDA).unwrap();
        let ratios: Vec<f64> = curve.iter().map(|p| p.g0_real / p.g0_ideal).collect();
        assert!((ratios[0] - 0.6).abs() < 0.03, "{ratios:?}");
        assert!(((1.0 - ratios[1]) - 0.05).abs() <= 0.02, "{ratios:?}");
        assert!(ratios[2] > ratios[1] && ratios[1] > ratios[0]);
        assert!(1.0 - ratios[2] < 0.005);
    }

    #[test]
    fn length_bias_grows_for_short_cavities() {
        let m = fitted();
        let b20 = length_inference_bias(&m, 20, LAMBDA, 3.0).unwrap();
        let b10 = length_inference_bias(&m, 10, LAMBDA, 3.0).unwrap();
        let b5 = length_inference_bias(&m, 5, LAMBDA, 3.0).unwrap();
        assert!(b20.bias.abs() < 1e-3, "{}", b20.bias);
        assert!((b10.bias.abs() - 0.01).abs() <= 0.005, "{}", b10.bias);
        assert!((b5.bias.abs() - 0.08).abs() <= 0.03, "{}", b5.bias);
        assert!(matches!(length_inference_bias(&m, 4, LAMBDA, 3.0), Err(Error::Unmeasurable(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn volume_grows_with_gap(q in 1u32..40) {
            let m = fitted();
            let template = CavityAssembly::symmetric(m, 0.0).unwrap().with_curvature(0.2, 0.2).unwrap();
            let v = |q: u32| {
                let gap = lock_gap_to_resonance(&template, LAMBDA, q as f64 * LAMBDA / 2.0).unwrap();
                mode_volume(&template.with_gap(gap).unwrap(), LAMBDA).unwrap().volume
            };
            prop_assert!(v(q + 1) > v(q));
        }
    }
}
