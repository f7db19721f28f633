//! Mirror transmission and loss from finesse and on-resonance powers, and
//! the cavity QED rates that follow from them.

use serde::Serialize;

use crate::cavity::effective_length;
use crate::error::{domain, Error, Result};
use crate::scalar::Scalar;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Input, reflected and transmitted power with the cavity locked on
/// resonance, plus the independently measured finesse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerTriple<T> {
    pub p_in: T,
    pub p_reflected: T,
    pub p_transmitted: T,
    pub finesse: T,
}

/// One-sigma uncertainties matching the fields of [`PowerTriple`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct PowerUncertainty<T> {
    pub p_in: T,
    pub p_reflected: T,
    pub p_transmitted: T,
    pub finesse: T,
}

/// Per-mirror budget under the equal-mirror assumption.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MirrorBudget<T> {
    pub transmission: T,
    pub loss: T,
    pub total_loss: T,
    pub mode_matching: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BudgetUncertainty<T> {
    pub transmission: T,
    pub loss: T,
    pub mode_matching: T,
}

/// `F = 2π / (T1 + T2 + l1 + l2)`.
pub fn finesse_from_budget<T: Scalar>(t1: T, t2: T, l1: T, l2: T) -> Result<T> {
    let total = t1 + t2 + l1 + l2;
    if !(total > T::zero()) {
        return Err(domain(format!("total round-trip loss must be positive, got {total}")));
    }
    Ok(T::two() * T::PI() / total)
}

/// On-resonance transmission `4 T1 T2 / (T1 + T2 + l1 + l2)^2` of a
/// perfectly mode-matched cavity.
pub fn resonant_transmission<T: Scalar>(t1: T, t2: T, l1: T, l2: T) -> T {
    let total = t1 + t2 + l1 + l2;
    T::lit(4.0) * t1 * t2 / (total * total)
}

impl<T: Scalar> PowerTriple<T> {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("input power", self.p_in),
            ("reflected power", self.p_reflected),
            ("transmitted power", self.p_transmitted),
            ("finesse", self.finesse),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(domain(format!("{name} must be positive, got {v}")));
            }
        }
        if self.p_reflected == self.p_in {
            return Err(domain("reflected power equals input power; the ratio is undefined"));
        }
        Ok(())
    }

    /// Powers a symmetric cavity with the given budget would produce.
    pub fn simulate(budget_t: T, budget_l: T, mode_matching: T, p_in: T) -> Result<Self> {
        if !(budget_t > T::zero()) || !(budget_l >= T::zero()) {
            return Err(domain("need T > 0 and l >= 0"));
        }
        if !(mode_matching > T::zero() && mode_matching <= T::one()) {
            return Err(domain(format!("mode matching must be in (0, 1], got {mode_matching}")));
        }
        let s = budget_t + budget_l;
        let u = T::one() / s;
        let x = budget_t * u;
        let y = budget_l * u;
        Ok(Self {
            p_in,
            p_reflected: (T::one() - mode_matching) * p_in + mode_matching * p_in * y * y,
            p_transmitted: mode_matching * p_in * x * x,
            finesse: T::PI() / s,
        })
    }
}

/// Splits the per-mirror round-trip loss `π/F` into transmission `T` and
/// absorption plus scatter `l`, assuming two identical mirrors.
///
/// With `S = π/F` and `r = P_t / (P_r - P_in)`, the fraction `x = T/S`
/// satisfies `r = x / (x - 2)`.
pub fn partition_loss<T: Scalar>(m: &PowerTriple<T>) -> Result<MirrorBudget<T>> {
    let budget = partition_power_ratio(m)?;
    if budget.mode_matching > T::one() {
        return Err(Error::InconsistentMeasurement(format!(
            "implied mode matching {} exceeds one",
            budget.mode_matching
        )));
    }
    Ok(budget)
}

fn partition_power_ratio<T: Scalar>(m: &PowerTriple<T>) -> Result<MirrorBudget<T>> {
    m.validate()?;
    let s = T::PI() / m.finesse;
    let r = m.p_transmitted / (m.p_reflected - m.p_in);
    if r >= T::zero() && r < T::one() {
        return Err(Error::InconsistentMeasurement(format!(
            "P_t/(P_r - P_in) = {r} lies in [0, 1), which no mirror pair produces"
        )));
    }
    let x = T::two() * r / (r - T::one());
    let transmission = x * s;
    let loss = s - transmission;
    if loss < T::zero() {
        return Err(Error::InconsistentMeasurement(format!(
            "implied loss per mirror is negative ({loss})"
        )));
    }
    let mode_matching = m.p_transmitted / (m.p_in * x * x);
    Ok(MirrorBudget { transmission, loss, total_loss: s, mode_matching })
}

/// [`partition_loss`] with first-order propagation of independent input
/// uncertainties, by central finite differences.
pub fn partition_loss_with_uncertainty<T: Scalar>(
    m: &PowerTriple<T>,
    sigma: &PowerUncertainty<T>,
) -> Result<(MirrorBudget<T>, BudgetUncertainty<T>)> {
    let nominal = partition_loss(m)?;
    let mut var = [T::zero(); 3];
    let inputs = [m.p_in, m.p_reflected, m.p_transmitted, m.finesse];
    let sigmas = [sigma.p_in, sigma.p_reflected, sigma.p_transmitted, sigma.finesse];
    for (i, (&value, &s)) in inputs.iter().zip(&sigmas).enumerate() {
        if s == T::zero() {
            continue;
        }
        if !(s > T::zero()) {
            return Err(domain("uncertainties must be non-negative"));
        }
        let h = value * T::lit(1e-6);
        let shifted = |delta: T| {
            let mut v = inputs;
            v[i] = v[i] + delta;
            let p = PowerTriple { p_in: v[0], p_reflected: v[1], p_transmitted: v[2], finesse: v[3] };
            // Budgets on the edge of the physical region still have
            // well-defined derivatives, so skip the consistency checks.
            raw_partition(&p)
        };
        let (up, down) = (shifted(h), shifted(-h));
        for k in 0..3 {
            let d = (up[k] - down[k]) / (T::two() * h);
            var[k] = var[k] + d * d * s * s;
        }
    }
    Ok((
        nominal,
        BudgetUncertainty { transmission: var[0].sqrt(), loss: var[1].sqrt(), mode_matching: var[2].sqrt() },
    ))
}

fn raw_partition<T: Scalar>(m: &PowerTriple<T>) -> [T; 3] {
    let s = T::PI() / m.finesse;
    let r = m.p_transmitted / (m.p_reflected - m.p_in);
    let x = T::two() * r / (r - T::one());
    [x * s, s - x * s, m.p_transmitted / (m.p_in * x * x)]
}

/// Partition from a transverse-mode sweep.
///
/// `matched_transmitted_sum` and `matched_reflected_sum` add up, over every
/// resolved mode, the transmitted power and the cavity-reflected part of the
/// reflected power. They stand in for the mode-matched single-mode powers,
/// so any unresolved mode makes the inferred `T` low. The returned
/// `mode_matching` is only the ratio implied by the sums and may exceed one.
pub fn aggregate_mode_sweep<T: Scalar>(
    p_in: T,
    matched_transmitted_sum: T,
    matched_reflected_sum: T,
    finesse: T,
) -> Result<MirrorBudget<T>> {
    partition_power_ratio(&PowerTriple {
        p_in,
        p_reflected: matched_reflected_sum,
        p_transmitted: matched_transmitted_sum,
        finesse,
    })
}

/// Budget for two mirrors that may differ, from one power triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoMirrorBudget<T> {
    pub transmission_1: T,
    pub transmission_2: T,
    /// `l1 + l2`; one triple cannot separate the two.
    pub combined_loss: T,
    pub mode_matching: T,
}

/// Unequal-mirror partition. One triple fixes only the combination
/// `T2 (F/2π) = 1 + T1 (F/2π) / r`, so the input-side transmission must be
/// supplied.
pub fn partition_loss_two_mirror<T: Scalar>(m: &PowerTriple<T>, known_t1: Option<T>) -> Result<TwoMirrorBudget<T>> {
    m.validate()?;
    let t1 = known_t1.ok_or_else(|| {
        Error::Underdetermined(
            "one power triple cannot separate T1, T2, l1 + l2 and mode matching; supply T1".into(),
        )
    })?;
    if !(t1 > T::zero()) {
        return Err(domain(format!("T1 must be positive, got {t1}")));
    }
    let u = m.finesse / (T::two() * T::PI());
    let r = m.p_transmitted / (m.p_reflected - m.p_in);
    let a = t1 * u;
    let y = T::one() + a / r;
    let combined = T::one() / u - t1 - y / u;
    if !(y > T::zero()) || combined < T::zero() {
        return Err(Error::InconsistentMeasurement(format!(
            "T1 = {t1} is incompatible with the measured powers"
        )));
    }
    let mode_matching = m.p_transmitted / (m.p_in * T::lit(4.0) * a * y);
    if mode_matching > T::one() {
        return Err(Error::InconsistentMeasurement(format!(
            "implied mode matching {mode_matching} exceeds one"
        )));
    }
    Ok(TwoMirrorBudget { transmission_1: t1, transmission_2: y / u, combined_loss: combined, mode_matching })
}

/// Which length sets the free spectral range in `κ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LengthConvention<T> {
    Physical,
    /// Gap plus coating penetration `λ / 2(n_H - n_L)`.
    Effective { n_high: T, n_low: T, wavelength: T },
}

/// Cavity field decay rate `κ/2π = (c / 2L) / 2F` in Hz.
pub fn cavity_kappa<T: Scalar>(budget: &MirrorBudget<T>, physical_gap: T, convention: LengthConvention<T>) -> Result<T> {
    if !(physical_gap > T::zero()) {
        return Err(domain(format!("gap must be positive, got {physical_gap}")));
    }
    let length = match convention {
        LengthConvention::Physical => physical_gap,
        LengthConvention::Effective { n_high, n_low, wavelength } => {
            effective_length(n_high, n_low, physical_gap, wavelength)?
        }
    };
    let finesse = finesse_from_budget(budget.transmission, budget.transmission, budget.loss, budget.loss)?;
    let fsr = T::lit(SPEED_OF_LIGHT) / (T::two() * length);
    Ok(fsr / (T::two() * finesse))
}

/// Coupling, decay rates and the critical numbers they imply. Rates are
/// ordinary frequencies (`g0/2π` etc.).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CqedRates<T> {
    pub g0: T,
    pub kappa: T,
    pub gamma_perp: T,
    pub n0: T,
    pub big_n0: T,
}

/// Critical photon number `γ⊥²/2g0²` and atom number `2κγ⊥/g0²`.
pub fn critical_numbers<T: Scalar>(g0: T, kappa: T, gamma_perp: T) -> Result<(T, T)> {
    if !(g0 > T::zero()) {
        return Err(domain(format!("g0 must be positive, got {g0}")));
    }
    let g2 = g0 * g0;
    Ok((gamma_perp * gamma_perp / (T::two() * g2), T::two() * kappa * gamma_perp / g2))
}

impl<T: Scalar> CqedRates<T> {
    pub fn new(g0: T, kappa: T, gamma_perp: T) -> Result<Self> {
        let (n0, big_n0) = critical_numbers(g0, kappa, gamma_perp)?;
        Ok(Self { g0, kappa, gamma_perp, n0, big_n0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PPM: f64 = 1e-6;

    fn paper_triple() -> PowerTriple<f64> {
        PowerTriple {
            p_in: 54e-6,
            p_reflected: 42.6e-6,
            p_transmitted: 4.82e-6,
            finesse: std::f64::consts::PI / (7.2 * PPM),
        }
    }

    #[test]
    fn finesse_examples() {
        let f = finesse_from_budget(4.3 * PPM, 4.3 * PPM, 2.2 * PPM, 2.2 * PPM).unwrap();
        assert!((f - 483_322.0).abs() < 10.0, "{f}");
        assert!((f - 480_000.0).abs() < 10_000.0);
        let f = finesse_from_budget(0.5 * PPM, 0.5 * PPM, 0.5 * PPM, 0.5 * PPM).unwrap();
        assert!((f / 3.14e6 - 1.0).abs() < 1e-3);
        let f = finesse_from_budget(0.2 * PPM, 0.2 * PPM, 0.2 * PPM, 0.2 * PPM).unwrap();
        assert!((f / 7.85e6 - 1.0).abs() < 1e-3);
        assert!(finesse_from_budget(0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn paper_partition() {
        let b = partition_loss(&paper_triple()).unwrap();
        assert!((b.transmission / PPM - 4.3).abs() < 0.05, "{}", b.transmission / PPM);
        assert!((b.loss / PPM - 2.9).abs() < 0.05, "{}", b.loss / PPM);
        assert!((b.total_loss / PPM - 7.2).abs() < 1e-9);
        // Substituting back: ε = (P_in - P_r) / (P_in (1 - (l/S)^2)).
        let eps = (54e-6 - 42.6e-6) / (54e-6 * (1.0 - (b.loss / b.total_loss).powi(2)));
        assert!((b.mode_matching - eps).abs() < 1e-12);
        assert!((b.mode_matching - 0.25).abs() < 0.01);
    }

    #[test]
    fn lossless_limit() {
        let eps = 0.7;
        let m = PowerTriple { p_in: 1.0, p_reflected: 1.0 - eps, p_transmitted: eps, finesse: 1e5 };
        let b = partition_loss(&m).unwrap();
        assert!((b.transmission - std::f64::consts::PI / 1e5).abs() < 1e-18);
        assert!(b.loss.abs() < 1e-18);
        assert!((b.mode_matching - eps).abs() < 1e-14);
    }

    #[test]
    fn impossible_ratios_are_rejected() {
        let mut m = paper_triple();
        m.p_reflected = 60e-6;
        m.p_transmitted = 1e-6;
        assert!(matches!(partition_loss(&m), Err(Error::InconsistentMeasurement(_))));
        let mut m = paper_triple();
        m.p_transmitted = 40e-6;
        assert!(matches!(partition_loss(&m), Err(Error::InconsistentMeasurement(_))));
        let mut m = paper_triple();
        m.p_reflected = m.p_in;
        assert!(matches!(partition_loss(&m), Err(Error::Domain(_))));
    }

    #[test]
    fn uncertainties_scale_with_inputs() {
        let sigma = PowerUncertainty { p_in: 0.5e-6, p_reflected: 0.5e-6, p_transmitted: 0.1e-6, finesse: 5000.0 };
        let (b, u) = partition_loss_with_uncertainty(&paper_triple(), &sigma).unwrap();
        assert!(u.transmission > 0.0 && u.transmission < 0.5 * b.transmission);
        let (_, zero) = partition_loss_with_uncertainty(&paper_triple(), &PowerUncertainty::default()).unwrap();
        assert_eq!(zero.transmission, 0.0);
        // Only the finesse term: T scales as 1/F.
        let only_f = PowerUncertainty { finesse: 4363.0, ..Default::default() };
        let (_, u) = partition_loss_with_uncertainty(&paper_triple(), &only_f).unwrap();
        let expected = b.transmission * 4363.0 / paper_triple().finesse;
        assert!((u.transmission / expected - 1.0).abs() < 1e-5);
    }

    #[test]
    fn full_sweep_matches_single_mode_with_perfect_matching() {
        let t = 4.3 * PPM;
        let l = 2.9 * PPM;
        let m = PowerTriple::simulate(t, l, 1.0, 54e-6).unwrap();
        let a = partition_loss(&m).unwrap();
        let b = aggregate_mode_sweep(m.p_in, m.p_transmitted, m.p_reflected, m.finesse).unwrap();
        assert_eq!(a, b);
        assert!((b.mode_matching - 1.0).abs() < 1e-12);
    }

    #[test]
    fn incomplete_sweep_biases_transmission_low() {
        // Forward model: each mode i gets ε_i of the input; the sweep adds
        // up transmitted powers and cavity-reflected powers of resolved
        // modes only.
        let (t, l, p_in) = (4.3 * PPM, 2.9 * PPM, 54e-6);
        let s = t + l;
        let (x, y) = (t / s, l / s);
        let resolved = 0.98;
        let pt_sum = resolved * p_in * x * x;
        let pr_sum = resolved * p_in * y * y;
        let b = aggregate_mode_sweep(p_in, pt_sum, pr_sum, std::f64::consts::PI / s).unwrap();
        let bias = b.transmission / t - 1.0;
        assert!(bias < 0.0);
        assert!(bias > -0.03, "{bias}");
    }

    #[test]
    fn two_mirror_variant() {
        let m = paper_triple();
        assert!(matches!(partition_loss_two_mirror(&m, None), Err(Error::Underdetermined(_))));
        let eq = partition_loss(&m).unwrap();
        let b = partition_loss_two_mirror(&m, Some(eq.transmission)).unwrap();
        assert!((b.transmission_2 / eq.transmission - 1.0).abs() < 1e-10);
        assert!((b.combined_loss / (2.0 * eq.loss) - 1.0).abs() < 1e-10);
        assert!((b.mode_matching / eq.mode_matching - 1.0).abs() < 1e-10);
    }

    #[test]
    fn kappa_examples() {
        let gap = 852e-9 / 2.0;
        let b5 = MirrorBudget { transmission: 0.5 * PPM, loss: 0.5 * PPM, total_loss: PPM, mode_matching: 1.0 };
        let b2 = MirrorBudget { transmission: 0.2 * PPM, loss: 0.2 * PPM, total_loss: 0.4 * PPM, mode_matching: 1.0 };
        let k5 = cavity_kappa(&b5, gap, LengthConvention::Physical).unwrap();
        let k2 = cavity_kappa(&b2, gap, LengthConvention::Physical).unwrap();
        assert!((k5 / 56e6 - 1.0).abs() < 0.02, "{k5}");
        assert!((k2 / 22e6 - 1.0).abs() < 0.02, "{k2}");
        let k_long = cavity_kappa(&b5, 2.0 * gap, LengthConvention::Physical).unwrap();
        assert!((k_long / k5 - 0.5).abs() < 1e-12);
        let eff = LengthConvention::Effective { n_high: 2.0676, n_low: 1.455, wavelength: 852e-9 };
        assert!(cavity_kappa(&b5, gap, eff).unwrap() < k5);
    }

    #[test]
    fn critical_number_examples() {
        let (n0, big) = critical_numbers(647e6_f64, 56e6, 2.6e6).unwrap();
        assert!((n0 / 8.1e-6 - 1.0).abs() < 0.03);
        assert!((big / 7.0e-4 - 1.0).abs() < 0.03);
        let (n0, big) = critical_numbers(770e6_f64, 22e6, 2.6e6).unwrap();
        assert!((n0 / 5.7e-6 - 1.0).abs() < 0.03);
        assert!((big / 1.9e-4 - 1.0).abs() < 0.03);
        assert_eq!(critical_numbers(647e6, 56e6, 0.0).unwrap(), (0.0, 0.0));
        let tau = 2.0 * std::f64::consts::PI;
        let (a, b) = critical_numbers(647e6 * tau, 56e6 * tau, 2.6e6 * tau).unwrap();
        let (c, d) = critical_numbers(647e6, 56e6, 2.6e6).unwrap();
        assert!((a / c - 1.0).abs() < 1e-12 && (b / d - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn partition_round_trip(t in 0.1f64..100.0, l in 0.0f64..100.0, eps in 0.05f64..1.0, p in 1e-6f64..1e-2) {
            let m = PowerTriple::simulate(t * PPM, l * PPM, eps, p).unwrap();
            let b = partition_loss(&m).unwrap();
            prop_assert!((b.transmission / (t * PPM) - 1.0).abs() < 1e-10);
            prop_assert!((b.loss - l * PPM).abs() < 1e-10 * (t + l) * PPM);
            prop_assert!((b.mode_matching / eps - 1.0).abs() < 1e-10);
        }

        #[test]
        fn partition_is_scale_invariant(k in 1e-3f64..1e3) {
            let m = paper_triple();
            let scaled = PowerTriple {
                p_in: m.p_in * k,
                p_reflected: m.p_reflected * k,
                p_transmitted: m.p_transmitted * k,
                finesse: m.finesse,
            };
            let a = partition_loss(&m).unwrap();
            let b = partition_loss(&scaled).unwrap();
            prop_assert!((a.transmission / b.transmission - 1.0).abs() < 1e-12);
            prop_assert!((a.mode_matching / b.mode_matching - 1.0).abs() < 1e-12);
        }

        #[test]
        fn simulated_transmission_matches_resonant_formula(t in 0.1f64..50.0, l in 0.0f64..50.0) {
            let m = PowerTriple::simulate(t * PPM, l * PPM, 1.0, 1.0).unwrap();
            let direct = resonant_transmission(t * PPM, t * PPM, l * PPM, l * PPM);
            prop_assert!((m.p_transmitted - direct).abs() < 1e-12);
        }
    }
}
