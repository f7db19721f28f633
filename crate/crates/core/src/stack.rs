//! Normal-incidence transfer matrices for dielectric layers and mirror stacks.
//!
//! A layer of complex index `N = n - ik` and physical thickness `d` is
//! represented by the characteristic matrix
//!
//! ```text
//! [ cos δ        i sin δ / Y ]
//! [ i Y sin δ    cos δ       ]      δ = 2π N d / λ,  Y = N
//! ```
//!
//! which maps the tangential fields `(E, H)` at the far face of the layer to
//! those at the face the light enters through. The free-space admittance
//! `sqrt(ε0/μ0)` is dropped from `Y`; it cancels in every transmission and
//! reflection coefficient. A stack's matrix is the ordered product
//! `M1 M2 ... Mq` with layer 1 the one the light meets first.

use std::ops::Mul;

use num_complex::Complex;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::numeric::brent_root;
use crate::scalar::Scalar;

/// Refractive index with an optional absorption (extinction) part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MediumIndex<T> {
    real_part: T,
    imag_part: T,
}

impl<T: Scalar> MediumIndex<T> {
    pub fn new(real_part: T, imag_part: T) -> Result<Self> {
        if !(real_part > T::zero()) || !real_part.is_finite() {
            return Err(domain(format!("refractive index must be positive, got {real_part}")));
        }
        if !(imag_part >= T::zero()) || !imag_part.is_finite() {
            return Err(domain(format!(
                "absorption index must be non-negative, got {imag_part}"
            )));
        }
        Ok(Self { real_part, imag_part })
    }

    /// Lossless medium. Panics on a non-positive index.
    pub fn lossless(n: T) -> Self {
        Self::new(n, T::zero()).expect("lossless index must be positive and finite")
    }

    pub fn vacuum() -> Self {
        Self::lossless(T::one())
    }

    pub fn real_part(&self) -> T {
        self.real_part
    }

    pub fn imag_part(&self) -> T {
        self.imag_part
    }

    pub fn is_lossless(&self) -> bool {
        self.imag_part == T::zero()
    }

    /// `n - ik`, the sign convention the layer matrices are written in.
    pub fn complex(&self) -> Complex<T> {
        Complex::new(self.real_part, -self.imag_part)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Layer<T> {
    pub index: MediumIndex<T>,
    thickness: T,
}

impl<T: Scalar> Layer<T> {
    pub fn new(index: MediumIndex<T>, thickness: T) -> Result<Self> {
        if !(thickness >= T::zero()) || !thickness.is_finite() {
            return Err(domain(format!("layer thickness must be non-negative, got {thickness}")));
        }
        Ok(Self { index, thickness })
    }

    pub fn thickness(&self) -> T {
        self.thickness
    }

    /// `n d`, the optical thickness.
    pub fn optical_thickness(&self) -> T {
        self.index.real_part() * self.thickness
    }

    pub fn with_thickness(&self, thickness: T) -> Result<Self> {
        Self::new(self.index, thickness)
    }
}

/// 2x2 complex characteristic matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix<T> {
    pub m11: Complex<T>,
    pub m12: Complex<T>,
    pub m21: Complex<T>,
    pub m22: Complex<T>,
}

impl<T: Scalar> TransferMatrix<T> {
    pub fn identity() -> Self {
        let (o, z) = (Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero()));
        Self { m11: o, m12: z, m21: z, m22: o }
    }

    /// Characteristic matrix of a homogeneous slab of complex index `index`
    /// and thickness `thickness` (negative thickness propagates forward).
    pub fn slab(index: Complex<T>, thickness: T, vacuum_wavelength: T) -> Self {
        let k0 = T::two() * T::PI() / vacuum_wavelength;
        let delta = index * (k0 * thickness);
        let (c, s) = (delta.cos(), delta.sin());
        let i = Complex::new(T::zero(), T::one());
        Self { m11: c, m12: i * s / index, m21: i * index * s, m22: c }
    }

    pub fn det(&self) -> Complex<T> {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    /// Applies the matrix to a field pair `(E, H)`.
    pub fn apply(&self, field: (Complex<T>, Complex<T>)) -> (Complex<T>, Complex<T>) {
        (
            self.m11 * field.0 + self.m12 * field.1,
            self.m21 * field.0 + self.m22 * field.1,
        )
    }

    fn denominators(&self, y0: Complex<T>, ys: Complex<T>) -> (Complex<T>, Complex<T>) {
        let a = y0 * self.m11 + y0 * ys * self.m12;
        let b = self.m21 + ys * self.m22;
        (a, b)
    }

    /// Amplitude transmission coefficient between media of admittance `y0`
    /// (incident) and `ys` (exit).
    pub fn transmission_coefficient(&self, y0: Complex<T>, ys: Complex<T>) -> Complex<T> {
        let (a, b) = self.denominators(y0, ys);
        y0 * T::two() / (a + b)
    }

    pub fn reflection_coefficient(&self, y0: Complex<T>, ys: Complex<T>) -> Complex<T> {
        let (a, b) = self.denominators(y0, ys);
        (a - b) / (a + b)
    }
}

impl<T: Scalar> Mul for TransferMatrix<T> {
    type Output = Self;

    fn mul(self, o: Self) -> Self {
        Self {
            m11: self.m11 * o.m11 + self.m12 * o.m21,
            m12: self.m11 * o.m12 + self.m12 * o.m22,
            m21: self.m21 * o.m11 + self.m22 * o.m21,
            m22: self.m21 * o.m12 + self.m22 * o.m22,
        }
    }
}

/// Matrix of one layer at a given vacuum wavelength.
pub fn layer_matrix<T: Scalar>(layer: &Layer<T>, vacuum_wavelength: T) -> Result<TransferMatrix<T>> {
    check_wavelength(vacuum_wavelength)?;
    Ok(TransferMatrix::slab(layer.index.complex(), layer.thickness, vacuum_wavelength))
}

pub(crate) fn check_wavelength<T: Scalar>(vacuum_wavelength: T) -> Result<()> {
    if !(vacuum_wavelength > T::zero()) || !vacuum_wavelength.is_finite() {
        return Err(domain(format!(
            "vacuum wavelength must be positive, got {vacuum_wavelength}"
        )));
    }
    Ok(())
}

/// Layers between an ambient medium and a substrate.
///
/// `layers[0]` faces the ambient medium. An optional surface scatter loss is
/// modelled as a thin, index-matched attenuating sheet on the ambient side:
/// it removes the fraction `surface_scatter_loss` of the power on every
/// reflection without changing any phase.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DielectricStack<T> {
    pub ambient: MediumIndex<T>,
    pub layers: Vec<Layer<T>>,
    pub substrate: MediumIndex<T>,
    surface_scatter_loss: T,
}

impl<T: Scalar> DielectricStack<T> {
    pub fn new(ambient: MediumIndex<T>, layers: Vec<Layer<T>>, substrate: MediumIndex<T>) -> Self {
        Self { ambient, layers, substrate, surface_scatter_loss: T::zero() }
    }

    pub fn with_surface_scatter(mut self, loss: T) -> Result<Self> {
        if !(loss >= T::zero() && loss < T::one()) {
            return Err(domain(format!("surface scatter loss must be in [0, 1), got {loss}")));
        }
        self.surface_scatter_loss = loss;
        Ok(self)
    }

    pub fn surface_scatter_loss(&self) -> T {
        self.surface_scatter_loss
    }

    pub fn is_lossless(&self) -> bool {
        self.surface_scatter_loss == T::zero()
            && self.ambient.is_lossless()
            && self.substrate.is_lossless()
            && self.layers.iter().all(|l| l.index.is_lossless())
    }

    /// Matrix of the attenuating sheet standing in for surface scatter.
    pub(crate) fn scatter_sheet(&self) -> TransferMatrix<T> {
        if self.surface_scatter_loss == T::zero() {
            return TransferMatrix::identity();
        }
        // Amplitude attenuation exp(-beta) per pass, exp(-4 beta) = 1 - S per
        // reflection.
        let beta = -(T::one() - self.surface_scatter_loss).ln() / T::lit(4.0);
        let n = self.ambient.complex();
        let re = |x: T| Complex::new(x, T::zero());
        TransferMatrix {
            m11: re(beta.cosh()),
            m12: re(beta.sinh()) / n,
            m21: n * beta.sinh(),
            m22: re(beta.cosh()),
        }
    }

    /// Product of the layer matrices in traversal order (no scatter sheet).
    pub(crate) fn layers_matrix(&self, vacuum_wavelength: T) -> TransferMatrix<T> {
        self.layers.iter().fold(TransferMatrix::identity(), |acc, l| {
            acc * TransferMatrix::slab(l.index.complex(), l.thickness, vacuum_wavelength)
        })
    }

    /// Product of the layer matrices in reverse order, as seen by light
    /// arriving from the substrate side.
    pub(crate) fn reversed_layers_matrix(&self, vacuum_wavelength: T) -> TransferMatrix<T> {
        self.layers.iter().rev().fold(TransferMatrix::identity(), |acc, l| {
            acc * TransferMatrix::slab(l.index.complex(), l.thickness, vacuum_wavelength)
        })
    }

    pub fn transmission_coefficient(&self, vacuum_wavelength: T) -> Result<Complex<T>> {
        let m = stack_matrix(self, vacuum_wavelength)?;
        Ok(m.transmission_coefficient(self.ambient.complex(), self.substrate.complex()))
    }

    pub fn reflection_coefficient(&self, vacuum_wavelength: T) -> Result<Complex<T>> {
        let m = stack_matrix(self, vacuum_wavelength)?;
        Ok(m.reflection_coefficient(self.ambient.complex(), self.substrate.complex()))
    }

    /// Intensity transmission `(n_s / n_0) |t|^2`.
    pub fn transmission(&self, vacuum_wavelength: T) -> Result<T> {
        let t = self.transmission_coefficient(vacuum_wavelength)?;
        Ok(self.substrate.real_part() / self.ambient.real_part() * t.norm_sqr())
    }

    pub fn reflectance(&self, vacuum_wavelength: T) -> Result<T> {
        Ok(self.reflection_coefficient(vacuum_wavelength)?.norm_sqr())
    }

    /// Power fraction neither reflected nor transmitted.
    pub fn absorptance(&self, vacuum_wavelength: T) -> Result<T> {
        Ok(T::one() - self.reflectance(vacuum_wavelength)? - self.transmission(vacuum_wavelength)?)
    }

    /// Copy with every layer thickness multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Result<Self> {
        let layers = self
            .layers
            .iter()
            .map(|l| l.with_thickness(l.thickness * factor))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { layers, ..self.clone() })
    }

    /// Copy in which every layer whose real index equals `material` carries
    /// the absorption index `imag_part`.
    pub fn with_material_absorption(&self, material: T, imag_part: T) -> Result<Self> {
        let layers = self
            .layers
            .iter()
            .map(|l| {
                if l.index.real_part() == material {
                    Layer::new(MediumIndex::new(material, imag_part)?, l.thickness)
                } else {
                    Ok(*l)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { layers, ..self.clone() })
    }

    /// Gives every layer of one material the same absorption index, chosen
    /// so that the whole mirror absorbs `target` of the incident power at
    /// `vacuum_wavelength`.
    pub fn with_target_absorption(&self, material: T, target: T, vacuum_wavelength: T) -> Result<Self> {
        if !(target >= T::zero() && target < T::one()) {
            return Err(domain(format!("target absorption must be in [0, 1), got {target}")));
        }
        if !self.layers.iter().any(|l| l.index.real_part() == material) {
            return Err(domain(format!("no layer has index {material}")));
        }
        let base = self.with_material_absorption(material, T::zero())?;
        let base_loss = base.absorptance(vacuum_wavelength)?;
        let excess = |k: T| -> T {
            base.with_material_absorption(material, k)
                .and_then(|s| s.absorptance(vacuum_wavelength))
                .map(|a| a - target)
                .unwrap_or_else(|_| T::infinity())
        };
        if target <= base_loss {
            return Ok(base);
        }
        let mut hi = T::lit(1e-9);
        while excess(hi) < T::zero() {
            hi = hi * T::lit(10.0);
            if hi > T::lit(10.0) {
                return Err(domain("absorption target unreachable"));
            }
        }
        let k = brent_root(excess, T::zero(), hi, hi * T::lit(1e-12), 200)?;
        base.with_material_absorption(material, k)
    }
}

/// Ordered product of all layer matrices, including the surface scatter
/// sheet when one is set.
pub fn stack_matrix<T: Scalar>(stack: &DielectricStack<T>, vacuum_wavelength: T) -> Result<TransferMatrix<T>> {
    check_wavelength(vacuum_wavelength)?;
    Ok(stack.scatter_sheet() * stack.layers_matrix(vacuum_wavelength))
}

pub fn transmission_coefficient<T: Scalar>(stack: &DielectricStack<T>, vacuum_wavelength: T) -> Result<Complex<T>> {
    stack.transmission_coefficient(vacuum_wavelength)
}

pub fn transmission<T: Scalar>(stack: &DielectricStack<T>, vacuum_wavelength: T) -> Result<T> {
    stack.transmission(vacuum_wavelength)
}

/// `(HL)^pairs H` quarter-wave design in vacuum on a substrate.
///
/// Each layer has physical thickness `thickness_scale * center / (4 n)`, so a
/// scale below one moves the design center to shorter wavelengths.
pub fn quarter_wave_stack<T: Scalar>(
    n_high: MediumIndex<T>,
    n_low: MediumIndex<T>,
    n_substrate: MediumIndex<T>,
    pair_count: usize,
    center_wavelength: T,
    thickness_scale: T,
) -> Result<DielectricStack<T>> {
    check_wavelength(center_wavelength)?;
    if !(thickness_scale > T::zero()) || !thickness_scale.is_finite() {
        return Err(domain(format!("thickness scale must be positive, got {thickness_scale}")));
    }
    let quarter = |n: MediumIndex<T>| {
        Layer::new(n, thickness_scale * center_wavelength / (T::lit(4.0) * n.real_part()))
    };
    let high = quarter(n_high)?;
    let low = quarter(n_low)?;
    let mut layers = Vec::with_capacity(2 * pair_count + 1);
    for _ in 0..pair_count {
        layers.push(high);
        layers.push(low);
    }
    layers.push(high);
    Ok(DielectricStack::new(MediumIndex::vacuum(), layers, n_substrate))
}

/// `T = 4 n_s n_0 n_L^(2p) / n_H^(2p+2)` for a `(HL)^p H` stack at its
/// center wavelength.
///
/// This drops the `(n_s/n_H)(n_L/n_H)^p` term of the exact center
/// denominator, whose relative size is about `n_0 n_s (n_L/n_H)^(2p) / n_H^2`;
/// see [`exact_center_transmission`].
pub fn closed_form_center_transmission<T: Scalar>(n_high: T, n_low: T, n_ambient: T, n_substrate: T, pair_count: usize) -> Result<T> {
    check_positive_indices(&[n_high, n_low, n_ambient, n_substrate])?;
    let p = pair_count as i32;
    Ok(T::lit(4.0) * n_substrate * n_ambient * n_low.powi(2 * p) / n_high.powi(2 * p + 2))
}

/// Center transmission of a `(HL)^p H` stack keeping both terms of the
/// antidiagonal system matrix.
pub fn exact_center_transmission<T: Scalar>(n_high: T, n_low: T, n_ambient: T, n_substrate: T, pair_count: usize) -> Result<T> {
    check_positive_indices(&[n_high, n_low, n_ambient, n_substrate])?;
    let p = pair_count as i32;
    let weak = n_substrate / n_high * (n_low / n_high).powi(p);
    let strong = n_high / n_ambient * (n_high / n_low).powi(p);
    let amp = T::two() / (weak + strong);
    Ok(n_substrate / n_ambient * amp * amp)
}

fn check_positive_indices<T: Scalar>(indices: &[T]) -> Result<()> {
    if indices.iter().any(|n| !(*n > T::zero())) {
        return Err(domain("refractive indices must be positive"));
    }
    Ok(())
}

/// Edges `(short, long)` of the first-order stop band of an ideal
/// quarter-wave stack centred at `center_wavelength`.
pub fn quarter_wave_stopband<T: Scalar>(n_high: T, n_low: T, center_wavelength: T) -> (T, T) {
    let half_width = T::two() / T::PI() * ((n_high - n_low) / (n_high + n_low)).abs().asin();
    (
        center_wavelength / (T::one() + half_width),
        center_wavelength / (T::one() - half_width),
    )
}
