//! Transfer-matrix models of dielectric mirrors and short Fabry-Perot
//! cavities, with the analysis used to recover coating parameters from
//! measured resonance pairs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cavity;
pub mod description;
pub mod dispersion;
pub mod error;
pub mod field;
pub mod loss;
pub mod numeric;
pub mod perturb;
pub mod scalar;
pub mod stack;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Stack = stack::DielectricStack<f64>;
pub type Index = stack::MediumIndex<f64>;
pub type Cavity = cavity::CavityAssembly<f64>;

pub type Stack32 = stack::DielectricStack<f32>;
pub type Index32 = stack::MediumIndex<f32>;
pub type Cavity32 = cavity::CavityAssembly<f32>;
