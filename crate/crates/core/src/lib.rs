//! Zero-dispersion-limit laboratory for the periodic Benjamin–Ono equation.
//!
//! The crate is generic over the working precision through [`Real`]
//! (implemented for `f32` and `f64`); the aliases at the crate root fix
//! `f64`, which is what the experiments use.

// `!(a <= b)` is used on purpose so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod burgers;
pub mod error;
pub mod evolution;
pub mod fourier;
pub mod io;
pub mod lax;
pub mod linalg;
pub mod quadrature;
pub mod quantization;
pub mod roots;
pub mod scalar;
pub mod single_well;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision aliases.
pub type Signal = fourier::PeriodicSignal<f64>;
pub type Profile = single_well::SingleWellProfile<f64>;
pub type Spectrum = lax::LaxSpectrum<f64>;
pub type ShiftData = lax::ShiftMatrixData<f64>;
pub type Flow<'s> = evolution::FlowState<'s, f64>;
pub type Branches = burgers::BranchSet<f64>;
pub type Root = quantization::RootRecord<f64>;
pub type ZdlRow = evolution::ZdlRecord<f64>;

/// Single-precision aliases.
pub type Signal32 = fourier::PeriodicSignal<f32>;
pub type Spectrum32 = lax::LaxSpectrum<f32>;
