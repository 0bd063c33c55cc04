//! Effective (Willis-type) thermal properties of a periodic two-phase
//! laminate carrying a concentrated heat capacity.
//!
//! Three homogenization routes share one cell model:
//! - [`exact`]: Floquet Green's function of the microstructure and its
//!   ensemble-averaged Fourier series, giving closed-form kernels;
//! - [`eim`]: the equivalent inclusion method on a mesh of line elements;
//! - [`brm`]: boundary retrieval from ensemble-averaged EIM boundary data.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar for the common case.

pub mod analysis;
pub mod brm;
pub mod eim;
pub mod error;
pub mod exact;
pub mod greens;
pub mod laminate;
pub mod linalg;
pub mod oracle;
pub mod quadrature;
pub mod scalar;
pub mod validation;

pub use analysis::{
    asymmetry_sweep, compare_methods, from_rate_form, impedance, rate_form, unwrap_phase, AsymmetryRow,
    ComparisonReport, ComparisonRow, ComparisonSettings, EffectiveTensor, ImpedanceResult, Method,
    RateFormTensor,
};
pub use error::{Error, Result};
pub use laminate::{
    capacity_point, material_at, phase_at, weight_at, EvaluationPoint, FrequencyScaling, Phase, PhaseId,
    Realization, UnitCell, WeightKind, WeightSpec, WeightTable,
};
pub use scalar::{Cx, Real};

pub type C64 = num_complex::Complex64;
pub type C32 = num_complex::Complex32;

pub type UnitCellF64 = UnitCell<f64>;
pub type UnitCellF32 = UnitCell<f32>;
pub type RealizationF64 = Realization<f64>;
pub type RealizationF32 = Realization<f32>;
pub type WeightSpecF64 = WeightSpec<f64>;
pub type WeightSpecF32 = WeightSpec<f32>;
pub type EffectiveTensorF64 = EffectiveTensor<f64>;
pub type EffectiveTensorF32 = EffectiveTensor<f32>;
pub type ImpedanceResultF64 = ImpedanceResult<f64>;
pub type ImpedanceResultF32 = ImpedanceResult<f32>;
pub type FloquetBasisF64 = exact::FloquetBasis<f64>;
pub type FloquetBasisF32 = exact::FloquetBasis<f32>;
pub type ExactHomogenizationF64 = exact::ExactHomogenization<f64>;
pub type ExactHomogenizationF32 = exact::ExactHomogenization<f32>;
pub type EimOptionsF64 = eim::EimOptions<f64>;
pub type EimOptionsF32 = eim::EimOptions<f32>;
pub type EimSolutionF64 = eim::EimSolution<f64>;
pub type EimSolutionF32 = eim::EimSolution<f32>;
