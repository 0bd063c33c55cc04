//! Exact homogenization through the microstructure-specific Floquet
//! Green's function and its ensemble-averaged Fourier series.
//!
//! The ensemble Green's function is
//! `<G>(r) = D e^{-mu|r|} Σ_m a_m(mu) a_{-m}(-mu) e^{i m pi |r| / L}`;
//! each term transforms as `∫ e^{-β|r|} e^{-iκr} dr = 2β / (β² + κ²)` with
//! `β_m = mu - i m pi / L`, which gives the closed-form kernels below.

mod floquet;
mod fourier;

pub use floquet::{
    branch_coefficients, jump_matrix, layer_matrix, mat2_det, mat2_mul, normalization_d,
    phase_wavenumber, solve_floquet, unit_cell_transfer_matrix, BranchCoefficients, FloquetBasis,
    FloquetNumber, FloquetSign, Mat2,
};
pub use fourier::{fourier_coefficients, FourierKernelSeries};

use crate::analysis::{EffectiveTensor, Method};
use crate::error::{Error, Result};
use crate::laminate::{UnitCell, WeightSpec};
use crate::scalar::{imag_unit, re, Cx, Real};

/// Default series truncation.
pub const DEFAULT_MODES: usize = 100;

/// Real-space ensemble kernels at one separation `r = x - x'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleKernels<T> {
    /// `<-K G_x w>(r)`: flux response.
    pub flux: Cx<T>,
    /// `<C G w>(r)` including the point capacity: heat-content response.
    pub heat: Cx<T>,
    /// `<w G w>(r)`: weighted temperature response.
    pub weighted: Cx<T>,
}

/// Floquet basis plus Fourier series for one `(cell, omega, weight)`.
#[derive(Debug, Clone)]
pub struct ExactHomogenization<T> {
    pub basis: FloquetBasis<T>,
    pub series: FourierKernelSeries<T>,
    pub weight: WeightSpec<T>,
}

impl<T: Real> ExactHomogenization<T> {
    pub fn new(cell: &UnitCell<T>, omega: T, weight: &WeightSpec<T>, m_max: usize) -> Result<Self> {
        if m_max == 0 {
            return Err(Error::InvalidArgument("series truncation M must be >= 1".into()));
        }
        let basis = FloquetBasis::new(cell, omega)?;
        let series = fourier_coefficients(&basis, weight, m_max)?;
        Ok(Self {
            basis,
            series,
            weight: weight.clone(),
        })
    }

    pub fn omega(&self) -> T {
        self.basis.omega
    }

    /// Ensemble kernels at separation `r` (right-hand branch at `r = 0`).
    pub fn ensemble_kernels(&self, r: T) -> EnsembleKernels<T> {
        let s = &self.series;
        let l = self.basis.cell.half_length;
        let mu = self.basis.mu();
        let ar = r.abs();
        let mut out = EnsembleKernels {
            flux: re(T::zero()),
            heat: re(T::zero()),
            weighted: re(T::zero()),
        };
        for i in 0..s.len() {
            let j = s.mirror(i);
            let m = s.mode(i);
            let phase = (imag_unit::<T>() * (T::lit(m as f64) * T::PI() * ar / l)).exp();
            out.weighted += s.aw_plus[i] * s.aw_minus[j] * phase;
            if r >= T::zero() {
                out.flux += s.aw_plus[i] * s.b_minus[j] * phase;
                out.heat += s.aw_plus[i] * s.c_minus[j] * phase;
            } else {
                out.flux += s.b_plus[i] * s.aw_minus[j] * phase;
                out.heat += s.c_plus[i] * s.aw_minus[j] * phase;
            }
        }
        let f = self.basis.d * (-mu * ar).exp();
        out.flux *= f;
        out.heat *= f;
        out.weighted *= f;
        out
    }

    /// Ensemble-averaged Green's function `<G>(r)` (unweighted).
    pub fn ensemble_green(&self, r: T) -> Cx<T> {
        let s = &self.series;
        let l = self.basis.cell.half_length;
        let ar = r.abs();
        let mut g = re(T::zero());
        for i in 0..s.len() {
            let m = s.mode(i);
            let phase = (imag_unit::<T>() * (T::lit(m as f64) * T::PI() * ar / l)).exp();
            g += s.a_plus[i] * s.a_minus[s.mirror(i)] * phase;
        }
        g * self.basis.d * (-self.basis.mu() * ar).exp()
    }

    /// Fourier transforms `(<wGw>~, <-K G_x w>~, <C G w>~)` at `kappa`,
    /// with the convention `∫ f(r) e^{-i kappa r} dr`.
    pub fn transformed_kernels(&self, kappa: T) -> (Cx<T>, Cx<T>, Cx<T>) {
        let s = &self.series;
        let i_k = imag_unit::<T>() * kappa;
        let (mut w, mut q, mut f) = (re(T::zero()), re(T::zero()), re(T::zero()));
        for i in 0..s.len() {
            let j = s.mirror(i);
            let beta = s.beta[i];
            let den = beta * beta + kappa * kappa;
            w += s.aw_plus[i] * s.aw_minus[j] * beta * T::lit(2.0) / den;
            q += (s.aw_plus[i] * s.b_minus[j] * (beta - i_k) + s.b_plus[i] * s.aw_minus[j] * (beta + i_k)) / den;
            f += (s.aw_plus[i] * s.c_minus[j] * (beta - i_k) + s.c_plus[i] * s.aw_minus[j] * (beta + i_k)) / den;
        }
        let d = self.basis.d;
        (w * d, q * d, f * d)
    }

    /// Effective kernels at Fourier wavenumber `kappa`.
    pub fn effective(&self, kappa: T) -> Result<EffectiveTensor<T>> {
        let s = &self.series;
        let (mut w, mut kk, mut chi, mut xi, mut c) =
            (re(T::zero()), re(T::zero()), re(T::zero()), re(T::zero()), re(T::zero()));
        let mut scale = T::zero();
        for i in 0..s.len() {
            let j = s.mirror(i);
            let beta = s.beta[i];
            let den = beta * beta + kappa * kappa;
            let ww = s.aw_plus[i] * s.aw_minus[j] * beta * T::lit(2.0) / den;
            scale = scale.max(ww.norm());
            w += ww;
            kk += (s.b_plus[i] * s.aw_minus[j] - s.aw_plus[i] * s.b_minus[j]) / den;
            chi += beta * (s.aw_plus[i] * s.b_minus[j] + s.b_plus[i] * s.aw_minus[j]) / den;
            xi += (s.c_plus[i] * s.aw_minus[j] - s.aw_plus[i] * s.c_minus[j]) / den;
            c += beta * (s.aw_plus[i] * s.c_minus[j] + s.c_plus[i] * s.aw_minus[j]) / den;
        }
        if !(w.norm() > scale * T::lit(1e-12)) {
            return Err(Error::IllConditioned(format!(
                "weighted ensemble Green's function vanishes at kappa = {kappa}"
            )));
        }
        Ok(EffectiveTensor {
            k: -kk / w,
            chi: chi / w,
            xi: xi / w,
            c: c / w,
            omega: self.omega(),
            wavenumber: kappa,
            weight: self.weight.kind(),
            method: Method::Exact,
        })
    }
}

/// Effective kernels of the exact method at `(omega, kappa)`.
pub fn effective_fourier<T: Real>(
    cell: &UnitCell<T>,
    omega: T,
    kappa: T,
    weight: &WeightSpec<T>,
    m_max: usize,
) -> Result<EffectiveTensor<T>> {
    ExactHomogenization::new(cell, omega, weight, m_max)?.effective(kappa)
}
