//! Effective-tensor algebra, rate form, thermal impedance, asymmetry sweeps
//! and the cross-method comparison harness.

use crate::brm;
use crate::eim::{self, EimOptions};
use crate::error::{Error, Result};
use crate::exact::ExactHomogenization;
use crate::laminate::{FrequencyScaling, Realization, UnitCell, WeightKind, WeightSpec};
use crate::scalar::{imag_unit, rel_diff, Cx, Real};
use rayon::prelude::*;

/// Floor for relative coupling comparisons, in coupling units.
pub const COUPLING_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Eim,
    Exact,
    Brm,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Eim => "eim",
            Method::Exact => "exact",
            Method::Brm => "brm",
        }
    }
}

/// Effective constitutive kernels at one `(omega, wavenumber)`:
/// `<q> = -K <T,x> + chi <T>` and `<F> = C <T> + xi <T,x>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveTensor<T> {
    pub k: Cx<T>,
    pub chi: Cx<T>,
    pub xi: Cx<T>,
    pub c: Cx<T>,
    pub omega: T,
    /// Bloch wavenumber `zeta` or Fourier wavenumber `kappa`.
    pub wavenumber: T,
    pub weight: WeightKind,
    pub method: Method,
}

impl<T: Real> EffectiveTensor<T> {
    /// Kernels in the order `(K, chi, xi, C)`.
    pub fn kernels(&self) -> [Cx<T>; 4] {
        [self.k, self.chi, self.xi, self.c]
    }

    /// `|i omega xi - chi| / max(|chi|, floor)`.
    pub fn willis_defect(&self) -> T {
        let lhs = imag_unit::<T>() * self.omega * self.xi;
        (lhs - self.chi).norm() / self.chi.norm().max(T::lit(COUPLING_FLOOR))
    }

    /// Per-kernel relative deviation from `reference`.
    pub fn relative_deviation(&self, reference: &Self) -> [T; 4] {
        let a = self.kernels();
        let b = reference.kernels();
        let floor = T::lit(COUPLING_FLOOR);
        [
            rel_diff(a[0], b[0], floor),
            rel_diff(a[1], b[1], floor),
            rel_diff(a[2], b[2], floor),
            rel_diff(a[3], b[3], floor),
        ]
    }
}

/// Kernels in rate variables: heat flux and sensible-heat rate against
/// temperature gradient and temperature rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFormTensor<T> {
    pub k: Cx<T>,
    /// `chi / (-i omega)`.
    pub chi_rate: Cx<T>,
    /// `-i omega xi`.
    pub xi_rate: Cx<T>,
    pub c: Cx<T>,
    pub base: EffectiveTensor<T>,
}

pub fn rate_form<T: Real>(tensor: &EffectiveTensor<T>) -> Result<RateFormTensor<T>> {
    if !(tensor.omega > T::zero()) {
        return Err(Error::InvalidArgument("rate form is undefined at omega = 0".into()));
    }
    let m_iw = -imag_unit::<T>() * tensor.omega;
    Ok(RateFormTensor {
        k: tensor.k,
        chi_rate: tensor.chi / m_iw,
        xi_rate: tensor.xi * m_iw,
        c: tensor.c,
        base: *tensor,
    })
}

/// Inverse of [`rate_form`].
pub fn from_rate_form<T: Real>(rate: &RateFormTensor<T>) -> EffectiveTensor<T> {
    let m_iw = -imag_unit::<T>() * rate.base.omega;
    EffectiveTensor {
        k: rate.k,
        chi: rate.chi_rate * m_iw,
        xi: rate.xi_rate / m_iw,
        c: rate.c,
        ..rate.base
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpedanceResult<T> {
    pub z_plus: Cx<T>,
    pub z_minus: Cx<T>,
    /// `arg(Z+ / Z-)`, in `(-2 pi, 0]` for a single point.
    pub delta_beta: T,
}

/// `Z± = 1 / (chi ∓ i zeta K)`.
pub fn impedance<T: Real>(tensor: &EffectiveTensor<T>, zeta: T) -> Result<ImpedanceResult<T>> {
    let izk = imag_unit::<T>() * zeta * tensor.k;
    let dp = tensor.chi - izk;
    let dm = tensor.chi + izk;
    let scale = tensor.chi.norm() + izk.norm();
    let tiny = (scale * T::lit(1e3) * T::epsilon()).max(T::lit(COUPLING_FLOOR));
    if !(dp.norm() > tiny) || !(dm.norm() > tiny) {
        return Err(Error::InfiniteImpedance);
    }
    let z_plus = Cx::new(T::one(), T::zero()) / dp;
    let z_minus = Cx::new(T::one(), T::zero()) / dm;
    let mut delta_beta = (z_plus / z_minus).arg();
    if delta_beta > T::zero() {
        delta_beta -= T::TAU();
    }
    Ok(ImpedanceResult {
        z_plus,
        z_minus,
        delta_beta,
    })
}

/// Makes a phase sequence continuous (jumps reduced modulo `2 pi`).
pub fn unwrap_phase<T: Real>(values: &mut [T]) {
    for i in 1..values.len() {
        let mut d = values[i] - values[i - 1];
        while d > T::PI() {
            values[i] -= T::TAU();
            d -= T::TAU();
        }
        while d < -T::PI() {
            values[i] += T::TAU();
            d += T::TAU();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymmetryRow<T> {
    pub alpha: T,
    pub omega_bar: T,
    pub tensor: EffectiveTensor<T>,
    pub impedance: ImpedanceResult<T>,
}

/// Exact-method couplings and impedance for each `alpha` over an `omega_bar`
/// grid (de-phased weight). `delta_beta` is unwrapped along each grid.
pub fn asymmetry_sweep<T: Real>(
    template: &UnitCell<T>,
    alphas: &[T],
    omega_bars: &[T],
    zeta: T,
    scaling: FrequencyScaling,
    m_max: usize,
) -> Result<Vec<AsymmetryRow<T>>> {
    let mut out = Vec::with_capacity(alphas.len() * omega_bars.len());
    for &alpha in alphas {
        let cell = template.with_alpha(alpha);
        cell.validate()?;
        let rows: Result<Vec<_>> = omega_bars
            .par_iter()
            .map(|&wb| {
                let omega = scaling.omega(&cell, wb);
                let tensor = ExactHomogenization::new(&cell, omega, &WeightSpec::Dephased, m_max)?
                    .effective(zeta)?;
                let imp = impedance(&tensor, zeta)?;
                Ok(AsymmetryRow {
                    alpha,
                    omega_bar: wb,
                    tensor,
                    impedance: imp,
                })
            })
            .collect();
        let mut rows = rows?;
        let mut phases: Vec<T> = rows.iter().map(|r| r.impedance.delta_beta).collect();
        unwrap_phase(&mut phases);
        for (r, ph) in rows.iter_mut().zip(phases) {
            r.impedance.delta_beta = ph;
        }
        out.extend(rows);
    }
    Ok(out)
}

/// Knobs for [`compare_methods`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonSettings<T> {
    pub scaling: FrequencyScaling,
    pub eim: EimOptions<T>,
    /// Realizations for the EIM extraction (one suffices for de-phased weights).
    pub eim_realizations: usize,
    /// Realizations for the boundary-retrieval ensemble.
    pub brm_realizations: usize,
    pub modes: usize,
    pub tolerance: T,
}

impl<T: Real> Default for ComparisonSettings<T> {
    fn default() -> Self {
        Self {
            scaling: FrequencyScaling::InverseLengthSquared,
            eim: EimOptions::default(),
            eim_realizations: 1,
            brm_realizations: 100,
            modes: crate::exact::DEFAULT_MODES,
            tolerance: T::lit(0.02),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow<T> {
    pub omega_bar: T,
    pub zeta: T,
    pub exact: EffectiveTensor<T>,
    pub eim: EffectiveTensor<T>,
    pub brm: Option<EffectiveTensor<T>>,
    /// Largest pairwise deviation per kernel `(K, chi, xi, C)`, relative to
    /// the exact kernel.
    pub deviation: [T; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport<T> {
    pub rows: Vec<ComparisonRow<T>>,
    pub max_deviation: [T; 4],
    pub tolerance: T,
    pub passed: bool,
}

fn pairwise_deviation<T: Real>(tensors: &[EffectiveTensor<T>], reference: &EffectiveTensor<T>) -> [T; 4] {
    let floor = T::lit(COUPLING_FLOOR);
    let mut out = [T::zero(); 4];
    let r = reference.kernels();
    for i in 0..tensors.len() {
        for j in (i + 1)..tensors.len() {
            let (a, b) = (tensors[i].kernels(), tensors[j].kernels());
            for k in 0..4 {
                out[k] = out[k].max((a[k] - b[k]).norm() / r[k].norm().max(floor));
            }
        }
    }
    out
}

/// Runs exact, EIM and (where applicable) BRM over an `omega_bar` grid.
/// BRM is skipped for masked and custom weights, which it cannot represent.
pub fn compare_methods<T: Real>(
    cell: &UnitCell<T>,
    omega_bars: &[T],
    zeta: T,
    weight: &WeightSpec<T>,
    settings: &ComparisonSettings<T>,
) -> Result<ComparisonReport<T>> {
    let with_brm = matches!(weight, WeightSpec::Dephased | WeightSpec::Uniform);
    let rows: Result<Vec<_>> = omega_bars
        .par_iter()
        .map(|&wb| {
            let omega = settings.scaling.omega(cell, wb);
            let exact = ExactHomogenization::new(cell, omega, weight, settings.modes)?.effective(zeta)?;
            let eim = if settings.eim_realizations <= 1 {
                eim::extract_effective_pm_zeta(cell, &Realization::reference(), omega, zeta, &settings.eim, weight)?
            } else {
                eim::ensemble_effective(cell, omega, zeta, &settings.eim, weight, settings.eim_realizations)?
            };
            let brm = if with_brm {
                Some(brm::brm_effective(cell, omega, zeta, &settings.eim, settings.brm_realizations)?)
            } else {
                None
            };
            let mut all = vec![exact, eim];
            all.extend(brm);
            let deviation = pairwise_deviation(&all, &exact);
            Ok(ComparisonRow {
                omega_bar: wb,
                zeta,
                exact,
                eim,
                brm,
                deviation,
            })
        })
        .collect();
    let rows = rows?;
    let mut max_deviation = [T::zero(); 4];
    for r in &rows {
        for k in 0..4 {
            max_deviation[k] = max_deviation[k].max(r.deviation[k]);
        }
    }
    let passed = max_deviation.iter().all(|&d| d < settings.tolerance);
    Ok(ComparisonReport {
        rows,
        max_deviation,
        tolerance: settings.tolerance,
        passed,
    })
}
