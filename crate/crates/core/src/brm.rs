//! Boundary-retrieval method: effective kernels from ensemble-averaged
//! boundary temperature and flux at `±zeta`, with the capacity and the
//! heat-coupling kernels fixed by the averaged heat balance
//! `i zeta (K <T,x> - chi <T>) + i omega (C <T> + xi <T,x>) + Q = 0`.
//!
//! A uniform medium with the effective constitutive law carries plane waves
//! `exp(±i zeta x)` with `q/T = chi ∓ i zeta K`; matching these to the
//! boundary ratios gives `K` and `chi`. The retrieval never looks at
//! weighted interior fields, so it is blind to the averaging weight.

use crate::analysis::{EffectiveTensor, Method};
use crate::eim::{loading_zeta, solve_loading, EimOptions, SourceSpec};
use crate::error::{Error, Result};
use crate::laminate::{Realization, UnitCell, WeightKind, WeightSpec};
use crate::scalar::{imag_unit, re, Cx, Real};
use rayon::prelude::*;

/// Ensemble boundary data for one loading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryResponse<T> {
    pub zeta: T,
    pub t_left: Cx<T>,
    pub t_right: Cx<T>,
    pub q_left: Cx<T>,
    pub q_right: Cx<T>,
    /// De-phased ensemble cell average `<T>`.
    pub t_average: Cx<T>,
    /// Source amplitude `Q`.
    pub source: Cx<T>,
}

impl<T: Real> BoundaryResponse<T> {
    /// `|T^L e^{2 i zeta L} - T^R| + |q^L e^{2 i zeta L} - q^R|`, relative.
    pub fn bloch_residual(&self, cell: &UnitCell<T>) -> T {
        let ph = (imag_unit::<T>() * self.zeta * cell.period()).exp();
        let rt = (self.t_left * ph - self.t_right).norm() / self.t_right.norm();
        let rq = (self.q_left * ph - self.q_right).norm() / self.q_right.norm();
        rt.max(rq)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryResponseSet<T> {
    pub omega: T,
    /// Requested wavenumber (loadings use `±loading_zeta(zeta)`).
    pub zeta: T,
    pub plus: BoundaryResponse<T>,
    pub minus: BoundaryResponse<T>,
    pub realizations: usize,
}

fn one_loading<T: Real>(
    cell: &UnitCell<T>,
    omega: T,
    z: T,
    options: &EimOptions<T>,
    ny: usize,
) -> Result<BoundaryResponse<T>> {
    let q = re(T::one());
    let reals = Realization::uniform_ensemble(cell, ny);
    let parts: Result<Vec<[Cx<T>; 3]>> = reals
        .par_iter()
        .map(|r| {
            let src = SourceSpec::plane(cell, q, z);
            let (sol, avg) = solve_loading(cell, r, omega, z, options, &WeightSpec::Dephased, src)?;
            Ok([sol.t_left(), sol.q_left(), avg.t])
        })
        .collect();
    let inv = T::one() / T::lit(ny as f64);
    let mut acc = [re(T::zero()); 3];
    for p in parts? {
        for k in 0..3 {
            acc[k] += p[k] * inv;
        }
    }
    let [tl, ql, t_average] = acc;
    let ph = (imag_unit::<T>() * z * cell.period()).exp();
    Ok(BoundaryResponse {
        zeta: z,
        t_left: tl,
        t_right: tl * ph,
        q_left: ql,
        q_right: ql * ph,
        t_average,
        source: q,
    })
}

/// Ensemble boundary responses for the `+zeta` and `-zeta` loadings.
pub fn ensemble_boundary<T: Real>(
    cell: &UnitCell<T>,
    omega: T,
    zeta: T,
    options: &EimOptions<T>,
    ny: usize,
) -> Result<BoundaryResponseSet<T>> {
    if ny == 0 {
        return Err(Error::InvalidArgument("NY must be at least 1".into()));
    }
    let z = loading_zeta(cell, zeta);
    Ok(BoundaryResponseSet {
        omega,
        zeta,
        plus: one_loading(cell, omega, z, options, ny)?,
        minus: one_loading(cell, omega, -z, options, ny)?,
        realizations: ny,
    })
}

/// Which boundary pair feeds the ratio; both give identical kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundarySide {
    Left,
    Right,
}

/// Kernels from boundary data, with `C` and `xi` from the heat balance.
pub fn retrieve_effective<T: Real>(
    set: &BoundaryResponseSet<T>,
    cell: &UnitCell<T>,
    side: BoundarySide,
) -> Result<EffectiveTensor<T>> {
    let floor = T::lit(1e-12) * cell.period() * cell.period() / cell.phase2.conductivity;
    let pick = |r: &BoundaryResponse<T>| match side {
        BoundarySide::Left => (r.t_left, r.q_left),
        BoundarySide::Right => (r.t_right, r.q_right),
    };
    let (tp, qp) = pick(&set.plus);
    let (tm, qm) = pick(&set.minus);
    for (t, r) in [(tp, &set.plus), (tm, &set.minus)] {
        if !(t.norm() > floor * r.source.norm()) {
            return Err(Error::RetrievalInconsistent(format!(
                "boundary temperature {t} too small for a flux/temperature ratio"
            )));
        }
        if !(r.t_average.norm() > floor * r.source.norm()) {
            return Err(Error::RetrievalInconsistent(format!(
                "ensemble temperature {} too small for the balance correction",
                r.t_average
            )));
        }
    }
    let z = set.plus.zeta;
    let omega = set.omega;
    let i = imag_unit::<T>();
    let two_iz = i * (z + z);
    let half = T::lit(0.5);
    let (m1, m2) = (qp / tp, qm / tm);
    let k = -(m1 - m2) / two_iz;
    let chi = (m1 + m2) * half;
    let (inv_p, inv_m) = (set.plus.source / set.plus.t_average, set.minus.source / set.minus.t_average);
    let c = (k * (z * z) - (inv_p + inv_m) * half) / (i * omega);
    let xi = ((inv_p - inv_m) - two_iz * chi) / (omega * (z + z));
    Ok(EffectiveTensor {
        k,
        chi,
        xi,
        c,
        omega,
        wavenumber: set.zeta,
        weight: WeightKind::Dephased,
        method: Method::Brm,
    })
}

/// Residual of the averaged heat balance at both loadings, relative to `|Q|`.
pub fn balance_residual<T: Real>(tensor: &EffectiveTensor<T>, set: &BoundaryResponseSet<T>) -> T {
    let i = imag_unit::<T>();
    [&set.plus, &set.minus]
        .iter()
        .map(|r| {
            let t = r.t_average;
            let tx = i * r.zeta * t;
            let lhs = i * r.zeta * (tensor.k * tx - tensor.chi * t)
                + i * set.omega * (tensor.c * t + tensor.xi * tx)
                + r.source;
            lhs.norm() / r.source.norm()
        })
        .fold(T::zero(), T::max)
}

/// Ensemble boundary data followed by retrieval.
pub fn brm_effective<T: Real>(
    cell: &UnitCell<T>,
    omega: T,
    zeta: T,
    options: &EimOptions<T>,
    ny: usize,
) -> Result<EffectiveTensor<T>> {
    let set = ensemble_boundary(cell, omega, zeta, options, ny)?;
    retrieve_effective(&set, cell, BoundarySide::Left)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::effective_fourier;
    use num_complex::Complex64 as C64;

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn homogeneous_cell_returns_its_own_properties() {
        let c = UnitCell::homogeneous(1.0, 0.05, 0.5);
        let t = brm_effective(&c, 1.5, 1.0, &EimOptions::default(), 4).unwrap();
        assert!(rel(t.k, C64::new(0.05, 0.0)) < 1e-8, "{}", t.k);
        assert!(rel(t.c, C64::new(0.5, 0.0)) < 1e-8, "{}", t.c);
        assert!(t.chi.norm() < 1e-8 && t.xi.norm() < 1e-8);
    }

    #[test]
    fn homogeneous_boundary_ratio_does_not_depend_on_ensemble_size() {
        let c = UnitCell::homogeneous(1.0, 0.3, 0.9);
        let o = EimOptions::default();
        let a = ensemble_boundary(&c, 2.0, 1.0, &o, 1).unwrap();
        let b = ensemble_boundary(&c, 2.0, 1.0, &o, 17).unwrap();
        let ra = a.plus.t_left / a.plus.q_left;
        let rb = b.plus.t_left / b.plus.q_left;
        assert!(rel(ra, rb) < 1e-10);
    }

    #[test]
    fn balance_holds_after_correction() {
        let c = UnitCell::reference();
        let set = ensemble_boundary(&c, 5.0, 1.0, &EimOptions::default(), 20).unwrap();
        let t = retrieve_effective(&set, &c, BoundarySide::Left).unwrap();
        assert!(balance_residual(&t, &set) < 1e-8);
        assert!(set.plus.bloch_residual(&c) < 1e-8 && set.minus.bloch_residual(&c) < 1e-8);
    }

    #[test]
    fn left_and_right_pairs_agree() {
        let c = UnitCell::reference();
        let set = ensemble_boundary(&c, 2.0, 0.7, &EimOptions::default(), 10).unwrap();
        let l = retrieve_effective(&set, &c, BoundarySide::Left).unwrap();
        let r = retrieve_effective(&set, &c, BoundarySide::Right).unwrap();
        for (a, b) in l.kernels().into_iter().zip(r.kernels()) {
            let (a, b): (C64, C64) = (a, b);
            assert!((a - b).norm() <= 1e-10 * b.norm().max(1e-12));
        }
    }

    #[test]
    fn boundary_averages_converge_in_ensemble_size() {
        let c = UnitCell::reference();
        let o = EimOptions::default();
        let a = ensemble_boundary(&c, 5.0, 1.0, &o, 100).unwrap();
        let b = ensemble_boundary(&c, 5.0, 1.0, &o, 200).unwrap();
        for (x, y) in [
            (a.plus.t_left, b.plus.t_left),
            (a.plus.q_left, b.plus.q_left),
            (a.minus.t_left, b.minus.t_left),
            (a.minus.q_left, b.minus.q_left),
        ] {
            assert!(rel(x, y) < 5e-3, "{x} vs {y}");
        }
    }

    #[test]
    fn tracks_exact_kernels() {
        let c = UnitCell::reference();
        for (omega, zeta) in [(0.8, 0.0), (5.0, 1.0)] {
            let b = brm_effective(&c, omega, zeta, &EimOptions::default(), 100).unwrap();
            let x = effective_fourier(&c, omega, zeta, &WeightSpec::Dephased, 100).unwrap();
            for d in b.relative_deviation(&x) {
                assert!(d < 1e-2, "omega {omega} zeta {zeta}: {d}");
            }
        }
    }

    #[test]
    fn empty_ensemble_is_rejected() {
        let c = UnitCell::reference();
        assert!(ensemble_boundary(&c, 1.0, 1.0, &EimOptions::default(), 0).is_err());
    }
}
