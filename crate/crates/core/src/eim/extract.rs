//! Effective kernels from averaged EIM fields.

use super::source::SourceSpec;
use super::system::{
    cell_averages, solve_problem, AverageProvenance, CellAverages, EimOptions, EimProblem, EimSolution,
};
use crate::analysis::{EffectiveTensor, Method};
use crate::error::{Error, Result};
use crate::laminate::{Realization, UnitCell, WeightSpec};
use crate::scalar::{imag_unit, re, Cx, Real};
use rayon::prelude::*;

/// `zeta = 0` is replaced by `±ZETA_EPS pi / L` (central difference in zeta).
pub const ZETA_EPS: f64 = 1e-4;

/// Below this `|det A| / (|a1| |a2|)` the two loadings are treated as dependent.
pub const RANK_TOLERANCE: f64 = 1e-8;

/// Loading wavenumber actually used for a requested `zeta`.
pub fn loading_zeta<T: Real>(cell: &UnitCell<T>, zeta: T) -> T {
    if zeta == T::zero() {
        T::lit(ZETA_EPS) * T::PI() / cell.half_length
    } else {
        zeta
    }
}

/// Default source for a weight: the masked source for phase masks, a unit
/// plane wave otherwise.
pub fn default_source<T: Real>(
    cell: &UnitCell<T>,
    real: &Realization<T>,
    zeta: T,
    weight: &WeightSpec<T>,
) -> SourceSpec<T> {
    match weight {
        WeightSpec::PhaseMasked(id) => SourceSpec::masked(cell, real, zeta, *id),
        _ => SourceSpec::plane(cell, re(T::one()), zeta),
    }
}

/// Solves one loading and averages it.
pub fn solve_loading<T: Real>(
    cell: &UnitCell<T>,
    real: &Realization<T>,
    omega: T,
    zeta: T,
    options: &EimOptions<T>,
    weight: &WeightSpec<T>,
    source: SourceSpec<T>,
) -> Result<(EimSolution<T>, CellAverages<T>)> {
    let sol = solve_problem(EimProblem::new(cell, real, omega, zeta, options, source)?)?;
    let avg = cell_averages(&sol, weight)?;
    Ok((sol, avg))
}

fn check_temperature<T: Real>(cell: &UnitCell<T>, avg: &CellAverages<T>, source_scale: T) -> Result<()> {
    let floor = T::lit(1e-12) * source_scale * cell.period() * cell.period() / cell.phase2.conductivity;
    if !(avg.t.norm() > floor) {
        return Err(Error::IllConditioned(format!(
            "averaged temperature {} is too small to form flux/temperature ratios",
            avg.t
        )));
    }
    Ok(())
}

/// Kernels from the `±zeta` ratios `m = <q>/<T>`, `n = <F>/<T>`.
fn ratio_kernels<T: Real>(plus: &CellAverages<T>, minus: &CellAverages<T>, zeta: T) -> [Cx<T>; 4] {
    let two_iz = imag_unit::<T>() * (zeta + zeta);
    let (m1, m2) = (plus.q / plus.t, minus.q / minus.t);
    let (n1, n2) = (plus.f / plus.t, minus.f / minus.t);
    let half = T::lit(0.5);
    [-(m1 - m2) / two_iz, (m1 + m2) * half, (n1 - n2) / two_iz, (n1 + n2) * half]
}

/// Kernels from `B A^{-1}` with `A = [<T,x>; <T>]`, `B = [<q>; <F>]` built
/// from two loadings.
fn general_kernels<T: Real>(first: &CellAverages<T>, second: &CellAverages<T>) -> Result<[Cx<T>; 4]> {
    let det = first.tx * second.t - second.tx * first.t;
    let scale = (first.tx.norm_sqr() + first.t.norm_sqr()).sqrt() * (second.tx.norm_sqr() + second.t.norm_sqr()).sqrt();
    let rel_det = if scale > T::zero() { det.norm() / scale } else { T::zero() };
    if !(rel_det > T::lit(RANK_TOLERANCE)) {
        return Err(Error::RankDeficient {
            rel_det: rel_det.to_f64_lossy(),
        });
    }
    // inverse of [[tx1, tx2], [t1, t2]]
    let inv = [[second.t / det, -second.tx / det], [-first.t / det, first.tx / det]];
    let b = [[first.q, second.q], [first.f, second.f]];
    let m = |i: usize, j: usize| b[i][0] * inv[0][j] + b[i][1] * inv[1][j];
    Ok([-m(0, 0), m(0, 1), m(1, 0), m(1, 1)])
}

fn tensor<T: Real>(k: [Cx<T>; 4], omega: T, zeta: T, weight: &WeightSpec<T>) -> EffectiveTensor<T> {
    EffectiveTensor {
        k: k[0],
        chi: k[1],
        xi: k[2],
        c: k[3],
        omega,
        wavenumber: zeta,
        weight: weight.kind(),
        method: Method::Eim,
    }
}

/// Kernels from a pair of `±zeta` loadings. De-phased weights use the ratio
/// form; the uniform weight, where `<T,x>` and `<T>` are independent, uses
/// the general `B A^{-1}` form.
pub fn kernels_from_pm_zeta<T: Real>(
    cell: &UnitCell<T>,
    plus: &CellAverages<T>,
    minus: &CellAverages<T>,
    omega: T,
    zeta: T,
    weight: &WeightSpec<T>,
) -> Result<EffectiveTensor<T>> {
    check_temperature(cell, plus, T::one())?;
    check_temperature(cell, minus, T::one())?;
    let z = loading_zeta(cell, zeta);
    let k = if weight.is_dephased() {
        ratio_kernels(plus, minus, z)
    } else {
        general_kernels(plus, minus)?
    };
    Ok(tensor(k, omega, zeta, weight))
}

/// Single-realization extraction from loadings at `+zeta` and `-zeta`.
pub fn extract_effective_pm_zeta<T: Real>(
    cell: &UnitCell<T>,
    real: &Realization<T>,
    omega: T,
    zeta: T,
    options: &EimOptions<T>,
    weight: &WeightSpec<T>,
) -> Result<EffectiveTensor<T>> {
    let z = loading_zeta(cell, zeta);
    let (_, plus) = solve_loading(cell, real, omega, z, options, weight, default_source(cell, real, z, weight))?;
    let (_, minus) = solve_loading(cell, real, omega, -z, options, weight, default_source(cell, real, -z, weight))?;
    kernels_from_pm_zeta(cell, &plus, &minus, omega, zeta, weight)
}

/// Extraction from two independent sources at the same `zeta`. Fails with
/// [`Error::RankDeficient`] for de-phased weights, where `<T,x> = i zeta <T>`
/// for every Bloch solution; use [`extract_effective_pm_zeta`] there.
pub fn extract_effective_two_sources<T: Real>(
    cell: &UnitCell<T>,
    real: &Realization<T>,
    omega: T,
    zeta: T,
    options: &EimOptions<T>,
    weight: &WeightSpec<T>,
    sources: [SourceSpec<T>; 2],
) -> Result<EffectiveTensor<T>> {
    let [s1, s2] = sources;
    let (_, a1) = solve_loading(cell, real, omega, zeta, options, weight, s1)?;
    let (_, a2) = solve_loading(cell, real, omega, zeta, options, weight, s2)?;
    if weight.is_dephased() {
        let det = a1.tx * a2.t - a2.tx * a1.t;
        let scale = (a1.tx.norm_sqr() + a1.t.norm_sqr()).sqrt() * (a2.tx.norm_sqr() + a2.t.norm_sqr()).sqrt();
        return Err(Error::RankDeficient {
            rel_det: (det.norm() / scale).to_f64_lossy(),
        });
    }
    Ok(tensor(general_kernels(&a1, &a2)?, omega, zeta, weight))
}

/// Ensemble averages of one loading over `ny` uniformly spaced realizations.
/// Realizations run in parallel; the reduction order is fixed.
pub fn ensemble_averages<T, S>(
    cell: &UnitCell<T>,
    omega: T,
    zeta: T,
    options: &EimOptions<T>,
    weight: &WeightSpec<T>,
    ny: usize,
    source: S,
) -> Result<CellAverages<T>>
where
    T: Real,
    S: Fn(&Realization<T>) -> SourceSpec<T> + Sync,
{
    if ny == 0 {
        return Err(Error::InvalidArgument("NY must be at least 1".into()));
    }
    let reals = Realization::uniform_ensemble(cell, ny);
    let parts: Result<Vec<CellAverages<T>>> = reals
        .par_iter()
        .map(|r| solve_loading(cell, r, omega, zeta, options, weight, source(r)).map(|(_, a)| a))
        .collect();
    let parts = parts?;
    let inv = T::one() / T::lit(ny as f64);
    let mut acc = CellAverages {
        t: re(T::zero()),
        tx: re(T::zero()),
        q: re(T::zero()),
        f: re(T::zero()),
        provenance: AverageProvenance::Ensemble { realizations: ny },
    };
    for p in &parts {
        acc.t += p.t * inv;
        acc.tx += p.tx * inv;
        acc.q += p.q * inv;
        acc.f += p.f * inv;
    }
    Ok(acc)
}

/// Ensemble extraction with the default source for `weight`.
pub fn ensemble_effective<T: Real>(
    cell: &UnitCell<T>,
    omega: T,
    zeta: T,
    options: &EimOptions<T>,
    weight: &WeightSpec<T>,
    ny: usize,
) -> Result<EffectiveTensor<T>> {
    ensemble_effective_with_sources(cell, omega, zeta, options, weight, ny, |r, z| {
        default_source(cell, r, z, weight)
    })
}

/// Ensemble extraction with a caller-supplied source at loading wavenumber `z`.
pub fn ensemble_effective_with_sources<T, S>(
    cell: &UnitCell<T>,
    omega: T,
    zeta: T,
    options: &EimOptions<T>,
    weight: &WeightSpec<T>,
    ny: usize,
    source: S,
) -> Result<EffectiveTensor<T>>
where
    T: Real,
    S: Fn(&Realization<T>, T) -> SourceSpec<T> + Sync,
{
    let z = loading_zeta(cell, zeta);
    let plus = ensemble_averages(cell, omega, z, options, weight, ny, |r| source(r, z))?;
    let minus = ensemble_averages(cell, omega, -z, options, weight, ny, |r| source(r, -z))?;
    kernels_from_pm_zeta(cell, &plus, &minus, omega, zeta, weight)
}
