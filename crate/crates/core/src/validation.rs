//! Acceptance suite shared by the `acceptance` test target and
//! `willis validate`. Each criterion returns a report of individual checks;
//! a computation error turns into a failed check instead of aborting.
//!
//! The suite runs in `f64`: it compares against fixed published digits and
//! the `f64`-only reference numerics in [`crate::oracle`].

use crate::analysis::{asymmetry_sweep, compare_methods, ComparisonSettings, EffectiveTensor};
use crate::brm::{balance_residual, ensemble_boundary, retrieve_effective, BoundarySide};
use crate::eim::{ensemble_effective, extract_effective_pm_zeta, EimOptions};
use crate::error::Result;
use crate::exact::{
    effective_fourier, fourier_coefficients, unit_cell_transfer_matrix, ExactHomogenization, FloquetBasis,
    FloquetSign,
};
use crate::greens::{eshelby_l, ComparisonMedium};
use crate::laminate::{FrequencyScaling, PhaseId, Realization, UnitCell, WeightKind, WeightSpec};
use crate::oracle::{
    dense_fourier_transform, ensemble_green_ode, integrate_complex, quadrature_coefficients, transfer_matrix_ode,
};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::fmt;

pub const STATIC_TOL: f64 = 5e-3;
pub const STATIC_NULL: f64 = 1e-6;
/// Dimensionless frequency standing in for the static limit.
pub const STATIC_OMEGA_BAR: f64 = 1e-9;
pub const FLOQUET_TOL: f64 = 1e-2;
pub const AGREEMENT_TOL: f64 = 2e-2;
pub const TEXT_TOL: f64 = 3e-2;
pub const EXTREMUM_TOL: f64 = 5e-2;
pub const WILLIS_TOL: f64 = 1e-4;
pub const CON_VIOLATION: f64 = 5e-2;
pub const NULL_TOL: f64 = 1e-6;
pub const ASYMMETRY_TOL: f64 = 3e-2;
pub const DELTA_BETA_TOL: f64 = 1e-6;
pub const COEFFICIENT_TOL: f64 = 1e-8;
pub const TRANSFER_TOL: f64 = 1e-7;
pub const MONTE_CARLO_TOL: f64 = 5e-3;
pub const TRANSFORM_TOL: f64 = 5e-3;
pub const BALANCE_TOL: f64 = 1e-8;
pub const INVARIANCE_TOL: f64 = 1e-6;
pub const MESH_CONVERGENCE_TOL: f64 = 1e-3;
pub const SERIES_CONVERGENCE_TOL: f64 = 1e-6;

/// Frequency grid `omega_bar = 0.025 k`, `k = 1..=25`.
pub fn omega_bar_grid() -> Vec<f64> {
    (1..=25).map(|k| 0.025 * k as f64).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationConfig {
    pub cell: UnitCell<f64>,
    pub eim: EimOptions<f64>,
    /// `NY` for boundary retrieval and ensemble checks.
    pub realizations: usize,
    /// Series truncation `M`.
    pub modes: usize,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            cell: UnitCell::reference(),
            eim: EimOptions::default(),
            realizations: 100,
            modes: crate::exact::DEFAULT_MODES,
        }
    }
}

impl ValidationConfig {
    fn omega(&self, omega_bar: f64) -> f64 {
        FrequencyScaling::InverseLengthSquared.omega(&self.cell, omega_bar)
    }
}

/// Warnings about settings that make ensemble averages unreliable.
pub fn ensemble_warnings(weight: WeightKind, realizations: usize) -> Vec<String> {
    let mut out = Vec::new();
    if realizations == 1 && weight == WeightKind::Uniform {
        out.push(
            "NY = 1 with the uniform weight: a single realization is not an ensemble average, \
             uniform-weight kernels depend on the cell offset"
                .to_string(),
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    /// Quantity compared against `limit` (a relative error, a residual, ...).
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    /// Passes when `value <= limit`.
    pub fn at_most(label: impl Into<String>, value: f64, limit: f64, detail: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            value,
            limit,
            passed: value <= limit,
            detail: detail.into(),
        }
    }

    /// Passes when `value > limit`.
    pub fn above(label: impl Into<String>, value: f64, limit: f64, detail: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            value,
            limit,
            passed: value > limit,
            detail: detail.into(),
        }
    }

    pub fn flag(label: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            value: if passed { 1.0 } else { 0.0 },
            limit: 1.0,
            passed,
            detail: detail.into(),
        }
    }

    fn relative(label: impl Into<String>, got: C64, want: C64, tol: f64) -> Self {
        let e = (got - want).norm() / want.norm();
        Self::at_most(label, e, tol, format!("{} vs {}", fmt_c(got), fmt_c(want)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub checks: Vec<Check>,
    /// Measured values that are reported but not asserted.
    pub notes: Vec<String>,
}

impl CriterionReport {
    fn new(id: u8, name: &'static str) -> Self {
        Self {
            id,
            name,
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} [{}] {} ({} checks", self.id, self.name, self.checks.len())?;
        let failed: Vec<String> = self
            .failures()
            .map(|c| format!("{}: {:.3e} > {:.1e} ({})", c.label, c.value, c.limit, c.detail))
            .collect();
        if failed.is_empty() {
            write!(f, ")")
        } else {
            write!(f, "; failed: {})", failed.join("; "))
        }
    }
}

fn fmt_c(z: C64) -> String {
    format!("{:.4}{:+.4}i", z.re, z.im)
}

fn guarded(id: u8, name: &'static str, body: impl FnOnce(&mut CriterionReport) -> Result<()>) -> CriterionReport {
    let mut r = CriterionReport::new(id, name);
    if let Err(e) = body(&mut r) {
        r.checks.push(Check::flag("computation", false, e.to_string()));
    }
    r
}

/// Static limit: `K = 0.116`, `C = 1`, no coupling, for all three methods.
pub fn static_limit(cfg: &ValidationConfig) -> CriterionReport {
    guarded(1, "static limit", |r| {
        let omega = cfg.omega(STATIC_OMEGA_BAR);
        let w = WeightSpec::Dephased;
        let tensors = [
            effective_fourier(&cfg.cell, omega, 0.0, &w, cfg.modes)?,
            extract_effective_pm_zeta(&cfg.cell, &Realization::reference(), omega, 0.0, &cfg.eim, &w)?,
            crate::brm::brm_effective(&cfg.cell, omega, 0.0, &cfg.eim, cfg.realizations)?,
        ];
        for t in tensors {
            let m = t.method.as_str();
            r.checks.push(Check::relative(format!("{m} Re K"), C64::new(t.k.re, 0.0), C64::new(0.116, 0.0), STATIC_TOL));
            r.checks.push(Check::relative(format!("{m} Re C"), C64::new(t.c.re, 0.0), C64::new(1.0, 0.0), STATIC_TOL));
            r.checks.push(Check::at_most(format!("{m} |chi|"), t.chi.norm(), STATIC_NULL, fmt_c(t.chi)));
            let im = t.k.im.abs().max(t.c.im.abs());
            r.checks.push(Check::at_most(format!("{m} max(|Im K|, |Im C|)"), im, STATIC_NULL, ""));
            r.notes.push(format!("{m}: K = {}, C = {}, xi = {}", fmt_c(t.k), fmt_c(t.c), fmt_c(t.xi)));
        }
        Ok(())
    })
}

/// Floquet normalization `D` and `|Re mu|`, `|Im mu|` at two frequencies.
pub fn floquet_diagnostics(cfg: &ValidationConfig) -> CriterionReport {
    guarded(2, "Floquet diagnostics", |r| {
        let targets = [
            (0.01, C64::new(14.841, 14.488), (0.147, 0.146)),
            (0.05, C64::new(6.973, 6.186), (0.332, 0.323)),
        ];
        for (wb, d, (mre, mim)) in targets {
            let omega = FrequencyScaling::LengthSquared.omega(&cfg.cell, wb);
            let b = FloquetBasis::new(&cfg.cell, omega)?;
            r.checks.push(Check::relative(format!("D at {wb}"), b.d, d, FLOQUET_TOL));
            let mu = b.mu();
            r.checks.push(Check::at_most(
                format!("|Re mu| at {wb}"),
                (mu.re.abs() - mre).abs() / mre,
                FLOQUET_TOL,
                format!("{:.5}", mu.re.abs()),
            ));
            r.checks.push(Check::at_most(
                format!("|Im mu| at {wb}"),
                (mu.im.abs() - mim).abs() / mim,
                FLOQUET_TOL,
                format!("{:.5}", mu.im.abs()),
            ));
            r.notes.push(format!("omega_bar {wb}: mu = {} (Re mu > 0 by construction)", fmt_c(mu)));
        }
        Ok(())
    })
}

/// Exact, EIM and BRM agree over the grid for `zeta` in `{0, 1}`.
pub fn three_method_agreement(cfg: &ValidationConfig) -> CriterionReport {
    guarded(3, "three-method agreement", |r| {
        let settings = ComparisonSettings {
            eim: cfg.eim.clone(),
            brm_realizations: cfg.realizations,
            modes: cfg.modes,
            tolerance: AGREEMENT_TOL,
            ..ComparisonSettings::default()
        };
        for zeta in [0.0, 1.0] {
            let rep = compare_methods(&cfg.cell, &omega_bar_grid(), zeta, &WeightSpec::Dephased, &settings)?;
            for (k, name) in ["K", "chi", "xi", "C"].iter().enumerate() {
                r.checks.push(Check::at_most(
                    format!("zeta {zeta} max deviation {name}"),
                    rep.max_deviation[k],
                    AGREEMENT_TOL,
                    "",
                ));
            }
        }
        Ok(())
    })
}

fn exact_on_grid(cfg: &ValidationConfig, grid: &[f64], zeta: f64, weight: &WeightSpec<f64>) -> Result<Vec<EffectiveTensor<f64>>> {
    grid.par_iter()
        .map(|&wb| effective_fourier(&cfg.cell, cfg.omega(wb), zeta, weight, cfg.modes))
        .collect()
}

/// Extremum of `f` over the grid, refined on a fine grid around the coarse
/// optimum. Returns `(coarse index, refined location, refined value)`.
fn extremum(
    cfg: &ValidationConfig,
    zeta: f64,
    weight: &WeightSpec<f64>,
    f: impl Fn(&EffectiveTensor<f64>) -> f64 + Sync,
) -> Result<(usize, f64, f64)> {
    let grid = omega_bar_grid();
    let coarse: Vec<f64> = exact_on_grid(cfg, &grid, zeta, weight)?.iter().map(&f).collect();
    let k = (0..coarse.len()).max_by(|&a, &b| coarse[a].total_cmp(&coarse[b])).unwrap_or(0);
    let step = grid[1] - grid[0];
    let lo = (grid[k] - step).max(step * 0.02);
    let fine: Vec<f64> = (0..=200).map(|i| lo + 2.0 * step * i as f64 / 200.0).collect();
    let vals: Vec<f64> = exact_on_grid(cfg, &fine, zeta, weight)?.iter().map(&f).collect();
    let j = (0..vals.len()).max_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
    Ok((k, fine[j], vals[j]))
}

/// Grid index nearest to `omega_bar`.
fn nearest_index(omega_bar: f64) -> usize {
    let g = omega_bar_grid();
    (0..g.len())
        .min_by(|&a, &b| (g[a] - omega_bar).abs().total_cmp(&(g[b] - omega_bar).abs()))
        .unwrap_or(0)
}

/// Kernel values and extrema quoted for the reference cell.
pub fn text_anchored_values(cfg: &ValidationConfig) -> CriterionReport {
    guarded(4, "text-anchored kernel values", |r| {
        let omega = cfg.omega(0.625);
        let masked = WeightSpec::PhaseMasked(PhaseId::Two);
        let cases = [
            (
                "dephased",
                WeightSpec::Dephased,
                [C64::new(0.547, 0.065), C64::new(0.225, -0.139), C64::new(-0.096, -0.029)],
            ),
            (
                "masked",
                masked.clone(),
                [C64::new(0.334, 0.071), C64::new(0.157, -0.138), C64::new(-0.039, -0.041)],
            ),
        ];
        for (name, w, [c, k, chi]) in cases {
            let t = effective_fourier(&cfg.cell, omega, 1.0, &w, cfg.modes)?;
            r.checks.push(Check::relative(format!("{name} C at 0.625"), t.c, c, TEXT_TOL));
            r.checks.push(Check::relative(format!("{name} K at 0.625"), t.k, k, TEXT_TOL));
            r.checks.push(Check::relative(format!("{name} chi at 0.625"), t.chi, chi, TEXT_TOL));
        }
        let peaks: [(&str, f64, WeightSpec<f64>, bool, f64, f64, f64); 4] = [
            ("Im C peak zeta 0", 0.0, WeightSpec::Dephased, false, 0.231, 0.082, TEXT_TOL),
            ("Im C peak zeta 1", 1.0, WeightSpec::Dephased, false, 0.194, 0.062, TEXT_TOL),
            ("Re chi minimum zeta 1", 1.0, WeightSpec::Dephased, true, -0.105, 0.27, EXTREMUM_TOL),
            ("masked Im C peak zeta 0", 0.0, masked, false, 0.328, 0.052, EXTREMUM_TOL),
        ];
        for (label, zeta, w, chi_min, value, at, tol) in peaks {
            let (k, loc, v) = if chi_min {
                let (k, loc, v) = extremum(cfg, zeta, &w, |t| -t.chi.re)?;
                (k, loc, -v)
            } else {
                extremum(cfg, zeta, &w, |t| t.c.im)?
            };
            r.checks.push(Check::at_most(
                format!("{label} value"),
                (v - value).abs() / value.abs(),
                tol,
                format!("{v:.4} vs {value}"),
            ));
            let target = nearest_index(at);
            r.checks.push(Check::flag(
                format!("{label} location"),
                k.abs_diff(target) <= 1,
                format!("grid optimum {:.3}, refined {loc:.4}, quoted {at}", omega_bar_grid()[k]),
            ));
        }
        Ok(())
    })
}

/// `i omega xi = chi` for de-phased extractions; violated by a
/// single-realization uniform-weight extraction.
pub fn willis_correlation(cfg: &ValidationConfig) -> CriterionReport {
    guarded(5, "Willis correlation", |r| {
        let grid = omega_bar_grid();
        let real = Realization::reference();
        for zeta in [0.0, 1.0] {
            let rows: Result<Vec<(f64, f64)>> = grid
                .par_iter()
                .map(|&wb| {
                    let omega = cfg.omega(wb);
                    let x = effective_fourier(&cfg.cell, omega, zeta, &WeightSpec::Dephased, cfg.modes)?;
                    let e = extract_effective_pm_zeta(&cfg.cell, &real, omega, zeta, &cfg.eim, &WeightSpec::Dephased)?;
                    Ok((x.willis_defect(), e.willis_defect()))
                })
                .collect();
            let rows = rows?;
            let ex = rows.iter().map(|p| p.0).fold(0.0, f64::max);
            let ei = rows.iter().map(|p| p.1).fold(0.0, f64::max);
            r.checks.push(Check::at_most(format!("exact zeta {zeta} max defect"), ex, WILLIS_TOL, ""));
            r.checks.push(Check::at_most(format!("eim zeta {zeta} max defect"), ei, WILLIS_TOL, ""));
        }
        let con: Result<Vec<(f64, f64, f64)>> = grid
            .par_iter()
            .filter(|&&wb| wb >= 0.1 - 1e-12)
            .map(|&wb| {
                let omega = cfg.omega(wb);
                let single = extract_effective_pm_zeta(&cfg.cell, &real, omega, 1.0, &cfg.eim, &WeightSpec::Uniform)?;
                let ens = if wb == 0.625 {
                    ensemble_effective(&cfg.cell, omega, 1.0, &cfg.eim, &WeightSpec::Uniform, cfg.realizations)?
                        .willis_defect()
                } else {
                    f64::NAN
                };
                Ok((wb, single.willis_defect(), ens))
            })
            .collect();
        let con = con?;
        let (wb, worst, _) = con.iter().copied().fold((0.0, 0.0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
        r.checks.push(Check::above(
            "uniform single-realization violation",
            worst,
            CON_VIOLATION,
            format!("largest defect at omega_bar {wb}"),
        ));
        if let Some(last) = con.iter().find(|c| !c.2.is_nan()) {
            r.notes.push(format!(
                "uniform weight over {} realizations at omega_bar 0.625: defect {:.2e}",
                cfg.realizations, last.2
            ));
        }
        Ok(())
    })
}

/// No coupling when the capacity sits at the centre or vanishes.
pub fn symmetry_null(cfg: &ValidationConfig) -> CriterionReport {
    guarded(6, "symmetry null", |r| {
        let grid = omega_bar_grid();
        let real = Realization::reference();
        for (label, cell) in [("alpha = 0", cfg.cell.with_alpha(0.0)), ("H = 0", cfg.cell.with_point_capacity(0.0))] {
            let sub = ValidationConfig { cell, ..cfg.clone() };
            let worst: Result<Vec<[f64; 2]>> = grid
                .par_iter()
                .flat_map(|&wb| [(wb, 0.0), (wb, 1.0)])
                .map(|(wb, zeta)| {
                    let omega = sub.omega(wb);
                    let x = effective_fourier(&cell, omega, zeta, &WeightSpec::Dephased, sub.modes)?;
                    let e = extract_effective_pm_zeta(&cell, &real, omega, zeta, &sub.eim, &WeightSpec::Dephased)?;
                    Ok([x.chi.norm().max(x.xi.norm()), e.chi.norm().max(e.xi.norm())])
                })
                .collect();
            let worst = worst?;
            for (m, name) in ["exact", "eim"].iter().enumerate() {
                let v = worst.iter().map(|p| p[m]).fold(0.0, f64::max);
                r.checks.push(Check::at_most(format!("{label} {name} max |chi|, |xi|"), v, NULL_TOL, ""));
            }
        }
        Ok(())
    })
}

/// `Re chi` at `omega_bar = 0.625`, `zeta = 1` for three offsets.
pub fn asymmetry(cfg: &ValidationConfig) -> CriterionReport {
    guarded(7, "asymmetry sweep", |r| {
        let targets = [(0.2, -0.013), (0.6, -0.058), (1.0, -0.378)];
        let alphas: Vec<f64> = targets.iter().map(|t| t.0).collect();
        let rows = asymmetry_sweep(&cfg.cell, &alphas, &[0.625], 1.0, FrequencyScaling::InverseLengthSquared, cfg.modes)?;
        let mut prev = 0.0;
        let mut monotone = true;
        for (row, (alpha, want)) in rows.iter().zip(targets) {
            let got = row.tensor.chi.re;
            r.checks.push(Check::at_most(
                format!("Re chi at alpha {alpha}"),
                (got - want).abs() / want.abs(),
                ASYMMETRY_TOL,
                format!("{got:.4} vs {want}"),
            ));
            monotone &= got.abs() > prev;
            prev = got.abs();
        }
        r.checks.push(Check::flag("|Re chi| increases with alpha", monotone, ""));
        Ok(())
    })
}

/// Phase difference of the two impedances.
pub fn impedance_phase(cfg: &ValidationConfig) -> CriterionReport {
    guarded(8, "impedance phase", |r| {
        let grid = omega_bar_grid();
        let rows = asymmetry_sweep(&cfg.cell, &[0.0], &grid, 1.0, FrequencyScaling::InverseLengthSquared, cfg.modes)?;
        let dev = rows
            .iter()
            .map(|row| (row.impedance.delta_beta + std::f64::consts::PI).abs())
            .fold(0.0, f64::max);
        r.checks.push(Check::at_most("alpha 0: max |delta beta + pi|", dev, DELTA_BETA_TOL, ""));
        let alphas = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];
        let rows = asymmetry_sweep(&cfg.cell, &alphas, &[0.625], 1.0, FrequencyScaling::InverseLengthSquared, cfg.modes)?;
        let offs: Vec<f64> = rows
            .iter()
            .map(|row| (row.impedance.delta_beta + std::f64::consts::PI).abs())
            .collect();
        let monotone = offs.windows(2).all(|w| w[1] > w[0]);
        r.checks.push(Check::flag(
            "|delta beta + pi| increases with alpha at 0.625",
            monotone,
            format!("{offs:.4?}"),
        ));
        Ok(())
    })
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

/// Reference-numerics checks that are not tied to a quoted value.
pub fn oracle_suite(cfg: &ValidationConfig) -> CriterionReport {
    guarded(9, "oracle and property suite", |r| {
        let cell = &cfg.cell;
        let omega = 5.0;

        let med = ComparisonMedium::phase1_of(cell);
        let ker = med.at(omega)?;
        let (a, b) = (-0.31, 0.17);
        let mut worst = 0.0f64;
        for i in 0..20 {
            let x = -cell.half_length + 0.1 * i as f64 + 0.013;
            let quad = if x > a && x < b {
                integrate_complex(|t| ker.g(x, t), a, x, 1e-13) + integrate_complex(|t| ker.g(x, t), x, b, 1e-13)
            } else {
                integrate_complex(|t| ker.g(x, t), a, b, 1e-13)
            };
            worst = worst.max(rel(eshelby_l(&med, omega, a, b, x)?, quad));
        }
        r.checks.push(Check::at_most("Eshelby L vs quadrature", worst, COEFFICIENT_TOL, ""));

        let basis = FloquetBasis::new(cell, omega)?;
        let mut worst = 0.0f64;
        for w in [WeightSpec::Dephased, WeightSpec::PhaseMasked(PhaseId::Two)] {
            let s = fourier_coefficients(&basis, &w, 8)?;
            for m in [-3i64, 0, 5] {
                let i = s.idx(m);
                for (sign, got) in [
                    (FloquetSign::Plus, [s.a_plus[i], s.aw_plus[i], s.b_plus[i], s.c_plus[i]]),
                    (FloquetSign::Minus, [s.a_minus[i], s.aw_minus[i], s.b_minus[i], s.c_minus[i]]),
                ] {
                    let want = quadrature_coefficients(&basis, sign, &w, m);
                    for k in 0..4 {
                        worst = worst.max(rel(got[k], want[k]));
                    }
                }
            }
        }
        r.checks.push(Check::at_most("series coefficients vs quadrature", worst, COEFFICIENT_TOL, ""));

        let mut worst = 0.0f64;
        for w in [0.005, 0.8, 5.0] {
            let m = unit_cell_transfer_matrix(cell, w)?;
            let o = transfer_matrix_ode(cell, w, 4000);
            for i in 0..2 {
                for j in 0..2 {
                    worst = worst.max(rel(m[i][j], o[i][j]));
                }
            }
        }
        r.checks.push(Check::at_most("transfer matrix vs ODE", worst, TRANSFER_TOL, ""));

        let exact = ExactHomogenization::new(cell, 0.8, &WeightSpec::Dephased, cfg.modes)?;
        let pairs = [(0.1, -0.2), (-0.9, 0.6), (0.45, 0.45), (0.9, -0.85), (-0.3, 0.05)];
        let mc = ensemble_green_ode(cell, 0.8, &pairs, 400, 3000);
        let worst = pairs
            .iter()
            .zip(mc)
            .map(|(&(x, xp), g)| rel(exact.ensemble_green(x - xp), g))
            .fold(0.0, f64::max);
        r.checks.push(Check::at_most("ensemble Green's function vs realization average", worst, MONTE_CARLO_TOL, ""));

        let masked = ExactHomogenization::new(cell, omega, &WeightSpec::PhaseMasked(PhaseId::Two), 12)?;
        let r_max = 40.0 * cell.half_length;
        let mut worst = 0.0f64;
        for kappa in [0.0, 1.0, -2.5] {
            let (w, q, f) = masked.transformed_kernels(kappa);
            let n = 40_000;
            worst = worst
                .max(rel(dense_fourier_transform(|s| masked.ensemble_kernels(s).weighted, kappa, r_max, n), w))
                .max(rel(dense_fourier_transform(|s| masked.ensemble_kernels(s).flux, kappa, r_max, n), q))
                .max(rel(dense_fourier_transform(|s| masked.ensemble_kernels(s).heat, kappa, r_max, n), f));
        }
        r.checks.push(Check::at_most("kernel transforms vs dense transform", worst, TRANSFORM_TOL, ""));

        let s = fourier_coefficients(&basis, &WeightSpec::Dephased, 40)?;
        let mu = basis.mu();
        let iw = C64::new(0.0, omega);
        let mut worst = 0.0f64;
        for m in -40i64..=40 {
            let k = C64::new(0.0, m as f64 * std::f64::consts::PI / cell.half_length);
            worst = worst.max(rel(s.c_plus[s.idx(m)] * iw, (mu - k) * s.b_plus[s.idx(m)]));
            worst = worst.max(rel(s.c_minus[s.idx(-m)] * iw, -(mu - k) * s.b_minus[s.idx(-m)]));
        }
        r.checks.push(Check::at_most("heat/flux coefficient relation", worst, COEFFICIENT_TOL, ""));

        let set = ensemble_boundary(cell, omega, 1.0, &cfg.eim, cfg.realizations)?;
        let t = retrieve_effective(&set, cell, BoundarySide::Left)?;
        r.checks.push(Check::at_most("retrieval heat balance", balance_residual(&t, &set), BALANCE_TOL, ""));

        let base = extract_effective_pm_zeta(cell, &Realization::reference(), omega, 1.0, &cfg.eim, &WeightSpec::Dephased)?;
        let mut worst = 0.0f64;
        for y in [0.37, -0.6] {
            let t = extract_effective_pm_zeta(cell, &Realization::new(y), omega, 1.0, &cfg.eim, &WeightSpec::Dephased)?;
            worst = worst.max(t.relative_deviation(&base).into_iter().fold(0.0, f64::max));
        }
        r.checks.push(Check::at_most("de-phased realization invariance", worst, INVARIANCE_TOL, ""));

        let fine = EimOptions {
            elements: 2 * cfg.eim.elements,
            sample_points: 2 * cfg.eim.sample_points,
            ..cfg.eim.clone()
        };
        let hi = extract_effective_pm_zeta(cell, &Realization::reference(), omega, 1.0, &fine, &WeightSpec::Dephased)?;
        let d = hi.relative_deviation(&base).into_iter().fold(0.0, f64::max);
        r.checks.push(Check::at_most("EIM mesh N -> 2N", d, MESH_CONVERGENCE_TOL, ""));

        let lo = effective_fourier(cell, omega, 1.0, &WeightSpec::Dephased, 50)?;
        let hi = effective_fourier(cell, omega, 1.0, &WeightSpec::Dephased, 100)?;
        let d = lo.relative_deviation(&hi).into_iter().fold(0.0, f64::max);
        r.checks.push(Check::at_most("series truncation M 50 -> 100", d, SERIES_CONVERGENCE_TOL, ""));
        Ok(())
    })
}

/// All criteria in order.
pub fn run_all(cfg: &ValidationConfig) -> Vec<CriterionReport> {
    vec![
        static_limit(cfg),
        floquet_diagnostics(cfg),
        three_method_agreement(cfg),
        text_anchored_values(cfg),
        willis_correlation(cfg),
        symmetry_null(cfg),
        asymmetry(cfg),
        impedance_phase(cfg),
        oracle_suite(cfg),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spacing_and_nearest_index() {
        let g = omega_bar_grid();
        assert_eq!(g.len(), 25);
        assert!((g[24] - 0.625).abs() < 1e-12);
        assert_eq!(nearest_index(0.082), 2);
        assert_eq!(nearest_index(0.27), 10);
    }

    #[test]
    fn report_passes_only_when_every_check_does() {
        let mut r = CriterionReport::new(1, "x");
        assert!(!r.passed());
        r.checks.push(Check::at_most("a", 0.1, 0.2, ""));
        assert!(r.passed());
        r.checks.push(Check::above("b", 0.1, 0.2, ""));
        assert!(!r.passed());
        assert!(r.to_string().starts_with("FAIL [1]"));
    }

    #[test]
    fn single_uniform_realization_warns() {
        assert_eq!(ensemble_warnings(WeightKind::Uniform, 1).len(), 1);
        assert!(ensemble_warnings(WeightKind::Uniform, 100).is_empty());
        assert!(ensemble_warnings(WeightKind::Dephased, 1).is_empty());
    }

    #[test]
    fn wrong_volume_fraction_fails_the_static_limit() {
        let cfg = ValidationConfig {
            cell: UnitCell::reference().with_volume_fraction(0.5),
            realizations: 4,
            ..ValidationConfig::default()
        };
        let r = static_limit(&cfg);
        assert!(!r.passed());
        let k = r.notes.iter().find(|n| n.starts_with("exact")).unwrap();
        assert!(k.contains("K = 0.0952"), "{k}");
    }
}
