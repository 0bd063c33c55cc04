//! Subcommands that compute and persist results.

use crate::config::{MethodChoice, RunConfig};
use crate::records::{self, num, ResultRecord};
use anyhow::Context;
use rayon::prelude::*;
use std::path::Path;
use willis_laminate::eim::{ensemble_effective, extract_effective_pm_zeta};
use willis_laminate::exact::{effective_fourier, ExactHomogenization, FloquetBasis};
use willis_laminate::validation::{self, STATIC_OMEGA_BAR};
use willis_laminate::{
    brm, impedance, unwrap_phase, EffectiveTensorF64, Method, Realization, UnitCellF64, WeightSpecF64,
};

fn methods(choice: MethodChoice) -> Vec<Method> {
    match choice {
        MethodChoice::Eim => vec![Method::Eim],
        MethodChoice::Exact => vec![Method::Exact],
        MethodChoice::Brm => vec![Method::Brm],
        MethodChoice::All => vec![Method::Eim, Method::Exact, Method::Brm],
    }
}

/// `omega_bar = 0` is evaluated at a tiny positive frequency: the kernels
/// divide by `omega` and the Floquet basis degenerates at rest.
fn omega_for(cfg: &RunConfig, cell: &UnitCellF64, omega_bar: f64) -> f64 {
    let wb = if omega_bar == 0.0 { STATIC_OMEGA_BAR } else { omega_bar };
    cfg.numerics.scaling.scaling().omega(cell, wb)
}

fn evaluate(
    cfg: &RunConfig,
    cell: &UnitCellF64,
    method: Method,
    weight: &WeightSpecF64,
    omega_bar: f64,
    zeta: f64,
) -> Result<EffectiveTensorF64, String> {
    let omega = omega_for(cfg, cell, omega_bar);
    let eim = cfg.eim_options();
    let ny = cfg.numerics.realizations;
    let out = match method {
        Method::Exact => effective_fourier(cell, omega, zeta, weight, cfg.numerics.modes),
        // De-phased weights give the same kernels for every realization.
        Method::Eim if weight.is_dephased() => {
            extract_effective_pm_zeta(cell, &Realization::reference(), omega, zeta, &eim, weight)
        }
        Method::Eim => ensemble_effective(cell, omega, zeta, &eim, weight, ny),
        Method::Brm => match weight {
            WeightSpecF64::Dephased | WeightSpecF64::Uniform => brm::brm_effective(cell, omega, zeta, &eim, ny),
            _ => return Err("unsupported_weight".into()),
        },
    };
    out.map_err(|e| e.to_string())
}

struct Job {
    alpha: f64,
    omega_bar: f64,
    zeta: f64,
    method: Method,
}

fn kernel_records(cfg: &RunConfig, alphas: &[f64], methods: &[Method]) -> Vec<ResultRecord> {
    let weight = cfg.weight.spec();
    let wname = cfg.weight.as_str();
    let mut jobs = Vec::new();
    for &alpha in alphas {
        for omega_bar in cfg.sweep.omega_bars() {
            for &zeta in &cfg.sweep.zeta {
                for &method in methods {
                    jobs.push(Job {
                        alpha,
                        omega_bar,
                        zeta,
                        method,
                    });
                }
            }
        }
    }
    jobs.par_iter()
        .map(|j| {
            let cell = cfg.cell.to_cell().with_alpha(j.alpha);
            let rec = ResultRecord::new(j.method.as_str(), wname, j.omega_bar, j.zeta, j.alpha);
            match evaluate(cfg, &cell, j.method, &weight, j.omega_bar, j.zeta) {
                Ok(t) => rec.with_tensor(&t),
                Err(e) if e == "unsupported_weight" => {
                    let mut r = rec;
                    r.flag = e;
                    r
                }
                Err(e) => rec.failed(e),
            }
        })
        .collect()
}

fn warn_ensemble(cfg: &RunConfig) {
    for w in validation::ensemble_warnings(cfg.weight.spec().kind(), cfg.numerics.realizations) {
        log::warn!("{w}");
    }
}

fn finish(dir: &Path, command: &str, cfg: &RunConfig, outputs: &[&str], recs: &[ResultRecord]) -> anyhow::Result<i32> {
    let failed = recs.iter().filter(|r| !r.ok()).count();
    records::write_sidecar(dir, command, cfg, outputs, recs.len(), failed)?;
    for r in recs.iter().filter(|r| !r.ok()) {
        log::warn!("{} omega_bar {} zeta {}: {}", r.method, r.omega_bar, r.zeta, r.flag);
    }
    Ok(if !recs.is_empty() && failed == recs.len() { 1 } else { 0 })
}

pub fn effective(cfg: &RunConfig, dir: &Path) -> anyhow::Result<i32> {
    warn_ensemble(cfg);
    let recs = kernel_records(cfg, &[cfg.cell.alpha], &methods(cfg.method));
    records::write_kernels(&dir.join("effective.csv"), &recs)?;
    records::write_json(&dir.join("effective.json"), &recs)?;
    finish(dir, "effective", cfg, &["effective.csv", "effective.json"], &recs)
}

pub fn sweep_alpha(cfg: &RunConfig, dir: &Path) -> anyhow::Result<i32> {
    warn_ensemble(cfg);
    let recs = kernel_records(cfg, &cfg.sweep.alpha, &methods(cfg.method));
    records::write_kernels(&dir.join("alpha_sweep.csv"), &recs)?;
    records::write_json(&dir.join("alpha_sweep.json"), &recs)?;
    finish(dir, "sweep-alpha", cfg, &["alpha_sweep.csv", "alpha_sweep.json"], &recs)
}

pub fn impedance_cmd(cfg: &RunConfig, dir: &Path) -> anyhow::Result<i32> {
    warn_ensemble(cfg);
    let ms = methods(cfg.method);
    let mut recs = kernel_records(cfg, &cfg.sweep.alpha, &ms);
    for r in recs.iter_mut().filter(|r| r.ok()) {
        let [k, chi, xi, c] = r.kernels.expect("ok rows carry kernels").map(|p| willis_laminate::C64::new(p[0], p[1]));
        let t = EffectiveTensorF64 {
            k,
            chi,
            xi,
            c,
            omega: 0.0,
            wavenumber: r.zeta,
            weight: cfg.weight.spec().kind(),
            method: Method::Exact,
        };
        match impedance(&t, r.zeta) {
            Ok(z) => {
                r.z_plus = Some([z.z_plus.re, z.z_plus.im]);
                r.z_minus = Some([z.z_minus.re, z.z_minus.im]);
                r.delta_beta = Some(z.delta_beta);
            }
            Err(e) => r.flag = format!("failed: {e}"),
        }
    }
    // Unwrap along omega_bar for each (alpha, zeta, method) series.
    for &alpha in &cfg.sweep.alpha {
        for &zeta in &cfg.sweep.zeta {
            for m in &ms {
                let idx: Vec<usize> = (0..recs.len())
                    .filter(|&i| {
                        let r = &recs[i];
                        r.alpha == alpha && r.zeta == zeta && r.method == m.as_str() && r.delta_beta.is_some()
                    })
                    .collect();
                let mut ph: Vec<f64> = idx.iter().map(|&i| recs[i].delta_beta.unwrap_or(f64::NAN)).collect();
                unwrap_phase(&mut ph);
                for (&i, p) in idx.iter().zip(ph) {
                    recs[i].delta_beta = Some(p);
                }
            }
        }
    }
    records::write_impedance(&dir.join("impedance.csv"), &recs)?;
    records::write_json(&dir.join("impedance.json"), &recs)?;
    finish(dir, "impedance", cfg, &["impedance.csv", "impedance.json"], &recs)
}

pub fn floquet(cfg: &RunConfig, dir: &Path) -> anyhow::Result<i32> {
    let cell = cfg.cell.to_cell();
    let scaling = cfg.numerics.floquet_scaling.scaling();
    let grid = cfg.sweep.omega_bars();
    let results: Vec<Result<(FloquetBasis<f64>, Vec<Vec<String>>), String>> = grid
        .par_iter()
        .map(|&wb| {
            let omega = scaling.omega(&cell, if wb == 0.0 { STATIC_OMEGA_BAR } else { wb });
            let ex = ExactHomogenization::new(&cell, omega, &WeightSpecF64::Dephased, cfg.numerics.modes)
                .map_err(|e| e.to_string())?;
            let n = 200;
            let trace = (0..=n)
                .map(|i| {
                    let r = 4.0 * cell.half_length * i as f64 / n as f64;
                    let g = ex.ensemble_green(r);
                    vec![num(wb), num(r), num(g.re), num(g.im), num(g.norm())]
                })
                .collect();
            Ok((ex.basis, trace))
        })
        .collect();
    let mut rows = Vec::new();
    let mut green = Vec::new();
    let mut failures = 0;
    for (wb, r) in grid.iter().zip(results) {
        match r {
            Ok((b, trace)) => {
                let mu = b.mu();
                rows.push(vec![
                    num(*wb),
                    num(b.omega),
                    num(mu.re),
                    num(mu.im),
                    num(b.d.re),
                    num(b.d.im),
                    num(b.floquet.dispersion_residual),
                    "ok".into(),
                ]);
                green.extend(trace);
            }
            Err(e) => {
                failures += 1;
                log::error!("omega_bar {wb}: {e}");
                let nan = || "NaN".to_string();
                rows.push(vec![num(*wb), nan(), nan(), nan(), nan(), nan(), nan(), format!("failed: {e}")]);
            }
        }
    }
    for row in &rows {
        println!("omega_bar {} mu {} {} D {} {}", row[0], row[2], row[3], row[4], row[5]);
    }
    records::write_plain(
        &dir.join("floquet.csv"),
        &["omega_bar", "omega", "ReMu", "ImMu", "ReD", "ImD", "dispersion_residual", "flag"],
        rows,
    )?;
    records::write_plain(&dir.join("green.csv"), &["omega_bar", "r", "ReG", "ImG", "AbsG"], green)?;
    let n = grid.len();
    records::write_sidecar(dir, "floquet", cfg, &["floquet.csv", "green.csv"], n, failures)?;
    Ok(if failures > 0 { 1 } else { 0 })
}

pub fn validate(cfg: &RunConfig, dir: &Path) -> anyhow::Result<i32> {
    let warnings = validation::ensemble_warnings(cfg.weight.spec().kind(), cfg.numerics.realizations);
    for w in &warnings {
        log::warn!("{w}");
    }
    let reports = validation::run_all(&cfg.validation());
    for r in &reports {
        println!("{r}");
        for n in &r.notes {
            println!("    {n}");
        }
    }
    let failed: Vec<String> = reports.iter().filter(|r| !r.passed()).map(|r| r.name.to_string()).collect();
    #[derive(serde::Serialize)]
    struct Check<'a> {
        label: &'a str,
        value: f64,
        limit: f64,
        passed: bool,
        detail: &'a str,
    }
    #[derive(serde::Serialize)]
    struct Criterion<'a> {
        id: u8,
        name: &'a str,
        passed: bool,
        checks: Vec<Check<'a>>,
        notes: &'a [String],
    }
    #[derive(serde::Serialize)]
    struct Report<'a> {
        passed: bool,
        failed: &'a [String],
        warnings: &'a [String],
        criteria: Vec<Criterion<'a>>,
    }
    let criteria = reports
        .iter()
        .map(|r| Criterion {
            id: r.id,
            name: r.name,
            passed: r.passed(),
            checks: r
                .checks
                .iter()
                .map(|c| Check {
                    label: &c.label,
                    value: c.value,
                    limit: c.limit,
                    passed: c.passed,
                    detail: &c.detail,
                })
                .collect(),
            notes: &r.notes,
        })
        .collect();
    records::write_json(
        &dir.join("validate.json"),
        &Report {
            passed: failed.is_empty(),
            failed: &failed,
            warnings: &warnings,
            criteria,
        },
    )
    .context("writing validation report")?;
    records::write_sidecar(dir, "validate", cfg, &["validate.json"], reports.len(), failed.len())?;
    if !failed.is_empty() {
        eprintln!("failed criteria: {}", failed.join(", "));
        return Ok(1);
    }
    Ok(0)
}
