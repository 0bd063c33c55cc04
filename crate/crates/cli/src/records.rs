//! Result rows, CSV writers and the run sidecar.

use crate::config::RunConfig;
use anyhow::Context;
use serde::Serialize;
use std::path::Path;
use willis_laminate::{EffectiveTensorF64, C64};

pub const KERNEL_COLUMNS: [&str; 14] = [
    "method", "weight", "omega_bar", "zeta", "alpha", "ReK", "ImK", "ReChi", "ImChi", "ReXi", "ImXi", "ReC",
    "ImC", "flag",
];

pub const IMPEDANCE_COLUMNS: [&str; 11] = [
    "method",
    "weight",
    "omega_bar",
    "zeta",
    "alpha",
    "ReZp",
    "ImZp",
    "ReZm",
    "ImZm",
    "delta_beta",
    "flag",
];

/// One kernel evaluation. `flag` is `ok` when every number is valid.
#[derive(Debug, Clone, Serialize)]
pub struct ResultRecord {
    pub method: String,
    pub weight: String,
    pub omega_bar: f64,
    pub zeta: f64,
    pub alpha: f64,
    pub kernels: Option<[[f64; 2]; 4]>,
    pub z_plus: Option<[f64; 2]>,
    pub z_minus: Option<[f64; 2]>,
    pub delta_beta: Option<f64>,
    pub willis_defect: Option<f64>,
    pub flag: String,
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

impl ResultRecord {
    pub fn new(method: &str, weight: &str, omega_bar: f64, zeta: f64, alpha: f64) -> Self {
        Self {
            method: method.to_string(),
            weight: weight.to_string(),
            omega_bar,
            zeta,
            alpha,
            kernels: None,
            z_plus: None,
            z_minus: None,
            delta_beta: None,
            willis_defect: None,
            flag: String::new(),
        }
    }

    pub fn with_tensor(mut self, t: &EffectiveTensorF64) -> Self {
        self.kernels = Some([pair(t.k), pair(t.chi), pair(t.xi), pair(t.c)]);
        self.willis_defect = Some(t.willis_defect());
        self.flag = "ok".into();
        self
    }

    pub fn failed(mut self, why: impl std::fmt::Display) -> Self {
        self.flag = format!("failed: {why}");
        self
    }

    pub fn ok(&self) -> bool {
        self.flag == "ok"
    }

    fn head(&self) -> Vec<String> {
        vec![
            self.method.clone(),
            self.weight.clone(),
            num(self.omega_bar),
            num(self.zeta),
            num(self.alpha),
        ]
    }

    fn kernel_row(&self) -> Vec<String> {
        let mut row = self.head();
        match &self.kernels {
            Some(k) => row.extend(k.iter().flat_map(|p| [num(p[0]), num(p[1])])),
            None => row.extend(std::iter::repeat_n("NaN".to_string(), 8)),
        }
        row.push(self.flag.clone());
        row
    }

    fn impedance_row(&self) -> Vec<String> {
        let mut row = self.head();
        let cell = |v: Option<f64>| v.map(num).unwrap_or_else(|| "NaN".into());
        for z in [self.z_plus, self.z_minus] {
            row.push(cell(z.map(|p| p[0])));
            row.push(cell(z.map(|p| p[1])));
        }
        row.push(cell(self.delta_beta));
        row.push(self.flag.clone());
        row
    }
}

/// Shortest round-trip formatting; stable across runs.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

fn write_table(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_kernels(path: &Path, records: &[ResultRecord]) -> anyhow::Result<()> {
    write_table(path, &KERNEL_COLUMNS, records.iter().map(ResultRecord::kernel_row))
}

pub fn write_impedance(path: &Path, records: &[ResultRecord]) -> anyhow::Result<()> {
    write_table(path, &IMPEDANCE_COLUMNS, records.iter().map(ResultRecord::impedance_row))
}

pub fn write_plain(path: &Path, header: &[&str], rows: Vec<Vec<String>>) -> anyhow::Result<()> {
    write_table(path, header, rows.into_iter())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[derive(Serialize)]
struct Sidecar<'a> {
    command: &'a str,
    tool_version: &'a str,
    outputs: &'a [&'a str],
    rows: usize,
    failed_rows: usize,
    frequency_convention: &'a str,
    config: &'a RunConfig,
}

/// `run.json`: parameters and versions, no timestamps.
pub fn write_sidecar(
    dir: &Path,
    command: &str,
    cfg: &RunConfig,
    outputs: &[&str],
    rows: usize,
    failed_rows: usize,
) -> anyhow::Result<()> {
    let convention = match command {
        "floquet" => cfg.numerics.floquet_scaling.scaling().as_str(),
        _ => cfg.numerics.scaling.scaling().as_str(),
    };
    write_json(
        &dir.join("run.json"),
        &Sidecar {
            command,
            tool_version: env!("CARGO_PKG_VERSION"),
            outputs,
            rows,
            failed_rows,
            frequency_convention: convention,
            config: cfg,
        },
    )
}
