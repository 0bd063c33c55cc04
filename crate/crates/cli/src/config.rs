//! Run configuration: TOML file, defaults, and range checks.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use willis_laminate::eim::EimOptions;
use willis_laminate::validation::ValidationConfig;
use willis_laminate::{FrequencyScaling, Phase, PhaseId, UnitCellF64, WeightSpecF64};

/// Errors that map to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(UsageError(msg.into()).into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub cell: CellConfig,
    pub sweep: SweepConfig,
    pub method: MethodChoice,
    pub weight: WeightChoice,
    pub numerics: Numerics,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            cell: CellConfig::default(),
            sweep: SweepConfig::default(),
            method: MethodChoice::All,
            weight: WeightChoice::Dephased,
            numerics: Numerics::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CellConfig {
    pub half_length: f64,
    pub conductivity_1: f64,
    pub capacity_1: f64,
    pub conductivity_2: f64,
    pub capacity_2: f64,
    /// Volume fraction `c1` of phase 1.
    pub volume_fraction: f64,
    /// Point capacity `H`.
    pub point_capacity: f64,
    pub alpha: f64,
}

impl Default for CellConfig {
    fn default() -> Self {
        let r = UnitCellF64::reference();
        Self {
            half_length: r.half_length,
            conductivity_1: r.phase1.conductivity,
            capacity_1: r.phase1.capacity,
            conductivity_2: r.phase2.conductivity,
            capacity_2: r.phase2.capacity,
            volume_fraction: r.volume_fraction,
            point_capacity: r.point_capacity,
            alpha: r.alpha,
        }
    }
}

impl CellConfig {
    pub fn to_cell(&self) -> UnitCellF64 {
        UnitCellF64 {
            half_length: self.half_length,
            phase1: Phase {
                conductivity: self.conductivity_1,
                capacity: self.capacity_1,
            },
            phase2: Phase {
                conductivity: self.conductivity_2,
                capacity: self.capacity_2,
            },
            volume_fraction: self.volume_fraction,
            point_capacity: self.point_capacity,
            alpha: self.alpha,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    /// Number of points, endpoints included.
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Explicit `omega_bar` list; takes precedence over `omega_bar_range` when nonempty.
    pub omega_bar: Vec<f64>,
    pub omega_bar_range: Option<Range>,
    pub zeta: Vec<f64>,
    /// Offsets swept by `sweep-alpha` and `impedance`; `effective` uses `cell.alpha`.
    pub alpha: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            omega_bar: Vec::new(),
            omega_bar_range: Some(Range {
                start: 0.0,
                stop: 0.625,
                count: 26,
            }),
            zeta: vec![0.0, 1.0],
            alpha: vec![0.0, 0.2, 0.4, 0.6, 0.75, 1.0],
        }
    }
}

impl SweepConfig {
    pub fn omega_bars(&self) -> Vec<f64> {
        if !self.omega_bar.is_empty() {
            return self.omega_bar.clone();
        }
        match &self.omega_bar_range {
            Some(r) if r.count == 1 => vec![r.start],
            Some(r) => (0..r.count)
                .map(|i| r.start + (r.stop - r.start) * i as f64 / (r.count - 1) as f64)
                .collect(),
            None => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    Eim,
    Exact,
    Brm,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum WeightChoice {
    Uniform,
    Dephased,
    /// Phase-1 mask.
    Masked1,
    /// Phase-2 mask.
    Masked2,
}

impl WeightChoice {
    pub fn spec(self) -> WeightSpecF64 {
        match self {
            WeightChoice::Uniform => WeightSpecF64::Uniform,
            WeightChoice::Dephased => WeightSpecF64::Dephased,
            WeightChoice::Masked1 => WeightSpecF64::PhaseMasked(PhaseId::One),
            WeightChoice::Masked2 => WeightSpecF64::PhaseMasked(PhaseId::Two),
        }
    }

    /// Name written to result rows; distinguishes the two masks.
    pub fn as_str(self) -> &'static str {
        match self {
            WeightChoice::Uniform => "uniform",
            WeightChoice::Dephased => "dephased",
            WeightChoice::Masked1 => "masked1",
            WeightChoice::Masked2 => "masked2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingChoice {
    /// `omega_bar = (2L)^2 omega C2 / K2`.
    LengthSquared,
    /// `omega_bar = omega C2 / (K2 (2L)^2)`.
    InverseLengthSquared,
}

impl ScalingChoice {
    pub fn scaling(self) -> FrequencyScaling {
        match self {
            ScalingChoice::LengthSquared => FrequencyScaling::LengthSquared,
            ScalingChoice::InverseLengthSquared => FrequencyScaling::InverseLengthSquared,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Numerics {
    /// EIM elements `N`.
    pub elements: usize,
    /// EIM sampling points `NP`.
    pub sample_points: usize,
    /// Ensemble realizations `NY` (boundary retrieval and non-de-phased EIM).
    pub realizations: usize,
    /// Series truncation `M`.
    pub modes: usize,
    /// Cross-method tolerance reported by `effective`.
    pub tolerance: f64,
    /// Frequency convention for kernel commands.
    pub scaling: ScalingChoice,
    /// Frequency convention for `floquet`.
    pub floquet_scaling: ScalingChoice,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            elements: 200,
            sample_points: 400,
            realizations: 100,
            modes: 100,
            tolerance: 0.02,
            scaling: ScalingChoice::InverseLengthSquared,
            floquet_scaling: ScalingChoice::LengthSquared,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("willis-out") }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return usage(format!("cannot read config {}: {e}", path.display())),
        };
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        match toml::from_str::<RunConfig>(text) {
            Ok(c) => Ok(c),
            Err(e) => usage(format!("invalid config: {}", e.message())),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Range and consistency checks.
    pub fn check(&self) -> anyhow::Result<()> {
        let n = &self.numerics;
        if !(16..=4096).contains(&n.elements) {
            return usage(format!("numerics.elements = {} outside [16, 4096]", n.elements));
        }
        if n.sample_points < n.elements {
            return usage("numerics.sample_points must be at least numerics.elements");
        }
        if !(8..=512).contains(&n.modes) {
            return usage(format!("numerics.modes = {} outside [8, 512]", n.modes));
        }
        if !(1..=10000).contains(&n.realizations) {
            return usage(format!("numerics.realizations = {} outside [1, 10000]", n.realizations));
        }
        if !(n.tolerance > 0.0) {
            return usage("numerics.tolerance must be positive");
        }
        if let Some(r) = &self.sweep.omega_bar_range {
            if r.count == 0 || !(r.stop >= r.start) {
                return usage("sweep.omega_bar_range needs count >= 1 and stop >= start");
            }
        }
        let w = self.sweep.omega_bars();
        if w.is_empty() {
            return usage("sweep.omega_bar is empty");
        }
        if w.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
            return usage("sweep.omega_bar values must be finite and non-negative");
        }
        if self.sweep.zeta.is_empty() || self.sweep.alpha.is_empty() {
            return usage("sweep.zeta and sweep.alpha must be nonempty");
        }
        if let Err(e) = self.cell.to_cell().validate() {
            return usage(e.to_string());
        }
        for &a in &self.sweep.alpha {
            if let Err(e) = self.cell.to_cell().with_alpha(a).validate() {
                return usage(format!("sweep.alpha = {a}: {e}"));
            }
        }
        Ok(())
    }

    pub fn eim_options(&self) -> EimOptions<f64> {
        EimOptions {
            elements: self.numerics.elements,
            sample_points: self.numerics.sample_points,
            medium: None,
        }
    }

    pub fn validation(&self) -> ValidationConfig {
        ValidationConfig {
            cell: self.cell.to_cell(),
            eim: self.eim_options(),
            realizations: self.numerics.realizations,
            modes: self.numerics.modes,
        }
    }
}
