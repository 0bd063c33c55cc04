//! Periodic two-phase unit cell with a concentrated heat capacity.
//!
//! The reference realization (`Y = 0`) occupies the window `[-L, L)`:
//! phase 1 fills `[-c1 L, c1 L)`, phase 2 the rest, and the point capacity
//! sits at `p = alpha c1 L`. A realization `Y` translates the whole
//! microstructure, `K_Y(x) = K_0(x - Y)`, with 2L-periodic wrapping.
//! Interface points belong to the phase on their right.

use crate::error::{Error, Result};
use crate::scalar::{cx, Cx, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase<T> {
    pub conductivity: T,
    pub capacity: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseId {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitCell<T> {
    /// Half period `L`.
    pub half_length: T,
    pub phase1: Phase<T>,
    pub phase2: Phase<T>,
    /// Volume fraction `c1` of phase 1.
    pub volume_fraction: T,
    /// Concentrated heat capacity `H` per unit area.
    pub point_capacity: T,
    /// Asymmetry parameter; the capacity sits at `alpha c1 L` when `Y = 0`.
    pub alpha: T,
}

impl<T: Real> UnitCell<T> {
    /// Builds a cell and checks its invariants.
    pub fn new(
        half_length: T,
        phase1: Phase<T>,
        phase2: Phase<T>,
        volume_fraction: T,
        point_capacity: T,
        alpha: T,
    ) -> Result<Self> {
        let cell = Self {
            half_length,
            phase1,
            phase2,
            volume_fraction,
            point_capacity,
            alpha,
        };
        cell.validate()?;
        Ok(cell)
    }

    /// The laminate used throughout the reference examples: `2L = 2`,
    /// `K1 = 0.05`, `C1 = 0.5`, `K2 = 1`, `C2 = 0.5`, `c1 = 0.4`, `H = 1`, `alpha = 0.75`.
    pub fn reference() -> Self {
        Self {
            half_length: T::one(),
            phase1: Phase {
                conductivity: T::lit(0.05),
                capacity: T::lit(0.5),
            },
            phase2: Phase {
                conductivity: T::one(),
                capacity: T::lit(0.5),
            },
            volume_fraction: T::lit(0.4),
            point_capacity: T::one(),
            alpha: T::lit(0.75),
        }
    }

    /// Homogeneous medium without point capacity.
    pub fn homogeneous(half_length: T, conductivity: T, capacity: T) -> Self {
        let phase = Phase {
            conductivity,
            capacity,
        };
        Self {
            half_length,
            phase1: phase,
            phase2: phase,
            volume_fraction: T::lit(0.5),
            point_capacity: T::zero(),
            alpha: T::zero(),
        }
    }

    pub fn with_alpha(mut self, alpha: T) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_point_capacity(mut self, h: T) -> Self {
        self.point_capacity = h;
        self
    }

    pub fn with_volume_fraction(mut self, c1: T) -> Self {
        self.volume_fraction = c1;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidCell(m.to_string()));
        if !(self.half_length > T::zero()) {
            return bad("L must be positive");
        }
        if !(self.volume_fraction > T::zero() && self.volume_fraction < T::one()) {
            return bad("c1 must lie in (0, 1)");
        }
        if !(self.phase1.conductivity > T::zero() && self.phase2.conductivity > T::zero()) {
            return bad("K1 and K2 must be positive");
        }
        if !(self.phase1.capacity >= T::zero() && self.phase2.capacity >= T::zero()) {
            return bad("C1 and C2 must be non-negative");
        }
        if !(self.point_capacity >= T::zero()) {
            return bad("H must be non-negative");
        }
        if !(self.alpha.abs() <= T::one()) {
            return bad("alpha must lie in [-1, 1]");
        }
        Ok(())
    }

    pub fn c2(&self) -> T {
        T::one() - self.volume_fraction
    }

    pub fn period(&self) -> T {
        self.half_length + self.half_length
    }

    /// Half width `c1 L` of the phase-1 layer.
    pub fn inclusion_half_width(&self) -> T {
        self.volume_fraction * self.half_length
    }

    /// Point-capacity position in the reference realization.
    pub fn base_capacity_position(&self) -> T {
        self.alpha * self.inclusion_half_width()
    }

    pub fn phase(&self, id: PhaseId) -> Phase<T> {
        match id {
            PhaseId::One => self.phase1,
            PhaseId::Two => self.phase2,
        }
    }

    pub fn fraction(&self, id: PhaseId) -> T {
        match id {
            PhaseId::One => self.volume_fraction,
            PhaseId::Two => self.c2(),
        }
    }

    /// Wraps `x` into the half-open window `[-L, L)`.
    pub fn wrap(&self, x: T) -> T {
        if x >= -self.half_length && x < self.half_length {
            return x;
        }
        let period = self.period();
        let shifted = x + self.half_length;
        let mut r = shifted - (shifted / period).floor() * period;
        if r >= period {
            r -= period;
        }
        if r < T::zero() {
            r = T::zero();
        }
        r - self.half_length
    }

    /// Phase occupying `x` in the reference realization (after wrapping).
    pub fn reference_phase_at(&self, x: T) -> PhaseId {
        let s = self.wrap(x);
        let a = self.inclusion_half_width();
        if s >= -a && s < a {
            PhaseId::One
        } else {
            PhaseId::Two
        }
    }

    /// Harmonic-mean conductivity `(c1/K1 + c2/K2)^{-1}`.
    pub fn static_conductivity(&self) -> T {
        T::one()
            / (self.volume_fraction / self.phase1.conductivity + self.c2() / self.phase2.conductivity)
    }

    /// Mean capacity including the smeared point capacity.
    pub fn static_capacity(&self) -> T {
        self.volume_fraction * self.phase1.capacity
            + self.c2() * self.phase2.capacity
            + self.point_capacity / self.period()
    }

    /// True when the reference realization is mirror symmetric about `x = 0`,
    /// which forces the Willis couplings to vanish.
    pub fn is_symmetric(&self) -> bool {
        self.alpha == T::zero() || self.point_capacity == T::zero()
    }
}

/// Translation offset of the microstructure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Realization<T> {
    pub y: T,
}

impl<T: Real> Realization<T> {
    pub fn new(y: T) -> Self {
        Self { y }
    }

    pub fn reference() -> Self {
        Self { y: T::zero() }
    }

    /// `ny` realizations at the midpoints of a uniform partition of `[-L, L)`.
    pub fn uniform_ensemble(cell: &UnitCell<T>, ny: usize) -> Vec<Self> {
        let step = cell.period() / T::lit(ny as f64);
        (0..ny)
            .map(|i| Self {
                y: -cell.half_length + (T::lit(i as f64) + T::lit(0.5)) * step,
            })
            .collect()
    }
}

/// Phase id at `x` for realization `real`.
pub fn phase_at<T: Real>(cell: &UnitCell<T>, real: &Realization<T>, x: T) -> PhaseId {
    cell.reference_phase_at(x - real.y)
}

/// Local conductivity and capacity at `x`; the point capacity is excluded.
pub fn material_at<T: Real>(cell: &UnitCell<T>, real: &Realization<T>, x: T) -> Phase<T> {
    cell.phase(phase_at(cell, real, x))
}

/// Position `p_Y = wrap(alpha c1 L + Y)` of the point capacity.
pub fn capacity_point<T: Real>(cell: &UnitCell<T>, real: &Realization<T>) -> T {
    cell.wrap(cell.base_capacity_position() + real.y)
}

/// Tabulated weight multiplier, given in the microstructure frame and
/// linearly interpolated. The table must cover the whole window `[-L, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable<T> {
    pub x: Vec<T>,
    pub value: Vec<Cx<T>>,
}

impl<T: Real> WeightTable<T> {
    pub fn new(x: Vec<T>, value: Vec<Cx<T>>) -> Result<Self> {
        if x.len() != value.len() || x.len() < 2 {
            return Err(Error::InvalidArgument(
                "weight table needs at least two (x, value) pairs of equal length".into(),
            ));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(
                "weight table abscissae must be strictly increasing".into(),
            ));
        }
        Ok(Self { x, value })
    }

    pub fn interpolate(&self, s: T) -> Result<Cx<T>> {
        let n = self.x.len();
        if s < self.x[0] || s > self.x[n - 1] {
            return Err(Error::Interpolation { x: s.to_f64_lossy() });
        }
        let j = self.x.partition_point(|&xi| xi <= s).clamp(1, n - 1);
        let (x0, x1) = (self.x[j - 1], self.x[j]);
        let t = (s - x0) / (x1 - x0);
        Ok(self.value[j - 1] * (T::one() - t) + self.value[j] * t)
    }
}

/// Averaging weight `f(x)`.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec<T> {
    /// `f = 1` (conventional average).
    Uniform,
    /// `f = exp(-i zeta x)`.
    Dephased,
    /// `f = exp(-i zeta x) 1_phase / c_phase`.
    PhaseMasked(PhaseId),
    /// `f = exp(-i zeta x) w(x - Y)` with tabulated `w`.
    Custom(WeightTable<T>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightKind {
    Uniform,
    Dephased,
    PhaseMasked,
    Custom,
}

impl WeightKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WeightKind::Uniform => "uniform",
            WeightKind::Dephased => "dephased",
            WeightKind::PhaseMasked => "masked",
            WeightKind::Custom => "custom",
        }
    }
}

impl<T: Real> WeightSpec<T> {
    pub fn kind(&self) -> WeightKind {
        match self {
            WeightSpec::Uniform => WeightKind::Uniform,
            WeightSpec::Dephased => WeightKind::Dephased,
            WeightSpec::PhaseMasked(_) => WeightKind::PhaseMasked,
            WeightSpec::Custom(_) => WeightKind::Custom,
        }
    }

    /// Whether the weight carries the `exp(-i zeta x)` de-phasing factor.
    pub fn is_dephased(&self) -> bool {
        !matches!(self, WeightSpec::Uniform)
    }

    /// De-phasing factor alone: `exp(-i zeta x)`, or `1` for the uniform weight.
    pub fn phase_factor(&self, zeta: T, x: T) -> Cx<T> {
        if self.is_dephased() {
            Cx::from_polar(T::one(), -zeta * x)
        } else {
            cx(T::one(), T::zero())
        }
    }

    /// Microstructure-attached multiplier (mask or table), excluding de-phasing.
    pub fn multiplier(&self, cell: &UnitCell<T>, real: &Realization<T>, x: T) -> Result<Cx<T>> {
        match self {
            WeightSpec::Uniform | WeightSpec::Dephased => Ok(cx(T::one(), T::zero())),
            WeightSpec::PhaseMasked(id) => {
                if phase_at(cell, real, x) == *id {
                    Ok(cx(T::one() / cell.fraction(*id), T::zero()))
                } else {
                    Ok(cx(T::zero(), T::zero()))
                }
            }
            WeightSpec::Custom(table) => table.interpolate(cell.wrap(x - real.y)),
        }
    }
}

/// Full weight `f(x)` for realization `real` at Bloch wavenumber `zeta`.
pub fn weight_at<T: Real>(
    spec: &WeightSpec<T>,
    cell: &UnitCell<T>,
    real: &Realization<T>,
    zeta: T,
    x: T,
) -> Result<Cx<T>> {
    Ok(spec.phase_factor(zeta, x) * spec.multiplier(cell, real, x)?)
}

/// Convention relating the dimensionless frequency to `omega`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrequencyScaling {
    /// `omega_bar = (2L)^2 omega C2 / K2`.
    LengthSquared,
    /// `omega_bar = omega C2 / (K2 (2L)^2)`.
    InverseLengthSquared,
}

impl FrequencyScaling {
    pub fn as_str(self) -> &'static str {
        match self {
            FrequencyScaling::LengthSquared => "length_squared",
            FrequencyScaling::InverseLengthSquared => "inverse_length_squared",
        }
    }

    fn factor<T: Real>(self, cell: &UnitCell<T>) -> T {
        let l2 = cell.period() * cell.period();
        let base = cell.phase2.capacity / cell.phase2.conductivity;
        match self {
            FrequencyScaling::LengthSquared => l2 * base,
            FrequencyScaling::InverseLengthSquared => base / l2,
        }
    }

    pub fn omega<T: Real>(self, cell: &UnitCell<T>, omega_bar: T) -> T {
        omega_bar / self.factor(cell)
    }

    pub fn omega_bar<T: Real>(self, cell: &UnitCell<T>, omega: T) -> T {
        omega * self.factor(cell)
    }
}

/// Harmonic loading point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationPoint<T> {
    pub omega: T,
    pub zeta: T,
}

impl<T: Real> EvaluationPoint<T> {
    pub fn new(omega: T, zeta: T) -> Result<Self> {
        if !(omega >= T::zero()) {
            return Err(Error::InvalidArgument("omega must be non-negative".into()));
        }
        Ok(Self { omega, zeta })
    }

    /// Admissible Fourier wavenumber `kappa = zeta + n pi / L`.
    pub fn kappa(&self, cell: &UnitCell<T>, n: i64) -> T {
        self.zeta + T::lit(n as f64) * T::PI() / cell.half_length
    }

    /// Bloch wavenumber folded into `[-pi/L, pi/L)`.
    pub fn reduced_zeta(&self, cell: &UnitCell<T>) -> T {
        let pl = T::PI() / cell.half_length;
        let two = pl + pl;
        let s = self.zeta + pl;
        s - (s / two).floor() * two - pl
    }

    pub fn omega_bar(&self, cell: &UnitCell<T>, scaling: FrequencyScaling) -> T {
        scaling.omega_bar(cell, self.omega)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cell() -> UnitCell<f64> {
        UnitCell::reference()
    }

    #[test]
    fn center_of_reference_cell_is_phase_one() {
        let m = material_at(&cell(), &Realization::reference(), 0.0);
        assert_eq!(m.conductivity, 0.05);
        assert_eq!(m.capacity, 0.5);
    }

    #[test]
    fn homogeneous_cell_is_uniform() {
        let c = UnitCell::homogeneous(1.0, 2.0, 3.0);
        for i in 0..50 {
            let x = -1.0 + 0.04 * i as f64;
            let m = material_at(&c, &Realization::new(0.37), x);
            assert_eq!((m.conductivity, m.capacity), (2.0, 3.0));
        }
    }

    #[test]
    fn shifted_material_matches_brute_force_grid() {
        let c = cell();
        let y = 0.3;
        for i in 0..1000 {
            let x = -1.0 + 2.0 * i as f64 / 1000.0;
            let lhs = material_at(&c, &Realization::new(y), x);
            let rhs = material_at(&c, &Realization::reference(), c.wrap(x - y));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn capacity_point_examples() {
        assert_relative_eq!(
            capacity_point(&cell(), &Realization::reference()),
            0.3,
            epsilon = 1e-15
        );
        let c0 = cell().with_alpha(0.0);
        assert_relative_eq!(capacity_point(&c0, &Realization::new(0.45)), 0.45);
        let c1 = cell().with_alpha(1.0);
        assert_relative_eq!(
            capacity_point(&c1, &Realization::new(0.9)),
            -0.7,
            epsilon = 1e-12
        );
    }

    #[test]
    fn wrap_is_half_open() {
        let c = cell();
        assert_eq!(c.wrap(1.0), -1.0);
        assert_eq!(c.wrap(-1.0), -1.0);
        assert_relative_eq!(c.wrap(3.25), -0.75, epsilon = 1e-15);
    }

    #[test]
    fn interfaces_belong_to_right_phase() {
        let c = cell();
        assert_eq!(c.reference_phase_at(-0.4), PhaseId::One);
        assert_eq!(c.reference_phase_at(0.4), PhaseId::Two);
    }

    #[test]
    fn weight_examples() {
        let c = cell();
        let r = Realization::reference();
        let w = weight_at(&WeightSpec::Dephased, &c, &r, 0.0, 0.7).unwrap();
        assert_eq!(w, Cx::new(1.0, 0.0));
        let w = weight_at(&WeightSpec::PhaseMasked(PhaseId::Two), &c, &r, 0.0, 0.8).unwrap();
        assert_relative_eq!(w.re, 1.0 / 0.6, epsilon = 1e-15);
        let w = weight_at(&WeightSpec::PhaseMasked(PhaseId::Two), &c, &r, 0.0, 0.1).unwrap();
        assert_eq!(w.norm(), 0.0);
        let w = weight_at(&WeightSpec::Dephased, &c, &r, 1.0, std::f64::consts::PI).unwrap();
        assert_relative_eq!(w.re, -1.0, epsilon = 1e-15);
        assert!(w.im.abs() < 1e-15);
    }

    #[test]
    fn custom_weight_interpolates_and_reports_gaps() {
        let table = WeightTable::new(
            vec![-1.0, 0.0, 0.5],
            vec![Cx::new(0.0, 0.0), Cx::new(2.0, 0.0), Cx::new(2.0, 1.0)],
        )
        .unwrap();
        let spec = WeightSpec::Custom(table);
        let c = cell();
        let r = Realization::reference();
        let w = spec.multiplier(&c, &r, -0.5).unwrap();
        assert_relative_eq!(w.re, 1.0);
        assert!(matches!(
            spec.multiplier(&c, &r, 0.75),
            Err(Error::Interpolation { .. })
        ));
    }

    #[test]
    fn static_mixture_values() {
        let c = cell();
        assert_relative_eq!(c.static_conductivity(), 1.0 / 8.6, epsilon = 1e-15);
        assert_relative_eq!(c.static_capacity(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn scalings_differ_by_sixteen_on_unit_half_length() {
        let c = cell();
        let w1 = FrequencyScaling::LengthSquared.omega(&c, 0.05);
        let w2 = FrequencyScaling::InverseLengthSquared.omega(&c, 0.05);
        assert_relative_eq!(w1, 0.025);
        assert_relative_eq!(w2, 0.4);
        assert_relative_eq!(w2 / w1, 16.0);
    }

    #[test]
    fn invalid_cells_are_rejected() {
        let c = cell();
        assert!(UnitCell::new(1.0, c.phase1, c.phase2, 1.0, 1.0, 0.0).is_err());
        assert!(UnitCell::new(1.0, c.phase1, c.phase2, 0.4, -1.0, 0.0).is_err());
        assert!(UnitCell::new(1.0, c.phase1, c.phase2, 0.4, 1.0, 1.5).is_err());
        assert!(UnitCell::new(-1.0, c.phase1, c.phase2, 0.4, 1.0, 0.0).is_err());
    }

    #[test]
    fn volume_fraction_by_quadrature() {
        let c = cell();
        let n = 200_000;
        let h = 2.0 / n as f64;
        let r = Realization::new(0.123);
        let measure: f64 = (0..n)
            .filter(|&i| phase_at(&c, &r, -1.0 + (i as f64 + 0.5) * h) == PhaseId::One)
            .count() as f64
            * h;
        assert!((measure - 0.8).abs() < 2.0 * h);
    }

    #[test]
    fn spatial_means_match_mixture_rules() {
        let c = cell();
        let r = Realization::new(-0.41);
        let n = 100_000;
        let h = 2.0 / n as f64;
        let (mut mean_c, mut mean_inv_k) = (0.0, 0.0);
        for i in 0..n {
            let m = material_at(&c, &r, -1.0 + (i as f64 + 0.5) * h);
            mean_c += m.capacity * h / 2.0;
            mean_inv_k += h / 2.0 / m.conductivity;
        }
        assert!((mean_c + c.point_capacity / 2.0 - c.static_capacity()).abs() < 1e-3);
        assert!((1.0 / mean_inv_k - c.static_conductivity()).abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn shift_covariance(y in -1.0f64..1.0, x in -1.0f64..1.0) {
            let c = cell();
            let lhs = material_at(&c, &Realization::new(y), x);
            let rhs = material_at(&c, &Realization::reference(), c.wrap(x - y));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn wrap_lands_in_window(x in -50.0f64..50.0) {
            let w = cell().wrap(x);
            prop_assert!((-1.0..1.0).contains(&w));
            let k = ((x - w) / 2.0).round();
            prop_assert!((x - w - 2.0 * k).abs() < 1e-9);
        }

        #[test]
        fn dephased_weight_at_zero_zeta_is_uniform(x in -1.0f64..1.0, y in -1.0f64..1.0) {
            let c = cell();
            let r = Realization::new(y);
            let d = weight_at(&WeightSpec::Dephased, &c, &r, 0.0, x).unwrap();
            let u = weight_at(&WeightSpec::Uniform, &c, &r, 0.0, x).unwrap();
            prop_assert_eq!(d, u);
        }
    }
}
