//! Prescribed heat sources as sums of truncated plane waves.

use crate::error::{Error, Result};
use crate::laminate::{phase_at, PhaseId, Realization, UnitCell};
use crate::scalar::{imag_unit, re, Cx, Real};

/// `amp * exp(i kappa x)` on `[a, b]`, zero elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceTerm<T> {
    pub amplitude: Cx<T>,
    pub kappa: T,
    pub a: T,
    pub b: T,
}

/// Source profile `Q(x)` on the cell window.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec<T> {
    pub terms: Vec<SourceTerm<T>>,
}

impl<T: Real> SourceSpec<T> {
    pub fn new(terms: Vec<SourceTerm<T>>) -> Result<Self> {
        let s = Self { terms };
        s.validate()?;
        Ok(s)
    }

    /// `Q0 exp(i zeta x)` over the whole cell.
    pub fn plane(cell: &UnitCell<T>, amplitude: Cx<T>, zeta: T) -> Self {
        Self {
            terms: vec![SourceTerm {
                amplitude,
                kappa: zeta,
                a: -cell.half_length,
                b: cell.half_length,
            }],
        }
    }

    /// `exp(i zeta x) (1 + depth cos(pi x / L))`.
    pub fn modulated(cell: &UnitCell<T>, zeta: T, depth: T) -> Self {
        let (l, k) = (cell.half_length, T::PI() / cell.half_length);
        let half = re(depth * T::lit(0.5));
        let term = |amplitude, kappa| SourceTerm {
            amplitude,
            kappa,
            a: -l,
            b: l,
        };
        Self {
            terms: vec![term(re(T::one()), zeta), term(half, zeta + k), term(half, zeta - k)],
        }
    }

    /// `exp(i zeta x) 1_phase / c_phase`: the source paired with a phase mask.
    pub fn masked(cell: &UnitCell<T>, real: &Realization<T>, zeta: T, phase: PhaseId) -> Self {
        let amp = re(T::one() / cell.fraction(phase));
        let l = cell.half_length;
        let a = cell.inclusion_half_width();
        let mut cuts = vec![-l, l, cell.wrap(-a + real.y), cell.wrap(a + real.y)];
        cuts.sort_by(|u, v| u.partial_cmp(v).expect("finite"));
        cuts.dedup();
        let terms = cuts
            .windows(2)
            .filter(|w| w[1] > w[0] && phase_at(cell, real, (w[0] + w[1]) * T::lit(0.5)) == phase)
            .map(|w| SourceTerm {
                amplitude: amp,
                kappa: zeta,
                a: w[0],
                b: w[1],
            })
            .collect();
        Self { terms }
    }

    pub fn validate(&self) -> Result<()> {
        let live = self
            .terms
            .iter()
            .any(|t| t.b > t.a && t.amplitude.norm() > T::zero());
        if !live {
            return Err(Error::InvalidArgument(
                "heat source vanishes identically; extraction needs a nonzero source".into(),
            ));
        }
        Ok(())
    }

    pub fn scaled(&self, factor: Cx<T>) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| SourceTerm {
                    amplitude: t.amplitude * factor,
                    ..*t
                })
                .collect(),
        }
    }

    pub fn evaluate(&self, x: T) -> Cx<T> {
        self.terms
            .iter()
            .filter(|t| x >= t.a && x < t.b)
            .fold(re(T::zero()), |s, t| {
                s + t.amplitude * (imag_unit::<T>() * t.kappa * x).exp()
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masked_source_lives_on_the_selected_phase() {
        let cell = UnitCell::<f64>::reference();
        let s = SourceSpec::masked(&cell, &Realization::new(0.7), 0.0, PhaseId::Two);
        for i in 0..200 {
            let x = -1.0 + 0.01 * i as f64 + 0.005;
            let want = if phase_at(&cell, &Realization::new(0.7), x) == PhaseId::Two {
                1.0 / 0.6
            } else {
                0.0
            };
            assert!((s.evaluate(x).re - want).abs() < 1e-12);
        }
    }

    #[test]
    fn modulated_source_matches_closed_form() {
        let cell = UnitCell::<f64>::reference();
        let s = SourceSpec::modulated(&cell, 1.0, 0.3);
        let x = 0.37f64;
        let want = Cx::new(0.0, x).exp() * (1.0 + 0.3 * (std::f64::consts::PI * x).cos());
        assert!((s.evaluate(x) - want).norm() < 1e-14);
    }

    #[test]
    fn empty_source_is_rejected() {
        assert!(SourceSpec::<f64>::new(vec![]).is_err());
    }
}
