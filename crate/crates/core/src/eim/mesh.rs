//! Element mesh aligned with the phase interfaces and the capacity point of
//! one realization.

use crate::error::{Error, Result};
use crate::laminate::{capacity_point, phase_at, PhaseId, Realization, UnitCell};
use crate::scalar::Real;

/// Constant-eigen-field line element `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Element<T> {
    pub a: T,
    pub b: T,
    pub phase: PhaseId,
}

impl<T: Real> Element<T> {
    pub fn center(&self) -> T {
        (self.a + self.b) * T::lit(0.5)
    }

    pub fn width(&self) -> T {
        self.b - self.a
    }
}

/// Elements tiling `[-L, L]`. Breakpoints (interfaces, capacity point) are
/// always element ends; uniform nodes closer than `h/4` to one are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct EimMesh<T> {
    pub elements: Vec<Element<T>>,
    /// Nominal element count `N`.
    pub nominal: usize,
    /// Sampling points per element for cell averages.
    pub samples_per_element: usize,
}

impl<T: Real> EimMesh<T> {
    pub fn new(cell: &UnitCell<T>, real: &Realization<T>, n: usize, np: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("element count N must be positive".into()));
        }
        if np < n {
            return Err(Error::InvalidArgument(format!(
                "sampling points NP = {np} must be at least N = {n}"
            )));
        }
        let l = cell.half_length;
        let h = cell.period() / T::lit(n as f64);
        let a = cell.inclusion_half_width();
        let mut breaks = vec![
            cell.wrap(-a + real.y),
            cell.wrap(a + real.y),
            capacity_point(cell, real),
        ];
        breaks.retain(|&b| b > -l);
        let near = |x: T| breaks.iter().any(|&b| (x - b).abs() < h * T::lit(0.25));
        let mut nodes: Vec<T> = (0..=n)
            .map(|k| if k == n { l } else { -l + T::lit(k as f64) * h })
            .filter(|&x| x == -l || x == l || !near(x))
            .collect();
        nodes.extend(breaks.iter().copied());
        nodes.sort_by(|u, v| u.partial_cmp(v).expect("finite mesh node"));
        nodes.dedup_by(|u, v| (*u - *v).abs() <= T::epsilon() * l);
        let elements = nodes
            .windows(2)
            .map(|w| {
                let mid = (w[0] + w[1]) * T::lit(0.5);
                Element {
                    a: w[0],
                    b: w[1],
                    phase: phase_at(cell, real, mid),
                }
            })
            .collect();
        Ok(Self {
            elements,
            nominal: n,
            samples_per_element: np.div_ceil(n),
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn sample_points(&self) -> usize {
        self.len() * self.samples_per_element
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_mesh_aligns_with_breakpoints() {
        let cell = UnitCell::<f64>::reference();
        let m = EimMesh::new(&cell, &Realization::reference(), 200, 400).unwrap();
        assert_eq!(m.samples_per_element, 2);
        for x in [-0.4, 0.3, 0.4] {
            assert!(m.elements.iter().any(|e| (e.b - x).abs() < 1e-15));
        }
        assert!(m.elements.iter().all(|e| e.width() > 0.0));
    }

    #[test]
    fn rejects_bad_counts() {
        let cell = UnitCell::<f64>::reference();
        assert!(EimMesh::new(&cell, &Realization::reference(), 0, 4).is_err());
        assert!(EimMesh::new(&cell, &Realization::reference(), 10, 4).is_err());
    }

    proptest! {
        #[test]
        fn mesh_tiles_the_cell(y in -1.0f64..1.0, n in 16usize..300) {
            let cell = UnitCell::<f64>::reference();
            let real = Realization::new(y);
            let m = EimMesh::new(&cell, &real, n, 2 * n).unwrap();
            prop_assert_eq!(m.elements[0].a, -1.0);
            prop_assert_eq!(m.elements.last().unwrap().b, 1.0);
            for w in m.elements.windows(2) {
                prop_assert_eq!(w[0].b, w[1].a);
            }
            let h = 2.0 / n as f64;
            for e in &m.elements {
                prop_assert!(e.width() > 0.0 && e.width() < 1.6 * h);
                // No element straddles an interface.
                prop_assert_eq!(phase_at(&cell, &real, e.a + 1e-3 * e.width()), e.phase);
                prop_assert_eq!(phase_at(&cell, &real, e.b - 1e-3 * e.width()), e.phase);
            }
        }
    }
}
