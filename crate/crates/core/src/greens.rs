//! Infinite-domain Green's function of a homogeneous comparison medium and
//! the closed-form element integrals (1D Eshelby tensors) built from it.
//!
//! `G(x, x') = i/(2 Kc gamma) exp(i gamma |x - x'|)` solves
//! `Kc G'' + i omega Cc G = -delta(x - x')`, with `gamma^2 = i omega Cc / Kc`.

use crate::error::{Error, Result};
use crate::laminate::{Phase, UnitCell};
use crate::scalar::{exprel, imag_unit, Cx, Real};
use num_complex::Complex;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonMedium<T> {
    pub conductivity: T,
    pub capacity: T,
}

impl<T: Real> ComparisonMedium<T> {
    pub fn new(conductivity: T, capacity: T) -> Self {
        Self {
            conductivity,
            capacity,
        }
    }

    /// Phase 1 of `cell`, the default comparison medium.
    pub fn phase1_of(cell: &UnitCell<T>) -> Self {
        Self::from_phase(cell.phase1)
    }

    pub fn from_phase(p: Phase<T>) -> Self {
        Self::new(p.conductivity, p.capacity)
    }

    /// `gamma = (1 + i)/sqrt(2) * sqrt(omega Cc / Kc)`.
    pub fn gamma(&self, omega: T) -> Cx<T> {
        let s = (omega * self.capacity / self.conductivity).sqrt() * T::FRAC_1_SQRT_2();
        Complex::new(s, s)
    }

    /// Kernel bound to a frequency; fails for `omega <= 0` or `Cc = 0`.
    pub fn at(&self, omega: T) -> Result<ComparisonKernel<T>> {
        if !(omega > T::zero()) || !(self.capacity > T::zero()) {
            return Err(Error::SingularKernel);
        }
        let gamma = self.gamma(omega);
        let two_k = self.conductivity + self.conductivity;
        Ok(ComparisonKernel {
            conductivity: self.conductivity,
            capacity: self.capacity,
            omega,
            gamma,
            prefactor: imag_unit::<T>() / (gamma * two_k),
        })
    }
}

/// Comparison medium evaluated at a fixed `omega > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonKernel<T> {
    pub conductivity: T,
    pub capacity: T,
    pub omega: T,
    pub gamma: Cx<T>,
    /// `i / (2 Kc gamma)`.
    pub prefactor: Cx<T>,
}

impl<T: Real> ComparisonKernel<T> {
    #[inline]
    fn eig(&self, d: T) -> Cx<T> {
        (imag_unit::<T>() * self.gamma * d).exp()
    }

    #[inline]
    pub fn g(&self, x: T, xp: T) -> Cx<T> {
        self.prefactor * self.eig((x - xp).abs())
    }

    /// `dG/dx`; zero (the mean of the one-sided limits) at `x = x'`.
    #[inline]
    pub fn g_x(&self, x: T, xp: T) -> Cx<T> {
        let d = x - xp;
        let s = if d > T::zero() {
            -T::one()
        } else if d < T::zero() {
            T::one()
        } else {
            return Complex::new(T::zero(), T::zero());
        };
        self.eig(d.abs()) * (s / (self.conductivity + self.conductivity))
    }

    fn inv_two_k_gamma2(&self) -> Cx<T> {
        Complex::new(T::one(), T::zero())
            / (self.gamma * self.gamma * (self.conductivity + self.conductivity))
    }

    /// `L(x) = ∫_a^b G(x, x') dx'` (requires `a < b`).
    pub fn l(&self, a: T, b: T, x: T) -> Cx<T> {
        let f = self.inv_two_k_gamma2();
        if x <= a {
            f * (self.eig(b - x) - self.eig(a - x))
        } else if x >= b {
            f * (self.eig(x - a) - self.eig(x - b))
        } else {
            f * (self.eig(x - a) + self.eig(b - x) - T::lit(2.0))
        }
    }

    /// `dL/dx`.
    pub fn l_x(&self, a: T, b: T, x: T) -> Cx<T> {
        let f = self.inv_two_k_gamma2() * imag_unit::<T>() * self.gamma;
        if x <= a {
            -f * (self.eig(b - x) - self.eig(a - x))
        } else if x >= b {
            f * (self.eig(x - a) - self.eig(x - b))
        } else {
            f * (self.eig(x - a) - self.eig(b - x))
        }
    }

    /// `d²L/dx²` (inside the element this equals `(-1 - i omega Cc L) / Kc`).
    pub fn l_xx(&self, a: T, b: T, x: T) -> Cx<T> {
        let f = -self.inv_two_k_gamma2() * self.gamma * self.gamma;
        if x <= a {
            f * (self.eig(b - x) - self.eig(a - x))
        } else if x >= b {
            f * (self.eig(x - a) - self.eig(x - b))
        } else {
            f * (self.eig(x - a) + self.eig(b - x))
        }
    }

    /// `(∫_a^b G(x,x') e^{i kappa x'} dx', d/dx of the same)` for `a < b`.
    pub fn plane_source_integral(&self, kappa: T, a: T, b: T, x: T) -> (Cx<T>, Cx<T>) {
        let i = imag_unit::<T>();
        let mid = x.max(a).min(b);
        // Left part: x' in [a, mid], G = c e^{i gamma (x - x')}.
        let s_left = i * (Complex::new(kappa, T::zero()) - self.gamma);
        let left = if mid > a {
            (i * kappa * mid + i * self.gamma * (x - mid)).exp()
                * exprel(-s_left * (mid - a))
                * (mid - a)
        } else {
            Complex::new(T::zero(), T::zero())
        };
        // Right part: x' in [mid, b], G = c e^{i gamma (x' - x)}.
        let s_right = i * (Complex::new(kappa, T::zero()) + self.gamma);
        let right = if b > mid {
            (i * kappa * mid + i * self.gamma * (mid - x)).exp()
                * exprel(s_right * (b - mid))
                * (b - mid)
        } else {
            Complex::new(T::zero(), T::zero())
        };
        let v = self.prefactor * (left + right);
        let d = self.prefactor * i * self.gamma * (left - right);
        (v, d)
    }
}

/// `G^H(x, x')` of the comparison medium.
pub fn greens_h<T: Real>(med: &ComparisonMedium<T>, omega: T, x: T, xp: T) -> Result<Cx<T>> {
    Ok(med.at(omega)?.g(x, xp))
}

fn check_segment<T: Real>(a: T, b: T) -> Result<()> {
    if !(b > a) {
        return Err(Error::InvalidArgument(format!(
            "element requires b > a (a = {a}, b = {b})"
        )));
    }
    Ok(())
}

/// Element integral `L(x) = ∫_a^b G^H(x, x') dx'`.
pub fn eshelby_l<T: Real>(med: &ComparisonMedium<T>, omega: T, a: T, b: T, x: T) -> Result<Cx<T>> {
    check_segment(a, b)?;
    Ok(med.at(omega)?.l(a, b, x))
}

/// `dL/dx` of [`eshelby_l`].
pub fn eshelby_lx<T: Real>(med: &ComparisonMedium<T>, omega: T, a: T, b: T, x: T) -> Result<Cx<T>> {
    check_segment(a, b)?;
    Ok(med.at(omega)?.l_x(a, b, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::integrate_complex;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn med() -> ComparisonMedium<f64> {
        ComparisonMedium::new(1.0, 0.5)
    }

    #[test]
    fn gamma_squared_and_decay() {
        let k = med().at(0.025).unwrap();
        let g2 = k.gamma * k.gamma;
        assert_relative_eq!(g2.re, 0.0, epsilon = 1e-16);
        assert_relative_eq!(g2.im, 0.025 * 0.5, epsilon = 1e-16);
        assert!(k.gamma.im > 0.0 && k.gamma.re > 0.0);
    }

    #[test]
    fn symmetric_in_arguments() {
        let a = greens_h(&med(), 0.3, 0.3, 0.7).unwrap();
        let b = greens_h(&med(), 0.3, 0.7, 0.3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_frequency_is_singular() {
        assert_eq!(greens_h(&med(), 0.0, 0.0, 1.0), Err(Error::SingularKernel));
    }

    #[test]
    fn finite_difference_residual_off_diagonal() {
        let k = med().at(0.025).unwrap();
        let h = 1e-3;
        for &x in &[0.5, 1.3, -2.0, 4.0] {
            let g = |y: f64| k.g(y, 0.1);
            let gxx = (g(x + h) - g(x) * 2.0 + g(x - h)) / (h * h);
            let res = gxx * k.conductivity + g(x) * Complex::new(0.0, k.omega * k.capacity);
            assert!(res.norm() / g(x).norm() < 1e-6, "residual {}", res.norm());
        }
    }

    #[test]
    fn decays_monotonically() {
        let k = med().at(0.7).unwrap();
        let mut prev = f64::INFINITY;
        for i in 0..100 {
            let v = k.g(0.05 * i as f64, 0.0).norm();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn unit_jump_in_flux() {
        let k = med().at(0.4).unwrap();
        let jump = (k.g_x(0.2 + 1e-12, 0.2) - k.g_x(0.2 - 1e-12, 0.2)) * k.conductivity;
        assert_relative_eq!(jump.re, -1.0, epsilon = 1e-9);
    }

    #[test]
    fn eshelby_continuous_at_element_ends() {
        let k = med().at(2.0).unwrap();
        let (a, b) = (-0.2, 0.3);
        for e in [a, b] {
            let l = k.l(a, b, e);
            let lm = k.l(a, b, e - 1e-13);
            let lp = k.l(a, b, e + 1e-13);
            assert!((l - lm).norm() < 1e-12 && (l - lp).norm() < 1e-12);
        }
    }

    #[test]
    fn eshelby_matches_adaptive_quadrature() {
        let m = med();
        let omega = 3.0;
        let k = m.at(omega).unwrap();
        let (a, b) = (-0.31, 0.17);
        for i in 0..20 {
            let x = -1.0 + 0.1 * i as f64 + 0.013;
            let closed = eshelby_l(&m, omega, a, b, x).unwrap();
            let quad = if x > a && x < b {
                integrate_complex(|t| k.g(x, t), a, x, 1e-13)
                    + integrate_complex(|t| k.g(x, t), x, b, 1e-13)
            } else {
                integrate_complex(|t| k.g(x, t), a, b, 1e-13)
            };
            assert!((closed - quad).norm() / quad.norm() < 1e-8);
        }
    }

    #[test]
    fn eshelby_derivative_matches_finite_difference() {
        let m = med();
        let omega = 3.0;
        let (a, b) = (-0.31, 0.17);
        let h = 1e-6;
        for &x in &[-0.9, -0.5, -0.1, 0.05, 0.4, 0.8] {
            let fd = (eshelby_l(&m, omega, a, b, x + h).unwrap()
                - eshelby_l(&m, omega, a, b, x - h).unwrap())
                / (2.0 * h);
            let lx = eshelby_lx(&m, omega, a, b, x).unwrap();
            assert!((fd - lx).norm() / lx.norm() < 1e-5);
        }
    }

    #[test]
    fn eshelby_rejects_reversed_element() {
        assert!(eshelby_l(&med(), 1.0, 0.3, 0.3, 0.0).is_err());
    }

    #[test]
    fn plane_source_integral_matches_quadrature() {
        let k = med().at(1.7).unwrap();
        let (a, b) = (-1.0, 1.0);
        for &x in &[-1.0, -0.4, 0.0, 0.77, 1.0] {
            let (v, d) = k.plane_source_integral(1.3, a, b, x);
            let f = |t: f64| k.g(x, t) * Complex::from_polar(1.0, 1.3 * t);
            let fx = |t: f64| k.g_x(x, t) * Complex::from_polar(1.0, 1.3 * t);
            let (q, qd) = if x > a && x < b {
                (
                    integrate_complex(f, a, x, 1e-13) + integrate_complex(f, x, b, 1e-13),
                    integrate_complex(fx, a, x, 1e-13) + integrate_complex(fx, x, b, 1e-13),
                )
            } else {
                (integrate_complex(f, a, b, 1e-13), integrate_complex(fx, a, b, 1e-13))
            };
            assert!((v - q).norm() / q.norm() < 1e-9);
            assert!((d - qd).norm() / qd.norm() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn eshelby_ode_residual_inside(t in 0.01f64..0.99, omega in 0.05f64..20.0) {
            let k = med().at(omega).unwrap();
            let (a, b) = (-0.2, 0.35);
            let x = a + t * (b - a);
            let res = k.l_xx(a, b, x) * k.conductivity
                + k.l(a, b, x) * Complex::new(0.0, omega * k.capacity);
            prop_assert!((res + 1.0).norm() < 1e-10);
        }

        #[test]
        fn s_tensor_is_difference_of_greens(t in -1.0f64..1.0) {
            // -Kc L_x = Kc [G(x, b) - G(x, a)]
            let k = med().at(0.9).unwrap();
            let (a, b) = (-0.2, 0.35);
            let s = -k.l_x(a, b, t) * k.conductivity;
            let alt = (k.g(t, b) - k.g(t, a)) * k.conductivity;
            prop_assert!((s - alt).norm() < 1e-12);
        }
    }
}
