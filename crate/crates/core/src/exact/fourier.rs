//! Fourier coefficients of the periodic parts of `φ±`, their fluxes and
//! heat contents, evaluated by exact integration of each exponential term.

use super::floquet::{Branch, FloquetBasis, FloquetSign};
use crate::error::Result;
use crate::laminate::{PhaseId, Realization, WeightSpec};
use crate::quadrature::gauss_legendre;
use crate::scalar::{exp_segment_integral, imag_unit, re, Cx, Real};

/// Coefficient arrays indexed by `m + M` for `m = -M..=M`.
///
/// With `σ = ∓mu + i m pi / L` and `φ = φ±`:
/// `a_m = (1/2L) ∫ e^{σx} φ`, `a^w_m = (1/2L) ∫ e^{σx} w φ`,
/// `b_m = (1/2L) ∫ -K e^{σx} φ'`,
/// `c_m = (1/2L) ∫ C e^{σx} φ + H φ(p) e^{σp} / (2L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierKernelSeries<T> {
    pub m_max: usize,
    pub a_plus: Vec<Cx<T>>,
    pub a_minus: Vec<Cx<T>>,
    pub aw_plus: Vec<Cx<T>>,
    pub aw_minus: Vec<Cx<T>>,
    pub b_plus: Vec<Cx<T>>,
    pub b_minus: Vec<Cx<T>>,
    pub c_plus: Vec<Cx<T>>,
    pub c_minus: Vec<Cx<T>>,
    /// `β_m = mu - i m pi / L`.
    pub beta: Vec<Cx<T>>,
}

impl<T: Real> FourierKernelSeries<T> {
    pub fn len(&self) -> usize {
        2 * self.m_max + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Array index of mode `m`.
    pub fn idx(&self, m: i64) -> usize {
        (m + self.m_max as i64) as usize
    }

    /// Array index of mode `-m` given the index of `m`.
    pub fn mirror(&self, i: usize) -> usize {
        2 * self.m_max - i
    }

    pub fn mode(&self, i: usize) -> i64 {
        i as i64 - self.m_max as i64
    }
}

/// Multiplier of the weight on a branch, if constant there.
fn branch_multiplier<T: Real>(
    weight: &WeightSpec<T>,
    cell_fraction: impl Fn(PhaseId) -> T,
    br: &Branch<T>,
) -> Option<Cx<T>> {
    match weight {
        WeightSpec::Uniform | WeightSpec::Dephased => Some(re(T::one())),
        WeightSpec::PhaseMasked(id) => {
            let here = if br.in_phase1 { PhaseId::One } else { PhaseId::Two };
            Some(if here == *id {
                re(T::one() / cell_fraction(*id))
            } else {
                re(T::zero())
            })
        }
        WeightSpec::Custom(_) => None,
    }
}

/// `(1/2L) ∫_branch e^{σx} φ` and `(1/2L) ∫_branch e^{σx} φ'`.
fn branch_integrals<T: Real>(br: &Branch<T>, sigma: Cx<T>, inv_2l: T) -> (Cx<T>, Cx<T>) {
    let mut v = re(T::zero());
    let mut d = re(T::zero());
    for t in &br.terms {
        let i = t.coef
            * (sigma * t.anchor).exp()
            * exp_segment_integral(t.lambda + sigma, t.anchor, br.lo, br.hi);
        v += i;
        d += i * t.lambda;
    }
    (v * inv_2l, d * inv_2l)
}

const CUSTOM_PANELS: usize = 64;
const CUSTOM_ORDER: usize = 16;

fn weighted_branch_integral<T: Real>(
    basis: &FloquetBasis<T>,
    sign: FloquetSign,
    weight: &WeightSpec<T>,
    br: &Branch<T>,
    sigma: Cx<T>,
    inv_2l: T,
) -> Result<Cx<T>> {
    let len = br.hi - br.lo;
    if !(len > T::zero()) {
        return Ok(re(T::zero()));
    }
    let (nodes, weights) = gauss_legendre::<T>(CUSTOM_ORDER);
    let h = len / T::lit(CUSTOM_PANELS as f64);
    let half = h * T::lit(0.5);
    let reference = Realization::reference();
    let mut acc = re(T::zero());
    for k in 0..CUSTOM_PANELS {
        let mid = br.lo + (T::lit(k as f64) + T::lit(0.5)) * h;
        for (t, w) in nodes.iter().zip(&weights) {
            let x = mid + *t * half;
            let f = weight.multiplier(&basis.cell, &reference, x)?;
            acc += (sigma * x).exp() * basis.phi(sign, x).0 * f * (*w * half);
        }
    }
    Ok(acc * inv_2l)
}

fn coefficient_arrays<T: Real>(
    basis: &FloquetBasis<T>,
    sign: FloquetSign,
    weight: &WeightSpec<T>,
    m_max: usize,
) -> Result<[Vec<Cx<T>>; 4]> {
    let cell = &basis.cell;
    let l = cell.half_length;
    let inv_2l = T::one() / cell.period();
    let mu_s = basis.coefficients(sign).mu;
    let p = cell.base_capacity_position();
    let phi_p = basis.phi(sign, p).0;
    let brs = basis.branches(sign);
    let n = 2 * m_max + 1;
    let (mut a, mut aw, mut b, mut c) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    for i in 0..n {
        let m = i as i64 - m_max as i64;
        let sigma = -mu_s + imag_unit::<T>() * (T::lit(m as f64) * T::PI() / l);
        let (mut am, mut awm, mut bm, mut cm) = (re(T::zero()), re(T::zero()), re(T::zero()), re(T::zero()));
        for br in &brs {
            let (v, d) = branch_integrals(br, sigma, inv_2l);
            am += v;
            bm -= d * br.conductivity;
            cm += v * br.capacity;
            awm += match branch_multiplier(weight, |id| cell.fraction(id), br) {
                Some(f) => v * f,
                None => weighted_branch_integral(basis, sign, weight, br, sigma, inv_2l)?,
            };
        }
        cm += phi_p * (sigma * p).exp() * (cell.point_capacity * inv_2l);
        a.push(am);
        aw.push(awm);
        b.push(bm);
        c.push(cm);
    }
    Ok([a, aw, b, c])
}

/// Coefficient arrays for `m = -M..=M` under `weight`.
pub fn fourier_coefficients<T: Real>(
    basis: &FloquetBasis<T>,
    weight: &WeightSpec<T>,
    m_max: usize,
) -> Result<FourierKernelSeries<T>> {
    let [a_plus, aw_plus, b_plus, c_plus] = coefficient_arrays(basis, FloquetSign::Plus, weight, m_max)?;
    let [a_minus, aw_minus, b_minus, c_minus] =
        coefficient_arrays(basis, FloquetSign::Minus, weight, m_max)?;
    let mu = basis.mu();
    let l = basis.cell.half_length;
    let beta = (0..(2 * m_max + 1))
        .map(|i| {
            let m = i as i64 - m_max as i64;
            mu - imag_unit::<T>() * (T::lit(m as f64) * T::PI() / l)
        })
        .collect();
    Ok(FourierKernelSeries {
        m_max,
        a_plus,
        a_minus,
        aw_plus,
        aw_minus,
        b_plus,
        b_minus,
        c_plus,
        c_minus,
        beta,
    })
}
