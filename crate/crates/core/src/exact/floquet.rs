//! Transfer matrix, Floquet number and the decaying Floquet solutions `φ±`
//! of the source-free cell equation `(K φ')' + i omega C φ = 0` with the
//! point-capacity jump.

use crate::error::{Error, Result};
use crate::laminate::UnitCell;
use crate::linalg::{solve_dense, DenseMatrix};
use crate::scalar::{cx, exprel, imag_unit, re, Cx, Real};
use num_complex::Complex;

/// 2×2 complex matrix acting on the state `(T, q)`.
pub type Mat2<T> = [[Cx<T>; 2]; 2];

pub fn mat2_mul<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    let mut out = [[Complex::new(T::zero(), T::zero()); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat2_det<T: Real>(m: &Mat2<T>) -> Cx<T> {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Phase wavenumber `k = (1 - i)/sqrt(2) sqrt(omega C / K)`, so `k^2 = -i omega C / K`.
pub fn phase_wavenumber<T: Real>(omega: T, conductivity: T, capacity: T) -> Cx<T> {
    let s = (omega * capacity / conductivity).sqrt() * T::FRAC_1_SQRT_2();
    cx(s, -s)
}

/// `sinh(z) / z`.
fn sinhc<T: Real>(z: Cx<T>) -> Cx<T> {
    (exprel(z) + exprel(-z)) * T::lit(0.5)
}

/// Propagates `(T, q)` across a homogeneous layer of length `len`.
pub fn layer_matrix<T: Real>(k: Cx<T>, conductivity: T, len: T) -> Mat2<T> {
    let z = k * len;
    let ch = z.cosh();
    let sc = sinhc(z);
    [
        [ch, -sc * (len / conductivity)],
        [-k * k * sc * (conductivity * len), ch],
    ]
}

/// Flux jump `q+ = q- + i omega H T`.
pub fn jump_matrix<T: Real>(omega: T, h: T) -> Mat2<T> {
    let one = re(T::one());
    let zero = re(T::zero());
    [[one, zero], [imag_unit::<T>() * (omega * h), one]]
}

/// Transfer matrix of the reference cell from `x = -L` to `x = L`. At
/// `omega = 0` the layer matrices reduce to the static ones.
pub fn unit_cell_transfer_matrix<T: Real>(cell: &UnitCell<T>, omega: T) -> Result<Mat2<T>> {
    cell.validate()?;
    if !(omega >= T::zero()) {
        return Err(Error::InvalidArgument("omega must be non-negative".into()));
    }
    let l = cell.half_length;
    let a = cell.inclusion_half_width();
    let p = cell.base_capacity_position();
    let (p1, p2) = (cell.phase1, cell.phase2);
    let k1 = phase_wavenumber(omega, p1.conductivity, p1.capacity);
    let k2 = phase_wavenumber(omega, p2.conductivity, p2.capacity);
    let steps = [
        layer_matrix(k2, p2.conductivity, l - a),
        layer_matrix(k1, p1.conductivity, p + a),
        jump_matrix(omega, cell.point_capacity),
        layer_matrix(k1, p1.conductivity, a - p),
        layer_matrix(k2, p2.conductivity, l - a),
    ];
    let mut m = steps[0];
    for s in &steps[1..] {
        m = mat2_mul(s, &m);
    }
    Ok(m)
}

/// Floquet number with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloquetNumber<T> {
    /// `mu` with `Re mu > 0`; transfer-matrix eigenvalues are `exp(±2 mu L)`.
    pub mu: Cx<T>,
    pub trace: Cx<T>,
    /// `|2 cosh(2 mu L) - trace|`.
    pub dispersion_residual: T,
}

/// Solves `cosh(2 mu L) = trace / 2` for the decaying Floquet number.
pub fn solve_floquet<T: Real>(cell: &UnitCell<T>, omega: T) -> Result<FloquetNumber<T>> {
    if !(omega > T::zero()) {
        return Err(Error::InvalidArgument(
            "Floquet number requires omega > 0".into(),
        ));
    }
    let m = unit_cell_transfer_matrix(cell, omega)?;
    let trace = m[0][0] + m[1][1];
    let half = trace * T::lit(0.5);
    if (half * half - T::one()).norm() < T::epsilon() * T::lit(16.0) {
        return Err(Error::ExceptionalPoint {
            half_trace_re: half.re.to_f64_lossy(),
            half_trace_im: half.im.to_f64_lossy(),
        });
    }
    let two_l = cell.period();
    let mut mu = half.acosh() / two_l;
    if mu.re < T::zero() {
        mu = -mu;
    }
    let dispersion_residual = ((mu * two_l).cosh() * T::lit(2.0) - trace).norm();
    Ok(FloquetNumber {
        mu,
        trace,
        dispersion_residual,
    })
}

/// Coefficients of the four branches of `φ` for one sign of `mu`:
///
/// - `[-L, -c1 L)`: `e^{-mu L} (A cosh k2(L+x) + B sinh k2(L+x))`
/// - `[-c1 L, p)`: `cosh k1 x + b sinh k1 x`
/// - `[p, c1 L)`: `c cosh k1 x + d sinh k1 x`
/// - `[c1 L, L]`: `e^{mu L} (A cosh k2(L-x) - B sinh k2(L-x))`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchCoefficients<T> {
    pub mu: Cx<T>,
    pub big_a: Cx<T>,
    pub big_b: Cx<T>,
    pub b: Cx<T>,
    pub c: Cx<T>,
    pub d: Cx<T>,
    /// Residuals of the six interface conditions, each scaled by the
    /// magnitude of its terms.
    pub residuals: [T; 6],
}

impl<T: Real> BranchCoefficients<T> {
    pub fn max_residual(&self) -> T {
        self.residuals.iter().copied().fold(T::zero(), T::max)
    }
}

fn cosh_sinh<T: Real>(z: Cx<T>) -> (Cx<T>, Cx<T>) {
    (z.cosh(), z.sinh())
}

/// Solves the interface system for the branch coefficients of `φ` with
/// Floquet exponent `mu_signed` (either `+mu` or `-mu`).
pub fn branch_coefficients<T: Real>(
    cell: &UnitCell<T>,
    omega: T,
    mu_signed: Cx<T>,
) -> Result<BranchCoefficients<T>> {
    let l = cell.half_length;
    let a = cell.inclusion_half_width();
    let p = cell.base_capacity_position();
    let (kk1, kk2) = (cell.phase1.conductivity, cell.phase2.conductivity);
    let k1 = phase_wavenumber(omega, kk1, cell.phase1.capacity);
    let k2 = phase_wavenumber(omega, kk2, cell.phase2.capacity);
    let iwh = imag_unit::<T>() * (omega * cell.point_capacity);
    let em = (-mu_signed * l).exp();
    let ep = (mu_signed * l).exp();
    let zero = re(T::zero());

    let (c2l, s2l) = cosh_sinh(k2 * (l - a)); // k2 (L + x) at x = -a and k2 (L - x) at x = a
    let (c1a, s1a) = cosh_sinh(k1 * a);
    let (c1p, s1p) = cosh_sinh(k1 * p);

    // Unknowns (A, B, b, c, d); cosh(-z) = cosh z, sinh(-z) = -sinh z.
    let rows = vec![
        // T continuity at -a: branch1 - branch2 = 0
        vec![em * c2l, em * s2l, s1a, zero, zero],
        // flux continuity at -a: K2 branch1' - K1 branch2' = 0
        vec![em * k2 * s2l * kk2, em * k2 * c2l * kk2, -k1 * c1a * kk1, zero, zero],
        // T continuity at p
        vec![zero, zero, s1p, -c1p, -s1p],
        // jump at p: K1 (branch3' - branch2') + i omega H branch2 = 0
        vec![
            zero,
            zero,
            -k1 * c1p * kk1 + iwh * s1p,
            k1 * s1p * kk1,
            k1 * c1p * kk1,
        ],
        // T continuity at a
        vec![-ep * c2l, ep * s2l, zero, c1a, s1a],
    ];
    let rhs = vec![
        c1a,
        -k1 * s1a * kk1,
        -c1p,
        k1 * s1p * kk1 - iwh * c1p,
        zero,
    ];
    let (x, _, _) = solve_dense(&DenseMatrix::from_rows(rows), &rhs).map_err(|e| {
        Error::DegenerateBasis {
            omega: omega.to_f64_lossy(),
            reason: e.to_string(),
        }
    })?;
    let (big_a, big_b, b, c, d) = (x[0], x[1], x[2], x[3], x[4]);

    let rel = |u: Cx<T>, v: Cx<T>| (u - v).norm() / u.norm().max(v.norm()).max(T::min_positive_value());
    let br1 = em * (big_a * c2l + big_b * s2l);
    let br1_d = em * k2 * (big_a * s2l + big_b * c2l);
    let br2_a = c1a - b * s1a;
    let br2_a_d = k1 * (-s1a + b * c1a);
    let br2_p = c1p + b * s1p;
    let br2_p_d = k1 * (s1p + b * c1p);
    let br3_p = c * c1p + d * s1p;
    let br3_p_d = k1 * (c * s1p + d * c1p);
    let br3_a = c * c1a + d * s1a;
    let br3_a_d = k1 * (c * s1a + d * c1a);
    let br4 = ep * (big_a * c2l - big_b * s2l);
    let br4_d = -ep * k2 * (big_a * s2l - big_b * c2l);
    let jump_terms = (br3_p_d - br2_p_d) * kk1;
    let residuals = [
        rel(br1, br2_a),
        rel(br1_d * kk2, br2_a_d * kk1),
        rel(br2_p, br3_p),
        (jump_terms + iwh * br2_p).norm()
            / (jump_terms.norm().max((iwh * br2_p).norm())).max(br2_p_d.norm() * kk1).max(T::min_positive_value()),
        rel(br3_a, br4),
        rel(br3_a_d * kk1, br4_d * kk2),
    ];
    Ok(BranchCoefficients {
        mu: mu_signed,
        big_a,
        big_b,
        b,
        c,
        d,
        residuals,
    })
}

/// One term `coef · exp(lambda (x - anchor))` of a branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ExpTerm<T> {
    pub coef: Cx<T>,
    pub lambda: Cx<T>,
    pub anchor: T,
}

/// A branch of `φ` on `[lo, hi)` with its phase properties.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Branch<T> {
    pub lo: T,
    pub hi: T,
    pub conductivity: T,
    pub capacity: T,
    pub in_phase1: bool,
    pub terms: [ExpTerm<T>; 2],
}

/// Floquet basis `φ± = e^{±mu x} ψ±` and normalization `D` of the
/// microstructure Green's function.
#[derive(Debug, Clone, PartialEq)]
pub struct FloquetBasis<T> {
    pub cell: UnitCell<T>,
    pub omega: T,
    pub floquet: FloquetNumber<T>,
    pub k1: Cx<T>,
    pub k2: Cx<T>,
    pub plus: BranchCoefficients<T>,
    pub minus: BranchCoefficients<T>,
    /// `D = 1 / (K (φ+' φ- - φ+ φ-'))`.
    pub d: Cx<T>,
}

/// Sign selector for `φ+` / `φ-`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FloquetSign {
    Plus,
    Minus,
}

impl<T: Real> FloquetBasis<T> {
    pub fn new(cell: &UnitCell<T>, omega: T) -> Result<Self> {
        let floquet = solve_floquet(cell, omega)?;
        let mu = floquet.mu;
        let plus = branch_coefficients(cell, omega, mu)?;
        let minus = branch_coefficients(cell, omega, -mu)?;
        let mut basis = Self {
            cell: *cell,
            omega,
            floquet,
            k1: phase_wavenumber(omega, cell.phase1.conductivity, cell.phase1.capacity),
            k2: phase_wavenumber(omega, cell.phase2.conductivity, cell.phase2.capacity),
            plus,
            minus,
            d: re(T::zero()),
        };
        basis.d = normalization_d(&basis)?;
        Ok(basis)
    }

    pub fn mu(&self) -> Cx<T> {
        self.floquet.mu
    }

    pub fn coefficients(&self, sign: FloquetSign) -> &BranchCoefficients<T> {
        match sign {
            FloquetSign::Plus => &self.plus,
            FloquetSign::Minus => &self.minus,
        }
    }

    pub(crate) fn branches(&self, sign: FloquetSign) -> [Branch<T>; 4] {
        let co = self.coefficients(sign);
        let cell = &self.cell;
        let l = cell.half_length;
        let a = cell.inclusion_half_width();
        let p = cell.base_capacity_position();
        let half = T::lit(0.5);
        let em = (-co.mu * l).exp();
        let ep = (co.mu * l).exp();
        let (k1, k2) = (self.k1, self.k2);
        let (ph1, ph2) = (cell.phase1, cell.phase2);
        let term = |coef, lambda, anchor| ExpTerm {
            coef,
            lambda,
            anchor,
        };
        let one = re(T::one());
        [
            Branch {
                lo: -l,
                hi: -a,
                conductivity: ph2.conductivity,
                capacity: ph2.capacity,
                in_phase1: false,
                terms: [
                    term(em * (co.big_a + co.big_b) * half, k2, -l),
                    term(em * (co.big_a - co.big_b) * half, -k2, -l),
                ],
            },
            Branch {
                lo: -a,
                hi: p,
                conductivity: ph1.conductivity,
                capacity: ph1.capacity,
                in_phase1: true,
                terms: [
                    term((one + co.b) * half, k1, T::zero()),
                    term((one - co.b) * half, -k1, T::zero()),
                ],
            },
            Branch {
                lo: p,
                hi: a,
                conductivity: ph1.conductivity,
                capacity: ph1.capacity,
                in_phase1: true,
                terms: [
                    term((co.c + co.d) * half, k1, T::zero()),
                    term((co.c - co.d) * half, -k1, T::zero()),
                ],
            },
            Branch {
                lo: a,
                hi: l,
                conductivity: ph2.conductivity,
                capacity: ph2.capacity,
                in_phase1: false,
                terms: [
                    term(ep * (co.big_a - co.big_b) * half, -k2, l),
                    term(ep * (co.big_a + co.big_b) * half, k2, l),
                ],
            },
        ]
    }

    fn branch_index(&self, x: T) -> usize {
        let a = self.cell.inclusion_half_width();
        let p = self.cell.base_capacity_position();
        if x < -a {
            0
        } else if x < p {
            1
        } else if x < a {
            2
        } else {
            3
        }
    }

    /// `(φ(x), φ'(x), K(x))` for `x` in the reference window `[-L, L]`
    /// (right-hand limits at branch points).
    pub fn phi(&self, sign: FloquetSign, x: T) -> (Cx<T>, Cx<T>, T) {
        let br = self.branches(sign)[self.branch_index(x)];
        let mut v = re(T::zero());
        let mut dv = re(T::zero());
        for t in &br.terms {
            let e = t.coef * (t.lambda * (x - t.anchor)).exp();
            v += e;
            dv += e * t.lambda;
        }
        (v, dv, br.conductivity)
    }

    /// Left-hand limit of `φ` at `x`.
    pub fn phi_left(&self, sign: FloquetSign, x: T) -> (Cx<T>, Cx<T>, T) {
        let idx = self.branch_index(x);
        let brs = self.branches(sign);
        // Step back to the branch that ends at x when x is a branch start.
        let i = (0..=idx).rev().find(|&i| brs[i].lo < x).unwrap_or(idx);
        let br = brs[i];
        let mut v = re(T::zero());
        let mut dv = re(T::zero());
        for t in &br.terms {
            let e = t.coef * (t.lambda * (x - t.anchor)).exp();
            v += e;
            dv += e * t.lambda;
        }
        (v, dv, br.conductivity)
    }

    /// `D` evaluated from the Wronskian at `x`.
    pub fn wronskian_d_at(&self, x: T) -> Cx<T> {
        let (vp, dp, k) = self.phi(FloquetSign::Plus, x);
        let (vm, dm, _) = self.phi(FloquetSign::Minus, x);
        re(T::one()) / ((dp * vm - vp * dm) * k)
    }

    /// Single-realization Green's function `G_0(x, x')` for `x, x'` in the
    /// reference window: `D φ-(x>) φ+(x<)`.
    pub fn green(&self, x: T, xp: T) -> Cx<T> {
        let (lo, hi) = if x <= xp { (x, xp) } else { (xp, x) };
        self.d * self.phi(FloquetSign::Minus, hi).0 * self.phi(FloquetSign::Plus, lo).0
    }
}

/// `D` from the Wronskian at a phase-1 interior reference point.
pub fn normalization_d<T: Real>(basis: &FloquetBasis<T>) -> Result<Cx<T>> {
    let a = basis.cell.inclusion_half_width();
    let p = basis.cell.base_capacity_position();
    let x_ref = if p + a > a - p {
        (p - a) * T::lit(0.5)
    } else {
        (p + a) * T::lit(0.5)
    };
    let (vp, dp, k) = basis.phi(FloquetSign::Plus, x_ref);
    let (vm, dm, _) = basis.phi(FloquetSign::Minus, x_ref);
    let w = (dp * vm - vp * dm) * k;
    let scale = (dp * vm).norm().max((vp * dm).norm()) * k;
    if !(w.norm() > scale * T::lit(1e3) * T::epsilon()) {
        return Err(Error::DegenerateBasis {
            omega: basis.omega.to_f64_lossy(),
            reason: "Wronskian of φ± vanishes".into(),
        });
    }
    Ok(re(T::one()) / w)
}
