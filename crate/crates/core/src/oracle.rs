//! Reference numerics that share no code path with the closed-form solvers:
//! adaptive Gauss–Kronrod quadrature, RK4 integration of the heat equation,
//! a Monte-Carlo style ensemble Green's function built from numerically
//! integrated monodromy matrices, and a brute-force Fourier transform.
//!
//! These run in `f64` only; they are used by the test suites and by the
//! `validate` command.

use crate::exact::{FloquetBasis, FloquetSign};
use crate::laminate::{capacity_point, material_at, Realization, UnitCell, WeightSpec};
use num_complex::Complex64 as C64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

fn adapt<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, whole: C64, err: f64, tol: f64, depth: u32) -> C64 {
    if err <= tol.max(1e-300) || depth == 0 {
        return whole;
    }
    let m = 0.5 * (a + b);
    let (l, el) = gk15(f, a, m);
    let (r, er) = gk15(f, m, b);
    if (l + r - whole).norm() <= tol * 1e-2 && el + er <= tol {
        return l + r;
    }
    adapt(f, a, m, l, el, 0.5 * tol, depth - 1) + adapt(f, m, b, r, er, 0.5 * tol, depth - 1)
}

/// Adaptive G7/K15 quadrature of a complex integrand to relative tolerance `rtol`.
pub fn integrate_complex<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, rtol: f64) -> C64 {
    if b == a {
        return C64::new(0.0, 0.0);
    }
    let (whole, err) = gk15(&f, a, b);
    let scale = whole.norm().max(1e-300);
    adapt(&f, a, b, whole, err, rtol * scale, 40)
}

/// State `(T, q)` of the harmonic heat equation with `q = -K T'`.
pub type HeatState = [C64; 2];

fn rhs(k: f64, c: f64, omega: f64, s: HeatState) -> HeatState {
    [-s[1] / k, C64::new(0.0, omega * c) * s[0]]
}

fn rk4_segment(k: f64, c: f64, omega: f64, mut s: HeatState, len: f64, steps: usize) -> HeatState {
    if len <= 0.0 {
        return s;
    }
    let h = len / steps as f64;
    for _ in 0..steps {
        let k1 = rhs(k, c, omega, s);
        let k2 = rhs(k, c, omega, [s[0] + k1[0] * (h / 2.0), s[1] + k1[1] * (h / 2.0)]);
        let k3 = rhs(k, c, omega, [s[0] + k2[0] * (h / 2.0), s[1] + k2[1] * (h / 2.0)]);
        let k4 = rhs(k, c, omega, [s[0] + k3[0] * h, s[1] + k3[1] * h]);
        s = [
            s[0] + (k1[0] + k2[0] * 2.0 + k3[0] * 2.0 + k4[0]) * (h / 6.0),
            s[1] + (k1[1] + k2[1] * 2.0 + k3[1] * 2.0 + k4[1]) * (h / 6.0),
        ];
    }
    s
}

/// Material breakpoints of realization `real` inside the open interval `(x0, x1)`.
fn breakpoints(cell: &UnitCell<f64>, real: &Realization<f64>, x0: f64, x1: f64) -> Vec<f64> {
    let a = cell.inclusion_half_width();
    let p = cell.period();
    let mut out = Vec::new();
    for base in [-a + real.y, a + real.y] {
        let mut t = base - ((base - x0) / p).floor() * p;
        while t < x1 {
            if t > x0 {
                out.push(t);
            }
            t += p;
        }
    }
    out.sort_by(|u, v| u.partial_cmp(v).unwrap());
    out
}

/// Point-capacity locations in `[x0, x1)`.
fn capacity_points(cell: &UnitCell<f64>, real: &Realization<f64>, x0: f64, x1: f64) -> Vec<f64> {
    if cell.point_capacity == 0.0 {
        return Vec::new();
    }
    let base = capacity_point(cell, real);
    let p = cell.period();
    let mut t = base - ((base - x0) / p).floor() * p;
    let mut out = Vec::new();
    while t < x1 {
        if t >= x0 {
            out.push(t);
        }
        t += p;
    }
    out
}

/// Integrates the homogeneous (`Q = 0`) equation from `x0` to `x1 > x0`
/// with RK4 at roughly `steps_per_unit` steps per unit length, applying the
/// flux jump `q+ - q- = i omega H T` at each point capacity.
pub fn propagate(
    cell: &UnitCell<f64>,
    real: &Realization<f64>,
    omega: f64,
    x0: f64,
    x1: f64,
    state: HeatState,
    steps_per_unit: usize,
) -> HeatState {
    let mut cuts = breakpoints(cell, real, x0, x1);
    let caps = capacity_points(cell, real, x0, x1);
    cuts.extend(caps.iter().copied().filter(|&c| c > x0));
    cuts.push(x1);
    cuts.sort_by(|u, v| u.partial_cmp(v).unwrap());
    cuts.dedup();
    let mut s = state;
    let mut x = x0;
    for &cut in &cuts {
        if caps.iter().any(|&c| c == x) {
            s[1] += C64::new(0.0, omega * cell.point_capacity) * s[0];
        }
        if cut > x {
            let m = material_at(cell, real, 0.5 * (x + cut));
            let steps = ((cut - x) * steps_per_unit as f64).ceil().max(4.0) as usize;
            s = rk4_segment(m.conductivity, m.capacity, omega, s, cut - x, steps);
            x = cut;
        }
    }
    s
}

/// Transfer matrix of the reference cell over `[-L, L)` by RK4 (columns are
/// the images of the unit states). The capacity at the window start is
/// applied, the one at its end is not.
pub fn transfer_matrix_ode(cell: &UnitCell<f64>, omega: f64, steps_per_unit: usize) -> [[C64; 2]; 2] {
    let r = Realization::reference();
    let l = cell.half_length;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let c0 = propagate(cell, &r, omega, -l, l, [one, zero], steps_per_unit);
    let c1 = propagate(cell, &r, omega, -l, l, [zero, one], steps_per_unit);
    [[c0[0], c1[0]], [c0[1], c1[1]]]
}

/// Fundamental matrices `Φ(x)` (columns: images of the unit states at `-L`)
/// at each of the ascending `points` in `[-L, L]`.
fn fundamental_at(
    cell: &UnitCell<f64>,
    real: &Realization<f64>,
    omega: f64,
    points: &[f64],
    steps_per_unit: usize,
) -> Vec<[HeatState; 2]> {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut cols = [[one, zero], [zero, one]];
    let mut x = -cell.half_length;
    let mut out = Vec::with_capacity(points.len());
    for &t in points {
        if t > x {
            for c in cols.iter_mut() {
                *c = propagate(cell, real, omega, x, t, *c, steps_per_unit);
            }
            x = t;
        }
        out.push(cols);
    }
    out
}

/// Green's functions `G_Y(x, x')` of one realization at several point pairs,
/// from the eigenvectors of an RK4 monodromy matrix. Points lie in `[-L, L)`.
pub fn realization_green(
    cell: &UnitCell<f64>,
    real: &Realization<f64>,
    omega: f64,
    pairs: &[(f64, f64)],
    steps_per_unit: usize,
) -> Vec<C64> {
    let mut pts: Vec<f64> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    pts.push(cell.half_length);
    pts.sort_by(|u, v| u.partial_cmp(v).unwrap());
    pts.dedup();
    let phis = fundamental_at(cell, real, omega, &pts, steps_per_unit);
    let monodromy = phis[phis.len() - 1];
    let (a, b, c, d) = (monodromy[0][0], monodromy[1][0], monodromy[0][1], monodromy[1][1]);
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - det * 4.0).sqrt();
    let l1 = (tr + disc) / 2.0;
    let l2 = (tr - disc) / 2.0;
    let (small, big) = if l1.norm() < l2.norm() { (l1, l2) } else { (l2, l1) };
    let eigvec = |lam: C64| -> HeatState {
        if b.norm() > c.norm() {
            [b, lam - a]
        } else {
            [lam - d, c]
        }
    };
    // Right-decaying solution: monodromy eigenvalue of modulus < 1.
    let vr = eigvec(small);
    let vl = eigvec(big);
    let at = |v: HeatState, x: f64| -> HeatState {
        let i = pts.iter().position(|&t| t == x).expect("sampled point");
        let phi = phis[i];
        [
            phi[0][0] * v[0] + phi[1][0] * v[1],
            phi[0][1] * v[0] + phi[1][1] * v[1],
        ]
    };
    pairs
        .iter()
        .map(|&(x, xp)| {
            let (lo, hi) = if x <= xp { (x, xp) } else { (xp, x) };
            let ul_p = at(vl, xp);
            let ur_p = at(vr, xp);
            let w = ur_p[1] * ul_p[0] - ul_p[1] * ur_p[0];
            at(vl, lo)[0] * at(vr, hi)[0] / w
        })
        .collect()
}

/// Ensemble average of `G_Y(x, x')` over `ny` uniformly spaced realizations.
pub fn ensemble_green_ode(
    cell: &UnitCell<f64>,
    omega: f64,
    pairs: &[(f64, f64)],
    ny: usize,
    steps_per_unit: usize,
) -> Vec<C64> {
    let mut acc = vec![C64::new(0.0, 0.0); pairs.len()];
    for r in Realization::uniform_ensemble(cell, ny) {
        for (a, g) in acc.iter_mut().zip(realization_green(cell, &r, omega, pairs, steps_per_unit)) {
            *a += g;
        }
    }
    acc.into_iter().map(|a| a / ny as f64).collect()
}

/// `∫_{-R}^{R} f(r) e^{-i kappa r} dr` by composite Simpson on each half line,
/// `n` (even) panels per half.
pub fn dense_fourier_transform<F: Fn(f64) -> C64>(f: F, kappa: f64, r_max: f64, n: usize) -> C64 {
    let n = n + n % 2;
    let h = r_max / n as f64;
    let half = |sign: f64| -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for i in 0..=n {
            let r = sign * i as f64 * h;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            // Evaluate just inside the half line so side-dependent kernels pick the right branch.
            let re = if i == 0 { sign * 1e-300 } else { r };
            s += f(re) * C64::from_polar(1.0, -kappa * r) * w;
        }
        s * (h / 3.0)
    };
    half(1.0) + half(-1.0)
}

/// Piecewise-smooth breakpoints of the reference window.
fn window_breakpoints(c: &UnitCell<f64>) -> [f64; 5] {
    let a = c.inclusion_half_width();
    [-c.half_length, -a, c.base_capacity_position(), a, c.half_length]
}

/// `[a_m, a^w_m, b_m, c_m]` of one Floquet branch by adaptive quadrature
/// over the smooth pieces of the reference window.
pub fn quadrature_coefficients(
    basis: &FloquetBasis<f64>,
    sign: FloquetSign,
    weight: &WeightSpec<f64>,
    m: i64,
) -> [C64; 4] {
    let c = &basis.cell;
    let l = c.half_length;
    let mu_s = basis.coefficients(sign).mu;
    let sigma = -mu_s + C64::new(0.0, m as f64 * std::f64::consts::PI / l);
    let real = Realization::reference();
    let bp = window_breakpoints(c);
    let mut out = [C64::new(0.0, 0.0); 4];
    for w in bp.windows(2) {
        // Sample strictly inside the segment so branch selection is unambiguous.
        let (lo, hi) = (w[0], w[1]);
        let mid = 0.5 * (lo + hi);
        let cap = material_at(c, &real, mid).capacity;
        let e = |x: f64| (sigma * x).exp() / (2.0 * l);
        out[0] += integrate_complex(|x| e(x) * basis.phi(sign, x).0, lo, hi, 1e-13);
        out[1] += integrate_complex(
            |x| e(x) * basis.phi(sign, x).0 * weight.multiplier(c, &real, x).unwrap(),
            lo,
            hi,
            1e-13,
        );
        out[2] += integrate_complex(
            |x| {
                let (_, d, k) = basis.phi(sign, x);
                -e(x) * d * k
            },
            lo,
            hi,
            1e-13,
        );
        out[3] += integrate_complex(|x| e(x) * basis.phi(sign, x).0 * cap, lo, hi, 1e-13);
    }
    let p = c.base_capacity_position();
    out[3] += basis.phi(sign, p).0 * (sigma * p).exp() * c.point_capacity / (2.0 * l);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_kronrod_integrates_oscillatory_exponential() {
        let v = integrate_complex(|x| C64::new(0.0, 3.0 * x).exp(), 0.0, 2.0, 1e-13);
        let exact = (C64::new(0.0, 6.0).exp() - 1.0) / C64::new(0.0, 3.0);
        assert!((v - exact).norm() < 1e-13);
    }

    #[test]
    fn rk4_homogeneous_slab_matches_closed_form() {
        let cell = UnitCell::homogeneous(1.0, 1.0, 1.0);
        let omega = 2.0;
        let m = transfer_matrix_ode(&cell, omega, 2000);
        let k = C64::new(0.0, -omega).sqrt();
        assert!((m[0][0] - (k * 2.0).cosh()).norm() < 1e-10);
    }

    #[test]
    fn homogeneous_green_matches_free_space() {
        let cell = UnitCell::homogeneous(1.0, 1.0, 0.5);
        let omega = 3.0;
        let g = realization_green(&cell, &Realization::reference(), omega, &[(-0.3, 0.5)], 2000)[0];
        let gamma = C64::new(1.0, 1.0) * (omega * 0.5_f64).sqrt() / 2f64.sqrt();
        let exact = C64::new(0.0, 1.0) / (gamma * 2.0) * (C64::new(0.0, 0.8) * gamma).exp();
        assert!((g - exact).norm() / exact.norm() < 1e-9);
    }

    #[test]
    fn fourier_transform_of_two_sided_exponential() {
        let beta = C64::new(1.5, -0.4);
        let v = dense_fourier_transform(|r| (-beta * r.abs()).exp(), 0.7, 40.0, 40_000);
        let exact = beta * 2.0 / (beta * beta + 0.49);
        assert!((v - exact).norm() / exact.norm() < 1e-8);
    }
}
