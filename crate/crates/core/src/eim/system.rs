//! Bloch-periodic boundary-integral system of the equivalent inclusion
//! method, its solution, and field reconstruction.
//!
//! Inside the cell the temperature is represented through the comparison
//! kernel `G`:
//! `T(x) = boundary terms + Σ Q*_I L_I(x) + R* G(x, p) + Σ Kc u*_I [G(x, b_I) - G(x, a_I)] + ∫ G Q`,
//! and the unknowns `(T^L, q^L, {Q*_I}, R*, {u*_I})` are fixed by the Bloch
//! conditions at both ends, the equivalent-inclusion conditions at element
//! centres, and the capacity condition `R* = i omega H T(p)`.

use super::mesh::EimMesh;
use super::source::SourceSpec;
use crate::error::{Error, Result};
use crate::greens::{ComparisonKernel, ComparisonMedium};
use crate::laminate::{capacity_point, material_at, Realization, UnitCell, WeightSpec};
use crate::linalg::{solve_dense, DenseMatrix};
use crate::scalar::{imag_unit, re, Cx, Real};

/// Mesh and comparison-medium knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EimOptions<T> {
    /// Nominal element count `N`.
    pub elements: usize,
    /// Field sampling points `NP` used for cell averages.
    pub sample_points: usize,
    /// Comparison medium; phase 1 when `None`.
    pub medium: Option<ComparisonMedium<T>>,
}

impl<T> Default for EimOptions<T> {
    fn default() -> Self {
        Self {
            elements: 200,
            sample_points: 400,
            medium: None,
        }
    }
}

/// Position of each unknown group in the solution vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownLayout {
    /// Elements carrying an eigen-heat-source (capacity mismatch).
    pub q_star: Vec<usize>,
    /// Elements carrying an eigen-temperature-gradient (conductivity mismatch).
    pub u_star: Vec<usize>,
}

impl UnknownLayout {
    pub const T_LEFT: usize = 0;
    pub const Q_LEFT: usize = 1;
    const Q_STAR: usize = 2;

    pub fn len(&self) -> usize {
        3 + self.q_star.len() + self.u_star.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn q_star_index(&self, j: usize) -> usize {
        Self::Q_STAR + j
    }

    pub fn r_star_index(&self) -> usize {
        Self::Q_STAR + self.q_star.len()
    }

    pub fn u_star_index(&self, j: usize) -> usize {
        self.r_star_index() + 1 + j
    }
}

/// One `(cell, Y, omega, zeta, source)` boundary-value problem.
#[derive(Debug, Clone, PartialEq)]
pub struct EimProblem<T> {
    pub cell: UnitCell<T>,
    pub realization: Realization<T>,
    pub omega: T,
    pub zeta: T,
    pub mesh: EimMesh<T>,
    pub source: SourceSpec<T>,
    pub kernel: ComparisonKernel<T>,
    pub layout: UnknownLayout,
    /// `p_Y`.
    pub capacity_point: T,
    /// Bloch factor `exp(2 i zeta L)`.
    pub bloch: Cx<T>,
    nodes: Vec<T>,
}

/// Representation coefficients at one point: the rows of `T` and `T,x`
/// against the unknowns, plus the source contributions.
struct Representation<T> {
    t: Vec<Cx<T>>,
    tx: Vec<Cx<T>>,
    src_t: Cx<T>,
    src_tx: Cx<T>,
    node_exp: Vec<Cx<T>>,
}

impl<T: Real> EimProblem<T> {
    pub fn new(
        cell: &UnitCell<T>,
        realization: &Realization<T>,
        omega: T,
        zeta: T,
        options: &EimOptions<T>,
        source: SourceSpec<T>,
    ) -> Result<Self> {
        cell.validate()?;
        source.validate()?;
        let medium = options.medium.unwrap_or_else(|| ComparisonMedium::phase1_of(cell));
        let kernel = medium.at(omega)?;
        let mesh = EimMesh::new(cell, realization, options.elements, options.sample_points)?;
        let mut layout = UnknownLayout {
            q_star: Vec::new(),
            u_star: Vec::new(),
        };
        for (i, e) in mesh.elements.iter().enumerate() {
            let ph = cell.phase(e.phase);
            if ph.capacity != medium.capacity {
                layout.q_star.push(i);
            }
            if ph.conductivity != medium.conductivity {
                layout.u_star.push(i);
            }
        }
        let mut nodes: Vec<T> = mesh.elements.iter().map(|e| e.a).collect();
        nodes.push(cell.half_length);
        Ok(Self {
            cell: *cell,
            realization: *realization,
            omega,
            zeta,
            source,
            kernel,
            layout,
            capacity_point: capacity_point(cell, realization),
            bloch: (imag_unit::<T>() * (zeta * cell.period())).exp(),
            mesh,
            nodes,
        })
    }

    fn buffers(&self) -> Representation<T> {
        let n = self.layout.len();
        Representation {
            t: vec![re(T::zero()); n],
            tx: vec![re(T::zero()); n],
            src_t: re(T::zero()),
            src_tx: re(T::zero()),
            node_exp: vec![re(T::zero()); self.nodes.len()],
        }
    }

    fn represent(&self, x: T, r: &mut Representation<T>) {
        let k = &self.kernel;
        let i = imag_unit::<T>();
        let ig = i * k.gamma;
        let c = k.prefactor;
        let half = T::lit(0.5);
        let inv_2k = T::one() / (k.conductivity + k.conductivity);
        let kc = k.conductivity;

        for (e, &node) in r.node_exp.iter_mut().zip(&self.nodes) {
            *e = (ig * (x - node).abs()).exp();
        }
        let ne = &r.node_exp;
        let e_l = ne[ne.len() - 1] * self.bloch; // e^{iγ(L-x)} ph
        let e_m = ne[0]; // e^{iγ(x+L)}
        r.t[UnknownLayout::T_LEFT] = (e_l + e_m) * half;
        r.tx[UnknownLayout::T_LEFT] = ig * (e_m - e_l) * half;
        r.t[UnknownLayout::Q_LEFT] = c * (e_m - e_l);
        r.tx[UnknownLayout::Q_LEFT] = -(e_m + e_l) * inv_2k;

        let f = re(T::one()) / (k.gamma * k.gamma * (kc + kc));
        let gx = |node: T, e: Cx<T>| -> Cx<T> {
            if x > node {
                -e * inv_2k
            } else if x < node {
                e * inv_2k
            } else {
                re(T::zero())
            }
        };
        for (j, &el) in self.layout.q_star.iter().enumerate() {
            let (a, b) = (self.nodes[el], self.nodes[el + 1]);
            let (ea, eb) = (ne[el], ne[el + 1]);
            let idx = self.layout.q_star_index(j);
            if x <= a {
                r.t[idx] = f * (eb - ea);
                r.tx[idx] = -f * ig * (eb - ea);
            } else if x >= b {
                r.t[idx] = f * (ea - eb);
                r.tx[idx] = f * ig * (ea - eb);
            } else {
                r.t[idx] = f * (ea + eb - T::lit(2.0));
                r.tx[idx] = f * ig * (ea - eb);
            }
        }
        let p = self.capacity_point;
        let ri = self.layout.r_star_index();
        r.t[ri] = k.g(x, p);
        r.tx[ri] = k.g_x(x, p);
        for (j, &el) in self.layout.u_star.iter().enumerate() {
            let (a, b) = (self.nodes[el], self.nodes[el + 1]);
            let (ea, eb) = (ne[el], ne[el + 1]);
            let idx = self.layout.u_star_index(j);
            r.t[idx] = c * (eb - ea) * kc;
            r.tx[idx] = (gx(b, eb) - gx(a, ea)) * kc;
        }
        let (mut st, mut stx) = (re(T::zero()), re(T::zero()));
        for term in &self.source.terms {
            if term.b > term.a {
                let (v, d) = k.plane_source_integral(term.kappa, term.a, term.b, x);
                st += term.amplitude * v;
                stx += term.amplitude * d;
            }
        }
        r.src_t = st;
        r.src_tx = stx;
    }
}

/// Dense system `F S = M Q`; `rhs` holds the assembled source column `M Q`.
#[derive(Debug, Clone)]
pub struct EimSystem<T> {
    pub matrix: DenseMatrix<T>,
    pub rhs: Vec<Cx<T>>,
}

pub fn assemble_system<T: Real>(problem: &EimProblem<T>) -> Result<EimSystem<T>> {
    let lay = &problem.layout;
    let n = lay.len();
    let mut matrix = DenseMatrix::zeros(n);
    let mut rhs = vec![re(T::zero()); n];
    let mut r = problem.buffers();
    let l = problem.cell.half_length;
    let iw = imag_unit::<T>() * problem.omega;
    let medium = (problem.kernel.conductivity, problem.kernel.capacity);

    // T(-L) = T^L.
    problem.represent(-l, &mut r);
    matrix.row_mut(0).copy_from_slice(&r.t);
    matrix[(0, UnknownLayout::T_LEFT)] -= re(T::one());
    rhs[0] = -r.src_t;
    // T(L) = exp(2 i zeta L) T^L.
    problem.represent(l, &mut r);
    matrix.row_mut(1).copy_from_slice(&r.t);
    matrix[(1, UnknownLayout::T_LEFT)] -= problem.bloch;
    rhs[1] = -r.src_t;

    let mut collocate = |row: usize, x: T, m: Cx<T>, use_gradient: bool| {
        problem.represent(x, &mut r);
        let (coef, src) = if use_gradient { (&r.tx, r.src_tx) } else { (&r.t, r.src_t) };
        for (dst, v) in matrix.row_mut(row).iter_mut().zip(coef) {
            *dst = -m * v;
        }
        matrix[(row, row)] += re(T::one());
        rhs[row] = m * src;
    };
    for (j, &el) in lay.q_star.iter().enumerate() {
        let e = problem.mesh.elements[el];
        let cap = problem.cell.phase(e.phase).capacity;
        collocate(lay.q_star_index(j), e.center(), iw * (cap - medium.1), false);
    }
    collocate(
        lay.r_star_index(),
        problem.capacity_point,
        iw * problem.cell.point_capacity,
        false,
    );
    for (j, &el) in lay.u_star.iter().enumerate() {
        let e = problem.mesh.elements[el];
        let k = problem.cell.phase(e.phase).conductivity;
        collocate(lay.u_star_index(j), e.center(), re((medium.0 - k) / medium.0), true);
    }
    Ok(EimSystem { matrix, rhs })
}

/// Solved unknowns with solver diagnostics.
#[derive(Debug, Clone)]
pub struct EimSolution<T> {
    pub problem: EimProblem<T>,
    pub unknowns: Vec<Cx<T>>,
    /// Reciprocal 1-norm condition estimate of `F`.
    pub rcond: T,
    /// `‖F S - M Q‖ / ‖M Q‖`.
    pub residual: T,
}

pub fn solve<T: Real>(problem: EimProblem<T>, system: &EimSystem<T>) -> Result<EimSolution<T>> {
    let (unknowns, rcond, residual) = solve_dense(&system.matrix, &system.rhs)?;
    log::trace!(
        "eim solve: n = {}, rcond = {}, residual = {}",
        unknowns.len(),
        rcond,
        residual
    );
    Ok(EimSolution {
        problem,
        unknowns,
        rcond,
        residual,
    })
}

/// Builds, assembles and solves in one step.
pub fn solve_problem<T: Real>(problem: EimProblem<T>) -> Result<EimSolution<T>> {
    let system = assemble_system(&problem)?;
    solve(problem, &system)
}

/// Sampled local fields.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSamples<T> {
    pub x: Vec<T>,
    pub t: Vec<Cx<T>>,
    pub tx: Vec<Cx<T>>,
    /// Local law `q = -K T,x`.
    pub q: Vec<Cx<T>>,
    /// Local law `F = C T`.
    pub f: Vec<Cx<T>>,
    /// Comparison-medium flux `-Kc (T,x - u*)`: equal to `q` at element
    /// centres and continuous across element ends, where the piecewise
    /// constant eigen-gradient makes `T,x` itself jump.
    pub q_polarized: Vec<Cx<T>>,
}

/// Cell averages of one solve or an ensemble of solves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellAverages<T> {
    pub t: Cx<T>,
    pub tx: Cx<T>,
    pub q: Cx<T>,
    pub f: Cx<T>,
    pub provenance: AverageProvenance<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AverageProvenance<T> {
    Realization { y: T },
    Ensemble { realizations: usize },
}

impl<T: Real> EimSolution<T> {
    pub fn t_left(&self) -> Cx<T> {
        self.unknowns[UnknownLayout::T_LEFT]
    }

    pub fn q_left(&self) -> Cx<T> {
        self.unknowns[UnknownLayout::Q_LEFT]
    }

    /// Bloch image `T^R = exp(2 i zeta L) T^L`.
    pub fn t_right(&self) -> Cx<T> {
        self.t_left() * self.problem.bloch
    }

    pub fn q_right(&self) -> Cx<T> {
        self.q_left() * self.problem.bloch
    }

    pub fn r_star(&self) -> Cx<T> {
        self.unknowns[self.problem.layout.r_star_index()]
    }

    /// `(element index, Q*)` pairs.
    pub fn q_star(&self) -> Vec<(usize, Cx<T>)> {
        let lay = &self.problem.layout;
        lay.q_star
            .iter()
            .enumerate()
            .map(|(j, &e)| (e, self.unknowns[lay.q_star_index(j)]))
            .collect()
    }

    /// `(element index, u*)` pairs.
    pub fn u_star(&self) -> Vec<(usize, Cx<T>)> {
        let lay = &self.problem.layout;
        lay.u_star
            .iter()
            .enumerate()
            .map(|(j, &e)| (e, self.unknowns[lay.u_star_index(j)]))
            .collect()
    }

    fn temperature_with(&self, x: T, r: &mut Representation<T>) -> (Cx<T>, Cx<T>) {
        self.problem.represent(x, r);
        let mut t = r.src_t;
        let mut tx = r.src_tx;
        for ((s, a), b) in self.unknowns.iter().zip(&r.t).zip(&r.tx) {
            t += a * s;
            tx += b * s;
        }
        (t, tx)
    }

    /// `(T(x), T,x(x))`.
    pub fn temperature(&self, x: T) -> (Cx<T>, Cx<T>) {
        let mut r = self.problem.buffers();
        self.temperature_with(x, &mut r)
    }

    /// Residual of the equivalent-inclusion and capacity conditions after
    /// re-evaluating the reconstructed fields, relative to the largest eigen-field.
    pub fn consistency_residual(&self) -> T {
        let p = &self.problem;
        let iw = imag_unit::<T>() * p.omega;
        let (kc, cc) = (p.kernel.conductivity, p.kernel.capacity);
        let mut worst = T::zero();
        let mut scale = T::zero();
        for (el, q) in self.q_star() {
            let e = p.mesh.elements[el];
            let want = iw * (p.cell.phase(e.phase).capacity - cc) * self.temperature(e.center()).0;
            worst = worst.max((q - want).norm());
            scale = scale.max(q.norm());
        }
        for (el, u) in self.u_star() {
            let e = p.mesh.elements[el];
            let want = self.temperature(e.center()).1 * ((kc - p.cell.phase(e.phase).conductivity) / kc);
            worst = worst.max((u - want).norm());
            scale = scale.max(u.norm());
        }
        let want = iw * p.cell.point_capacity * self.temperature(p.capacity_point).0;
        worst = worst.max((self.r_star() - want).norm());
        scale = scale.max(self.r_star().norm());
        if scale > T::zero() {
            worst / scale
        } else {
            worst
        }
    }
}

/// Reconstructs `(T, T,x, q, F)` at `points`; `q = -K T,x` and `F = C T` use
/// the local phase. Sampling `T,x` exactly at the capacity point is refused
/// because the kernel derivative jumps there.
pub fn evaluate_fields<T: Real>(solution: &EimSolution<T>, points: &[T]) -> Result<FieldSamples<T>> {
    let p = &solution.problem;
    let l = p.cell.half_length;
    let mut out = FieldSamples {
        x: Vec::with_capacity(points.len()),
        t: Vec::with_capacity(points.len()),
        tx: Vec::with_capacity(points.len()),
        q: Vec::with_capacity(points.len()),
        f: Vec::with_capacity(points.len()),
        q_polarized: Vec::with_capacity(points.len()),
    };
    let mut u_of_element = vec![re(T::zero()); p.mesh.len()];
    for (el, u) in solution.u_star() {
        u_of_element[el] = u;
    }
    let kc = p.kernel.conductivity;
    let mut r = p.buffers();
    for &x in points {
        if !(x >= -l && x <= l) {
            return Err(Error::InvalidArgument(format!("sampling point {x} lies outside the cell")));
        }
        if x == p.capacity_point && p.cell.point_capacity > T::zero() {
            return Err(Error::InvalidArgument(format!(
                "temperature gradient is discontinuous at the capacity point {x}"
            )));
        }
        let (t, tx) = solution.temperature_with(x, &mut r);
        let mat = material_at(&p.cell, &p.realization, x);
        out.x.push(x);
        out.t.push(t);
        out.tx.push(tx);
        out.q.push(-tx * mat.conductivity);
        out.f.push(t * mat.capacity);
        // Element containing x (right-hand one at an element end).
        let el = p.nodes[1..p.nodes.len() - 1].partition_point(|&n| n <= x);
        out.q_polarized.push(-(tx - u_of_element[el]) * kc);
    }
    Ok(out)
}

/// Weighted cell averages by Gauss-Legendre sampling on every element.
///
/// The weight's microstructure multiplier applies to `T` and `T,x`; `q` and
/// `F` carry only the de-phasing factor. `<F>` includes the point term
/// `H T(p) exp(-i zeta p) / 2L`.
pub fn cell_averages<T: Real>(solution: &EimSolution<T>, weight: &WeightSpec<T>) -> Result<CellAverages<T>> {
    let p = &solution.problem;
    let (nodes, weights) = crate::quadrature::gauss_legendre::<T>(p.mesh.samples_per_element);
    let inv_2l = T::one() / p.cell.period();
    let mut r = p.buffers();
    let (mut at, mut atx, mut aq, mut af) = (re(T::zero()), re(T::zero()), re(T::zero()), re(T::zero()));
    for e in &p.mesh.elements {
        let half = e.width() * T::lit(0.5);
        let mid = e.center();
        let mat = p.cell.phase(e.phase);
        for (s, w) in nodes.iter().zip(&weights) {
            let x = mid + *s * half;
            let mult = weight.multiplier(&p.cell, &p.realization, x)?;
            let (t, tx) = solution.temperature_with(x, &mut r);
            let ph = weight.phase_factor(p.zeta, x) * (*w * half * inv_2l);
            let fw = ph * mult;
            at += fw * t;
            atx += fw * tx;
            aq -= ph * tx * mat.conductivity;
            af += ph * t * mat.capacity;
        }
    }
    let cp = p.capacity_point;
    let tp = solution.temperature_with(cp, &mut r).0;
    af += tp * weight.phase_factor(p.zeta, cp) * (p.cell.point_capacity * inv_2l);
    Ok(CellAverages {
        t: at,
        tx: atx,
        q: aq,
        f: af,
        provenance: AverageProvenance::Realization { y: p.realization.y },
    })
}
