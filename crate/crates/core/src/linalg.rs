//! Dense complex LU factorization with partial pivoting and a 1-norm
//! condition estimate (Hager's method).

use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};
use num_complex::Complex;
use num_traits::Zero;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    n: usize,
    data: Vec<Cx<T>>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Cx<T>>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "matrix must be square");
            data.extend(r);
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[Cx<T>] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Cx<T>] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, x: &[Cx<T>]) -> Vec<Cx<T>> {
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(Complex::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> T {
        (0..self.n)
            .map(|j| (0..self.n).fold(T::zero(), |s, i| s + self[(i, j)].norm()))
            .fold(T::zero(), T::max)
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = Cx<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Cx<T> {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cx<T> {
        &mut self.data[i * self.n + j]
    }
}

/// `P A = L U` with unit lower-triangular `L`.
#[derive(Debug, Clone)]
pub struct LuFactorization<T> {
    lu: DenseMatrix<T>,
    perm: Vec<usize>,
    norm1: T,
}

impl<T: Real> LuFactorization<T> {
    pub fn new(a: DenseMatrix<T>) -> Result<Self> {
        let n = a.dim();
        let norm1 = a.norm1();
        let mut lu = a;
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (piv, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, T::zero()), |best, c| if c.1 > best.1 { c } else { best });
            if !(pmax > T::zero()) || !pmax.is_finite() {
                return Err(Error::SingularMatrix { rcond: 0.0 });
            }
            if piv != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(piv, j)];
                    lu[(piv, j)] = tmp;
                }
                perm.swap(k, piv);
            }
            let inv = Complex::new(T::one(), T::zero()) / lu[(k, k)];
            let (head, tail) = lu.data.split_at_mut((k + 1) * n);
            let pivot_row = &head[k * n..(k + 1) * n];
            for row in tail.chunks_exact_mut(n) {
                let f = row[k] * inv;
                row[k] = f;
                if f.is_zero() {
                    continue;
                }
                for j in (k + 1)..n {
                    row[j] = row[j] - f * pivot_row[j];
                }
            }
        }
        Ok(Self { lu, perm, norm1 })
    }

    pub fn dim(&self) -> usize {
        self.lu.dim()
    }

    pub fn solve(&self, b: &[Cx<T>]) -> Vec<Cx<T>> {
        let n = self.dim();
        let mut x: Vec<Cx<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in 0..i {
                s = s - row[j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in (i + 1)..n {
                s = s - row[j] * x[j];
            }
            x[i] = s / row[i];
        }
        x
    }

    /// Solves `A^H x = b`.
    pub fn solve_adjoint(&self, b: &[Cx<T>]) -> Vec<Cx<T>> {
        let n = self.dim();
        // A^H = U^H L^H P, so solve U^H y = b, L^H z = y, x = P^T z.
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for j in 0..i {
                s = s - self.lu[(j, i)].conj() * y[j];
            }
            y[i] = s / self.lu[(i, i)].conj();
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in (i + 1)..n {
                s = s - self.lu[(j, i)].conj() * y[j];
            }
            y[i] = s;
        }
        let mut x = vec![Complex::zero(); n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
        x
    }

    /// Estimate of `1 / (‖A‖₁ ‖A⁻¹‖₁)`.
    pub fn rcond(&self) -> T {
        let n = self.dim();
        if n == 0 || !(self.norm1 > T::zero()) {
            return T::zero();
        }
        let inv_n = T::one() / T::lit(n as f64);
        let mut x = vec![Complex::new(inv_n, T::zero()); n];
        let mut est = T::zero();
        for _ in 0..5 {
            let y = self.solve(&x);
            let y_norm = y.iter().fold(T::zero(), |s, v| s + v.norm());
            if y_norm <= est {
                break;
            }
            est = y_norm;
            let sgn: Vec<Cx<T>> = y
                .iter()
                .map(|v| {
                    let a = v.norm();
                    if a > T::zero() {
                        v / a
                    } else {
                        Complex::new(T::one(), T::zero())
                    }
                })
                .collect();
            let z = self.solve_adjoint(&sgn);
            let (jmax, zmax) = z
                .iter()
                .enumerate()
                .map(|(j, v)| (j, v.norm()))
                .fold((0, T::zero()), |b, c| if c.1 > b.1 { c } else { b });
            let zx = z
                .iter()
                .zip(&x)
                .fold(Complex::zero(), |s: Cx<T>, (a, b)| s + a.conj() * b)
                .re;
            if zmax <= zx {
                break;
            }
            x = vec![Complex::zero(); n];
            x[jmax] = Complex::new(T::one(), T::zero());
        }
        if !(est > T::zero()) || !est.is_finite() {
            return T::zero();
        }
        T::one() / (self.norm1 * est)
    }
}

/// Factorizes, solves, and reports `(x, rcond, relative residual)`.
pub fn solve_dense<T: Real>(a: &DenseMatrix<T>, b: &[Cx<T>]) -> Result<(Vec<Cx<T>>, T, T)> {
    let lu = LuFactorization::new(a.clone())?;
    let rcond = lu.rcond();
    if !(rcond > T::epsilon()) {
        return Err(Error::SingularMatrix {
            rcond: rcond.to_f64_lossy(),
        });
    }
    let x = lu.solve(b);
    let ax = a.mul_vec(&x);
    let num = ax
        .iter()
        .zip(b)
        .fold(T::zero(), |s, (u, v)| s + (u - v).norm_sqr())
        .sqrt();
    let den = b.iter().fold(T::zero(), |s, v| s + v.norm_sqr()).sqrt();
    let residual = if den > T::zero() { num / den } else { num };
    Ok((x, rcond, residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Cx<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let b = vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 1.0)];
        let (x, rcond, res) = solve_dense(&DenseMatrix::identity(3), &b).unwrap();
        assert_eq!(x, b);
        assert!((rcond - 1.0).abs() < 1e-15);
        assert_eq!(res, 0.0);
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let a = DenseMatrix::from_rows(vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(2.0, 0.0), c(0.0, 1.0)]]);
        let b = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let (x, _, res) = solve_dense(&a, &b).unwrap();
        assert!(res < 1e-15);
        assert!((x[1] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = DenseMatrix::from_rows(vec![vec![c(1.0, 1.0), c(2.0, 2.0)], vec![c(0.5, 0.5), c(1.0, 1.0)]]);
        assert!(matches!(
            solve_dense(&a, &[c(1.0, 0.0), c(0.0, 0.0)]),
            Err(Error::SingularMatrix { .. })
        ));
    }

    #[test]
    fn rcond_of_diagonal_matrix_is_exact() {
        let mut a = DenseMatrix::identity(4);
        a[(2, 2)] = c(1e-3, 0.0);
        let lu = LuFactorization::new(a).unwrap();
        assert!((lu.rcond() - 1e-3).abs() < 1e-15);
    }

    fn arb_matrix(n: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-1.0f64..1.0, 2 * n * n + 2 * n)
    }

    proptest! {
        #[test]
        fn random_systems_have_small_backward_error(v in arb_matrix(6)) {
            let n = 6;
            let mut a = DenseMatrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    a[(i, j)] = c(v[2 * (i * n + j)], v[2 * (i * n + j) + 1]);
                }
                a[(i, i)] += c(3.0, 0.0);
            }
            let b: Vec<_> = (0..n).map(|i| c(v[2 * n * n + 2 * i], v[2 * n * n + 2 * i + 1])).collect();
            let (_, _, res) = solve_dense(&a, &b).unwrap();
            prop_assert!(res < 1e-13);
        }

        #[test]
        fn adjoint_solve_is_consistent(v in arb_matrix(5)) {
            let n = 5;
            let mut a = DenseMatrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    a[(i, j)] = c(v[2 * (i * n + j)], v[2 * (i * n + j) + 1]);
                }
                a[(i, i)] += c(2.5, -1.0);
            }
            let b: Vec<_> = (0..n).map(|i| c(v[2 * n * n + 2 * i], v[2 * n * n + 2 * i + 1])).collect();
            let lu = LuFactorization::new(a.clone()).unwrap();
            let x = lu.solve_adjoint(&b);
            for i in 0..n {
                let s = (0..n).fold(c(0.0, 0.0), |s, k| s + a[(k, i)].conj() * x[k]);
                prop_assert!((s - b[i]).norm() < 1e-12);
            }
        }
    }
}
