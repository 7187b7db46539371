//! Small dense square matrices and symmetric spectral calculus.
//!
//! Everything the SPD geometry needs (square roots, matrix exp/log) goes
//! through [`SymmetricEigen`]: `f(S) = U f(D) Uᵀ`. For `n = 2` the
//! eigendecomposition is closed form; larger sizes use cyclic Jacobi
//! rotations.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Row-major `n × n` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> SquareMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be a square.
    pub fn from_row_major(n: usize, entries: Vec<T>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::SizeMismatch(entries.len(), n * n));
        }
        Ok(Self { n, data: entries })
    }

    pub fn from_rows<const N: usize>(rows: [[T; N]; N]) -> Self {
        Self { n: N, data: rows.iter().flat_map(|r| r.iter().copied()).collect() }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// `(A + Aᵀ) / 2`.
    pub fn symmetrized(&self) -> Self {
        let half = T::c(0.5);
        let mut s = self.clone();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let v = (self[(i, j)] + self[(j, i)]) * half;
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
        s
    }

    /// Largest absolute entry of `A − Aᵀ`.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn trace(&self) -> T {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius inner product `tr(Aᵀ B)`.
    pub fn frobenius_dot(&self, other: &Self) -> T {
        self.data.iter().zip(&other.data).map(|(&a, &b)| a * b).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.frobenius_dot(self).sqrt()
    }

    pub fn scale(&self, s: T) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&v| v * s).collect() }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data.iter().zip(&other.data).fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    /// `Bᵀ A B`, the congruence action.
    pub fn congruence(&self, b: &Self) -> Self {
        &(&b.transpose() * self) * b
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> T {
        let n = self.n;
        let mut a = self.clone();
        let mut det = T::one();
        for col in 0..n {
            let pivot = (col..n).max_by(|&x, &y| a[(x, col)].abs().partial_cmp(&a[(y, col)].abs()).unwrap()).unwrap();
            if a[(pivot, col)] == T::zero() {
                return T::zero();
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                }
                det = -det;
            }
            det = det * a[(col, col)];
            for row in (col + 1)..n {
                let f = a[(row, col)] / a[(col, col)];
                for j in col..n {
                    let v = a[(col, j)];
                    a[(row, j)] = a[(row, j)] - f * v;
                }
            }
        }
        det
    }
}

impl<T> Index<(usize, usize)> for SquareMatrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for SquareMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

impl<T: Real> Mul for &SquareMatrix<T> {
    type Output = SquareMatrix<T>;
    fn mul(self, rhs: Self) -> SquareMatrix<T> {
        assert_eq!(self.n, rhs.n, "matrix size mismatch");
        let n = self.n;
        let mut out = SquareMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: Real> Add for &SquareMatrix<T> {
    type Output = SquareMatrix<T>;
    fn add(self, rhs: Self) -> SquareMatrix<T> {
        assert_eq!(self.n, rhs.n, "matrix size mismatch");
        SquareMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect() }
    }
}

impl<T: Real> Sub for &SquareMatrix<T> {
    type Output = SquareMatrix<T>;
    fn sub(self, rhs: Self) -> SquareMatrix<T> {
        assert_eq!(self.n, rhs.n, "matrix size mismatch");
        SquareMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect() }
    }
}

/// Eigendecomposition `S = U diag(λ) Uᵀ` of a symmetric matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct SymmetricEigen<T> {
    pub eigenvalues: Vec<T>,
    /// Columns are eigenvectors.
    pub eigenvectors: SquareMatrix<T>,
}

impl<T: Real> SymmetricEigen<T> {
    /// Decomposes the symmetric part of `m`.
    pub fn new(m: &SquareMatrix<T>) -> Self {
        let s = m.symmetrized();
        match s.size() {
            0 => Self { eigenvalues: vec![], eigenvectors: s },
            1 => Self { eigenvalues: vec![s[(0, 0)]], eigenvectors: SquareMatrix::identity(1) },
            2 => eigen2(&s),
            _ => jacobi(s),
        }
    }

    /// `U diag(f(λ)) Uᵀ`.
    pub fn map(&self, f: impl Fn(T) -> T) -> SquareMatrix<T> {
        let n = self.eigenvalues.len();
        let fl: Vec<T> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let u = &self.eigenvectors;
        let mut out = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = (0..n).map(|k| u[(i, k)] * fl[k] * u[(j, k)]).sum();
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        out
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues.iter().copied().fold(T::infinity(), T::min)
    }
}

/// Closed form for `[[a, b], [b, c]]`, stable at repeated eigenvalues.
fn eigen2<T: Real>(s: &SquareMatrix<T>) -> SymmetricEigen<T> {
    eigen2_with_det(s, s[(0, 0)] * s[(1, 1)] - s[(0, 1)] * s[(0, 1)])
}

/// Closed-form 2×2 decomposition using a determinant known more accurately
/// than the entries' `ac − b²`.
pub(crate) fn eigen2_with_det<T: Real>(s: &SquareMatrix<T>, det: T) -> SymmetricEigen<T> {
    let (a, b, c) = (s[(0, 0)], s[(0, 1)], s[(1, 1)]);
    let half = T::c(0.5);
    let mean = (a + c) * half;
    let radius = ((a - c) * half).hypot(b);
    let hi = mean + radius;
    let lo_direct = mean - radius;
    // mean - radius cancels when the spectrum spans many orders of magnitude
    let lo = if hi > T::zero() && lo_direct.abs() < hi * T::c(1e-4) { det / hi } else { lo_direct };
    let theta = (b + b).atan2(a - c) * half;
    let (sn, cs) = theta.sin_cos();
    // column 0 ↔ lo, column 1 ↔ hi
    let u = SquareMatrix::from_rows([[-sn, cs], [cs, sn]]);
    SymmetricEigen { eigenvalues: vec![lo, hi], eigenvectors: u }
}

fn jacobi<T: Real>(mut a: SquareMatrix<T>) -> SymmetricEigen<T> {
    let n = a.size();
    let mut v = SquareMatrix::identity(n);
    let eps = T::epsilon();
    for _sweep in 0..100 {
        let off: T =
            (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|ij| a[ij] * a[ij]).sum();
        let diag: T = (0..n).map(|i| a[(i, i)] * a[(i, i)]).sum();
        if off <= eps * eps * diag || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (apq + apq);
                let t = tau.signum() / (tau.abs() + (T::one() + tau * tau).sqrt());
                let t = if tau == T::zero() { T::one() } else { t };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap_or(std::cmp::Ordering::Equal));
    let eigenvalues = order.iter().map(|&i| a[(i, i)]).collect();
    let mut u = SquareMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            u[(row, col)] = v[(row, src)];
        }
    }
    SymmetricEigen { eigenvalues, eigenvectors: u }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(e: &SymmetricEigen<f64>) -> SquareMatrix<f64> {
        e.map(|l| l)
    }

    #[test]
    fn eigen2_repeated_eigenvalue() {
        let m = SquareMatrix::from_rows([[3.0, 0.0], [0.0, 3.0]]);
        let e = SymmetricEigen::new(&m);
        assert_eq!(e.eigenvalues, vec![3.0, 3.0]);
        assert!(reconstruct(&e).max_abs_diff(&m) < 1e-15);
    }

    #[test]
    fn eigen2_wide_spectrum_keeps_small_eigenvalue() {
        // u uᵀ + 1e-8 I with |u| = 1
        let (u0, u1) = (0.6_f64, 0.8_f64);
        let eps = 1e-8;
        let m = SquareMatrix::from_rows([[u0 * u0 + eps, u0 * u1], [u0 * u1, u1 * u1 + eps]]);
        let e = SymmetricEigen::new(&m);
        assert!((e.eigenvalues[0] - eps).abs() < 1e-15);
        assert!((e.eigenvalues[1] - (1.0 + eps)).abs() < 1e-14);
    }

    #[test]
    fn jacobi_matches_reconstruction() {
        let m = SquareMatrix::from_rows([[4.0, 1.0, -2.0], [1.0, 2.0, 0.5], [-2.0, 0.5, 3.0]]);
        let e = SymmetricEigen::new(&m);
        assert!(reconstruct(&e).max_abs_diff(&m) < 1e-12);
        assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let utu = &e.eigenvectors.transpose() * &e.eigenvectors;
        assert!(utu.max_abs_diff(&SquareMatrix::identity(3)) < 1e-12);
        let tr: f64 = e.eigenvalues.iter().sum();
        assert!((tr - m.trace()).abs() < 1e-12);
    }

    #[test]
    fn determinant_with_pivoting() {
        let m = SquareMatrix::from_rows([[0.0_f64, 2.0], [3.0, 1.0]]);
        assert!((m.determinant() + 6.0).abs() < 1e-15);
    }
}
