//! Affine-invariant geometry on symmetric positive-definite matrices.
//!
//! Metric at `Σ`: `⟨W₁, W₂⟩_Σ = tr(Σ^{-1/2} W₁ Σ^{-1} W₂ Σ^{-1/2})`, invariant under
//! the congruence action `Σ ↦ AᵀΣA` of `GL_n`. All matrix functions are evaluated
//! spectrally on symmetric matrices, so results are symmetric by construction.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{self, SquareMatrix, SymmetricEigen};
use crate::scalar::Real;

/// A validated SPD matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SpdMatrix<T> {
    inner: SquareMatrix<T>,
}

/// Outcome of a Loewner comparison between two SPD matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoewnerOrdering {
    LessEqual,
    GreaterEqual,
    Equal,
    Incomparable,
}

impl fmt::Display for LoewnerOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::LessEqual => "less_equal",
            Self::GreaterEqual => "greater_equal",
            Self::Equal => "equal",
            Self::Incomparable => "incomparable",
        };
        f.write_str(s)
    }
}

/// Zero tolerance on eigenvalues of `A − B` in [`loewner_leq`].
pub const LOEWNER_ZERO_TOL: f64 = 1e-10;

impl<T: Real> SpdMatrix<T> {
    /// Validates symmetry (within the membership tolerance, then symmetrized)
    /// and positivity (every eigenvalue at least the floor).
    pub fn new(m: SquareMatrix<T>) -> Result<Self> {
        if m.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite SPD entry".into()));
        }
        let asym = m.asymmetry();
        if asym > T::membership_tol() {
            return Err(Error::Numerical(format!("matrix not symmetric (max |A - Aᵀ| = {:e})", asym.f64())));
        }
        let s = m.symmetrized();
        let lo = SymmetricEigen::new(&s).min_eigenvalue();
        if !(lo >= T::eigen_floor()) {
            return Err(Error::EigenvalueFloor { value: lo.f64(), floor: T::eigen_floor().f64() });
        }
        Ok(Self { inner: s })
    }

    pub fn from_row_major(n: usize, entries: Vec<T>) -> Result<Self> {
        Self::new(SquareMatrix::from_row_major(n, entries)?)
    }

    pub fn identity(n: usize) -> Self {
        Self { inner: SquareMatrix::identity(n) }
    }

    pub fn diagonal(diag: &[T]) -> Result<Self> {
        Self::new(SquareMatrix::from_diagonal(diag))
    }

    pub fn size(&self) -> usize {
        self.inner.size()
    }

    pub fn matrix(&self) -> &SquareMatrix<T> {
        &self.inner
    }

    pub fn into_matrix(self) -> SquareMatrix<T> {
        self.inner
    }

    pub fn eigen(&self) -> SymmetricEigen<T> {
        SymmetricEigen::new(&self.inner)
    }

    /// `Aᵀ Σ A` for invertible `A`.
    pub fn congruence(&self, a: &SquareMatrix<T>) -> Result<Self> {
        Self::new(self.inner.congruence(a).symmetrized())
    }
}

fn check_size<T: Real>(a: &SpdMatrix<T>, b: &SpdMatrix<T>) -> Result<()> {
    if a.size() != b.size() {
        return Err(Error::SizeMismatch(a.size(), b.size()));
    }
    Ok(())
}

fn check_symmetric<T: Real>(n: usize, w: &SquareMatrix<T>) -> Result<SquareMatrix<T>> {
    if w.size() != n {
        return Err(Error::SizeMismatch(w.size(), n));
    }
    let asym = w.asymmetry();
    if asym > T::membership_tol() * (T::one() + w.frobenius_norm()) {
        return Err(Error::Numerical(format!("tangent matrix not symmetric ({:e})", asym.f64())));
    }
    Ok(w.symmetrized())
}

/// Principal square root `Σ^{1/2}`.
pub fn spd_sqrt<T: Real>(sigma: &SpdMatrix<T>) -> SpdMatrix<T> {
    let e = sigma.eigen();
    SpdMatrix { inner: e.map(|l| l.sqrt()).symmetrized() }
}

/// `Σ^{-1/2}`.
pub fn spd_inv_sqrt<T: Real>(sigma: &SpdMatrix<T>) -> SpdMatrix<T> {
    let e = sigma.eigen();
    SpdMatrix { inner: e.map(|l| l.sqrt().recip()).symmetrized() }
}

/// `m_ij · s_i · s_j`.
fn scale_both<T: Real>(m: &SquareMatrix<T>, s: &[T]) -> SquareMatrix<T> {
    let n = m.size();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(m[(i, j)] * s[i] * s[j]);
        }
    }
    SquareMatrix::from_row_major(n, out).expect("square").symmetrized()
}

/// `D^{-1/2} Uᵀ W U D^{-1/2}` for `Σ = U D Uᵀ`: `Σ^{-1/2} W Σ^{-1/2}` expressed
/// in the eigenbasis of `Σ`, which keeps wide spectra accurate.
fn whiten<T: Real>(e: &SymmetricEigen<T>, w: &SquareMatrix<T>) -> SquareMatrix<T> {
    let inv: Vec<T> = e.eigenvalues.iter().map(|l| l.sqrt().recip()).collect();
    scale_both(&w.congruence(&e.eigenvectors), &inv)
}

/// Inverse of [`whiten`]: `U D^{1/2} M D^{1/2} Uᵀ`.
fn unwhiten<T: Real>(e: &SymmetricEigen<T>, m: &SquareMatrix<T>) -> SquareMatrix<T> {
    let sq: Vec<T> = e.eigenvalues.iter().map(|l| l.sqrt()).collect();
    scale_both(m, &sq).congruence(&e.eigenvectors.transpose()).symmetrized()
}

fn det2<T: Real>(m: &SquareMatrix<T>) -> T {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// Eigendecomposition of `Σ₁^{-1/2} Σ₂ Σ₁^{-1/2}` in the eigenbasis of `Σ₁`.
fn relative_eigen<T: Real>(e1: &SymmetricEigen<T>, s2: &SpdMatrix<T>) -> SymmetricEigen<T> {
    let m = whiten(e1, s2.matrix());
    if m.size() == 2 {
        let det = det2(s2.matrix()) / (e1.eigenvalues[0] * e1.eigenvalues[1]);
        linalg::eigen2_with_det(&m, det)
    } else {
        SymmetricEigen::new(&m)
    }
}

/// Affine-invariant inner product of two symmetric matrices at `Σ`.
pub fn spd_inner<T: Real>(sigma: &SpdMatrix<T>, w1: &SquareMatrix<T>, w2: &SquareMatrix<T>) -> Result<T> {
    let n = sigma.size();
    let w1 = check_symmetric(n, w1)?;
    let w2 = check_symmetric(n, w2)?;
    let e = sigma.eigen();
    Ok(whiten(&e, &w1).frobenius_dot(&whiten(&e, &w2)))
}

pub fn spd_norm<T: Real>(sigma: &SpdMatrix<T>, w: &SquareMatrix<T>) -> Result<T> {
    spd_inner(sigma, w, w).map(|v| v.max(T::zero()).sqrt())
}

/// Eigenvalues of `Σ₁^{-1/2} Σ₂ Σ₁^{-1/2}`.
pub fn relative_eigenvalues<T: Real>(s1: &SpdMatrix<T>, s2: &SpdMatrix<T>) -> Result<Vec<T>> {
    check_size(s1, s2)?;
    Ok(relative_eigen(&s1.eigen(), s2).eigenvalues)
}

/// Geodesic distance `sqrt(Σ log² λᵢ(Σ₁^{-1/2} Σ₂ Σ₁^{-1/2}))`.
pub fn spd_distance<T: Real>(s1: &SpdMatrix<T>, s2: &SpdMatrix<T>) -> Result<T> {
    let lambdas = relative_eigenvalues(s1, s2)?;
    let mut acc = T::zero();
    for l in lambdas {
        if !(l > T::zero()) {
            return Err(Error::Numerical(format!("nonpositive relative eigenvalue {:e}", l.f64())));
        }
        let ln = l.ln();
        acc = acc + ln * ln;
    }
    Ok(acc.sqrt())
}

/// `exp_Σ(W) = Σ^{1/2} exp(Σ^{-1/2} W Σ^{-1/2}) Σ^{1/2}`.
pub fn spd_exp<T: Real>(sigma: &SpdMatrix<T>, w: &SquareMatrix<T>) -> Result<SpdMatrix<T>> {
    let w = check_symmetric(sigma.size(), w)?;
    let e = sigma.eigen();
    let inner = SymmetricEigen::new(&whiten(&e, &w)).map(|l| l.exp());
    SpdMatrix::new(unwhiten(&e, &inner))
}

/// `log_{Σ₁}(Σ₂) = Σ₁^{1/2} log(Σ₁^{-1/2} Σ₂ Σ₁^{-1/2}) Σ₁^{1/2}`.
pub fn spd_log<T: Real>(s1: &SpdMatrix<T>, s2: &SpdMatrix<T>) -> Result<SquareMatrix<T>> {
    check_size(s1, s2)?;
    let e = s1.eigen();
    let rel = relative_eigen(&e, s2);
    if rel.min_eigenvalue() <= T::zero() {
        return Err(Error::Numerical("relative matrix lost positivity".into()));
    }
    Ok(unwhiten(&e, &rel.map(|l| l.ln())))
}

/// Loewner comparison of `A` and `B` by the eigenvalue signs of `A − B`.
pub fn loewner_leq<T: Real>(a: &SpdMatrix<T>, b: &SpdMatrix<T>) -> Result<LoewnerOrdering> {
    check_size(a, b)?;
    let diff = a.matrix() - b.matrix();
    let e = SymmetricEigen::new(&diff);
    let tol = T::c(LOEWNER_ZERO_TOL);
    let pos = e.eigenvalues.iter().any(|&l| l > tol);
    let neg = e.eigenvalues.iter().any(|&l| l < -tol);
    Ok(match (pos, neg) {
        (false, false) => LoewnerOrdering::Equal,
        (true, false) => LoewnerOrdering::GreaterEqual,
        (false, true) => LoewnerOrdering::LessEqual,
        (true, true) => LoewnerOrdering::Incomparable,
    })
}

/// Orthonormal basis of the tangent space at `Σ` (symmetric matrices),
/// `Σ^{1/2} Eₖ Σ^{1/2}` for a Frobenius-orthonormal symmetric basis `Eₖ`.
pub fn spd_tangent_basis<T: Real>(sigma: &SpdMatrix<T>) -> Vec<SquareMatrix<T>> {
    let n = sigma.size();
    let sq = spd_sqrt(sigma);
    let r = T::c(std::f64::consts::FRAC_1_SQRT_2);
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            let mut e = SquareMatrix::zeros(n);
            if i == j {
                e[(i, i)] = T::one();
            } else {
                e[(i, j)] = r;
                e[(j, i)] = r;
            }
            out.push((&(sq.matrix() * &e) * sq.matrix()).symmetrized());
        }
    }
    out
}
