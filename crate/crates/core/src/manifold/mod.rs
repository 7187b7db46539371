//! The geometric contract shared by every manifold.
//!
//! A [`ManifoldPoint`] carries the [`ManifoldId`] it lives on and its
//! coordinates in the manifold's global chart:
//!
//! | manifold        | coords                               | tangent vec                     |
//! |-----------------|--------------------------------------|---------------------------------|
//! | `euclidean(d)`  | `d` reals                            | `d` reals                       |
//! | `circle`        | angle in `[0, 2π)`                   | one real                        |
//! | `sphere2`       | unit 3-vector                        | 3-vector orthogonal to the base |
//! | `hyperbolic2`   | `(x, y)`, `y > 0`                    | ambient `(vx, vy)`              |
//! | `spd(n)`        | row-major symmetric positive `n × n` | row-major symmetric `n × n`     |
//!
//! Constructors validate membership and absorb drift below the membership
//! tolerance by re-projection. Fields are private, so every point and
//! tangent vector reaching an operation already satisfies its invariant.

mod euclidean;
mod serde_impl;

use std::fmt;

pub use euclidean::{euclidean_distance, euclidean_exp, euclidean_log};
pub use serde_impl::PointRepr;

use crate::curvature::{circle, hyperbolic, sphere};
use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::scalar::Real;
use crate::spd::{self, SpdMatrix};

/// Which manifold a point lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ManifoldId {
    Euclidean(usize),
    Circle,
    Sphere2,
    Hyperbolic2,
    Spd(usize),
}

impl fmt::Display for ManifoldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ManifoldId::Euclidean(d) => write!(f, "euclidean({d})"),
            ManifoldId::Circle => f.write_str("circle"),
            ManifoldId::Sphere2 => f.write_str("sphere2"),
            ManifoldId::Hyperbolic2 => f.write_str("hyperbolic2"),
            ManifoldId::Spd(n) => write!(f, "spd({n})"),
        }
    }
}

impl std::str::FromStr for ManifoldId {
    type Err = Error;

    /// Parses `circle`, `sphere2`, `hyperbolic2`, `euclidean(d)`/`euclidean:d`, `spd(n)`/`spd:n`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let sized = |prefix: &str| -> Option<Result<usize>> {
            let rest = s.strip_prefix(prefix)?;
            let rest = rest
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .or_else(|| rest.strip_prefix(':'))
                .or_else(|| (!rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit())).then_some(rest))?;
            Some(rest.parse::<usize>().map_err(|_| Error::InvalidParameter(format!("bad manifold size in `{s}`"))))
        };
        let id = match s.as_str() {
            "circle" | "s1" => ManifoldId::Circle,
            "sphere2" | "sphere" | "s2" => ManifoldId::Sphere2,
            "hyperbolic2" | "h2" | "hyperbolic" => ManifoldId::Hyperbolic2,
            _ => {
                if let Some(d) = sized("euclidean") {
                    ManifoldId::Euclidean(d?)
                } else if let Some(n) = sized("spd") {
                    ManifoldId::Spd(n?)
                } else {
                    return Err(Error::InvalidParameter(format!("unknown manifold `{s}`")));
                }
            }
        };
        id.validate()?;
        Ok(id)
    }
}

impl ManifoldId {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ManifoldId::Euclidean(0) => Err(Error::InvalidParameter("euclidean dimension must be >= 1".into())),
            ManifoldId::Spd(n) if n < 2 => Err(Error::InvalidParameter("spd size must be >= 2".into())),
            _ => Ok(()),
        }
    }

    /// Intrinsic dimension.
    pub fn dim(&self) -> usize {
        match *self {
            ManifoldId::Euclidean(d) => d,
            ManifoldId::Circle => 1,
            ManifoldId::Sphere2 | ManifoldId::Hyperbolic2 => 2,
            ManifoldId::Spd(n) => n * (n + 1) / 2,
        }
    }

    /// Number of stored coordinates.
    pub fn coord_len(&self) -> usize {
        match *self {
            ManifoldId::Euclidean(d) => d,
            ManifoldId::Circle => 1,
            ManifoldId::Sphere2 => 3,
            ManifoldId::Hyperbolic2 => 2,
            ManifoldId::Spd(n) => n * n,
        }
    }

    /// Short tag used in serialized forms.
    pub fn tag(&self) -> &'static str {
        match self {
            ManifoldId::Euclidean(_) => "euclidean",
            ManifoldId::Circle => "circle",
            ManifoldId::Sphere2 => "sphere2",
            ManifoldId::Hyperbolic2 => "hyperbolic2",
            ManifoldId::Spd(_) => "spd",
        }
    }

    /// Column names for CSV exports.
    pub fn coord_names(&self) -> Vec<String> {
        match *self {
            ManifoldId::Euclidean(d) => (1..=d).map(|i| format!("x{i}")).collect(),
            ManifoldId::Circle => vec!["theta".into()],
            ManifoldId::Sphere2 => vec!["x".into(), "y".into(), "z".into()],
            ManifoldId::Hyperbolic2 => vec!["x".into(), "y".into()],
            ManifoldId::Spd(n) => (1..=n).flat_map(|i| (1..=n).map(move |j| format!("s{i}{j}"))).collect(),
        }
    }

    /// Validates coordinates and builds a point on this manifold.
    pub fn point<T: Real>(&self, coords: Vec<T>) -> Result<ManifoldPoint<T>> {
        ManifoldPoint::new(*self, coords)
    }

    fn check_same(&self, other: ManifoldId) -> Result<()> {
        if *self != other {
            return Err(Error::ManifoldMismatch { expected: *self, found: other });
        }
        Ok(())
    }
}

/// A point together with the manifold it lives on.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldPoint<T> {
    manifold: ManifoldId,
    coords: Vec<T>,
}

/// A tangent vector `vec ∈ T_base M`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector<T> {
    base: ManifoldPoint<T>,
    vec: Vec<T>,
}

fn as3<T: Real>(c: &[T]) -> [T; 3] {
    [c[0], c[1], c[2]]
}

fn as2<T: Real>(c: &[T]) -> [T; 2] {
    [c[0], c[1]]
}

impl<T: Real> ManifoldPoint<T> {
    /// Validates membership, re-projecting drift below the membership tolerance.
    pub fn new(manifold: ManifoldId, mut coords: Vec<T>) -> Result<Self> {
        manifold.validate()?;
        if coords.len() != manifold.coord_len() {
            return Err(Error::invalid_point(
                manifold,
                format!("expected {} coordinates, got {}", manifold.coord_len(), coords.len()),
            ));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid_point(manifold, "non-finite coordinate"));
        }
        match manifold {
            ManifoldId::Euclidean(_) => {}
            ManifoldId::Circle => coords[0] = circle::normalize_angle(coords[0]),
            ManifoldId::Sphere2 => {
                let n = sphere::norm(&as3(&coords));
                if (n - T::one()).abs() > T::membership_tol() {
                    return Err(Error::invalid_point(manifold, format!("norm {} is not 1", n)));
                }
                coords.iter_mut().for_each(|c| *c = *c / n);
            }
            ManifoldId::Hyperbolic2 => {
                if !(coords[1] > T::zero()) {
                    return Err(Error::invalid_point(manifold, format!("y = {} is not positive", coords[1])));
                }
            }
            ManifoldId::Spd(n) => {
                let m =
                    SpdMatrix::from_row_major(n, coords).map_err(|e| Error::invalid_point(manifold, e.to_string()))?;
                coords = m.into_matrix().into_vec();
            }
        }
        Ok(Self { manifold, coords })
    }

    pub fn euclidean(coords: Vec<T>) -> Result<Self> {
        Self::new(ManifoldId::Euclidean(coords.len()), coords)
    }

    pub fn circle(theta: T) -> Self {
        Self { manifold: ManifoldId::Circle, coords: vec![circle::normalize_angle(theta)] }
    }

    pub fn sphere(p: [T; 3]) -> Result<Self> {
        Self::new(ManifoldId::Sphere2, p.to_vec())
    }

    pub fn hyperbolic(x: T, y: T) -> Result<Self> {
        Self::new(ManifoldId::Hyperbolic2, vec![x, y])
    }

    pub fn spd(m: SpdMatrix<T>) -> Self {
        Self { manifold: ManifoldId::Spd(m.size()), coords: m.into_matrix().into_vec() }
    }

    pub fn manifold(&self) -> ManifoldId {
        self.manifold
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }

    /// SPD view of the point; `None` on other manifolds.
    pub fn as_spd(&self) -> Option<SpdMatrix<T>> {
        match self.manifold {
            ManifoldId::Spd(n) => {
                // already validated at construction
                let m = SquareMatrix::from_row_major(n, self.coords.clone()).ok()?;
                SpdMatrix::new(m).ok()
            }
            _ => None,
        }
    }

    pub fn distance(&self, other: &Self) -> Result<T> {
        distance(self, other)
    }

    pub fn log(&self, other: &Self) -> Result<TangentVector<T>> {
        log_map(self, other)
    }

    pub fn zero_tangent(&self) -> TangentVector<T> {
        TangentVector { base: self.clone(), vec: vec![T::zero(); self.manifold.coord_len()] }
    }
}

impl<T: Real> TangentVector<T> {
    /// Validates tangency at `base`, projecting away drift below tolerance.
    pub fn new(base: ManifoldPoint<T>, mut vec: Vec<T>) -> Result<Self> {
        let m = base.manifold;
        if vec.len() != m.coord_len() {
            return Err(Error::invalid_tangent(m, format!("expected {} components, got {}", m.coord_len(), vec.len())));
        }
        if vec.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid_tangent(m, "non-finite component"));
        }
        match m {
            ManifoldId::Sphere2 => {
                let p = as3(&base.coords);
                let v = as3(&vec);
                let radial = sphere::dot(&p, &v);
                let scale = T::one() + sphere::norm(&v);
                if radial.abs() > T::membership_tol() * scale {
                    return Err(Error::invalid_tangent(m, format!("component {} along the base point", radial)));
                }
                for k in 0..3 {
                    vec[k] = vec[k] - radial * p[k];
                }
            }
            ManifoldId::Spd(n) => {
                let w = SquareMatrix::from_row_major(n, vec)?;
                let asym = w.asymmetry();
                if asym > T::membership_tol() * (T::one() + w.frobenius_norm()) {
                    return Err(Error::invalid_tangent(m, format!("asymmetry {}", asym)));
                }
                vec = w.symmetrized().into_vec();
            }
            _ => {}
        }
        Ok(Self { base, vec })
    }

    pub fn base(&self) -> &ManifoldPoint<T> {
        &self.base
    }

    pub fn vec(&self) -> &[T] {
        &self.vec
    }

    pub fn manifold(&self) -> ManifoldId {
        self.base.manifold
    }

    pub fn scale(&self, s: T) -> Self {
        Self { base: self.base.clone(), vec: self.vec.iter().map(|&v| v * s).collect() }
    }

    /// Sum of tangent vectors at the same base.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.base != other.base {
            return Err(Error::BaseMismatch);
        }
        Ok(Self { base: self.base.clone(), vec: self.vec.iter().zip(&other.vec).map(|(&a, &b)| a + b).collect() })
    }

    pub fn norm(&self) -> T {
        inner(self, self).map(|v| v.max(T::zero()).sqrt()).unwrap_or_else(|_| T::nan())
    }

    pub fn exp(&self) -> Result<ManifoldPoint<T>> {
        exp_map(self)
    }

    fn spd_parts(&self, n: usize) -> Result<(SpdMatrix<T>, SquareMatrix<T>)> {
        let s = self.base.as_spd().ok_or(Error::UnsupportedManifold(self.manifold()))?;
        Ok((s, SquareMatrix::from_row_major(n, self.vec.clone())?))
    }
}

/// Geodesic distance.
pub fn distance<T: Real>(p: &ManifoldPoint<T>, q: &ManifoldPoint<T>) -> Result<T> {
    p.manifold.check_same(q.manifold)?;
    let (a, b) = (&p.coords, &q.coords);
    if a == b {
        return Ok(T::zero());
    }
    Ok(match p.manifold {
        ManifoldId::Euclidean(_) => euclidean_distance(a, b),
        ManifoldId::Circle => circle::circle_distance(a[0], b[0]),
        ManifoldId::Sphere2 => sphere::sphere_distance(&as3(a), &as3(b)),
        ManifoldId::Hyperbolic2 => hyperbolic::h2_distance(&as2(a), &as2(b)),
        ManifoldId::Spd(_) => {
            let (s1, s2) = (p.as_spd().expect("spd point"), q.as_spd().expect("spd point"));
            spd::spd_distance(&s1, &s2)?
        }
    })
}

/// Riemannian exponential map.
pub fn exp_map<T: Real>(v: &TangentVector<T>) -> Result<ManifoldPoint<T>> {
    let m = v.manifold();
    let (p, w) = (&v.base.coords, &v.vec);
    let coords = match m {
        ManifoldId::Euclidean(_) => euclidean_exp(p, w),
        ManifoldId::Circle => vec![circle::circle_exp(p[0], w[0])],
        ManifoldId::Sphere2 => sphere::sphere_exp(&as3(p), &as3(w)).to_vec(),
        ManifoldId::Hyperbolic2 => hyperbolic::h2_exp(&as2(p), &as2(w)).to_vec(),
        ManifoldId::Spd(n) => {
            let (s, w) = v.spd_parts(n)?;
            return Ok(ManifoldPoint::spd(spd::spd_exp(&s, &w)?));
        }
    };
    ManifoldPoint::new(m, coords)
}

/// Riemannian logarithm map `log_p(q)`.
pub fn log_map<T: Real>(p: &ManifoldPoint<T>, q: &ManifoldPoint<T>) -> Result<TangentVector<T>> {
    p.manifold.check_same(q.manifold)?;
    let (a, b) = (&p.coords, &q.coords);
    let vec = match p.manifold {
        ManifoldId::Euclidean(_) => euclidean_log(a, b),
        ManifoldId::Circle => vec![circle::circle_log(a[0], b[0])],
        ManifoldId::Sphere2 => sphere::sphere_log(&as3(a), &as3(b))?.to_vec(),
        ManifoldId::Hyperbolic2 => hyperbolic::h2_log(&as2(a), &as2(b)).to_vec(),
        ManifoldId::Spd(_) => {
            let (s1, s2) = (p.as_spd().expect("spd point"), q.as_spd().expect("spd point"));
            spd::spd_log(&s1, &s2)?.into_vec()
        }
    };
    TangentVector::new(p.clone(), vec)
}

/// Riemannian inner product of two tangent vectors at the same base.
pub fn inner<T: Real>(u: &TangentVector<T>, w: &TangentVector<T>) -> Result<T> {
    if u.base != w.base {
        return Err(Error::BaseMismatch);
    }
    let dot = || u.vec.iter().zip(&w.vec).map(|(&a, &b)| a * b).sum::<T>();
    Ok(match u.manifold() {
        ManifoldId::Euclidean(_) | ManifoldId::Circle | ManifoldId::Sphere2 => dot(),
        ManifoldId::Hyperbolic2 => {
            let y = u.base.coords[1];
            dot() / (y * y)
        }
        ManifoldId::Spd(n) => {
            let (s, a) = u.spd_parts(n)?;
            let b = SquareMatrix::from_row_major(n, w.vec.clone())?;
            spd::spd_inner(&s, &a, &b)?
        }
    })
}

/// An orthonormal basis of `T_p M`, for normal-coordinate computations.
pub fn tangent_basis<T: Real>(p: &ManifoldPoint<T>) -> Vec<TangentVector<T>> {
    let m = p.manifold;
    let raw: Vec<Vec<T>> = match m {
        ManifoldId::Euclidean(d) => {
            (0..d).map(|i| (0..d).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect()
        }
        ManifoldId::Circle => vec![vec![T::one()]],
        ManifoldId::Sphere2 => {
            let n = as3(&p.coords);
            // pick the axis least aligned with n
            let axis = if n[0].abs() <= n[1].abs() && n[0].abs() <= n[2].abs() {
                [T::one(), T::zero(), T::zero()]
            } else if n[1].abs() <= n[2].abs() {
                [T::zero(), T::one(), T::zero()]
            } else {
                [T::zero(), T::zero(), T::one()]
            };
            let e1 = sphere::cross(&n, &axis);
            let l = sphere::norm(&e1);
            let e1 = [e1[0] / l, e1[1] / l, e1[2] / l];
            let e2 = sphere::cross(&n, &e1);
            vec![e1.to_vec(), e2.to_vec()]
        }
        ManifoldId::Hyperbolic2 => {
            let y = p.coords[1];
            vec![vec![y, T::zero()], vec![T::zero(), y]]
        }
        ManifoldId::Spd(_) => {
            let s = p.as_spd().expect("spd point");
            spd::spd_tangent_basis(&s).into_iter().map(SquareMatrix::into_vec).collect()
        }
    };
    raw.into_iter().map(|v| TangentVector::new(p.clone(), v).expect("basis vectors are tangent")).collect()
}

/// Tangent vector `Σ cᵢ eᵢ` for the basis returned by [`tangent_basis`].
pub fn from_basis<T: Real>(basis: &[TangentVector<T>], coeffs: &[T]) -> Result<TangentVector<T>> {
    let first = basis.first().ok_or(Error::EmptyData)?;
    let mut acc = first.base.zero_tangent();
    for (e, &c) in basis.iter().zip(coeffs) {
        acc = acc.add(&e.scale(c))?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn parse_manifold_ids() {
        assert_eq!("circle".parse::<ManifoldId>().unwrap(), ManifoldId::Circle);
        assert_eq!("spd(2)".parse::<ManifoldId>().unwrap(), ManifoldId::Spd(2));
        assert_eq!("euclidean:3".parse::<ManifoldId>().unwrap(), ManifoldId::Euclidean(3));
        assert!("spd(1)".parse::<ManifoldId>().is_err());
        assert!("euclidean(0)".parse::<ManifoldId>().is_err());
        assert!("torus".parse::<ManifoldId>().is_err());
    }

    #[test]
    fn membership_and_reprojection() {
        let p = ManifoldPoint::sphere([0.0, 0.0, 1.0 + 5e-10]).unwrap();
        assert_eq!(p.coords()[2], 1.0);
        assert!(ManifoldPoint::sphere([0.0, 0.0, 1.0 + 1e-6]).is_err());
        assert!(ManifoldPoint::hyperbolic(0.0, 0.0).is_err());
        assert!(ManifoldPoint::hyperbolic(0.0, -1.0).is_err());
        let c = ManifoldPoint::circle(-PI / 2.0);
        assert!((c.coords()[0] - 1.5 * PI).abs() < 1e-15);
        assert!(ManifoldId::Spd(2).point(vec![1.0, 0.0, 0.0, -1.0]).is_err());
        assert!(ManifoldPoint::new(ManifoldId::Euclidean(2), vec![1.0]).is_err());
        assert!(ManifoldPoint::euclidean(vec![f64::NAN]).is_err());
    }

    #[test]
    fn tangency_checks() {
        let p = ManifoldPoint::sphere([0.0, 0.0, 1.0]).unwrap();
        assert!(TangentVector::new(p.clone(), vec![1.0, 0.0, 0.1]).is_err());
        let v = TangentVector::new(p, vec![1.0, 0.0, 1e-11]).unwrap();
        assert_eq!(v.vec()[2], 0.0);
        let s = ManifoldPoint::spd(SpdMatrix::identity(2));
        assert!(TangentVector::new(s, vec![1.0, 0.5, 0.0, 1.0]).is_err());
    }

    #[test]
    fn mismatch_errors() {
        let a = ManifoldPoint::circle(0.0);
        let b = ManifoldPoint::euclidean(vec![0.0]).unwrap();
        assert!(matches!(distance(&a, &b), Err(Error::ManifoldMismatch { .. })));
        assert!(matches!(log_map(&a, &b), Err(Error::ManifoldMismatch { .. })));
        let u = a.zero_tangent();
        let w = ManifoldPoint::circle(1.0).zero_tangent();
        assert!(matches!(inner(&u, &w), Err(Error::BaseMismatch)));
    }

    #[test]
    fn inner_examples() {
        let p = ManifoldPoint::euclidean(vec![0.0, 0.0]).unwrap();
        let e1 = TangentVector::new(p.clone(), vec![1.0, 0.0]).unwrap();
        let e2 = TangentVector::new(p.clone(), vec![0.0, 1.0]).unwrap();
        assert_eq!(inner(&e1, &e2).unwrap(), 0.0);
        let v = TangentVector::new(p, vec![2.0, 0.0]).unwrap();
        assert_eq!(inner(&v, &v).unwrap(), 4.0);
        assert_eq!(v.norm(), 2.0);
        let s = ManifoldPoint::spd(SpdMatrix::<f64>::identity(2));
        let w = TangentVector::new(s, vec![1.0, 2.0, 2.0, 3.0]).unwrap();
        assert!((inner(&w, &w).unwrap() - 18.0).abs() < 1e-14);
    }

    #[test]
    fn zero_vector_and_self_log() {
        let pts = [
            ManifoldPoint::euclidean(vec![1.0, -2.0]).unwrap(),
            ManifoldPoint::circle(2.0),
            ManifoldPoint::sphere([0.6, 0.0, 0.8]).unwrap(),
            ManifoldPoint::hyperbolic(0.3, 1.7).unwrap(),
            ManifoldPoint::spd(SpdMatrix::from_row_major(2, vec![2.0, 0.3, 0.3, 1.0]).unwrap()),
        ];
        for p in pts {
            assert_eq!(distance(&p, &p).unwrap(), 0.0);
            let q = exp_map(&p.zero_tangent()).unwrap();
            assert!(distance(&p, &q).unwrap() < 1e-12);
            assert!(log_map(&p, &p).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn basis_orthonormal_everywhere() {
        let pts = [
            ManifoldPoint::sphere([0.0, 0.6, 0.8]).unwrap(),
            ManifoldPoint::hyperbolic(-1.0, 0.25).unwrap(),
            ManifoldPoint::spd(SpdMatrix::from_row_major(2, vec![2.0, 0.3, 0.3, 1.0]).unwrap()),
        ];
        for p in pts {
            let b = tangent_basis(&p);
            assert_eq!(b.len(), p.manifold().dim());
            for (i, u) in b.iter().enumerate() {
                for (j, w) in b.iter().enumerate() {
                    let want: f64 = if i == j { 1.0 } else { 0.0 };
                    assert!((inner(u, w).unwrap() - want).abs() < 1e-12);
                }
            }
        }
    }
}
