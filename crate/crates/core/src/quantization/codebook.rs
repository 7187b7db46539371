use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{distance, ManifoldId, ManifoldPoint, PointRepr};
use crate::scalar::Real;

/// Centers closer than this are considered equal.
pub const DISTINCT_TOL: f64 = 1e-10;

/// Ordered tuple of pairwise-distinct centers on one manifold.
#[derive(Clone, Debug, PartialEq)]
pub struct Codebook<T> {
    manifold: ManifoldId,
    centers: Vec<ManifoldPoint<T>>,
}

impl<T: Real> Codebook<T> {
    pub fn new(centers: Vec<ManifoldPoint<T>>) -> Result<Self> {
        let first =
            centers.first().ok_or_else(|| Error::InvalidParameter("codebook needs at least one center".into()))?;
        let manifold = first.manifold();
        for c in &centers {
            if c.manifold() != manifold {
                return Err(Error::ManifoldMismatch { expected: manifold, found: c.manifold() });
            }
        }
        for i in 0..centers.len() {
            for j in (i + 1)..centers.len() {
                if distance(&centers[i], &centers[j])? <= T::c(DISTINCT_TOL) {
                    return Err(Error::InvalidParameter(format!("centers {i} and {j} coincide")));
                }
            }
        }
        Ok(Self { manifold, centers })
    }

    /// Caller guarantees a nonempty, single-manifold, pairwise-distinct support.
    pub(crate) fn from_distinct(centers: Vec<ManifoldPoint<T>>) -> Self {
        Self { manifold: centers[0].manifold(), centers }
    }

    pub fn manifold(&self) -> ManifoldId {
        self.manifold
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn centers(&self) -> &[ManifoldPoint<T>] {
        &self.centers
    }

    pub fn into_centers(self) -> Vec<ManifoldPoint<T>> {
        self.centers
    }

    /// Smallest pairwise distance between centers (`∞` for one center).
    pub fn min_separation(&self) -> Result<T> {
        let mut best = T::infinity();
        for i in 0..self.centers.len() {
            for j in (i + 1)..self.centers.len() {
                best = best.min(distance(&self.centers[i], &self.centers[j])?);
            }
        }
        Ok(best)
    }

    /// Reorders centers: new center `k` is old center `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self { manifold: self.manifold, centers: order.iter().map(|&i| self.centers[i].clone()).collect() }
    }

    pub(crate) fn replace(&mut self, i: usize, p: ManifoldPoint<T>) {
        self.centers[i] = p;
    }
}

/// Discrete measure `Σ wᵢ δ_{aᵢ}` on the centers of a codebook.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantizedMeasure<T> {
    codebook: Codebook<T>,
    weights: Vec<T>,
    counts: Option<Vec<usize>>,
}

fn weight_tol<T: Real>() -> T {
    T::c(1e-12).max(T::epsilon() * T::c(64.0))
}

impl<T: Real> QuantizedMeasure<T> {
    /// Weights must be nonnegative and sum to one.
    pub fn new(codebook: Codebook<T>, weights: Vec<T>) -> Result<Self> {
        if weights.len() != codebook.len() {
            return Err(Error::SizeMismatch(weights.len(), codebook.len()));
        }
        let total: T = weights.iter().copied().sum();
        if weights.iter().any(|&w| !(w >= T::zero())) || (total - T::one()).abs() > weight_tol::<T>() {
            return Err(Error::InvalidWeights(total.f64()));
        }
        Ok(Self { codebook, weights, counts: None })
    }

    /// Weights `countᵢ / N`.
    pub fn from_counts(codebook: Codebook<T>, counts: Vec<usize>) -> Result<Self> {
        if counts.len() != codebook.len() {
            return Err(Error::SizeMismatch(counts.len(), codebook.len()));
        }
        let total: usize = counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptyData);
        }
        let n = T::from_count(total);
        let weights = counts.iter().map(|&c| T::from_count(c) / n).collect();
        Ok(Self { codebook, weights, counts: Some(counts) })
    }

    /// Single Dirac mass.
    pub fn dirac(p: ManifoldPoint<T>) -> Self {
        Self { codebook: Codebook { manifold: p.manifold(), centers: vec![p] }, weights: vec![T::one()], counts: None }
    }

    pub fn codebook(&self) -> &Codebook<T> {
        &self.codebook
    }

    pub fn atoms(&self) -> &[ManifoldPoint<T>] {
        self.codebook.centers()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Cell counts when built from data.
    pub fn counts(&self) -> Option<&[usize]> {
        self.counts.as_deref()
    }

    pub fn manifold(&self) -> ManifoldId {
        self.codebook.manifold()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            codebook: self.codebook.permuted(order),
            weights: order.iter().map(|&i| self.weights[i]).collect(),
            counts: self.counts.as_ref().map(|c| order.iter().map(|&i| c[i]).collect()),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    manifold: String,
    atoms: Vec<PointRepr>,
    weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    counts: Option<Vec<usize>>,
}

impl<T: Real> Serialize for QuantizedMeasure<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MeasureRepr {
            manifold: self.manifold().to_string(),
            atoms: self.atoms().iter().map(PointRepr::from_point).collect(),
            weights: self.weights.iter().map(|w| w.f64()).collect(),
            counts: self.counts.clone(),
        }
        .serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for QuantizedMeasure<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = MeasureRepr::deserialize(d)?;
        let atoms =
            r.atoms.into_iter().map(PointRepr::into_point).collect::<Result<Vec<_>>>().map_err(D::Error::custom)?;
        let cb = Codebook::new(atoms).map_err(D::Error::custom)?;
        match r.counts {
            Some(c) => QuantizedMeasure::from_counts(cb, c),
            None => QuantizedMeasure::new(cb, r.weights.into_iter().map(T::c).collect()),
        }
        .map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct CodebookRepr {
    manifold: String,
    centers: Vec<PointRepr>,
}

impl<T: Real> Serialize for Codebook<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CodebookRepr {
            manifold: self.manifold.to_string(),
            centers: self.centers.iter().map(PointRepr::from_point).collect(),
        }
        .serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for Codebook<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = CodebookRepr::deserialize(d)?;
        let centers =
            r.centers.into_iter().map(PointRepr::into_point).collect::<Result<Vec<_>>>().map_err(D::Error::custom)?;
        Codebook::new(centers).map_err(D::Error::custom)
    }
}
