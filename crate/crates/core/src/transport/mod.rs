//! Optimal transport between discrete measures on a manifold.

mod circle;
mod simplex;

use serde::Serialize;

pub use circle::circle_w1;
pub use simplex::solve_transportation;

use crate::error::{Error, Result};
use crate::manifold::{distance, ManifoldId, ManifoldPoint};
use crate::quantization::{Codebook, QuantizedMeasure, DISTINCT_TOL};
use crate::scalar::Real;

/// Largest support accepted by [`discrete_wasserstein`].
pub const MAX_ATOMS: usize = 256;

/// Optimal coupling between two discrete measures.
#[derive(Clone, Debug, PartialEq)]
pub struct TransportPlan<T> {
    /// `matrix[i][j]`: mass moved from source atom `i` to target atom `j`.
    pub matrix: Vec<Vec<T>>,
    /// `(Σ πᵢⱼ d(Aᵢ, Bⱼ)^p)^{1/p}`.
    pub cost: T,
    pub exponent: T,
}

impl<T: Real> TransportPlan<T> {
    /// Largest deviation of a row or column sum from the prescribed marginals.
    pub fn marginal_error(&self, source: &[T], target: &[T]) -> T {
        let mut worst = T::zero();
        for (row, &a) in self.matrix.iter().zip(source) {
            worst = worst.max((row.iter().copied().sum::<T>() - a).abs());
        }
        for (j, &b) in target.iter().enumerate() {
            let col: T = self.matrix.iter().map(|r| r[j]).sum();
            worst = worst.max((col - b).abs());
        }
        worst
    }
}

impl<T: Real> Serialize for TransportPlan<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            cost: f64,
            exponent: f64,
            plan: Vec<Vec<f64>>,
        }
        Repr {
            cost: self.cost.f64(),
            exponent: self.exponent.f64(),
            plan: self.matrix.iter().map(|r| r.iter().map(|v| v.f64()).collect()).collect(),
        }
        .serialize(s)
    }
}

fn check_exponent<T: Real>(p: T) -> Result<()> {
    if !(p >= T::one()) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("transport exponent must be >= 1, got {p}")));
    }
    Ok(())
}

/// Ground-cost matrix `d(Aᵢ, Bⱼ)^p`.
pub fn cost_matrix<T: Real>(src: &[ManifoldPoint<T>], dst: &[ManifoldPoint<T>], p: T) -> Result<Vec<Vec<T>>> {
    src.iter()
        .map(|a| dst.iter().map(|b| distance(a, b).map(|d| if p == T::one() { d } else { d.powf(p) })).collect())
        .collect()
}

/// Discrete `L^p` Wasserstein distance with geodesic ground cost, solved
/// exactly as a transportation problem.
pub fn discrete_wasserstein<T: Real>(
    mu: &QuantizedMeasure<T>,
    nu: &QuantizedMeasure<T>,
    p: T,
) -> Result<(T, TransportPlan<T>)> {
    check_exponent(p)?;
    if mu.manifold() != nu.manifold() {
        return Err(Error::ManifoldMismatch { expected: mu.manifold(), found: nu.manifold() });
    }
    if mu.len() > MAX_ATOMS || nu.len() > MAX_ATOMS {
        return Err(Error::InvalidParameter(format!(
            "supports limited to {MAX_ATOMS} atoms ({} and {})",
            mu.len(),
            nu.len()
        )));
    }
    let costs = cost_matrix(mu.atoms(), nu.atoms(), p)?;
    let matrix = solve_transportation(&costs, mu.weights(), nu.weights())?;
    let mut total = T::zero();
    for (row, crow) in matrix.iter().zip(&costs) {
        for (&x, &c) in row.iter().zip(crow) {
            total = total + x * c;
        }
    }
    let total = total.max(T::zero());
    let cost = if p == T::one() { total } else { total.powf(p.recip()) };
    Ok((cost, TransportPlan { matrix, cost, exponent: p }))
}

/// Merges atoms closer than [`DISTINCT_TOL`], summing their weights.
/// Returns the merged support and, for each input atom, its merged index.
pub fn merge_atoms<T: Real>(points: &[ManifoldPoint<T>]) -> Result<(Vec<ManifoldPoint<T>>, Vec<usize>)> {
    let first = points.first().ok_or(Error::EmptyData)?;
    let tol = T::c(DISTINCT_TOL);
    if first.manifold() == ManifoldId::Circle {
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[a].coords()[0].partial_cmp(&points[b].coords()[0]).unwrap());
        let mut support: Vec<ManifoldPoint<T>> = Vec::new();
        let mut index = vec![0usize; points.len()];
        for &k in &order {
            let p = &points[k];
            if p.manifold() != ManifoldId::Circle {
                return Err(Error::ManifoldMismatch { expected: ManifoldId::Circle, found: p.manifold() });
            }
            match support.last() {
                Some(last) if distance(last, p)? <= tol => {}
                _ => support.push(p.clone()),
            }
            index[k] = support.len() - 1;
        }
        // wraparound: last atom within tolerance of the first
        if support.len() > 1 && distance(&support[0], support.last().unwrap())? <= tol {
            let last = support.len() - 1;
            support.pop();
            index.iter_mut().filter(|i| **i == last).for_each(|i| *i = 0);
        }
        return Ok((support, index));
    }
    let mut support: Vec<ManifoldPoint<T>> = Vec::new();
    let mut index = Vec::with_capacity(points.len());
    'outer: for p in points {
        for (k, s) in support.iter().enumerate() {
            if distance(s, p)? <= tol {
                index.push(k);
                continue 'outer;
            }
        }
        support.push(p.clone());
        index.push(support.len() - 1);
    }
    Ok((support, index))
}

/// Empirical measure `(1/N) Σ δ_{xₖ}` with coincident atoms merged.
pub fn empirical_measure<T: Real>(points: &[ManifoldPoint<T>]) -> Result<QuantizedMeasure<T>> {
    let (support, index) = merge_atoms(points)?;
    let mut counts = vec![0usize; support.len()];
    for i in index {
        counts[i] += 1;
    }
    QuantizedMeasure::from_counts(Codebook::from_distinct(support), counts)
}

/// Result of comparing two measures on the union of their supports.
#[derive(Clone, Debug)]
pub struct PaddedComparison<T> {
    pub cost: T,
    pub plan: TransportPlan<T>,
    pub support: Codebook<T>,
    pub source: QuantizedMeasure<T>,
    pub target: QuantizedMeasure<T>,
}

/// Re-expresses both measures on the union of their supports (zero mass on
/// missing atoms) and solves the transport problem there.
pub fn padded_union_compare<T: Real>(
    mu: &QuantizedMeasure<T>,
    nu: &QuantizedMeasure<T>,
    p: T,
) -> Result<PaddedComparison<T>> {
    if mu.manifold() != nu.manifold() {
        return Err(Error::ManifoldMismatch { expected: mu.manifold(), found: nu.manifold() });
    }
    let all: Vec<ManifoldPoint<T>> = mu.atoms().iter().chain(nu.atoms()).cloned().collect();
    let (support, index) = merge_atoms(&all)?;
    let mut wa = vec![T::zero(); support.len()];
    let mut wb = vec![T::zero(); support.len()];
    for (k, &w) in mu.weights().iter().enumerate() {
        wa[index[k]] = wa[index[k]] + w;
    }
    for (k, &w) in nu.weights().iter().enumerate() {
        let i = index[mu.len() + k];
        wb[i] = wb[i] + w;
    }
    let support = Codebook::from_distinct(support);
    let source = QuantizedMeasure::new(support.clone(), wa)?;
    let target = QuantizedMeasure::new(support.clone(), wb)?;
    let (cost, plan) = discrete_wasserstein(&source, &target, p)?;
    Ok(PaddedComparison { cost, plan, support, source, target })
}
