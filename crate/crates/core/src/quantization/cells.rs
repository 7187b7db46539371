use super::codebook::{Codebook, QuantizedMeasure};
use crate::error::{Error, Result};
use crate::manifold::{distance, log_map, ManifoldPoint, TangentVector};
use crate::scalar::Real;

fn check_data<T: Real>(data: &[ManifoldPoint<T>]) -> Result<()> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    Ok(())
}

/// Nearest center and its distance, ties to the lowest index.
pub(crate) fn nearest<T: Real>(codebook: &Codebook<T>, x: &ManifoldPoint<T>) -> Result<(usize, T)> {
    let mut best = (0, T::infinity());
    for (i, c) in codebook.centers().iter().enumerate() {
        let d = distance(c, x)?;
        if d < best.1 {
            best = (i, d);
        }
    }
    Ok(best)
}

/// Index (0-based) of the Voronoi cell containing `x`.
pub fn voronoi_assign<T: Real>(codebook: &Codebook<T>, x: &ManifoldPoint<T>) -> Result<usize> {
    nearest(codebook, x).map(|(i, _)| i)
}

/// `(1/N) Σₖ minᵢ d(xₖ, aᵢ)^p`.
pub fn empirical_distortion<T: Real>(codebook: &Codebook<T>, data: &[ManifoldPoint<T>], p: T) -> Result<T> {
    check_data(data)?;
    if !(p >= T::one()) {
        return Err(Error::InvalidParameter(format!("distortion order must be >= 1, got {p}")));
    }
    let two = T::c(2.0);
    let mut acc = T::zero();
    for x in data {
        let (_, d) = nearest(codebook, x)?;
        acc = acc + if p == two { d * d } else { d.powf(p) };
    }
    Ok(acc / T::from_count(data.len()))
}

/// Gradient of the quadratic empirical distortion: component `i` is
/// `−(2/N) Σ_{x ∈ Cᵢ} log_{aᵢ}(x)`.
pub fn distortion_gradient<T: Real>(
    codebook: &Codebook<T>,
    data: &[ManifoldPoint<T>],
) -> Result<Vec<TangentVector<T>>> {
    check_data(data)?;
    let mut sums: Vec<TangentVector<T>> = codebook.centers().iter().map(|c| c.zero_tangent()).collect();
    for x in data {
        let (i, _) = nearest(codebook, x)?;
        let l = log_map(&codebook.centers()[i], x)?;
        sums[i] = sums[i].add(&l)?;
    }
    let k = -T::c(2.0) / T::from_count(data.len());
    Ok(sums.into_iter().map(|s| s.scale(k)).collect())
}

/// Norm of a product-manifold tangent vector `(g₁, …, gₙ)`.
pub fn gradient_norm<T: Real>(grad: &[TangentVector<T>]) -> T {
    grad.iter()
        .map(|g| {
            let n = g.norm();
            n * n
        })
        .sum::<T>()
        .sqrt()
}

/// Quantized measure `Σ μ(Cᵢ) δ_{aᵢ}` with empirical cell masses.
pub fn quantized_measure<T: Real>(codebook: &Codebook<T>, data: &[ManifoldPoint<T>]) -> Result<QuantizedMeasure<T>> {
    check_data(data)?;
    let mut counts = vec![0usize; codebook.len()];
    for x in data {
        counts[voronoi_assign(codebook, x)?] += 1;
    }
    QuantizedMeasure::from_counts(codebook.clone(), counts)
}
