use crate::error::{Error, Result};
use crate::manifold::{exp_map, log_map, ManifoldPoint};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug)]
pub struct KarcherOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for KarcherOptions {
    fn default() -> Self {
        Self { tol: 1e-9, max_iter: 200 }
    }
}

#[derive(Clone, Debug)]
pub struct KarcherMean<T> {
    pub mean: ManifoldPoint<T>,
    pub iterations: usize,
    /// `‖(1/N) Σ log_x̄(xᵢ)‖` at the returned point.
    pub gradient_norm: T,
    pub converged: bool,
}

/// Fréchet mean by the Karcher flow `x̄ ← exp_x̄((1/N) Σ log_x̄(xᵢ))`,
/// started from the first data point.
pub fn karcher_mean<T: Real>(data: &[ManifoldPoint<T>], opts: KarcherOptions) -> Result<KarcherMean<T>> {
    let first = data.first().ok_or(Error::EmptyData)?;
    for x in data {
        if x.manifold() != first.manifold() {
            return Err(Error::ManifoldMismatch { expected: first.manifold(), found: x.manifold() });
        }
    }
    let inv_n = T::from_count(data.len()).recip();
    let mut mean = first.clone();
    let mut iterations = 0;
    loop {
        let mut g = mean.zero_tangent();
        for x in data {
            g = g.add(&log_map(&mean, x)?)?;
        }
        let g = g.scale(inv_n);
        let norm = g.norm();
        if norm < T::c(opts.tol) || iterations >= opts.max_iter {
            return Ok(KarcherMean { mean, iterations, gradient_norm: norm, converged: norm < T::c(opts.tol) });
        }
        mean = exp_map(&g)?;
        iterations += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::distance;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn circle_midpoint() {
        let r =
            karcher_mean(&[ManifoldPoint::circle(0.0), ManifoldPoint::circle(FRAC_PI_2)], KarcherOptions::default())
                .unwrap();
        assert!(r.converged);
        assert!((r.mean.coords()[0] - FRAC_PI_4).abs() < 1e-12);
    }

    #[test]
    fn euclidean_arithmetic_mean() {
        let pts: Vec<_> = [[1.0_f64, 2.0], [3.0, -1.0], [5.0, 5.0]]
            .iter()
            .map(|c| ManifoldPoint::euclidean(c.to_vec()).unwrap())
            .collect();
        let r = karcher_mean(&pts, KarcherOptions::default()).unwrap();
        assert!((r.mean.coords()[0] - 3.0).abs() < 1e-14 && (r.mean.coords()[1] - 2.0).abs() < 1e-14);
        assert!(r.iterations <= 2);
    }

    #[test]
    fn sphere_symmetric_triple_gives_pole() {
        let lat = 0.6_f64;
        let pts: Vec<_> = (0..3)
            .map(|k| {
                let lon = k as f64 * std::f64::consts::TAU / 3.0;
                ManifoldPoint::sphere([lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()]).unwrap()
            })
            .collect();
        let r = karcher_mean(&pts, KarcherOptions::default()).unwrap();
        assert!(r.converged, "{r:?}");
        let pole = ManifoldPoint::sphere([0.0, 0.0, 1.0]).unwrap();
        assert!(distance(&r.mean, &pole).unwrap() < 1e-8);
    }

    #[test]
    fn empty_and_max_iter() {
        assert!(karcher_mean::<f64>(&[], KarcherOptions::default()).is_err());
        let pts = [ManifoldPoint::hyperbolic(0.0, 1.0).unwrap(), ManifoldPoint::hyperbolic(3.0, 0.2).unwrap()];
        let r = karcher_mean(&pts, KarcherOptions { tol: 0.0, max_iter: 3 }).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
    }
}
