use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::scalar::Real;
use crate::spd::SpdMatrix;

use super::TrafficSample;

/// Default Tikhonov term added to every covariance estimate.
pub const DEFAULT_RIDGE: f64 = 1e-8;

/// Truncated Gaussian kernel `K_h(d) = h⁻¹ φ(d/h) 1{d < r}` on the Euclidean
/// distance `d`, with `r` the support radius in position units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelConfig<T> {
    pub bandwidth: T,
    pub radius: T,
}

impl<T: Real> KernelConfig<T> {
    pub fn new(bandwidth: T, radius: T) -> Result<Self> {
        let cfg = Self { bandwidth, radius };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Bandwidth defaults to a third of the radius.
    pub fn from_radius(radius: T) -> Result<Self> {
        Self::new(radius / T::c(3.0), radius)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("bandwidth", self.bandwidth), ("radius", self.radius)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("kernel {name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    /// True when the support is narrower than one bandwidth.
    pub fn is_narrow(&self) -> bool {
        self.radius < self.bandwidth
    }

    pub fn weight(&self, d: T) -> T {
        if d >= self.radius {
            return T::zero();
        }
        let u = d / self.bandwidth;
        (-(u * u) * T::c(0.5)).exp() / (T::TAU().sqrt() * self.bandwidth)
    }
}

fn check_ridge<T: Real>(ridge: T) -> Result<()> {
    if !(ridge >= T::zero()) || !ridge.is_finite() {
        return Err(Error::InvalidParameter(format!("ridge must be >= 0, got {ridge}")));
    }
    Ok(())
}

/// Weighted mean and covariance over the given sample indices (ascending).
fn estimate_from<T: Real>(
    samples: &[TrafficSample<T>],
    idx: &[usize],
    z: [T; 2],
    cfg: &KernelConfig<T>,
    ridge: T,
) -> Result<([T; 2], SpdMatrix<T>)> {
    let mut wsum = T::zero();
    let mut m = [T::zero(); 2];
    let mut weights = Vec::with_capacity(idx.len());
    for &i in idx {
        let s = &samples[i];
        let w = cfg.weight(((z[0] - s.z[0]).powi(2) + (z[1] - s.z[1]).powi(2)).sqrt());
        weights.push(w);
        wsum = wsum + w;
        m[0] = m[0] + w * s.v[0];
        m[1] = m[1] + w * s.v[1];
    }
    if weights.iter().all(|&w| w == T::zero()) {
        return Err(Error::EmptyKernel { x: z[0].f64(), y: z[1].f64() });
    }
    if !(wsum > T::zero()) {
        return Err(Error::Numerical("kernel weights sum to a nonpositive value".into()));
    }
    m = [m[0] / wsum, m[1] / wsum];
    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&i, &w) in idx.iter().zip(&weights) {
        let dx = samples[i].v[0] - m[0];
        let dy = samples[i].v[1] - m[1];
        sxx = sxx + w * dx * dx;
        sxy = sxy + w * dx * dy;
        syy = syy + w * dy * dy;
    }
    let (sxx, sxy, syy) = (sxx / wsum + ridge, sxy / wsum, syy / wsum + ridge);
    let cov = SpdMatrix::new(SquareMatrix::from_row_major(2, vec![sxx, sxy, sxy, syy])?)?;
    Ok((m, cov))
}

/// Nadaraya–Watson estimates of the local velocity mean and covariance at
/// `z`; the covariance is returned as `Σ̂(z) + ridge·I`.
pub fn nw_estimate<T: Real>(
    samples: &[TrafficSample<T>],
    z: [T; 2],
    cfg: &KernelConfig<T>,
    ridge: T,
) -> Result<([T; 2], SpdMatrix<T>)> {
    cfg.validate()?;
    check_ridge(ridge)?;
    let idx: Vec<usize> = (0..samples.len()).collect();
    estimate_from(samples, &idx, z, cfg, ridge)
}

/// Samples bucketed on a grid of cell size `r` for fast kernel queries.
/// Results match [`nw_estimate`] exactly: contributions are summed in
/// ascending sample order in both.
pub struct KernelField<'a, T> {
    samples: &'a [TrafficSample<T>],
    cfg: KernelConfig<T>,
    ridge: T,
    cells: HashMap<(i64, i64), Vec<usize>>,
}

impl<'a, T: Real> KernelField<'a, T> {
    pub fn new(samples: &'a [TrafficSample<T>], cfg: KernelConfig<T>, ridge: T) -> Result<Self> {
        cfg.validate()?;
        check_ridge(ridge)?;
        let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, s) in samples.iter().enumerate() {
            cells.entry(Self::key(&cfg, s.z)).or_default().push(i);
        }
        Ok(Self { samples, cfg, ridge, cells })
    }

    fn key(cfg: &KernelConfig<T>, z: [T; 2]) -> (i64, i64) {
        let cell = |c: T| (c / cfg.radius).floor().to_i64().unwrap_or(i64::MAX);
        (cell(z[0]), cell(z[1]))
    }

    /// Indices of samples within the support of `z`, ascending.
    pub fn neighbors(&self, z: [T; 2]) -> Vec<usize> {
        let (cx, cy) = Self::key(&self.cfg, z);
        let mut out = Vec::new();
        for dx in -1..=1i64 {
            for dy in -1..=1i64 {
                if let Some(v) = self.cells.get(&(cx.saturating_add(dx), cy.saturating_add(dy))) {
                    out.extend(v.iter().copied().filter(|&i| {
                        let s = &self.samples[i];
                        ((z[0] - s.z[0]).powi(2) + (z[1] - s.z[1]).powi(2)).sqrt() < self.cfg.radius
                    }));
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn estimate(&self, z: [T; 2]) -> Result<([T; 2], SpdMatrix<T>)> {
        let idx = self.neighbors(z);
        if idx.is_empty() {
            return Err(Error::EmptyKernel { x: z[0].f64(), y: z[1].f64() });
        }
        estimate_from(self.samples, &idx, z, &self.cfg, self.ridge)
    }
}
