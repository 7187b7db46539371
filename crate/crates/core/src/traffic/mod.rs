//! Traffic-complexity pipeline: covariance field estimation from aircraft
//! positions and velocities, SPD quantization, and summary comparison.

mod geo;
mod ingest;
mod kernel;
mod pipeline;
mod svg;
mod synthetic;

pub use geo::{project_planar, EARTH_RADIUS_KM};
pub use ingest::{ingest_traffic_csv, parse_traffic_csv, IngestOptions, IngestReport, RowDiagnostic};
pub use kernel::{nw_estimate, KernelConfig, KernelField, DEFAULT_RIDGE};
pub use pipeline::{atm_quantize, compare_measures, compare_summaries, AtmConfig, OrderStatus, TrafficSummary};
pub use svg::scatter_svg;
pub use synthetic::{generate_scenario, Scenario, ScenarioConfig};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Planar aircraft state: position `z` and velocity `v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrafficSample<T> {
    pub z: [T; 2],
    pub v: [T; 2],
}

impl<T: Real> TrafficSample<T> {
    pub fn new(z: [T; 2], v: [T; 2]) -> Result<Self> {
        if z.iter().chain(&v).any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("traffic sample components must be finite".into()));
        }
        Ok(Self { z, v })
    }
}

/// Affine map applied by [`standardize_velocities`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub mean: [f64; 2],
    /// Population standard deviation (divisor `N`).
    pub std: [f64; 2],
    /// Components with no spread: centered to exactly zero and not scaled.
    pub degenerate: [bool; 2],
}

/// Centers each velocity component and scales it to unit population
/// standard deviation.
pub fn standardize_velocities<T: Real>(
    samples: &[TrafficSample<T>],
) -> Result<(Vec<TrafficSample<T>>, Standardization)> {
    if samples.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "standardization needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    let n = T::from_count(samples.len());
    let mut mean = [T::zero(); 2];
    let mut std = [T::zero(); 2];
    let mut degenerate = [false; 2];
    for c in 0..2 {
        mean[c] = samples.iter().map(|s| s.v[c]).sum::<T>() / n;
        let var = samples.iter().map(|s| (s.v[c] - mean[c]).powi(2)).sum::<T>() / n;
        std[c] = var.sqrt();
        let scale = samples.iter().fold(T::zero(), |a, s| a.max(s.v[c].abs()));
        degenerate[c] = std[c] <= T::epsilon() * T::c(64.0) * scale || std[c] == T::zero();
    }
    let out = samples
        .iter()
        .map(|s| {
            let mut v = s.v;
            for c in 0..2 {
                v[c] = if degenerate[c] { T::zero() } else { (v[c] - mean[c]) / std[c] };
            }
            TrafficSample { z: s.z, v }
        })
        .collect();
    let info = Standardization { mean: [mean[0].f64(), mean[1].f64()], std: [std[0].f64(), std[1].f64()], degenerate };
    Ok((out, info))
}
