use crate::error::{Error, Result};
use crate::manifold::ManifoldId;
use crate::quantization::QuantizedMeasure;
use crate::scalar::Real;

/// Exact `W₁` between two discrete measures on the circle with arc-length cost.
///
/// Cutting the circle at any point, `W₁ = min_s ∫ |F_μ − F_ν − s|`; the
/// difference of distribution functions is a step function over the merged
/// sorted atoms, so the minimizing shift is a length-weighted median of its
/// levels.
pub fn circle_w1<T: Real>(mu: &QuantizedMeasure<T>, nu: &QuantizedMeasure<T>) -> Result<T> {
    for m in [mu, nu] {
        if m.manifold() != ManifoldId::Circle {
            return Err(Error::UnsupportedManifold(m.manifold()));
        }
    }
    let mut events: Vec<(T, T)> = mu
        .atoms()
        .iter()
        .zip(mu.weights())
        .map(|(p, &w)| (p.coords()[0], w))
        .chain(nu.atoms().iter().zip(nu.weights()).map(|(p, &w)| (p.coords()[0], -w)))
        .collect();
    events.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let k = events.len();
    // level on [t_j, t_{j+1}) and the arc length of that interval
    let mut steps: Vec<(T, T)> = Vec::with_capacity(k);
    let mut level = T::zero();
    for j in 0..k {
        level = level + events[j].1;
        let next = if j + 1 < k { events[j + 1].0 } else { events[0].0 + T::TAU() };
        steps.push((level, next - events[j].0));
    }
    let total_len: T = steps.iter().map(|s| s.1).sum();
    if total_len <= T::zero() {
        return Ok(T::zero());
    }
    let mut by_level = steps.clone();
    by_level.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let half = total_len * T::c(0.5);
    let mut acc = T::zero();
    let mut median = by_level[0].0;
    for &(lvl, len) in &by_level {
        acc = acc + len;
        median = lvl;
        if acc >= half {
            break;
        }
    }
    Ok(steps.iter().map(|&(lvl, len)| len * (lvl - median).abs()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::ManifoldPoint;
    use crate::quantization::Codebook;
    use std::f64::consts::PI;

    #[test]
    fn examples() {
        let a = QuantizedMeasure::dirac(ManifoldPoint::circle(0.0));
        let b = QuantizedMeasure::dirac(ManifoldPoint::circle(PI));
        assert!((circle_w1(&a, &b).unwrap() - PI).abs() < 1e-15);
        assert_eq!(circle_w1(&a, &a).unwrap(), 0.0);
        // shortest way round
        let c = QuantizedMeasure::dirac(ManifoldPoint::circle(2.0 * PI - 0.3));
        assert!((circle_w1(&a, &c).unwrap() - 0.3).abs() < 1e-14);
        let cb = Codebook::new(vec![ManifoldPoint::circle(0.0), ManifoldPoint::circle(PI)]).unwrap();
        let half = QuantizedMeasure::new(cb, vec![0.5, 0.5]).unwrap();
        let e = QuantizedMeasure::dirac(ManifoldPoint::euclidean(vec![0.0]).unwrap());
        assert!(circle_w1(&half, &e).is_err());
    }
}
