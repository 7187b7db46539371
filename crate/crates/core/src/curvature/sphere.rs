//! Great-circle geometry on the unit 2-sphere embedded in ℝ³.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Log map refuses targets closer than this to the antipode.
pub const ANTIPODE_MARGIN: f64 = 1e-6;

pub(crate) fn dot<T: Real>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross<T: Real>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn norm<T: Real>(a: &[T; 3]) -> T {
    dot(a, a).sqrt()
}

fn unit<T: Real>(a: [T; 3]) -> [T; 3] {
    let n = norm(&a);
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Arc length `arccos(p·q)`, evaluated as `atan2(|p×q|, p·q)` for accuracy
/// near 0 and π.
pub fn sphere_distance<T: Real>(p: &[T; 3], q: &[T; 3]) -> T {
    let c = dot(p, q).max(-T::one()).min(T::one());
    let s = norm(&cross(p, q));
    s.atan2(c)
}

/// `cos‖v‖ p + sin‖v‖ v/‖v‖`, renormalized.
pub fn sphere_exp<T: Real>(p: &[T; 3], v: &[T; 3]) -> [T; 3] {
    let t = norm(v);
    if t == T::zero() {
        return *p;
    }
    let (s, c) = t.sin_cos();
    let k = s / t;
    unit([c * p[0] + k * v[0], c * p[1] + k * v[1], c * p[2] + k * v[2]])
}

/// Tangent vector at `p` pointing to `q` with length `d(p, q)`.
pub fn sphere_log<T: Real>(p: &[T; 3], q: &[T; 3]) -> Result<[T; 3]> {
    let d = sphere_distance(p, q);
    if d < T::zero_dist() {
        return Ok([T::zero(); 3]);
    }
    if T::PI() - d < T::c(ANTIPODE_MARGIN) {
        return Err(Error::CutLocus(format!("sphere points at distance {:.9} (antipodal)", d.f64())));
    }
    // q − (p·q) p has norm sin d
    let c = dot(p, q);
    let u = [q[0] - c * p[0], q[1] - c * p[1], q[2] - c * p[2]];
    let k = d / norm(&u);
    Ok([k * u[0], k * u[1], k * u[2]])
}
