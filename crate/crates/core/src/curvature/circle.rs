//! The flat circle, identified with angles in `[0, 2π)`.

use crate::scalar::Real;

/// Reduces an angle to `[0, 2π)`.
pub fn normalize_angle<T: Real>(theta: T) -> T {
    let tau = T::TAU();
    let r = theta % tau;
    let r = if r < T::zero() { r + tau } else { r };
    if r >= tau {
        T::zero()
    } else {
        r
    }
}

/// Arc length between two angles, in `[0, π]`.
pub fn circle_distance<T: Real>(a: T, b: T) -> T {
    let d = normalize_angle(a - b);
    d.min(T::TAU() - d)
}

pub fn circle_exp<T: Real>(theta: T, v: T) -> T {
    normalize_angle(theta + v)
}

/// Signed angular difference from `from` to `to` in `(−π, π]`; an exact
/// half-turn resolves to `+π`.
pub fn circle_log<T: Real>(from: T, to: T) -> T {
    let d = normalize_angle(to - from);
    if d > T::PI() {
        d - T::TAU()
    } else {
        d
    }
}
