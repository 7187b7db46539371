//! The upper half-plane `ℍ² = {x + iy : y > 0}` with `ds² = (dx² + dy²)/y²`.
//!
//! Exponential and logarithm maps are built from the isometric action of
//! `SL₂(ℝ)` by Möbius transformations: the base point is carried to `i`,
//! the geodesic is taken along the imaginary axis after a rotation fixing
//! `i`, and the result is carried back.

use num_complex::Complex;

use crate::scalar::Real;

/// Möbius transformation `z ↦ (az + b)/(cz + d)` with `ad − bc = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mobius<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Real> Mobius<T> {
    /// Normalizes an invertible real matrix to determinant one. Negative
    /// determinants are not orientation preserving and are rejected.
    pub fn new(a: T, b: T, c: T, d: T) -> Option<Self> {
        let det = a * d - b * c;
        if !(det > T::zero()) {
            return None;
        }
        let s = det.sqrt().recip();
        Some(Self { a: a * s, b: b * s, c: c * s, d: d * s })
    }

    /// `(y^{1/2}, x y^{-1/2}; 0, y^{-1/2})`, which maps `i` to `x + iy`.
    pub fn lift(x: T, y: T) -> Self {
        let r = y.sqrt();
        Self { a: r, b: x / r, c: T::zero(), d: r.recip() }
    }

    /// Rotation `(cos θ, −sin θ; sin θ, cos θ)` in the stabilizer of `i`.
    /// Its differential at `i` multiplies tangent vectors by `e^{−2iθ}`.
    pub fn rotation(theta: T) -> Self {
        let (s, c) = theta.sin_cos();
        Self { a: c, b: -s, c: s, d: c }
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn apply(&self, z: Complex<T>) -> Complex<T> {
        (z * self.a + self.b) / (z * self.c + self.d)
    }

    /// Complex derivative `1/(cz + d)²`, the pushforward of tangent vectors.
    pub fn derivative(&self, z: Complex<T>) -> Complex<T> {
        let den = z * self.c + self.d;
        (den * den).inv()
    }

    pub fn apply_xy(&self, p: [T; 2]) -> [T; 2] {
        let w = self.apply(Complex::new(p[0], p[1]));
        [w.re, w.im]
    }
}

/// `arcosh(1 + |z₁ − z₂|²/(2 y₁ y₂))`, evaluated as `2 asinh(|z₁ − z₂| / (2√(y₁y₂)))`.
pub fn h2_distance<T: Real>(z1: &[T; 2], z2: &[T; 2]) -> T {
    let dx = z1[0] - z2[0];
    let dy = z1[1] - z2[1];
    let chord = dx.hypot(dy);
    let two = T::c(2.0);
    two * (chord / (two * (z1[1] * z2[1]).sqrt())).asinh()
}

/// Exponential map at `z` of the ambient-coordinate tangent vector `v`.
pub fn h2_exp<T: Real>(z: &[T; 2], v: &[T; 2]) -> [T; 2] {
    let lift = Mobius::lift(z[0], z[1]);
    // lift'(i) = y, so the pulled-back vector at i is v / y
    let u = Complex::new(v[0], v[1]) / z[1];
    let r = u.norm();
    if r == T::zero() {
        return *z;
    }
    // choose θ with e^{−2iθ}·i = u/r: the rotated vertical geodesic leaves i along u
    let omega = u / r * Complex::new(T::zero(), -T::one());
    let theta = -omega.arg() * T::c(0.5);
    let g = lift.compose(&Mobius::rotation(theta));
    let end = Complex::new(T::zero(), r.exp());
    let w = g.apply(end);
    [w.re, w.im.max(T::min_positive_value())]
}

/// Logarithm map: the tangent vector at `z1` whose geodesic reaches `z2` at time 1.
pub fn h2_log<T: Real>(z1: &[T; 2], z2: &[T; 2]) -> [T; 2] {
    let r = h2_distance(z1, z2);
    if r == T::zero() {
        return [T::zero(); 2];
    }
    let lift = Mobius::lift(z1[0], z1[1]);
    let w = lift.inverse().apply(Complex::new(z2[0], z2[1]));
    let i = Complex::new(T::zero(), T::one());
    // Cayley transform to the disk: rotations fixing i act as ζ ↦ e^{−2iθ} ζ and
    // the vertical geodesic maps to the positive real axis
    let zeta = (w - i) / (w + i);
    let omega = zeta / zeta.norm();
    let u = omega * i * r;
    [u.re * z1[1], u.im * z1[1]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn distance_examples() {
        assert!((h2_distance(&[0.0, 1.0], &[0.0, 2.0]) - LN_2).abs() < 1e-15);
        assert_eq!(h2_distance(&[0.3, 0.7], &[0.3, 0.7]), 0.0);
        assert!((h2_distance(&[-1.0, 1.0], &[1.0, 1.0]) - 3.0f64.acosh()).abs() < 1e-14);
        assert!((3.0f64.acosh() - 1.762747174039086).abs() < 1e-12);
    }

    #[test]
    fn exp_log_vertical() {
        let e = h2_exp(&[0.0_f64, 1.0], &[0.0, LN_2]);
        assert!(e[0].abs() < 1e-15 && (e[1] - 2.0).abs() < 1e-14);
        let l = h2_log(&[0.0_f64, 1.0], &[0.0, 2.0]);
        assert!(l[0].abs() < 1e-15 && (l[1] - LN_2).abs() < 1e-15);
        // downward geodesic
        let l = h2_log(&[0.0_f64, 2.0], &[0.0, 1.0]);
        assert!(l[0].abs() < 1e-14 && (l[1] + 2.0 * LN_2).abs() < 1e-14);
    }

    #[test]
    fn horizontal_direction_roundtrip() {
        let z = [0.5_f64, 2.0];
        let v = [1.2, 0.0];
        let q = h2_exp(&z, &v);
        let back = h2_log(&z, &q);
        assert!((back[0] - v[0]).abs() < 1e-12 && (back[1] - v[1]).abs() < 1e-12);
        // speed: |v|/y
        assert!((h2_distance(&z, &q) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn mobius_lift_maps_i() {
        let g = Mobius::lift(-0.4_f64, 3.0);
        let w = g.apply_xy([0.0, 1.0]);
        assert!((w[0] + 0.4).abs() < 1e-15 && (w[1] - 3.0).abs() < 1e-15);
        let id = g.compose(&g.inverse());
        assert!((id.a - 1.0).abs() < 1e-15 && id.b.abs() < 1e-15 && id.c.abs() < 1e-15);
    }
}
