//! Flat ℝᵈ, the baseline geometry.

use crate::scalar::Real;

pub fn euclidean_distance<T: Real>(p: &[T], q: &[T]) -> T {
    p.iter().zip(q).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>().sqrt()
}

pub fn euclidean_exp<T: Real>(p: &[T], v: &[T]) -> Vec<T> {
    p.iter().zip(v).map(|(&a, &b)| a + b).collect()
}

pub fn euclidean_log<T: Real>(p: &[T], q: &[T]) -> Vec<T> {
    p.iter().zip(q).map(|(&a, &b)| b - a).collect()
}
