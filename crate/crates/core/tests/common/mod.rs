#![allow(dead_code)]

use clrq::quantization::{Codebook, QuantizedMeasure};
use clrq::spd::SpdMatrix;
use clrq::{ManifoldId, Matrix, Point, Tangent};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const MANIFOLDS: [ManifoldId; 5] =
    [ManifoldId::Circle, ManifoldId::Sphere2, ManifoldId::Hyperbolic2, ManifoldId::Spd(2), ManifoldId::Euclidean(3)];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal<R: Rng>(rng: &mut R) -> f64 {
    let u: f64 = 1.0 - rng.random::<f64>();
    let v: f64 = rng.random();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

pub fn random_matrix<R: Rng>(rng: &mut R, n: usize) -> Matrix {
    Matrix::from_row_major(n, (0..n * n).map(|_| normal(rng)).collect()).unwrap()
}

pub fn random_spd<R: Rng>(rng: &mut R, n: usize) -> SpdMatrix<f64> {
    let a = random_matrix(rng, n);
    let s = a.as_slice();
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = (0..n).map(|k| s[i * n + k] * s[j * n + k]).sum::<f64>() + if i == j { 0.2 } else { 0.0 };
        }
    }
    SpdMatrix::from_row_major(n, m).unwrap()
}

/// A random point in a bounded, well-conditioned region of `m`.
pub fn random_point<R: Rng>(rng: &mut R, m: ManifoldId) -> Point {
    match m {
        ManifoldId::Circle => Point::circle(rng.random::<f64>() * std::f64::consts::TAU),
        ManifoldId::Sphere2 => loop {
            let g = [normal(rng), normal(rng), normal(rng)];
            let n = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
            if n > 1e-6 {
                break Point::sphere([g[0] / n, g[1] / n, g[2] / n]).unwrap();
            }
        },
        ManifoldId::Hyperbolic2 => {
            Point::hyperbolic(rng.random_range(-2.0..2.0), rng.random_range(-1.0f64..1.0).exp()).unwrap()
        }
        ManifoldId::Spd(n) => Point::spd(random_spd(rng, n)),
        ManifoldId::Euclidean(d) => Point::euclidean((0..d).map(|_| normal(rng)).collect()).unwrap(),
    }
}

/// A pair at distance below `max_dist` (keeps away from cut loci).
pub fn random_pair<R: Rng>(rng: &mut R, m: ManifoldId, max_dist: f64) -> (Point, Point) {
    loop {
        let p = random_point(rng, m);
        let q = random_point(rng, m);
        if p.distance(&q).unwrap() < max_dist {
            return (p, q);
        }
    }
}

pub fn random_tangent<R: Rng>(rng: &mut R, p: &Point, scale: f64) -> Tangent {
    let basis = clrq::manifold::tangent_basis(p);
    let coeffs: Vec<f64> = basis.iter().map(|_| scale * normal(rng)).collect();
    clrq::manifold::from_basis(&basis, &coeffs).unwrap()
}

pub fn random_weights<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| 0.05 + rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let mut w: Vec<f64> = raw.iter().map(|r| r / total).collect();
    let head: f64 = w[..k - 1].iter().sum();
    w[k - 1] = 1.0 - head;
    w
}

pub fn random_measure<R: Rng>(rng: &mut R, m: ManifoldId, k: usize) -> QuantizedMeasure<f64> {
    let atoms = (0..k).map(|_| random_point(rng, m)).collect();
    QuantizedMeasure::new(Codebook::new(atoms).unwrap(), random_weights(rng, k)).unwrap()
}

pub fn circle_measure<R: Rng>(rng: &mut R, k: usize) -> QuantizedMeasure<f64> {
    random_measure(rng, ManifoldId::Circle, k)
}
