use clrq::quantization::{karcher_mean, KarcherOptions};
use clrq::sampling::{
    h2_radius_with, sample_gaussian_h2, sample_uniform, sample_vmf_sphere, sample_von_mises, von_mises_with,
    Acceptance, RngSeed,
};
use clrq::{ManifoldId, Point};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const N: usize = 200_000;

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n as f64
}

/// Modified Bessel function of the first kind by its power series.
fn bessel_i(order: i32, x: f64) -> f64 {
    let mut term = (x / 2.0).powi(order) / (1..=order).map(f64::from).product::<f64>();
    let mut sum = 0.0;
    for k in 1..200 {
        sum += term;
        term *= (x / 2.0).powi(2) / (k as f64 * (k + order) as f64);
    }
    sum
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

#[test]
fn von_mises_mean_resultant_matches_bessel_ratio() {
    for (kappa, center) in [(5.0f64, 0.0f64), (0.5, 2.0), (40.0, -1.0)] {
        let theta = sample_von_mises(center, kappa, N, RngSeed(11)).unwrap();
        let r = mean(theta.iter().map(|t| (t - center).cos()));
        let expected = bessel_i(1, kappa) / bessel_i(0, kappa);
        assert!((r - expected).abs() < 4e-3, "kappa {kappa}: {r} vs {expected}");
        let s = mean(theta.iter().map(|t| (t - center).sin()));
        assert!(s.abs() < 4e-3, "kappa {kappa}: sine moment {s}");
    }
    assert!((bessel_i(1, 5.0) / bessel_i(0, 5.0) - 0.893_383_137).abs() < 1e-9);
}

#[test]
fn von_mises_acceptance_stays_high() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for kappa in [1e-3, 0.1, 1.0, 10.0, 1e3] {
        let (_, acc) = von_mises_with(&mut rng, 0.0, kappa, 10_000).unwrap();
        assert!(acc.rate() > 0.5, "kappa {kappa}: {}", acc.rate());
    }
}

#[test]
fn vmf_sphere_mean_cosine_matches_langevin() {
    for kappa in [5.0f64, 1.0, 50.0] {
        let mu = [0.6, 0.0, 0.8];
        let pts = sample_vmf_sphere(mu, kappa, N, RngSeed(12)).unwrap();
        let c = mean(pts.iter().map(|p| p.coords().iter().zip(mu).map(|(a, b)| a * b).sum()));
        let expected = 1.0 / kappa.tanh() - 1.0 / kappa;
        assert!((c - expected).abs() < 4e-3, "kappa {kappa}: {c} vs {expected}");
    }
}

#[test]
fn uniform_sphere_moments() {
    let pts = sample_uniform::<f64>(ManifoldId::Sphere2, N, RngSeed(13)).unwrap();
    for axis in 0..3 {
        assert!(mean(pts.iter().map(|p| p.coords()[axis])).abs() < 5e-3);
        assert!((mean(pts.iter().map(|p| p.coords()[axis].powi(2))) - 1.0 / 3.0).abs() < 5e-3);
    }
}

#[test]
fn uniform_circle_moments() {
    let pts = sample_uniform::<f64>(ManifoldId::Circle, N, RngSeed(14)).unwrap();
    assert!(mean(pts.iter().map(|p| p.coords()[0].cos())).abs() < 5e-3);
    assert!((mean(pts.iter().map(|p| p.coords()[0])) - std::f64::consts::PI).abs() < 2e-2);
}

#[test]
fn h2_radius_second_moment_matches_quadrature() {
    for sigma in [0.3f64, 0.5, 1.0, 1.5] {
        let density = |r: f64| (-r * r / (2.0 * sigma * sigma)).exp() * r.sinh();
        let hi = sigma * (12.0 + 2.0 * sigma);
        let z = simpson(density, 0.0, hi, 20_000);
        let expected = simpson(|r| r * r * density(r), 0.0, hi, 20_000) / z;
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let mut acc = Acceptance::default();
        let r2 = mean((0..N).map(|_| h2_radius_with(&mut rng, sigma, &mut acc).unwrap().powi(2)));
        assert!((r2 - expected).abs() < 0.01 * expected, "sigma {sigma}: {r2} vs {expected}");
        assert!(acc.rate() > 0.3, "sigma {sigma}: acceptance {}", acc.rate());
    }
}

#[test]
fn h2_gaussian_is_centered() {
    let center = Point::hyperbolic(0.0, 1.0).unwrap();
    let pts = sample_gaussian_h2([0.0, 1.0], 0.5, 5000, RngSeed(16)).unwrap();
    let d2 = mean(pts.iter().map(|p| p.distance(&center).unwrap().powi(2)));
    let density = |r: f64| (-r * r / 0.5).exp() * r.sinh();
    let expected = simpson(|r| r * r * density(r), 0.0, 8.0, 20_000) / simpson(density, 0.0, 8.0, 20_000);
    assert!((d2 - expected).abs() < 0.05 * expected, "{d2} vs {expected}");
    let frechet = karcher_mean(&pts, KarcherOptions::default()).unwrap();
    assert!(frechet.converged);
    assert!(frechet.mean.distance(&center).unwrap() < 0.02);
}

#[test]
fn h2_gaussian_moves_with_its_center() {
    let center = Point::hyperbolic(3.0, 0.25).unwrap();
    let pts = sample_gaussian_h2([3.0, 0.25], 0.5, 5000, RngSeed(17)).unwrap();
    let frechet = karcher_mean(&pts, KarcherOptions::default()).unwrap();
    assert!(frechet.mean.distance(&center).unwrap() < 0.03);
}
