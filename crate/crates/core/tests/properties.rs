mod common;

use std::f64::consts::PI;

use clrq::curvature::{h2_distance, sphere_distance, sphere_exp, Mobius};
use clrq::quantization::{
    clrq_run, distortion_gradient, empirical_distortion, gradient_norm, karcher_mean, quantized_measure, ClrqConfig,
    Codebook, InitPolicy, KarcherOptions, StepSchedule,
};
use clrq::sampling::{sample_uniform, sample_von_mises, RngSeed};
use clrq::spd::{spd_distance, spd_exp, SpdMatrix};
use clrq::traffic::{
    atm_quantize, generate_scenario, nw_estimate, standardize_velocities, AtmConfig, KernelConfig, KernelField,
    Scenario, ScenarioConfig, TrafficSample, DEFAULT_RIDGE,
};
use clrq::transport::{circle_w1, discrete_wasserstein};
use clrq::{exp_map, log_map, ManifoldId, Matrix, Point};
use common::*;
use proptest::prelude::*;
use rand::Rng;

fn manifold() -> impl Strategy<Value = ManifoldId> {
    prop::sample::select(MANIFOLDS.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn log_norm_matches_distance_and_exp_inverts_log(m in manifold(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let (p, q) = random_pair(&mut r, m, PI - 1e-3);
        let v = log_map(&p, &q).unwrap();
        prop_assert!((v.norm() - p.distance(&q).unwrap()).abs() < 1e-9);
        prop_assert!(exp_map(&v).unwrap().distance(&q).unwrap() < 1e-9);
    }

    #[test]
    fn distance_is_symmetric_and_bounded(m in manifold(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_point(&mut r, m);
        let q = random_point(&mut r, m);
        let d = p.distance(&q).unwrap();
        prop_assert!(d >= 0.0);
        prop_assert!((d - q.distance(&p).unwrap()).abs() < 1e-9);
        if matches!(m, ManifoldId::Circle | ManifoldId::Sphere2) {
            prop_assert!(d <= PI + 1e-12);
        }
    }

    #[test]
    fn sphere_exp_travels_the_tangent_norm(seed in any::<u64>(), len in 0.0f64..3.1) {
        let mut r = rng(seed);
        let p = random_point(&mut r, ManifoldId::Sphere2);
        let v = random_tangent(&mut r, &p, 1.0);
        let v = v.scale(len / v.norm().max(1e-300));
        let pa: [f64; 3] = p.coords().try_into().unwrap();
        let va: [f64; 3] = v.vec().try_into().unwrap();
        prop_assert!((sphere_distance(&pa, &sphere_exp(&pa, &va)) - len).abs() < 1e-9);
    }

    #[test]
    fn h2_distance_is_mobius_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = loop {
            let e: Vec<f64> = (0..4).map(|_| normal(&mut r)).collect();
            if let Some(g) = Mobius::new(e[0], e[1], e[2], e[3]) {
                break g;
            }
        };
        let p = random_point(&mut r, ManifoldId::Hyperbolic2);
        let q = random_point(&mut r, ManifoldId::Hyperbolic2);
        let (pa, qa): ([f64; 2], [f64; 2]) = (p.coords().try_into().unwrap(), q.coords().try_into().unwrap());
        let d = h2_distance(&pa, &qa);
        prop_assert!((h2_distance(&g.apply_xy(pa), &g.apply_xy(qa)) - d).abs() < 1e-8 * (1.0 + d));
    }

    #[test]
    fn spd_distance_is_congruence_invariant(seed in any::<u64>(), n in 2usize..=3) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, n);
        prop_assume!(Matrix::identity(n).congruence(&a).determinant().abs() > 1e-6);
        let (s1, s2) = (random_spd(&mut r, n), random_spd(&mut r, n));
        let d = spd_distance(&s1, &s2).unwrap();
        let dc = spd_distance(&s1.congruence(&a).unwrap(), &s2.congruence(&a).unwrap()).unwrap();
        prop_assert!((d - dc).abs() < 1e-8 * (1.0 + d));
    }

    #[test]
    fn spd_exp_stays_symmetric_positive(seed in any::<u64>(), scale in 0.0f64..3.0) {
        let mut r = rng(seed);
        let s = random_spd(&mut r, 2);
        let p = Point::spd(s.clone());
        let w = random_tangent(&mut r, &p, scale);
        let out = spd_exp(&s, &Matrix::from_row_major(2, w.vec().to_vec()).unwrap()).unwrap();
        prop_assert_eq!(out.matrix().asymmetry(), 0.0);
        prop_assert!(SpdMatrix::new(out.matrix().clone()).is_ok());
    }

    #[test]
    fn wasserstein_is_a_metric(seed in any::<u64>(), m in manifold()) {
        let mut r = rng(seed);
        let ms: Vec<_> = (0..3).map(|_| { let k = r.random_range(1..=5); random_measure(&mut r, m, k) }).collect();
        let d = |i: usize, j: usize| discrete_wasserstein(&ms[i], &ms[j], 1.0).unwrap().0;
        prop_assert!(d(0, 1) >= 0.0);
        prop_assert!((d(0, 1) - d(1, 0)).abs() < 1e-9);
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-9);
        prop_assert!(d(1, 1) < 1e-12);
    }

    #[test]
    fn transport_plans_are_feasible(seed in any::<u64>(), p in 1.0f64..3.0) {
        let mut r = rng(seed);
        let (k1, k2) = (r.random_range(1..=7), r.random_range(1..=7));
        let mu = random_measure(&mut r, ManifoldId::Euclidean(2), k1);
        let nu = random_measure(&mut r, ManifoldId::Euclidean(2), k2);
        let (_, plan) = discrete_wasserstein(&mu, &nu, p).unwrap();
        prop_assert!(plan.matrix.iter().flatten().all(|&x| x >= 0.0));
        prop_assert!(plan.marginal_error(mu.weights(), nu.weights()) < 1e-12);
    }

    #[test]
    fn circle_w1_matches_the_transport_lp(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (k1, k2) = (r.random_range(1..=10), r.random_range(1..=10));
        let mu = circle_measure(&mut r, k1);
        let nu = circle_measure(&mut r, k2);
        let lp = discrete_wasserstein(&mu, &nu, 1.0).unwrap().0;
        prop_assert!((circle_w1(&mu, &nu).unwrap() - lp).abs() < 1e-9);
    }

    #[test]
    fn nw_estimates_are_spd(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = r.random_range(1..40);
        let samples: Vec<TrafficSample<f64>> = (0..k)
            .map(|_| TrafficSample::new([r.random_range(0.0..10.0), r.random_range(0.0..10.0)], [normal(&mut r), normal(&mut r)]).unwrap())
            .collect();
        let cfg = KernelConfig::from_radius(4.0).unwrap();
        let z = [r.random_range(0.0..10.0), r.random_range(0.0..10.0)];
        if let Ok((_, s)) = nw_estimate(&samples, z, &cfg, DEFAULT_RIDGE) {
            prop_assert!(SpdMatrix::new(s.matrix().clone()).is_ok());
            prop_assert!(s.eigen().min_eigenvalue() >= DEFAULT_RIDGE * (1.0 - 1e-6));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn permuting_the_initial_codebook_permutes_the_output(seed in any::<u64>(), m in manifold()) {
        let mut r = rng(seed);
        let data: Vec<Point> = (0..300).map(|_| random_point(&mut r, m)).collect();
        let init: Vec<Point> = data[..4].to_vec();
        let order = [2usize, 0, 3, 1];
        let run = |centers: Vec<Point>| {
            let mut cfg = ClrqConfig::new(4, seed);
            cfg.init = InitPolicy::Given(Codebook::new(centers).unwrap());
            clrq_run(&data, &cfg).unwrap().codebook
        };
        let base = run(init.clone());
        let permuted = run(order.iter().map(|&i| init[i].clone()).collect());
        for (k, &i) in order.iter().enumerate() {
            prop_assert_eq!(permuted.centers()[k].coords(), base.centers()[i].coords());
        }
    }

    #[test]
    fn centers_stay_near_the_data(seed in any::<u64>(), m in prop::sample::select(vec![ManifoldId::Euclidean(3), ManifoldId::Hyperbolic2, ManifoldId::Spd(2)])) {
        let mut r = rng(seed);
        let data: Vec<Point> = (0..400).map(|_| random_point(&mut r, m)).collect();
        let mean = karcher_mean(&data, KarcherOptions::default()).unwrap().mean;
        let radius = data.iter().map(|x| mean.distance(x).unwrap()).fold(0.0, f64::max);
        let mut cfg = ClrqConfig::new(5, seed);
        cfg.checkpoint_every = 40;
        let report = clrq_run(&data, &cfg).unwrap();
        for c in &report.checkpoints {
            for p in &c.centers {
                let p: Point = p.clone().into_point().unwrap();
                prop_assert!(mean.distance(&p).unwrap() <= 2.0 * radius);
            }
        }
    }

    #[test]
    fn quantized_weights_are_cell_masses(seed in any::<u64>(), m in manifold()) {
        let mut r = rng(seed);
        let data: Vec<Point> = (0..200).map(|_| random_point(&mut r, m)).collect();
        let cb = Codebook::new(data[..5].to_vec()).unwrap();
        let q = quantized_measure(&cb, &data).unwrap();
        prop_assert!((q.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert_eq!(q.counts().unwrap().iter().sum::<usize>(), 200);
    }

    #[test]
    fn traffic_labels_are_a_function_of_the_final_centers(seed in 0u64..1000) {
        let samples = generate_scenario::<f64>(&ScenarioConfig::new(Scenario::SingleCrossing, seed)).unwrap();
        let kernel = KernelConfig::from_radius(5.0).unwrap();
        let cfg = AtmConfig::new(kernel, seed);
        let summary = atm_quantize(&samples, &cfg).unwrap();
        let (standard, _) = standardize_velocities(&samples).unwrap();
        let field = KernelField::new(&standard, kernel, DEFAULT_RIDGE).unwrap();
        let cb = summary.measure.codebook();
        for (s, &label) in standard.iter().zip(&summary.labels) {
            let (_, sigma) = field.estimate(s.z).unwrap();
            prop_assert_eq!(clrq::quantization::voronoi_assign(cb, &Point::spd(sigma)).unwrap() + 1, label);
        }
        prop_assert_eq!(atm_quantize(&samples, &cfg).unwrap(), summary);
    }

    #[test]
    fn power_of_two_velocity_scaling_leaves_the_summary_unchanged(seed in 0u64..1000, e in -4i32..=4) {
        let samples = generate_scenario::<f64>(&ScenarioConfig::new(Scenario::ParallelFlow, seed)).unwrap();
        let c = 2f64.powi(e);
        let scaled: Vec<_> = samples.iter().map(|s| TrafficSample::new(s.z, [s.v[0] * c, s.v[1] * c]).unwrap()).collect();
        let cfg = AtmConfig::new(KernelConfig::from_radius(5.0).unwrap(), seed);
        let a = atm_quantize(&samples, &cfg).unwrap();
        let b = atm_quantize(&scaled, &cfg).unwrap();
        prop_assert_eq!(a.measure, b.measure);
        prop_assert_eq!(a.labels, b.labels);
    }

    #[test]
    fn samplers_are_deterministic_and_on_the_manifold(seed in any::<u64>()) {
        let a = sample_uniform::<f64>(ManifoldId::Sphere2, 50, RngSeed(seed)).unwrap();
        prop_assert_eq!(&a, &sample_uniform::<f64>(ManifoldId::Sphere2, 50, RngSeed(seed)).unwrap());
        for p in &a {
            prop_assert!(ManifoldId::Sphere2.point(p.coords().to_vec()).is_ok());
        }
        let v = sample_von_mises(1.0f64, 3.0, 50, RngSeed(seed)).unwrap();
        prop_assert_eq!(&v, &sample_von_mises(1.0f64, 3.0, 50, RngSeed(seed)).unwrap());
        prop_assert!(v.iter().all(|t| (0.0..std::f64::consts::TAU).contains(t)));
    }
}

/// Checkpointed distortions of the von Mises (n=5, m=50) and uniform (n=6,
/// m=10) circle runs on 1000 observations.
fn reference_traces(seed: u64) -> Vec<(&'static str, Vec<f64>)> {
    let vm: Vec<Point> =
        sample_von_mises(0.0, 5.0, 1000, RngSeed(seed)).unwrap().into_iter().map(Point::circle).collect();
    let uniform = sample_uniform::<f64>(ManifoldId::Circle, 1000, RngSeed(seed)).unwrap();
    [("von Mises", &vm, 5, 50), ("uniform", &uniform, 6, 10)]
        .into_iter()
        .map(|(name, data, n, m)| {
            let mut cfg = ClrqConfig::new(n, seed);
            cfg.repeat_m = m;
            cfg.checkpoint_every = 50;
            (name, clrq_run(data, &cfg).unwrap().checkpoints.iter().map(|c| c.distortion).collect())
        })
        .collect()
}

fn range(d: &[f64]) -> f64 {
    d.iter().copied().fold(f64::NEG_INFINITY, f64::max) - d.iter().copied().fold(f64::INFINITY, f64::min)
}

#[test]
fn distortion_decreases_on_the_reference_configurations() {
    for seed in 0..10 {
        for (name, d) in reference_traces(seed) {
            let (first, last) = (d[0], *d.last().unwrap());
            assert!(last < first, "{name}, seed {seed}: {first} -> {last}");
        }
    }
}

#[test]
fn distortion_settles_in_the_last_quarter() {
    let mut failures = Vec::new();
    for seed in 0..10 {
        for (name, d) in reference_traces(seed) {
            let ratio = range(&d[d.len() * 3 / 4..]) / range(&d);
            if ratio >= 0.1 {
                failures.push(format!("{name}/{seed}: {ratio:.3}"));
            }
        }
    }
    assert!(failures.is_empty(), "last-quarter range not below 10% of total range: {}", failures.join(", "));
}

#[test]
fn long_cycled_runs_reach_stationarity() {
    for m in [ManifoldId::Circle, ManifoldId::Sphere2, ManifoldId::Euclidean(3)] {
        let mut r = rng(42);
        let data: Vec<Point> = (0..300).map(|_| random_point(&mut r, m)).collect();
        let mut cfg = ClrqConfig::new(4, 7);
        cfg.init = InitPolicy::PlusPlus;
        cfg.schedule = StepSchedule::new(0.5, 50.0).unwrap();
        cfg.epochs = 1000;
        let report = clrq_run(&data, &cfg).unwrap();
        let g = gradient_norm(&distortion_gradient(&report.codebook, &data).unwrap());
        let d = empirical_distortion(&report.codebook, &data, 2.0).unwrap();
        assert!(g < 1e-2, "{m}: gradient norm {g}, distortion {d}");
    }
}

#[test]
fn field_estimates_match_direct_estimates() {
    let samples = generate_scenario::<f64>(&ScenarioConfig::new(Scenario::MultiCrossing, 3)).unwrap();
    let cfg = KernelConfig::from_radius(5.0).unwrap();
    let field = KernelField::new(&samples, cfg, DEFAULT_RIDGE).unwrap();
    for s in samples.iter().step_by(37) {
        let a = field.estimate(s.z).unwrap();
        let b = nw_estimate(&samples, s.z, &cfg, DEFAULT_RIDGE).unwrap();
        assert_eq!(a, b);
    }
}
