use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{ManifoldId, ManifoldPoint};
use crate::quantization::initial_codebook;
use crate::quantization::{voronoi_assign, Codebook, InitPolicy, QuantizedMeasure, Quantizer, StepSchedule};
use crate::sampling::{stream, RngSeed};
use crate::scalar::Real;
use crate::spd::{loewner_leq, LoewnerOrdering};
use crate::transport::discrete_wasserstein;

use super::kernel::{KernelConfig, KernelField, DEFAULT_RIDGE};
use super::{standardize_velocities, Standardization, TrafficSample};

#[derive(Clone, Debug)]
pub struct AtmConfig<T> {
    pub n: usize,
    pub kernel: KernelConfig<T>,
    pub ridge: T,
    pub schedule: StepSchedule,
    pub repeat_m: usize,
    pub epochs: usize,
    pub seed: u64,
    /// Center and reduce velocities before estimating the field.
    pub standardize: bool,
    pub init: InitPolicy<T>,
}

impl<T: Real> AtmConfig<T> {
    pub fn new(kernel: KernelConfig<T>, seed: u64) -> Self {
        Self {
            n: 3,
            kernel,
            ridge: T::c(DEFAULT_RIDGE),
            schedule: StepSchedule::default(),
            repeat_m: 1,
            epochs: 1,
            seed,
            standardize: true,
            init: InitPolicy::RandomSample,
        }
    }
}

/// Whether the class centers form a Loewner chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderStatus {
    Total,
    Partial,
}

/// Quantized covariance distribution of one traffic scene.
///
/// Classes are sorted by ascending trace, which coincides with the Loewner
/// order whenever that order is total. `labels[i]` is the 1-based class of
/// sample `i`, or 0 if its covariance could not be estimated.
#[derive(Clone, Debug, PartialEq)]
pub struct TrafficSummary<T> {
    pub measure: QuantizedMeasure<T>,
    pub order: OrderStatus,
    /// `loewner[i][j]` compares class `i` with class `j`.
    pub loewner: Vec<Vec<LoewnerOrdering>>,
    /// Class `k` is center `permutation[k]` of the raw codebook.
    pub permutation: Vec<usize>,
    pub labels: Vec<usize>,
    pub skipped: usize,
    pub standardization: Option<Standardization>,
}

impl<T: Real> TrafficSummary<T> {
    pub fn centers(&self) -> &[ManifoldPoint<T>] {
        self.measure.atoms()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.measure.len()];
        for &l in &self.labels {
            if l > 0 {
                c[l - 1] += 1;
            }
        }
        c
    }
}

#[derive(Serialize, Deserialize)]
struct SummaryRepr<M> {
    measure: M,
    order: OrderStatus,
    loewner: Vec<Vec<LoewnerOrdering>>,
    permutation: Vec<usize>,
    labels: Vec<usize>,
    skipped: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    standardization: Option<Standardization>,
}

impl<T: Real> Serialize for TrafficSummary<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SummaryRepr {
            measure: &self.measure,
            order: self.order,
            loewner: self.loewner.clone(),
            permutation: self.permutation.clone(),
            labels: self.labels.clone(),
            skipped: self.skipped,
            standardization: self.standardization,
        }
        .serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for TrafficSummary<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = SummaryRepr::<QuantizedMeasure<T>>::deserialize(d)?;
        Ok(Self {
            measure: r.measure,
            order: r.order,
            loewner: r.loewner,
            permutation: r.permutation,
            labels: r.labels,
            skipped: r.skipped,
            standardization: r.standardization,
        })
    }
}

fn trace<T: Real>(p: &ManifoldPoint<T>) -> T {
    p.coords()[0] + p.coords()[3]
}

/// Quantizes the covariance field of a traffic scene.
///
/// Covariances are estimated at every sample position, the CLRQ loop visits
/// them in a seeded random order (reshuffled each epoch), and a final
/// Voronoi pass labels every sample.
pub fn atm_quantize<T: Real>(samples: &[TrafficSample<T>], cfg: &AtmConfig<T>) -> Result<TrafficSummary<T>> {
    if cfg.n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    if cfg.epochs == 0 {
        return Err(Error::InvalidParameter("epochs must be >= 1".into()));
    }
    if samples.len() < cfg.n {
        return Err(Error::InsufficientDistinct { needed: cfg.n, found: samples.len() });
    }
    cfg.schedule.validate()?;
    let (data, standardization) = if cfg.standardize {
        let (d, info) = standardize_velocities(samples)?;
        (d, Some(info))
    } else {
        (samples.to_vec(), None)
    };

    let field = KernelField::new(&data, cfg.kernel, cfg.ridge)?;
    let mut sigmas: Vec<Option<ManifoldPoint<T>>> = Vec::with_capacity(data.len());
    for s in &data {
        match field.estimate(s.z) {
            Ok((_, cov)) => sigmas.push(Some(ManifoldPoint::spd(cov))),
            Err(Error::EmptyKernel { .. }) => sigmas.push(None),
            Err(e) => return Err(e),
        }
    }
    let valid: Vec<usize> = (0..data.len()).filter(|&i| sigmas[i].is_some()).collect();
    let skipped = data.len() - valid.len();
    if 2 * skipped > data.len() {
        return Err(Error::TooManySkipped { skipped, total: data.len() });
    }
    let pool: Vec<ManifoldPoint<T>> = valid.iter().map(|&i| sigmas[i].clone().unwrap()).collect();

    let seed = RngSeed(cfg.seed);
    let init = initial_codebook(&pool, cfg.n, &cfg.init, &mut seed.stream(stream::INIT))?;
    let mut q = Quantizer::new(init, cfg.schedule, cfg.repeat_m)?;
    let mut order_rng = seed.stream(stream::ORDER);
    let mut order: Vec<usize> = (0..pool.len()).collect();
    for _ in 0..cfg.epochs {
        order.shuffle(&mut order_rng);
        for &k in &order {
            q.observe(&pool[k])?;
        }
    }
    let codebook = q.into_codebook();
    label_and_order(&codebook, &sigmas, skipped, standardization)
}

fn label_and_order<T: Real>(
    codebook: &Codebook<T>,
    sigmas: &[Option<ManifoldPoint<T>>],
    skipped: usize,
    standardization: Option<Standardization>,
) -> Result<TrafficSummary<T>> {
    let n = codebook.len();
    let mut raw = Vec::with_capacity(sigmas.len());
    let mut counts = vec![0usize; n];
    for s in sigmas {
        match s {
            Some(p) => {
                let k = voronoi_assign(codebook, p)?;
                counts[k] += 1;
                raw.push(Some(k));
            }
            None => raw.push(None),
        }
    }
    let centers = codebook.centers();
    let mut permutation: Vec<usize> = (0..n).collect();
    permutation.sort_by(|&a, &b| trace(&centers[a]).partial_cmp(&trace(&centers[b])).unwrap().then(a.cmp(&b)));
    let mut rank = vec![0usize; n];
    for (k, &c) in permutation.iter().enumerate() {
        rank[c] = k;
    }
    let spd: Vec<_> = permutation.iter().map(|&c| centers[c].as_spd().expect("spd codebook")).collect();
    let mut loewner = vec![vec![LoewnerOrdering::Equal; n]; n];
    let mut total = true;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                loewner[i][j] = loewner_leq(&spd[i], &spd[j])?;
                total &= loewner[i][j] != LoewnerOrdering::Incomparable;
            }
        }
    }
    let measure = QuantizedMeasure::from_counts(codebook.clone(), counts)?.permuted(&permutation);
    let labels = raw.iter().map(|r| r.map_or(0, |k| rank[k] + 1)).collect();
    Ok(TrafficSummary {
        measure,
        order: if total { OrderStatus::Total } else { OrderStatus::Partial },
        loewner,
        permutation,
        labels,
        skipped,
        standardization,
    })
}

/// Symmetric matrix of `L^p` Wasserstein distances between measures.
pub fn compare_measures<T: Real>(measures: &[&QuantizedMeasure<T>], p: T) -> Result<Vec<Vec<T>>> {
    let k = measures.len();
    let mut out = vec![vec![T::zero(); k]; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let (d, _) = discrete_wasserstein(measures[i], measures[j], p)?;
            out[i][j] = d;
            out[j][i] = d;
        }
    }
    Ok(out)
}

/// Pairwise distances between traffic summaries over SPD(2).
pub fn compare_summaries<T: Real>(summaries: &[TrafficSummary<T>], p: T) -> Result<Vec<Vec<T>>> {
    for s in summaries {
        if s.measure.manifold() != ManifoldId::Spd(2) {
            return Err(Error::ManifoldMismatch { expected: ManifoldId::Spd(2), found: s.measure.manifold() });
        }
    }
    let refs: Vec<_> = summaries.iter().map(|s| &s.measure).collect();
    compare_measures(&refs, p)
}
