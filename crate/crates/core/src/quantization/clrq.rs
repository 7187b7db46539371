//! The online competitive learning loop.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::cells::{empirical_distortion, nearest, quantized_measure};
use super::codebook::{Codebook, QuantizedMeasure, DISTINCT_TOL};
use crate::error::{Error, Result};
use crate::manifold::{distance, exp_map, log_map, ManifoldId, ManifoldPoint};
use crate::sampling::{stream, RngSeed, RNG_ALGORITHM};
use crate::scalar::Real;
use crate::transport::{circle_w1, empirical_measure};

/// Step sizes `γ_k = γ₀ · b / (b + k)`, `k ≥ 1`.
///
/// With `γ₀ ∈ (0, 1)` and `b > 0` every step lies in `(0, 1)`,
/// `Σ γ_k = ∞` and `Σ γ_k² < ∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepSchedule {
    pub gamma0: f64,
    pub b: f64,
}

impl Default for StepSchedule {
    fn default() -> Self {
        Self { gamma0: 0.9, b: 50.0 }
    }
}

impl StepSchedule {
    pub fn new(gamma0: f64, b: f64) -> Result<Self> {
        let s = Self { gamma0, b };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma0 > 0.0 && self.gamma0 < 1.0) {
            return Err(Error::InvalidParameter(format!("gamma0 must lie in (0, 1), got {}", self.gamma0)));
        }
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(Error::InvalidParameter(format!("schedule b must be positive, got {}", self.b)));
        }
        Ok(())
    }

    /// Step for block `k ≥ 1`.
    pub fn gamma(&self, k: u64) -> f64 {
        self.gamma0 * self.b / (self.b + k as f64)
    }
}

/// Result of one competitive step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepOutcome {
    /// Center `winner` moved.
    Moved { winner: usize },
    /// The observation sat on the cut locus of its winner; nothing moved.
    SkippedCutLocus { winner: usize },
}

impl<T: Real> Codebook<T> {
    /// Moves the center nearest to `x` a fraction `gamma` of the way to `x`.
    pub fn step(&mut self, x: &ManifoldPoint<T>, gamma: T) -> Result<usize> {
        check_gamma(gamma)?;
        let (winner, _) = nearest(self, x)?;
        let a = &self.centers()[winner];
        let moved = exp_map(&log_map(a, x)?.scale(gamma))?;
        self.replace(winner, moved);
        Ok(winner)
    }
}

fn check_gamma<T: Real>(gamma: T) -> Result<()> {
    if !(gamma > T::zero() && gamma < T::one()) {
        return Err(Error::InvalidParameter(format!("step size must lie in (0, 1), got {gamma}")));
    }
    Ok(())
}

/// One CLRQ update, returning the updated codebook.
pub fn clrq_step<T: Real>(codebook: &Codebook<T>, x: &ManifoldPoint<T>, gamma: T) -> Result<Codebook<T>> {
    let mut next = codebook.clone();
    next.step(x, gamma)?;
    Ok(next)
}

/// A running quantizer: codebook, schedule and observation counter.
/// Step `γ_k` is held for `repeat_m` consecutive observations.
#[derive(Clone, Debug)]
pub struct Quantizer<T> {
    codebook: Codebook<T>,
    schedule: StepSchedule,
    repeat_m: u64,
    observed: u64,
    cut_locus_skips: u64,
}

impl<T: Real> Quantizer<T> {
    pub fn new(codebook: Codebook<T>, schedule: StepSchedule, repeat_m: usize) -> Result<Self> {
        schedule.validate()?;
        if repeat_m == 0 {
            return Err(Error::InvalidParameter("repeat m must be >= 1".into()));
        }
        Ok(Self { codebook, schedule, repeat_m: repeat_m as u64, observed: 0, cut_locus_skips: 0 })
    }

    /// Current block index `k ≥ 1`.
    pub fn block(&self) -> u64 {
        self.observed / self.repeat_m + 1
    }

    pub fn current_gamma(&self) -> f64 {
        self.schedule.gamma(self.block())
    }

    pub fn observe(&mut self, x: &ManifoldPoint<T>) -> Result<StepOutcome> {
        let gamma = T::c(self.current_gamma());
        check_gamma(gamma)?;
        let (winner, _) = nearest(&self.codebook, x)?;
        self.observed += 1;
        let a = &self.codebook.centers()[winner];
        match log_map(a, x) {
            Ok(v) => {
                let moved = exp_map(&v.scale(gamma))?;
                self.codebook.replace(winner, moved);
                Ok(StepOutcome::Moved { winner })
            }
            Err(Error::CutLocus(_)) => {
                self.cut_locus_skips += 1;
                Ok(StepOutcome::SkippedCutLocus { winner })
            }
            Err(e) => Err(e),
        }
    }

    pub fn codebook(&self) -> &Codebook<T> {
        &self.codebook
    }

    pub fn into_codebook(self) -> Codebook<T> {
        self.codebook
    }

    pub fn observed(&self) -> u64 {
        self.observed
    }

    pub fn cut_locus_skips(&self) -> u64 {
        self.cut_locus_skips
    }
}

/// How the initial codebook is chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum InitPolicy<T> {
    /// `n` distinct observations drawn uniformly without replacement.
    RandomSample,
    /// k-means++ style: first uniform, then proportional to squared distance.
    PlusPlus,
    Given(Codebook<T>),
}

impl<T> InitPolicy<T> {
    pub fn label(&self) -> &'static str {
        match self {
            InitPolicy::RandomSample => "random_sample",
            InitPolicy::PlusPlus => "plus_plus",
            InitPolicy::Given(_) => "given",
        }
    }
}

/// Which points checkpoint distortions are evaluated on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalPolicy {
    /// Data sets up to this size are evaluated in full.
    pub full_budget: usize,
    /// Size of the fixed subsample used beyond the budget.
    pub holdout: usize,
}

impl Default for EvalPolicy {
    fn default() -> Self {
        Self { full_budget: 100_000, holdout: 10_000 }
    }
}

#[derive(Clone, Debug)]
pub struct ClrqConfig<T> {
    pub n: usize,
    pub schedule: StepSchedule,
    pub repeat_m: usize,
    pub init: InitPolicy<T>,
    /// Observations between checkpoints; 0 means initial and final only.
    pub checkpoint_every: usize,
    /// Passes over the data.
    pub epochs: usize,
    pub eval: EvalPolicy,
    /// Record the circle W₁ distance between the empirical measure and ν(k).
    pub trace_w1: bool,
    pub seed: u64,
}

impl<T> ClrqConfig<T> {
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            n,
            schedule: StepSchedule::default(),
            repeat_m: 1,
            init: InitPolicy::RandomSample,
            checkpoint_every: 0,
            epochs: 1,
            eval: EvalPolicy::default(),
            trace_w1: false,
            seed,
        }
    }
}

/// Diagnostics at one point of the run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    /// Observations processed so far.
    pub iteration: u64,
    pub gamma: f64,
    pub distortion: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w1: Option<f64>,
    pub centers: Vec<crate::manifold::PointRepr>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub tool: String,
    pub version: String,
    pub manifold: String,
    pub n: usize,
    pub seed: u64,
    pub rng: String,
    pub schedule: StepSchedule,
    pub repeat_m: usize,
    pub init: String,
    pub epochs: usize,
    pub checkpoint_every: usize,
    pub eval_set: String,
    pub eval_points: usize,
    pub observations: usize,
    pub cut_locus_skips: u64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound = "")]
pub struct RunReport<T: Real> {
    pub metadata: RunMetadata,
    pub checkpoints: Vec<Checkpoint>,
    pub codebook: Codebook<T>,
    pub measure: QuantizedMeasure<T>,
}

impl<T: Real> RunReport<T> {
    pub fn initial(&self) -> &Checkpoint {
        &self.checkpoints[0]
    }

    pub fn last(&self) -> &Checkpoint {
        self.checkpoints.last().expect("at least one checkpoint")
    }
}

fn distinct_from<T: Real>(chosen: &[ManifoldPoint<T>], p: &ManifoldPoint<T>) -> Result<bool> {
    for c in chosen {
        if distance(c, p)? <= T::c(DISTINCT_TOL) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Builds the initial codebook from the data according to `policy`.
pub(crate) fn initial_codebook<T: Real, R: Rng + ?Sized>(
    data: &[ManifoldPoint<T>],
    n: usize,
    policy: &InitPolicy<T>,
    rng: &mut R,
) -> Result<Codebook<T>> {
    let manifold = data.first().map(ManifoldPoint::manifold);
    match policy {
        InitPolicy::Given(cb) => {
            if cb.len() != n {
                return Err(Error::InvalidParameter(format!("given codebook has {} centers, expected {n}", cb.len())));
            }
            if let Some(m) = manifold {
                if m != cb.manifold() {
                    return Err(Error::ManifoldMismatch { expected: cb.manifold(), found: m });
                }
            }
            Ok(cb.clone())
        }
        InitPolicy::RandomSample => {
            let mut idx: Vec<usize> = (0..data.len()).collect();
            idx.shuffle(rng);
            let mut chosen = Vec::with_capacity(n);
            for i in idx {
                if distinct_from(&chosen, &data[i])? {
                    chosen.push(data[i].clone());
                    if chosen.len() == n {
                        break;
                    }
                }
            }
            if chosen.len() < n {
                return Err(Error::InsufficientDistinct { needed: n, found: chosen.len() });
            }
            Codebook::new(chosen)
        }
        InitPolicy::PlusPlus => {
            if data.is_empty() {
                return Err(Error::InsufficientDistinct { needed: n, found: 0 });
            }
            let mut chosen = vec![data[rng.random_range(0..data.len())].clone()];
            let mut d2: Vec<f64> =
                data.iter().map(|x| distance(&chosen[0], x).map(|d| (d * d).f64())).collect::<Result<_>>()?;
            while chosen.len() < n {
                let total: f64 = d2.iter().sum();
                if !(total > 0.0) {
                    return Err(Error::InsufficientDistinct { needed: n, found: chosen.len() });
                }
                let mut target = rng.random::<f64>() * total;
                let mut pick = d2.len() - 1;
                for (i, &w) in d2.iter().enumerate() {
                    if target < w {
                        pick = i;
                        break;
                    }
                    target -= w;
                }
                if d2[pick] <= DISTINCT_TOL * DISTINCT_TOL {
                    continue;
                }
                let c = data[pick].clone();
                for (i, x) in data.iter().enumerate() {
                    let d = distance(&c, x)?;
                    d2[i] = d2[i].min((d * d).f64());
                }
                chosen.push(c);
            }
            Codebook::new(chosen)
        }
    }
}

/// Runs CLRQ over `data` in order (repeated for `epochs` passes).
///
/// Checkpoints hold the distortion over the evaluation set (the full data
/// within the memory budget, else a fixed seeded subsample) and, with
/// `trace_w1` on the circle, the W₁ distance from the empirical measure of
/// the evaluation set to ν(k). Final weights come from a full Voronoi pass.
pub fn clrq_run<T: Real>(data: &[ManifoldPoint<T>], cfg: &ClrqConfig<T>) -> Result<RunReport<T>> {
    if cfg.n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    if cfg.epochs == 0 {
        return Err(Error::InvalidParameter("epochs must be >= 1".into()));
    }
    cfg.schedule.validate()?;
    let first = data.first().ok_or(Error::EmptyData)?;
    let manifold = first.manifold();
    if let Some(bad) = data.iter().find(|x| x.manifold() != manifold) {
        return Err(Error::ManifoldMismatch { expected: manifold, found: bad.manifold() });
    }
    if cfg.trace_w1 && manifold != ManifoldId::Circle {
        return Err(Error::UnsupportedManifold(manifold));
    }
    let seed = RngSeed(cfg.seed);
    let init = initial_codebook(data, cfg.n, &cfg.init, &mut seed.stream(stream::INIT))?;

    let (eval, eval_label): (Vec<ManifoldPoint<T>>, String) = if data.len() <= cfg.eval.full_budget {
        (data.to_vec(), "full".into())
    } else {
        let mut rng = seed.stream(stream::HOLDOUT);
        let idx = rand::seq::index::sample(&mut rng, data.len(), cfg.eval.holdout.min(data.len()));
        let mut idx = idx.into_vec();
        idx.sort_unstable();
        (idx.into_iter().map(|i| data[i].clone()).collect(), format!("holdout({})", cfg.eval.holdout))
    };
    let empirical = if cfg.trace_w1 { Some(empirical_measure(&eval)?) } else { None };

    let mut q = Quantizer::new(init, cfg.schedule, cfg.repeat_m)?;
    let mut checkpoints = Vec::new();
    let record = |q: &Quantizer<T>| -> Result<Checkpoint> {
        let cb = q.codebook();
        let w1 = match &empirical {
            Some(emp) => Some(circle_w1(emp, &quantized_measure(cb, &eval)?)?.f64()),
            None => None,
        };
        Ok(Checkpoint {
            iteration: q.observed(),
            gamma: q.current_gamma(),
            distortion: empirical_distortion(cb, &eval, T::c(2.0))?.f64(),
            w1,
            centers: cb.centers().iter().map(crate::manifold::PointRepr::from_point).collect(),
        })
    };
    checkpoints.push(record(&q)?);
    for _ in 0..cfg.epochs {
        for x in data {
            q.observe(x)?;
            if cfg.checkpoint_every > 0 && q.observed() % cfg.checkpoint_every as u64 == 0 {
                checkpoints.push(record(&q)?);
            }
        }
    }
    if checkpoints.last().map(|c| c.iteration) != Some(q.observed()) {
        checkpoints.push(record(&q)?);
    }

    let metadata = RunMetadata {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        manifold: manifold.to_string(),
        n: cfg.n,
        seed: cfg.seed,
        rng: RNG_ALGORITHM.into(),
        schedule: cfg.schedule,
        repeat_m: cfg.repeat_m,
        init: cfg.init.label().into(),
        epochs: cfg.epochs,
        checkpoint_every: cfg.checkpoint_every,
        eval_set: eval_label,
        eval_points: eval.len(),
        observations: data.len() * cfg.epochs,
        cut_locus_skips: q.cut_locus_skips(),
    };
    let codebook = q.into_codebook();
    let measure = quantized_measure(&codebook, data)?;
    Ok(RunReport { metadata, checkpoints, codebook, measure })
}
