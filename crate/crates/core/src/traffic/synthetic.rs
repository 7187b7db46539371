use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::{stream, RngSeed};
use crate::scalar::Real;

use super::TrafficSample;

/// Synthetic airspace layouts of increasing complexity.
///
/// Every aircraft flies a straight track at constant velocity, sampled at
/// regular spacing; aircraft speeds differ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Lanes along one axis: an isolated aircraft, a same-direction pair and
    /// two close opposite-direction lanes. No crossings.
    ParallelFlow,
    /// Two isolated opposite lanes and one crossing of two aircraft.
    SingleCrossing,
    /// Three dense flows crossing over one disk, plus isolated lanes and a
    /// single crossing elsewhere.
    MultiCrossing,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::ParallelFlow, Scenario::SingleCrossing, Scenario::MultiCrossing];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::ParallelFlow => "parallel-flow",
            Scenario::SingleCrossing => "single-crossing",
            Scenario::MultiCrossing => "multi-crossing",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "unknown scenario `{s}` (expected parallel-flow, single-crossing or multi-crossing)"
            ))
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    /// Side of the square airspace, km.
    pub extent: f64,
    /// Distance between consecutive samples of one track, km.
    pub spacing: f64,
    /// Nominal ground speed, km per minute.
    pub speed: f64,
    /// Relative spread of per-aircraft speeds.
    pub speed_spread: f64,
    /// Separation of lanes meant not to interact, km; should exceed the kernel radius.
    pub lane_gap: f64,
    /// Route orientation, radians; a property of the airspace, not of the seed.
    pub heading: f64,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario, seed: u64) -> Self {
        Self {
            scenario,
            extent: 100.0,
            spacing: 1.0,
            speed: 7.5,
            speed_spread: 0.15,
            lane_gap: 12.0,
            heading: 0.5,
            seed,
        }
    }
}

struct Builder<'a, R> {
    cfg: &'a ScenarioConfig,
    rng: &'a mut R,
    out: Vec<([f64; 2], [f64; 2])>,
}

impl<R: Rng> Builder<'_, R> {
    fn speed(&mut self) -> f64 {
        let s = self.cfg.speed_spread;
        self.cfg.speed * (1.0 + self.rng.random_range(-s..=s))
    }

    /// One aircraft on a straight track of the given length centered at `mid`.
    fn track(&mut self, mid: [f64; 2], heading: f64, length: f64, spacing: f64) -> f64 {
        let speed = self.speed();
        self.track_at(mid, heading, length, spacing, speed);
        speed
    }

    fn track_at(&mut self, mid: [f64; 2], heading: f64, length: f64, spacing: f64, speed: f64) {
        let dir = [heading.cos(), heading.sin()];
        let v = [speed * dir[0], speed * dir[1]];
        let mut s = -length / 2.0 + self.rng.random_range(0.0..spacing);
        while s <= length / 2.0 {
            self.out.push(([mid[0] + s * dir[0], mid[1] + s * dir[1]], v));
            s += spacing;
        }
    }

    fn shifted(p: [f64; 2], heading: f64, lateral: f64) -> [f64; 2] {
        [p[0] - lateral * heading.sin(), p[1] + lateral * heading.cos()]
    }
}

/// Generates one synthetic traffic scene (positions in km, velocities in
/// km/min), deterministic in the seed.
pub fn generate_scenario<T: Real>(cfg: &ScenarioConfig) -> Result<Vec<TrafficSample<T>>> {
    for (name, v) in
        [("extent", cfg.extent), ("spacing", cfg.spacing), ("speed", cfg.speed), ("lane_gap", cfg.lane_gap)]
    {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidParameter(format!("scenario {name} must be positive")));
        }
    }
    if !(0.0..1.0).contains(&cfg.speed_spread) {
        return Err(Error::InvalidParameter("scenario speed_spread must lie in [0, 1)".into()));
    }
    let mut rng = RngSeed(cfg.seed).stream(stream::SYNTHETIC);
    let e = cfg.extent;
    let gap = cfg.lane_gap;
    if !cfg.heading.is_finite() {
        return Err(Error::InvalidParameter("scenario heading must be finite".into()));
    }
    let theta = cfg.heading;
    let length = 0.35 * e;
    let mut b = Builder { cfg, rng: &mut rng, out: Vec::new() };
    let lane = |k: f64| Builder::<R64>::shifted([0.0, 0.0], theta, k * gap);
    match cfg.scenario {
        Scenario::ParallelFlow => {
            b.track(lane(-1.5), theta, length, cfg.spacing);
            let pair = b.rng.random_range(0.05..0.15) * gap;
            let lead = b.track(lane(-0.5), theta, length, cfg.spacing);
            // a distinctly faster or slower follower on the neighboring lane
            let sign = if b.rng.random::<bool>() { 1.0 } else { -1.0 };
            let follower = lead * (1.0 + sign * b.rng.random_range(0.08..0.15));
            b.track_at(Builder::<R64>::shifted(lane(-0.5), theta, pair), theta, length, cfg.spacing, follower);
            let close = b.rng.random_range(0.2..0.3) * gap;
            b.track(lane(0.75), theta, length, cfg.spacing);
            b.track(Builder::<R64>::shifted(lane(0.75), theta, close), theta + PI, length, cfg.spacing);
        }
        Scenario::SingleCrossing => {
            b.track(lane(-1.5), theta, length, cfg.spacing);
            b.track(lane(-0.5), theta + PI, length, cfg.spacing);
            // downstream of the lane ends, out of kernel reach of both lanes
            let cross = b.rng.random_range(FRAC_PI_2 - 0.4..FRAC_PI_2 + 0.4);
            let base = lane(0.5);
            let at = [base[0] + 0.9 * length * theta.cos(), base[1] + 0.9 * length * theta.sin()];
            b.track(at, theta, length, cfg.spacing);
            b.track(at, theta + cross, length, cfg.spacing);
        }
        Scenario::MultiCrossing => {
            // three flows at 120° over a dense disk, each flow one velocity
            let disk = 0.12 * e;
            let spacing = cfg.spacing / 2.0;
            for k in 0..3 {
                let h = theta + k as f64 * TAU / 3.0;
                let speed = b.speed();
                let v = [speed * h.cos(), speed * h.sin()];
                let dense_gap = gap / 6.0;
                let lanes = (2.0 * disk / dense_gap) as i64;
                for l in 0..=lanes {
                    let off = -disk + l as f64 * dense_gap + b.rng.random_range(0.0..dense_gap / 2.0);
                    if off.abs() >= disk {
                        continue;
                    }
                    let half = (disk * disk - off * off).sqrt();
                    let mid = Builder::<R64>::shifted([0.0, 0.0], h, off);
                    let mut s = -half + b.rng.random_range(0.0..spacing);
                    while s <= half {
                        b.out.push(([mid[0] + s * h.cos(), mid[1] + s * h.sin()], v));
                        s += spacing;
                    }
                }
            }
            b.track(lane(-3.5), theta, length, cfg.spacing);
            b.track(lane(-2.5), theta + PI, length, cfg.spacing);
            let cross = b.rng.random_range(FRAC_PI_2 - 0.4..FRAC_PI_2 + 0.4);
            let base = lane(2.5);
            let at = [base[0] + 0.9 * length * theta.cos(), base[1] + 0.9 * length * theta.sin()];
            b.track(at, theta, length, cfg.spacing);
            b.track(at, theta + cross, length, cfg.spacing);
        }
    }
    b.out.into_iter().map(|(z, v)| TrafficSample::new([T::c(z[0]), T::c(z[1])], [T::c(v[0]), T::c(v[1])])).collect()
}

type R64 = rand_chacha::ChaCha8Rng;
