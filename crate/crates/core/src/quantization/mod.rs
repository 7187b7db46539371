//! Optimal quantization of measures on manifolds.
//!
//! * [`Codebook`] / [`QuantizedMeasure`]: the `n` centers and their cell masses.
//! * [`voronoi_assign`], [`empirical_distortion`], [`distortion_gradient`],
//!   [`quantized_measure`]: evaluation against a finite sample.
//! * [`karcher_mean`]: Fréchet mean by Karcher flow.
//! * [`clrq_step`], [`clrq_run`], [`Quantizer`]: the online competitive
//!   learning algorithm, which moves only the winning center a fraction
//!   `γ_k` of the way along the geodesic to each new observation.

mod cells;
mod clrq;
mod codebook;
mod karcher;

pub use cells::{distortion_gradient, empirical_distortion, gradient_norm, quantized_measure, voronoi_assign};
pub(crate) use clrq::initial_codebook;
pub use clrq::{
    clrq_run, clrq_step, Checkpoint, ClrqConfig, EvalPolicy, InitPolicy, Quantizer, RunMetadata, RunReport,
    StepOutcome, StepSchedule,
};
pub use codebook::{Codebook, QuantizedMeasure, DISTINCT_TOL};
pub use karcher::{karcher_mean, KarcherMean, KarcherOptions};
