//! Constant-curvature model spaces: the circle S¹, the 2-sphere S² and the
//! hyperbolic upper half-plane ℍ².

pub mod circle;
pub mod hyperbolic;
pub mod sphere;

pub use circle::{circle_distance, circle_exp, circle_log, normalize_angle};
pub use hyperbolic::{h2_distance, h2_exp, h2_log, Mobius};
pub use sphere::{sphere_distance, sphere_exp, sphere_log};
