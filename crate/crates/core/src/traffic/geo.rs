use crate::error::{Error, Result};
use crate::scalar::Real;

pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Stereographic projection (degrees in, kilometres out) onto the plane
/// tangent to the sphere at `reference`; `x` points east, `y` north.
pub fn project_planar<T: Real>(lat: T, lon: T, reference: (T, T)) -> Result<(T, T)> {
    let valid = |la: T, lo: T| la.is_finite() && lo.is_finite() && la.abs() <= T::c(90.0) && lo.abs() <= T::c(360.0);
    if !valid(lat, lon) || !valid(reference.0, reference.1) {
        return Err(Error::InvalidParameter(format!("invalid geographic coordinates ({lat}, {lon})")));
    }
    let (phi, lam) = (lat.to_radians(), lon.to_radians());
    let (phi0, lam0) = (reference.0.to_radians(), reference.1.to_radians());
    let dl = lam - lam0;
    let cos_c = phi0.sin() * phi.sin() + phi0.cos() * phi.cos() * dl.cos();
    if T::one() + cos_c < T::c(1e-12) {
        return Err(Error::CutLocus(format!("({lat}, {lon}) is antipodal to the projection reference")));
    }
    let k = T::c(2.0 * EARTH_RADIUS_KM) / (T::one() + cos_c);
    let x = k * phi.cos() * dl.sin();
    let y = k * (phi0.cos() * phi.sin() - phi0.sin() * phi.cos() * dl.cos());
    Ok((x, y))
}
