//! JSON form of points: `{"manifold": tag, "coords": [..]}`, or
//! `{"manifold": "spd", "n": n, "entries": [..]}` for SPD matrices.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ManifoldId, ManifoldPoint};
use crate::curvature::normalize_angle;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRepr {
    pub manifold: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<f64>>,
}

impl PointRepr {
    pub fn from_point<T: Real>(p: &ManifoldPoint<T>) -> Self {
        let values: Vec<f64> = p.coords().iter().map(|c| c.f64()).collect();
        match p.manifold() {
            ManifoldId::Spd(n) => Self { manifold: "spd".into(), n: Some(n), coords: None, entries: Some(values) },
            ManifoldId::Circle => Self {
                manifold: "circle".into(),
                n: None,
                coords: Some(vec![normalize_angle(values[0])]),
                entries: None,
            },
            m => Self { manifold: m.tag().into(), n: None, coords: Some(values), entries: None },
        }
    }

    pub fn into_point<T: Real>(self) -> Result<ManifoldPoint<T>> {
        let bad = |msg: &str| Error::Format(format!("point JSON: {msg}"));
        let (manifold, values) = match self.manifold.as_str() {
            "spd" => {
                let entries = self.entries.ok_or_else(|| bad("spd point needs `entries`"))?;
                let n = self.n.ok_or_else(|| bad("spd point needs `n`"))?;
                (ManifoldId::Spd(n), entries)
            }
            "euclidean" => {
                let c = self.coords.ok_or_else(|| bad("missing `coords`"))?;
                (ManifoldId::Euclidean(c.len()), c)
            }
            tag => (tag.parse::<ManifoldId>()?, self.coords.ok_or_else(|| bad("missing `coords`"))?),
        };
        ManifoldPoint::new(manifold, values.into_iter().map(T::c).collect())
    }
}

impl<T: Real> Serialize for ManifoldPoint<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PointRepr::from_point(self).serialize(serializer)
    }
}

impl<'de, T: Real> Deserialize<'de> for ManifoldPoint<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        PointRepr::deserialize(deserializer)?.into_point().map_err(serde::de::Error::custom)
    }
}
