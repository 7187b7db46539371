use std::io::Read;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::geo::project_planar;
use super::TrafficSample;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct IngestOptions {
    /// Projection reference `(lat, lon)` in degrees; required for lat/lon input.
    pub reference: Option<(f64, f64)>,
    /// Keep rows with `start <= t <= end`; requires a `t` column.
    pub window: Option<(f64, f64)>,
}

/// A rejected input row (1-based file line).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowDiagnostic {
    pub line: u64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IngestReport<T> {
    pub samples: Vec<TrafficSample<T>>,
    pub rejected: Vec<RowDiagnostic>,
    /// Valid rows outside the time window.
    pub filtered: usize,
}

enum Layout {
    Planar { x: usize, y: usize },
    Geographic { lat: usize, lon: usize, reference: (f64, f64) },
}

fn column(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers.iter().position(|h| h.eq_ignore_ascii_case(name))
}

/// Reads traffic samples from CSV with columns `x,y,vx,vy` or `lat,lon,vx,vy`
/// and an optional `t`. Lines starting with `#` are ignored.
pub fn ingest_traffic_csv<T: Real>(path: &Path, opts: &IngestOptions) -> Result<IngestReport<T>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io_at(path, e))?;
    parse_traffic_csv(file, opts)
}

pub fn parse_traffic_csv<T: Real, R: Read>(input: R, opts: &IngestOptions) -> Result<IngestReport<T>> {
    let mut reader =
        csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).flexible(true).from_reader(input);
    let headers = reader.headers()?.clone();
    let need = |name: &str| column(&headers, name).ok_or_else(|| Error::Format(format!("missing column `{name}`")));
    let vx = need("vx")?;
    let vy = need("vy")?;
    let layout = match (column(&headers, "x"), column(&headers, "y")) {
        (Some(x), Some(y)) => Layout::Planar { x, y },
        _ => {
            let (lat, lon) = (need("lat")?, need("lon")?);
            let reference = opts
                .reference
                .ok_or_else(|| Error::InvalidParameter("lat/lon input requires a projection reference".into()))?;
            Layout::Geographic { lat, lon, reference }
        }
    };
    let t_col = column(&headers, "t");
    if opts.window.is_some() && t_col.is_none() {
        return Err(Error::Format("time window given but input has no `t` column".into()));
    }

    let mut samples = Vec::new();
    let mut rejected = Vec::new();
    let mut filtered = 0;
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| -> std::result::Result<f64, String> {
            let raw = record.get(i).ok_or_else(|| format!("missing field {}", i + 1))?;
            let v: f64 = raw.parse().map_err(|_| format!("unparsable value `{raw}`"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("non-finite value `{raw}`"))
            }
        };
        let row = (|| -> std::result::Result<(TrafficSample<T>, Option<f64>), String> {
            let (x, y) = match layout {
                Layout::Planar { x, y } => (field(x)?, field(y)?),
                Layout::Geographic { lat, lon, reference } => {
                    project_planar(field(lat)?, field(lon)?, reference).map_err(|e| e.to_string())?
                }
            };
            let t = t_col.map(field).transpose()?;
            let s = TrafficSample::new([T::c(x), T::c(y)], [T::c(field(vx)?), T::c(field(vy)?)])
                .map_err(|e| e.to_string())?;
            Ok((s, t))
        })();
        match row {
            Ok((s, t)) => match (opts.window, t) {
                (Some((a, b)), Some(t)) if t < a || t > b => filtered += 1,
                _ => samples.push(s),
            },
            Err(reason) => rejected.push(RowDiagnostic { line, reason }),
        }
    }
    if samples.is_empty() {
        return Err(Error::EmptyData);
    }
    Ok(IngestReport { samples, rejected, filtered })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, opts: IngestOptions) -> Result<IngestReport<f64>> {
        parse_traffic_csv(text.as_bytes(), &opts)
    }

    #[test]
    fn planar_rows() {
        let r = parse("x,y,vx,vy\n0,0,1,0\n1,2,0,1\n3,4,5,6\n", IngestOptions::default()).unwrap();
        assert_eq!(r.samples.len(), 3);
        assert_eq!(r.samples[2].z, [3.0, 4.0]);
        assert!(r.rejected.is_empty());
    }

    #[test]
    fn bad_row_is_reported_with_line() {
        let r = parse("x,y,vx,vy\n0,0,1,0\n1,NaN,0,1\n3,4,5,6\n", IngestOptions::default()).unwrap();
        assert_eq!(r.samples.len(), 2);
        assert_eq!(r.rejected.len(), 1);
        assert_eq!(r.rejected[0].line, 3);
    }

    #[test]
    fn geographic_needs_reference() {
        let text = "lat,lon,vx,vy\n45.0,5.0,1,0\n45.01,5.0,1,0\n";
        assert!(matches!(parse(text, IngestOptions::default()), Err(Error::InvalidParameter(_))));
        let r = parse(text, IngestOptions { reference: Some((45.0, 5.0)), window: None }).unwrap();
        assert!(r.samples[0].z[0].abs() < 1e-9);
        assert!((r.samples[1].z[1] - 1.112).abs() < 1e-3);
    }

    #[test]
    fn window_and_missing_columns() {
        let text = "x,y,vx,vy,t\n0,0,1,0,1\n1,1,1,0,5\n2,2,1,0,9\n";
        let r = parse(text, IngestOptions { reference: None, window: Some((2.0, 9.0)) }).unwrap();
        assert_eq!((r.samples.len(), r.filtered), (2, 1));
        assert!(parse("x,y,vx\n0,0,1\n", IngestOptions::default()).is_err());
        assert!(parse("x,y,vx,vy\n", IngestOptions::default()).is_err());
        assert!(parse("x,y,vx,vy\n0,0,1,0\n", IngestOptions { reference: None, window: Some((0.0, 1.0)) }).is_err());
    }
}
