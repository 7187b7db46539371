use std::path::Path;

use crate::error::{Error, Result};
use crate::manifold::{ManifoldId, ManifoldPoint};
use crate::quantization::QuantizedMeasure;

/// Reads points from a CSV whose header names the manifold coordinates
/// (`theta`; `x,y,z`; `x,y`; `x1..xd`; `s11..snn`). All invalid rows are
/// reported together.
pub fn read_points(path: &Path, manifold: ManifoldId) -> Result<Vec<ManifoldPoint<f64>>> {
    manifold.validate()?;
    let mut reader =
        csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).flexible(true).from_path(path).map_err(
            |e| match e.into_kind() {
                csv::ErrorKind::Io(e) => Error::io_at(path, e),
                k => Error::Format(format!("{}: {k:?}", path.display())),
            },
        )?;
    let headers = reader.headers()?.clone();
    let names = manifold.coord_names();
    let mut columns = Vec::with_capacity(names.len());
    for name in &names {
        let idx = headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Format(format!("{}: missing column `{name}` for {manifold}", path.display())))?;
        columns.push(idx);
    }
    let mut points = Vec::new();
    let mut bad = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let coords: std::result::Result<Vec<f64>, String> = columns
            .iter()
            .map(|&i| {
                let raw = record.get(i).unwrap_or("");
                raw.parse::<f64>().map_err(|_| format!("unparsable value `{raw}`"))
            })
            .collect();
        match coords.and_then(|c| ManifoldPoint::new(manifold, c).map_err(|e| e.to_string())) {
            Ok(p) => points.push(p),
            Err(reason) => bad.push((line, reason)),
        }
    }
    match bad.len() {
        0 if points.is_empty() => Err(Error::EmptyData),
        0 => Ok(points),
        1 => Err(Error::Parse { line: bad[0].0, message: bad[0].1.clone() }),
        _ => {
            let list: Vec<String> = bad.iter().map(|(l, r)| format!("line {l}: {r}")).collect();
            Err(Error::Format(format!("{} invalid rows: {}", bad.len(), list.join("; "))))
        }
    }
}

/// Loads a quantized measure from a traffic summary or quantize report.
pub fn read_measure(path: &Path) -> Result<QuantizedMeasure<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io_at(path, e))?;
    let doc: serde_json::Value = serde_json::from_str(&text)?;
    let measure = doc
        .get("summary")
        .and_then(|s| s.get("measure"))
        .or_else(|| doc.get("report").and_then(|r| r.get("measure")))
        .or_else(|| doc.get("measure"))
        .ok_or_else(|| Error::Format(format!("{}: no summary or report measure", path.display())))?;
    Ok(serde_json::from_value(measure.clone())?)
}
