use std::fmt::Write;

use crate::scalar::Real;

use super::TrafficSample;

const PALETTE: [&str; 8] = ["#2ca02c", "#1f77b4", "#d62728", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];
const UNLABELED: &str = "#aaaaaa";

/// Self-contained SVG scatter of sample positions colored by class label
/// (1-based; 0 is drawn grey).
pub fn scatter_svg<T: Real>(samples: &[TrafficSample<T>], labels: &[usize], size: u32) -> String {
    let size = size.max(16) as f64;
    let margin = 10.0;
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for s in samples {
        let (x, y) = (s.z[0].f64(), s.z[1].f64());
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let span = (x1 - x0).max(y1 - y0).max(f64::MIN_POSITIVE);
    let scale = (size - 2.0 * margin) / span;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (s, &l) in samples.iter().zip(labels) {
        let cx = margin + (s.z[0].f64() - x0) * scale;
        let cy = size - margin - (s.z[1].f64() - y0) * scale;
        let color = if l == 0 { UNLABELED } else { PALETTE[(l - 1) % PALETTE.len()] };
        let _ = writeln!(out, r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="1.5" fill="{color}"/>"#);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_circle_per_sample() {
        let s =
            [TrafficSample::new([0.0, 0.0], [1.0, 0.0]).unwrap(), TrafficSample::new([1.0, 1.0], [1.0, 0.0]).unwrap()];
        let svg = scatter_svg(&s, &[1, 3], 200);
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(svg.contains(PALETTE[0]) && svg.contains(PALETTE[2]));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
