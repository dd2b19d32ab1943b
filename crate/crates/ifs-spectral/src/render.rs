//! Deterministic SVG and CSV output for planar (and linear) point sets.

use std::fmt::Write as _;
use std::io;

pub const SIZE: f64 = 800.0;
pub const MARGIN: f64 = 0.05;
pub const DOT_RADIUS: f64 = 0.8;

/// A closed polygon with a stroke colour.
#[derive(Clone, Debug)]
pub struct Outline {
    pub points: Vec<[f64; 2]>,
    pub stroke: &'static str,
}

#[derive(Clone, Debug, Default)]
pub struct Scene {
    pub outlines: Vec<Outline>,
    pub dots: Vec<[f64; 2]>,
}

impl Scene {
    fn bounds(&self) -> Option<([f64; 2], [f64; 2])> {
        let all = self.outlines.iter().flat_map(|o| o.points.iter()).chain(self.dots.iter());
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        let mut any = false;
        for p in all {
            any = true;
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        any.then_some((lo, hi))
    }

    /// SVG 1.1 document, 800×800, content fitted with a 5% margin and
    /// `y` pointing up.
    pub fn to_svg(&self) -> String {
        let mut s = String::new();
        writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
        writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
        )
        .unwrap();
        writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#).unwrap();
        if let Some((lo, hi)) = self.bounds() {
            let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
            let inner = SIZE * (1.0 - 2.0 * MARGIN);
            let k = if span > 0.0 { inner / span } else { 1.0 };
            let cx = 0.5 * (lo[0] + hi[0]);
            let cy = 0.5 * (lo[1] + hi[1]);
            let map = |p: &[f64; 2]| (SIZE / 2.0 + k * (p[0] - cx), SIZE / 2.0 - k * (p[1] - cy));
            for o in &self.outlines {
                let pts: Vec<String> = o
                    .points
                    .iter()
                    .map(|p| {
                        let (x, y) = map(p);
                        format!("{x:.3},{y:.3}")
                    })
                    .collect();
                writeln!(
                    s,
                    r#"<polygon points="{}" fill="none" stroke="{}" stroke-width="1"/>"#,
                    pts.join(" "),
                    o.stroke
                )
                .unwrap();
            }
            if !self.dots.is_empty() {
                writeln!(s, r#"<g fill="black">"#).unwrap();
                for p in &self.dots {
                    let (x, y) = map(p);
                    writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{DOT_RADIUS}"/>"#).unwrap();
                }
                writeln!(s, "</g>").unwrap();
            }
        }
        s.push_str("</svg>\n");
        s
    }
}

/// Planar view of a point: 1D sets sit on the horizontal axis.
pub fn planar(p: &[f64]) -> [f64; 2] {
    match p {
        [x] => [*x, 0.0],
        [x, y, ..] => [*x, *y],
        [] => [0.0, 0.0],
    }
}

/// One point per line, coordinates separated by commas.
pub fn write_csv<W: io::Write>(out: W, points: impl IntoIterator<Item = Vec<f64>>) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}
