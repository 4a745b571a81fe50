//! Plain raster and vector output: RGB buffers, PPM, sidecar JSON, SVG.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::grid::{Cell, GridClassification, GridSpec};

pub const CRASH_GRAY: [u8; 3] = [128, 128, 128];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    /// Row-major RGB triples, top row first.
    pub data: Vec<u8>,
}

/// Digest in `(-1, 1)` to a blue-white-red ramp.
pub fn digest_color(d: f64) -> [u8; 3] {
    let t = d.clamp(-1.0, 1.0);
    let fade = |s: f64| (255.0 * (1.0 - s)).round() as u8;
    if t < 0.0 {
        [fade(-t), fade(-t), 255]
    } else {
        [255, fade(t), fade(t)]
    }
}

pub fn grid_image(g: &GridClassification) -> RgbImage {
    let n = g.res();
    let mut data = Vec::with_capacity(3 * n * n);
    for c in &g.cells {
        let rgb = match c {
            Cell::Crash { .. } => CRASH_GRAY,
            Cell::Value { digest, .. } => digest_color(*digest),
        };
        data.extend_from_slice(&rgb);
    }
    RgbImage { width: n, height: n, data }
}

pub fn to_ppm(img: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.data);
    out
}

/// Parameters stored next to a raster.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RasterSidecar {
    pub equation: String,
    pub spec: GridSpec,
    pub crashed_cells: usize,
    /// Hash of the canonical cell bytes.
    pub cells_sha256: String,
    /// Hash of the image file written alongside.
    pub image_sha256: String,
    pub image_format: String,
}

pub fn sidecar(equation: &str, g: &GridClassification, image_bytes: &[u8], format: &str) -> RasterSidecar {
    RasterSidecar {
        equation: equation.to_string(),
        spec: g.spec.clone(),
        crashed_cells: g.crashed_cells(),
        cells_sha256: g.sha256(),
        image_sha256: hex::encode(Sha256::digest(image_bytes)),
        image_format: format.to_string(),
    }
}

const PALETTE: [&str; 10] =
    ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

/// Greedy chains through nearby points of one layer, in input order.
fn chains(points: &[(f64, f64)], gap: f64) -> Vec<Vec<(f64, f64)>> {
    let mut used = vec![false; points.len()];
    let mut out = Vec::new();
    for start in 0..points.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut chain = vec![points[start]];
        loop {
            let last = *chain.last().unwrap();
            let next = (0..points.len())
                .filter(|&j| !used[j])
                .map(|j| (j, (points[j].0 - last.0).hypot(points[j].1 - last.1)))
                .filter(|&(_, d)| d <= gap)
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match next {
                Some((j, _)) => {
                    used[j] = true;
                    chain.push(points[j]);
                }
                None => break,
            }
        }
        out.push(chain);
    }
    out
}

/// SVG of curve samples `(x, y, layer)` as polylines, with optional points
/// drawn as dots. `gap` is the largest distance joined by a segment.
pub fn svg_overlay(region: [f64; 4], size: usize, curves: &[(f64, f64, usize)], gap: f64, points: &[[f64; 2]]) -> String {
    let [xmin, xmax, ymin, ymax] = region;
    let sx = |x: f64| (x - xmin) / (xmax - xmin) * size as f64;
    let sy = |y: f64| (ymax - y) / (ymax - ymin) * size as f64;
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n<rect width=\"{size}\" height=\"{size}\" fill=\"white\"/>\n"
    );
    let mut layers: Vec<usize> = curves.iter().map(|c| c.2).collect();
    layers.sort_unstable();
    layers.dedup();
    for layer in layers {
        let color = PALETTE[(layer.max(1) - 1) % PALETTE.len()];
        let pts: Vec<(f64, f64)> = curves.iter().filter(|c| c.2 == layer).map(|c| (c.0, c.1)).collect();
        s.push_str(&format!("<g stroke=\"{color}\" fill=\"none\" stroke-width=\"1\" data-layer=\"{layer}\">\n"));
        for ch in chains(&pts, gap) {
            if ch.len() == 1 {
                s.push_str(&format!("<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"0.8\" fill=\"{color}\"/>\n", sx(ch[0].0), sy(ch[0].1)));
                continue;
            }
            let coords: Vec<String> = ch.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            s.push_str(&format!("<polyline points=\"{}\"/>\n", coords.join(" ")));
        }
        s.push_str("</g>\n");
    }
    for p in points {
        s.push_str(&format!("<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"1.5\" fill=\"black\"/>\n", sx(p[0]), sy(p[1])));
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ppm_header_and_colors() {
        let img = RgbImage { width: 2, height: 1, data: vec![128, 128, 128, 255, 255, 255] };
        let ppm = to_ppm(&img);
        assert!(ppm.starts_with(b"P6\n2 1\n255\n"));
        assert_eq!(ppm.len(), 11 + 6);
        assert_eq!(digest_color(0.0), [255, 255, 255]);
        assert_eq!(digest_color(-1.0), [0, 0, 255]);
    }

    #[test]
    fn svg_joins_close_points() {
        let rows = vec![(0.0, 0.0, 1), (0.1, 0.0, 1), (0.2, 0.0, 1), (5.0, 5.0, 2)];
        let s = svg_overlay([-1.0, 6.0, -1.0, 6.0], 100, &rows, 0.15, &[[1.0, 1.0]]);
        assert_eq!(s.matches("<polyline").count(), 1);
        assert_eq!(s.matches("<circle").count(), 2);
    }
}
