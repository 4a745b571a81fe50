//! `fsets grid`: crash/escape raster over a plane of initial values.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use fsets::enumeration::{forbidden_curves, grid_classify, grid_image, sidecar, svg_overlay, to_ppm, GridSpec, RgbImage};
use image::codecs::png::PngEncoder;
use image::{ExtendedColorType, ImageEncoder};
use serde::Serialize;

use crate::input::{parse_floats, parse_region, EquationInput};
use crate::manifest::OutDir;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Png,
    Ppm,
}

#[derive(Args, Debug, Serialize)]
pub struct GridArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub input: EquationInput,
    /// `xmin,xmax,ymin,ymax`.
    #[arg(long, value_parser = parse_region, allow_hyphen_values = true, default_value = "-5,5,-5,5")]
    pub region: [f64; 4],
    /// Cells per side.
    #[arg(long, default_value_t = 400)]
    pub res: usize,
    /// Applications before a cell counts as surviving.
    #[arg(long, default_value_t = 10)]
    pub horizon: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Window coordinates (oldest first) on the horizontal and vertical axes.
    #[arg(long, value_parser = parse_axes, default_value = "0,1")]
    pub axes: [usize; 2],
    /// Values of the remaining window coordinates, in window order.
    /// Comma-separated; defaults to all zeros.
    #[arg(long, allow_hyphen_values = true)]
    pub base: Option<String>,
    #[arg(long, value_enum, default_value = "png")]
    pub format: Format,
    /// Also draw the forbidden curves up to this layer into `overlay.svg`.
    #[arg(long)]
    pub overlay_depth: Option<usize>,
    #[arg(long, default_value = "grid-out")]
    #[serde(skip)]
    pub out: PathBuf,
}

fn invalid(msg: String) -> anyhow::Error {
    fsets::Error::Invalid(msg).into()
}

pub fn spec(a: &GridArgs, order: usize) -> anyhow::Result<GridSpec> {
    if !(1..=4096).contains(&a.res) {
        return Err(invalid(format!("--res must be in 1..=4096, got {}", a.res)));
    }
    if order < 2 {
        return Err(invalid("grids need an equation of order at least 2".into()));
    }
    let axes = a.axes;
    if axes[0] == axes[1] || axes.iter().any(|&i| i >= order) {
        return Err(invalid(format!("bad axes {axes:?} for order {order}")));
    }
    let base = match &a.base {
        Some(b) => parse_floats(b).map_err(invalid)?,
        None => vec![0.0; order],
    };
    if base.len() != order {
        return Err(invalid(format!("--base needs {order} values")));
    }
    Ok(GridSpec { region: a.region, res: a.res, horizon: a.horizon, tol: a.tol, axes, base })
}

fn parse_axes(s: &str) -> Result<[usize; 2], String> {
    match s.split_once(',') {
        Some((a, b)) => Ok([a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?]),
        None => Err(format!("expected two indices like 0,1, got {s:?}")),
    }
}

pub fn encode_png(img: &RgbImage) -> anyhow::Result<Vec<u8>> {
    let mut out = Vec::new();
    PngEncoder::new(&mut out).write_image(&img.data, img.width as u32, img.height as u32, ExtendedColorType::Rgb8)?;
    Ok(out)
}

pub fn run(a: &GridArgs, argv: &[String]) -> anyhow::Result<()> {
    let loaded = a.input.load()?;
    let de = loaded.def.to_equation()?;
    let spec = spec(a, de.order())?;
    let g = grid_classify(&de, &spec)?;
    let img = grid_image(&g);
    let (name, bytes) = match a.format {
        Format::Png => ("raster.png", encode_png(&img)?),
        Format::Ppm => ("raster.ppm", to_ppm(&img)),
    };
    let mut out = OutDir::create(&a.out)?;
    out.write(name, &bytes)?;
    let fmt = if a.format == Format::Png { "png" } else { "ppm" };
    out.write_json("raster.json", &sidecar(&loaded.def.to_canonical_text()?, &g, &bytes, fmt))?;
    if let Some(d) = a.overlay_depth {
        if de.order() != 2 {
            return Err(invalid("--overlay-depth needs an order-2 equation".into()));
        }
        let fam = forbidden_curves(&de, d, 20_000)?;
        let steps = a.res.clamp(50, 800);
        let rows = fam.plane_samples(spec.region, steps)?;
        let [x0, x1, y0, y1] = spec.region;
        let gap = 4.0 * (x1 - x0).max(y1 - y0) / steps as f64;
        out.write("overlay.svg", svg_overlay(spec.region, 600, &rows, gap, &[]).as_bytes())?;
    }
    let s = g.summary();
    println!("{} of {} cells crash within {} steps; cells sha256 {}", s.crashed_cells, s.res * s.res, s.horizon, s.sha256);
    out.finish("grid", argv, &(a, &a.input.set), vec![loaded.input])?;
    Ok(())
}
