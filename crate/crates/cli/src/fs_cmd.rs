//! `fsets fs`: forbidden-set data by closed form or enumeration.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use fsets::catalog::{canonical_form, equation_hash, verify_description, VerificationReport};
use fsets::enumeration::cobweb::{cobweb_fs, MonotonePoleMap, PoleMap};
use fsets::enumeration::fastmap::FastMap;
use fsets::enumeration::{
    curve_csv, forbidden_curves, inverse_orbit, svg_overlay, symbolic_words, InverseOrbitOptions, WordMode,
};
use fsets::fsdesc::{FsDescription, FsItem, FsPoint, FsRecord};
use fsets::reductions::{aghajani_fs, reduce, shojaei_fs, ChangeOfVariables, InvariantForm, Via};
use fsets::riccati::{riccati_fs_order1, riccati_k_coeffs, riccati_k_fs, RiccatiParams1, DEFAULT_UNITY_BOUND};
use fsets::{iterate, DifferenceEquation, EquationDef, Field, IterOptions, Scalar};
use serde::{Deserialize, Serialize};

use crate::input::{parse_region, EquationInput};
use crate::manifest::OutDir;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Auto,
    Closed,
    InverseOrbit,
    Curves,
    Symbolic,
    Cobweb,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldArg {
    Real,
    Complex,
}

#[derive(Args, Debug, Serialize)]
pub struct FsArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub input: EquationInput,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: Method,
    /// Depth: points, layers or iterates to generate.
    #[arg(long, default_value_t = 10)]
    pub depth: usize,
    /// Field for inverse-orbit and symbolic enumeration (default: the
    /// equation's field).
    #[arg(long, value_enum)]
    pub field: Option<FieldArg>,
    /// Curves only: region `xmin,xmax,ymin,ymax` for the CSV and SVG
    /// samples of an order-2 family.
    #[arg(long, value_parser = parse_region, allow_hyphen_values = true)]
    pub region: Option<[f64; 4]>,
    /// Curves only: abscissae per axis for the plane samples.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Term budget for symbolic unfolding.
    #[arg(long, default_value_t = 20_000)]
    pub budget: usize,
    /// Sample points per layer or surface for the verifier.
    #[arg(long, default_value_t = 5)]
    pub verify_samples: usize,
    /// Deepest layer or point the verifier checks.
    #[arg(long, default_value_t = 30)]
    pub verify_depth: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value = "fs-out")]
    #[serde(skip)]
    pub out: PathBuf,
}

/// Contents of `fs.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FsArtifact {
    pub equation: String,
    pub equation_hash: String,
    pub generator: String,
    pub method: Method,
    pub depth: usize,
    pub description: FsDescription,
    /// Listed points with their forward crash steps.
    pub records: Vec<FsRecord>,
    pub verification: VerificationReport,
    pub details: serde_json::Value,
}

struct Produced {
    generator: String,
    description: FsDescription,
    details: serde_json::Value,
}

fn not_applicable(method: &str, why: &str, de: &DifferenceEquation, def: &EquationDef) -> anyhow::Error {
    fsets::Error::NotApplicable(format!(
        "{method}: {why}; applicable methods: {}",
        applicable(de, def).join(", ")
    ))
    .into()
}

/// Methods that can run on this equation.
pub fn applicable(de: &DifferenceEquation, def: &EquationDef) -> Vec<&'static str> {
    let mut out = Vec::new();
    if closed(de, 1).is_ok() {
        out.push("closed");
    }
    if de.map.is_numeric() {
        out.push("inverse-orbit");
    }
    out.push("curves");
    if is_inverse_parabola(def) {
        out.push("symbolic");
    }
    if de.order() == 1 && de.map.is_numeric() {
        if let Ok(pm) = PoleMap::from_equation(de) {
            if MonotonePoleMap::new(pm).checks.all() {
                out.push("cobweb");
            }
        }
    }
    out
}

fn is_inverse_parabola(def: &EquationDef) -> bool {
    let target = EquationDef::new(1, "1", "x0^2 - 1");
    let strip = |s: String| s.lines().filter(|l| !l.starts_with("field:")).collect::<Vec<_>>().join("\n");
    match (canonical_form(def), canonical_form(&target)) {
        (Ok(a), Ok(b)) => strip(a) == strip(b),
        _ => false,
    }
}

fn closed(de: &DifferenceEquation, depth: usize) -> anyhow::Result<Produced> {
    if let Some(p) = RiccatiParams1::from_map(&de.map) {
        let fs = riccati_fs_order1(&p, depth)?;
        return Ok(Produced {
            generator: "riccati_fs_order1".into(),
            description: fs.description(),
            details: serde_json::json!({ "params": p, "stop": fs.stop }),
        });
    }
    if let Some(c) = riccati_k_coeffs(&de.map) {
        let z = riccati_k_fs(&c, depth)?;
        return Ok(Produced {
            generator: "riccati_k_fs".into(),
            description: z.description(),
            details: serde_json::json!({ "coeffs": c, "zero_set": z }),
        });
    }
    let Some(r) = (if de.map.is_numeric() { reduce(de) } else { None }) else {
        return Err(fsets::Error::NotApplicable("no closed form known".into()).into());
    };
    let summary = r.summary();
    if let Via::Change { change: ChangeOfVariables::ProductLags { k }, .. } = &r.via {
        let get = |n: &str| r.params.iter().find(|(m, _)| m == n).map(|(_, v)| v.clone());
        if let (Some(a), Some(b), Some(g)) = (get("alpha"), get("beta"), get("gamma")) {
            let s = shojaei_fs(&a, &b, &g, *k, depth, DEFAULT_UNITY_BOUND)?;
            if let Some(d) = s.description() {
                return Ok(Produced {
                    generator: "product_surfaces".into(),
                    description: d.clone(),
                    details: serde_json::json!({ "reduction": summary, "fs": s }),
                });
            }
        }
    }
    if let Via::Invariant { form: InvariantForm::DifferenceRatio { k: 1, l: 0 } } = &r.via {
        return Ok(Produced {
            generator: "difference_ratio_planes".into(),
            description: aghajani_fs(),
            details: serde_json::json!({ "reduction": summary }),
        });
    }
    let d = r.closed_fs(de.order(), depth)?;
    Ok(Produced { generator: "reduction_pullback".into(), description: d, details: serde_json::json!({ "reduction": summary }) })
}

fn curves(de: &DifferenceEquation, a: &FsArgs) -> anyhow::Result<(Produced, Option<Vec<(f64, f64, usize)>>)> {
    let fam = forbidden_curves(de, a.depth, a.budget)?;
    let rows = match &a.region {
        Some(r) if fam.order == 2 && de.map.is_numeric() => Some(fam.plane_samples(*r, a.samples)?),
        _ => None,
    };
    let p = Produced {
        generator: "forbidden_curves".into(),
        description: fam.description(),
        details: serde_json::json!({ "layers": fam.layers.len(), "truncated": fam.truncated }),
    };
    Ok((p, rows))
}

fn produce(de: &DifferenceEquation, def: &EquationDef, a: &FsArgs, method: Method) -> anyhow::Result<(Produced, Option<Vec<(f64, f64, usize)>>)> {
    let field = match a.field {
        Some(FieldArg::Real) => Field::Real,
        Some(FieldArg::Complex) => Field::Complex,
        None => de.field,
    };
    match method {
        Method::Auto => match closed(de, a.depth) {
            Ok(p) => Ok((p, None)),
            Err(_) => curves(de, a).or_else(|_| produce(de, def, a, Method::InverseOrbit)),
        },
        Method::Closed => closed(de, a.depth)
            .map(|p| (p, None))
            .map_err(|e| not_applicable("closed", &e.to_string(), de, def)),
        Method::Curves => curves(de, a),
        Method::InverseOrbit => {
            if !de.map.is_numeric() {
                return Err(not_applicable("inverse-orbit", "parameters must be bound", de, def));
            }
            let opts = InverseOrbitOptions { depth: a.depth, field, ..Default::default() };
            let tree = inverse_orbit(de, None, opts)?;
            Ok((
                Produced {
                    generator: "inverse_orbit".into(),
                    description: tree.description(),
                    details: serde_json::json!({ "nodes": tree.nodes.len(), "stats": tree.stats }),
                },
                None,
            ))
        }
        Method::Symbolic => {
            if !is_inverse_parabola(def) {
                return Err(not_applicable("symbolic", "only x' = 1/(x^2 - 1) has a word description", de, def));
            }
            let mode = if field == Field::Real { WordMode::RealFiltered } else { WordMode::Complex };
            let words = symbolic_words(a.depth, mode);
            let mut points: Vec<FsPoint> = [(1, 0), (-1, 0), (0, 1)]
                .iter()
                .map(|&(v, d)| FsPoint { point: vec![Scalar::int(v)], depth: Some(d) })
                .collect();
            points.extend(words.iter().map(|w| FsPoint {
                point: vec![if w.is_real() { Scalar::float(w.value.re) } else { Scalar::complex(w.value.re, w.value.im) }],
                depth: Some(w.depth()),
            }));
            let labels: Vec<String> = words.iter().map(|w| w.label()).collect();
            Ok((
                Produced {
                    generator: "symbolic_words".into(),
                    description: FsDescription::Points { points, limit: None, complete: false },
                    details: serde_json::json!({ "mode": mode, "words": labels }),
                },
                None,
            ))
        }
        Method::Cobweb => {
            let pm = PoleMap::from_equation(de).map_err(|e| not_applicable("cobweb", &e.to_string(), de, def))?;
            let m = MonotonePoleMap::new(pm);
            let c = cobweb_fs(&m, a.depth).map_err(|e| not_applicable("cobweb", &e.to_string(), de, def))?;
            let mut points = vec![FsPoint { point: vec![Scalar::zero()], depth: Some(0) }];
            points.extend(
                c.points.iter().enumerate().map(|(i, &x)| FsPoint { point: vec![Scalar::float(x)], depth: Some(i + 1) }),
            );
            Ok((
                Produced {
                    generator: "cobweb".into(),
                    description: FsDescription::Points { points, limit: None, complete: c.terminated },
                    details: serde_json::to_value(&c)?,
                },
                None,
            ))
        }
    }
}

/// Forward crash step of every listed point.
fn point_records(de: &DifferenceEquation, generator: &str, desc: &FsDescription, tol: f64) -> anyhow::Result<Vec<FsRecord>> {
    let FsDescription::Points { points, .. } = desc else {
        return Ok(Vec::new());
    };
    let fm = FastMap::new(&de.map)?;
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        let horizon = p.depth.unwrap_or(0) + 2;
        let step = if p.point.iter().all(Scalar::is_exact) {
            let opts = IterOptions { detect_period: false, ..Default::default() };
            iterate(de, &p.point, horizon, opts)?.crash_step()
        } else {
            let mut w: Vec<_> = p.point.iter().map(Scalar::to_c64).collect();
            fm.crash_step_c(&mut w, horizon, tol)
        };
        out.push(FsRecord {
            generator: generator.to_string(),
            depth: p.depth.unwrap_or(0),
            item: FsItem::Point(p.point.clone()),
            verified_crash_step: step,
        });
    }
    Ok(out)
}

pub fn compute(def: &EquationDef, a: &FsArgs) -> anyhow::Result<(FsArtifact, Option<Vec<(f64, f64, usize)>>)> {
    let de = def.to_equation()?;
    let (p, rows) = produce(&de, def, a, a.method)?;
    let numeric = DifferenceEquation::new(de.map.numeric()?, de.field, de.domain);
    let records = point_records(&numeric, &p.generator, &p.description, a.tol)?;
    let verification =
        verify_description(def, &p.description, a.verify_depth.min(a.depth.max(1)), a.verify_samples, a.seed, a.tol)?;
    let art = FsArtifact {
        equation: def.to_canonical_text()?,
        equation_hash: equation_hash(def)?,
        generator: p.generator,
        method: a.method,
        depth: a.depth,
        description: p.description,
        records,
        verification,
        details: p.details,
    };
    Ok((art, rows))
}

pub fn run(a: &FsArgs, argv: &[String]) -> anyhow::Result<()> {
    let loaded = a.input.load()?;
    let (art, rows) = compute(&loaded.def, a)?;
    let mut out = OutDir::create(&a.out)?;
    out.write_json("fs.json", &art)?;
    if let (Some(rows), Some(r)) = (rows, &a.region) {
        out.write("curves.csv", curve_csv(&rows).as_bytes())?;
        let region = *r;
        let gap = 4.0 * (r[1] - r[0]).max(r[3] - r[2]) / a.samples.max(1) as f64;
        out.write("curves.svg", svg_overlay(region, 600, &rows, gap, &[]).as_bytes())?;
    }
    let v = &art.verification;
    println!(
        "{}: {} ({} checked, {} failed, status {:?})",
        art.generator,
        summary_line(&art.description),
        v.checked,
        v.failures,
        v.status
    );
    out.finish("fs", argv, &(a, &a.input.set), vec![loaded.input])?;
    Ok(())
}

fn summary_line(d: &FsDescription) -> String {
    match d {
        FsDescription::Empty => "empty".into(),
        FsDescription::Everything => "every initial value".into(),
        FsDescription::Points { points, complete, .. } => {
            format!("{} points{}", points.len(), if *complete { " (complete)" } else { "" })
        }
        FsDescription::Hypersurfaces { layers } => format!("{} layers", layers.len()),
        FsDescription::ProductHypersurfaces { constants, .. } => format!("{} product surfaces", constants.len()),
        FsDescription::Raster(r) => format!("raster, {} crashed cells", r.crashed_cells),
        FsDescription::Union { parts } => format!("union of {} parts", parts.len()),
        FsDescription::Pullback { .. } => "pullback of a reduced forbidden set".into(),
    }
}
