//! `fsets classify`.

use std::path::PathBuf;

use clap::Args;
use fsets::catalog::{canonical_form, describe, equation_hash};
use fsets::reductions::{reduce, InvariantForm, ReductionSummary, Via};
use fsets::riccati::{
    classify_riccati1, riccati_fs_topology, riccati_k_coeffs, riccati_number, FsTopology, RiccatiClass,
    RiccatiParams1, DEFAULT_UNITY_BOUND,
};
use fsets::Scalar;
use serde::Serialize;

use crate::input::EquationInput;
use crate::manifest::OutDir;

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub input: EquationInput,
    /// Also write `classify.json` and a manifest here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
pub struct RiccatiInfo {
    pub params: RiccatiParams1,
    pub class: RiccatiClass,
    pub r: Option<Scalar>,
    pub topology: Option<FsTopology>,
}

#[derive(Serialize)]
pub struct ClassifyReport {
    pub name: Option<String>,
    pub canonical: String,
    pub equation_hash: String,
    pub order: usize,
    pub family: String,
    pub degenerate: Vec<String>,
    pub riccati: Option<RiccatiInfo>,
    pub riccati_k: Option<Vec<Scalar>>,
    pub reduction: Option<ReductionSummary>,
    pub summary: String,
}

fn topology_name(t: &FsTopology) -> String {
    match t {
        FsTopology::FiniteGloballyPeriodic { period } => format!("FiniteGloballyPeriodic({period})"),
        FsTopology::ConvergentSequence { .. } => "ConvergentSequence".into(),
        FsTopology::DenseCandidate => "DenseCandidate".into(),
        FsTopology::Unresolved { bound } => format!("Unresolved(bound {bound})"),
    }
}

fn class_name(c: RiccatiClass) -> &'static str {
    match c {
        RiccatiClass::Linear => "Linear",
        RiccatiClass::Constant => "Constant",
        RiccatiClass::Period2 => "Period2",
        RiccatiClass::Proper => "Proper",
    }
}

pub fn report(def: &fsets::EquationDef) -> anyhow::Result<ClassifyReport> {
    let de = def.to_equation()?;
    let record = describe(def)?;
    let f = de.map.func();
    let constant = (0..de.order()).all(|v| !f.uses(v));
    let mut degenerate = Vec::new();
    if constant {
        degenerate.push("constant".to_string());
    }
    let mut summary = None;
    let riccati = match RiccatiParams1::from_map(&de.map) {
        Some(p) => {
            let class = classify_riccati1(&p)?;
            if p.d.is_zero() {
                degenerate.push("linear".into());
            }
            if (&(&p.a * &p.d) - &(&p.c * &p.b)).is_zero() && !constant {
                degenerate.push("constant".into());
            }
            if (&p.b + &p.c).is_zero() {
                degenerate.push("period2".into());
            }
            let (r, topology) = if class == RiccatiClass::Proper {
                let r = riccati_number(&p)?;
                let t = riccati_fs_topology(&r, DEFAULT_UNITY_BOUND);
                summary = Some(format!("Proper, R={r}, topology: {}", topology_name(&t)));
                (Some(r), Some(t))
            } else {
                (None, None)
            };
            if summary.is_none() && !constant {
                summary = Some(class_name(class).to_string());
            }
            Some(RiccatiInfo { params: p, class, r, topology })
        }
        None => None,
    };
    if constant {
        summary = Some("Constant".into());
    }
    let riccati_k = riccati_k_coeffs(&de.map);
    if summary.is_none() {
        if let Some(c) = &riccati_k {
            summary = Some(format!("Riccati of order {}, linearised by x_n = y_n/y_(n-1)", c.len() - 1));
        }
    }
    let reduction = if de.map.is_numeric() { reduce(&de) } else { None };
    if summary.is_none() {
        if let Some(r) = &reduction {
            summary = Some(match &r.via {
                Via::Change { change, reduced, .. } => {
                    let kind = match reduced {
                        fsets::reductions::ReducedEquation::Riccati(_) => "Riccati",
                        fsets::reductions::ReducedEquation::Linear { .. } => "linear",
                        fsets::reductions::ReducedEquation::Map(_) => "map",
                    };
                    format!("reduces via {change} to {kind} {reduced}")
                }
                Via::Invariant { form } => match form {
                    InvariantForm::MobiusProduct { lag, .. } => {
                        format!("invariant T1(x_n) T2(x_(n-{lag})) = C, Riccati for each C")
                    }
                    InvariantForm::DifferenceRatio { k, l } => {
                        format!("invariant (x_(n+1) - x_(n-{k}))/(x_(n+1) - x_(n-{l})) = C, linear for each C")
                    }
                },
            });
        }
    }
    Ok(ClassifyReport {
        name: def.name.clone(),
        canonical: canonical_form(def)?,
        equation_hash: equation_hash(def)?,
        order: def.order,
        family: record.family,
        degenerate,
        riccati,
        riccati_k,
        reduction: reduction.map(|r| r.summary()),
        summary: summary.unwrap_or_else(|| "NoMatch".into()),
    })
}

pub fn run(a: &ClassifyArgs, argv: &[String]) -> anyhow::Result<()> {
    let loaded = a.input.load()?;
    let rep = report(&loaded.def)?;
    println!("{}", rep.summary);
    if let Some(out) = &a.out {
        let mut dir = OutDir::create(out)?;
        dir.write_json("classify.json", &rep)?;
        dir.finish("classify", argv, &serde_json::json!({ "set": a.input.set }), vec![loaded.input])?;
    } else {
        println!("{}", serde_json::to_string_pretty(&rep)?);
    }
    Ok(())
}
