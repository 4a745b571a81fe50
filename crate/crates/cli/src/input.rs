//! Equation files and parameter overrides.

use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use fsets::parse::parse_constant;
use fsets::EquationDef;

use crate::manifest::{sha256_file, FileHash};

#[derive(Args, Debug, Clone)]
pub struct EquationInput {
    /// Equation definition file.
    pub equation: PathBuf,
    /// Parameter binding `name=value`, e.g. `--set a=-2`; repeatable.
    #[arg(long = "set", value_name = "NAME=VALUE")]
    pub set: Vec<String>,
}

pub struct Loaded {
    pub def: EquationDef,
    pub input: FileHash,
}

impl EquationInput {
    pub fn load(&self) -> anyhow::Result<Loaded> {
        let text = std::fs::read_to_string(&self.equation)
            .with_context(|| format!("reading {}", self.equation.display()))?;
        let mut def = EquationDef::parse(&text)?;
        for s in &self.set {
            bind(&mut def, s)?;
        }
        // surfaces unbound names and a zero denominator early
        def.ratfunc()?;
        Ok(Loaded { def, input: FileHash { path: self.equation.display().to_string(), sha256: sha256_file(&self.equation)? } })
    }
}

fn bind(def: &mut EquationDef, s: &str) -> anyhow::Result<()> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| fsets::Error::Invalid(format!("--set expects NAME=VALUE, got {s:?}")))?;
    let (name, value) = (name.trim(), parse_constant(value.trim())?);
    match def.params.iter_mut().find(|(n, _)| n == name) {
        Some(slot) => slot.1 = Some(value),
        None => return Err(fsets::Error::Invalid(format!("no parameter named {name:?}")).into()),
    }
    Ok(())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_slice(&bytes)?)
}

/// `xmin,xmax,ymin,ymax` with `xmin < xmax`, `ymin < ymax`.
pub fn parse_region(s: &str) -> Result<[f64; 4], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [a, b, c, d] if a < b && c < d && v.iter().all(|x| x.is_finite()) => Ok([a, b, c, d]),
        _ => Err(format!("expected xmin,xmax,ymin,ymax with min < max, got {s:?}")),
    }
}

/// Comma-separated list of numbers.
pub fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"))).collect()
}
