//! Run manifests: what was run, on which inputs, producing which files.

use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Parser;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{run, Cli, CliError};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileHash {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name, without `--out`.
    pub args: Vec<String>,
    /// Directory the arguments were resolved against.
    pub cwd: String,
    pub params: serde_json::Value,
    pub inputs: Vec<FileHash>,
    pub tool_version: String,
    /// Paths relative to the output directory.
    pub outputs: Vec<FileHash>,
}

pub fn sha256_bytes(b: &[u8]) -> String {
    hex::encode(Sha256::digest(b))
}

pub fn sha256_file(p: &Path) -> anyhow::Result<String> {
    Ok(sha256_bytes(&std::fs::read(p).with_context(|| format!("reading {}", p.display()))?))
}

/// Output directory that remembers what was written to it.
pub struct OutDir {
    pub dir: PathBuf,
    written: Vec<FileHash>,
}

impl OutDir {
    pub fn create(dir: &Path) -> anyhow::Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(OutDir { dir: dir.to_path_buf(), written: Vec::new() })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> anyhow::Result<PathBuf> {
        let p = self.dir.join(name);
        std::fs::write(&p, bytes).with_context(|| format!("writing {}", p.display()))?;
        self.written.push(FileHash { path: name.to_string(), sha256: sha256_bytes(bytes) });
        Ok(p)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, v: &T) -> anyhow::Result<PathBuf> {
        let mut bytes = serde_json::to_vec_pretty(v)?;
        bytes.push(b'\n');
        self.write(name, &bytes)
    }

    /// Writes the manifest last; it is not listed among its own outputs.
    pub fn finish<P: Serialize>(self, command: &str, argv: &[String], params: &P, inputs: Vec<FileHash>) -> anyhow::Result<RunManifest> {
        let m = RunManifest {
            command: command.to_string(),
            args: strip_out(argv),
            cwd: std::env::current_dir()?.display().to_string(),
            params: serde_json::to_value(params)?,
            inputs,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: self.written,
        };
        let mut bytes = serde_json::to_vec_pretty(&m)?;
        bytes.push(b'\n');
        std::fs::write(self.dir.join(MANIFEST_FILE), bytes)?;
        Ok(m)
    }
}

fn strip_out(argv: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in argv {
        if skip {
            skip = false;
        } else if a == "--out" {
            skip = true;
        } else if !a.starts_with("--out=") {
            out.push(a.clone());
        }
    }
    out
}

#[derive(Serialize)]
struct ReplayReport {
    manifest: String,
    out: String,
    identical: bool,
    mismatches: Vec<String>,
}

/// Reruns `manifest` into `out` and compares every recorded output hash.
pub fn replay(manifest: &Path, out: Option<&Path>) -> anyhow::Result<()> {
    let m: RunManifest = crate::input::read_json(manifest)?;
    let out = match out {
        Some(o) => o.to_path_buf(),
        None => manifest.parent().unwrap_or(Path::new(".")).join("replay"),
    };
    std::fs::create_dir_all(&out)?;
    let out = out.canonicalize()?;
    let here = std::env::current_dir()?;
    std::env::set_current_dir(&m.cwd).with_context(|| format!("entering {}", m.cwd))?;
    let result = rerun(&m, &out);
    std::env::set_current_dir(here)?;
    result?;
    let mut mismatches = Vec::new();
    for o in &m.outputs {
        match sha256_file(&out.join(&o.path)) {
            Ok(h) if h == o.sha256 => {}
            Ok(_) => mismatches.push(o.path.clone()),
            Err(_) => mismatches.push(format!("{} (missing)", o.path)),
        }
    }
    let report = ReplayReport {
        manifest: manifest.display().to_string(),
        out: out.display().to_string(),
        identical: mismatches.is_empty(),
        mismatches: mismatches.clone(),
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    if !mismatches.is_empty() {
        return Err(CliError::Mismatch(mismatches.join(", ")).into());
    }
    Ok(())
}

fn rerun(m: &RunManifest, out: &Path) -> anyhow::Result<()> {
    for i in &m.inputs {
        let h = sha256_file(Path::new(&i.path))?;
        if h != i.sha256 {
            return Err(fsets::Error::StaleResult { expected: i.sha256.clone(), found: h }.into());
        }
    }
    let mut argv = vec!["fsets".to_string()];
    argv.extend(m.args.iter().cloned());
    argv.push("--out".into());
    argv.push(out.display().to_string());
    let cli = Cli::try_parse_from(&argv)?;
    run(cli, &argv[1..])
}
