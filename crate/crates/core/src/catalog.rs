//! File-backed store of equations with their reductions and forbidden-set
//! results.
//!
//! Layout under the root directory:
//!
//! ```text
//! index.json              id -> current path, content hash, version, equation hash
//! index.lock              present while a writer holds the store
//! records/<id>/v<N>.json  one file per version, never rewritten
//! ```
//!
//! Equations are deduplicated by their canonical form: the reduced map
//! written in default window names with symbolic parameters renamed
//! `p0, p1, ..` in the order that gives the smallest text.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::definition::{domain_str, field_str, EquationDef};
use crate::fsdesc::FsDescription;
use crate::enumeration::fastmap::FastMap;
use crate::map::{default_names, iterate, DifferenceEquation, IterOptions};
use crate::reductions::{reduce, FamilyCatalog};
use crate::reductions::ReductionSummary;
use crate::riccati::{riccati_k_coeffs, RiccatiParams1};
use crate::scalar::{Field, Scalar};
use crate::{Error, RatFunc, Result};

/// Environment variable naming the default catalog root.
pub const CATALOG_ENV: &str = "FSETS_CATALOG";

/// Bundled definitions of the worked equations.
pub const SEED_EQUATIONS: &str = include_str!("../data/seed_equations.txt");

/// Permutations of more symbolic parameters than this are not searched.
const MAX_PERMUTED_PARAMS: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerificationStatus {
    ExactVerified,
    FloatVerified { tol: f64 },
    Unverified,
}

impl VerificationStatus {
    pub fn kind(&self) -> StatusKind {
        match self {
            VerificationStatus::ExactVerified => StatusKind::Exact,
            VerificationStatus::FloatVerified { .. } => StatusKind::Float,
            VerificationStatus::Unverified => StatusKind::Unverified,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatusKind {
    Exact,
    Float,
    Unverified,
}

impl std::str::FromStr for StatusKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "exact-verified" => Ok(StatusKind::Exact),
            "float" | "float-verified" => Ok(StatusKind::Float),
            "unverified" => Ok(StatusKind::Unverified),
            _ => Err(Error::Invalid(format!("unknown verification status {s:?}"))),
        }
    }
}

/// Outcome of checking a result against the equation it claims to describe.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub equation_hash: String,
    pub status: VerificationStatus,
    /// Depth (or horizon) the check ran to.
    pub depth: usize,
    pub checked: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FsResult {
    pub generator: String,
    pub depth: usize,
    pub status: VerificationStatus,
    pub checked: usize,
    pub failures: usize,
    pub description: FsDescription,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub kind: String,
    pub target: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquationRecord {
    pub id: String,
    pub version: u32,
    pub equation_hash: String,
    /// Canonical definition text.
    pub definition: String,
    pub name: Option<String>,
    pub family: String,
    pub field: Field,
    pub order: usize,
    pub params: Vec<(String, Option<Scalar>)>,
    pub reductions: Vec<ReductionSummary>,
    pub has_closed_form: bool,
    pub results: Vec<FsResult>,
    pub literature: Vec<String>,
    pub relations: Vec<Relation>,
    /// Remaining free-text keys of the definition (asymptotics, bounds, ..).
    pub metadata: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub path: String,
    pub sha256: String,
    pub version: u32,
    pub equation_hash: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Filter {
    pub family: Option<String>,
    pub field: Option<Field>,
    pub has_closed_form: Option<bool>,
    /// Keeps records with at least one result of this status.
    pub status: Option<StatusKind>,
}

impl Filter {
    pub fn matches(&self, r: &EquationRecord) -> bool {
        self.family.as_ref().map_or(true, |f| &r.family == f)
            && self.field.map_or(true, |f| r.field == f)
            && self.has_closed_form.map_or(true, |c| r.has_closed_form == c)
            && self.status.map_or(true, |s| r.results.iter().any(|x| x.status.kind() == s))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ingested {
    pub record: EquationRecord,
    /// False when an equal equation was already stored.
    pub created: bool,
}

/// Canonical text of the equation a definition describes.
pub fn canonical_form(def: &EquationDef) -> Result<String> {
    let f = def.ratfunc()?;
    let k = def.order;
    let nv = f.nvars();
    let used: Vec<usize> = (k..nv).filter(|&v| f.uses(v)).collect();
    let mut names = default_names(k);
    names.extend((0..used.len()).map(|i| format!("p{i}")));
    let mut best: Option<String> = None;
    let mut perm: Vec<usize> = (0..used.len()).collect();
    loop {
        let mut mapping: Vec<usize> = (0..nv).map(|v| v.min(k)).collect();
        for (slot, &v) in used.iter().enumerate() {
            mapping[v] = k + perm[slot];
        }
        let nk = k + used.len();
        let g = RatFunc::new(f.num().remap(nk, &mapping), f.den().remap(nk, &mapping))?;
        let s = format!("({}) / ({})", g.num().display_with(&names), g.den().display_with(&names));
        if best.as_ref().map_or(true, |b| s < *b) {
            best = Some(s);
        }
        if used.len() > MAX_PERMUTED_PARAMS || !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(format!(
        "field: {}\norder: {k}\ndomain: {}\nmap: {}\n",
        field_str(def.field),
        domain_str(def.domain),
        best.unwrap()
    ))
}

pub fn equation_hash(def: &EquationDef) -> Result<String> {
    Ok(sha256_hex(canonical_form(def)?.as_bytes()))
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let Some(i) = (0..p.len() - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..p.len()).rev().find(|&j| p[j] > p[i]).unwrap();
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Forward-iterates sample points of `desc` (up to `per_part` per layer or
/// surface, crash depth at most `depth`). A point passes when it fails no
/// later than its stated depth, or within `depth + 1` steps when no depth
/// is stated. Exact points run in exact arithmetic, the others in floats
/// with tolerance `tol`.
pub fn verify_description(
    def: &EquationDef,
    desc: &FsDescription,
    depth: usize,
    per_part: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let de = def.to_equation()?;
    let map = de.map.numeric()?;
    let de = DifferenceEquation::new(map.clone(), de.field, de.domain);
    let fm = FastMap::new(&map)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = desc.sample(per_part, depth, &mut rng)?;
    let (mut checked, mut failures, mut all_exact) = (0, 0, true);
    for p in &points {
        if p.point.len() != map.order() {
            return Err(Error::ArityMismatch { expected: map.order(), got: p.point.len() });
        }
        let bound = p.depth.unwrap_or(depth + 1);
        let step = if p.point.iter().all(Scalar::is_exact) {
            let opts = IterOptions { detect_period: false, ..Default::default() };
            iterate(&de, &p.point, bound + 1, opts)?.crash_step()
        } else {
            all_exact = false;
            let mut w: Vec<_> = p.point.iter().map(Scalar::to_c64).collect();
            fm.crash_step_c(&mut w, bound + 1, tol)
        };
        checked += 1;
        if step.is_none_or(|s| s > bound) {
            failures += 1;
        }
    }
    let status = if failures > 0 || checked == 0 {
        VerificationStatus::Unverified
    } else if all_exact {
        VerificationStatus::ExactVerified
    } else {
        VerificationStatus::FloatVerified { tol }
    };
    Ok(VerificationReport { equation_hash: equation_hash(def)?, status, depth, checked, failures })
}

/// Fresh record (id and version unset) from a definition.
pub fn describe(def: &EquationDef) -> Result<EquationRecord> {
    let hash = equation_hash(def)?;
    let de = def.to_equation()?;
    let riccati = RiccatiParams1::from_map(&de.map);
    let riccati_k = riccati_k_coeffs(&de.map);
    let reduction = if de.map.is_numeric() { reduce(&de) } else { None };
    let family = def
        .family
        .clone()
        .or_else(|| riccati.as_ref().map(|_| "riccati1".to_string()))
        .or_else(|| riccati_k.as_ref().map(|_| "riccati_k".to_string()))
        .or_else(|| {
            let r = reduction.as_ref()?;
            Some(FamilyCatalog::builtin().get(&r.family).map_or(r.family.clone(), |f| f.tag.clone()))
        })
        .unwrap_or_else(|| "unclassified".into());
    let mut metadata = def.extra.clone();
    let literature = metadata
        .remove("literature")
        .map(|l| l.split(';').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
        .unwrap_or_default();
    let has_closed_form = riccati.is_some() || riccati_k.is_some() || reduction.is_some();
    Ok(EquationRecord {
        id: String::new(),
        version: 0,
        equation_hash: hash,
        definition: def.to_canonical_text()?,
        name: def.name.clone(),
        family,
        field: def.field,
        order: def.order,
        params: def.params.clone(),
        reductions: reduction.iter().map(|r| r.summary()).collect(),
        has_closed_form,
        results: Vec::new(),
        literature,
        relations: Vec::new(),
        metadata,
    })
}

pub struct Catalog {
    root: PathBuf,
}

/// Exclusive writer lock, released on drop.
struct WriteLock {
    path: PathBuf,
}

impl WriteLock {
    fn acquire(root: &Path) -> Result<Self> {
        let path = root.join("index.lock");
        for _ in 0..400 {
            match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
                Ok(mut f) => {
                    let _ = writeln!(f, "{}", std::process::id());
                    return Ok(WriteLock { path });
                }
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                    std::thread::sleep(Duration::from_millis(25))
                }
                Err(e) => return Err(e.into()),
            }
        }
        Err(Error::Catalog(format!("could not acquire {}", path.display())))
    }
}

impl Drop for WriteLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

impl Catalog {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(root.join("records"))?;
        Ok(Catalog { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn index(&self) -> Result<BTreeMap<String, IndexEntry>> {
        let p = self.root.join("index.json");
        if !p.exists() {
            return Ok(BTreeMap::new());
        }
        Ok(serde_json::from_slice(&fs::read(p)?)?)
    }

    fn write_index(&self, idx: &BTreeMap<String, IndexEntry>) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(idx)?;
        bytes.push(b'\n');
        write_atomic(&self.root.join("index.json"), &bytes)
    }

    fn rel_path(id: &str, version: u32) -> String {
        format!("records/{id}/v{version}.json")
    }

    /// Current version of a record, checked against the indexed hash.
    pub fn get(&self, id: &str) -> Result<EquationRecord> {
        let idx = self.index()?;
        let e = idx.get(id).ok_or_else(|| Error::Catalog(format!("no record {id}")))?;
        let bytes = fs::read(self.root.join(&e.path))?;
        let h = sha256_hex(&bytes);
        if h != e.sha256 {
            return Err(Error::Catalog(format!("{} does not match its indexed hash", e.path)));
        }
        Ok(serde_json::from_slice(&bytes)?)
    }

    /// A past version of a record.
    pub fn get_version(&self, id: &str, version: u32) -> Result<EquationRecord> {
        let p = self.root.join(Catalog::rel_path(id, version));
        if !p.exists() {
            return Err(Error::Catalog(format!("no version {version} of {id}")));
        }
        Ok(serde_json::from_slice(&fs::read(p)?)?)
    }

    /// Writes `rec` as the next version and updates the index. Caller holds
    /// the lock.
    fn store(&self, idx: &mut BTreeMap<String, IndexEntry>, mut rec: EquationRecord) -> Result<EquationRecord> {
        rec.version = idx.get(&rec.id).map_or(1, |e| e.version + 1);
        let rel = Catalog::rel_path(&rec.id, rec.version);
        let path = self.root.join(&rel);
        fs::create_dir_all(path.parent().unwrap())?;
        if path.exists() {
            return Err(Error::Catalog(format!("{rel} already exists")));
        }
        let mut bytes = serde_json::to_vec_pretty(&rec)?;
        bytes.push(b'\n');
        write_atomic(&path, &bytes)?;
        idx.insert(
            rec.id.clone(),
            IndexEntry { path: rel, sha256: sha256_hex(&bytes), version: rec.version, equation_hash: rec.equation_hash.clone() },
        );
        self.write_index(idx)?;
        Ok(rec)
    }

    /// Stores one definition, or returns the record of an equal equation.
    pub fn ingest_def(&self, def: &EquationDef) -> Result<Ingested> {
        let mut rec = describe(def)?;
        let _lock = WriteLock::acquire(&self.root)?;
        let mut idx = self.index()?;
        if let Some((id, _)) = idx.iter().find(|(_, e)| e.equation_hash == rec.equation_hash) {
            let id = id.clone();
            return Ok(Ingested { record: self.get(&id)?, created: false });
        }
        let next = idx.keys().filter_map(|k| k.strip_prefix("eq-")?.parse::<u32>().ok()).max().unwrap_or(0) + 1;
        rec.id = format!("eq-{next:04}");
        let record = self.store(&mut idx, rec)?;
        Ok(Ingested { record, created: true })
    }

    /// Ingests every definition of a text, in order.
    pub fn ingest(&self, text: &str) -> Result<Vec<Ingested>> {
        EquationDef::parse_many(text)?.iter().map(|d| self.ingest_def(d)).collect()
    }

    /// Appends a result as a new record version.
    pub fn attach_result(
        &self,
        id: &str,
        generator: &str,
        description: FsDescription,
        report: &VerificationReport,
    ) -> Result<EquationRecord> {
        let _lock = WriteLock::acquire(&self.root)?;
        let mut idx = self.index()?;
        let mut rec = self.get(id)?;
        if report.equation_hash != rec.equation_hash {
            return Err(Error::StaleResult { expected: rec.equation_hash, found: report.equation_hash.clone() });
        }
        rec.results.push(FsResult {
            generator: generator.to_string(),
            depth: report.depth,
            status: report.status.clone(),
            checked: report.checked,
            failures: report.failures,
            description,
        });
        self.store(&mut idx, rec)
    }

    /// Records a relation edge in both records, e.g. a Möbius conjugacy.
    pub fn link(&self, a: &str, b: &str, kind: &str) -> Result<()> {
        let _lock = WriteLock::acquire(&self.root)?;
        let mut idx = self.index()?;
        for (from, to) in [(a, b), (b, a)] {
            let mut rec = self.get(from)?;
            let rel = Relation { kind: kind.to_string(), target: to.to_string() };
            if !rec.relations.contains(&rel) {
                rec.relations.push(rel);
                self.store(&mut idx, rec)?;
            }
        }
        Ok(())
    }

    /// Current records passing the filter, ordered by id.
    pub fn query(&self, filter: &Filter) -> Result<Vec<EquationRecord>> {
        let mut out = Vec::new();
        for id in self.index()?.keys() {
            let r = self.get(id)?;
            if filter.matches(&r) {
                out.push(r);
            }
        }
        Ok(out)
    }

    /// Definitions of all records, in id order, as one multi-definition text.
    pub fn export(&self) -> Result<String> {
        let recs = self.query(&Filter::default())?;
        Ok(recs.iter().map(|r| r.definition.as_str()).collect::<Vec<_>>().join("---\n"))
    }
}
