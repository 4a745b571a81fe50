//! Inverse-orbit trees: breadth-first preimages of the pole variety.

use std::collections::{HashMap, HashSet};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fsdesc::{FsDescription, FsPoint};
use crate::map::{iterate, DifferenceEquation, IterOptions};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::rootfind::poly_roots;
use crate::scalar::{Field, Scalar};
use crate::upoly::UPoly;
use crate::{Error, Result, Q};

use super::fastmap::FastMap;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InverseOrbitOptions {
    pub depth: usize,
    /// Real keeps only real preimages.
    pub field: Field,
    pub max_nodes: usize,
    /// Float nodes closer than this (per component) are merged.
    pub dedup_tol: f64,
    /// Float nodes must reach a pole within this tolerance.
    pub verify_tol: f64,
}

impl Default for InverseOrbitOptions {
    fn default() -> Self {
        InverseOrbitOptions { depth: 10, field: Field::Real, max_nodes: 200_000, dedup_tol: 1e-9, verify_tol: 1e-6 }
    }
}

/// Rational sample values `n/d`, `|n| <= num_bound`, `1 <= d <= den_bound`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub num_bound: i64,
    pub den_bound: i64,
}

impl Default for SeedSpec {
    fn default() -> Self {
        SeedSpec { num_bound: 3, den_bound: 2 }
    }
}

impl SeedSpec {
    pub fn values(&self) -> Vec<Scalar> {
        let mut out: Vec<Scalar> = Vec::new();
        for d in 1..=self.den_bound.max(1) {
            for n in -self.num_bound..=self.num_bound {
                let v = Scalar::ratio(n, d);
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub point: Vec<Scalar>,
    pub depth: usize,
    pub parent: Option<usize>,
    /// Index of the preimage among the parent's preimages.
    pub branch: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TreeStats {
    pub no_preimage: usize,
    /// Windows whose preimage equation vanishes identically.
    pub degenerate: usize,
    pub indeterminate: usize,
    pub duplicates: usize,
    pub unverified: usize,
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InverseOrbitTree {
    pub nodes: Vec<TreeNode>,
    pub stats: TreeStats,
}

impl InverseOrbitTree {
    pub fn roots(&self) -> impl Iterator<Item = &TreeNode> {
        self.nodes.iter().filter(|n| n.parent.is_none())
    }

    pub fn at_depth(&self, d: usize) -> impl Iterator<Item = &TreeNode> {
        self.nodes.iter().filter(move |n| n.depth == d)
    }

    pub fn points(&self) -> Vec<FsPoint> {
        self.nodes.iter().map(|n| FsPoint { point: n.point.clone(), depth: Some(n.depth) }).collect()
    }

    pub fn description(&self) -> FsDescription {
        FsDescription::Points { points: self.points(), limit: None, complete: false }
    }
}

fn is_rational(v: &Scalar) -> bool {
    matches!(v, Scalar::Rational(_))
}

fn keep(z: Complex64, field: Field) -> Option<Scalar> {
    if !z.is_finite() {
        return None;
    }
    let real = z.im.abs() <= 1e-9 * (1.0 + z.norm());
    match (field, real) {
        (Field::Real, true) => Some(Scalar::float(z.re)),
        (Field::Real, false) => None,
        (Field::Complex, _) => Some(Scalar::complex(z.re, z.im)),
    }
}

/// Roots of a polynomial in one variable: exact rational roots when the
/// coefficients are rational, numeric roots for the rest.
fn solve_univariate(p: &Poly, var: usize, field: Field) -> Vec<Scalar> {
    let mut out = Vec::new();
    let numeric = |coeffs: Vec<Complex64>, out: &mut Vec<Scalar>| {
        for z in poly_roots(&coeffs) {
            if let Some(s) = keep(z, field) {
                out.push(s);
            }
        }
    };
    if let Some(mut u) = p.to_upoly(var) {
        for r in u.rational_roots() {
            let lin = UPoly::new(vec![-r.clone(), Q::from_integer(1.into())]);
            loop {
                let (q, rem) = u.divrem(&lin);
                if !rem.is_zero() {
                    break;
                }
                u = q;
            }
            out.push(Scalar::Rational(r));
        }
        if u.degree().unwrap_or(0) > 0 {
            let c: Vec<Complex64> = u.coeffs().iter().map(|q| Scalar::Rational(q.clone()).to_c64()).collect();
            numeric(c, &mut out);
        }
    } else {
        let c: Vec<Complex64> = p
            .coeffs_in(var)
            .iter()
            .map(|q| q.constant_value().map_or(Complex64::new(0.0, 0.0), |s| s.to_c64()))
            .collect();
        if c.iter().skip(1).any(|z| z.norm() > 0.0) {
            numeric(c, &mut out);
        }
    }
    out
}

enum Preimages {
    Points(Vec<Vec<Scalar>>, usize),
    Degenerate,
}

fn near_zero(v: &Scalar, scale: f64, tol: f64) -> bool {
    if v.is_exact() {
        v.is_zero()
    } else {
        v.abs_f64() <= tol * scale.max(1.0)
    }
}

/// Windows mapped to `w` by the unfolding.
fn preimages(f: &RatFunc, w: &[Scalar], field: Field) -> Preimages {
    let k = w.len();
    let mut num = f.num().clone();
    let mut den = f.den().clone();
    for v in 1..k {
        num = num.specialize(v, &w[v - 1]);
        den = den.specialize(v, &w[v - 1]);
    }
    let eq = num.sub(&den.scale(&w[k - 1]));
    if eq.is_zero() {
        return Preimages::Degenerate;
    }
    let mut out = Vec::new();
    let mut indeterminate = 0;
    for x in solve_univariate(&eq, 0, field) {
        let mut point = vec![x];
        point.extend_from_slice(&w[..k - 1]);
        let (d, ds) = f.den().eval_scaled(&point);
        if near_zero(&d, ds, 1e-12) {
            indeterminate += 1;
            continue;
        }
        out.push(point);
    }
    Preimages::Points(out, indeterminate)
}

/// Sample points of the pole variety `den = 0`: every root in one
/// variable with the others drawn from `spec`.
pub fn pole_seeds(de: &DifferenceEquation, field: Field, spec: SeedSpec) -> Result<Vec<Vec<Scalar>>> {
    let map = de.map.numeric()?;
    let den = map.func().den().clone();
    let k = map.order();
    let values = spec.values();
    let mut seeds: Vec<Vec<Scalar>> = Vec::new();
    let mut seen: HashSet<Vec<Scalar>> = HashSet::new();
    for var in (0..k).rev().filter(|&v| den.uses(v)) {
        let others: Vec<usize> = (0..k).filter(|&v| v != var).collect();
        let combos = values.len().pow(others.len() as u32);
        if combos > 100_000 {
            return Err(Error::Invalid("seed sample is too large for this order".into()));
        }
        for idx in 0..combos {
            let mut p = den.clone();
            let mut point = vec![Scalar::zero(); k];
            let mut rest = idx;
            for &v in &others {
                let x = values[rest % values.len()].clone();
                rest /= values.len();
                p = p.specialize(v, &x);
                point[v] = x;
            }
            if p.is_zero() || !p.uses(var) {
                continue;
            }
            for r in solve_univariate(&p, var, field) {
                point[var] = r;
                if seen.insert(point.clone()) {
                    seeds.push(point.clone());
                }
            }
        }
    }
    Ok(seeds)
}

type Key = Vec<i64>;

fn float_key(p: &[Scalar], cell: f64) -> Key {
    p.iter()
        .flat_map(|s| {
            let z = s.to_c64();
            [(z.re / cell).round() as i64, (z.im / cell).round() as i64]
        })
        .collect()
}

fn neighbours(key: &Key) -> Vec<Key> {
    let mut out = vec![key.clone()];
    for i in 0..key.len() {
        let mut next = Vec::with_capacity(out.len() * 3);
        for k in &out {
            for d in [-1, 1] {
                let mut n = k.clone();
                n[i] = n[i].saturating_add(d);
                next.push(n);
            }
        }
        out.extend(next);
    }
    out
}

struct Dedup {
    exact: HashSet<Vec<Scalar>>,
    float: HashMap<Key, Vec<Vec<Complex64>>>,
    tol: f64,
}

impl Dedup {
    fn new(tol: f64) -> Self {
        Dedup { exact: HashSet::new(), float: HashMap::new(), tol }
    }

    /// Records `p`; false when already present.
    fn insert(&mut self, p: &[Scalar]) -> bool {
        if p.iter().all(is_rational) {
            return self.exact.insert(p.to_vec());
        }
        let z: Vec<Complex64> = p.iter().map(Scalar::to_c64).collect();
        let key = float_key(p, self.tol);
        for n in neighbours(&key) {
            if let Some(list) = self.float.get(&n) {
                if list.iter().any(|q| q.iter().zip(&z).all(|(a, b)| (a - b).norm() <= self.tol)) {
                    return false;
                }
            }
        }
        self.float.entry(key).or_default().push(z);
        true
    }
}

/// Whether a node crashes within `depth` steps: exactly at `depth` for
/// rational nodes, within `tol` for float ones.
fn verify(de: &DifferenceEquation, fm: &FastMap, p: &[Scalar], depth: usize, tol: f64) -> Result<bool> {
    if p.iter().all(is_rational) {
        let opts = IterOptions { detect_period: false, ..Default::default() };
        return Ok(iterate(de, p, depth + 1, opts)?.crash_step() == Some(depth));
    }
    let mut w: Vec<Complex64> = p.iter().map(Scalar::to_c64).collect();
    Ok(fm.crash_step_c(&mut w, depth + 1, tol).is_some())
}

/// Preimage tree of `seeds` (pole variety samples when `None`) to
/// `opts.depth`. Every node is verified by forward iteration; failures are
/// dropped and counted.
pub fn inverse_orbit(
    de: &DifferenceEquation,
    seeds: Option<Vec<Vec<Scalar>>>,
    opts: InverseOrbitOptions,
) -> Result<InverseOrbitTree> {
    let map = de.map.numeric()?;
    let k = map.order();
    let de = DifferenceEquation::new(map.clone(), opts.field, de.domain);
    let fm = FastMap::new(&map)?;
    let seeds = match seeds {
        Some(s) => s,
        None => pole_seeds(&de, opts.field, SeedSpec::default())?,
    };
    let mut stats = TreeStats::default();
    let mut nodes: Vec<TreeNode> = Vec::new();
    let mut dedup = Dedup::new(opts.dedup_tol);
    for s in seeds {
        if s.len() != k {
            return Err(Error::ArityMismatch { expected: k, got: s.len() });
        }
        if !dedup.insert(&s) {
            stats.duplicates += 1;
            continue;
        }
        if !verify(&de, &fm, &s, 0, opts.verify_tol)? {
            stats.unverified += 1;
            continue;
        }
        nodes.push(TreeNode { point: s, depth: 0, parent: None, branch: 0 });
    }
    let f = map.func().clone();
    let mut frontier: Vec<usize> = (0..nodes.len()).collect();
    for depth in 1..=opts.depth {
        if frontier.is_empty() {
            break;
        }
        let expanded: Vec<Result<(Preimages, Vec<bool>)>> = frontier
            .par_iter()
            .map(|&i| {
                let pre = preimages(&f, &nodes[i].point, opts.field);
                let ok = match &pre {
                    Preimages::Points(pts, _) => pts
                        .iter()
                        .map(|p| verify(&de, &fm, p, depth, opts.verify_tol))
                        .collect::<Result<Vec<bool>>>()?,
                    Preimages::Degenerate => Vec::new(),
                };
                Ok((pre, ok))
            })
            .collect();
        let mut next = Vec::new();
        for (&parent, item) in frontier.iter().zip(expanded) {
            let (pre, ok) = item?;
            let pts = match pre {
                Preimages::Degenerate => {
                    stats.degenerate += 1;
                    continue;
                }
                Preimages::Points(pts, indet) => {
                    stats.indeterminate += indet;
                    pts
                }
            };
            if pts.is_empty() {
                stats.no_preimage += 1;
            }
            for (branch, (p, good)) in pts.into_iter().zip(ok).enumerate() {
                if !dedup.insert(&p) {
                    stats.duplicates += 1;
                    continue;
                }
                if !good {
                    stats.unverified += 1;
                    continue;
                }
                if nodes.len() >= opts.max_nodes {
                    stats.truncated = true;
                    return Ok(InverseOrbitTree { nodes, stats });
                }
                next.push(nodes.len());
                nodes.push(TreeNode { point: p, depth, parent: Some(parent), branch });
            }
        }
        frontier = next;
    }
    Ok(InverseOrbitTree { nodes, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::definition::EquationDef;

    fn rubio() -> DifferenceEquation {
        EquationDef::new(1, "-(x0 - 1)*(x0 - 2)", "x0").to_equation().unwrap()
    }

    #[test]
    fn real_tree_of_the_closed_example() {
        let opts = InverseOrbitOptions { depth: 6, ..Default::default() };
        let tree = inverse_orbit(&rubio(), None, opts).unwrap();
        let mut pts: Vec<Scalar> = tree.nodes.iter().map(|n| n.point[0].clone()).collect();
        pts.sort_by(|a, b| a.abs_f64().total_cmp(&b.abs_f64()));
        assert_eq!(pts, vec![Scalar::zero(), Scalar::one(), Scalar::int(2)]);
    }

    #[test]
    fn complex_tree_grows() {
        let opts = InverseOrbitOptions { depth: 6, field: Field::Complex, ..Default::default() };
        let tree = inverse_orbit(&rubio(), None, opts).unwrap();
        assert_eq!(tree.stats.unverified, 0);
        assert!(tree.nodes.len() > 60, "{}", tree.nodes.len());
    }

    #[test]
    fn second_order_preimage() {
        // x_{n+1} = -1 + x_{n-1}/x_n
        let de = EquationDef::new(2, "-x0 + x1", "x0").to_equation().unwrap();
        let seed = vec![Scalar::int(2), Scalar::zero()];
        let tree = inverse_orbit(&de, Some(vec![seed]), InverseOrbitOptions { depth: 3, ..Default::default() }).unwrap();
        let child = tree.at_depth(1).next().unwrap();
        assert_eq!(child.point, vec![Scalar::int(2), Scalar::int(2)]);
        assert_eq!(tree.nodes.len(), 4);
    }
}
