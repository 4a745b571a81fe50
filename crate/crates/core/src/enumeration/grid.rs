//! Raster classification of initial windows by forward float iteration.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::fsdesc::RasterSummary;
use crate::map::DifferenceEquation;
use crate::{Error, Result};

use super::fastmap::{FastMap, FloatStep};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// `[xmin, xmax, ymin, ymax]`.
    pub region: [f64; 4],
    pub res: usize,
    pub horizon: usize,
    pub tol: f64,
    /// Window coordinates (oldest first) on the horizontal and vertical
    /// axes.
    pub axes: [usize; 2],
    /// Values of the other window coordinates.
    pub base: Vec<f64>,
}

impl GridSpec {
    pub fn planar(region: [f64; 4], res: usize) -> Self {
        GridSpec { region, res, horizon: 10, tol: 1e-9, axes: [0, 1], base: vec![0.0, 0.0] }
    }

    /// Centre of cell `i` of `res` along `[lo, hi]`, symmetric under
    /// `lo, hi -> -hi, -lo`.
    fn centre(lo: f64, hi: f64, res: usize, i: usize) -> f64 {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        mid + ((2 * i + 1) as f64 - res as f64) * half / res as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Cell {
    /// Some point of the cell fails at `step`.
    Crash { step: usize, witness: [f64; 2] },
    /// Newest value at the horizon for the cell centre, and its digest
    /// `atan(v)/(pi/2)`.
    Value { value: f64, digest: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridClassification {
    pub spec: GridSpec,
    /// Row-major; row 0 is the top (`ymax`).
    pub cells: Vec<Cell>,
}

struct Ctx<'a> {
    fm: &'a FastMap,
    spec: &'a GridSpec,
}

impl Ctx<'_> {
    fn window(&self, x: f64, y: f64) -> Vec<f64> {
        let mut w = self.spec.base.clone();
        w[self.spec.axes[0]] = x;
        w[self.spec.axes[1]] = y;
        w
    }

    /// Crash step within the horizon, or the denominators met at each step
    /// and the final newest value.
    fn run(&self, x: f64, y: f64) -> std::result::Result<usize, (Vec<f64>, f64)> {
        let mut w = self.window(x, y);
        let mut dens = Vec::with_capacity(self.spec.horizon);
        for step in 0..self.spec.horizon {
            dens.push(self.fm.den_r(&w).0);
            match self.fm.step_r(&w, self.spec.tol) {
                FloatStep::Crash => return Ok(step),
                FloatStep::Value(v) => {
                    w.remove(0);
                    w.push(v);
                }
            }
        }
        Err((dens, *w.last().unwrap()))
    }

    /// Bisects between two points whose step-`s` denominators differ in
    /// sign; returns a point failing by the horizon.
    fn witness(&self, mut a: [f64; 2], mut b: [f64; 2], s: usize, sa: f64) -> Option<(usize, [f64; 2])> {
        for _ in 0..80 {
            let m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
            match self.run(m[0], m[1]) {
                Ok(step) => return Some((step, m)),
                Err((dens, _)) => {
                    if dens[s].signum() == sa {
                        a = m;
                    } else {
                        b = m;
                    }
                }
            }
            if a == b {
                break;
            }
        }
        None
    }

    fn cell(&self, cx: f64, cy: f64, hx: f64, hy: f64) -> Cell {
        let centre = self.run(cx, cy);
        if let Ok(step) = centre {
            return Cell::Crash { step, witness: [cx, cy] };
        }
        // 3x3 samples: corners, edge midpoints and the centre
        let mut pts = Vec::with_capacity(9);
        for j in [-1.0, 0.0, 1.0] {
            for i in [-1.0, 0.0, 1.0] {
                pts.push([cx + i * hx, cy + j * hy]);
            }
        }
        let runs: Vec<_> = pts.iter().map(|p| self.run(p[0], p[1])).collect();
        let mut best: Option<(usize, [f64; 2])> = None;
        let consider = |best: &mut Option<(usize, [f64; 2])>, c: (usize, [f64; 2])| {
            if best.map_or(true, |b| c.0 < b.0) {
                *best = Some(c);
            }
        };
        for (p, r) in pts.iter().zip(&runs) {
            if let Ok(step) = r {
                consider(&mut best, (*step, *p));
            }
        }
        // neighbouring samples along rows and columns
        let pairs = [(0, 1), (1, 2), (3, 4), (4, 5), (6, 7), (7, 8), (0, 3), (3, 6), (1, 4), (4, 7), (2, 5), (5, 8)];
        for (i, j) in pairs {
            let (Err((da, _)), Err((db, _))) = (&runs[i], &runs[j]) else { continue };
            let first = (0..self.spec.horizon).find(|&s| da[s].signum() != db[s].signum() && da[s] != 0.0 && db[s] != 0.0);
            if let Some(s) = first {
                if best.is_some_and(|b| b.0 <= s) {
                    continue;
                }
                if let Some(c) = self.witness(pts[i], pts[j], s, da[s].signum()) {
                    consider(&mut best, c);
                }
            }
        }
        match (best, centre) {
            (Some((step, witness)), _) => Cell::Crash { step, witness },
            (None, Err((_, v))) => Cell::Value { value: v, digest: v.atan() / std::f64::consts::FRAC_PI_2 },
            (None, Ok(_)) => unreachable!(),
        }
    }
}

/// Classifies every cell. The result depends only on the inputs.
pub fn grid_classify(de: &DifferenceEquation, spec: &GridSpec) -> Result<GridClassification> {
    let fm = FastMap::new(&de.map)?;
    let k = fm.order();
    if spec.res == 0 || spec.horizon == 0 {
        return Err(Error::Invalid("resolution and horizon must be positive".into()));
    }
    if spec.base.len() != k || spec.axes.iter().any(|&a| a >= k) || spec.axes[0] == spec.axes[1] {
        return Err(Error::Invalid(format!("axes {:?} and base of length {} do not fit order {k}", spec.axes, spec.base.len())));
    }
    let [xmin, xmax, ymin, ymax] = spec.region;
    if !(xmin < xmax && ymin < ymax) {
        return Err(Error::Invalid("empty region".into()));
    }
    let ctx = Ctx { fm: &fm, spec };
    let n = spec.res;
    let hx = 0.5 * (xmax - xmin) / n as f64;
    let hy = 0.5 * (ymax - ymin) / n as f64;
    let cells = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (row, col) = (idx / n, idx % n);
            let cx = GridSpec::centre(xmin, xmax, n, col);
            // row 0 at the top: mirror of the ascending index
            let cy = -GridSpec::centre(-ymax, -ymin, n, row);
            ctx.cell(cx, cy, hx, hy)
        })
        .collect();
    Ok(GridClassification { spec: spec.clone(), cells })
}

impl GridClassification {
    pub fn res(&self) -> usize {
        self.spec.res
    }

    pub fn at(&self, row: usize, col: usize) -> &Cell {
        &self.cells[row * self.spec.res + col]
    }

    pub fn crashed_cells(&self) -> usize {
        self.cells.iter().filter(|c| matches!(c, Cell::Crash { .. })).count()
    }

    /// Cell containing a point, if inside the region.
    pub fn locate(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let [xmin, xmax, ymin, ymax] = self.spec.region;
        if x < xmin || x > xmax || y < ymin || y > ymax {
            return None;
        }
        let n = self.spec.res;
        let col = (((x - xmin) / (xmax - xmin)) * n as f64).floor().min(n as f64 - 1.0) as usize;
        let row = (((ymax - y) / (ymax - ymin)) * n as f64).floor().min(n as f64 - 1.0) as usize;
        Some((row, col))
    }

    /// Canonical bytes: per cell a tag, then the crash step or the bits of
    /// the digest.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.cells.len() * 9);
        for c in &self.cells {
            match c {
                Cell::Crash { step, .. } => {
                    out.push(0);
                    out.extend_from_slice(&(*step as u64).to_le_bytes());
                }
                Cell::Value { digest, .. } => {
                    out.push(1);
                    out.extend_from_slice(&digest.to_bits().to_le_bytes());
                }
            }
        }
        out
    }

    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_bytes()))
    }

    pub fn summary(&self) -> RasterSummary {
        RasterSummary {
            region: self.spec.region,
            res: self.spec.res,
            horizon: self.spec.horizon,
            crashed_cells: self.crashed_cells(),
            sha256: self.sha256(),
        }
    }

    /// Cells where `self` and the left-right mirror of `other` differ in
    /// crash status, crash step or digest.
    pub fn mirror_mismatches(&self, other: &GridClassification) -> usize {
        let n = self.spec.res;
        if other.spec.res != n {
            return n * n;
        }
        let mut bad = 0;
        for row in 0..n {
            for col in 0..n {
                let same = match (self.at(row, col), other.at(row, n - 1 - col)) {
                    (Cell::Crash { step: a, .. }, Cell::Crash { step: b, .. }) => a == b,
                    (Cell::Value { digest: a, .. }, Cell::Value { digest: b, .. }) => a.to_bits() == b.to_bits(),
                    _ => false,
                };
                if !same {
                    bad += 1;
                }
            }
        }
        bad
    }

    /// Cells whose crash status differs from `other` reflected in the
    /// chosen axes (`flip_x` reverses columns, `flip_y` rows).
    pub fn pattern_mismatches(&self, other: &GridClassification, flip_x: bool, flip_y: bool) -> usize {
        let n = self.spec.res;
        if other.spec.res != n {
            return n * n;
        }
        let crash = |c: &Cell| matches!(c, Cell::Crash { .. });
        let mut bad = 0;
        for row in 0..n {
            for col in 0..n {
                let r2 = if flip_y { n - 1 - row } else { row };
                let c2 = if flip_x { n - 1 - col } else { col };
                if crash(self.at(row, col)) != crash(other.at(r2, c2)) {
                    bad += 1;
                }
            }
        }
        bad
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::definition::EquationDef;
    use crate::enumeration::inverse::{inverse_orbit, InverseOrbitOptions};
    use crate::scalar::Field;

    fn eq61(a: i64, b: i64) -> DifferenceEquation {
        EquationDef::new(2, &format!("({a})*x1 + ({b})*x0"), "x0*x1").to_equation().unwrap()
    }

    #[test]
    fn axes_crash_early() {
        let g = grid_classify(&eq61(1, 1), &GridSpec::planar([-2.0, 2.0, -2.0, 2.0], 20)).unwrap();
        // the cells touching x = 0 and y = 0
        for i in 0..20 {
            for (r, c) in [(i, 9), (i, 10), (9, i), (10, i)] {
                let Cell::Crash { step, .. } = g.at(r, c) else { panic!("cell {r},{c}") };
                assert!(*step <= 1);
            }
        }
    }

    #[test]
    fn pielou_line_cells() {
        let de = EquationDef::new(2, "x0", "1 + x1").to_equation().unwrap();
        let g = grid_classify(&de, &GridSpec::planar([-3.0, 3.0, -3.0, 3.0], 30)).unwrap();
        // x = -1 is the boundary between columns 9 and 10
        for r in 0..30 {
            let hit = [9, 10].iter().any(|&c| matches!(g.at(r, c), Cell::Crash { step: 0, .. }));
            assert!(hit, "row {r}");
        }
    }

    #[test]
    fn witnesses_crash_and_reruns_match() {
        let spec = GridSpec { horizon: 6, ..GridSpec::planar([-2.0, 2.0, -2.0, 2.0], 24) };
        let de = eq61(1, -1);
        let g = grid_classify(&de, &spec).unwrap();
        let fm = FastMap::new(&de.map).unwrap();
        for c in &g.cells {
            if let Cell::Crash { step, witness } = c {
                let s = fm.crash_step_r(&mut witness.to_vec(), spec.horizon, spec.tol);
                assert_eq!(s, Some(*step));
            }
        }
        assert_eq!(g.sha256(), grid_classify(&de, &spec).unwrap().sha256());
    }

    #[test]
    fn sign_alternation_mirror() {
        // u_n = (-1)^n x_n maps (A, B) to (-A, B) and mirrors the older axis
        let spec = GridSpec::planar([-2.0, 2.0, -2.0, 2.0], 16);
        let a = grid_classify(&eq61(1, -1), &spec).unwrap();
        let b = grid_classify(&eq61(-1, -1), &spec).unwrap();
        assert_eq!(a.pattern_mismatches(&b, true, false), 0);
        let c = grid_classify(&eq61(-1, 1), &spec).unwrap();
        let d = grid_classify(&eq61(1, 1), &spec).unwrap();
        assert_eq!(c.pattern_mismatches(&d, true, false), 0);
        // x -> -x fixes (A, B): each raster is symmetric about the origin
        assert_eq!(a.pattern_mismatches(&a, true, true), 0);
    }

    #[test]
    fn tree_nodes_lie_in_crashing_cells() {
        let de = eq61(1, 1);
        let spec = GridSpec { horizon: 6, ..GridSpec::planar([-3.0, 3.0, -3.0, 3.0], 40) };
        let g = grid_classify(&de, &spec).unwrap();
        let opts = InverseOrbitOptions { depth: 5, field: Field::Real, ..Default::default() };
        let tree = inverse_orbit(&de, None, opts).unwrap();
        let mut inside = 0;
        for node in &tree.nodes {
            let p: Vec<f64> = node.point.iter().map(|s| s.to_c64().re).collect();
            if let Some((r, c)) = g.locate(p[0], p[1]) {
                inside += 1;
                assert!(matches!(g.at(r, c), Cell::Crash { .. }), "{p:?}");
            }
        }
        assert!(inside > 10);
    }
}
