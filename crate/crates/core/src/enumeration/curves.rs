//! Forbidden curves read off the denominators of the unfolding iterates.
//!
//! Layer `i` (from 1) holds the irreducible factors that first appear in the
//! cleared denominator met when computing the `i`-th new value; a generic
//! point on one of them fails at step `i - 1`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::fsdesc::{random_nonzero, Form, FsDescription, FsLayer};
use crate::map::{iterate, DifferenceEquation, IterOptions};
use crate::poly::Poly;
use crate::ratfunc::{Composition, RatFunc};
use crate::scalar::Scalar;
use crate::{Error, Result, Q};

use super::fastmap::FastMap;
use super::realroots::real_roots;

#[derive(Clone, Debug, PartialEq)]
pub struct CurveLayer {
    pub index: usize,
    pub factors: Vec<Poly>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveFamily {
    /// Ring variable names: window (oldest first), then parameters.
    pub names: Vec<String>,
    pub order: usize,
    pub layers: Vec<CurveLayer>,
    /// Set when the term budget stopped the computation early.
    pub truncated: Option<String>,
}

/// Curve layers `1..=n`. A budget overflow keeps the layers found so far.
pub fn forbidden_curves(de: &DifferenceEquation, n: usize, term_budget: usize) -> Result<CurveFamily> {
    if n == 0 {
        return Err(Error::Invalid("at least one layer is needed".into()));
    }
    let f = de.map.func();
    let nv = f.nvars();
    let k = de.order();
    let mut values: Vec<RatFunc> = (0..k).map(|v| RatFunc::var(nv, v)).collect();
    let params: Vec<RatFunc> = (k..nv).map(|v| RatFunc::var(nv, v)).collect();
    let mut seen: Vec<Poly> = Vec::new();
    let mut layers = Vec::with_capacity(n);
    let mut truncated = None;
    for index in 1..=n {
        let mut subs: Vec<RatFunc> = values[values.len() - k..].to_vec();
        subs.extend(params.iter().cloned());
        let Composition { value, crash_poly } = f.compose(&subs)?;
        let mut factors = Vec::new();
        for g in new_factors(&crash_poly, &seen) {
            if (0..k).any(|v| g.uses(v)) {
                seen.push(g.clone());
                factors.push(g);
            }
        }
        layers.push(CurveLayer { index, factors });
        if index < n && value.nterms() > term_budget {
            truncated = Some(format!("value {index} has {} terms (budget {term_budget})", value.nterms()));
            break;
        }
        values.push(value);
    }
    Ok(CurveFamily { names: de.map.names().to_vec(), order: k, layers, truncated })
}

/// Factors of `p` not among `seen`; known factors are divided out first
/// since the splitting is not a full factorization.
fn new_factors(p: &Poly, seen: &[Poly]) -> Vec<Poly> {
    let mut rest = p.clone();
    for g in seen {
        while let Some(q) = rest.div_exact(g) {
            rest = q;
        }
    }
    rest.split_factors().into_iter().filter(|g| !seen.contains(g)).collect()
}

/// Outcome of the forward check on one layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerCheck {
    pub index: usize,
    pub sampled: usize,
    /// Samples that failed no later than step `index - 1`.
    pub on_time: usize,
    /// Factors where no sample point could be produced.
    pub unsampled: usize,
}

impl CurveFamily {
    pub fn layer(&self, index: usize) -> Option<&CurveLayer> {
        self.layers.iter().find(|l| l.index == index)
    }

    pub fn window_names(&self) -> &[String] {
        &self.names[..self.order]
    }

    pub fn description(&self) -> FsDescription {
        let layers = self
            .layers
            .iter()
            .map(|l| FsLayer {
                depth: l.index - 1,
                forms: l.factors.iter().map(|g| Form::from_poly(g, &self.names)).collect(),
            })
            .collect();
        FsDescription::Hypersurfaces { layers }
    }

    /// Binds the parameters of every factor.
    pub fn bind(&self, values: &[Scalar]) -> Result<CurveFamily> {
        let np = self.names.len() - self.order;
        if values.len() != np {
            return Err(Error::ArityMismatch { expected: np, got: values.len() });
        }
        let k = self.order;
        let mut seen: Vec<Poly> = Vec::new();
        let layers = self
            .layers
            .iter()
            .map(|l| {
                let mut factors = Vec::new();
                for g in &l.factors {
                    let mut h = g.clone();
                    for (j, c) in values.iter().enumerate() {
                        h = h.specialize(k + j, c);
                    }
                    for h in new_factors(&h.truncate_vars(k), &seen) {
                        seen.push(h.clone());
                        factors.push(h);
                    }
                }
                CurveLayer { index: l.index, factors }
            })
            .collect();
        Ok(CurveFamily { names: self.names[..k].to_vec(), order: k, layers, truncated: self.truncated.clone() })
    }

    /// Samples up to `per_factor` points on every factor of every layer and
    /// iterates them forward. Needs a numeric equation.
    pub fn check<R: Rng>(&self, de: &DifferenceEquation, per_factor: usize, rng: &mut R) -> Result<Vec<LayerCheck>> {
        let fm = FastMap::new(&de.map)?;
        let mut out = Vec::new();
        for l in &self.layers {
            let mut c = LayerCheck { index: l.index, sampled: 0, on_time: 0, unsampled: 0 };
            for g in &l.factors {
                let pts = sample_factor(g, self.order, per_factor, rng);
                if pts.is_empty() {
                    c.unsampled += 1;
                }
                for p in pts {
                    c.sampled += 1;
                    let step = if p.iter().all(Scalar::is_exact) {
                        iterate(de, &p, l.index + 1, IterOptions { detect_period: false, ..Default::default() })?
                            .crash_step()
                    } else {
                        let mut w: Vec<f64> = p.iter().map(|s| s.to_c64().re).collect();
                        fm.crash_step_r(&mut w, l.index + 1, 1e-9)
                    };
                    if step.is_some_and(|s| s < l.index) {
                        c.on_time += 1;
                    }
                }
            }
            out.push(c);
        }
        Ok(out)
    }

    /// Real points on the curves of a numeric order-2 family: for each grid
    /// abscissa solve for the ordinate and vice versa. Rows are
    /// `(x, y, layer)` with `x` the older value.
    pub fn plane_samples(&self, region: [f64; 4], steps: usize) -> Result<Vec<(f64, f64, usize)>> {
        if self.order != 2 || self.names.len() != 2 {
            return Err(Error::NotApplicable("plane samples need a numeric order-2 family".into()));
        }
        let [xmin, xmax, ymin, ymax] = region;
        let steps = steps.max(2);
        let mut out = Vec::new();
        for l in &self.layers {
            for g in &l.factors {
                for (fixed, free, lo, hi, flo, fhi) in [(0, 1, xmin, xmax, ymin, ymax), (1, 0, ymin, ymax, xmin, xmax)] {
                    for i in 0..=steps {
                        let t = lo + (hi - lo) * i as f64 / steps as f64;
                        let Some(tq) = Q::from_float(t) else { continue };
                        let Some(u) = g.specialize(fixed, &Scalar::Rational(tq)).to_upoly(free) else { continue };
                        if u.degree().unwrap_or(0) == 0 {
                            continue;
                        }
                        for r in real_roots(&u, 1e-12) {
                            if r >= flo && r <= fhi {
                                out.push(if fixed == 0 { (t, r, l.index) } else { (r, t, l.index) });
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Random points on `g = 0`, solving for a window variable of degree one
/// when there is one and for a real root otherwise.
pub fn sample_factor<R: Rng>(g: &Poly, order: usize, count: usize, rng: &mut R) -> Vec<Vec<Scalar>> {
    let mut out = Vec::new();
    let used: Vec<usize> = (0..order).filter(|&v| g.uses(v)).collect();
    let Some(&solve) = used.iter().find(|&&v| g.degree_in(v) == 1).or(used.first()) else {
        return out;
    };
    let mut attempts = 0;
    while out.len() < count && attempts < 20 * count.max(1) {
        attempts += 1;
        let mut point: Vec<Scalar> = (0..order).map(|_| random_nonzero(rng, 5, 3)).collect();
        let mut h = g.clone();
        for v in (0..order).filter(|&v| v != solve) {
            h = h.specialize(v, &point[v]);
        }
        let Some(u) = h.to_upoly(solve) else { return out };
        let roots: Vec<Scalar> = match u.degree() {
            Some(1) => vec![Scalar::Rational(-u.coeff(0) / u.coeff(1))],
            Some(d) if d > 1 => {
                let exact = u.rational_roots();
                if exact.is_empty() {
                    real_roots(&u, 1e-15).into_iter().map(Scalar::float).collect()
                } else {
                    exact.into_iter().map(Scalar::Rational).collect()
                }
            }
            _ => continue,
        };
        if let Some(r) = roots.into_iter().next() {
            point[solve] = r;
            if !point.iter().all(Scalar::is_exact) {
                point = point.iter().map(Scalar::to_float).collect();
            }
            out.push(point);
        }
    }
    out
}

/// CSV text with header `x,y,layer`.
pub fn curve_csv(rows: &[(f64, f64, usize)]) -> String {
    let mut s = String::from("x,y,layer\n");
    for (x, y, l) in rows {
        s.push_str(&format!("{x},{y},{l}\n"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::definition::EquationDef;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn form(text: &str, names: &[String]) -> Poly {
        Form { vars: names.to_vec(), poly: text.into() }.to_poly().unwrap().monic()
    }

    fn set(layer: &CurveLayer) -> Vec<Poly> {
        let mut v: Vec<Poly> = layer.factors.iter().map(Poly::monic).collect();
        v.sort_by_key(|p| format!("{p:?}"));
        v
    }

    #[test]
    fn pielou_first_layers() {
        let de = EquationDef::new(2, "a*x0", "1 + x1").with_params(&[("a", None)]).to_equation().unwrap();
        let fam = forbidden_curves(&de, 4, 10_000).unwrap();
        let names = fam.names.clone();
        // x is the older value, y the newer
        let sub = |s: &str| s.replace('x', "X").replace('y', "x0").replace('X', "x1");
        let expected = ["1 + x", "1 + y", "1 + x + a*y", "1 + x + y + a^2*y + x*y"];
        for (i, e) in expected.iter().enumerate() {
            assert_eq!(set(&fam.layers[i]), vec![form(&sub(e), &names)], "layer {}", i + 1);
        }
    }

    #[test]
    fn reciprocal_sum_layers() {
        let de = EquationDef::new(2, "x0 + x1", "x0*x1").to_equation().unwrap();
        let fam = forbidden_curves(&de, 3, 10_000).unwrap();
        let names = fam.names.clone();
        assert_eq!(set(&fam.layers[0]).len(), 2);
        assert!(fam.layers[0].factors.iter().all(|g| g.total_degree() == 1 && g.nterms() == 1));
        assert!(fam.layers[1].factors.iter().any(|g| g.monic() == form("x0 + x1", &names)));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for c in fam.check(&de, 5, &mut rng).unwrap() {
            assert_eq!(c.on_time, c.sampled, "{c:?}");
        }
    }

    #[test]
    fn pielou_samples_and_plane_points() {
        let de = EquationDef::new(2, "x0", "1 + x1").to_equation().unwrap();
        let fam = forbidden_curves(&de, 8, 10_000).unwrap();
        assert_eq!(fam.layers.len(), 8);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for c in fam.check(&de, 4, &mut rng).unwrap() {
            assert!(c.sampled > 0 && c.on_time == c.sampled, "{c:?}");
        }
        let rows = fam.plane_samples([-3.0, 3.0, -3.0, 3.0], 20).unwrap();
        assert!(rows.iter().any(|&(x, _, l)| l == 1 && (x + 1.0).abs() < 1e-12));
        assert!(curve_csv(&rows).starts_with("x,y,layer\n"));
    }

    #[test]
    fn budget_truncates() {
        let de = EquationDef::new(2, "x0^2 + x1 + 1", "x0 - x1^2").to_equation().unwrap();
        let fam = forbidden_curves(&de, 6, 20).unwrap();
        assert!(fam.truncated.is_some());
        assert!(!fam.layers.is_empty() && fam.layers.len() < 6);
    }
}
