//! Forbidden-set descriptions and their JSON records.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::parse::{parse_ratfunc, Symbol};
use crate::poly::Poly;
use crate::reductions::ChangeOfVariables;
use crate::scalar::Scalar;
use crate::{Error, Result};

/// A polynomial `form = 0` with named variables (oldest first).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Form {
    pub vars: Vec<String>,
    pub poly: String,
}

impl Form {
    pub fn from_poly(p: &Poly, vars: &[String]) -> Self {
        Form { vars: vars.to_vec(), poly: p.display_with(vars).to_string() }
    }

    pub fn to_poly(&self) -> Result<Poly> {
        let names = &self.vars;
        let resolve = |s: &str| names.iter().position(|n| n == s).map(Symbol::Var);
        let r = parse_ratfunc(&self.poly, names.len(), &resolve, 1, 1)?;
        match r.den().constant_value() {
            Some(c) => Ok(r.num().scale(&c.inv().expect("nonzero denominator"))),
            None => Err(Error::Invalid(format!("'{}' is not a polynomial", self.poly))),
        }
    }
}

/// A forbidden point with the step at which its orbit fails, when known.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FsPoint {
    pub point: Vec<Scalar>,
    pub depth: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FsLayer {
    /// Crash step of the points on the layer.
    pub depth: usize,
    pub forms: Vec<Form>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RasterSummary {
    pub region: [f64; 4],
    pub res: usize,
    pub horizon: usize,
    pub crashed_cells: usize,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FsDescription {
    Empty,
    /// Every initial condition is forbidden.
    Everything,
    /// Points in generation order. `complete` marks a finite forbidden set
    /// listed in full; otherwise the list is a truncation, possibly with a
    /// known limit.
    Points { points: Vec<FsPoint>, limit: Option<Vec<Scalar>>, complete: bool },
    Hypersurfaces { layers: Vec<FsLayer> },
    /// Surfaces `x_{-k} ... x_0 = constants[n]`; points on surface `n`
    /// fail at step `n`.
    ProductHypersurfaces { arity: usize, constants: Vec<Scalar>, complete: bool },
    Raster(RasterSummary),
    Union { parts: Vec<FsDescription> },
    /// Preimage of `inner` under a change of variables applied to the
    /// window values ending `offset` places before the newest, on windows
    /// of dimension `dim`, together with the change's singular locus.
    Pullback {
        dim: usize,
        #[serde(default)]
        offset: usize,
        change: ChangeOfVariables,
        inner: Box<FsDescription>,
        singular: Vec<Form>,
    },
}

/// Membership result: the crash step predicted by the description, if any.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hit {
    pub depth: Option<usize>,
}

fn near_zero(v: &Scalar, scale: f64, tol: f64) -> bool {
    if v.is_exact() {
        v.is_zero()
    } else {
        v.abs_f64() <= tol * scale.max(1.0)
    }
}

fn near(a: &Scalar, b: &Scalar, tol: f64) -> bool {
    near_zero(&(a - b), a.abs_f64().max(b.abs_f64()), tol)
}

impl FsDescription {
    /// Whether `point` (oldest first) lies in the described set.
    pub fn contains(&self, point: &[Scalar], tol: f64) -> Result<Option<Hit>> {
        Ok(match self {
            FsDescription::Empty | FsDescription::Raster(_) => None,
            FsDescription::Everything => Some(Hit { depth: Some(0) }),
            FsDescription::Points { points, .. } => points
                .iter()
                .find(|p| p.point.len() == point.len() && p.point.iter().zip(point).all(|(a, b)| near(a, b, tol)))
                .map(|p| Hit { depth: p.depth }),
            FsDescription::Hypersurfaces { layers } => {
                for layer in layers {
                    for form in &layer.forms {
                        let p = form.to_poly()?;
                        let (v, s) = p.eval_scaled(point);
                        if near_zero(&v, s, tol) {
                            return Ok(Some(Hit { depth: Some(layer.depth) }));
                        }
                    }
                }
                None
            }
            FsDescription::ProductHypersurfaces { arity, constants, .. } => {
                if point.len() != *arity {
                    return Err(Error::ArityMismatch { expected: *arity, got: point.len() });
                }
                let prod = point.iter().fold(Scalar::one(), |acc, x| &acc * x);
                constants.iter().position(|r| near(&prod, r, tol)).map(|n| Hit { depth: Some(n) })
            }
            FsDescription::Union { parts } => {
                let mut best: Option<Hit> = None;
                for part in parts {
                    if let Some(h) = part.contains(point, tol)? {
                        best = Some(match (best, h.depth) {
                            (Some(Hit { depth: Some(a) }), Some(b)) => Hit { depth: Some(a.min(b)) },
                            (Some(prev), None) => prev,
                            _ => h,
                        });
                    }
                }
                best
            }
            FsDescription::Pullback { dim, offset, change, inner, singular } => {
                if point.len() != *dim {
                    return Err(Error::ArityMismatch { expected: *dim, got: point.len() });
                }
                let tail = &point[dim - change.span() - offset..dim - offset];
                for form in singular {
                    let (v, s) = form.to_poly()?.eval_scaled(tail);
                    if near_zero(&v, s, tol) {
                        return Ok(Some(Hit { depth: None }));
                    }
                }
                match change.apply(tail) {
                    Some(z) => inner.contains(&[z], tol)?,
                    None => Some(Hit { depth: None }),
                }
            }
        })
    }

    /// Random points of the described set, up to `per_part` for each point
    /// list entry, layer form or surface, limited to depth `max_depth`.
    pub fn sample<R: Rng>(&self, per_part: usize, max_depth: usize, rng: &mut R) -> Result<Vec<FsPoint>> {
        let mut out = Vec::new();
        match self {
            FsDescription::Empty | FsDescription::Everything | FsDescription::Raster(_) => {}
            FsDescription::Points { points, .. } => {
                out.extend(points.iter().filter(|p| p.depth.is_none_or(|d| d <= max_depth)).cloned());
            }
            FsDescription::Hypersurfaces { layers } => {
                for layer in layers.iter().filter(|l| l.depth <= max_depth) {
                    for form in &layer.forms {
                        let p = form.to_poly()?;
                        for _ in 0..per_part {
                            if let Some(pt) = point_on(&p, &Scalar::zero(), p.nvars(), rng) {
                                out.push(FsPoint { point: pt, depth: Some(layer.depth) });
                            }
                        }
                    }
                }
            }
            FsDescription::ProductHypersurfaces { arity, constants, .. } => {
                for (n, r) in constants.iter().enumerate().take(max_depth + 1) {
                    for _ in 0..per_part {
                        let mut pt: Vec<Scalar> = (0..arity - 1).map(|_| random_nonzero(rng, 9, 9)).collect();
                        let prod = pt.iter().fold(Scalar::one(), |acc, x| &acc * x);
                        pt.push(r / &prod);
                        out.push(FsPoint { point: pt, depth: Some(n) });
                    }
                }
            }
            FsDescription::Union { parts } => {
                for part in parts {
                    out.extend(part.sample(per_part, max_depth, rng)?);
                }
            }
            FsDescription::Pullback { dim, offset, change, inner, .. } => {
                let targets = inner.sample(1, max_depth, rng)?;
                let h = change.as_ratfunc();
                for t in targets.iter().filter(|t| t.point.len() == 1) {
                    for _ in 0..per_part {
                        // solve num - z den = 0 for one window variable
                        let eq = h.num().sub(&h.den().scale(&t.point[0]));
                        let Some(tail) = point_on(&eq, &Scalar::zero(), change.span(), rng) else {
                            continue;
                        };
                        if h.den().eval(&tail).is_zero() {
                            continue;
                        }
                        let mut pt: Vec<Scalar> =
                            (0..dim - change.span() - offset).map(|_| random_nonzero(rng, 9, 9)).collect();
                        pt.extend(tail);
                        pt.extend((0..*offset).map(|_| random_nonzero(rng, 9, 9)));
                        out.push(FsPoint { point: pt, depth: t.depth });
                    }
                }
            }
        }
        Ok(out)
    }
}

/// A random point of `p = value` found by choosing random values for all
/// but one variable in which `p` is linear.
fn point_on<R: Rng>(p: &Poly, value: &Scalar, nvars: usize, rng: &mut R) -> Option<Vec<Scalar>> {
    let v = (0..nvars).rev().find(|&v| p.degree_in(v) == 1)?;
    for _ in 0..20 {
        let pt: Vec<Scalar> = (0..nvars).map(|_| random_nonzero(rng, 9, 9)).collect();
        let mut q = p.clone();
        for (u, x) in pt.iter().enumerate() {
            if u != v {
                q = q.specialize(u, x);
            }
        }
        let coeffs = q.coeffs_in(v);
        let c1 = coeffs.get(1).and_then(Poly::constant_value).unwrap_or_else(Scalar::zero);
        let c0 = coeffs.first().and_then(Poly::constant_value).unwrap_or_else(Scalar::zero);
        if c1.is_zero() {
            continue;
        }
        let mut pt = pt;
        pt[v] = &(value - &c0) / &c1;
        return Some(pt);
    }
    None
}

/// Random nonzero rational `n/d` with `|n| <= max_num`, `1 <= d <= max_den`.
pub fn random_nonzero<R: Rng>(rng: &mut R, max_num: i64, max_den: i64) -> Scalar {
    loop {
        let n = rng.gen_range(-max_num..=max_num);
        if n != 0 {
            return Scalar::ratio(n, rng.gen_range(1..=max_den));
        }
    }
}

/// One entry of a forbidden-set JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FsRecord {
    pub generator: String,
    pub depth: usize,
    #[serde(flatten)]
    pub item: FsItem,
    pub verified_crash_step: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FsItem {
    Point(Vec<Scalar>),
    Form(Form),
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn names() -> Vec<String> {
        vec!["x1".into(), "x0".into()]
    }

    #[test]
    fn form_round_trip() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = x.mul(&y).add(&Poly::constant(2, Scalar::ratio(3, 2))).sub(&y);
        let f = Form::from_poly(&p, &names());
        assert_eq!(f.to_poly().unwrap(), p);
    }

    #[test]
    fn product_surfaces_membership_and_samples() {
        let d = FsDescription::ProductHypersurfaces {
            arity: 2,
            constants: vec![Scalar::int(-1), Scalar::ratio(-1, 2)],
            complete: false,
        };
        let hit = d.contains(&[Scalar::int(2), Scalar::ratio(-1, 4)], 0.0).unwrap();
        assert_eq!(hit, Some(Hit { depth: Some(1) }));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for s in d.sample(3, 5, &mut rng).unwrap() {
            assert!(d.contains(&s.point, 0.0).unwrap().is_some());
        }
    }

    #[test]
    fn hypersurface_samples_lie_on_forms() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = x.mul(&y).add(&Poly::one(2));
        let d = FsDescription::Hypersurfaces {
            layers: vec![FsLayer { depth: 0, forms: vec![Form::from_poly(&p, &names())] }],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = d.sample(5, 3, &mut rng).unwrap();
        assert_eq!(s.len(), 5);
        for pt in s {
            assert!(p.eval(&pt.point).is_zero());
        }
    }

    #[test]
    fn record_json_shape() {
        let r = FsRecord {
            generator: "riccati".into(),
            depth: 3,
            item: FsItem::Point(vec![Scalar::ratio(-1, 2)]),
            verified_crash_step: Some(1),
        };
        let j = serde_json::to_value(&r).unwrap();
        assert!(j.get("point").is_some());
        assert_eq!(serde_json::from_value::<FsRecord>(j).unwrap(), r);
    }
}
