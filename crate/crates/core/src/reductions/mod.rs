//! Changes of variables, invariants and a family catalog that carry
//! equations to linear or Riccati form, with pullback of the reduced
//! forbidden set.

mod family;
mod invariant;
mod shojaei;

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fsdesc::{random_nonzero, Form, FsDescription, FsPoint};
use crate::map::{default_names, iterate, DifferenceEquation, IterOptions, RationalMap};
use crate::mobius::Mobius;
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::riccati::RiccatiParams1;
use crate::scalar::Scalar;
use crate::{Error, Result};

pub use family::{reduce, Family, FamilyCatalog, FamilyInstance};
pub use invariant::{
    aghajani_fs, invariant_constant, invariant_reduce, mobius_product_equation, InvariantForm,
};
pub use shojaei::{shojaei_fs, ShojaeiFs};

/// Change from an original window to a reduced variable `z_n`.
///
/// Window kinds compute `z_n` from the newest values of the original
/// sequence `x`; pointwise kinds relate one original value `y_n` to the
/// reduced `z_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChangeOfVariables {
    /// `z_n = x_{n-lag} / x_n`.
    QuotientLag { lag: usize },
    /// `z_n = x_n x_{n-1} ... x_{n-k}`.
    ProductLags { k: usize },
    /// `z_n = x_n x_{n-lag}`.
    ProductPair { lag: usize },
    /// `z_n = x_n / x_{n-lag}`.
    Quotient { lag: usize },
    /// `z_n = T(y_n)`.
    MobiusPointwise { t: Mobius },
    /// `z_n = y_n - b`.
    AffineShift { b: Scalar },
    /// `z_n = 1/(y_n - kappa)`.
    ReciprocalShift { kappa: Scalar },
    /// `z_n = (y_n + alpha y_{n-1} + beta)/(gamma y_n + lambda y_{n-1} + mu)`.
    BilinearWindow { alpha: Scalar, beta: Scalar, gamma: Scalar, lambda: Scalar, mu: Scalar },
}

impl ChangeOfVariables {
    /// Number of trailing window values the change reads.
    pub fn span(&self) -> usize {
        match self {
            ChangeOfVariables::QuotientLag { lag }
            | ChangeOfVariables::ProductPair { lag }
            | ChangeOfVariables::Quotient { lag } => lag + 1,
            ChangeOfVariables::ProductLags { k } => k + 1,
            ChangeOfVariables::MobiusPointwise { .. }
            | ChangeOfVariables::AffineShift { .. }
            | ChangeOfVariables::ReciprocalShift { .. } => 1,
            ChangeOfVariables::BilinearWindow { .. } => 2,
        }
    }

    /// The change as a function of `span` variables, oldest first.
    pub fn as_ratfunc(&self) -> RatFunc {
        let s = self.span();
        let v = |i: usize| RatFunc::var(s, i);
        let c = |x: &Scalar| RatFunc::constant(s, x.clone());
        let newest = v(s - 1);
        let r = match self {
            ChangeOfVariables::QuotientLag { .. } => v(0).div(&newest),
            ChangeOfVariables::Quotient { .. } => newest.div(&v(0)),
            ChangeOfVariables::ProductPair { .. } => Ok(newest.mul(&v(0))),
            ChangeOfVariables::ProductLags { .. } => Ok((0..s).fold(c(&Scalar::one()), |acc, i| acc.mul(&v(i)))),
            ChangeOfVariables::MobiusPointwise { t } => Ok(t.as_ratfunc(1, 0)),
            ChangeOfVariables::AffineShift { b } => Ok(newest.sub(&c(b))),
            ChangeOfVariables::ReciprocalShift { kappa } => newest.sub(&c(kappa)).inv(),
            ChangeOfVariables::BilinearWindow { alpha, beta, gamma, lambda, mu } => {
                let num = newest.add(&v(0).scale(alpha)).add(&c(beta));
                let den = newest.scale(gamma).add(&v(0).scale(lambda)).add(&c(mu));
                num.div(&den)
            }
        };
        r.expect("change of variables has a nonzero denominator")
    }

    /// `z_n` from the last `span` window values; `None` on the singular
    /// locus.
    pub fn apply(&self, tail: &[Scalar]) -> Option<Scalar> {
        self.as_ratfunc().eval(tail)
    }

    /// Polynomials (in the `span` trailing variables) whose zero sets make
    /// the change undefined.
    pub fn singular_locus(&self) -> Vec<Poly> {
        let den = self.as_ratfunc().den().clone();
        if den.is_constant() {
            Vec::new()
        } else {
            den.split_factors()
        }
    }
}

impl fmt::Display for ChangeOfVariables {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.span());
        write!(f, "z = {}", self.as_ratfunc().display_with(&names))
    }
}

/// Equation satisfied by the reduced variable.
#[derive(Clone, Debug, PartialEq)]
pub enum ReducedEquation {
    /// `z_{n+1} = Σ coeffs[j] z_{n-j} + constant`.
    Linear { coeffs: Vec<Scalar>, constant: Scalar },
    Riccati(RiccatiParams1),
    Map(RationalMap),
}

impl ReducedEquation {
    pub fn from_map(map: RationalMap) -> Result<Self> {
        let map = map.numeric()?;
        let r = map.order();
        let f = map.func();
        let (num, den) = (f.num(), f.den());
        if let Some(c) = den.constant_value() {
            if num.total_degree() <= 1 {
                let coeffs = (0..r)
                    .map(|j| {
                        let mut e = vec![0; r];
                        e[r - 1 - j] = 1;
                        &num.coeff(&e) / &c
                    })
                    .collect();
                return Ok(ReducedEquation::Linear { coeffs, constant: &num.coeff(&vec![0; r]) / &c });
            }
        }
        if r == 1 && num.total_degree() <= 1 && den.total_degree() <= 1 {
            let p = RiccatiParams1::new(num.coeff(&[0]), num.coeff(&[1]), den.coeff(&[0]), den.coeff(&[1]))?;
            return Ok(ReducedEquation::Riccati(p));
        }
        Ok(ReducedEquation::Map(map))
    }

    pub fn order(&self) -> usize {
        match self {
            ReducedEquation::Linear { coeffs, .. } => coeffs.len(),
            ReducedEquation::Riccati(_) => 1,
            ReducedEquation::Map(m) => m.order(),
        }
    }

    pub fn to_map(&self) -> RationalMap {
        match self {
            ReducedEquation::Linear { coeffs, constant } => {
                let r = coeffs.len();
                let f = coeffs
                    .iter()
                    .enumerate()
                    .fold(RatFunc::constant(r, constant.clone()), |acc, (j, a)| {
                        acc.add(&RatFunc::var(r, r - 1 - j).scale(a))
                    });
                RationalMap::from_ratfunc(f)
            }
            ReducedEquation::Riccati(p) => p.equation().map,
            ReducedEquation::Map(m) => m.clone(),
        }
    }

    pub fn to_equation(&self) -> DifferenceEquation {
        DifferenceEquation::natural(self.to_map())
    }

    /// For maps of the form `z_{n+1} = g(z_{n-r+1})`, the first-order map
    /// `g` together with the stride `r`.
    pub fn decoupled(&self) -> Option<(RationalMap, usize)> {
        let map = self.to_map();
        let r = map.order();
        let f = map.func();
        if (1..r).any(|v| f.uses(v)) {
            return None;
        }
        let g = RatFunc::new(f.num().truncate_vars(1), f.den().truncate_vars(1)).ok()?;
        Some((RationalMap::from_ratfunc(g), r))
    }
}

impl fmt::Display for ReducedEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.to_map();
        let names: Vec<String> = (0..m.order()).map(|i| format!("z{}", m.order() - 1 - i)).collect();
        write!(f, "z' = {}", m.func().display_with(&names))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Via {
    Change {
        change: ChangeOfVariables,
        reduced: ReducedEquation,
        /// Polynomials in the reduced window whose zeros make the original
        /// equation fail at the same step.
        crash: Vec<Poly>,
    },
    Invariant { form: InvariantForm },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionResult {
    pub family: String,
    pub params: Vec<(String, Scalar)>,
    pub via: Via,
}

/// Serializable digest of a reduction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionSummary {
    pub family: String,
    pub params: Vec<(String, Scalar)>,
    pub change: Option<ChangeOfVariables>,
    pub reduced: Option<String>,
    pub invariant: Option<InvariantForm>,
}

impl ReductionResult {
    pub fn summary(&self) -> ReductionSummary {
        let (change, reduced, invariant) = match &self.via {
            Via::Change { change, reduced, .. } => (Some(change.clone()), Some(reduced.to_string()), None),
            Via::Invariant { form } => (None, None, Some(form.clone())),
        };
        ReductionSummary { family: self.family.clone(), params: self.params.clone(), change, reduced, invariant }
    }

    /// Forbidden set of the original equation of order `dim`, pulled back
    /// from the backward orbits of the reduced crash values, to `depth`.
    ///
    /// Needs a reduced map of the form `z_{n+1} = g(z_{n-r+1})` with `g`
    /// of degree at most one and crash conditions on `z_{n-r+1}` alone.
    pub fn closed_fs(&self, dim: usize, depth: usize) -> Result<FsDescription> {
        let Via::Change { change, reduced, crash } = &self.via else {
            return Err(Error::NotApplicable("invariant reductions have no pullback".into()));
        };
        let (g, stride) = reduced
            .decoupled()
            .ok_or_else(|| Error::NotApplicable("reduced map is not decoupled".into()))?;
        let gf = g.func();
        if gf.num().total_degree() > 1 || gf.den().total_degree() > 1 {
            return Err(Error::NotApplicable("reduced map is not linear fractional".into()));
        }
        let t = Mobius::new(gf.num().coeff(&[1]), gf.num().coeff(&[0]), gf.den().coeff(&[1]), gf.den().coeff(&[0]))
            .map_err(|_| Error::NotApplicable("reduced map is constant".into()))?;
        let inv = t.inverse();
        let mut seeds: Vec<Scalar> = Vec::new();
        for c in crash {
            if (1..stride).any(|v| c.uses(v)) {
                return Err(Error::NotApplicable("crash condition involves several reduced values".into()));
            }
            let u = c.truncate_vars(1);
            match u.total_degree() {
                1 => seeds.push(&(-&u.coeff(&[0])) / &u.coeff(&[1])),
                0 => {}
                _ => {
                    let up = u
                        .to_upoly(0)
                        .ok_or_else(|| Error::NotApplicable("crash condition is not rational".into()))?;
                    seeds.extend(up.rational_roots().into_iter().map(Scalar::Rational));
                }
            }
        }
        if let Some(p) = t.pole() {
            if !seeds.contains(&p) {
                seeds.push(p);
            }
        }
        let mut points: Vec<FsPoint> = Vec::new();
        let mut complete = true;
        for s in seeds {
            let mut cur = s;
            let mut j = 0;
            loop {
                if points.iter().any(|p| p.point[0] == cur) {
                    break;
                }
                points.push(FsPoint { point: vec![cur.clone()], depth: Some(j) });
                if j == depth {
                    complete = false;
                    break;
                }
                match inv.apply(&cur) {
                    Some(prev) => cur = prev,
                    None => break,
                }
                j += 1;
            }
        }
        let span = change.span();
        let singular: Vec<Form> =
            change.singular_locus().iter().map(|p| Form::from_poly(p, &default_names(span))).collect();
        let mut parts = Vec::new();
        // window offsets carry the interleaved reduced sequences
        for offset in 0..stride {
            let shift = stride - 1 - offset;
            let pts: Vec<FsPoint> = points
                .iter()
                .filter_map(|p| {
                    let d = p.depth? * stride + shift;
                    (d <= depth).then(|| FsPoint { point: p.point.clone(), depth: Some(d) })
                })
                .collect();
            let inner = FsDescription::Points { points: pts, limit: None, complete };
            if dim < span + offset {
                return Err(Error::ArityMismatch { expected: span + offset, got: dim });
            }
            parts.push(FsDescription::Pullback {
                dim,
                offset,
                change: change.clone(),
                inner: Box::new(inner),
                singular: singular.clone(),
            });
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { FsDescription::Union { parts } })
    }
}

/// Per-trial outcome of [`verify_semiconjugacy`].
#[derive(Clone, Debug, PartialEq)]
pub struct Divergence {
    pub init: Vec<Scalar>,
    pub step: usize,
    pub expected: Option<Scalar>,
    pub found: Option<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct SemiconjugacyReport {
    pub passed: usize,
    /// Trials whose orbit met the singular locus of the change or of the
    /// invariant.
    pub skipped_singular: usize,
    /// Trials whose orbit crashed before the horizon.
    pub skipped_crash: usize,
    pub divergence: Option<Divergence>,
}

impl SemiconjugacyReport {
    pub fn ok(&self) -> bool {
        self.divergence.is_none() && self.passed > 0
    }
}

fn same(a: &Scalar, b: &Scalar) -> bool {
    if a.is_exact() && b.is_exact() {
        a == b
    } else {
        (a - b).abs_f64() <= 1e-9 * a.abs_f64().max(b.abs_f64()).max(1.0)
    }
}

enum Trial {
    Pass,
    Singular,
    Crash,
    Diverge(usize, Option<Scalar>, Option<Scalar>),
}

/// Checks the conjugacy identity on random exact orbits: `trials` passing
/// orbits of `horizon` reduced steps are requested, drawing at most ten
/// times as many initial vectors.
pub fn verify_semiconjugacy(
    de: &DifferenceEquation,
    result: &ReductionResult,
    trials: usize,
    horizon: usize,
    seed: u64,
) -> Result<SemiconjugacyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = de.order();
    let mut report = SemiconjugacyReport::default();
    for _ in 0..trials.saturating_mul(10) {
        if report.passed >= trials {
            break;
        }
        let init: Vec<Scalar> = (0..k).map(|_| random_nonzero(&mut rng, 9, 9)).collect();
        let outcome = match &result.via {
            Via::Change { change, reduced, .. } => check_change(de, change, reduced, &init, horizon)?,
            Via::Invariant { form } => check_invariant(de, form, &init, horizon)?,
        };
        match outcome {
            Trial::Pass => report.passed += 1,
            Trial::Singular => report.skipped_singular += 1,
            Trial::Crash => report.skipped_crash += 1,
            Trial::Diverge(step, expected, found) => {
                report.divergence = Some(Divergence { init, step, expected, found });
                break;
            }
        }
    }
    Ok(report)
}

fn orbit(de: &DifferenceEquation, init: &[Scalar], steps: usize) -> Result<Option<Vec<Scalar>>> {
    let opts = IterOptions { trace: true, detect_period: false, ..Default::default() };
    let out = iterate(de, init, steps, opts)?;
    Ok((!out.crashed()).then(|| out.trace.expect("trace requested")))
}

fn check_change(
    de: &DifferenceEquation,
    change: &ChangeOfVariables,
    reduced: &ReducedEquation,
    init: &[Scalar],
    horizon: usize,
) -> Result<Trial> {
    let k = de.order();
    let s = change.span();
    let r = reduced.order();
    let steps = (horizon + s + r).saturating_sub(k + 1).max(horizon);
    let Some(xs) = orbit(de, init, steps)? else {
        return Ok(Trial::Crash);
    };
    let mut zs = Vec::with_capacity(xs.len());
    for i in s - 1..xs.len() {
        match change.apply(&xs[i + 1 - s..=i]) {
            Some(z) => zs.push(z),
            None => return Ok(Trial::Singular),
        }
    }
    let map = reduced.to_map();
    let f = map.func();
    for (step, i) in (r - 1..zs.len() - 1).enumerate().take(horizon) {
        let expected = f.eval(&zs[i + 1 - r..=i]);
        let found = &zs[i + 1];
        if !expected.as_ref().is_some_and(|e| same(e, found)) {
            return Ok(Trial::Diverge(step + 1, expected, Some(found.clone())));
        }
    }
    Ok(Trial::Pass)
}

fn check_invariant(de: &DifferenceEquation, form: &InvariantForm, init: &[Scalar], horizon: usize) -> Result<Trial> {
    let Some(c) = invariant_constant(form, init) else {
        return Ok(Trial::Singular);
    };
    let Ok(reduced) = invariant_reduce(form, &c) else {
        return Ok(Trial::Singular);
    };
    let k = de.order();
    let Some(xs) = orbit(de, init, horizon)? else {
        return Ok(Trial::Crash);
    };
    let s = form.span();
    if (s - 1..xs.len() - 1).any(|i| form.degenerate(&xs[i + 1 - s..=i])) {
        return Ok(Trial::Singular);
    }
    for (step, i) in (s - 1..xs.len()).enumerate() {
        match form.value(&xs[i + 1 - s..=i]) {
            Some(v) if same(&v, &c) => {}
            Some(v) => return Ok(Trial::Diverge(step, Some(c), Some(v))),
            None => return Ok(Trial::Singular),
        }
    }
    let r = reduced.order();
    let f = reduced.map.func();
    for (step, i) in (k - 1..xs.len() - 1).enumerate() {
        let expected = f.eval(&xs[i + 1 - r..=i]);
        if !expected.as_ref().is_some_and(|e| same(e, &xs[i + 1])) {
            return Ok(Trial::Diverge(step + 1, expected, Some(xs[i + 1].clone())));
        }
    }
    Ok(Trial::Pass)
}

/// Equation satisfied by `y_n` when `x_n = T(y_n)` solves `de`.
pub fn mobius_transport(de: &DifferenceEquation, t: &Mobius) -> Result<DifferenceEquation> {
    let map = de.map.numeric()?;
    let k = map.order();
    let subs: Vec<RatFunc> = (0..k).map(|v| t.as_ratfunc(k, v)).collect();
    let inner = map.func().compose(&subs)?.value;
    let f = t.inverse().apply_ratfunc(&inner)?;
    Ok(DifferenceEquation::new(RationalMap::from_ratfunc(f), de.field, de.domain))
}

/// Forbidden set of the transported equation: the preimage of `fs` under
/// `T` together with the pole of `T`.
pub fn mobius_transport_fs(fs: FsDescription, t: &Mobius, dim: usize) -> FsDescription {
    pullback(fs, &ChangeOfVariables::MobiusPointwise { t: t.clone() }, dim)
}

/// Pullback combinator: preimage of a reduced description under `change`
/// on windows of dimension `dim`, with the change's singular locus.
pub fn pullback(inner: FsDescription, change: &ChangeOfVariables, dim: usize) -> FsDescription {
    let span = change.span();
    let singular = change.singular_locus().iter().map(|p| Form::from_poly(p, &default_names(span))).collect();
    FsDescription::Pullback { dim, offset: 0, change: change.clone(), inner: Box::new(inner), singular }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::definition::EquationDef;

    fn eq(order: usize, num: &str, den: &str) -> DifferenceEquation {
        EquationDef::new(order, num, den).to_equation().unwrap()
    }

    fn instance(name: &str, values: &[i64]) -> FamilyInstance {
        let vals: Vec<Scalar> = values.iter().map(|&v| Scalar::int(v)).collect();
        FamilyCatalog::builtin().get(name).unwrap().instantiate(&vals).unwrap()
    }

    #[test]
    fn semiconjugacy_holds_and_detects_corruption() {
        let inst = instance("product_pair_riccati_i0", &[1, 1]);
        let report = verify_semiconjugacy(&inst.equation, &inst.reduction, 20, 15, 7).unwrap();
        assert!(report.ok(), "{report:?}");
        let mut bad = inst.reduction.clone();
        if let Via::Change { reduced, .. } = &mut bad.via {
            *reduced = ReducedEquation::Riccati(RiccatiParams1::from_ints(0, 1, 1, 2).unwrap());
        }
        let report = verify_semiconjugacy(&inst.equation, &bad, 20, 15, 7).unwrap();
        assert_eq!(report.divergence.map(|d| d.step), Some(1));
    }

    #[test]
    fn invariant_semiconjugacy() {
        let inst = instance("reciprocal_product_invariant_lag3", &[2]);
        let report = verify_semiconjugacy(&inst.equation, &inst.reduction, 10, 12, 3).unwrap();
        assert!(report.ok(), "{report:?}");
    }

    #[test]
    fn mobius_transport_examples() {
        // x_n = 1/y_n turns squaring into squaring
        let recip = Mobius::new(Scalar::zero(), Scalar::one(), Scalar::one(), Scalar::zero()).unwrap();
        let t = mobius_transport(&eq(1, "x0^2", "1"), &recip).unwrap();
        assert_eq!(t.map.func(), eq(1, "x0^2", "1").map.func());
        // x_n = y_n + 1 turns doubling into y' = 2y + 1
        let shift = Mobius::affine(Scalar::one(), Scalar::one()).unwrap();
        let t = mobius_transport(&eq(1, "2*x0", "1"), &shift).unwrap();
        assert_eq!(t.map.func(), eq(1, "2*x0 + 1", "1").map.func());
        // round trip of a Pielou-type equation
        let de = eq(2, "3*x0", "1 + x1");
        let m = Mobius::new(Scalar::int(2), Scalar::one(), Scalar::one(), Scalar::int(3)).unwrap();
        let there = mobius_transport(&de, &m).unwrap();
        let back = mobius_transport(&there, &m.inverse()).unwrap();
        assert_eq!(back.map.func(), de.map.func());
    }

    fn check_samples(de: &DifferenceEquation, fs: &FsDescription, depth: usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let samples = fs.sample(3, depth, &mut rng).unwrap();
        assert!(!samples.is_empty());
        for s in samples {
            let out = iterate(de, &s.point, depth + 5, IterOptions::default()).unwrap();
            match s.depth {
                Some(d) => assert!(out.crash_step().is_some_and(|c| c <= d), "{:?} {:?}", s, out.kind),
                None => assert!(out.crashed()),
            }
        }
    }

    #[test]
    fn pullback_samples_crash_on_time() {
        let inst = instance("product_pair_riccati_i0", &[1, 1]);
        let fs = inst.reduction.closed_fs(2, 6).unwrap();
        check_samples(&inst.equation, &fs, 6);
        let inst = instance("product_pair_riccati_i1", &[1, 1]);
        let fs = inst.reduction.closed_fs(4, 7).unwrap();
        assert!(matches!(fs, FsDescription::Union { .. }));
        check_samples(&inst.equation, &fs, 7);
    }

    fn coverage(de: &DifferenceEquation, fs: &FsDescription, depth: usize) {
        let k = de.order();
        let vals: Vec<Scalar> = (-6..=6)
            .flat_map(|n| (1..=4).map(move |d| Scalar::ratio(n, d)))
            .filter(|v| !v.is_zero())
            .collect();
        let mut crashed = 0;
        let mut idx = vec![0usize; k];
        loop {
            let init: Vec<Scalar> = idx.iter().map(|&i| vals[i].clone()).collect();
            let out = iterate(de, &init, depth, IterOptions::default()).unwrap();
            if let Some(step) = out.crash_step() {
                crashed += 1;
                let hit = fs.contains(&init, 0.0).unwrap();
                assert!(hit.is_some(), "{init:?} crashes at {step} but is not listed");
                if let Some(d) = hit.unwrap().depth {
                    assert_eq!(d, step, "{init:?}");
                }
            }
            let mut j = 0;
            while j < k {
                idx[j] += 1;
                if idx[j] < vals.len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == k {
                break;
            }
        }
        assert!(crashed > 0);
    }

    #[test]
    fn closed_fs_covers_rational_grid() {
        let inst = instance("product_pair_riccati_i0", &[1, 1]);
        coverage(&inst.equation, &inst.reduction.closed_fs(2, 8).unwrap(), 8);
        let inst = instance("product_riccati_k1", &[1, 1, 1]);
        coverage(&inst.equation, &inst.reduction.closed_fs(2, 8).unwrap(), 8);
    }
}
