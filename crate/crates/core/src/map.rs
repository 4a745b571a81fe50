//! Rational maps, difference equations and pole-aware iteration.
//!
//! Points and windows are ordered oldest first: for an equation of order
//! `k` the window at step `n` is `(x_{n-k+1}, ..., x_n)` and the map sends it
//! to `x_{n+1}`. Variables past the first `k` are symbolic parameters.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::ratfunc::{Composition, RatFunc};
use crate::scalar::{Field, Scalar};
use crate::{Error, Result};

/// Default relative tolerance for float zero tests.
pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMap {
    f: RatFunc,
    order: usize,
    names: Vec<String>,
}

impl RationalMap {
    /// `names` lists every ring variable: the `order` window variables
    /// (oldest first) followed by symbolic parameters.
    pub fn new(f: RatFunc, order: usize, names: Vec<String>) -> Result<Self> {
        if order == 0 {
            return Err(Error::Invalid("order must be at least 1".into()));
        }
        if names.len() != f.nvars() || order > names.len() {
            return Err(Error::ArityMismatch { expected: f.nvars(), got: names.len() });
        }
        Ok(RationalMap { f, order, names })
    }

    /// Map in `order` window variables named `x_{n-k+1} .. x_n` style.
    pub fn from_ratfunc(f: RatFunc) -> Self {
        let k = f.nvars();
        let names = default_names(k);
        RationalMap { f, order: k, names }
    }

    pub fn func(&self) -> &RatFunc {
        &self.f
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn param_names(&self) -> &[String] {
        &self.names[self.order..]
    }

    pub fn nparams(&self) -> usize {
        self.names.len() - self.order
    }

    /// True when no symbolic parameter occurs.
    pub fn is_numeric(&self) -> bool {
        (self.order..self.names.len()).all(|v| !self.f.uses(v))
    }

    /// Substitutes values for the symbolic parameters (in declaration order).
    pub fn bind_params(&self, values: &[Scalar]) -> Result<RationalMap> {
        if values.len() != self.nparams() {
            return Err(Error::ArityMismatch { expected: self.nparams(), got: values.len() });
        }
        let k = self.order;
        let mut subs: Vec<RatFunc> = (0..k).map(|v| RatFunc::var(k, v)).collect();
        subs.extend(values.iter().map(|c| RatFunc::constant(k, c.clone())));
        let f = self.f.compose(&subs)?.value;
        Ok(RationalMap { f, order: k, names: self.names[..k].to_vec() })
    }

    /// Drops unused parameter variables so the ring has exactly `order`
    /// variables.
    pub fn numeric(&self) -> Result<RationalMap> {
        if !self.is_numeric() {
            let unbound: Vec<&str> = (self.order..self.names.len())
                .filter(|&v| self.f.uses(v))
                .map(|v| self.names[v].as_str())
                .collect();
            return Err(Error::UnboundSymbols(unbound.join(", ")));
        }
        if self.names.len() == self.order {
            return Ok(self.clone());
        }
        let k = self.order;
        let f = RatFunc::new(self.f.num().truncate_vars(k), self.f.den().truncate_vars(k))?;
        Ok(RationalMap { f, order: k, names: self.names[..k].to_vec() })
    }

    pub fn display(&self) -> String {
        self.f.display_with(&self.names).to_string()
    }
}

pub(crate) fn default_names(k: usize) -> Vec<String> {
    (0..k).map(|i| lag_name(k - 1 - i)).collect()
}

/// Text-format name of the value `lag` steps before the newest.
pub fn lag_name(lag: usize) -> String {
    format!("x{lag}")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainPolicy {
    /// Undefined only where a denominator vanishes.
    Natural,
    /// A denominator with modulus below `eps` counts as leaving the domain.
    EpsilonBall { eps: f64 },
    /// Values must be strictly positive reals.
    PositiveOrthant,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DifferenceEquation {
    pub map: RationalMap,
    pub field: Field,
    pub domain: DomainPolicy,
}

impl DifferenceEquation {
    pub fn new(map: RationalMap, field: Field, domain: DomainPolicy) -> Self {
        DifferenceEquation { map, field, domain }
    }

    /// Real equation on the natural domain.
    pub fn natural(map: RationalMap) -> Self {
        DifferenceEquation { map, field: Field::Real, domain: DomainPolicy::Natural }
    }

    pub fn order(&self) -> usize {
        self.map.order()
    }

    /// Whether a value belongs to the admissible set `A`.
    pub fn admissible(&self, v: &Scalar) -> bool {
        match self.domain {
            DomainPolicy::PositiveOrthant => match v {
                Scalar::Rational(r) => r > &crate::Q::from_integer(0.into()),
                Scalar::Float(x) => *x > 0.0,
                _ => false,
            },
            _ => self.field == Field::Complex || v.is_real(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Eval {
    Value(Scalar),
    PoleHit,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrashReason {
    PoleHit,
    Indeterminate,
    LeftDomain,
}

fn is_zero_tol(v: &Scalar, scale: f64, tol: f64) -> bool {
    if v.is_exact() {
        v.is_zero()
    } else {
        v.abs_f64() <= tol * scale
    }
}

/// Evaluates a numeric map at a window (oldest first).
pub fn evaluate(map: &RationalMap, point: &[Scalar], tol: f64) -> Result<Eval> {
    if point.len() != map.order() {
        return Err(Error::ArityMismatch { expected: map.order(), got: point.len() });
    }
    if map.f.nvars() != map.order() {
        let m = map.numeric()?;
        return evaluate(&m, point, tol);
    }
    let (n, ns, d, ds) = map.f.eval_parts(point);
    Ok(classify_value(n, ns, d, ds, tol))
}

fn classify_value(n: Scalar, ns: f64, d: Scalar, ds: f64, tol: f64) -> Eval {
    if is_zero_tol(&d, ds, tol) {
        if is_zero_tol(&n, ns, tol) {
            Eval::Indeterminate
        } else {
            Eval::PoleHit
        }
    } else {
        Eval::Value(&n / &d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterOptions {
    pub tol: f64,
    pub trace: bool,
    pub detect_period: bool,
}

impl Default for IterOptions {
    fn default() -> Self {
        IterOptions { tol: DEFAULT_TOL, trace: false, detect_period: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OutcomeKind {
    /// The value `x_{step+1}` could not be computed or left the domain.
    Crash { step: usize, reason: CrashReason },
    Survived { horizon: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Period {
    pub period: usize,
    pub preperiod: usize,
    /// False for float orbits, where the period is only a candidate.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitOutcome {
    pub kind: OutcomeKind,
    /// Orbit values starting with the initial window, when requested.
    pub trace: Option<Vec<Scalar>>,
    pub period: Option<Period>,
}

impl OrbitOutcome {
    pub fn crashed(&self) -> bool {
        matches!(self.kind, OutcomeKind::Crash { .. })
    }

    pub fn crash_step(&self) -> Option<usize> {
        match self.kind {
            OutcomeKind::Crash { step, .. } => Some(step),
            OutcomeKind::Survived { .. } => None,
        }
    }

    /// Number of map applications attempted up to and including the failing
    /// one.
    pub fn applications(&self) -> Option<usize> {
        self.crash_step().map(|s| s + 1)
    }
}

/// Iterates from `init` (oldest first) for at most `horizon` applications.
pub fn iterate(
    de: &DifferenceEquation,
    init: &[Scalar],
    horizon: usize,
    opts: IterOptions,
) -> Result<OrbitOutcome> {
    let k = de.order();
    if init.len() != k {
        return Err(Error::ArityMismatch { expected: k, got: init.len() });
    }
    if let Some(bad) = init.iter().find(|v| !de.admissible(v)) {
        return Err(Error::NotAdmissible(format!("initial value {bad} is outside the domain")));
    }
    let map = if de.map.f.nvars() == k { de.map.clone() } else { de.map.numeric()? };
    let mut window: Vec<Scalar> = init.to_vec();
    let mut trace = opts.trace.then(|| init.to_vec());
    let exact = init.iter().all(Scalar::is_exact) && map.f.is_exact();
    let mut seen: HashMap<Vec<Scalar>, usize> = HashMap::new();
    let mut float_hist: Vec<Vec<Scalar>> = Vec::new();
    if opts.detect_period && exact {
        seen.insert(window.clone(), 0);
    }
    let crash = |step, reason, trace| OrbitOutcome {
        kind: OutcomeKind::Crash { step, reason },
        trace,
        period: None,
    };
    for step in 0..horizon {
        let (n, ns, d, ds) = map.f.eval_parts(&window);
        if let DomainPolicy::EpsilonBall { eps } = de.domain {
            if d.abs_f64() < eps {
                return Ok(crash(step, CrashReason::LeftDomain, trace));
            }
        }
        let next = match classify_value(n, ns, d, ds, opts.tol) {
            Eval::Value(v) => v,
            Eval::PoleHit => return Ok(crash(step, CrashReason::PoleHit, trace)),
            Eval::Indeterminate => return Ok(crash(step, CrashReason::Indeterminate, trace)),
        };
        if !de.admissible(&next) {
            return Ok(crash(step, CrashReason::LeftDomain, trace));
        }
        if let Some(t) = trace.as_mut() {
            t.push(next.clone());
        }
        window.remove(0);
        window.push(next);
        if opts.detect_period {
            if exact {
                if let Some(&first) = seen.get(&window) {
                    return Ok(OrbitOutcome {
                        kind: OutcomeKind::Survived { horizon },
                        trace,
                        period: Some(Period { period: step + 1 - first, preperiod: first, exact: true }),
                    });
                }
                seen.insert(window.clone(), step + 1);
            } else {
                float_hist.push(window.clone());
            }
        }
    }
    let period = if opts.detect_period && !exact { float_period(&float_hist, opts.tol) } else { None };
    Ok(OrbitOutcome { kind: OutcomeKind::Survived { horizon }, trace, period })
}

/// Smallest `p` with the last window matching the one `p` steps earlier.
fn float_period(hist: &[Vec<Scalar>], tol: f64) -> Option<Period> {
    let last = hist.last()?;
    let close = |a: &[Scalar], b: &[Scalar]| {
        a.iter().zip(b).all(|(x, y)| {
            let d = (x.to_c64() - y.to_c64()).norm();
            d <= tol.sqrt() * (1.0 + x.abs_f64().max(y.abs_f64()))
        })
    };
    let n = hist.len();
    (1..n.min(64)).find(|&p| close(last, &hist[n - 1 - p])).map(|p| Period {
        period: p,
        preperiod: 0,
        exact: false,
    })
}

/// Vector self-map whose orbit is the sliding window of the scalar orbit.
#[derive(Clone, Debug, PartialEq)]
pub struct Unfolding {
    /// Component `i` gives the `i`-th coordinate of the image.
    pub components: Vec<RatFunc>,
}

pub fn unfold(de: &DifferenceEquation) -> Unfolding {
    let k = de.order();
    let nv = de.map.f.nvars();
    let mut components: Vec<RatFunc> = (1..k).map(|i| RatFunc::var(nv, i)).collect();
    components.push(de.map.f.clone());
    Unfolding { components }
}

impl Unfolding {
    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// Image of a point; an error variant reports where it is undefined.
    pub fn apply(&self, point: &[Scalar], tol: f64) -> Result<std::result::Result<Vec<Scalar>, CrashReason>> {
        let k = self.dim();
        if point.len() != k {
            return Err(Error::ArityMismatch { expected: k, got: point.len() });
        }
        let last = self.components.last().unwrap();
        if last.nvars() != k {
            return Err(Error::UnboundSymbols("unfolding has symbolic parameters".into()));
        }
        let (n, ns, d, ds) = last.eval_parts(point);
        Ok(match classify_value(n, ns, d, ds, tol) {
            Eval::Value(v) => {
                let mut out = point[1..].to_vec();
                out.push(v);
                Ok(out)
            }
            Eval::PoleHit => Err(CrashReason::PoleHit),
            Eval::Indeterminate => Err(CrashReason::Indeterminate),
        })
    }
}

/// Symbolic orbit of the generic window.
#[derive(Clone, Debug)]
pub struct SymbolicOrbit {
    /// `values[j]` is `x_{j-k+1}` as a function of the initial window; the
    /// first `k` entries are the window variables themselves.
    pub values: Vec<RatFunc>,
    /// `crash_polys[i]` is the cleared denominator met when computing
    /// `x_{i+1}`.
    pub crash_polys: Vec<crate::poly::Poly>,
    pub order: usize,
}

impl SymbolicOrbit {
    /// Components of `F^i` (oldest first), `1 <= i <= steps`.
    pub fn power(&self, i: usize) -> &[RatFunc] {
        &self.values[i..i + self.order]
    }
}

/// Computes `F, F^2, ..., F^n` symbolically. Fails with [`Error::Budget`]
/// when a component exceeds `term_budget` terms.
pub fn iterate_unfolding_symbolic(de: &DifferenceEquation, n: usize, term_budget: usize) -> Result<SymbolicOrbit> {
    if n == 0 {
        return Err(Error::Invalid("number of iterates must be at least 1".into()));
    }
    let f = de.map.func();
    let nv = f.nvars();
    let k = de.order();
    let mut values: Vec<RatFunc> = (0..k).map(|v| RatFunc::var(nv, v)).collect();
    let params: Vec<RatFunc> = (k..nv).map(|v| RatFunc::var(nv, v)).collect();
    let mut crash_polys = Vec::with_capacity(n);
    for step in 0..n {
        let mut subs: Vec<RatFunc> = values[values.len() - k..].to_vec();
        subs.extend(params.iter().cloned());
        let Composition { value, crash_poly } = f.compose(&subs)?;
        if value.nterms() > term_budget {
            return Err(Error::Budget(format!(
                "iterate {} has {} terms (budget {term_budget})",
                step + 1,
                value.nterms()
            )));
        }
        values.push(value);
        crash_polys.push(crash_poly);
    }
    Ok(SymbolicOrbit { values, crash_polys, order: k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_ratfunc, Symbol};

    fn map1(text: &str) -> RationalMap {
        let resolve = |s: &str| (s == "x0").then_some(Symbol::Var(0));
        RationalMap::from_ratfunc(parse_ratfunc(text, 1, &resolve, 1, 1).unwrap())
    }

    #[test]
    fn reciprocal_orbit_is_two_periodic() {
        let de = DifferenceEquation::natural(map1("1/x0"));
        let out = iterate(&de, &[Scalar::int(2)], 10, IterOptions::default()).unwrap();
        assert_eq!(out.kind, OutcomeKind::Survived { horizon: 10 });
        assert_eq!(out.period.unwrap().period, 2);
        let out = iterate(&de, &[Scalar::zero()], 10, IterOptions::default()).unwrap();
        assert_eq!(out.kind, OutcomeKind::Crash { step: 0, reason: CrashReason::PoleHit });
    }

    #[test]
    fn riccati_crash_step() {
        let de = DifferenceEquation::natural(map1("x0/(1+x0)"));
        let out = iterate(&de, &[Scalar::ratio(-1, 3)], 10, IterOptions::default()).unwrap();
        assert_eq!(out.crash_step(), Some(2));
    }

    #[test]
    fn evaluate_reports_poles() {
        let m = map1("1/(x0^2-1)");
        assert_eq!(evaluate(&m, &[Scalar::int(3)], DEFAULT_TOL).unwrap(), Eval::Value(Scalar::ratio(1, 8)));
        assert_eq!(evaluate(&m, &[Scalar::int(1)], DEFAULT_TOL).unwrap(), Eval::PoleHit);
        let m = map1("x0/x0^2");
        assert_eq!(evaluate(&m, &[Scalar::float(1e-20)], DEFAULT_TOL).unwrap(), Eval::Value(Scalar::float(1e20)));
        assert!(evaluate(&m, &[Scalar::int(1), Scalar::int(2)], DEFAULT_TOL).is_err());
    }

    #[test]
    fn float_pole_tolerance() {
        let m = map1("1/(1+x0)");
        assert_eq!(evaluate(&m, &[Scalar::float(-1.0 + 1e-15)], DEFAULT_TOL).unwrap(), Eval::PoleHit);
        assert!(matches!(evaluate(&m, &[Scalar::float(-1.0 + 1e-6)], DEFAULT_TOL).unwrap(), Eval::Value(_)));
    }

    #[test]
    fn epsilon_ball_policy() {
        let de = DifferenceEquation::new(map1("1/x0"), Field::Real, DomainPolicy::EpsilonBall { eps: 1e-3 });
        let out = iterate(&de, &[Scalar::float(1e-4)], 5, IterOptions::default()).unwrap();
        assert_eq!(out.kind, OutcomeKind::Crash { step: 0, reason: CrashReason::LeftDomain });
    }

    #[test]
    fn positive_orthant_policy() {
        let de = DifferenceEquation::new(map1("x0 - 1"), Field::Real, DomainPolicy::PositiveOrthant);
        let out = iterate(&de, &[Scalar::ratio(5, 2)], 5, IterOptions::default()).unwrap();
        assert_eq!(out.kind, OutcomeKind::Crash { step: 2, reason: CrashReason::LeftDomain });
        assert!(iterate(&de, &[Scalar::int(-1)], 5, IterOptions::default()).is_err());
    }
}
