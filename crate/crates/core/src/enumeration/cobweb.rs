//! Backward orbits of the pole for scalar monotone maps with a pole at 0.

use serde::{Deserialize, Serialize};

use crate::map::DifferenceEquation;
use crate::rootfind::{bisect_secant, MAX_ITER, ROOT_TOL};
use crate::{Error, Result};

use super::fastmap::{FastMap, FloatStep};

/// `phi` in `f(x) = a/phi(x) + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Phi {
    /// `sign(x) |x|^(num/den)`, both odd.
    OddPower { num: i64, den: i64 },
    Sinh,
}

impl Phi {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Phi::OddPower { num, den } => x.signum() * x.abs().powf(num as f64 / den as f64),
            Phi::Sinh => x.sinh(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum PoleMap {
    /// Numeric order-1 rational map.
    Rational(FastMap),
    Family { a: f64, phi: Phi },
}

impl PoleMap {
    pub fn from_equation(de: &DifferenceEquation) -> Result<Self> {
        if de.order() != 1 {
            return Err(Error::NotApplicable("cobweb needs an order-1 map".into()));
        }
        Ok(PoleMap::Rational(FastMap::new(&de.map)?))
    }

    pub fn family(a: f64, phi: Phi) -> Result<Self> {
        if let Phi::OddPower { num, den } = phi {
            if num % 2 == 0 || den % 2 == 0 || den == 0 {
                return Err(Error::Invalid(format!("{num}/{den} is not an odd rational")));
            }
        }
        if a == 0.0 {
            return Err(Error::Invalid("a must be nonzero".into()));
        }
        Ok(PoleMap::Family { a, phi })
    }

    /// NaN where undefined.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            PoleMap::Rational(fm) => match fm.step_r(&[x], 1e-300) {
                FloatStep::Value(v) => v,
                FloatStep::Crash => f64::NAN,
            },
            PoleMap::Family { a, phi } => {
                let d = phi.eval(x);
                if d == 0.0 {
                    f64::NAN
                } else {
                    a / d + 1.0
                }
            }
        }
    }
}

/// Outcome of the (A1)-(A4) checks on samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomChecks {
    pub continuous: bool,
    pub injective: bool,
    pub zero_in_range: bool,
    pub pole_blowup: bool,
}

impl AxiomChecks {
    pub fn all(&self) -> bool {
        self.continuous && self.injective && self.zero_in_range && self.pole_blowup
    }
}

#[derive(Clone, Debug)]
pub struct MonotonePoleMap {
    pub map: PoleMap,
    pub checks: AxiomChecks,
    pub increasing: bool,
    /// Fixed points found by sign changes of `f(x) - x` on the samples.
    pub fixed_points: Vec<f64>,
    /// Sample abscissae on each side, increasing in modulus.
    left: Vec<f64>,
    right: Vec<f64>,
}

fn side_samples(sign: f64) -> Vec<f64> {
    // 1e-12 .. 1e12, 32 points per decade
    (-12 * 32..=12 * 32).map(|k| sign * 10f64.powf(k as f64 / 32.0)).collect()
}

impl MonotonePoleMap {
    pub fn new(map: PoleMap) -> Self {
        let left = side_samples(-1.0);
        let right = side_samples(1.0);
        let fl: Vec<f64> = left.iter().map(|&x| map.eval(x)).collect();
        let fr: Vec<f64> = right.iter().map(|&x| map.eval(x)).collect();
        let continuous = fl.iter().chain(&fr).all(|v| v.is_finite())
            && match &map {
                PoleMap::Rational(fm) => {
                    // the denominator may only change sign at 0
                    let sl: Vec<f64> = left.iter().map(|&x| fm.den_r(&[x]).0.signum()).collect();
                    let sr: Vec<f64> = right.iter().map(|&x| fm.den_r(&[x]).0.signum()).collect();
                    sl.windows(2).all(|w| w[0] == w[1]) && sr.windows(2).all(|w| w[0] == w[1])
                }
                PoleMap::Family { .. } => true,
            };
        // along increasing x: left samples run from -1e12 up to -1e-12
        let ascending_l: Vec<f64> = fl.iter().rev().cloned().collect();
        // far from the pole values saturate in floats: ties and rounding
        // noise are allowed
        let slack = |a: f64| 1e-12 * a.abs().max(1.0);
        let inc = |v: &[f64]| v.windows(2).all(|w| w[1] >= w[0] - slack(w[0])) && v[v.len() - 1] > v[0];
        let dec = |v: &[f64]| v.windows(2).all(|w| w[1] <= w[0] + slack(w[0])) && v[v.len() - 1] < v[0];
        let increasing = inc(&ascending_l) && inc(&fr);
        let decreasing = dec(&ascending_l) && dec(&fr);
        let (lmin, lmax) = min_max(&fl);
        let (rmin, rmax) = min_max(&fr);
        let disjoint = if increasing { rmax <= lmin + slack(lmin) } else { lmax <= rmin + slack(rmin) };
        let injective = (increasing || decreasing) && disjoint;
        let near = |i: usize, v: &[f64]| v[i].abs();
        let pole_blowup = near(0, &fl) > 1e6
            && near(0, &fr) > 1e6
            && near(0, &fl) > near(32, &fl)
            && near(0, &fr) > near(32, &fr);
        let mut m = MonotonePoleMap {
            map,
            checks: AxiomChecks { continuous, injective, zero_in_range: false, pole_blowup },
            increasing,
            fixed_points: Vec::new(),
            left,
            right,
        };
        m.checks.zero_in_range = m.inverse(0.0).is_some();
        m.fixed_points = m.find_fixed_points();
        m
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.map.eval(x)
    }

    /// The unique `x` with `f(x) = y`, if `y` is in the range.
    pub fn inverse(&self, y: f64) -> Option<f64> {
        for side in [&self.left, &self.right] {
            let g = |x: f64| self.map.eval(x) - y;
            for w in side.windows(2) {
                let (a, b) = (g(w[0]), g(w[1]));
                if a == 0.0 {
                    return Some(w[0]);
                }
                if a.is_finite() && b.is_finite() && a.signum() != b.signum() {
                    return bisect_secant(g, w[0], w[1], ROOT_TOL * 1e-3, MAX_ITER).ok();
                }
            }
        }
        None
    }

    fn find_fixed_points(&self) -> Vec<f64> {
        let g = |x: f64| self.map.eval(x) - x;
        let mut out = Vec::new();
        for side in [&self.left, &self.right] {
            for w in side.windows(2) {
                let (a, b) = (g(w[0]), g(w[1]));
                if a.is_finite() && b.is_finite() && a.signum() != b.signum() {
                    if let Ok(x) = bisect_secant(g, w[0], w[1], ROOT_TOL * 1e-3, MAX_ITER) {
                        out.push(x);
                    }
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CobwebClass {
    /// Decreasing map, alternating approach to the fixed point.
    DecreasingToFixed { limit: f64, residual: f64 },
    DecreasingToTwoCycle { cycle: [f64; 2], residual: f64 },
    /// Decreasing map whose orbit did not settle within the iterates.
    DecreasingUnsettled,
    /// Increasing map, `inf P > f^-1(0)`: increasing towards `inf P`.
    IncreasingFromBelow { limit: f64, residual: f64, monotone: bool },
    /// Increasing map, `sup P < f^-1(0)`: decreasing towards `sup P`.
    IncreasingFromAbove { limit: f64, residual: f64, monotone: bool },
    Unclassified { diagnostics: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CobwebFs {
    /// `f^-1(0), f^-2(0), ...`
    pub points: Vec<f64>,
    /// Set when some `f^-n(0)` has no preimage.
    pub terminated: bool,
    pub class: CobwebClass,
    /// For decreasing maps: every point lies in `[f^-1(0), f^-2(0)]`.
    pub interval_ok: Option<bool>,
}

/// Backward orbit of the pole with the convergence classification.
pub fn cobweb_fs(m: &MonotonePoleMap, n: usize) -> Result<CobwebFs> {
    if !m.checks.all() {
        return Err(Error::NotAdmissible(format!("not a verified monotone map with pole: {:?}", m.checks)));
    }
    let mut points = Vec::with_capacity(n);
    let mut y = 0.0;
    let mut terminated = false;
    for _ in 0..n {
        match m.inverse(y) {
            Some(x) => {
                points.push(x);
                y = x;
            }
            None => {
                terminated = true;
                break;
            }
        }
    }
    if points.is_empty() {
        return Err(Error::RootFinding("the pole has no preimage".into()));
    }
    let f = |x: f64| m.eval(x);
    let first = points[0];
    let tol = 1e-9;
    let mut interval_ok = None;
    let class = if !m.increasing {
        let (lo, hi) = match points.get(1) {
            Some(&second) => (first.min(second), first.max(second)),
            None => (first, first),
        };
        interval_ok = Some(points.iter().all(|&x| x >= lo - tol && x <= hi + tol));
        let len = points.len();
        if len >= 3 && (points[len - 1] - points[len - 2]).abs() < tol {
            let limit = points[len - 1];
            CobwebClass::DecreasingToFixed { limit, residual: (f(limit) - limit).abs() }
        } else if len >= 3 && (points[len - 1] - points[len - 3]).abs() < tol {
            let cycle = [points[len - 2], points[len - 1]];
            CobwebClass::DecreasingToTwoCycle { cycle, residual: (f(f(cycle[0])) - cycle[0]).abs() }
        } else {
            CobwebClass::DecreasingUnsettled
        }
    } else if m.fixed_points.is_empty() {
        let (lo, hi) = min_max(&points);
        let mut diagnostics = vec![
            "increasing map without fixed points".to_string(),
            format!("{} backward iterates in [{lo}, {hi}]", points.len()),
        ];
        if terminated {
            diagnostics.push("backward orbit left the range of f".into());
        }
        CobwebClass::Unclassified { diagnostics }
    } else {
        let inf = m.fixed_points[0];
        let sup = *m.fixed_points.last().unwrap();
        let limit_of = |target: f64| {
            let last = *points.last().unwrap();
            (last, (f(last) - last).abs(), (last - target).abs())
        };
        if inf > first {
            let (limit, residual, _) = limit_of(inf);
            let monotone = points.windows(2).all(|w| w[1] >= w[0]) && points.iter().all(|&x| x < inf + tol);
            CobwebClass::IncreasingFromBelow { limit, residual, monotone }
        } else if sup < first {
            let (limit, residual, _) = limit_of(sup);
            let monotone = points.windows(2).all(|w| w[1] <= w[0]) && points.iter().all(|&x| x > sup - tol);
            CobwebClass::IncreasingFromAbove { limit, residual, monotone }
        } else {
            CobwebClass::Unclassified { diagnostics: vec![format!("f^-1(0) = {first} lies between fixed points {inf} and {sup}")] }
        }
    };
    Ok(CobwebFs { points, terminated, class, interval_ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::definition::EquationDef;

    #[test]
    fn reciprocal_plus_one_alternates() {
        let de = EquationDef::new(1, "1 + x0", "x0").to_equation().unwrap();
        let m = MonotonePoleMap::new(PoleMap::from_equation(&de).unwrap());
        assert!(m.checks.all() && !m.increasing, "{:?}", m.checks);
        let fs = cobweb_fs(&m, 100).unwrap();
        assert!((fs.points[0] + 1.0).abs() < 1e-12 && (fs.points[1] + 0.5).abs() < 1e-12);
        assert_eq!(fs.interval_ok, Some(true));
        let g = (1.0 - 5f64.sqrt()) / 2.0;
        for w in fs.points.windows(2).take_while(|w| (w[1] - g).abs() > 1e-12) {
            assert!((w[0] - g) * (w[1] - g) < 0.0);
        }
        let CobwebClass::DecreasingToFixed { limit, residual } = fs.class else { panic!("{:?}", fs.class) };
        assert!((limit - g).abs() < 1e-8 && residual < 1e-8);
    }

    #[test]
    fn odd_power_family_matches_closed_inverse() {
        let m = MonotonePoleMap::new(PoleMap::family(-0.5, Phi::OddPower { num: 5, den: 3 }).unwrap());
        assert!(m.checks.all() && m.increasing && m.fixed_points.is_empty());
        for y in [0.0, -3.0, 0.9, 4.0] {
            let t: f64 = 1.0 / (2.0 * (1.0 - y));
            let exact = t.signum() * t.abs().powf(3.0 / 5.0);
            assert!((m.inverse(y).unwrap() - exact).abs() < 1e-10 * exact.abs().max(1.0));
        }
        let fs = cobweb_fs(&m, 250).unwrap();
        assert_eq!(fs.points.len(), 250);
        assert!(matches!(fs.class, CobwebClass::Unclassified { .. }));
    }

    #[test]
    fn sinh_is_accepted() {
        let m = MonotonePoleMap::new(PoleMap::family(1.0, Phi::Sinh).unwrap());
        assert!(m.checks.all() && !m.increasing);
        let fs = cobweb_fs(&m, 50).unwrap();
        assert_eq!(fs.interval_ok, Some(true));
    }

    #[test]
    fn increasing_with_fixed_point_above() {
        // f(x) = 2 - 1/x: fixed point 1, f^-1(0) = 1/2
        let de = EquationDef::new(1, "2*x0 - 1", "x0").to_equation().unwrap();
        let m = MonotonePoleMap::new(PoleMap::from_equation(&de).unwrap());
        assert!(m.checks.all() && m.increasing);
        let fs = cobweb_fs(&m, 200).unwrap();
        let CobwebClass::IncreasingFromBelow { monotone, .. } = fs.class else { panic!("{:?}", fs.class) };
        assert!(monotone);
    }

    #[test]
    fn non_monotone_is_refused() {
        let de = EquationDef::new(1, "1", "x0^2").to_equation().unwrap();
        let m = MonotonePoleMap::new(PoleMap::from_equation(&de).unwrap());
        assert!(!m.checks.injective);
        assert!(cobweb_fs(&m, 10).is_err());
    }
}
