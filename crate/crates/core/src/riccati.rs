//! Riccati difference equations of order 1, 2 and k.
//!
//! Order 1 is `x' = (a + b x)/(c + d x)`. A proper equation is affinely
//! conjugate to `y' = 1 - R/y`, and `y_n = z_n/z_{n-1}` linearises it to
//! `z_{n+1} = z_n - R z_{n-1}`. Higher orders `x' = a_0 + a_1/x_n + ... +
//! a_k/(x_n ... x_{n-k+1})` linearise through `x_n = y_n/y_{n-1}`; their
//! forbidden sets are the zero sets of the linear solutions, written as
//! linear forms in monomials of the initial data.

use serde::{Deserialize, Serialize};

use crate::cyclo::cyclotomic_poly;
use crate::fsdesc::{Form, FsDescription, FsLayer, FsPoint};
use crate::map::{DifferenceEquation, RationalMap};
use crate::mobius::Mobius;
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::scalar::Scalar;
use crate::upoly::UPoly;
use crate::{Error, Result, Q};

/// Default bound on the root-of-unity order search.
pub const DEFAULT_UNITY_BOUND: u32 = 120;

/// Coefficients of `x' = (a + b x)/(c + d x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiccatiParams1 {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
    pub d: Scalar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RiccatiClass {
    Linear,
    Constant,
    Period2,
    Proper,
}

impl RiccatiParams1 {
    pub fn new(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Result<Self> {
        if c.is_zero() && d.is_zero() {
            return Err(Error::Invalid("c and d cannot both vanish".into()));
        }
        Ok(RiccatiParams1 { a, b, c, d })
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        RiccatiParams1::new(Scalar::int(a), Scalar::int(b), Scalar::int(c), Scalar::int(d))
    }

    /// Parameters of the normal form `y' = 1 - R/y = (y - R)/y`.
    pub fn normal(r: Scalar) -> Self {
        RiccatiParams1 { a: -r, b: Scalar::one(), c: Scalar::zero(), d: Scalar::one() }
    }

    /// `x -> (b x + a)/(d x + c)`; `None` in the constant case.
    pub fn mobius(&self) -> Option<Mobius> {
        Mobius::new(self.b.clone(), self.a.clone(), self.d.clone(), self.c.clone()).ok()
    }

    pub fn equation(&self) -> DifferenceEquation {
        let x = RatFunc::var(1, 0);
        let num = x.scale(&self.b).add(&RatFunc::constant(1, self.a.clone()));
        let den = x.scale(&self.d).add(&RatFunc::constant(1, self.c.clone()));
        let f = num.div(&den).expect("c and d do not both vanish");
        DifferenceEquation::natural(RationalMap::from_ratfunc(f))
    }

    /// Coefficients of a numeric order-1 map of degree at most one over one.
    pub fn from_map(map: &RationalMap) -> Option<Self> {
        let m = map.numeric().ok()?;
        if m.order() != 1 {
            return None;
        }
        let f = m.func();
        let lin = |p: &Poly| (p.degree_in(0) <= 1).then(|| (p.coeff(&[0]), p.coeff(&[1])));
        let (a, b) = lin(f.num())?;
        let (c, d) = lin(f.den())?;
        RiccatiParams1::new(a, b, c, d).ok()
    }

    /// Pole `-c/d` when `d != 0`.
    pub fn pole(&self) -> Option<Scalar> {
        (!self.d.is_zero()).then(|| &(-&self.c) / &self.d)
    }
}

/// Degenerate predicates are tested in the order linear, constant, period 2.
pub fn classify_riccati1(p: &RiccatiParams1) -> Result<RiccatiClass> {
    if p.c.is_zero() && p.d.is_zero() {
        return Err(Error::Invalid("c and d cannot both vanish".into()));
    }
    Ok(if p.d.is_zero() {
        RiccatiClass::Linear
    } else if (&(&p.a * &p.d) - &(&p.c * &p.b)).is_zero() {
        RiccatiClass::Constant
    } else if (&p.b + &p.c).is_zero() {
        RiccatiClass::Period2
    } else {
        RiccatiClass::Proper
    })
}

/// `R = (bc - ad)/(b + c)^2`.
pub fn riccati_number(p: &RiccatiParams1) -> Result<Scalar> {
    let s = &p.b + &p.c;
    if s.is_zero() {
        return Err(Error::NotApplicable("b + c = 0: the Riccati number is undefined".into()));
    }
    Ok(&(&(&p.b * &p.c) - &(&p.a * &p.d)) / &(&s * &s))
}

/// Normal form data: `y = scale * x + shift` carries the equation to
/// `y' = 1 - r/y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalForm {
    pub r: Scalar,
    pub scale: Scalar,
    pub shift: Scalar,
}

impl NormalForm {
    pub fn to_normal(&self, x: &Scalar) -> Scalar {
        &(&self.scale * x) + &self.shift
    }

    pub fn from_normal(&self, y: &Scalar) -> Scalar {
        &(y - &self.shift) / &self.scale
    }

    pub fn change(&self) -> Mobius {
        Mobius::affine(self.scale.clone(), self.shift.clone()).expect("nonzero scale")
    }
}

pub fn riccati_normal_form(p: &RiccatiParams1) -> Result<NormalForm> {
    let class = classify_riccati1(p)?;
    if class != RiccatiClass::Proper {
        return Err(Error::NotApplicable(format!("normal form needs a proper equation, got {class:?}")));
    }
    let s = &p.b + &p.c;
    Ok(NormalForm {
        r: riccati_number(p)?,
        scale: &p.d / &s,
        shift: &p.c / &s,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FsStop {
    /// The requested number of points was produced.
    Depth,
    /// The last point has no preimage: the forbidden set is finite.
    NoPreimage,
    /// The backward orbit returned to an earlier point.
    Revisit,
    /// No pole: the forbidden set is empty.
    Empty,
    /// Constant map whose value is the pole: every point is forbidden.
    Everything,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Order1Fs {
    /// Points in generation order; point `i` crashes after `i + 1`
    /// applications.
    pub points: Vec<Scalar>,
    pub stop: FsStop,
}

impl Order1Fs {
    pub fn is_finite(&self) -> bool {
        !matches!(self.stop, FsStop::Depth | FsStop::Everything)
    }

    /// Points tagged with their crash step.
    pub fn description(&self) -> FsDescription {
        match self.stop {
            FsStop::Empty => FsDescription::Empty,
            FsStop::Everything => FsDescription::Everything,
            _ => FsDescription::Points {
                points: self
                    .points
                    .iter()
                    .enumerate()
                    .map(|(i, x)| FsPoint { point: vec![x.clone()], depth: Some(i) })
                    .collect(),
                limit: None,
                complete: self.is_finite(),
            },
        }
    }
}

/// First `n` forbidden points: the backward orbit of the pole `-c/d`.
pub fn riccati_fs_order1(p: &RiccatiParams1, n: usize) -> Result<Order1Fs> {
    let class = classify_riccati1(p)?;
    let Some(pole) = p.pole() else {
        return Ok(Order1Fs { points: Vec::new(), stop: FsStop::Empty });
    };
    if class == RiccatiClass::Constant {
        let value = &p.b / &p.d;
        let stop = if value == pole { FsStop::Everything } else { FsStop::NoPreimage };
        return Ok(Order1Fs { points: vec![pole], stop });
    }
    let inv = p.mobius().expect("non-constant equation is invertible").inverse();
    let mut points = Vec::with_capacity(n);
    let mut seen = std::collections::HashSet::new();
    let mut cur = pole;
    while points.len() < n {
        if !seen.insert(cur.clone()) {
            return Ok(Order1Fs { points, stop: FsStop::Revisit });
        }
        points.push(cur.clone());
        if points.len() == n {
            break;
        }
        match inv.apply(&cur) {
            Some(prev) => cur = prev,
            None => return Ok(Order1Fs { points, stop: FsStop::NoPreimage }),
        }
    }
    Ok(Order1Fs { points, stop: FsStop::Depth })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FsTopology {
    FiniteGloballyPeriodic { period: u32 },
    /// Limit of the backward orbit of the pole in normal-form coordinates.
    ConvergentSequence { limit: Scalar },
    DenseCandidate,
    Unresolved { bound: u32 },
}

/// Topology of the forbidden set of `y' = 1 - R/y`.
pub fn riccati_fs_topology(r: &Scalar, bound: u32) -> FsTopology {
    let Some(rq) = r.as_rational() else {
        return FsTopology::Unresolved { bound };
    };
    let one = Q::from_integer(1.into());
    let four = Q::from_integer(4.into());
    let disc = &one - &four * rq;
    if disc >= Q::from_integer(0.into()) {
        // roots of t^2 - t + R; the smaller in modulus attracts backward orbits
        let limit = match sqrt_rational(&disc) {
            Some(s) => Scalar::Rational((&one - s) / Q::from_integer(2.into())),
            None => {
                let d = Scalar::Rational(disc).to_f64().unwrap();
                Scalar::float((1.0 - d.sqrt()) / 2.0)
            }
        };
        return FsTopology::ConvergentSequence { limit };
    }
    // ratio u of the complex roots solves u^2 - s u + 1 = 0, s = 1/R - 2
    let s = rq.recip() - Q::from_integer(2.into());
    let minpoly = UPoly::new(vec![one.clone(), -s.clone(), one.clone()]);
    for m in 1..=bound {
        let target = UPoly::monomial(one.clone(), m as usize).sub(&UPoly::one());
        if target.rem(&minpoly).is_zero() {
            debug_assert!(cyclotomic_poly(m).rem(&minpoly).is_zero());
            return FsTopology::FiniteGloballyPeriodic { period: m };
        }
    }
    // a rational 2cos(θ) at a rational angle lies in {-2,...,2}, all covered above
    FsTopology::DenseCandidate
}

fn sqrt_rational(q: &Q) -> Option<Q> {
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Q::new(n, d))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClosedForm {
    Value { value: Scalar },
    Crash { step: usize },
}

/// `y_n` of `y' = 1 - R/y` from `z_{-1} = 1`, `z_0 = y_0`,
/// `z_{j+1} = z_j - R z_{j-1}`, `y_j = z_j/z_{j-1}`.
pub fn riccati_closed_form(r: &Scalar, y0: &Scalar, n: usize) -> ClosedForm {
    let mut prev = Scalar::one();
    let mut cur = y0.clone();
    for m in 0..n {
        if cur.is_zero() {
            return ClosedForm::Crash { step: m };
        }
        let next = &cur - &(r * &prev);
        prev = cur;
        cur = next;
    }
    ClosedForm::Value { value: &cur / &prev }
}

/// Forbidden points of `y' = 1 - R/y` from the zero set of the linear
/// equation: `z_n = alpha_n y_0 + beta_n` vanishes at `y_0 = -beta_n/alpha_n`.
pub fn riccati_zero_set_points(r: &Scalar, n: usize) -> Vec<Scalar> {
    // (alpha, beta) for z_{-1} = 1 and z_0 = y_0
    let mut prev = (Scalar::zero(), Scalar::one());
    let mut cur = (Scalar::one(), Scalar::zero());
    let mut out = Vec::new();
    for _ in 0..n {
        if !cur.0.is_zero() {
            let p = &(-&cur.1) / &cur.0;
            if !out.contains(&p) {
                out.push(p);
            }
        }
        let next = (&cur.0 - &(r * &prev.0), &cur.1 - &(r * &prev.1));
        prev = cur;
        cur = next;
    }
    out
}

/// Coefficients of the zero set of the linear equation attached to a
/// Riccati equation of order `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroSetCoeffs {
    pub order: usize,
    /// `monomials[j]` is the product of the `j` oldest initial values.
    pub monomials: Vec<String>,
    /// `(n, coeffs)`: `y_n = Σ coeffs[j] * monomials[j]`; `y_n = 0` makes
    /// the computation of `x_{n+1}` fail.
    pub layers: Vec<(i64, Vec<Scalar>)>,
}

impl ZeroSetCoeffs {
    /// Layer `n` as a polynomial in the initial window (oldest first).
    pub fn layer_poly(&self, idx: usize) -> Poly {
        let k = self.order;
        let mut p = Poly::zero(k);
        for (j, c) in self.layers[idx].1.iter().enumerate() {
            let mut e = vec![0; k];
            for slot in e.iter_mut().take(j) {
                *slot = 1;
            }
            p.add_term(e, c.clone());
        }
        p
    }

    /// Layers as hypersurfaces with their crash steps; the initial-value
    /// layers (`n <= 0`) all fail at step 0.
    pub fn description(&self) -> FsDescription {
        let names = crate::map::default_names(self.order);
        let mut layers: Vec<FsLayer> = Vec::new();
        for (idx, (n, _)) in self.layers.iter().enumerate() {
            let p = self.layer_poly(idx);
            if p.is_constant() {
                continue;
            }
            let depth = (*n).max(0) as usize;
            let forms: Vec<Form> = p.split_factors().iter().map(|f| Form::from_poly(f, &names)).collect();
            match layers.iter_mut().find(|l| l.depth == depth) {
                Some(l) => {
                    for f in forms {
                        if !l.forms.contains(&f) {
                            l.forms.push(f);
                        }
                    }
                }
                None => layers.push(FsLayer { depth, forms }),
            }
        }
        FsDescription::Hypersurfaces { layers }
    }
}

/// Coefficients `a_0 .. a_k` when a numeric map of order `k >= 2` has the
/// form `a_0 + a_1/x_n + ... + a_k/(x_n ... x_{n-k+1})`.
pub fn riccati_k_coeffs(map: &RationalMap) -> Option<Vec<Scalar>> {
    let m = map.numeric().ok()?;
    let k = m.order();
    if k < 2 || !m.func().is_exact() {
        return None;
    }
    let all = Poly::from_terms(k, [(vec![1; k], Scalar::one())]);
    let g = m.func().mul(&RatFunc::from_poly(all));
    if !g.den().is_constant() {
        return None;
    }
    let c = g.den().constant_value()?;
    let coeffs: Vec<Scalar> = (0..=k)
        .map(|j| {
            let e: Vec<u32> = (0..k).map(|i| u32::from(i < k - j)).collect();
            &g.num().coeff(&e) / &c
        })
        .collect();
    let back = riccati_k_equation(&coeffs).ok()?;
    (back.map.func() == m.func()).then_some(coeffs)
}

/// Equation `x' = a_0 + a_1/x_n + ... + a_k/(x_n ... x_{n-k+1})`.
pub fn riccati_k_equation(coeffs: &[Scalar]) -> Result<DifferenceEquation> {
    let k = coeffs.len().checked_sub(1).filter(|&k| k >= 1).ok_or_else(|| {
        Error::Invalid("need at least a_0 and a_1".into())
    })?;
    if coeffs[k].is_zero() {
        return Err(Error::Invalid("leading coefficient a_k must be nonzero".into()));
    }
    let mut f = RatFunc::constant(k, coeffs[0].clone());
    let mut prod = RatFunc::constant(k, Scalar::one());
    for (j, a) in coeffs.iter().enumerate().skip(1) {
        // newest j values: window positions k-1, ..., k-j
        prod = prod.mul(&RatFunc::var(k, k - j));
        f = f.add(&RatFunc::constant(k, a.clone()).div(&prod)?);
    }
    Ok(DifferenceEquation::natural(RationalMap::from_ratfunc(f)))
}

/// Zero-set layers `-k+1 ..= n_max` for the order-`k` Riccati equation.
///
/// With `x_m = y_m/y_{m-1}` and the seed `y_{-k} = 1`,
/// `y_{-k+j} = x_{-k+1} ... x_{-k+j}`, the linear recurrence
/// `y_{m+1} = Σ a_i y_{m-i}` is propagated on coefficient vectors.
pub fn riccati_k_fs(coeffs: &[Scalar], n_max: usize) -> Result<ZeroSetCoeffs> {
    let k = coeffs.len().checked_sub(1).filter(|&k| k >= 1).ok_or_else(|| {
        Error::Invalid("need at least a_0 and a_1".into())
    })?;
    if coeffs[k].is_zero() {
        return Err(Error::Invalid("leading coefficient a_k must be nonzero".into()));
    }
    let names: Vec<String> = (0..=k)
        .map(|j| {
            if j == 0 {
                "1".to_string()
            } else {
                (1..=j).map(|i| format!("x_{}", i as i64 - k as i64)).collect::<Vec<_>>().join("*")
            }
        })
        .collect();
    let unit = |j: usize| -> Vec<Scalar> {
        (0..=k).map(|i| if i == j { Scalar::one() } else { Scalar::zero() }).collect()
    };
    // history[i] holds y_{-k+i}
    let mut history: Vec<Vec<Scalar>> = (0..=k).map(unit).collect();
    let mut layers: Vec<(i64, Vec<Scalar>)> =
        (1..=k).map(|j| (j as i64 - k as i64, history[j].clone())).collect();
    for n in 1..=n_max as i64 {
        let len = history.len();
        let mut next = vec![Scalar::zero(); k + 1];
        for (i, a) in coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (slot, c) in next.iter_mut().zip(&history[len - 1 - i]) {
                *slot = &*slot + &(a * c);
            }
        }
        layers.push((n, next.clone()));
        history.push(next);
    }
    Ok(ZeroSetCoeffs { order: k, monomials: names, layers })
}

/// Hyperbola triples `(beta_1, beta_2, beta_3)` with
/// `beta_1 u v + beta_2 u + beta_3 = 0`, `(u, v) = (x_{-1}, x_0)`, for the
/// second-order equation `x' = a + b/x_n + c/(x_n x_{n-1})`.
pub fn riccati2_fs(a: &Scalar, b: &Scalar, c: &Scalar, n_max: usize) -> Result<Vec<(i64, [Scalar; 3])>> {
    if c.is_zero() {
        return Err(Error::Invalid("c = 0 lowers the order; use the first-order path".into()));
    }
    let z = riccati_k_fs(&[a.clone(), b.clone(), c.clone()], n_max)?;
    Ok(z.layers
        .into_iter()
        .map(|(n, v)| (n, [v[2].clone(), v[1].clone(), v[0].clone()]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{iterate, IterOptions};

    #[test]
    fn classification_examples() {
        let p = RiccatiParams1::from_ints(1, 0, 0, 1).unwrap();
        assert_eq!(classify_riccati1(&p).unwrap(), RiccatiClass::Period2);
        let p = RiccatiParams1::from_ints(1, 1, 1, 0).unwrap();
        assert_eq!(classify_riccati1(&p).unwrap(), RiccatiClass::Linear);
        let p = RiccatiParams1::from_ints(1, 1, 3, 1).unwrap();
        assert_eq!(classify_riccati1(&p).unwrap(), RiccatiClass::Proper);
        assert_eq!(riccati_number(&p).unwrap(), Scalar::ratio(1, 8));
        assert!(RiccatiParams1::from_ints(1, 1, 0, 0).is_err());
    }

    #[test]
    fn order_k_recognised_and_layers_crash() {
        let coeffs = [Scalar::int(1), Scalar::int(2), Scalar::int(-1)];
        let de = riccati_k_equation(&coeffs).unwrap();
        assert_eq!(riccati_k_coeffs(&de.map).unwrap(), coeffs.to_vec());
        let other = crate::EquationDef::new(2, "x0 + 1", "x1").to_equation().unwrap();
        assert!(riccati_k_coeffs(&other.map).is_none());
        let FsDescription::Hypersurfaces { layers } = riccati_k_fs(&coeffs, 5).unwrap().description() else {
            panic!()
        };
        assert_eq!(layers[0].depth, 0);
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
        let desc = FsDescription::Hypersurfaces { layers };
        for p in desc.sample(3, 5, &mut rng).unwrap() {
            let opts = IterOptions { detect_period: false, ..Default::default() };
            let s = iterate(&de, &p.point, 10, opts).unwrap().crash_step().unwrap();
            assert!(s <= p.depth.unwrap(), "{:?}", p);
        }
    }

    #[test]
    fn reciprocal_fs_is_zero() {
        let p = RiccatiParams1::from_ints(1, 0, 0, 1).unwrap();
        let fs = riccati_fs_order1(&p, 10).unwrap();
        assert_eq!(fs.points, vec![Scalar::zero()]);
        assert!(fs.is_finite());
    }

    #[test]
    fn period_four_normal_form() {
        let p = RiccatiParams1::normal(Scalar::ratio(1, 2));
        let fs = riccati_fs_order1(&p, 10).unwrap();
        assert_eq!(fs.points, vec![Scalar::zero(), Scalar::ratio(1, 2), Scalar::one()]);
        assert_eq!(fs.stop, FsStop::NoPreimage);
        assert_eq!(
            riccati_fs_topology(&Scalar::ratio(1, 2), DEFAULT_UNITY_BOUND),
            FsTopology::FiniteGloballyPeriodic { period: 4 }
        );
        assert_eq!(
            riccati_closed_form(&Scalar::ratio(1, 2), &Scalar::int(2), 4),
            ClosedForm::Value { value: Scalar::int(2) }
        );
    }

    #[test]
    fn topology_cases() {
        let t = riccati_fs_topology(&Scalar::ratio(1, 4), DEFAULT_UNITY_BOUND);
        assert_eq!(t, FsTopology::ConvergentSequence { limit: Scalar::ratio(1, 2) });
        assert!(matches!(
            riccati_fs_topology(&Scalar::ratio(1, 8), DEFAULT_UNITY_BOUND),
            FsTopology::ConvergentSequence { .. }
        ));
        assert_eq!(
            riccati_fs_topology(&Scalar::one(), DEFAULT_UNITY_BOUND),
            FsTopology::FiniteGloballyPeriodic { period: 3 }
        );
        assert_eq!(
            riccati_fs_topology(&Scalar::ratio(1, 3), DEFAULT_UNITY_BOUND),
            FsTopology::FiniteGloballyPeriodic { period: 6 }
        );
        assert_eq!(riccati_fs_topology(&Scalar::int(2), DEFAULT_UNITY_BOUND), FsTopology::DenseCandidate);
    }

    #[test]
    fn normal_form_conjugates_orbits() {
        let p = RiccatiParams1::from_ints(1, 1, 3, 1).unwrap();
        let nf = riccati_normal_form(&p).unwrap();
        let de = p.equation();
        let norm = RiccatiParams1::normal(nf.r.clone()).equation();
        let opts = IterOptions { trace: true, detect_period: false, ..Default::default() };
        let xs = iterate(&de, &[Scalar::one()], 20, opts).unwrap().trace.unwrap();
        let ys = iterate(&norm, &[nf.to_normal(&Scalar::one())], 20, opts).unwrap().trace.unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(&nf.to_normal(x), y);
        }
    }

    #[test]
    fn order_two_layers() {
        let one = Scalar::one();
        let layers = riccati2_fs(&one, &one, &one, 3).unwrap();
        assert_eq!(layers[0], (-1, [Scalar::zero(), Scalar::one(), Scalar::zero()]));
        assert_eq!(layers[1], (0, [Scalar::one(), Scalar::zero(), Scalar::zero()]));
        assert_eq!(layers[2], (1, [Scalar::one(), Scalar::one(), Scalar::one()]));
        // (u, v) = (1, -2) lies on layer 1
        let de = riccati_k_equation(&[one.clone(), one.clone(), one.clone()]).unwrap();
        let out = iterate(&de, &[Scalar::one(), Scalar::int(-2)], 10, IterOptions::default()).unwrap();
        assert!(out.crash_step().unwrap() <= 1);
    }

    #[test]
    fn zero_set_matches_inverse_orbit() {
        let r = Scalar::ratio(3, 7);
        let z = riccati_zero_set_points(&r, 15);
        let fs = riccati_fs_order1(&RiccatiParams1::normal(r), 15).unwrap();
        assert_eq!(z, fs.points);
    }
}
