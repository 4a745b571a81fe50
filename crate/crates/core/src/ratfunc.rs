//! Rational functions `num/den` of multivariate polynomials.
//!
//! Fractions are kept reduced: always by full GCD when at most one variable
//! occurs, by full GCD in several variables while the combined degree stays
//! under [`FULL_GCD_DEGREE`], and otherwise only normalised. Exact
//! denominators are made monic so equal fractions compare equal.

use std::fmt;

use crate::poly::Poly;
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Combined total degree above which multivariate GCD is skipped.
pub const FULL_GCD_DEGREE: u32 = 48;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

/// Result of substituting rational functions into a rational function.
#[derive(Clone, Debug)]
pub struct Composition {
    pub value: RatFunc,
    /// Denominator of the outer function after clearing the inner
    /// denominators, before any cancellation. Its zero set (off the inner
    /// poles) is where the composite is undefined or indeterminate.
    pub crash_poly: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        assert_eq!(num.nvars(), den.nvars(), "variable count mismatch");
        Ok(RatFunc::reduce(num, den))
    }

    pub fn from_poly(p: Poly) -> Self {
        let n = p.nvars();
        RatFunc { num: p, den: Poly::one(n) }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        RatFunc::from_poly(Poly::constant(nvars, c))
    }

    pub fn var(nvars: usize, v: usize) -> Self {
        RatFunc::from_poly(Poly::var(nvars, v))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_exact(&self) -> bool {
        self.num.is_exact() && self.den.is_exact()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn constant_value(&self) -> Option<Scalar> {
        let n = self.num.constant_value()?;
        let d = self.den.constant_value()?;
        n.checked_div(&d)
    }

    pub fn nterms(&self) -> usize {
        self.num.nterms() + self.den.nterms()
    }

    pub fn uses(&self, v: usize) -> bool {
        self.num.uses(v) || self.den.uses(v)
    }

    fn reduce(num: Poly, den: Poly) -> RatFunc {
        let n = num.nvars();
        if num.is_zero() {
            return RatFunc { num, den: Poly::one(n) };
        }
        if let Some(c) = den.constant_value() {
            let inv = c.inv().expect("nonzero constant denominator");
            return RatFunc { num: num.scale(&inv), den: Poly::one(n) };
        }
        let (mut num, mut den) = (num, den);
        if num.is_exact() && den.is_exact() {
            let mut used = num.used_vars();
            used.extend(den.used_vars());
            used.sort_unstable();
            used.dedup();
            let small = num.total_degree() + den.total_degree() <= FULL_GCD_DEGREE;
            if used.len() <= 1 || small {
                let g = num.gcd(&den);
                if !g.is_constant() {
                    num = num.div_exact(&g).expect("gcd divides numerator");
                    den = den.div_exact(&g).expect("gcd divides denominator");
                }
            }
        }
        let lc = den.lc();
        if !lc.is_one() {
            let inv = lc.inv().expect("nonzero leading coefficient");
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        if let Some(c) = den.constant_value() {
            if !c.is_one() {
                num = num.scale(&c.inv().unwrap());
                den = Poly::one(n);
            }
        }
        RatFunc { num, den }
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        if self.den == other.den {
            return RatFunc::reduce(self.num.add(&other.num), self.den.clone());
        }
        if self.den.is_constant() && other.den.is_constant() {
            return RatFunc::from_poly(self.num.add(&other.num));
        }
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        RatFunc::reduce(num, self.den.mul(&other.den))
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        if self.den.is_constant() && other.den.is_constant() {
            return RatFunc::from_poly(self.num.mul(&other.num));
        }
        RatFunc::reduce(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn scale(&self, s: &Scalar) -> RatFunc {
        RatFunc::reduce(self.num.scale(s), self.den.clone())
    }

    pub fn inv(&self) -> Result<RatFunc> {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i32) -> Result<RatFunc> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = e.unsigned_abs();
        Ok(RatFunc { num: base.num.pow(k), den: base.den.pow(k) })
    }

    /// Substitutes `subs[v]` for variable `v`. All substitutes share a ring.
    pub fn compose(&self, subs: &[RatFunc]) -> Result<Composition> {
        if subs.len() != self.nvars() {
            return Err(Error::ArityMismatch { expected: self.nvars(), got: subs.len() });
        }
        let target = subs.first().map(RatFunc::nvars).unwrap_or(0);
        let degs: Vec<u32> = (0..self.nvars())
            .map(|v| self.num.degree_in(v).max(self.den.degree_in(v)))
            .collect();
        let mut num_pows: Vec<Vec<Poly>> = Vec::with_capacity(subs.len());
        let mut den_pows: Vec<Vec<Poly>> = Vec::with_capacity(subs.len());
        for (v, s) in subs.iter().enumerate() {
            let mut np = vec![Poly::one(target)];
            let mut dp = vec![Poly::one(target)];
            for _ in 0..degs[v] {
                np.push(np.last().unwrap().mul(&s.num));
                dp.push(dp.last().unwrap().mul(&s.den));
            }
            num_pows.push(np);
            den_pows.push(dp);
        }
        let homogenize = |p: &Poly| -> Poly {
            let mut out = Poly::zero(target);
            for (e, c) in p.terms() {
                let mut t = Poly::constant(target, c.clone());
                for (v, &k) in e.iter().enumerate() {
                    if degs[v] == 0 {
                        continue;
                    }
                    t = t.mul(&num_pows[v][k as usize]).mul(&den_pows[v][(degs[v] - k) as usize]);
                }
                out = out.add(&t);
            }
            out
        };
        let n_hat = homogenize(&self.num);
        let d_hat = homogenize(&self.den);
        if d_hat.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let value = RatFunc::reduce(n_hat, d_hat.clone());
        Ok(Composition { value, crash_poly: d_hat })
    }

    /// Value and denominator at a point, with magnitude scales for
    /// relative float zero tests: `(num, num_scale, den, den_scale)`.
    pub fn eval_parts(&self, point: &[Scalar]) -> (Scalar, f64, Scalar, f64) {
        let (n, ns) = self.num.eval_scaled(point);
        let (d, ds) = self.den.eval_scaled(point);
        (n, ns, d, ds)
    }

    /// Plain evaluation; `None` at an exact pole.
    pub fn eval(&self, point: &[Scalar]) -> Option<Scalar> {
        let (n, _, d, _) = self.eval_parts(point);
        n.checked_div(&d)
    }

    pub fn eval_c64(&self, point: &[num_complex::Complex64]) -> num_complex::Complex64 {
        let pt: Vec<Scalar> = point.iter().map(|&z| Scalar::from(z)).collect();
        let (n, _, d, _) = self.eval_parts(&pt);
        n.to_c64() / d.to_c64()
    }

    pub fn specialize(&self, var: usize, value: &Scalar) -> Result<RatFunc> {
        RatFunc::new(self.num.specialize(var, value), self.den.specialize(var, value))
    }

    pub fn remap(&self, nvars: usize, mapping: &[usize]) -> RatFunc {
        RatFunc { num: self.num.remap(nvars, mapping), den: self.den.remap(nvars, mapping) }
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> RatFuncDisplay<'a> {
        RatFuncDisplay { f: self, names }
    }
}

pub struct RatFuncDisplay<'a> {
    f: &'a RatFunc,
    names: &'a [String],
}

impl fmt::Display for RatFuncDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.f.num.display_with(self.names).to_string();
        if self.f.den.constant_value().is_some_and(|c| c.is_one()) {
            return write!(f, "{num}");
        }
        let den = self.f.den.display_with(self.names).to_string();
        let wrap = |s: String, always: bool| {
            if always || s.contains([' ', '*', '/']) || s.starts_with('-') {
                format!("({s})")
            } else {
                s
            }
        };
        write!(f, "{}/{}", wrap(num, false), wrap(den, false))
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars()).map(|v| format!("v{v}")).collect();
        write!(f, "{}", self.display_with(&names))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: usize) -> RatFunc {
        RatFunc::var(2, i)
    }

    fn c(n: i64) -> RatFunc {
        RatFunc::constant(2, Scalar::int(n))
    }

    #[test]
    fn reciprocal_is_involution() {
        let f = c(1).div(&v(0)).unwrap();
        let ff = f.compose(&[f.clone(), v(1)]).unwrap().value;
        assert_eq!(ff, v(0));
    }

    #[test]
    fn sums_reduce() {
        // 1/(x-1) - 1/(x+1) = 2/(x^2-1)
        let a = c(1).div(&v(0).sub(&c(1))).unwrap();
        let b = c(1).div(&v(0).add(&c(1))).unwrap();
        let s = a.sub(&b);
        let expected = c(2).div(&v(0).mul(&v(0)).sub(&c(1))).unwrap();
        assert_eq!(s, expected);
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(matches!(RatFunc::new(Poly::one(1), Poly::zero(1)), Err(Error::ZeroDenominator)));
    }

    #[test]
    fn composition_keeps_crash_factors() {
        // f(x) = x/(1+x), composed with itself: value x/(1+2x), crash poly 1+2x
        let x = RatFunc::var(1, 0);
        let one = RatFunc::constant(1, Scalar::one());
        let f = x.div(&one.add(&x)).unwrap();
        let comp = f.compose(&[f.clone()]).unwrap();
        let two_x = x.scale(&Scalar::int(2));
        assert_eq!(comp.value, x.div(&one.add(&two_x)).unwrap());
        assert_eq!(comp.crash_poly.monic(), one.add(&two_x).num().monic());
    }
}
