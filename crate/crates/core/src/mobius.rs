//! Möbius transformations `T(x) = (a x + b)/(c x + d)` with `ad - bc != 0`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ratfunc::RatFunc;
use crate::scalar::Scalar;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mobius {
    a: Scalar,
    b: Scalar,
    c: Scalar,
    d: Scalar,
}

impl Mobius {
    pub fn new(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Result<Self> {
        let det = &(&a * &d) - &(&b * &c);
        let degenerate = if det.is_exact() {
            det.is_zero()
        } else {
            det.abs_f64() <= 1e-14 * (a.abs_f64() * d.abs_f64() + b.abs_f64() * c.abs_f64())
        };
        if degenerate {
            return Err(Error::NotInvertible);
        }
        Ok(Mobius { a, b, c, d })
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Mobius::new(Scalar::int(a), Scalar::int(b), Scalar::int(c), Scalar::int(d))
    }

    pub fn identity() -> Self {
        Mobius::from_ints(1, 0, 0, 1).unwrap()
    }

    /// `x -> 1/x`.
    pub fn reciprocal() -> Self {
        Mobius::from_ints(0, 1, 1, 0).unwrap()
    }

    /// `x -> x + s`.
    pub fn translation(s: Scalar) -> Self {
        Mobius::new(Scalar::one(), s, Scalar::zero(), Scalar::one()).unwrap()
    }

    /// `x -> m x + s`, `m != 0`.
    pub fn affine(m: Scalar, s: Scalar) -> Result<Self> {
        Mobius::new(m, s, Scalar::zero(), Scalar::one())
    }

    pub fn coeffs(&self) -> [&Scalar; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn det(&self) -> Scalar {
        &(&self.a * &self.d) - &(&self.b * &self.c)
    }

    /// `None` at the pole `x = -d/c`.
    pub fn apply(&self, x: &Scalar) -> Option<Scalar> {
        let den = &(&self.c * x) + &self.d;
        if den.is_zero() {
            return None;
        }
        Some(&(&(&self.a * x) + &self.b) / &den)
    }

    /// The pole `-d/c`, if `c != 0`.
    pub fn pole(&self) -> Option<Scalar> {
        if self.c.is_zero() {
            None
        } else {
            Some(&(-&self.d) / &self.c)
        }
    }

    /// Value never attained, `a/c`, if `c != 0`.
    pub fn omitted_value(&self) -> Option<Scalar> {
        if self.c.is_zero() {
            None
        } else {
            Some(&self.a / &self.c)
        }
    }

    pub fn inverse(&self) -> Mobius {
        Mobius { a: self.d.clone(), b: -&self.b, c: -&self.c, d: self.a.clone() }.normalized()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Mobius) -> Mobius {
        let m = |p: &Scalar, q: &Scalar, r: &Scalar, s: &Scalar| &(p * q) + &(r * s);
        Mobius {
            a: m(&self.a, &other.a, &self.b, &other.c),
            b: m(&self.a, &other.b, &self.b, &other.d),
            c: m(&self.c, &other.a, &self.d, &other.c),
            d: m(&self.c, &other.b, &self.d, &other.d),
        }
        .normalized()
    }

    /// Scales so the last nonzero of `(c, d)` is one, giving a unique
    /// representative for exact coefficients.
    fn normalized(self) -> Mobius {
        let pivot = if !self.c.is_zero() { self.c.clone() } else { self.d.clone() };
        if pivot.is_one() || !pivot.is_exact() {
            return self;
        }
        let inv = pivot.inv().expect("nonzero pivot");
        Mobius { a: &self.a * &inv, b: &self.b * &inv, c: &self.c * &inv, d: &self.d * &inv }
    }

    /// Same transformation, compared up to scaling.
    pub fn same_as(&self, other: &Mobius) -> bool {
        self.clone().normalized() == other.clone().normalized()
    }

    pub fn is_identity(&self) -> bool {
        self.same_as(&Mobius::identity())
    }

    /// `T(r)` for a rational function `r`.
    pub fn apply_ratfunc(&self, r: &RatFunc) -> Result<RatFunc> {
        let n = r.nvars();
        let num = r.scale(&self.a).add(&RatFunc::constant(n, self.b.clone()));
        let den = r.scale(&self.c).add(&RatFunc::constant(n, self.d.clone()));
        num.div(&den)
    }

    /// `T` as a rational function of variable `var` in a ring of `nvars`.
    pub fn as_ratfunc(&self, nvars: usize, var: usize) -> RatFunc {
        self.apply_ratfunc(&RatFunc::var(nvars, var)).expect("invertible map has nonzero denominator")
    }
}

impl fmt::Display for Mobius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}*x + {})/({}*x + {})", self.a, self.b, self.c, self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reciprocal_is_involution() {
        let t = Mobius::reciprocal();
        assert!(t.compose(&t).is_identity());
    }

    #[test]
    fn inverse_of_cayley_like_map() {
        let t = Mobius::from_ints(1, 1, 1, -1).unwrap();
        assert!(t.inverse().same_as(&t));
        assert!(t.compose(&t.inverse()).is_identity());
        let x = Scalar::ratio(7, 3);
        assert_eq!(t.inverse().apply(&t.apply(&x).unwrap()).unwrap(), x);
    }

    #[test]
    fn apply_and_degenerate() {
        let t = Mobius::from_ints(2, 0, 1, 1).unwrap();
        assert_eq!(t.apply(&Scalar::one()), Some(Scalar::one()));
        assert_eq!(t.apply(&Scalar::int(-1)), None);
        assert!(matches!(Mobius::from_ints(1, 2, 2, 4), Err(Error::NotInvertible)));
    }

    #[test]
    fn ratfunc_image() {
        let t = Mobius::reciprocal();
        let x = RatFunc::var(1, 0);
        let tt = t.apply_ratfunc(&t.apply_ratfunc(&x).unwrap()).unwrap();
        assert_eq!(tt, x);
    }
}
