//! Tagged scalar values: exact rationals, exact Gaussian rationals, exact
//! cyclotomic numbers, binary floats and complex floats.
//!
//! Exact operands give exact results. Mixing an exact value with a float
//! gives a float (complex when the exact value is not real). Exact complex
//! values of different fields meet in the smallest common cyclotomic field.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cyclo::Cyclo;
use crate::upoly::UPoly;
use crate::Q;

/// Scalar field of a difference equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

#[derive(Clone, Debug)]
pub enum Scalar {
    Rational(Q),
    Gaussian(Complex<Q>),
    Cyclotomic(Cyclo),
    Float(f64),
    Complex(Complex64),
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rational(Q::zero())
    }

    pub fn one() -> Self {
        Scalar::Rational(Q::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::Rational(Q::from_integer(n.into()))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::Rational(q(n, d))
    }

    pub fn gaussian(re: Q, im: Q) -> Self {
        Scalar::Gaussian(Complex::new(re, im)).normalized()
    }

    pub fn i() -> Self {
        Scalar::gaussian(Q::zero(), Q::one())
    }

    /// Primitive m-th root of unity, exact.
    pub fn zeta(m: u32) -> Self {
        Scalar::Cyclotomic(Cyclo::zeta(m)).normalized()
    }

    pub fn float(x: f64) -> Self {
        Scalar::Float(x)
    }

    pub fn complex(re: f64, im: f64) -> Self {
        Scalar::Complex(Complex64::new(re, im)).normalized()
    }

    /// Canonical representative: Gaussian with zero imaginary part becomes
    /// rational, order-4 cyclotomic becomes Gaussian, complex floats with a
    /// zero imaginary part become real floats.
    pub fn normalized(self) -> Self {
        match self {
            Scalar::Gaussian(z) if z.im.is_zero() => Scalar::Rational(z.re),
            Scalar::Cyclotomic(c) => {
                if let Some(r) = c.as_rational() {
                    Scalar::Rational(r)
                } else if c.order() == 4 {
                    Scalar::Gaussian(Complex::new(c.poly().coeff(0), c.poly().coeff(1)))
                } else if c.order() % 2 == 1 {
                    // Q(ζ_m) = Q(ζ_2m) for odd m; keep the even order for a stable form
                    Scalar::Cyclotomic(c.embed(2 * c.order()))
                } else {
                    Scalar::Cyclotomic(c)
                }
            }
            Scalar::Complex(z) if z.im == 0.0 => Scalar::Float(z.re),
            other => other,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Rational(_) | Scalar::Gaussian(_) | Scalar::Cyclotomic(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Gaussian(z) => z.re.is_zero() && z.im.is_zero(),
            Scalar::Cyclotomic(c) => c.is_zero(),
            Scalar::Float(x) => *x == 0.0,
            Scalar::Complex(z) => z.re == 0.0 && z.im == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Scalar::Rational(r) if r.is_one())
            || matches!(self, Scalar::Float(x) if *x == 1.0)
    }

    pub fn is_real(&self) -> bool {
        match self {
            Scalar::Rational(_) | Scalar::Float(_) => true,
            Scalar::Gaussian(z) => z.im.is_zero(),
            Scalar::Cyclotomic(c) => c.is_real(),
            Scalar::Complex(z) => z.im == 0.0,
        }
    }

    pub fn field(&self) -> Field {
        if self.is_real() {
            Field::Real
        } else {
            Field::Complex
        }
    }

    pub fn as_rational(&self) -> Option<&Q> {
        match self {
            Scalar::Rational(r) => Some(r),
            _ => None,
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            Scalar::Rational(r) => Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0),
            Scalar::Gaussian(z) => Complex64::new(
                z.re.to_f64().unwrap_or(f64::NAN),
                z.im.to_f64().unwrap_or(f64::NAN),
            ),
            Scalar::Cyclotomic(c) => c.to_c64(),
            Scalar::Float(x) => Complex64::new(*x, 0.0),
            Scalar::Complex(z) => *z,
        }
    }

    /// Real value as f64 when the scalar is real.
    pub fn to_f64(&self) -> Option<f64> {
        if self.is_real() {
            Some(self.to_c64().re)
        } else {
            None
        }
    }

    /// Modulus as a float.
    pub fn abs_f64(&self) -> f64 {
        self.to_c64().norm()
    }

    /// Float image of the value (real float when real).
    pub fn to_float(&self) -> Scalar {
        match self {
            Scalar::Float(_) | Scalar::Complex(_) => self.clone(),
            _ if self.is_real() => Scalar::Float(self.to_c64().re),
            _ => Scalar::Complex(self.to_c64()),
        }
    }

    fn to_cyclo(&self) -> Option<Cyclo> {
        match self {
            Scalar::Rational(r) => Some(Cyclo::from_rational(1, r.clone())),
            Scalar::Gaussian(z) => Some(Cyclo::new(
                4,
                UPoly::new(vec![z.re.clone(), z.im.clone()]),
            )),
            Scalar::Cyclotomic(c) => Some(c.clone()),
            _ => None,
        }
    }

    /// Multiplicative inverse; `None` on an exact zero.
    pub fn inv(&self) -> Option<Scalar> {
        if self.is_exact() && self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Rational(r) => Scalar::Rational(r.recip()),
            Scalar::Gaussian(z) => {
                let n = &z.re * &z.re + &z.im * &z.im;
                Scalar::Gaussian(Complex::new(&z.re / &n, -&z.im / &n))
            }
            Scalar::Cyclotomic(c) => Scalar::Cyclotomic(c.inv()?).normalized(),
            Scalar::Float(x) => Scalar::Float(1.0 / x),
            Scalar::Complex(z) => Scalar::Complex(z.inv()),
        })
    }

    pub fn checked_div(&self, other: &Scalar) -> Option<Scalar> {
        Some(self * &other.inv()?)
    }

    pub fn pow(&self, e: i32) -> Option<Scalar> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut b = base;
        let mut acc = Scalar::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        Some(acc)
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Gaussian(z) => Scalar::Gaussian(z.conj()),
            Scalar::Cyclotomic(c) => Scalar::Cyclotomic(c.conj()).normalized(),
            Scalar::Complex(z) => Scalar::Complex(z.conj()),
            other => other.clone(),
        }
    }

    /// Exact sign of a real exact scalar.
    pub fn signum_exact(&self) -> Option<Ordering> {
        self.as_rational().map(|r| r.cmp(&Q::zero()))
    }

    fn binop(
        &self,
        other: &Scalar,
        rat: impl Fn(&Q, &Q) -> Q,
        cyc: impl Fn(&Cyclo, &Cyclo) -> Cyclo,
        flt: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(rat(a, b)),
            (a, b) if a.is_exact() && b.is_exact() => {
                Scalar::Cyclotomic(cyc(&a.to_cyclo().unwrap(), &b.to_cyclo().unwrap())).normalized()
            }
            (a, b) => {
                let z = flt(a.to_c64(), b.to_c64());
                if a.is_real() && b.is_real() {
                    Scalar::Float(z.re)
                } else {
                    Scalar::Complex(z)
                }
            }
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.binop(rhs, |a, b| a + b, |a, b| a.add(b), |a, b| a + b)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.binop(rhs, |a, b| a - b, |a, b| a.sub(b), |a, b| a - b)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.binop(rhs, |a, b| a * b, |a, b| a.mul(b), |a, b| a * b)
    }
}

/// Panics on exact division by zero; use [`Scalar::checked_div`] otherwise.
impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).expect("exact division by zero")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Gaussian(z) => Scalar::Gaussian(-z.clone()),
            Scalar::Cyclotomic(c) => Scalar::Cyclotomic(c.neg()),
            Scalar::Float(x) => Scalar::Float(-x),
            Scalar::Complex(z) => Scalar::Complex(-z),
        }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { (&self).$m(&rhs) }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar { (&self).$m(rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a == b,
            (a, b) if a.is_exact() && b.is_exact() => (a - b).is_zero(),
            (a, b) if !a.is_exact() && !b.is_exact() => {
                let (x, y) = (a.to_c64(), b.to_c64());
                x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()
            }
            _ => false,
        }
    }
}

impl Eq for Scalar {}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Scalar::Rational(r) => {
                0u8.hash(state);
                r.hash(state);
            }
            // exact complex values may have several field representations
            Scalar::Gaussian(_) | Scalar::Cyclotomic(_) => 1u8.hash(state),
            Scalar::Float(_) | Scalar::Complex(_) => {
                2u8.hash(state);
                let z = self.to_c64();
                z.re.to_bits().hash(state);
                z.im.to_bits().hash(state);
            }
        }
    }
}

impl From<Q> for Scalar {
    fn from(r: Q) -> Self {
        Scalar::Rational(r)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Float(x)
    }
}

impl From<Complex64> for Scalar {
    fn from(z: Complex64) -> Self {
        Scalar::Complex(z).normalized()
    }
}

fn fmt_rational(r: &Q) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{}", fmt_rational(r)),
            Scalar::Gaussian(z) => {
                let im = if z.im.is_one() {
                    "i".to_string()
                } else if (-&z.im).is_one() {
                    "-i".to_string()
                } else {
                    format!("{}*i", fmt_rational(&z.im))
                };
                if z.re.is_zero() {
                    write!(f, "{im}")
                } else if z.im.is_negative() {
                    let pos = if (-&z.im).is_one() { "i".to_string() } else { format!("{}*i", fmt_rational(&-&z.im)) };
                    write!(f, "{} - {pos}", fmt_rational(&z.re))
                } else {
                    write!(f, "{} + {im}", fmt_rational(&z.re))
                }
            }
            Scalar::Cyclotomic(c) => {
                let m = c.order();
                let mut parts = Vec::new();
                for (i, co) in c.poly().coeffs().iter().enumerate() {
                    if co.is_zero() {
                        continue;
                    }
                    let coef = fmt_rational(co);
                    parts.push(match i {
                        0 => coef,
                        1 => format!("{coef}*zeta({m})"),
                        _ => format!("{coef}*zeta({m})^{i}"),
                    });
                }
                write!(f, "{}", parts.join(" + "))
            }
            Scalar::Float(x) => write!(f, "{x:?}"),
            Scalar::Complex(z) => {
                if z.im < 0.0 {
                    write!(f, "{:?} - {:?}*i", z.re, -z.im)
                } else {
                    write!(f, "{:?} + {:?}*i", z.re, z.im)
                }
            }
        }
    }
}

impl FromStr for Scalar {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.contains(['e', 'E', '.']) && !t.contains(['i', 'z', '/']) {
            // plain decimal float, only used for float-valued records
            if let Ok(x) = t.parse::<f64>() {
                return Ok(Scalar::Float(x));
            }
        }
        crate::parse::parse_constant(t)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_stays_exact() {
        let a = Scalar::ratio(1, 3);
        let b = Scalar::ratio(2, 3);
        assert_eq!(&a + &b, Scalar::one());
        assert!((&a * &b).is_exact());
    }

    #[test]
    fn rationals_in_lowest_terms() {
        let r = Scalar::ratio(6, -4);
        let Scalar::Rational(r) = r else { panic!() };
        assert_eq!(*r.numer(), BigInt::from(-3));
        assert_eq!(*r.denom(), BigInt::from(2));
    }

    #[test]
    fn mixing_with_float_gives_float() {
        let s = &Scalar::ratio(1, 2) + &Scalar::float(0.25);
        assert!(matches!(s, Scalar::Float(x) if x == 0.75));
        let c = &Scalar::i() * &Scalar::float(2.0);
        assert!(matches!(c, Scalar::Complex(z) if z.im == 2.0));
    }

    #[test]
    fn gaussian_arithmetic() {
        let i = Scalar::i();
        assert_eq!(&i * &i, Scalar::int(-1));
        let z = Scalar::gaussian(q(1, 1), q(1, 1));
        assert_eq!(&z * &z.inv().unwrap(), Scalar::one());
    }

    #[test]
    fn cyclotomic_meets_gaussian() {
        let w = Scalar::zeta(3);
        assert_eq!(w.pow(3).unwrap(), Scalar::one());
        let s = &w + &Scalar::i();
        assert!(matches!(s, Scalar::Cyclotomic(ref c) if c.order() == 12));
        assert_eq!(&s - &Scalar::i(), w);
        // ζ_6 = -ζ_3^2
        assert_eq!(Scalar::zeta(6), -(w.pow(2).unwrap()));
    }

    #[test]
    fn display_round_trips() {
        for s in [
            Scalar::ratio(-7, 3),
            Scalar::gaussian(q(1, 2), q(-3, 1)),
            Scalar::i(),
            Scalar::zeta(3),
            &Scalar::zeta(5) + &Scalar::ratio(1, 2),
        ] {
            let back: Scalar = s.to_string().parse().unwrap();
            assert_eq!(back, s, "{s}");
        }
    }
}
