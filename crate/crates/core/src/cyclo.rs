//! Exact elements of cyclotomic fields `Q(ζ_m)`.
//!
//! Elements are polynomials in `ζ_m` reduced modulo the cyclotomic
//! polynomial `Φ_m`. Two elements of different fields are compared and
//! combined in `Q(ζ_lcm)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::upoly::UPoly;
use crate::Q;

fn cache() -> &'static Mutex<HashMap<u32, Arc<UPoly>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<UPoly>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The m-th cyclotomic polynomial.
pub fn cyclotomic_poly(m: u32) -> Arc<UPoly> {
    assert!(m >= 1, "cyclotomic order must be positive");
    if let Some(p) = cache().lock().unwrap().get(&m) {
        return p.clone();
    }
    // t^m - 1 divided by Φ_d for every proper divisor d
    let mut p = UPoly::monomial(Q::one(), m as usize).sub(&UPoly::one());
    for d in 1..m {
        if m % d == 0 {
            let (quot, rem) = p.divrem(&cyclotomic_poly(d));
            debug_assert!(rem.is_zero());
            p = quot;
        }
    }
    let p = Arc::new(p);
    cache().lock().unwrap().insert(m, p.clone());
    p
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cyclo {
    order: u32,
    poly: UPoly,
}

impl Cyclo {
    pub fn new(order: u32, poly: UPoly) -> Self {
        let poly = poly.rem(&cyclotomic_poly(order));
        Cyclo { order, poly }
    }

    /// The primitive root `ζ_m = exp(2πi/m)`.
    pub fn zeta(order: u32) -> Self {
        Cyclo::new(order, UPoly::monomial(Q::one(), 1))
    }

    pub fn from_rational(order: u32, q: Q) -> Self {
        Cyclo::new(order, UPoly::constant(q))
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn poly(&self) -> &UPoly {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// `Some(q)` when the element is rational.
    pub fn as_rational(&self) -> Option<Q> {
        match self.poly.degree() {
            None => Some(Q::zero()),
            Some(0) => Some(self.poly.coeff(0)),
            _ => None,
        }
    }

    /// Re-express in `Q(ζ_target)`; `target` must be a multiple of the order.
    pub fn embed(&self, target: u32) -> Cyclo {
        assert!(target % self.order == 0);
        if target == self.order {
            return self.clone();
        }
        Cyclo::new(target, self.poly.inflate((target / self.order) as usize))
    }

    fn common(a: &Cyclo, b: &Cyclo) -> (Cyclo, Cyclo) {
        let l = a.order.lcm(&b.order);
        (a.embed(l), b.embed(l))
    }

    pub fn add(&self, other: &Cyclo) -> Cyclo {
        let (a, b) = Cyclo::common(self, other);
        Cyclo::new(a.order, a.poly.add(&b.poly))
    }

    pub fn sub(&self, other: &Cyclo) -> Cyclo {
        let (a, b) = Cyclo::common(self, other);
        Cyclo::new(a.order, a.poly.sub(&b.poly))
    }

    pub fn mul(&self, other: &Cyclo) -> Cyclo {
        let (a, b) = Cyclo::common(self, other);
        Cyclo::new(a.order, a.poly.mul(&b.poly))
    }

    pub fn neg(&self) -> Cyclo {
        Cyclo { order: self.order, poly: self.poly.neg() }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Cyclo> {
        if self.is_zero() {
            return None;
        }
        let phi = cyclotomic_poly(self.order);
        let (g, s, _) = self.poly.ext_gcd(&phi);
        debug_assert_eq!(g, UPoly::one());
        Some(Cyclo::new(self.order, s))
    }

    /// Complex conjugate (`ζ -> ζ^{-1} = ζ^{m-1}`).
    pub fn conj(&self) -> Cyclo {
        let m = self.order as usize;
        let mut out = UPoly::zero();
        for (i, c) in self.poly.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            out = out.add(&UPoly::monomial(c.clone(), (m - i) % m));
        }
        Cyclo::new(self.order, out)
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    pub fn to_c64(&self) -> Complex64 {
        let m = self.order as f64;
        self.poly
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let angle = 2.0 * std::f64::consts::PI * i as f64 / m;
                Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), angle)
            })
            .sum()
    }

    pub fn pow(&self, mut e: u32) -> Cyclo {
        let mut base = self.clone();
        let mut acc = Cyclo::from_rational(self.order, Q::one());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(*cyclotomic_poly(1), UPoly::from_ints(&[-1, 1]));
        assert_eq!(*cyclotomic_poly(3), UPoly::from_ints(&[1, 1, 1]));
        assert_eq!(*cyclotomic_poly(4), UPoly::from_ints(&[1, 0, 1]));
        assert_eq!(*cyclotomic_poly(6), UPoly::from_ints(&[1, -1, 1]));
        assert_eq!(cyclotomic_poly(12).degree(), Some(4));
    }

    #[test]
    fn zeta_has_exact_order() {
        for m in [3u32, 5, 6, 8, 12] {
            let z = Cyclo::zeta(m);
            assert_eq!(z.pow(m).as_rational(), Some(Q::one()));
            for j in 1..m {
                assert_ne!(z.pow(j).as_rational(), Some(Q::one()));
            }
        }
    }

    #[test]
    fn inverse_and_mixed_fields() {
        let z3 = Cyclo::zeta(3);
        let z4 = Cyclo::zeta(4);
        let s = z3.add(&z4);
        assert_eq!(s.order(), 12);
        let prod = s.mul(&s.inv().unwrap());
        assert_eq!(prod.as_rational(), Some(Q::one()));
        let c = s.to_c64();
        assert!((c.re - (-0.5)).abs() < 1e-12 && (c.im - (3f64.sqrt() / 2.0 + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn conjugation_detects_real_elements() {
        let z = Cyclo::zeta(5);
        assert!(z.add(&z.conj()).is_real());
        assert!(!z.is_real());
    }
}
