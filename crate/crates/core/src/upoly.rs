//! Dense univariate polynomials over the rationals.
//!
//! Used for cyclotomic field arithmetic, root-of-unity tests and the
//! rational-root search in factor splitting.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::Q;

/// Coefficients are stored low degree first; trailing zeros are trimmed.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct UPoly {
    coeffs: Vec<Q>,
}

impl UPoly {
    pub fn zero() -> Self {
        UPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        UPoly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        UPoly::new(vec![c])
    }

    /// `t^n`.
    pub fn monomial(c: Q, n: usize) -> Self {
        let mut coeffs = vec![Q::zero(); n + 1];
        coeffs[n] = c;
        UPoly::new(coeffs)
    }

    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        UPoly::new(coeffs.iter().map(|&c| Q::from_integer(c.into())).collect())
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.coeffs.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lc(&self) -> Q {
        self.coeffs.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn add(&self, other: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UPoly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UPoly::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn neg(&self) -> UPoly {
        UPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, s: &Q) -> UPoly {
        UPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &UPoly) -> UPoly {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![Q::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UPoly::new(out)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, divisor: &UPoly) -> (UPoly, UPoly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lc_inv = divisor.lc().recip();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (UPoly::zero(), self.clone());
        }
        let mut quot = vec![Q::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = &rem[i] * &lc_inv;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                let idx = i - dd + j;
                rem[idx] -= &c * d;
            }
            quot[i - dd] = c;
        }
        rem.truncate(dd);
        (UPoly::new(quot), UPoly::new(rem))
    }

    pub fn rem(&self, divisor: &UPoly) -> UPoly {
        self.divrem(divisor).1
    }

    pub fn monic(&self) -> UPoly {
        if self.is_zero() {
            return UPoly::zero();
        }
        self.scale(&self.lc().recip())
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `s*self + t*other = g` and `g` monic.
    pub fn ext_gcd(&self, other: &UPoly) -> (UPoly, UPoly, UPoly) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (UPoly::one(), UPoly::zero());
        let (mut t0, mut t1) = (UPoly::zero(), UPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.lc().recip();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Q::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// `self(t^r)`.
    pub fn inflate(&self, r: usize) -> UPoly {
        if self.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![Q::zero(); (self.coeffs.len() - 1) * r + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i * r] = c.clone();
        }
        UPoly::new(out)
    }

    /// Integer polynomial with the same roots (content removed, positive leading coefficient).
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Q::from_integer(lcm.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let sign = if ints.last().unwrap().is_negative() { -BigInt::one() } else { BigInt::one() };
        ints.into_iter().map(|c| c / &g * &sign).collect()
    }

    /// All rational roots (without multiplicity). Candidate enumeration is
    /// skipped when the constant or leading coefficient has too many divisors.
    pub fn rational_roots(&self) -> Vec<Q> {
        let mut roots = Vec::new();
        let mut p = self.clone();
        // strip zero roots
        if p.degree().is_some_and(|d| d > 0) && p.coeff(0).is_zero() {
            roots.push(Q::zero());
            while p.coeff(0).is_zero() && !p.is_zero() {
                p = UPoly::new(p.coeffs[1..].to_vec());
            }
        }
        if p.degree().unwrap_or(0) == 0 {
            return roots;
        }
        let ints = p.primitive_integer();
        let a0 = ints[0].abs();
        let an = ints.last().unwrap().abs();
        let (Some(num_divs), Some(den_divs)) = (small_divisors(&a0), small_divisors(&an)) else {
            return roots;
        };
        for n in &num_divs {
            for d in &den_divs {
                for sign in [1i32, -1] {
                    let cand = Q::new(n * BigInt::from(sign), d.clone());
                    if !roots.contains(&cand) && p.eval(&cand).is_zero() {
                        roots.push(cand);
                    }
                }
            }
        }
        roots
    }
}

fn small_divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    const LIMIT: u64 = 1_000_000;
    let n: u64 = n.try_into().ok()?;
    if n == 0 || n > LIMIT * LIMIT {
        return None;
    }
    let mut out = Vec::new();
    let mut i = 1u64;
    while i * i <= n {
        if n % i == 0 {
            out.push(BigInt::from(i));
            if i * i != n {
                out.push(BigInt::from(n / i));
            }
        }
        i += 1;
        if i > LIMIT {
            return None;
        }
    }
    Some(out)
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*t")?,
                _ => write!(f, "{c}*t^{i}")?,
            }
        }
        Ok(())
    }
}
