//! Sparse multivariate polynomials with [`Scalar`] coefficients.
//!
//! Terms live in a `BTreeMap` keyed by exponent vectors, so the term order is
//! lexicographic with variable 0 most significant and equality is structural.
//! GCD, exact division and pseudo-remainders work recursively in the highest
//! variable over exact coefficient fields.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::Scalar;
use crate::upoly::UPoly;
use crate::Q;

pub type Exponents = Vec<u32>;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponents, Scalar>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Scalar::one())
    }

    /// The polynomial `x_var`.
    pub fn var(nvars: usize, var: usize) -> Self {
        Poly::monomial(nvars, var, 1, Scalar::one())
    }

    /// `c * x_var^e`.
    pub fn monomial(nvars: usize, var: usize, e: u32, c: Scalar) -> Self {
        let mut exps = vec![0; nvars];
        exps[var] = e;
        let mut p = Poly::zero(nvars);
        p.add_term(exps, c);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponents, Scalar)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Scalar)> {
        self.terms.iter()
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    /// Adds `c * x^e` in place, dropping the term if it cancels.
    pub fn add_term(&mut self, e: Exponents, c: Scalar) {
        debug_assert_eq!(e.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(existing) => {
                let s = &*existing + &c;
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *existing = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn constant_value(&self) -> Option<Scalar> {
        if self.is_zero() {
            return Some(Scalar::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn is_exact(&self) -> bool {
        self.terms.values().all(Scalar::is_exact)
    }

    pub fn coeff(&self, e: &[u32]) -> Scalar {
        self.terms.get(e).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn uses(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e[var] > 0)
    }

    pub fn used_vars(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&v| self.uses(v)).collect()
    }

    /// Leading term coefficient in the map order (largest exponent vector).
    pub fn lc(&self) -> Scalar {
        self.terms.values().next_back().cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn leading_exponents(&self) -> Option<&Exponents> {
        self.terms.keys().next_back()
    }

    pub fn scale(&self, s: &Scalar) -> Poly {
        if s.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), c * s)))
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lc().inv().expect("nonzero leading coefficient"))
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> Poly {
        self.scale(&Scalar::int(-1))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::one(self.nvars);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Multiplies by `x_var^e`.
    pub fn shift(&self, var: usize, e: u32) -> Poly {
        Poly::from_terms(
            self.nvars,
            self.terms.iter().map(|(ex, c)| {
                let mut ex = ex.clone();
                ex[var] += e;
                (ex, c.clone())
            }),
        )
    }

    /// Evaluates at a point; panics on arity mismatch.
    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        self.eval_scaled(point).0
    }

    /// Value together with the sum of the moduli of the term values, used as
    /// the scale for relative float zero tests.
    pub fn eval_scaled(&self, point: &[Scalar]) -> (Scalar, f64) {
        assert_eq!(point.len(), self.nvars, "evaluation arity mismatch");
        let exact = point.iter().all(Scalar::is_exact);
        let mut acc = Scalar::zero();
        let mut scale = 0.0f64;
        let mut powers: Vec<Vec<Scalar>> = point.iter().map(|p| vec![Scalar::one(), p.clone()]).collect();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (v, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let pw = &mut powers[v];
                while pw.len() <= k as usize {
                    let next = &pw[pw.len() - 1] * &pw[1];
                    pw.push(next);
                }
                t = &t * &pw[k as usize];
            }
            if !exact {
                scale += t.abs_f64();
            }
            acc = &acc + &t;
        }
        (acc, scale)
    }

    /// Substitutes `x_var = value`.
    pub fn specialize(&self, var: usize, value: &Scalar) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = e2[var];
            e2[var] = 0;
            out.add_term(e2, c * &value.pow(k as i32).expect("nonnegative power"));
        }
        out
    }

    /// Reindexes variables: variable `v` becomes `mapping[v]` in a ring with
    /// `nvars` variables.
    pub fn remap(&self, nvars: usize, mapping: &[usize]) -> Poly {
        let mut out = Poly::zero(nvars);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; nvars];
            for (v, &k) in e.iter().enumerate() {
                e2[mapping[v]] += k;
            }
            out.add_term(e2, c.clone());
        }
        out
    }

    /// Drops trailing variables which must be unused.
    pub fn truncate_vars(&self, nvars: usize) -> Poly {
        debug_assert!((nvars..self.nvars).all(|v| !self.uses(v)));
        Poly::from_terms(nvars, self.terms.iter().map(|(e, c)| (e[..nvars].to_vec(), c.clone())))
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            out.add_term(e2, c * &Scalar::int(e[var] as i64));
        }
        out
    }

    /// Coefficients as a polynomial in `var`: entry `i` multiplies `x_var^i`.
    pub fn coeffs_in(&self, var: usize) -> Vec<Poly> {
        let d = self.degree_in(var) as usize;
        let mut out = vec![Poly::zero(self.nvars); if self.is_zero() { 0 } else { d + 1 }];
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = e2[var] as usize;
            e2[var] = 0;
            out[k].add_term(e2, c.clone());
        }
        out
    }

    pub fn lc_in(&self, var: usize) -> Poly {
        self.coeffs_in(var).pop().unwrap_or_else(|| Poly::zero(self.nvars))
    }

    /// Univariate view over the rationals; `None` if another variable occurs
    /// or a coefficient is not rational.
    pub fn to_upoly(&self, var: usize) -> Option<UPoly> {
        let mut coeffs = vec![Q::from_integer(0.into()); self.degree_in(var) as usize + 1];
        for (e, c) in &self.terms {
            if e.iter().enumerate().any(|(v, &k)| v != var && k > 0) {
                return None;
            }
            coeffs[e[var] as usize] = c.as_rational()?.clone();
        }
        Some(UPoly::new(coeffs))
    }

    pub fn from_upoly(nvars: usize, var: usize, p: &UPoly) -> Poly {
        Poly::from_terms(
            nvars,
            p.coeffs().iter().enumerate().map(|(i, c)| {
                let mut e = vec![0; nvars];
                e[var] = i as u32;
                (e, Scalar::Rational(c.clone()))
            }),
        )
    }

    /// Exact quotient `self / divisor`, or `None` if the division leaves a
    /// remainder. Requires exact coefficients for a meaningful answer.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero(self.nvars));
        }
        if let Some(c) = divisor.constant_value() {
            return Some(self.scale(&c.inv()?));
        }
        let var = *divisor.used_vars().last().unwrap();
        let db = divisor.degree_in(var);
        let lcb = divisor.lc_in(var);
        let mut quot = Poly::zero(self.nvars);
        let mut rem = self.clone();
        while !rem.is_zero() {
            let dr = rem.degree_in(var);
            if dr < db {
                return None;
            }
            let t = rem.lc_in(var).div_exact(&lcb)?.shift(var, dr - db);
            rem = rem.sub(&t.mul(divisor));
            quot = quot.add(&t);
        }
        Some(quot)
    }

    /// Pseudo-remainder of `self` by `divisor` with respect to `var`.
    pub fn prem(&self, divisor: &Poly, var: usize) -> Poly {
        let db = divisor.degree_in(var);
        let lcb = divisor.lc_in(var);
        let mut rem = self.clone();
        while !rem.is_zero() && rem.uses(var) && rem.degree_in(var) >= db {
            let dr = rem.degree_in(var);
            let lcr = rem.lc_in(var);
            rem = rem.mul(&lcb).sub(&lcr.shift(var, dr - db).mul(divisor));
        }
        if db == 0 && !rem.is_zero() {
            // divisor free of var: everything divides
            return Poly::zero(self.nvars);
        }
        rem
    }

    /// GCD of the coefficients with respect to `var` (a polynomial free of `var`).
    pub fn content_in(&self, var: usize) -> Poly {
        let mut g = Poly::zero(self.nvars);
        for c in self.coeffs_in(var) {
            if c.is_zero() {
                continue;
            }
            g = g.gcd(&c);
            if g.constant_value().is_some() {
                break;
            }
        }
        g
    }

    pub fn primitive_part_in(&self, var: usize) -> Poly {
        let c = self.content_in(var);
        self.div_exact(&c).expect("content divides")
    }

    /// Monic greatest common divisor over the coefficient field. For inexact
    /// coefficients the result is the constant 1.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let n = self.nvars;
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if !self.is_exact() || !other.is_exact() || self.is_constant() || other.is_constant() {
            return Poly::one(n);
        }
        let mut vars = self.used_vars();
        vars.extend(other.used_vars());
        vars.sort_unstable();
        vars.dedup();
        if vars.len() > 1 && self.coprime_by_evaluation(other, &vars) {
            return Poly::one(n);
        }
        if vars.len() > 1 {
            if let (Some(a), Some(b)) = (self.integer_primitive(), other.integer_primitive()) {
                if let Some(g) = heuristic_gcd(&a, &b, &vars) {
                    return g.monic();
                }
            }
        }
        let var = *vars.iter().max().unwrap();
        if !self.uses(var) {
            return self.gcd(&other.content_in(var));
        }
        if !other.uses(var) {
            return self.content_in(var).gcd(other);
        }
        let ca = self.content_in(var);
        let cb = other.content_in(var);
        let g = ca.gcd(&cb);
        let mut r0 = self.div_exact(&ca).unwrap();
        let mut r1 = other.div_exact(&cb).unwrap();
        if r0.degree_in(var) < r1.degree_in(var) {
            std::mem::swap(&mut r0, &mut r1);
        }
        loop {
            let r = r0.prem(&r1, var);
            if r.is_zero() {
                break;
            }
            if !r.uses(var) {
                r1 = Poly::one(n);
                break;
            }
            r0 = r1;
            r1 = r.primitive_part_in(var);
        }
        let pp = if r1.uses(var) { r1.primitive_part_in(var) } else { Poly::one(n) };
        g.mul(&pp).monic()
    }

    /// True when specializations show the GCD is free of every variable.
    /// Specializing all variables but `v` at a point where both leading
    /// coefficients in `v` survive can only raise the degree of the GCD in
    /// `v`, so a constant univariate GCD there settles `v`.
    fn coprime_by_evaluation(&self, other: &Poly, vars: &[usize]) -> bool {
        'var: for &v in vars {
            let (da, db) = (self.degree_in(v), other.degree_in(v));
            if da == 0 || db == 0 {
                continue;
            }
            for attempt in 0..3i64 {
                let mut a = self.clone();
                let mut b = other.clone();
                for (i, &w) in vars.iter().enumerate().filter(|&(_, &w)| w != v) {
                    let x = Scalar::int((3 + 7 * attempt + 5 * i as i64) * if i % 2 == 0 { 1 } else { -1 });
                    a = a.specialize(w, &x);
                    b = b.specialize(w, &x);
                }
                let (Some(ua), Some(ub)) = (a.to_upoly(v), b.to_upoly(v)) else { return false };
                if ua.degree() != Some(da as usize) || ub.degree() != Some(db as usize) {
                    continue;
                }
                if ua.gcd(&ub).degree() == Some(0) {
                    continue 'var;
                }
                return false;
            }
            return false;
        }
        true
    }

    /// Integer coefficients with content 1, when all coefficients are
    /// rational.
    fn integer_primitive(&self) -> Option<Poly> {
        let mut l = BigInt::one();
        for c in self.terms.values() {
            l = l.lcm(c.as_rational()?.denom());
        }
        let ints: Vec<BigInt> = self.terms.values().map(|c| (c.as_rational().unwrap() * Q::from_integer(l.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if g.is_zero() {
            return None;
        }
        Some(Poly {
            nvars: self.nvars,
            terms: self.terms.keys().cloned().zip(ints).map(|(e, c)| (e, Scalar::Rational(Q::from_integer(c / &g)))).collect(),
        })
    }

    fn max_int_coeff(&self) -> BigInt {
        self.terms.values().filter_map(|c| c.as_rational()).map(|q| q.numer().abs()).max().unwrap_or_default()
    }

    /// Splits into pairwise coprime non-constant monic factors whose product
    /// has the same zero set. Uses monomial content, contents in each
    /// variable, squarefree decomposition and rational roots of univariate
    /// parts; it is not a complete factorization over Q.
    pub fn split_factors(&self) -> Vec<Poly> {
        let mut out: Vec<Poly> = Vec::new();
        self.split_into(&mut out);
        out
    }

    fn split_into(&self, out: &mut Vec<Poly>) {
        if self.is_zero() || self.is_constant() {
            return;
        }
        let n = self.nvars;
        let mut p = self.monic();
        // monomial content
        for v in 0..n {
            let m = p.terms.keys().map(|e| e[v]).min().unwrap_or(0);
            if m > 0 {
                push_factor(out, Poly::var(n, v));
                p = Poly::from_terms(
                    n,
                    p.terms.iter().map(|(e, c)| {
                        let mut e = e.clone();
                        e[v] -= m;
                        (e, c.clone())
                    }),
                );
            }
        }
        if p.is_constant() {
            return;
        }
        if !p.is_exact() {
            push_factor(out, p);
            return;
        }
        let used = p.used_vars();
        if used.len() > 1 {
            for &v in &used {
                let c = p.content_in(v);
                if !c.is_constant() {
                    c.split_into(out);
                    p.div_exact(&c).unwrap().split_into(out);
                    return;
                }
            }
        }
        for &v in &used {
            let g = p.gcd(&p.derivative(v));
            if !g.is_constant() {
                g.split_into(out);
                let rest = p.div_exact(&g).unwrap();
                // rest and g share the repeated factors; remove them
                let mut r = rest;
                for f in out.clone() {
                    while let Some(qt) = r.div_exact(&f) {
                        if f.is_constant() {
                            break;
                        }
                        r = qt;
                    }
                }
                r.split_into(out);
                return;
            }
        }
        if used.len() == 1 {
            let v = used[0];
            if let Some(u) = p.to_upoly(v) {
                let roots = u.rational_roots();
                if !roots.is_empty() && u.degree().unwrap() > 1 {
                    let mut rest = u;
                    for r in roots {
                        let lin = UPoly::new(vec![-r, Q::from_integer(1.into())]);
                        push_factor(out, Poly::from_upoly(n, v, &lin));
                        rest = rest.divrem(&lin).0;
                    }
                    Poly::from_upoly(n, v, &rest).split_into(out);
                    return;
                }
            }
        }
        push_factor(out, p);
    }

    /// Renders with the given variable names.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

/// Heuristic GCD of integer polynomials: evaluate the last variable at a
/// large integer, recurse, rebuild from the balanced base-`xi` digits and
/// accept the candidate only if it divides both inputs.
fn heuristic_gcd(a: &Poly, b: &Poly, vars: &[usize]) -> Option<Poly> {
    let n = a.nvars;
    let content = |p: &Poly| p.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c.as_rational().unwrap().numer()));
    let (ca, cb) = (content(a), content(b));
    if ca.is_zero() || cb.is_zero() {
        return None;
    }
    let cg = Scalar::Rational(Q::from_integer(ca.gcd(&cb)));
    let Some((&x, rest)) = vars.split_last() else {
        return Some(Poly::constant(n, cg));
    };
    if !a.uses(x) && !b.uses(x) {
        return heuristic_gcd(a, b, rest);
    }
    let a = &a.scale(&Scalar::Rational(Q::new(BigInt::one(), ca)));
    let b = &b.scale(&Scalar::Rational(Q::new(BigInt::one(), cb)));
    let deg = a.degree_in(x).max(b.degree_in(x)) as u64 + 1;
    let mut xi: BigInt = 2 * a.max_int_coeff().min(b.max_int_coeff()) + 29;
    for _ in 0..6 {
        if xi.bits() * deg > 4000 {
            return None;
        }
        let at = Scalar::Rational(Q::from_integer(xi.clone()));
        if let Some(g) = heuristic_gcd(&a.specialize(x, &at), &b.specialize(x, &at), rest) {
            let cand = from_balanced_digits(g, &xi, x).integer_primitive();
            if let Some(c) = cand {
                if a.div_exact(&c).is_some() && b.div_exact(&c).is_some() {
                    return Some(c.scale(&cg));
                }
            }
        }
        xi = xi * 73794 / 27011;
    }
    None
}

fn from_balanced_digits(mut g: Poly, xi: &BigInt, x: usize) -> Poly {
    let half: BigInt = xi / 2;
    let mut out = Poly::zero(g.nvars);
    let mut i = 0u32;
    while !g.is_zero() && i < 10_000 {
        let digit = Poly {
            nvars: g.nvars,
            terms: g
                .terms
                .iter()
                .filter_map(|(e, c)| {
                    let mut r = c.as_rational()?.numer().mod_floor(xi);
                    if r > half {
                        r -= xi;
                    }
                    (!r.is_zero()).then(|| (e.clone(), Scalar::Rational(Q::from_integer(r))))
                })
                .collect(),
        };
        out = out.add(&digit.shift(x, i));
        g = g.sub(&digit).scale(&Scalar::Rational(Q::new(BigInt::one(), xi.clone())));
        i += 1;
    }
    out
}

fn push_factor(out: &mut Vec<Poly>, f: Poly) {
    if f.is_constant() {
        return;
    }
    let f = f.monic();
    // keep the list pairwise coprime
    let mut rest = f;
    for g in out.iter() {
        while let Some(qt) = rest.div_exact(g) {
            rest = qt;
            if rest.is_constant() {
                return;
            }
        }
    }
    if !rest.is_constant() && !out.contains(&rest) {
        out.push(rest.monic());
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    names: &'a [String],
}

fn needs_parens(c: &Scalar) -> bool {
    let s = c.to_string();
    s.contains(['+', '/']) || s[1..].contains('-')
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        // highest terms first
        for (e, c) in self.poly.terms.iter().rev() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(v, &k)| {
                    let name = self.names.get(v).cloned().unwrap_or_else(|| format!("v{v}"));
                    if k == 1 {
                        name
                    } else {
                        format!("{name}^{k}")
                    }
                })
                .collect();
            let (neg, mag) = match c {
                Scalar::Rational(r) if r < &Q::from_integer(0.into()) => (true, Scalar::Rational(-r)),
                Scalar::Float(x) if *x < 0.0 => (true, Scalar::Float(-x)),
                other => (false, other.clone()),
            };
            let coef = if needs_parens(&mag) { format!("({mag})") } else { mag.to_string() };
            let body = if mono.is_empty() {
                coef
            } else if mag.is_one() {
                mono.join("*")
            } else {
                format!("{coef}*{}", mono.join("*"))
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                write!(f, "{body}")?;
            } else {
                write!(f, " {} {body}", if neg { "-" } else { "+" })?;
            }
            first = false;
        }
        Ok(())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|v| format!("v{v}")).collect();
        write!(f, "{}", self.display_with(&names))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x(v: usize) -> Poly {
        Poly::var(3, v)
    }

    fn c(n: i64) -> Poly {
        Poly::constant(3, Scalar::int(n))
    }

    #[test]
    fn gcd_with_shared_factor_in_three_vars() {
        let g = x(0).add(&x(1).scale(&Scalar::int(3))).add(&x(2).mul(&x(0))).add(&c(1));
        let a = g.mul(&x(0).sub(&x(1).scale(&Scalar::int(2)))).mul(&g);
        let b = g.mul(&x(1).mul(&x(2)).add(&c(7)));
        assert_eq!(a.gcd(&b), g.monic());
        assert_eq!(a.scale(&Scalar::ratio(2, 3)).gcd(&b.scale(&Scalar::ratio(-5, 7))), g.monic());
        assert!(a.gcd(&b.add(&c(1))).is_constant());
    }

    #[test]
    fn gcd_finds_common_factor() {
        // (1 + x + y z) * (x - 2), (1 + x + y z) * (y + 3)
        let f = c(1).add(&x(0)).add(&x(1).mul(&x(2)));
        let a = f.mul(&x(0).sub(&c(2)));
        let b = f.mul(&x(1).add(&c(3)));
        assert_eq!(a.gcd(&b), f.monic());
    }

    #[test]
    fn gcd_coprime_is_one() {
        let a = x(0).add(&x(1));
        let b = x(0).sub(&x(1));
        assert_eq!(a.gcd(&b), Poly::one(3));
    }

    #[test]
    fn div_exact_detects_remainder() {
        let a = x(0).mul(&x(0)).sub(&c(1));
        assert_eq!(a.div_exact(&x(0).sub(&c(1))), Some(x(0).add(&c(1))));
        assert_eq!(a.div_exact(&x(0)), None);
    }

    #[test]
    fn split_monomials_and_linear_factors() {
        let p = x(0).mul(&x(1)).mul(&x(0).add(&x(1)));
        let mut fs = p.split_factors();
        fs.sort_by_key(|f| f.to_string());
        assert_eq!(fs.len(), 3);
        let q = x(0).mul(&x(0)).sub(&c(1)); // (x-1)(x+1)
        assert_eq!(q.split_factors().len(), 2);
    }

    #[test]
    fn eval_exact() {
        // 1/(x^2 - 1) denominator at 3 -> 8
        let p = x(0).mul(&x(0)).sub(&c(1));
        let v = p.eval(&[Scalar::int(3), Scalar::zero(), Scalar::zero()]);
        assert_eq!(v, Scalar::int(8));
    }

    fn small_poly() -> impl Strategy<Value = Poly> {
        proptest::collection::vec(((0u32..3, 0u32..3), -4i64..5), 1..4).prop_map(|ts| {
            Poly::from_terms(2, ts.into_iter().map(|((a, b), k)| (vec![a, b], Scalar::int(k))))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn gcd_divides_both(a in small_poly(), b in small_poly(), f in small_poly()) {
            let a = a.mul(&f);
            let b = b.mul(&f);
            let g = a.gcd(&b);
            if !a.is_zero() || !b.is_zero() {
                prop_assert!(a.div_exact(&g).is_some());
                prop_assert!(b.div_exact(&g).is_some());
                if !f.is_zero() {
                    // the planted factor divides the gcd
                    prop_assert!(g.div_exact(&f).is_some() || a.is_zero() || b.is_zero());
                }
            }
        }
    }
}
