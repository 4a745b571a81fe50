//! Real root isolation for integer polynomials by Descartes' rule of signs
//! on dyadic intervals (Vincent, Collins and Akritas), with exact
//! refinement by bisection.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::upoly::UPoly;

/// Sign variations of a coefficient list, zeros skipped.
fn variations(c: &[BigInt]) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for x in c {
        let s = if x.is_positive() {
            1
        } else if x.is_negative() {
            -1
        } else {
            continue;
        };
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// `p(x + 1)` by repeated synthetic division.
fn taylor_shift(p: &[BigInt]) -> Vec<BigInt> {
    let mut c = p.to_vec();
    let n = c.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = c[j + 1].clone();
            c[j] += t;
        }
    }
    c
}

/// Upper bound on the number of roots in `(0, 1)`.
fn descartes_01(p: &[BigInt]) -> usize {
    let mut rev = p.to_vec();
    rev.reverse();
    variations(&taylor_shift(&rev))
}

/// `2^n p(x / 2)`.
fn halve(p: &[BigInt]) -> Vec<BigInt> {
    let n = p.len() - 1;
    p.iter().enumerate().map(|(i, c)| c << (n - i)).collect()
}

/// Sign of `p(a / 2^k)`.
fn sign_at(p: &[BigInt], a: &BigInt, k: u32) -> i8 {
    // sum c_i a^i 2^(k(n-i))
    let n = p.len() - 1;
    let mut acc = BigInt::zero();
    let mut apow = BigInt::one();
    for (i, c) in p.iter().enumerate() {
        acc += c * &apow << (k as usize * (n - i));
        apow *= a;
    }
    if acc.is_positive() {
        1
    } else if acc.is_negative() {
        -1
    } else {
        0
    }
}

/// Isolating intervals `(c / 2^k, (c + 1) / 2^k)` of the roots of `p` in
/// `(0, 1)`, plus exact dyadic roots as `(c, k, true)`.
fn isolate_01(p: Vec<BigInt>, c: BigInt, k: u32, out: &mut Vec<(BigInt, u32, bool)>) {
    let v = descartes_01(&p);
    if v == 0 {
        return;
    }
    if v == 1 {
        out.push((c, k, false));
        return;
    }
    let left = halve(&p);
    let right = taylor_shift(&left);
    // midpoint root
    if right[0].is_zero() {
        out.push((2 * &c + 1, k + 1, true));
    }
    let mut right = right;
    if right[0].is_zero() {
        // divide by x
        right.remove(0);
    }
    isolate_01(left, 2 * &c, k + 1, out);
    if right.len() > 1 {
        isolate_01(right, 2 * c + 1, k + 1, out);
    }
}

fn to_f64(a: &BigInt, k: u32) -> f64 {
    // a / 2^k without overflow for large k
    let bits = a.bits() as i64;
    let shift = (bits - 60).max(0) as usize;
    let head = (a >> shift).to_f64().unwrap_or(0.0);
    head * 2f64.powi(shift as i32 - k as i32)
}

/// Roots of the squarefree integer polynomial `p` in `(0, bound)`, with
/// `bound = 2^e` above every root.
fn positive_roots(p: &[BigInt], e: u32, rel_tol: f64) -> Vec<f64> {
    // q(y) = p(2^e y)
    let q: Vec<BigInt> = p.iter().enumerate().map(|(i, c)| c << (e as usize * i)).collect();
    let mut found = Vec::new();
    isolate_01(q.clone(), BigInt::zero(), 0, &mut found);
    let mut roots = Vec::with_capacity(found.len());
    for (c, k, exact) in found {
        if exact {
            roots.push(to_f64(&c, k) * 2f64.powi(e as i32));
            continue;
        }
        // bisect on q over (c/2^k, (c+1)/2^k)
        let (mut lo, mut kk) = (c, k);
        let mut s_lo = sign_at(&q, &lo, kk);
        if s_lo == 0 {
            // the left end is another root: take the sign just inside
            let inner = (&lo << 64usize) + 1;
            s_lo = sign_at(&q, &inner, kk + 64);
        }
        loop {
            let x = to_f64(&lo, kk) * 2f64.powi(e as i32);
            let width = 2f64.powi(e as i32 - kk as i32);
            if width <= rel_tol * x.abs().max(1e-300) || kk > 2000 {
                roots.push(x + 0.5 * width);
                break;
            }
            let mid = 2 * &lo + 1;
            kk += 1;
            let s = sign_at(&q, &mid, kk);
            if s == 0 {
                roots.push(to_f64(&mid, kk) * 2f64.powi(e as i32));
                break;
            }
            lo = if s == s_lo { mid } else { 2 * lo };
        }
    }
    roots
}

/// All distinct real roots of `p`, ascending, each within `rel_tol`
/// relative error.
pub fn real_roots(p: &UPoly, rel_tol: f64) -> Vec<f64> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let g = p.gcd(&p.derivative());
    let sf = if g.degree().unwrap_or(0) > 0 { p.divrem(&g).0 } else { p.clone() };
    let mut ints = sf.primitive_integer();
    let mut roots = Vec::new();
    if ints[0].is_zero() {
        roots.push(0.0);
        ints.remove(0);
    }
    if ints.len() > 1 {
        // Cauchy bound 1 + max |c_i / c_n|
        let lead = ints.last().unwrap().abs();
        let max = ints[..ints.len() - 1].iter().map(|c| c.abs()).max().unwrap();
        let ratio: BigInt = (&max / &lead) + 2;
        let e = ratio.bits() as u32;
        roots.extend(positive_roots(&ints, e, rel_tol));
        let neg: Vec<BigInt> = ints.iter().enumerate().map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() }).collect();
        roots.extend(positive_roots(&neg, e, rel_tol).into_iter().map(|x| -x));
    }
    roots.sort_by(f64::total_cmp);
    roots
}
