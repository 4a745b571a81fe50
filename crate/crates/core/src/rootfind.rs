//! Numeric root finding: bracketed bisection-secant for monotone scalar
//! functions and simultaneous iteration for complex polynomial roots.

use num_complex::Complex64;

use crate::{Error, Result};

pub const ROOT_TOL: f64 = 1e-12;
pub const MAX_ITER: usize = 200;

/// Root of `f` in `[lo, hi]` where `f(lo)` and `f(hi)` differ in sign.
///
/// Takes a secant (regula falsi, Illinois variant) step when it lands well
/// inside the bracket and bisects otherwise. Stops when the bracket is
/// shorter than `tol * max(1, |x|)` or `f` vanishes.
pub fn bisect_secant(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Result<f64> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::RootFinding(format!("no sign change on [{a}, {b}]")));
    }
    let mut side = 0i8;
    for it in 0..max_iter {
        let width = b - a;
        if width <= tol * 1f64.max(a.abs().max(b.abs())) {
            return Ok(0.5 * (a + b));
        }
        let secant = (a * fb - b * fa) / (fb - fa);
        let inside = secant.is_finite() && secant > a + 0.01 * width && secant < b - 0.01 * width;
        let x = if inside && it % 4 != 3 { secant } else { 0.5 * (a + b) };
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if !fx.is_finite() {
            return Err(Error::RootFinding(format!("non-finite value at {x}")));
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    let width = b - a;
    if width <= 1e3 * tol * 1f64.max(a.abs().max(b.abs())) {
        return Ok(0.5 * (a + b));
    }
    Err(Error::RootFinding(format!("no convergence after {max_iter} iterations")))
}

/// Grows `[x0, x0 + step]` geometrically in the direction of `step` until
/// `f` changes sign; returns the bracket.
pub fn expand_bracket(f: impl Fn(f64) -> f64, x0: f64, step: f64, max_steps: usize) -> Option<(f64, f64)> {
    let f0 = f(x0);
    let mut prev = x0;
    let mut s = step;
    for _ in 0..max_steps {
        let x = x0 + s;
        let fx = f(x);
        if !fx.is_finite() {
            return None;
        }
        if fx == 0.0 || fx.signum() != f0.signum() {
            return Some(if prev < x { (prev, x) } else { (x, prev) });
        }
        prev = x;
        s *= 2.0;
    }
    None
}

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All complex roots of `Σ coeffs[i] z^i` (with multiplicity) by
/// Aberth–Ehrlich iteration followed by Newton polishing.
pub fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|z| z.norm() == 0.0) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let mut roots = Vec::with_capacity(n);
    // strip roots at zero
    let zeros = c.iter().take_while(|z| z.norm() == 0.0).count();
    roots.extend(std::iter::repeat(Complex64::new(0.0, 0.0)).take(zeros));
    let c: Vec<Complex64> = c[zeros..].to_vec();
    let n = c.len() - 1;
    if n == 0 {
        return roots;
    }
    if n == 1 {
        roots.push(-c[0] / c[1]);
        return roots;
    }
    if n == 2 {
        let (a, b, cc) = (c[2], c[1], c[0]);
        let disc = (b * b - 4.0 * a * cc).sqrt();
        let q = if (b.conj() * disc).re >= 0.0 { -0.5 * (b + disc) } else { -0.5 * (b - disc) };
        if q.norm() == 0.0 {
            roots.extend([Complex64::new(0.0, 0.0); 2]);
        } else {
            roots.push(q / a);
            roots.push(cc / q);
        }
        return roots;
    }
    let lead = c[n];
    let radius = 1.0 + c[..n].iter().map(|z| (z / lead).norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            Complex64::from_polar(0.5 * radius, t)
        })
        .collect();
    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = horner(&c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                max_step = max_step.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    for r in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(&c, *r);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !step.is_finite() {
                break;
            }
            *r -= step;
        }
    }
    roots.extend(z);
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_root_of_two() {
        let r = bisect_secant(|x| x * x * x - 2.0, 0.0, 2.0, ROOT_TOL, MAX_ITER).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-11);
    }

    #[test]
    fn no_sign_change_is_an_error() {
        assert!(bisect_secant(|x| x * x + 1.0, -1.0, 1.0, ROOT_TOL, MAX_ITER).is_err());
    }

    #[test]
    fn bracket_expansion() {
        let (a, b) = expand_bracket(|x| x - 100.0, 0.0, 1.0, 20).unwrap();
        assert!(a <= 100.0 && 100.0 <= b);
    }

    #[test]
    fn polynomial_roots() {
        // (z - 1)(z - 2)(z^2 + 1)
        let c: Vec<Complex64> = [2.0, -3.0, 3.0, -3.0, 1.0].iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let mut r = poly_roots(&c);
        r.sort_by_key(|z| ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64));
        let expected = [
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
        ];
        for (a, b) in r.iter().zip(expected.iter()) {
            assert!((a - b).norm() < 1e-10, "{a} vs {b}");
        }
    }
}
