//! Explicit forbidden curves of `x_{n+1} = p + x_{n-1}/x_n`, `p <= -1`.
//!
//! With `F(x, y) = (y, p + x/y)` and inverse `G(x, y) = (x(y - p), x)`, the
//! images `G^n` of the half line `{(t, 0) : t >= 0}` are the graphs
//! `y = g_n^{-1}(x)`, where `g_1(x) = -p x` and
//! `g_{n+1}(x) = x (-p + g_n^{-1}(x))`.

use serde::{Deserialize, Serialize};

use crate::definition::EquationDef;
use crate::map::DifferenceEquation;
use crate::rootfind::{bisect_secant, MAX_ITER};
use crate::scalar::Scalar;
use crate::{Error, Result};

/// The equation `x_{n+1} = p + x_{n-1}/x_n`.
pub fn cdv_equation(p: &Scalar) -> Result<DifferenceEquation> {
    EquationDef::new(2, &format!("({p})*x0 + x1"), "x0").to_equation()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveDiagnostic {
    pub curve: usize,
    pub x: f64,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CdvCurveFamily {
    pub p: f64,
    pub n: usize,
    pub tol: f64,
    /// Bracket failures met while checking the curves at `x = 1, 2, ...`.
    pub diagnostics: Vec<CurveDiagnostic>,
}

/// `G^n(t, 0)`.
fn image(p: f64, n: usize, t: f64) -> (f64, f64) {
    let (mut a, mut b) = (t, 0.0);
    for _ in 0..n {
        (a, b) = (a * (b - p), a);
    }
    (a, b)
}

pub fn cdv_curves(p: f64, n: usize, tol: f64) -> Result<CdvCurveFamily> {
    if !(p <= -1.0) {
        return Err(Error::Invalid(format!("p = {p} must be at most -1")));
    }
    if n == 0 {
        return Err(Error::Invalid("at least one curve is needed".into()));
    }
    let mut fam = CdvCurveFamily { p, n, tol, diagnostics: Vec::new() };
    for curve in 1..=n {
        for x in [0.5, 1.0, 2.0, 10.0] {
            if let Err(e) = fam.g_inv(curve, x) {
                fam.diagnostics.push(CurveDiagnostic { curve, x, message: e.to_string() });
            }
        }
    }
    Ok(fam)
}

impl CdvCurveFamily {
    /// `g_n^{-1}(x)` for `x >= 0`.
    pub fn g_inv(&self, n: usize, x: f64) -> Result<f64> {
        Ok(self.curve_point(n, x)?[1])
    }

    /// The point `G^n(t, 0)` whose first coordinate is closest to `x`.
    /// Unlike `(x, g_inv(x))` it lies on the curve up to rounding.
    pub fn curve_point(&self, n: usize, x: f64) -> Result<[f64; 2]> {
        if n == 0 || n > self.n {
            return Err(Error::Invalid(format!("curve {n} is outside 1..={}", self.n)));
        }
        if x < 0.0 {
            return Err(Error::Invalid("curves are defined for x >= 0".into()));
        }
        let p = self.p;
        if n == 1 {
            return Ok([x, x / -p]);
        }
        if x == 0.0 {
            return Ok([0.0, 0.0]);
        }
        // the first coordinate of G^n(t, 0) grows at least like (-p)^n t
        let hi = x / (-p).powi(n as i32);
        let t = bisect_secant(|t| image(p, n, t).0 - x, 0.0, hi, self.tol, MAX_ITER)?;
        let (a, b) = image(p, n, t);
        Ok([a, b])
    }

    /// `g_n(x)` by the defining operator.
    pub fn g(&self, n: usize, x: f64) -> Result<f64> {
        if n == 1 {
            return Ok(-self.p * x);
        }
        Ok(x * (-self.p + self.g_inv(n - 1, x)?))
    }

    /// Curve points near the given abscissae (oldest value first).
    pub fn sample(&self, n: usize, xs: &[f64]) -> Result<Vec<[f64; 2]>> {
        xs.iter().map(|&x| self.curve_point(n, x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::fastmap::FastMap;

    #[test]
    fn first_curves_by_hand() {
        let fam = cdv_curves(-2.0, 3, 1e-13).unwrap();
        assert_eq!(fam.g_inv(1, 2.0).unwrap(), 1.0);
        // g_2(x) = x (2 + x/2)
        for x in [0.3, 1.0, 4.0] {
            assert!((fam.g(2, x).unwrap() - x * (2.0 + x / 2.0)).abs() < 1e-10);
        }
        assert!(fam.diagnostics.is_empty());
    }

    #[test]
    fn operator_and_inverse_agree() {
        let fam = cdv_curves(-1.5, 5, 1e-13).unwrap();
        for n in 1..=5 {
            for x in [0.1, 1.0, 3.0, 20.0] {
                let y = fam.g_inv(n, x).unwrap();
                assert!((fam.g(n, y).unwrap() - x).abs() < 1e-9 * x.max(1.0), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn curve_points_crash() {
        let p = -2.0;
        let fam = cdv_curves(p, 5, 1e-14).unwrap();
        let fm = FastMap::new(&cdv_equation(&Scalar::int(-2)).unwrap().map).unwrap();
        for n in 1..=5 {
            for [x, y] in fam.sample(n, &[1.0, 2.0, 7.0, 20.0]).unwrap() {
                let step = fm.crash_step_r(&mut vec![x, y], n + 2, 1e-9);
                assert!(step.is_some_and(|s| s <= n), "n={n} x={x} {step:?}");
            }
        }
    }
}
