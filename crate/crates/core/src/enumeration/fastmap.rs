//! Plain floating evaluation of numeric maps, used where exact scalars are
//! too slow (grids, float verification of enumerated points).

use num_complex::Complex64;

use crate::map::RationalMap;
use crate::poly::Poly;
use crate::{Error, Result};

#[derive(Clone, Debug)]
struct FastPoly {
    terms: Vec<(Complex64, Vec<(usize, i32)>)>,
}

impl FastPoly {
    fn new(p: &Poly) -> Self {
        let terms = p
            .terms()
            .map(|(e, c)| {
                let pows = e.iter().enumerate().filter(|(_, &k)| k > 0).map(|(v, &k)| (v, k as i32)).collect();
                (c.to_c64(), pows)
            })
            .collect();
        FastPoly { terms }
    }

    /// Value and sum of term moduli.
    fn eval_r(&self, x: &[f64]) -> (f64, f64) {
        let mut acc = 0.0;
        let mut scale = 0.0;
        for (c, pows) in &self.terms {
            let mut t = c.re;
            for &(v, k) in pows {
                t *= x[v].powi(k);
            }
            acc += t;
            scale += t.abs();
        }
        (acc, scale)
    }

    fn eval_c(&self, x: &[Complex64]) -> (Complex64, f64) {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        for (c, pows) in &self.terms {
            let mut t = *c;
            for &(v, k) in pows {
                t *= x[v].powi(k);
            }
            acc += t;
            scale += t.norm();
        }
        (acc, scale)
    }
}

/// A numeric map compiled for `f64` and `Complex64` evaluation.
#[derive(Clone, Debug)]
pub struct FastMap {
    num: FastPoly,
    den: FastPoly,
    order: usize,
    real: bool,
}

/// One float step: the next value or the crash.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FloatStep<T> {
    Value(T),
    Crash,
}

impl FastMap {
    pub fn new(map: &RationalMap) -> Result<Self> {
        let m = map.numeric()?;
        let f = m.func();
        let real = f.num().terms().chain(f.den().terms()).all(|(_, c)| c.is_real());
        if f.nvars() != m.order() {
            return Err(Error::UnboundSymbols("map has unbound parameters".into()));
        }
        Ok(FastMap { num: FastPoly::new(f.num()), den: FastPoly::new(f.den()), order: m.order(), real })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Denominator at a real window, with its scale.
    pub fn den_r(&self, w: &[f64]) -> (f64, f64) {
        self.den.eval_r(w)
    }

    /// Next value; the window crashes when the denominator is below
    /// `tol * max(1, scale)`.
    pub fn step_r(&self, w: &[f64], tol: f64) -> FloatStep<f64> {
        let (d, ds) = self.den.eval_r(w);
        if d.abs() <= tol * ds.max(1.0) {
            return FloatStep::Crash;
        }
        let (n, _) = self.num.eval_r(w);
        let v = n / d;
        if v.is_finite() {
            FloatStep::Value(v)
        } else {
            FloatStep::Crash
        }
    }

    pub fn step_c(&self, w: &[Complex64], tol: f64) -> FloatStep<Complex64> {
        let (d, ds) = self.den.eval_c(w);
        if d.norm() <= tol * ds.max(1.0) {
            return FloatStep::Crash;
        }
        let (n, _) = self.num.eval_c(w);
        let v = n / d;
        if v.is_finite() {
            FloatStep::Value(v)
        } else {
            FloatStep::Crash
        }
    }

    /// Step at which a real orbit crashes, if it does within `horizon`
    /// steps; the final window is left in `w`.
    pub fn crash_step_r(&self, w: &mut Vec<f64>, horizon: usize, tol: f64) -> Option<usize> {
        for step in 0..horizon {
            match self.step_r(w, tol) {
                FloatStep::Crash => return Some(step),
                FloatStep::Value(v) => {
                    w.remove(0);
                    w.push(v);
                }
            }
        }
        None
    }

    pub fn crash_step_c(&self, w: &mut Vec<Complex64>, horizon: usize, tol: f64) -> Option<usize> {
        for step in 0..horizon {
            match self.step_c(w, tol) {
                FloatStep::Crash => return Some(step),
                FloatStep::Value(v) => {
                    w.remove(0);
                    w.push(v);
                }
            }
        }
        None
    }
}
