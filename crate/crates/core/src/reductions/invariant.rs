//! Algebraic invariants and the order-lowering they allow.

use serde::{Deserialize, Serialize};

use crate::fsdesc::{Form, FsDescription, FsLayer};
use crate::map::{default_names, DifferenceEquation, RationalMap};
use crate::mobius::Mobius;
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::scalar::Scalar;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InvariantForm {
    /// `T1(x_n) T2(x_{n-lag}) = C`.
    MobiusProduct { t1: Mobius, t2: Mobius, lag: usize },
    /// `(x_{n+1} - x_{n-k})/(x_{n+1} - x_{n-l}) = C`, `k != l`.
    DifferenceRatio { k: usize, l: usize },
}

impl InvariantForm {
    /// Window length the form reads; it equals the order of the
    /// associated equation.
    pub fn span(&self) -> usize {
        match self {
            InvariantForm::MobiusProduct { lag, .. } => lag + 1,
            InvariantForm::DifferenceRatio { k, l } => k.max(l) + 2,
        }
    }

    /// Value of the form on a window (oldest first); `None` where it is
    /// undefined.
    pub fn value(&self, window: &[Scalar]) -> Option<Scalar> {
        let s = window.len();
        match self {
            InvariantForm::MobiusProduct { t1, t2, lag } => {
                let a = t1.apply(&window[s - 1])?;
                let b = t2.apply(&window[s - 1 - lag])?;
                Some(&a * &b)
            }
            InvariantForm::DifferenceRatio { k, l } => {
                let newest = &window[s - 1];
                let num = newest - &window[s - 2 - k];
                let den = newest - &window[s - 2 - l];
                num.checked_div(&den)
            }
        }
    }

    /// Windows where the rebuilt equation divides a factor of the form by
    /// itself, so the next value no longer keeps the form constant.
    pub fn degenerate(&self, window: &[Scalar]) -> bool {
        match self {
            InvariantForm::MobiusProduct { t2, lag, .. } => {
                let s = window.len();
                t2.apply(&window[s - lag]).is_some_and(|v| v.is_zero())
            }
            InvariantForm::DifferenceRatio { .. } => false,
        }
    }

    /// The equation whose solutions keep the form constant.
    pub fn equation(&self) -> Result<DifferenceEquation> {
        match self {
            InvariantForm::MobiusProduct { t1, t2, lag } => mobius_product_equation(t1, t2, *lag),
            InvariantForm::DifferenceRatio { k, l } => {
                if k == l {
                    return Err(Error::Invalid("difference ratio needs k != l".into()));
                }
                let s = self.span();
                // C from the previous window, then solve for the next value
                let v = |lag: usize| RatFunc::var(s, s - 1 - lag);
                let c = v(0).sub(&v(k + 1)).div(&v(0).sub(&v(l + 1)))?;
                let one = RatFunc::constant(s, Scalar::one());
                let f = v(*k).sub(&c.mul(&v(*l))).div(&one.sub(&c))?;
                Ok(DifferenceEquation::natural(RationalMap::from_ratfunc(f)))
            }
        }
    }
}

/// `x_{n+1} = T1^{-1}(T1(x_n) T2(x_{n-lag}) / T2(x_{n-lag+1}))`, the
/// equation of order `lag + 1` that keeps `T1(x_n) T2(x_{n-lag})` constant.
pub fn mobius_product_equation(t1: &Mobius, t2: &Mobius, lag: usize) -> Result<DifferenceEquation> {
    if lag == 0 {
        return Err(Error::Invalid("lag must be at least 1".into()));
    }
    let s = lag + 1;
    let w = t1.as_ratfunc(s, s - 1).mul(&t2.as_ratfunc(s, 0)).div(&t2.as_ratfunc(s, 1))?;
    let f = t1.inverse().apply_ratfunc(&w)?;
    Ok(DifferenceEquation::natural(RationalMap::from_ratfunc(f)))
}

/// The invariant's constant on an initial window; `None` for singular
/// initial data.
pub fn invariant_constant(form: &InvariantForm, init: &[Scalar]) -> Option<Scalar> {
    if init.len() != form.span() {
        return None;
    }
    form.value(init)
}

/// The lower-order equation obtained by fixing the constant `c`.
pub fn invariant_reduce(form: &InvariantForm, c: &Scalar) -> Result<DifferenceEquation> {
    match form {
        InvariantForm::MobiusProduct { t1, t2, lag } => {
            // x_{n+1} = T1^{-1}(C / T2(x_{n-lag+1}))
            let r = *lag;
            let w = RatFunc::constant(r, c.clone()).div(&t2.as_ratfunc(r, 0))?;
            let f = t1.inverse().apply_ratfunc(&w)?;
            Ok(DifferenceEquation::natural(RationalMap::from_ratfunc(f)))
        }
        InvariantForm::DifferenceRatio { k, l } => {
            if c.is_one() {
                return Err(Error::NotApplicable(format!(
                    "C = 1 corresponds to the locus x_(n-{k}) = x_(n-{l})"
                )));
            }
            let r = k.max(l) + 1;
            let v = |lag: usize| RatFunc::var(r, r - 1 - lag);
            let den = Scalar::one() - c.clone();
            let f = v(*k).sub(&v(*l).scale(c)).scale(&den.inv().expect("C != 1"));
            Ok(DifferenceEquation::natural(RationalMap::from_ratfunc(f)))
        }
    }
}

/// Forbidden set of the difference-ratio equation with `k = 1`, `l = 0`:
/// the planes `x = y` (failing at once) and `y = z` (failing one step
/// later), in coordinates `(x, y, z) = (x_{-2}, x_{-1}, x_0)`.
pub fn aghajani_fs() -> FsDescription {
    let names = default_names(3);
    let x = Poly::var(3, 0);
    let y = Poly::var(3, 1);
    let z = Poly::var(3, 2);
    FsDescription::Hypersurfaces {
        layers: vec![
            FsLayer { depth: 0, forms: vec![Form::from_poly(&y.sub(&x), &names)] },
            FsLayer { depth: 1, forms: vec![Form::from_poly(&z.sub(&y), &names)] },
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::definition::EquationDef;
    use crate::map::{iterate, IterOptions};

    fn palladino(b: i64) -> InvariantForm {
        let b = Scalar::int(b);
        InvariantForm::MobiusProduct {
            t1: Mobius::new(b.clone(), Scalar::one(), Scalar::one(), Scalar::zero()).unwrap(),
            t2: Mobius::new(b, Scalar::one(), Scalar::zero(), Scalar::one()).unwrap(),
            lag: 1,
        }
    }

    #[test]
    fn mobius_product_rebuilds_the_known_equation() {
        let de = palladino(1).equation().unwrap();
        let def = EquationDef::new(2, "x0", "1 + x1 - x0");
        assert_eq!(de.map.func(), &def.ratfunc().unwrap());
    }

    #[test]
    fn constants_from_initial_data() {
        let one = Scalar::one();
        assert_eq!(invariant_constant(&palladino(1), &[one.clone(), one.clone()]), Some(Scalar::int(4)));
        let dr = InvariantForm::DifferenceRatio { k: 1, l: 0 };
        let init = [Scalar::zero(), Scalar::one(), Scalar::int(3)];
        assert_eq!(invariant_constant(&dr, &init), Some(Scalar::ratio(3, 2)));
        assert_eq!(invariant_constant(&dr, &[Scalar::zero(), Scalar::one(), Scalar::one()]), None);
    }

    #[test]
    fn reduced_orbits_agree() {
        let form = palladino(1);
        let full = form.equation().unwrap();
        let reduced = invariant_reduce(&form, &Scalar::int(4)).unwrap();
        let expected = EquationDef::new(1, "1 + x0", "3 - x0").ratfunc().unwrap();
        assert_eq!(reduced.map.func(), &expected);
        let opts = IterOptions { trace: true, detect_period: false, ..Default::default() };
        let a = iterate(&full, &[Scalar::one(), Scalar::one()], 20, opts).unwrap();
        let b = iterate(&reduced, &[Scalar::one()], 20, opts).unwrap();
        let (ta, tb) = (a.trace.unwrap(), b.trace.unwrap());
        let n = ta.len().min(tb.len() + 1);
        assert!(n > 2);
        assert_eq!(&ta[1..n], &tb[..n - 1]);
    }

    #[test]
    fn difference_ratio_equation_and_reduction() {
        let dr = InvariantForm::DifferenceRatio { k: 1, l: 0 };
        let de = dr.equation().unwrap();
        let def = EquationDef::new(3, "x0^2 + x1^2 - x0*(x1 + x2)", "x1 - x2");
        assert_eq!(de.map.func(), &def.ratfunc().unwrap());
        let red = invariant_reduce(&dr, &Scalar::ratio(3, 2)).unwrap();
        let lin = EquationDef::new(2, "3*x0 - 2*x1", "1").ratfunc().unwrap();
        assert_eq!(red.map.func(), &lin);
        assert!(invariant_reduce(&dr, &Scalar::one()).is_err());
    }
}
