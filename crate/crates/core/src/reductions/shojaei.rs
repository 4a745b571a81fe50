//! Forbidden set of `x_{n+1} = alpha x_{n-k}/(beta + gamma x_n ... x_{n-k})`.
//!
//! The product `z_n = x_n ... x_{n-k}` solves `z' = alpha z/(beta + gamma z)`
//! and `w = (gamma/beta) z` solves `w' = c w/(1 + w)` with `c = alpha/beta`.

use serde::{Deserialize, Serialize};

use crate::fsdesc::FsDescription;
use crate::scalar::Scalar;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShojaeiFs {
    /// `gamma = 0` or `alpha = 0`: no initial value fails.
    Empty,
    /// `beta = 0`: the points with at least one zero component.
    ZeroComponent { arity: usize },
    /// `c` is a root of unity of order `order >= 2`.
    Finite { order: u32, surfaces: FsDescription },
    /// Surfaces for `n <= N`; the full family is countable.
    Countable { surfaces: FsDescription },
}

impl ShojaeiFs {
    pub fn description(&self) -> Option<&FsDescription> {
        match self {
            ShojaeiFs::Finite { surfaces, .. } | ShojaeiFs::Countable { surfaces } => Some(surfaces),
            _ => None,
        }
    }
}

/// Constants `r_n` of the surfaces `x_{-k} ... x_0 = r_n`, `n = 0..=n_max`.
///
/// `r_n = -(beta/gamma)/(1 + c + ... + c^n)`. A root of unity `c` of order
/// `m` stops the list at `n = m - 2`, the last index with a nonzero partial
/// sum.
pub fn shojaei_fs(alpha: &Scalar, beta: &Scalar, gamma: &Scalar, k: usize, n_max: usize, unity_bound: u32) -> Result<ShojaeiFs> {
    let arity = k + 1;
    if beta.is_zero() && (gamma.is_zero() || alpha.is_zero()) {
        return Err(Error::Invalid("beta and gamma (or alpha) cannot both vanish".into()));
    }
    if gamma.is_zero() || alpha.is_zero() {
        return Ok(ShojaeiFs::Empty);
    }
    if beta.is_zero() {
        return Ok(ShojaeiFs::ZeroComponent { arity });
    }
    let c = alpha / beta;
    let scale = beta / gamma;
    let order = if c.is_exact() && !c.is_one() {
        (2..=unity_bound).find(|&m| c.pow(m as i32).is_some_and(|p| p.is_one()))
    } else {
        None
    };
    let last = match order {
        Some(m) => (m as usize - 2).min(n_max),
        None => n_max,
    };
    let mut constants = Vec::with_capacity(last + 1);
    let mut sum = Scalar::zero();
    let mut power = Scalar::one();
    for _ in 0..=last {
        sum = &sum + &power;
        power = &power * &c;
        match (-&scale).checked_div(&sum) {
            Some(r) => constants.push(r),
            None => break,
        }
    }
    let complete = order.is_some_and(|m| m as usize - 2 <= n_max);
    let surfaces = FsDescription::ProductHypersurfaces { arity, constants, complete };
    Ok(match order {
        Some(m) => ShojaeiFs::Finite { order: m, surfaces },
        None => ShojaeiFs::Countable { surfaces },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::definition::EquationDef;
    use crate::map::{iterate, IterOptions};

    #[test]
    fn c_one_gives_reciprocal_integers() {
        let one = Scalar::one();
        let fs = shojaei_fs(&one, &one, &one, 1, 5, 120).unwrap();
        let ShojaeiFs::Countable { surfaces: FsDescription::ProductHypersurfaces { constants, .. } } = fs else {
            panic!("unexpected {fs:?}");
        };
        let expected: Vec<Scalar> = (1..=6).map(|n| Scalar::ratio(-1, n)).collect();
        assert_eq!(constants, expected);
    }

    #[test]
    fn c_minus_one_is_finite() {
        let fs = shojaei_fs(&Scalar::int(-1), &Scalar::one(), &Scalar::one(), 2, 10, 120).unwrap();
        assert!(matches!(&fs, ShojaeiFs::Finite { order: 2, .. }));
        let Some(FsDescription::ProductHypersurfaces { constants, complete, .. }) = fs.description() else {
            panic!()
        };
        assert_eq!(constants, &vec![Scalar::int(-1)]);
        assert!(complete);
    }

    #[test]
    fn degenerate_tags() {
        let one = Scalar::one();
        assert_eq!(shojaei_fs(&one, &one, &Scalar::zero(), 1, 5, 120).unwrap(), ShojaeiFs::Empty);
        assert_eq!(
            shojaei_fs(&one, &Scalar::zero(), &one, 1, 5, 120).unwrap(),
            ShojaeiFs::ZeroComponent { arity: 2 }
        );
    }

    #[test]
    fn scaled_surfaces_crash_on_time() {
        // alpha = 3, beta = 2, gamma = 5
        let fs = shojaei_fs(&Scalar::int(3), &Scalar::int(2), &Scalar::int(5), 1, 6, 120).unwrap();
        let de = EquationDef::new(2, "3*x1", "2 + 5*x0*x1").to_equation().unwrap();
        let Some(FsDescription::ProductHypersurfaces { constants, .. }) = fs.description() else { panic!() };
        for (n, r) in constants.iter().enumerate() {
            let init = [Scalar::int(2), r / &Scalar::int(2)];
            let out = iterate(&de, &init, 20, IterOptions::default()).unwrap();
            assert_eq!(out.crash_step(), Some(n));
        }
    }
}
