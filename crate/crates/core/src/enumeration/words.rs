//! Preimages of the pole of `x_{n+1} = 1/(x_n^2 - 1)` as words in the two
//! inverse branches `h(x) = ±sqrt(1/x + 1)` applied to `1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::definition::EquationDef;
use crate::map::DifferenceEquation;
use crate::upoly::UPoly;
use crate::Result;

use super::fastmap::FastMap;
use super::realroots::real_roots;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    /// Principal square root with the branch sign.
    pub fn apply(self, x: Complex64) -> Complex64 {
        let r = (x.inv() + 1.0).sqrt();
        match self {
            Branch::Plus => r,
            Branch::Minus => -r,
        }
    }

    fn letter(self) -> char {
        match self {
            Branch::Plus => '+',
            Branch::Minus => '-',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolicWord {
    /// Outermost letter first: `[a1, .., an]` is `a1(a2(..an(1)))`.
    pub letters: Vec<Branch>,
    pub value: Complex64,
    /// `real_trace[i]` is true when the `i`-th application (innermost
    /// first) had a real argument with `1/x + 1 >= 0`.
    pub real_trace: Vec<bool>,
}

impl SymbolicWord {
    pub fn depth(&self) -> usize {
        self.letters.len()
    }

    pub fn is_real(&self) -> bool {
        self.real_trace.iter().all(|&r| r)
    }

    pub fn label(&self) -> String {
        self.letters.iter().map(|b| b.letter()).collect()
    }

    /// No two consecutive minus letters.
    pub fn no_double_minus(&self) -> bool {
        !self.letters.windows(2).any(|w| w == [Branch::Minus, Branch::Minus])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WordMode {
    Complex,
    RealFiltered,
}

/// Words of length `1..=depth`, shortest first.
pub fn symbolic_words(depth: usize, mode: WordMode) -> Vec<SymbolicWord> {
    let mut out: Vec<SymbolicWord> = Vec::new();
    let mut level = vec![SymbolicWord { letters: Vec::new(), value: Complex64::new(1.0, 0.0), real_trace: Vec::new() }];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(2 * level.len());
        for w in &level {
            let x = w.value;
            let real_step = x.im == 0.0 && x.re != 0.0 && 1.0 / x.re + 1.0 >= 0.0;
            for b in [Branch::Plus, Branch::Minus] {
                let mut letters = Vec::with_capacity(w.letters.len() + 1);
                letters.push(b);
                letters.extend_from_slice(&w.letters);
                let mut real_trace = w.real_trace.clone();
                real_trace.push(real_step);
                let mut value = b.apply(x);
                if real_step {
                    value.im = 0.0;
                }
                let word = SymbolicWord { letters, value, real_trace };
                if mode == WordMode::Complex || word.is_real() {
                    next.push(word);
                }
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

/// Smallest distance between two word values, with the pair's indices.
pub fn min_pairwise_distance(words: &[SymbolicWord]) -> Option<(f64, usize, usize)> {
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            let d = (words[i].value - words[j].value).norm();
            if best.map_or(true, |(b, _, _)| d < b) {
                best = Some((d, i, j));
            }
        }
    }
    best
}

/// Real words compared with the no-two-consecutive-minus rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleComparison {
    pub depth: usize,
    pub real: usize,
    pub rule: usize,
    /// Real words that the rule excludes.
    pub real_not_rule: Vec<String>,
    /// Rule words that are not real.
    pub rule_not_real: Vec<String>,
}

pub fn compare_with_rule(depth: usize) -> RuleComparison {
    let words = symbolic_words(depth, WordMode::Complex);
    let mut c = RuleComparison { depth, real: 0, rule: 0, real_not_rule: Vec::new(), rule_not_real: Vec::new() };
    for w in &words {
        match (w.is_real(), w.no_double_minus()) {
            (true, true) => {
                c.real += 1;
                c.rule += 1;
            }
            (true, false) => {
                c.real += 1;
                c.real_not_rule.push(w.label());
            }
            (false, true) => {
                c.rule += 1;
                c.rule_not_real.push(w.label());
            }
            (false, false) => {}
        }
    }
    c
}

pub fn inverse_parabola() -> Result<DifferenceEquation> {
    EquationDef::new(1, "1", "x0^2 - 1").to_equation()
}

/// Step at which the forward orbit of each word fails.
pub fn forward_crash_steps(words: &[SymbolicWord], tol: f64) -> Result<Vec<Option<usize>>> {
    let fm = FastMap::new(&inverse_parabola()?.map)?;
    Ok(words.iter().map(|w| fm.crash_step_c(&mut vec![w.value], w.depth() + 2, tol)).collect())
}

/// Real points reaching `1` after exactly `depth` steps, by real-root
/// isolation on `N_d(t) = D_d(t)`, `t = x^2`, where `N_1 = 1`,
/// `D_1 = t - 1`, `N_{j+1} = D_j^2`, `D_{j+1} = N_j^2 - D_j^2`.
pub fn real_preimages_of_one(depth: usize) -> Vec<f64> {
    let mut n = UPoly::from_ints(&[1]);
    let mut d = UPoly::from_ints(&[-1, 1]);
    for _ in 1..depth {
        let n2 = d.mul(&d);
        d = n.mul(&n).sub(&n2);
        n = n2;
    }
    let mut out = Vec::new();
    for t in real_roots(&n.sub(&d), 1e-15) {
        if t > 0.0 {
            out.push(t.sqrt());
            out.push(-t.sqrt());
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_one_and_minus_minus() {
        let w = symbolic_words(2, WordMode::Complex);
        assert_eq!(w.len(), 6);
        assert!((w[0].value.re - 2f64.sqrt()).abs() < 1e-15);
        let mm = w.iter().find(|w| w.label() == "--").unwrap();
        assert!(mm.is_real());
        assert!((mm.value.re + (1.0 - 1.0 / 2f64.sqrt()).sqrt()).abs() < 1e-14);
        assert!(!mm.no_double_minus());
    }

    #[test]
    fn words_reach_the_pole_on_time() {
        let words = symbolic_words(8, WordMode::Complex);
        assert_eq!(words.len(), 510);
        let steps = forward_crash_steps(&words, 1e-9).unwrap();
        for (w, s) in words.iter().zip(steps) {
            assert_eq!(s, Some(w.depth()), "{}", w.label());
        }
        assert!(min_pairwise_distance(&words).unwrap().0 > 1e-8);
    }

    #[test]
    fn real_words_match_root_isolation() {
        let real = symbolic_words(6, WordMode::RealFiltered);
        for depth in 1..=6 {
            let mut vals: Vec<f64> = real.iter().filter(|w| w.depth() == depth).map(|w| w.value.re).collect();
            vals.sort_by(f64::total_cmp);
            let oracle = real_preimages_of_one(depth);
            assert_eq!(vals.len(), oracle.len(), "depth {depth}");
            for (a, b) in vals.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-10, "depth {depth}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn rule_disagrees_with_radicands() {
        let c = compare_with_rule(3);
        assert!(c.real_not_rule.contains(&"--+".to_string()) || c.real_not_rule.contains(&"--".to_string()));
    }
}
