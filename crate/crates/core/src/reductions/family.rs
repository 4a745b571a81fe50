//! Family catalog loaded from the equation text format and structural
//! matching of numeric equations against it.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::definition::EquationDef;
use crate::map::{DifferenceEquation, RationalMap};
use crate::mobius::Mobius;
use crate::parse::{parse_ratfunc, Symbol};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::scalar::Scalar;
use crate::upoly::UPoly;
use crate::{Error, Result, Q};

use super::{ChangeOfVariables, InvariantForm, ReducedEquation, ReductionResult, Via};

const BUILTIN: &str = include_str!("../../data/families.txt");

/// Bound on solver branches per family.
const SOLVE_BUDGET: usize = 2000;

#[derive(Clone, Debug)]
enum ChangeTemplate {
    Lag { kind: String, lag: usize },
    /// Scalar arguments as functions of the parameters.
    Args { kind: String, args: Vec<RatFunc> },
    /// Möbius map in `x` (ring variable 0) and the parameters.
    Mobius(RatFunc),
}

#[derive(Clone, Debug)]
enum Kind {
    Change {
        change: ChangeTemplate,
        /// Ring: `reduced_order` window variables then the parameters.
        reduced: RatFunc,
        reduced_order: usize,
        crash: Vec<Poly>,
    },
    MobiusProduct { lag: usize, t1: RatFunc, t2: RatFunc },
    DifferenceRatio { k: usize, l: usize },
}

/// One expanded catalog entry.
#[derive(Clone, Debug)]
pub struct Family {
    pub name: String,
    pub tag: String,
    pub order: usize,
    pub params: Vec<String>,
    /// Ring: `order` window variables then the parameters.
    template: RatFunc,
    kind: Kind,
    locate: Vec<usize>,
    matching: bool,
}

/// A family with numeric parameter values.
#[derive(Clone, Debug)]
pub struct FamilyInstance {
    pub equation: DifferenceEquation,
    pub reduction: ReductionResult,
}

#[derive(Clone, Debug, Default)]
pub struct FamilyCatalog {
    families: Vec<Family>,
}

impl FamilyCatalog {
    /// The catalog shipped with the crate.
    pub fn builtin() -> &'static FamilyCatalog {
        static CAT: OnceLock<FamilyCatalog> = OnceLock::new();
        CAT.get_or_init(|| FamilyCatalog::parse(BUILTIN).expect("bundled family catalog parses"))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut families = Vec::new();
        let mut block: Vec<(usize, String)> = Vec::new();
        let flush = |block: &mut Vec<(usize, String)>, out: &mut Vec<Family>| -> Result<()> {
            if block.iter().any(|(_, l)| !strip(l).trim().is_empty()) {
                out.extend(expand_block(block)?);
            }
            block.clear();
            Ok(())
        };
        for (i, line) in text.lines().enumerate() {
            if line.trim() == "---" {
                flush(&mut block, &mut families)?;
            } else {
                block.push((i + 1, line.to_string()));
            }
        }
        flush(&mut block, &mut families)?;
        Ok(FamilyCatalog { families })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        FamilyCatalog::parse(&std::fs::read_to_string(path)?)
    }

    pub fn families(&self) -> &[Family] {
        &self.families
    }

    pub fn get(&self, name: &str) -> Option<&Family> {
        self.families.iter().find(|f| f.name == name)
    }

    /// First family (in file order) matching `de`.
    pub fn reduce(&self, de: &DifferenceEquation) -> Option<ReductionResult> {
        let map = de.map.numeric().ok()?;
        let f = map.func();
        if !f.is_exact() {
            return None;
        }
        let mut distinguished: Option<Vec<Scalar>> = None;
        for fam in self.families.iter().filter(|fam| fam.matching && fam.order == map.order()) {
            let cands: &[Scalar] = if fam.locate.is_empty() {
                &[]
            } else {
                distinguished.get_or_insert_with(|| distinguished_values(f))
            };
            if let Some(values) = fam.solve(f, cands) {
                if let Ok(inst) = fam.instantiate(&values) {
                    return Some(inst.reduction);
                }
            }
        }
        None
    }
}

/// [`FamilyCatalog::reduce`] on the bundled catalog.
pub fn reduce(de: &DifferenceEquation) -> Option<ReductionResult> {
    FamilyCatalog::builtin().reduce(de)
}

fn strip(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

fn block_error(line: usize, msg: impl Into<String>) -> Error {
    Error::parse(line, 1, msg)
}

/// Expands the `index` ranges of a block and builds one family per
/// assignment.
fn expand_block(lines: &[(usize, String)]) -> Result<Vec<Family>> {
    let index_line = lines.iter().find(|(_, l)| strip(l).trim_start().starts_with("index:"));
    let assignments = match index_line {
        Some((ln, l)) => parse_index(strip(l).trim_start()["index:".len()..].trim(), *ln)?,
        None => vec![BTreeMap::new()],
    };
    let mut out = Vec::with_capacity(assignments.len());
    for env in assignments {
        let mut text = String::new();
        for (ln, l) in lines {
            if index_line.is_some_and(|(il, _)| il == ln) {
                text.push('\n');
                continue;
            }
            text.push_str(&substitute(strip(l), &env, *ln)?);
            text.push('\n');
        }
        let first = lines.first().map_or(1, |(ln, _)| *ln);
        let def = EquationDef::parse(&text).map_err(|e| match e {
            Error::Parse { line, col, msg } => Error::Parse { line: line + first - 1, col, msg },
            other => other,
        })?;
        out.push(build_family(&def, first)?);
    }
    Ok(out)
}

fn parse_index(spec: &str, line: usize) -> Result<Vec<BTreeMap<String, i64>>> {
    let mut envs = vec![BTreeMap::new()];
    for item in spec.split(',') {
        let (name, ranges) = item
            .split_once('=')
            .ok_or_else(|| block_error(line, format!("bad index item '{item}'")))?;
        let name = name.trim().to_string();
        let mut values = Vec::new();
        for r in ranges.split('|') {
            let (lo, hi) = r
                .trim()
                .split_once("..")
                .ok_or_else(|| block_error(line, format!("bad range '{r}'")))?;
            let lo: i64 = lo.trim().parse().map_err(|_| block_error(line, "bad range bound"))?;
            let hi: i64 = hi.trim().parse().map_err(|_| block_error(line, "bad range bound"))?;
            values.extend(lo..=hi);
        }
        envs = envs
            .into_iter()
            .flat_map(|env| {
                let name = name.clone();
                values.iter().map(move |&v| {
                    let mut e = env.clone();
                    e.insert(name.clone(), v);
                    e
                })
            })
            .collect();
    }
    Ok(envs)
}

/// Replaces `{expr}` by its integer value, `{pos expr}` and `{neg expr}`
/// by its positive and negative parts and `{prod x lo hi}` by
/// `xlo*...*xhi`.
fn substitute(line: &str, env: &BTreeMap<String, i64>, ln: usize) -> Result<String> {
    let mut out = String::new();
    let mut rest = line;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let close = rest[open..]
            .find('}')
            .ok_or_else(|| block_error(ln, "unclosed placeholder"))?
            + open;
        let inner = rest[open + 1..close].trim();
        if let Some(args) = inner.strip_prefix("prod ") {
            let parts: Vec<&str> = args.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(block_error(ln, "prod placeholder needs a name and two bounds"));
            }
            let lo = eval_int(parts[1], env, ln)?;
            let hi = eval_int(parts[2], env, ln)?;
            let terms: Vec<String> = (lo..=hi).map(|j| format!("{}{j}", parts[0])).collect();
            out.push_str(&format!("({})", terms.join("*")));
        } else if let Some(e) = inner.strip_prefix("pos ") {
            out.push_str(&eval_int(e, env, ln)?.max(0).to_string());
        } else if let Some(e) = inner.strip_prefix("neg ") {
            out.push_str(&(-eval_int(e, env, ln)?).max(0).to_string());
        } else {
            out.push_str(&eval_int(inner, env, ln)?.to_string());
        }
        rest = &rest[close + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

/// Integer expression with `+`, `-`, `*`, literals, index names and
/// implicit products such as `2i`.
fn eval_int(expr: &str, env: &BTreeMap<String, i64>, ln: usize) -> Result<i64> {
    let bad = || block_error(ln, format!("bad index expression '{expr}'"));
    let s: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    let mut total = 0i64;
    let mut sign = 1i64;
    let mut term: Option<i64> = None;
    let mut chars = s.chars().peekable();
    let finish = |term: &mut Option<i64>, sign: i64, total: &mut i64| -> Result<()> {
        *total += sign * term.take().ok_or_else(bad)?;
        Ok(())
    };
    while let Some(&c) = chars.peek() {
        if c == '+' || c == '-' {
            chars.next();
            if term.is_some() {
                finish(&mut term, sign, &mut total)?;
                sign = if c == '-' { -1 } else { 1 };
            } else if c == '-' {
                sign = -sign;
            }
        } else if c == '*' {
            chars.next();
        } else if c.is_ascii_digit() {
            let mut n = 0i64;
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                n = n * 10 + d.to_digit(10).unwrap() as i64;
                chars.next();
            }
            term = Some(term.unwrap_or(1) * n);
        } else if c.is_ascii_alphabetic() {
            let mut name = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_alphanumeric() || **d == '_') {
                name.push(d);
                chars.next();
            }
            let v = *env.get(&name).ok_or_else(bad)?;
            term = Some(term.unwrap_or(1) * v);
        } else {
            return Err(bad());
        }
    }
    finish(&mut term, sign, &mut total)?;
    Ok(total)
}

/// Parses an expression over `window` variables named by `var_name` and
/// the parameters.
fn parse_in(
    text: &str,
    window: usize,
    var_name: &dyn Fn(&str) -> Option<usize>,
    params: &[String],
    line: usize,
) -> Result<RatFunc> {
    let resolve = |s: &str| {
        if let Some(v) = var_name(s) {
            return Some(Symbol::Var(v));
        }
        params.iter().position(|p| p == s).map(|i| Symbol::Var(window + i))
    };
    parse_ratfunc(text, window + params.len(), &resolve, line, 1)
}

fn lag_var(prefix: char, order: usize) -> impl Fn(&str) -> Option<usize> {
    move |s: &str| {
        let rest = s.strip_prefix(prefix)?;
        let lag: usize = rest.parse().ok()?;
        (lag < order).then(|| order - 1 - lag)
    }
}

fn max_z_index(text: &str) -> usize {
    let b = text.as_bytes();
    let mut best = 0;
    for (i, _) in text.match_indices('z') {
        if i > 0 && (b[i - 1].is_ascii_alphanumeric() || b[i - 1] == b'_') {
            continue;
        }
        let digits: String = text[i + 1..].chars().take_while(|c| c.is_ascii_digit()).collect();
        if let Ok(n) = digits.parse::<usize>() {
            best = best.max(n);
        }
    }
    best
}

fn build_family(def: &EquationDef, line: usize) -> Result<Family> {
    let name = def.name.clone().ok_or_else(|| block_error(line, "family needs a name"))?;
    if def.params.iter().any(|(_, v)| v.is_some()) {
        return Err(block_error(line, "family parameters must be symbolic"));
    }
    let params: Vec<String> = def.params.iter().map(|(n, _)| n.clone()).collect();
    let template = def.ratfunc()?;
    let extra = &def.extra;
    let get = |k: &str| extra.get(k).map(|s| s.trim().to_string());
    let kind = if let Some(inv) = get("invariant") {
        parse_invariant(&inv, &params, line)?
    } else {
        let change_text = get("change").ok_or_else(|| block_error(line, "family needs 'change' or 'invariant'"))?;
        let change = parse_change(&change_text, &params, line)?;
        let reduced_text = get("reduced").ok_or_else(|| block_error(line, "family needs 'reduced'"))?;
        let reduced_order = match get("reduced_order") {
            Some(v) => v.parse().map_err(|_| block_error(line, "bad reduced_order"))?,
            None => max_z_index(&reduced_text) + 1,
        };
        let zname = lag_var('z', reduced_order);
        let reduced = parse_in(&reduced_text, reduced_order, &zname, &params, line)?;
        let crash = match get("crash") {
            Some(c) => c
                .split(';')
                .map(|t| parse_in(t, reduced_order, &zname, &params, line).map(|r| r.num().clone()))
                .collect::<Result<_>>()?,
            None => Vec::new(),
        };
        Kind::Change { change, reduced, reduced_order, crash }
    };
    let locate = match get("locate") {
        Some(l) => l
            .split(',')
            .map(|p| {
                params
                    .iter()
                    .position(|q| q == p.trim())
                    .ok_or_else(|| block_error(line, format!("unknown parameter '{}' in locate", p.trim())))
            })
            .collect::<Result<_>>()?,
        None => Vec::new(),
    };
    let matching = get("matching").is_none_or(|m| m != "off");
    Ok(Family {
        name,
        tag: def.family.clone().unwrap_or_default(),
        order: def.order,
        params,
        template,
        kind,
        locate,
        matching,
    })
}

fn parse_change(text: &str, params: &[String], line: usize) -> Result<ChangeTemplate> {
    let (kind, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
    let rest = rest.trim();
    let none = |_: &str| None;
    Ok(match kind {
        "quotient_lag" | "product_lags" | "product_pair" | "quotient" => ChangeTemplate::Lag {
            kind: kind.to_string(),
            lag: rest.parse().map_err(|_| block_error(line, format!("'{kind}' needs an integer lag")))?,
        },
        "affine_shift" | "reciprocal_shift" | "bilinear_window" => {
            let args: Vec<RatFunc> =
                rest.split(',').map(|a| parse_in(a, 0, &none, params, line)).collect::<Result<_>>()?;
            let want = if kind == "bilinear_window" { 5 } else { 1 };
            if args.len() != want {
                return Err(block_error(line, format!("'{kind}' takes {want} argument(s)")));
            }
            ChangeTemplate::Args { kind: kind.to_string(), args }
        }
        "mobius" => {
            let xname = |s: &str| (s == "x").then_some(0);
            ChangeTemplate::Mobius(parse_in(rest, 1, &xname, params, line)?)
        }
        _ => return Err(block_error(line, format!("unknown change '{kind}'"))),
    })
}

fn parse_invariant(text: &str, params: &[String], line: usize) -> Result<Kind> {
    if let Some(rest) = text.strip_prefix("mobius_product") {
        let parts: Vec<&str> = rest.split(';').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(block_error(line, "mobius_product needs 'LAG; T1; T2'"));
        }
        let lag = parts[0].parse().map_err(|_| block_error(line, "bad lag"))?;
        let xname = |s: &str| (s == "x").then_some(0);
        let t1 = parse_in(parts[1], 1, &xname, params, line)?;
        let t2 = parse_in(parts[2], 1, &xname, params, line)?;
        return Ok(Kind::MobiusProduct { lag, t1, t2 });
    }
    if let Some(rest) = text.strip_prefix("difference_ratio") {
        let nums: Vec<usize> = rest
            .split(',')
            .map(|s| s.trim().parse().map_err(|_| block_error(line, "bad difference_ratio index")))
            .collect::<Result<_>>()?;
        if nums.len() != 2 || nums[0] == nums[1] {
            return Err(block_error(line, "difference_ratio needs two distinct indices"));
        }
        return Ok(Kind::DifferenceRatio { k: nums[0], l: nums[1] });
    }
    Err(block_error(line, format!("unknown invariant '{text}'")))
}

/// Substitutes parameter values into a ratfunc whose ring is `window`
/// variables followed by the parameters.
fn bind(r: &RatFunc, window: usize, values: &[Scalar]) -> Result<RatFunc> {
    let mut subs: Vec<RatFunc> = (0..window).map(|v| RatFunc::var(window.max(1), v)).collect();
    let ring = window.max(1);
    subs.extend(values.iter().map(|c| RatFunc::constant(ring, c.clone())));
    let v = r.compose(&subs)?.value;
    if window == 0 {
        return Ok(v);
    }
    Ok(v)
}

fn bind_poly(p: &Poly, window: usize, values: &[Scalar]) -> Poly {
    let mut q = p.clone();
    for (i, c) in values.iter().enumerate() {
        q = q.specialize(window + i, c);
    }
    q.truncate_vars(window)
}

fn constant_of(r: &RatFunc) -> Option<Scalar> {
    r.constant_value()
}

fn mobius_of(r: &RatFunc) -> Result<Mobius> {
    let (n, d) = (r.num(), r.den());
    if n.total_degree() > 1 || d.total_degree() > 1 {
        return Err(Error::Invalid("not a Möbius map".into()));
    }
    Mobius::new(n.coeff(&[1]), n.coeff(&[0]), d.coeff(&[1]), d.coeff(&[0]))
}

impl Family {
    pub fn is_matchable(&self) -> bool {
        self.matching
    }

    /// Equation and reduction for the given parameter values.
    pub fn instantiate(&self, values: &[Scalar]) -> Result<FamilyInstance> {
        if values.len() != self.params.len() {
            return Err(Error::ArityMismatch { expected: self.params.len(), got: values.len() });
        }
        let k = self.order;
        let f = bind(&self.template, k, values)?;
        let f = RatFunc::new(f.num().truncate_vars(k), f.den().truncate_vars(k))?;
        let equation = DifferenceEquation::natural(RationalMap::from_ratfunc(f));
        let via = match &self.kind {
            Kind::Change { change, reduced, reduced_order, crash } => {
                let r = *reduced_order;
                let red = bind(reduced, r, values)?;
                let red = RatFunc::new(red.num().truncate_vars(r), red.den().truncate_vars(r))?;
                let change = match change {
                    ChangeTemplate::Lag { kind, lag } => match kind.as_str() {
                        "quotient_lag" => ChangeOfVariables::QuotientLag { lag: *lag },
                        "product_lags" => ChangeOfVariables::ProductLags { k: *lag },
                        "product_pair" => ChangeOfVariables::ProductPair { lag: *lag },
                        _ => ChangeOfVariables::Quotient { lag: *lag },
                    },
                    ChangeTemplate::Args { kind, args } => {
                        let vals: Vec<Scalar> = args
                            .iter()
                            .map(|a| {
                                bind(a, 0, values)
                                    .ok()
                                    .and_then(|r| constant_of(&r))
                                    .ok_or_else(|| Error::Invalid("change argument is not constant".into()))
                            })
                            .collect::<Result<_>>()?;
                        match kind.as_str() {
                            "affine_shift" => ChangeOfVariables::AffineShift { b: vals[0].clone() },
                            "reciprocal_shift" => ChangeOfVariables::ReciprocalShift { kappa: vals[0].clone() },
                            _ => ChangeOfVariables::BilinearWindow {
                                alpha: vals[0].clone(),
                                beta: vals[1].clone(),
                                gamma: vals[2].clone(),
                                lambda: vals[3].clone(),
                                mu: vals[4].clone(),
                            },
                        }
                    }
                    ChangeTemplate::Mobius(t) => ChangeOfVariables::MobiusPointwise { t: mobius_of(&bind1(t, values)?)? },
                };
                let crash = crash.iter().map(|p| bind_poly(p, r, values)).filter(|p| !p.is_zero()).collect();
                Via::Change { change, reduced: ReducedEquation::from_map(RationalMap::from_ratfunc(red))?, crash }
            }
            Kind::MobiusProduct { lag, t1, t2 } => Via::Invariant {
                form: InvariantForm::MobiusProduct {
                    t1: mobius_of(&bind1(t1, values)?)?,
                    t2: mobius_of(&bind1(t2, values)?)?,
                    lag: *lag,
                },
            },
            Kind::DifferenceRatio { k, l } => Via::Invariant { form: InvariantForm::DifferenceRatio { k: *k, l: *l } },
        };
        let reduction = ReductionResult {
            family: self.name.clone(),
            params: self.params.iter().cloned().zip(values.iter().cloned()).collect(),
            via,
        };
        Ok(FamilyInstance { equation, reduction })
    }

    /// Parameter values making the template equal to `f`, if any.
    fn solve(&self, f: &RatFunc, candidates: &[Scalar]) -> Option<Vec<Scalar>> {
        let k = self.order;
        let m = self.params.len();
        let n = k + m;
        if f.nvars() != k {
            return None;
        }
        let embed: Vec<usize> = (0..k).collect();
        let num = f.num().remap(n, &embed);
        let den = f.den().remap(n, &embed);
        let e = num.mul(self.template.den()).sub(&den.mul(self.template.num()));
        let mut groups: BTreeMap<Vec<u32>, Poly> = BTreeMap::new();
        for (exp, c) in e.terms() {
            let g = groups.entry(exp[..k].to_vec()).or_insert_with(|| Poly::zero(m));
            g.add_term(exp[k..].to_vec(), c.clone());
        }
        let eqs: Vec<Poly> = groups.into_values().filter(|p| !p.is_zero()).collect();
        let mut vals = vec![None; m];
        let mut budget = SOLVE_BUDGET;
        let accept = |v: &[Scalar]| {
            let Ok(inst) = self.instantiate(v) else { return false };
            inst.equation.map.func() == f
        };
        solve(&eqs, &mut vals, &self.locate, candidates, &accept, &mut budget)
    }
}

fn bind1(r: &RatFunc, values: &[Scalar]) -> Result<RatFunc> {
    let v = bind(r, 1, values)?;
    RatFunc::new(v.num().truncate_vars(1), v.den().truncate_vars(1))
}

fn solve(
    eqs: &[Poly],
    vals: &mut Vec<Option<Scalar>>,
    locate: &[usize],
    cands: &[Scalar],
    accept: &dyn Fn(&[Scalar]) -> bool,
    budget: &mut usize,
) -> Option<Vec<Scalar>> {
    if *budget == 0 {
        return None;
    }
    *budget -= 1;
    let mut cur = Vec::with_capacity(eqs.len());
    for p in eqs {
        let mut q = p.clone();
        for (v, x) in vals.iter().enumerate() {
            if let Some(x) = x {
                if q.uses(v) {
                    q = q.specialize(v, x);
                }
            }
        }
        if q.is_zero() {
            continue;
        }
        if q.is_constant() {
            return None;
        }
        cur.push(q);
    }
    let free: Vec<usize> = (0..vals.len()).filter(|&v| vals[v].is_none()).collect();
    if free.is_empty() || cur.is_empty() {
        // unconstrained parameters default to one
        let full: Vec<Scalar> = vals.iter().map(|v| v.clone().unwrap_or_else(Scalar::one)).collect();
        return accept(&full).then_some(full);
    }
    // an equation in a single unknown
    if let Some((q, v)) = cur.iter().find_map(|q| {
        let used: Vec<usize> = free.iter().copied().filter(|&v| q.uses(v)).collect();
        (used.len() == 1).then(|| (q, used[0]))
    }) {
        let roots: Vec<Scalar> = if q.degree_in(v) == 1 {
            let c = q.coeffs_in(v);
            let c0 = c[0].constant_value()?;
            let c1 = c[1].constant_value()?;
            vec![&(-&c0) / &c1]
        } else {
            q.to_upoly(v)?.rational_roots().into_iter().map(Scalar::Rational).collect()
        };
        for r in roots {
            vals[v] = Some(r);
            if let Some(s) = solve(eqs, vals, locate, cands, accept, budget) {
                return Some(s);
            }
        }
        vals[v] = None;
        return None;
    }
    if cur.iter().all(|q| q.total_degree() <= 1) {
        if let Some(lin) = solve_linear(&cur, &free) {
            let locate_free = lin.free.iter().any(|v| locate.contains(v));
            if !locate_free {
                let saved = vals.clone();
                for (v, x) in lin.assign(&free) {
                    vals[v] = Some(x);
                }
                let out = solve(eqs, vals, locate, cands, accept, budget);
                *vals = saved;
                if out.is_some() {
                    return out;
                }
            }
        } else {
            return None;
        }
    }
    if let Some(&v) = locate.iter().find(|&&v| vals[v].is_none()) {
        for c in cands {
            vals[v] = Some(c.clone());
            if let Some(s) = solve(eqs, vals, locate, cands, accept, budget) {
                return Some(s);
            }
        }
        vals[v] = None;
    }
    None
}

struct LinearSolution {
    /// Rows of the reduced echelon form: pivot variable, coefficients on
    /// free variables, constant.
    rows: Vec<(usize, Vec<(usize, Scalar)>, Scalar)>,
    free: Vec<usize>,
}

impl LinearSolution {
    /// Values with every free variable set to one.
    fn assign(&self, _all: &[usize]) -> Vec<(usize, Scalar)> {
        let mut out: Vec<(usize, Scalar)> = self.free.iter().map(|&v| (v, Scalar::one())).collect();
        for (p, coeffs, c) in &self.rows {
            let mut x = c.clone();
            for (_, a) in coeffs {
                x = &x - a;
            }
            out.push((*p, x));
        }
        out
    }
}

/// Gaussian elimination on equations of degree at most one in `vars`.
fn solve_linear(eqs: &[Poly], vars: &[usize]) -> Option<LinearSolution> {
    let nv = vars.len();
    let nvars = eqs[0].nvars();
    let unit = |v: usize| {
        let mut e = vec![0u32; nvars];
        e[v] = 1;
        e
    };
    let mut rows: Vec<Vec<Scalar>> = eqs
        .iter()
        .map(|q| {
            let mut r: Vec<Scalar> = vars.iter().map(|&v| q.coeff(&unit(v))).collect();
            r.push(-&q.coeff(&vec![0; nvars]));
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..nv {
        let Some(p) = (row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(row, p);
        let inv = rows[row][col].inv()?;
        for x in rows[row].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..rows.len() {
            if r != row && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                let (src, dst) = if r < row {
                    let (a, b) = rows.split_at_mut(row);
                    (&b[0], &mut a[r])
                } else {
                    let (a, b) = rows.split_at_mut(r);
                    (&a[row], &mut b[0])
                };
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    *d = &*d - &(&factor * s);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if rows[row..].iter().any(|r| !r[nv].is_zero()) {
        return None;
    }
    let free_cols: Vec<usize> = (0..nv).filter(|c| !pivots.contains(c)).collect();
    let out_rows = pivots
        .iter()
        .enumerate()
        .map(|(i, &pc)| {
            let coeffs = free_cols
                .iter()
                .filter(|&&fc| !rows[i][fc].is_zero())
                .map(|&fc| (vars[fc], rows[i][fc].clone()))
                .collect();
            (vars[pc], coeffs, rows[i][nv].clone())
        })
        .collect();
    Some(LinearSolution { rows: out_rows, free: free_cols.iter().map(|&c| vars[c]).collect() })
}

/// Values `t` such that fixing one window variable at `t` makes the map
/// constant or undefined, together with those constants. Only exact
/// rational maps contribute.
fn distinguished_values(f: &RatFunc) -> Vec<Scalar> {
    let k = f.nvars();
    let mut out: Vec<Scalar> = Vec::new();
    let push = |x: Q, out: &mut Vec<Scalar>| {
        // shifts enter templates with either sign
        for s in [Scalar::Rational(x.clone()), Scalar::Rational(-x)] {
            if !out.contains(&s) {
                out.push(s);
            }
        }
    };
    for j in 0..k {
        let (Some(nmap), Some(dmap)) = (slices(f.num(), j), slices(f.den(), j)) else {
            return out;
        };
        let dg = dmap.values().fold(UPoly::zero(), |g, p| g.gcd(p));
        if dg.degree().is_some_and(|d| d > 0) {
            for t in dg.rational_roots() {
                push(t, &mut out);
            }
        }
        let keys: Vec<&Vec<u32>> = nmap.keys().chain(dmap.keys()).collect();
        let zero = UPoly::zero();
        let mut h = UPoly::zero();
        'pairs: for (i, a) in keys.iter().enumerate() {
            for b in &keys[i + 1..] {
                let na = nmap.get(*a).unwrap_or(&zero);
                let nb = nmap.get(*b).unwrap_or(&zero);
                let da = dmap.get(*a).unwrap_or(&zero);
                let db = dmap.get(*b).unwrap_or(&zero);
                let minor = na.mul(db).sub(&nb.mul(da));
                h = h.gcd(&minor);
                if h.degree() == Some(0) {
                    break 'pairs;
                }
            }
        }
        if h.degree().is_none_or(|d| d == 0) {
            continue;
        }
        for t in h.rational_roots() {
            let value = dmap.iter().find_map(|(key, d)| {
                let dv = d.eval(&t);
                (dv != Q::from_integer(0.into())).then(|| nmap.get(key).map_or(Q::from_integer(0.into()), |n| n.eval(&t)) / dv)
            });
            push(t, &mut out);
            if let Some(v) = value {
                push(v, &mut out);
            }
        }
    }
    out
}

/// Coefficients of `p` grouped by the monomial in the variables other
/// than `j`, each as a polynomial in `x_j`.
fn slices(p: &Poly, j: usize) -> Option<BTreeMap<Vec<u32>, UPoly>> {
    let mut raw: BTreeMap<Vec<u32>, Vec<Q>> = BTreeMap::new();
    for (e, c) in p.terms() {
        let mut key = e.clone();
        let d = key[j] as usize;
        key[j] = 0;
        let v = raw.entry(key).or_default();
        if v.len() <= d {
            v.resize(d + 1, Q::from_integer(0.into()));
        }
        v[d] = c.as_rational()?.clone();
    }
    Some(raw.into_iter().map(|(k, v)| (k, UPoly::new(v))).collect())
}
