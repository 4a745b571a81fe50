//! Text format for equation definitions.
//!
//! ```text
//! # Pielou
//! name: pielou
//! family: pielou
//! field: real
//! order: 2
//! params: a
//! numerator: a*x0
//! denominator: 1 + x1
//! domain: natural
//! ```
//!
//! `x0` is the newest value `x_n` and `xj` is `x_{n-j}`. A `vars:` line
//! may instead name the window variables, oldest first. Parameters are
//! `name = value` (bound) or a bare `name` (kept symbolic). `map:` can
//! replace the numerator and denominator pair. Unknown keys are kept as
//! metadata. Several definitions in one file are separated by `---`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::map::{lag_name, DifferenceEquation, DomainPolicy, RationalMap};
use crate::parse::{parse_constant, parse_ratfunc, Symbol};
use crate::ratfunc::RatFunc;
use crate::scalar::{Field, Scalar};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct EquationDef {
    pub name: Option<String>,
    pub family: Option<String>,
    pub field: Field,
    pub order: usize,
    /// Custom window variable names, oldest first.
    pub vars: Option<Vec<String>>,
    pub params: Vec<(String, Option<Scalar>)>,
    pub numerator: String,
    pub denominator: String,
    pub domain: DomainPolicy,
    pub extra: BTreeMap<String, String>,
    /// Line of the numerator (or map) entry, for error locations.
    num_pos: (usize, usize),
    den_pos: (usize, usize),
}

const KNOWN: &[&str] = &[
    "name", "family", "field", "order", "vars", "params", "numerator", "denominator", "map", "domain",
];

impl EquationDef {
    pub fn new(order: usize, numerator: &str, denominator: &str) -> Self {
        EquationDef {
            name: None,
            family: None,
            field: Field::Real,
            order,
            vars: None,
            params: Vec::new(),
            numerator: numerator.to_string(),
            denominator: denominator.to_string(),
            domain: DomainPolicy::Natural,
            extra: BTreeMap::new(),
            num_pos: (0, 1),
            den_pos: (0, 1),
        }
    }

    pub fn with_params(mut self, params: &[(&str, Option<Scalar>)]) -> Self {
        self.params = params.iter().map(|(n, v)| (n.to_string(), v.clone())).collect();
        self
    }

    pub fn with_vars(mut self, vars: &[&str]) -> Self {
        self.vars = Some(vars.iter().map(|s| s.to_string()).collect());
        self
    }

    /// Parses a single definition.
    pub fn parse(text: &str) -> Result<Self> {
        let mut defs = EquationDef::parse_many(text)?;
        match defs.len() {
            1 => Ok(defs.pop().unwrap()),
            0 => Err(Error::parse(1, 1, "no definition found")),
            n => Err(Error::parse(1, 1, format!("expected one definition, found {n}"))),
        }
    }

    /// Parses every definition of a multi-definition file.
    pub fn parse_many(text: &str) -> Result<Vec<Self>> {
        let mut out = Vec::new();
        let mut block: Vec<(usize, &str)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim() == "---" {
                if !block.is_empty() {
                    out.push(EquationDef::parse_block(&block)?);
                    block.clear();
                }
            } else {
                block.push((i + 1, line));
            }
        }
        if block.iter().any(|(_, l)| !strip_comment(l).trim().is_empty()) {
            out.push(EquationDef::parse_block(&block)?);
        }
        Ok(out)
    }

    fn parse_block(lines: &[(usize, &str)]) -> Result<Self> {
        let mut fields: BTreeMap<String, (String, usize, usize)> = BTreeMap::new();
        let mut last_line = 1;
        for &(ln, raw) in lines {
            last_line = ln;
            let line = strip_comment(raw);
            if line.trim().is_empty() {
                continue;
            }
            let Some(colon) = line.find(':') else {
                let col = line.len() - line.trim_start().len() + 1;
                return Err(Error::parse(ln, col, "expected 'key: value'"));
            };
            let key = line[..colon].trim().to_ascii_lowercase();
            let rest = &line[colon + 1..];
            let value = rest.trim();
            let col = colon + 2 + (rest.len() - rest.trim_start().len());
            if key.is_empty() {
                return Err(Error::parse(ln, 1, "empty key"));
            }
            if fields.insert(key.clone(), (value.to_string(), ln, col)).is_some() {
                return Err(Error::parse(ln, 1, format!("duplicate key '{key}'")));
            }
        }
        let get = |k: &str| fields.get(k).cloned();
        let mut def = EquationDef::new(0, "", "1");
        def.name = get("name").map(|v| v.0);
        def.family = get("family").map(|v| v.0);
        if let Some((v, ln, col)) = get("field") {
            def.field = match v.as_str() {
                "real" => Field::Real,
                "complex" => Field::Complex,
                _ => return Err(Error::parse(ln, col, format!("unknown field '{v}'"))),
            };
        }
        if let Some((v, ln, col)) = get("vars") {
            let names: Vec<String> = v.split(',').map(|s| s.trim().to_string()).collect();
            if names.iter().any(|n| !is_ident(n)) {
                return Err(Error::parse(ln, col, "vars must be a comma-separated list of identifiers"));
            }
            def.vars = Some(names);
        }
        match get("order") {
            Some((v, ln, col)) => {
                def.order = v
                    .parse()
                    .ok()
                    .filter(|&k: &usize| k >= 1)
                    .ok_or_else(|| Error::parse(ln, col, "order must be a positive integer"))?;
                if let Some(vars) = &def.vars {
                    if vars.len() != def.order {
                        return Err(Error::parse(ln, col, "order disagrees with the vars list"));
                    }
                }
            }
            None => match &def.vars {
                Some(v) => def.order = v.len(),
                None => return Err(Error::parse(last_line, 1, "missing 'order'")),
            },
        }
        if let Some((v, ln, col)) = get("params") {
            for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (name, value) = match item.split_once('=') {
                    Some((n, val)) => {
                        let val = parse_constant(val.trim()).map_err(|e| relocate(e, ln, col))?;
                        (n.trim().to_string(), Some(val))
                    }
                    None => (item.to_string(), None),
                };
                if !is_ident(&name) {
                    return Err(Error::parse(ln, col, format!("bad parameter name '{name}'")));
                }
                def.params.push((name, value));
            }
        }
        match (get("map"), get("numerator")) {
            (Some((m, ln, col)), None) => {
                if get("denominator").is_some() {
                    return Err(Error::parse(ln, 1, "use either 'map' or 'numerator'/'denominator'"));
                }
                def.numerator = m;
                def.num_pos = (ln, col);
            }
            (None, Some((n, ln, col))) => {
                def.numerator = n;
                def.num_pos = (ln, col);
                if let Some((d, dl, dc)) = get("denominator") {
                    def.denominator = d;
                    def.den_pos = (dl, dc);
                }
            }
            (Some((_, ln, _)), Some(_)) => {
                return Err(Error::parse(ln, 1, "use either 'map' or 'numerator'/'denominator'"));
            }
            (None, None) => return Err(Error::parse(last_line, 1, "missing 'numerator' or 'map'")),
        }
        if let Some((v, ln, col)) = get("domain") {
            let mut parts = v.split_whitespace();
            def.domain = match parts.next() {
                Some("natural") => DomainPolicy::Natural,
                Some("positive") => DomainPolicy::PositiveOrthant,
                Some("epsilon") => {
                    let eps: f64 = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .filter(|e: &f64| *e > 0.0)
                        .ok_or_else(|| Error::parse(ln, col, "epsilon needs a positive radius"))?;
                    DomainPolicy::EpsilonBall { eps }
                }
                _ => return Err(Error::parse(ln, col, format!("unknown domain '{v}'"))),
            };
        }
        for (k, (v, _, _)) in &fields {
            if !KNOWN.contains(&k.as_str()) {
                def.extra.insert(k.clone(), v.clone());
            }
        }
        def.ratfunc()?;
        Ok(def)
    }

    /// Window names oldest first.
    pub fn window_names(&self) -> Vec<String> {
        match &self.vars {
            Some(v) => v.clone(),
            None => (0..self.order).map(|i| lag_name(self.order - 1 - i)).collect(),
        }
    }

    /// Names of the ring variables: window names then symbolic parameters.
    pub fn ring_names(&self) -> Vec<String> {
        let mut names = self.window_names();
        names.extend(self.params.iter().filter(|(_, v)| v.is_none()).map(|(n, _)| n.clone()));
        names
    }

    fn resolver(&self) -> impl Fn(&str) -> Option<Symbol> + '_ {
        let window = self.window_names();
        let k = self.order;
        move |s: &str| {
            if let Some(i) = window.iter().position(|w| w == s) {
                return Some(Symbol::Var(i));
            }
            let mut sym = 0;
            for (name, val) in &self.params {
                if name == s {
                    return Some(match val {
                        Some(c) => Symbol::Const(c.clone()),
                        None => Symbol::Var(k + sym),
                    });
                }
                if val.is_none() {
                    sym += 1;
                }
            }
            None
        }
    }

    /// The iteration function as a reduced fraction.
    pub fn ratfunc(&self) -> Result<RatFunc> {
        let nv = self.ring_names().len();
        let resolve = self.resolver();
        let n = parse_ratfunc(&self.numerator, nv, &resolve, self.num_pos.0, self.num_pos.1)?;
        let d = parse_ratfunc(&self.denominator, nv, &resolve, self.den_pos.0, self.den_pos.1)?;
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        n.div(&d)
    }

    pub fn rational_map(&self) -> Result<RationalMap> {
        RationalMap::new(self.ratfunc()?, self.order, self.ring_names())
    }

    pub fn to_equation(&self) -> Result<DifferenceEquation> {
        Ok(DifferenceEquation::new(self.rational_map()?, self.field, self.domain))
    }

    /// Canonical text with the reduced fraction as numerator/denominator.
    pub fn to_canonical_text(&self) -> Result<String> {
        let f = self.ratfunc()?;
        let names = self.ring_names();
        let mut s = String::new();
        if let Some(n) = &self.name {
            writeln!(s, "name: {n}").unwrap();
        }
        if let Some(fam) = &self.family {
            writeln!(s, "family: {fam}").unwrap();
        }
        writeln!(s, "field: {}", field_str(self.field)).unwrap();
        writeln!(s, "order: {}", self.order).unwrap();
        if let Some(v) = &self.vars {
            writeln!(s, "vars: {}", v.join(", ")).unwrap();
        }
        if !self.params.is_empty() {
            let ps: Vec<String> = self
                .params
                .iter()
                .map(|(n, v)| match v {
                    Some(c) => format!("{n} = {c}"),
                    None => n.clone(),
                })
                .collect();
            writeln!(s, "params: {}", ps.join(", ")).unwrap();
        }
        writeln!(s, "numerator: {}", f.num().display_with(&names)).unwrap();
        writeln!(s, "denominator: {}", f.den().display_with(&names)).unwrap();
        writeln!(s, "domain: {}", domain_str(self.domain)).unwrap();
        for (k, v) in &self.extra {
            writeln!(s, "{k}: {v}").unwrap();
        }
        Ok(s)
    }
}

pub fn field_str(f: Field) -> &'static str {
    match f {
        Field::Real => "real",
        Field::Complex => "complex",
    }
}

pub fn domain_str(d: DomainPolicy) -> String {
    match d {
        DomainPolicy::Natural => "natural".into(),
        DomainPolicy::PositiveOrthant => "positive".into(),
        DomainPolicy::EpsilonBall { eps } => format!("epsilon {eps:e}"),
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
        && s != "i"
        && s != "zeta"
}

fn relocate(e: Error, line: usize, col: usize) -> Error {
    match e {
        Error::Parse { col: c, msg, .. } => Error::Parse { line, col: col + c - 1, msg },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PIELOU: &str = "\
# Pielou
name: pielou
family: pielou
order: 2
params: a
numerator: a*x0
denominator: 1 + x1
";

    #[test]
    fn parses_pielou() {
        let d = EquationDef::parse(PIELOU).unwrap();
        assert_eq!(d.order, 2);
        assert_eq!(d.ring_names(), vec!["x1", "x0", "a"]);
        let m = d.rational_map().unwrap();
        assert_eq!(m.nparams(), 1);
        let bound = m.bind_params(&[Scalar::one()]).unwrap();
        // (x,y) = (x_{n-1}, x_n) = (-1, 5) is a pole
        let v = crate::map::evaluate(&bound, &[Scalar::int(-1), Scalar::int(5)], 1e-12).unwrap();
        assert_eq!(v, crate::map::Eval::PoleHit);
    }

    #[test]
    fn canonical_text_round_trips() {
        let d = EquationDef::parse(PIELOU).unwrap();
        let t = d.to_canonical_text().unwrap();
        let d2 = EquationDef::parse(&t).unwrap();
        assert_eq!(d.ratfunc().unwrap(), d2.ratfunc().unwrap());
        assert_eq!(t, d2.to_canonical_text().unwrap());
    }

    #[test]
    fn custom_vars_and_bound_params() {
        let d = EquationDef::parse("vars: x, y\nparams: p = -1\nmap: p + x/y\n").unwrap();
        let m = d.rational_map().unwrap();
        let v = crate::map::evaluate(&m, &[Scalar::int(2), Scalar::int(2)], 1e-12).unwrap();
        assert_eq!(v, crate::map::Eval::Value(Scalar::zero()));
    }

    #[test]
    fn zero_denominator_rejected() {
        let d = EquationDef::parse("order: 1\nnumerator: x0\ndenominator: x0 - x0\n");
        assert!(matches!(d, Err(Error::ZeroDenominator)));
    }

    #[test]
    fn parse_errors_are_located() {
        let err = EquationDef::parse("order: 1\nnumerator: x0 + @\n").unwrap_err();
        match err {
            Error::Parse { line, col, .. } => assert_eq!((line, col), (2, 17)),
            other => panic!("{other:?}"),
        }
        let err = EquationDef::parse("order: 1\nnumerator: x0 + y\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(EquationDef::parse("numerator: x0\n").is_err());
    }

    #[test]
    fn several_definitions() {
        let text = format!("{PIELOU}---\norder: 1\nmap: 1/x0\n");
        assert_eq!(EquationDef::parse_many(&text).unwrap().len(), 2);
    }
}
