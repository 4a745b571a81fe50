//! Recursive-descent parser for rational expressions.
//!
//! Grammar: sums and differences of products and quotients of powers, with
//! integer exponents. Numbers are exact (`0.25` is `1/4`); `i` is the
//! imaginary unit and `zeta(m)` the primitive root of unity `exp(2πi/m)`.

use crate::ratfunc::RatFunc;
use crate::scalar::Scalar;
use crate::{Error, Result, Q};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

/// What an identifier stands for.
#[derive(Clone, Debug)]
pub enum Symbol {
    Var(usize),
    Const(Scalar),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Q),
    Ident(String),
    Op(char),
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
}

fn lex(text: &str, line: usize, col0: usize) -> Result<Lexer> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let col = col0 + i;
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || (ch == '.' && chars.get(i + 1).is_some_and(|c| c.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let mut frac = String::new();
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    frac.push(chars[i]);
                    i += 1;
                }
            }
            let int_part: String = chars[start..i].iter().take_while(|c| c.is_ascii_digit()).collect();
            let mut val = Q::from_integer(if int_part.is_empty() {
                BigInt::zero()
            } else {
                int_part.parse::<BigInt>().unwrap()
            });
            if !frac.is_empty() {
                let scale = BigInt::from(10u32).pow(frac.len() as u32);
                val += Q::new(frac.parse::<BigInt>().unwrap(), scale);
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                let mut sign = 1i32;
                if j < chars.len() && (chars[j] == '-' || chars[j] == '+') {
                    if chars[j] == '-' {
                        sign = -1;
                    }
                    j += 1;
                }
                let es = j;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j > es {
                    let e: u32 = chars[es..j].iter().collect::<String>().parse().map_err(|_| {
                        Error::parse(line, col, "exponent too large")
                    })?;
                    let p = Q::from_integer(BigInt::from(10u32).pow(e));
                    val = if sign > 0 { val * p } else { val / p };
                    i = j;
                }
            }
            toks.push((Tok::Num(val), col));
        } else if ch.is_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else if "+-*/^(),".contains(ch) {
            toks.push((Tok::Op(ch), col));
            i += 1;
        } else {
            return Err(Error::parse(line, col, format!("unexpected character '{ch}'")));
        }
    }
    Ok(Lexer { toks })
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    end_col: usize,
    nvars: usize,
    resolve: &'a dyn Fn(&str) -> Option<Symbol>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|(_, c)| *c).unwrap_or(self.end_col)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line, self.col(), msg)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RatFunc> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.peek() == Some(&Tok::Op('/')) {
                let col = self.col();
                self.pos += 1;
                let d = self.unary()?;
                acc = acc
                    .div(&d)
                    .map_err(|_| Error::parse(self.line, col, "division by zero"))?;
            } else if matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::Op('('))) {
                // implicit product such as `2x` or `a(1+x)`
                acc = acc.mul(&self.power()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RatFunc> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<RatFunc> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Op('^')) {
            self.pos += 1;
            let col = self.col();
            let e = self.unary()?;
            let e = e
                .constant_value()
                .and_then(|s| s.as_rational().cloned())
                .filter(|r| r.is_integer())
                .and_then(|r| r.to_integer().to_i32())
                .ok_or_else(|| Error::parse(self.line, col, "exponent must be an integer constant"))?;
            return base
                .pow(e)
                .map_err(|_| Error::parse(self.line, col, "negative power of zero"));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatFunc> {
        let col = self.col();
        let Some((tok, _)) = self.toks.get(self.pos).cloned() else {
            return Err(self.err("unexpected end of expression"));
        };
        self.pos += 1;
        match tok {
            Tok::Num(q) => Ok(RatFunc::constant(self.nvars, Scalar::Rational(q))),
            Tok::Op('(') => {
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Tok::Ident(name) if name == "zeta" => {
                if !self.eat('(') {
                    return Err(self.err("expected '(' after zeta"));
                }
                let c = self.col();
                let m = match self.toks.get(self.pos) {
                    Some((Tok::Num(q), _)) if q.is_integer() => q.to_integer().to_u32(),
                    _ => None,
                }
                .filter(|&m| m >= 1)
                .ok_or_else(|| Error::parse(self.line, c, "zeta expects a positive integer order"))?;
                self.pos += 1;
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(RatFunc::constant(self.nvars, Scalar::zeta(m)))
            }
            Tok::Ident(name) => match (self.resolve)(&name) {
                Some(Symbol::Var(v)) => Ok(RatFunc::var(self.nvars, v)),
                Some(Symbol::Const(c)) => Ok(RatFunc::constant(self.nvars, c)),
                None if name == "i" => Ok(RatFunc::constant(self.nvars, Scalar::i())),
                None => Err(Error::parse(self.line, col, format!("unknown symbol '{name}'"))),
            },
            Tok::Op(c) => Err(Error::parse(self.line, col, format!("unexpected '{c}'"))),
        }
    }
}

/// Parses `text` into a rational function in a ring with `nvars` variables.
/// `line` and `col0` locate the text for error messages.
pub fn parse_ratfunc(
    text: &str,
    nvars: usize,
    resolve: &dyn Fn(&str) -> Option<Symbol>,
    line: usize,
    col0: usize,
) -> Result<RatFunc> {
    let lexer = lex(text, line, col0)?;
    let end_col = col0 + text.chars().count();
    let mut p = Parser { toks: lexer.toks, pos: 0, line, end_col, nvars, resolve };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

/// Parses a constant expression such as `-3/4`, `1 + 2*i` or `zeta(6)^2`.
pub fn parse_constant(text: &str) -> Result<Scalar> {
    let none = |_: &str| None;
    let f = parse_ratfunc(text, 0, &none, 1, 1)?;
    f.constant_value()
        .ok_or_else(|| Error::parse(1, 1, format!("not a constant: {text}")))
}

/// Parses a rational number (no complex parts).
pub fn parse_rational(text: &str) -> Result<Q> {
    match parse_constant(text)? {
        Scalar::Rational(q) => Ok(q),
        _ => Err(Error::parse(1, 1, format!("not a rational number: {text}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn constants() {
        assert_eq!(parse_constant("-3/4").unwrap(), Scalar::ratio(-3, 4));
        assert_eq!(parse_constant("0.25").unwrap(), Scalar::ratio(1, 4));
        assert_eq!(parse_constant("1e-2").unwrap(), Scalar::ratio(1, 100));
        assert_eq!(parse_constant("(1+2*i)^2").unwrap(), Scalar::gaussian(q(-3, 1), q(4, 1)));
        assert_eq!(parse_constant("zeta(3)^3").unwrap(), Scalar::one());
        assert_eq!(parse_constant("2^-2").unwrap(), Scalar::ratio(1, 4));
    }

    #[test]
    fn expression_with_vars() {
        let resolve = |s: &str| match s {
            "x" => Some(Symbol::Var(0)),
            "y" => Some(Symbol::Var(1)),
            "a" => Some(Symbol::Const(Scalar::int(2))),
            _ => None,
        };
        let f = parse_ratfunc("a*y/(1+x)", 2, &resolve, 1, 1).unwrap();
        let g = parse_ratfunc("2y / (x + 1)", 2, &resolve, 1, 1).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn errors_carry_location() {
        let none = |_: &str| None;
        match parse_ratfunc("1 + $", 0, &none, 4, 10) {
            Err(Error::Parse { line, col, .. }) => {
                assert_eq!(line, 4);
                assert_eq!(col, 14);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_ratfunc("x^y", 1, &|_| Some(Symbol::Var(0)), 1, 1).is_err());
        assert!(parse_constant("1/0").is_err());
        assert!(parse_constant("(1+2").is_err());
    }
}
