//! Canonical text form of polynomials in `k` and `z`.
//!
//! Rendering is descending in `k`; each `k`-coefficient is a polynomial in
//! `z` and gets parenthesized when it has more than one term, e.g.
//! `(2*z+1)*k^2 - 3*k + 1/2`. The parser accepts the same grammar: integers,
//! rationals `a/b`, the variables `k` and `z` (plus caller-supplied bindings
//! such as `eta`), `+ - * ^`, division by constants, and parentheses.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::{KPoly, Poly, Rational, ZPoly};

/// Renders `c * var^e` terms of a rational polynomial without spaces:
/// `2*z^2+3*z+1`, `-z-8`, `1/2*z`.
pub fn render_zpoly(f: &ZPoly, var: &str) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (e, c) in f.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let mag = c.abs();
        if neg {
            out.push('-');
        } else if !out.is_empty() {
            out.push('+');
        }
        let monomial = match e {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{e}"),
        };
        if monomial.is_empty() {
            out.push_str(&mag.to_string());
        } else if mag.is_one() {
            out.push_str(&monomial);
        } else {
            out.push_str(&format!("{mag}*{monomial}"));
        }
    }
    out
}

fn term_count(f: &ZPoly) -> usize {
    f.coeffs().iter().filter(|c| !c.is_zero()).count()
}

/// Renders a `KPoly` in the canonical form used throughout the JSON files.
pub fn render_kpoly(f: &KPoly) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (e, c) in f.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let monomial = match e {
            0 => String::new(),
            1 => "k".to_string(),
            _ => format!("k^{e}"),
        };
        // single-term coefficients carry their own sign; compound ones are
        // parenthesized and always added
        let (neg, body) = if term_count(c) == 1 {
            let neg = c.leading().is_some_and(|l| l.is_negative());
            let mag = if neg { -c.clone() } else { c.clone() };
            let text = render_zpoly(&mag, "z");
            let body = match (monomial.is_empty(), text == "1") {
                (true, _) => text,
                (false, true) => monomial.clone(),
                (false, false) => format!("{text}*{monomial}"),
            };
            (neg, body)
        } else {
            let text = format!("({})", render_zpoly(c, "z"));
            let body = if monomial.is_empty() {
                text
            } else {
                format!("{text}*{monomial}")
            };
            (false, body)
        };
        match (out.is_empty(), neg) {
            (true, true) => out.push('-'),
            (true, false) => {}
            (false, true) => out.push_str(" - "),
            (false, false) => out.push_str(" + "),
        }
        out.push_str(&body);
    }
    out
}

impl fmt::Display for Poly<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_zpoly(self, "z"))
    }
}

impl fmt::Display for Poly<ZPoly> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_kpoly(self))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let mut toks = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = src[start..i].parse().expect("digits");
            toks.push((start, Tok::Num(n)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            toks.push((start, Tok::Ident(src[start..i].to_string())));
        } else if "+-*/^()".contains(c) {
            toks.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(Error::Parse {
                pos: i,
                msg: format!("unexpected character {c:?}"),
            });
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    bindings: &'a [(&'a str, ZPoly)],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<KPoly> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc + self.term()?;
            } else if self.eat('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<KPoly> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc * self.unary()?;
            } else if self.eat('/') {
                let at = self.offset();
                let d = self.unary()?;
                let c = constant_of(&d).filter(|c| !c.is_zero()).ok_or(Error::Parse {
                    pos: at,
                    msg: "division only by nonzero constants".into(),
                })?;
                acc = acc.scale(&ZPoly::constant(c.recip()));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<KPoly> {
        if self.eat('-') {
            Ok(-self.unary()?)
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<KPoly> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.toks.get(self.pos).cloned() {
                Some((_, Tok::Num(n))) => {
                    self.pos += 1;
                    match n.to_u32() {
                        Some(e) => Ok(base.pow(e)),
                        None => self.err("exponent too large"),
                    }
                }
                _ => self.err("expected a nonnegative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<KPoly> {
        match self.toks.get(self.pos).cloned() {
            Some((_, Tok::Num(n))) => {
                self.pos += 1;
                Ok(KPoly::constant(ZPoly::constant(Rational::from_integer(n))))
            }
            Some((_, Tok::Ident(name))) => {
                self.pos += 1;
                match name.as_str() {
                    "k" => Ok(KPoly::var()),
                    "z" => Ok(KPoly::constant(ZPoly::var())),
                    other => match self.bindings.iter().find(|(n, _)| *n == other) {
                        Some((_, v)) => Ok(KPoly::constant(v.clone())),
                        None => {
                            self.pos -= 1;
                            self.err(format!("unknown variable {other:?}"))
                        }
                    },
                }
            }
            Some((_, Tok::Op('('))) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(inner)
            }
            Some(_) => self.err("unexpected token"),
            None => self.err("unexpected end of input"),
        }
    }
}

fn constant_of(f: &KPoly) -> Option<Rational> {
    match f.degree() {
        None => Some(Rational::zero()),
        Some(0) => {
            let c = &f.coeffs()[0];
            match c.degree() {
                Some(0) => Some(c.coeffs()[0].clone()),
                _ => None,
            }
        }
        _ => None,
    }
}

/// Parses a polynomial in `k` and `z`, with extra named `ZPoly` bindings.
pub fn parse_kpoly_with(src: &str, bindings: &[(&str, ZPoly)]) -> Result<KPoly> {
    let mut p = Parser {
        toks: tokenize(src)?,
        pos: 0,
        end: src.len(),
        bindings,
    };
    let f = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(f)
}

pub fn parse_kpoly(src: &str) -> Result<KPoly> {
    parse_kpoly_with(src, &[])
}

/// Parses a polynomial that must not involve `k`.
pub fn parse_zpoly_with(src: &str, bindings: &[(&str, ZPoly)]) -> Result<ZPoly> {
    let f = parse_kpoly_with(src, bindings)?;
    match f.degree() {
        None => Ok(ZPoly::zero()),
        Some(0) => Ok(f.coeffs()[0].clone()),
        _ => Err(Error::Parse {
            pos: 0,
            msg: "expected a polynomial in z only".into(),
        }),
    }
}

pub fn parse_zpoly(src: &str) -> Result<ZPoly> {
    parse_zpoly_with(src, &[])
}

/// Parses a rational constant such as `-1/2`.
pub fn parse_rational(src: &str) -> Result<Rational> {
    let f = parse_zpoly(src)?;
    match f.degree() {
        None => Ok(Rational::zero()),
        Some(0) => Ok(f.coeffs()[0].clone()),
        _ => Err(Error::Parse {
            pos: 0,
            msg: "expected a rational constant".into(),
        }),
    }
}
