//! Scalar text grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' exponent)?
//! exponent := ['-'] int | '(' ['-'] int ['/' int] ')'
//! atom   := int | zN | name | '(' expr ')'
//! ```

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use super::cyclo::fmt_rat;
use super::poly::{Mono, Poly};
use super::{CycNumber, Domain, Rat, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ScalarError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((start, Tok::Int(s.parse().unwrap())));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(ScalarError::Syntax { pos: i, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    dom: &'a Arc<Domain>,
    bindings: &'a HashMap<String, Scalar>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn at(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: &str) -> Result<T, ScalarError> {
        Err(ScalarError::Syntax { pos: self.at(), msg: msg.to_string() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.peek() == Some(&Tok::Sym('/')) {
                let pos = self.at();
                self.pos += 1;
                let d = self.unary()?;
                acc = acc.checked_div(&d).map_err(|_| ScalarError::Syntax {
                    pos,
                    msg: "division by zero".to_string(),
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Scalar, ScalarError> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn int(&mut self) -> Result<BigInt, ScalarError> {
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(v)
            }
            _ => self.err("expected integer"),
        }
    }

    /// Returns the exponent as a reduced fraction.
    fn exponent(&mut self) -> Result<Rat, ScalarError> {
        if self.eat('(') {
            let neg = self.eat('-');
            let a = self.int()?;
            let b = if self.eat('/') { self.int()? } else { BigInt::one() };
            if !self.eat(')') {
                return self.err("expected `)` after exponent");
            }
            if b == BigInt::from(0) {
                return self.err("zero denominator in exponent");
            }
            let r = Rat::new(a, b);
            return Ok(if neg { -r } else { r });
        }
        let neg = self.eat('-');
        let a = self.int()?;
        Ok(Rat::from_integer(if neg { -a } else { a }))
    }

    fn power(&mut self) -> Result<Scalar, ScalarError> {
        let start = self.at();
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                let base = Scalar::from_rat(self.dom, Rat::from_integer(v));
                self.int_power(base)
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                self.int_power(inner)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let exp = if self.eat('^') { self.exponent()? } else { Rat::one() };
                self.ident(&name, exp, start)
            }
            Some(_) => self.err("unexpected token"),
            None => self.err("unexpected end of input"),
        }
    }

    fn int_power(&mut self, base: Scalar) -> Result<Scalar, ScalarError> {
        if !self.eat('^') {
            return Ok(base);
        }
        let pos = self.at();
        let e = self.exponent()?;
        if !e.is_integer() {
            return Err(ScalarError::Syntax { pos, msg: "fractional power of a compound expression".into() });
        }
        let e: i64 = e.to_integer().try_into().map_err(|_| ScalarError::Syntax { pos, msg: "exponent too large".into() })?;
        base.pow(e).map_err(|_| ScalarError::Syntax { pos, msg: "negative power of zero".into() })
    }

    fn ident(&mut self, name: &str, exp: Rat, pos: usize) -> Result<Scalar, ScalarError> {
        if let Some(v) = self.bindings.get(name) {
            if !exp.is_integer() {
                return Err(ScalarError::Syntax { pos, msg: format!("fractional power of `{name}`") });
            }
            let e: i64 = exp.to_integer().try_into().unwrap_or(i64::MAX);
            return v.pow(e).map_err(|_| ScalarError::Syntax { pos, msg: "negative power of zero".into() });
        }
        if let (None, Some(order)) = (self.dom.index_of(name), root_name(name)) {
            // ζ_order^(a/b) = ζ_(order·b)^a
            let n = BigInt::from(order) * exp.denom();
            let n: u32 = n.try_into().map_err(|_| ScalarError::ConductorMismatch { order, conductor: self.dom.conductor() })?;
            let k: i64 = (exp.numer() % BigInt::from(n)).try_into().unwrap();
            return Scalar::root_of_unity(self.dom, n, k);
        }
        let i = self.dom.index_of(name).ok_or_else(|| ScalarError::UnknownParameter(name.to_string()))?;
        let r = self.dom.params()[i].root_order;
        let e = &exp * Rat::from_integer(BigInt::from(r));
        if !e.is_integer() {
            return Err(ScalarError::BadExponent { name: name.to_string(), exp: fmt_rat(&exp), root_order: r });
        }
        let e: i64 = e.to_integer().try_into().unwrap();
        let n = self.dom.conductor();
        let t = Scalar::from_poly(self.dom, Poly::var_pow(n, self.dom.nvars(), i, 1));
        t.pow(e).map_err(|_| ScalarError::DivisionByZero)
    }
}

fn root_name(name: &str) -> Option<u32> {
    let rest = name.strip_prefix('z')?;
    if rest.is_empty() || !rest.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok().filter(|&n: &u32| n > 0)
}

/// Parses `text` inside `dom`.
pub fn parse_scalar(text: &str, dom: &Arc<Domain>) -> Result<Scalar, ScalarError> {
    parse_with(text, dom, &HashMap::new())
}

/// Parses `text`, resolving identifiers in `bindings` first, then parameters
/// (a parameter may shadow a root name such as `z12`), then roots of unity.
pub fn parse_with(text: &str, dom: &Arc<Domain>, bindings: &HashMap<String, Scalar>) -> Result<Scalar, ScalarError> {
    let toks = lex(text)?;
    let end = text.chars().count();
    let mut p = Parser { toks, pos: 0, end, dom, bindings };
    if p.peek().is_none() {
        return p.err("empty expression");
    }
    let v = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(v.embed(&Domain::merge(v.domain(), dom)?))
}

fn mono_text(m: &Mono, dom: &Domain) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        if e == 0 {
            continue;
        }
        let p = &dom.params()[i];
        let r = p.root_order;
        let g = (e as u64).gcd(&(r as u64)) as u32;
        let (a, b) = (e / g, r / g);
        parts.push(match (a, b) {
            (1, 1) => p.name.clone(),
            (a, 1) => format!("{}^{}", p.name, a),
            (a, b) => format!("{}^({}/{})", p.name, a, b),
        });
    }
    parts.join("*")
}

fn poly_text(p: &Poly, dom: &Domain) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (m, c) in p.terms() {
        let ms = mono_text(m, dom);
        let (neg, body) = term_text(c, &ms);
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        s.push_str(&body);
    }
    s
}

fn term_text(c: &CycNumber, ms: &str) -> (bool, String) {
    let n = c.conductor();
    if c.term_count() == 1 {
        let (k, r) = c.coeffs().iter().enumerate().find(|(_, x)| !num_traits::Zero::is_zero(*x)).unwrap();
        let neg = r.is_negative();
        let mag = r.abs();
        let coef = if k == 0 {
            fmt_rat(&mag)
        } else {
            let root = if k == 1 { format!("z{n}") } else { format!("z{n}^{k}") };
            if mag.is_one() {
                root
            } else {
                format!("{}*{}", fmt_rat(&mag), root)
            }
        };
        let body = if ms.is_empty() {
            coef
        } else if k == 0 && mag.is_one() {
            ms.to_string()
        } else {
            format!("{coef}*{ms}")
        };
        return (neg, body);
    }
    let coef = format!("({})", c.render());
    if ms.is_empty() {
        (false, coef)
    } else {
        (false, format!("{coef}*{ms}"))
    }
}

/// Canonical text; `parse_scalar(render_scalar(a))` reproduces `a`.
pub fn render_scalar(a: &Scalar) -> String {
    let dom = a.domain();
    let num = poly_text(a.numerator(), dom);
    if a.denominator().is_one() {
        return num;
    }
    format!("({})/({})", num, poly_text(a.denominator(), dom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Param;

    #[test]
    fn basic_parse() {
        let d = Domain::standard();
        let a = parse_scalar("z9^4 + 1/3", &d).unwrap();
        let z9 = Scalar::root_of_unity(&d, 9, 4).unwrap();
        assert_eq!(a, &z9 + &Scalar::from_ratio(&d, 1, 3));
        let b = parse_scalar("(1-z3)/2", &d).unwrap();
        let want = (Scalar::one(&d) - Scalar::root_of_unity(&d, 3, 1).unwrap()) / Scalar::from_int(&d, 2);
        assert_eq!(b, want);
        assert_eq!(parse_scalar("z3^(5/3)", &d).unwrap(), Scalar::root_of_unity(&d, 9, 5).unwrap());
    }

    #[test]
    fn fractional_param_power() {
        let d = Domain::new(36, vec![Param::new("u", 3)]);
        let a = parse_scalar("-u^(1/3)", &d).unwrap();
        assert_eq!(a, -Scalar::param_root(&d, "u").unwrap());
        assert!(matches!(parse_scalar("u^(1/2)", &d), Err(ScalarError::BadExponent { .. })));
    }

    #[test]
    fn errors_carry_positions() {
        let d = Domain::standard();
        assert_eq!(
            parse_scalar("1 + * 2", &d),
            Err(ScalarError::Syntax { pos: 4, msg: "unexpected token".into() })
        );
        assert!(matches!(parse_scalar("q", &d), Err(ScalarError::UnknownParameter(_))));
    }

    #[test]
    fn render_round_trip() {
        let d = Domain::new(36, vec![Param::new("u", 3), Param::new("nu", 1)]);
        for t in ["-u^(2/3)/(u+1)", "(1 - z3)/(2*nu) + u", "z9^4*nu^2 - 1/7", "0", "(z3 + 2)*u^(1/3)"] {
            let a = parse_scalar(t, &d).unwrap();
            let r = render_scalar(&a);
            assert_eq!(parse_scalar(&r, &d).unwrap(), a, "{t} -> {r}");
            assert_eq!(render_scalar(&parse_scalar(&r, &d).unwrap()), r);
        }
    }
}
