//! Text syntax for polynomials, differential operators and one-forms.
//!
//! Grammar (shared by the CLI and tests):
//!   expr   := term (('+' | '-') term)*
//!   term   := factor ('*' factor)*
//!   factor := atom ('^' uint)?
//!   atom   := rational | var | dvar | fvar | '(' expr ')' | '-' factor
//!
//! Variables are `x1..xN` with aliases `x,y,z` when `N <= 3`; `d1..dN`
//! (aliases `dx,dy,dz`) denote the derivations and are only legal in
//! operator context; `dx_i` symbols in one-form context mark the component.
//! `*` is composition for operators, parsed left to right and normalized on
//! construction.

use crate::poly::Poly;
use crate::rat::{rat, Rat};
use crate::weyl::{OneForm, WeylOp};
use num::bigint::BigInt;
use num::rational::BigRational;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Var(usize),
    DVar(usize),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a str,
    nvars: usize,
    toks: Vec<(usize, Tok)>,
}

fn lex(src: &str, nvars: usize) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut lx = Lexer {
        src,
        nvars,
        toks: Vec::new(),
    };
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                lx.toks.push((i, Tok::Plus));
                i += 1;
            }
            '-' => {
                lx.toks.push((i, Tok::Minus));
                i += 1;
            }
            '*' => {
                lx.toks.push((i, Tok::Star));
                i += 1;
            }
            '^' => {
                lx.toks.push((i, Tok::Caret));
                i += 1;
            }
            '/' => {
                lx.toks.push((i, Tok::Slash));
                i += 1;
            }
            '(' => {
                lx.toks.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                lx.toks.push((i, Tok::RParen));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = lx.src[start..i].parse().unwrap();
                lx.toks.push((start, Tok::Num(n)));
            }
            'a'..='z' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric()) {
                    i += 1;
                }
                let name = &lx.src[start..i];
                let tok = ident_token(name, lx.nvars).ok_or_else(|| ParseError {
                    position: start,
                    message: format!("unknown symbol `{}`", name),
                })?;
                lx.toks.push((start, tok));
            }
            _ => {
                return Err(ParseError {
                    position: i,
                    message: format!("unexpected character `{}`", c),
                })
            }
        }
    }
    Ok(lx.toks)
}

fn ident_token(name: &str, nvars: usize) -> Option<Tok> {
    let alias = |s: &str| -> Option<usize> {
        if nvars <= 3 {
            match s {
                "x" => Some(0),
                "y" => Some(1),
                "z" => Some(2),
                _ => None,
            }
        } else {
            None
        }
    };
    if let Some(i) = alias(name) {
        return (i < nvars).then_some(Tok::Var(i));
    }
    if let Some(rest) = name.strip_prefix('d') {
        if let Some(i) = alias(rest) {
            return (i < nvars).then_some(Tok::DVar(i));
        }
        if let Ok(k) = rest.parse::<usize>() {
            return (k >= 1 && k <= nvars).then_some(Tok::DVar(k - 1));
        }
    }
    if let Some(rest) = name.strip_prefix('x') {
        if let Ok(k) = rest.parse::<usize>() {
            return (k >= 1 && k <= nvars).then_some(Tok::Var(k - 1));
        }
    }
    None
}

/// Parser over a token stream; generic in the value being built so the same
/// grammar serves polynomials and operators.
struct Parser<'a, V> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    end: usize,
    ops: &'a dyn Alg<V>,
}

/// The algebraic operations a parse target must provide.
trait Alg<V> {
    fn constant(&self, c: Rat) -> V;
    fn var(&self, i: usize) -> V;
    fn dvar(&self, i: usize, at: usize) -> Result<V, ParseError>;
    fn add(&self, a: V, b: V) -> V;
    fn sub(&self, a: V, b: V) -> V;
    fn mul(&self, a: V, b: V) -> V;
    fn neg(&self, a: V) -> V;
    fn pow(&self, a: V, n: u32) -> V;
}

impl<'a, V> Parser<'a, V> {
    fn peek(&self) -> Option<&Tok> {
        (self.pos < self.toks.len()).then(|| &self.toks[self.pos].1)
    }

    fn here(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<V, ParseError> {
        let mut v = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let t = self.term()?;
                    v = self.ops.add(v, t);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let t = self.term()?;
                    v = self.ops.sub(v, t);
                }
                _ => return Ok(v),
            }
        }
    }

    fn term(&mut self) -> Result<V, ParseError> {
        let mut v = self.factor()?;
        while let Some(Tok::Star) = self.peek() {
            self.bump();
            let f = self.factor()?;
            v = self.ops.mul(v, f);
        }
        Ok(v)
    }

    fn factor(&mut self) -> Result<V, ParseError> {
        let a = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let at = self.here();
            match self.bump() {
                Some(Tok::Num(n)) => {
                    let e: u32 = n.to_string().parse().map_err(|_| ParseError {
                        position: at,
                        message: "exponent too large".into(),
                    })?;
                    Ok(self.ops.pow(a, e))
                }
                _ => Err(ParseError {
                    position: at,
                    message: "expected integer exponent after `^`".into(),
                }),
            }
        } else {
            Ok(a)
        }
    }

    fn atom(&mut self) -> Result<V, ParseError> {
        let at = self.here();
        match self.bump() {
            Some(Tok::Num(n)) => {
                // optional rational literal p/q
                if let Some(Tok::Slash) = self.peek() {
                    self.bump();
                    let at2 = self.here();
                    match self.bump() {
                        Some(Tok::Num(d)) if d != BigInt::from(0) => {
                            Ok(self.ops.constant(BigRational::new(n, d)))
                        }
                        _ => Err(ParseError {
                            position: at2,
                            message: "expected nonzero integer denominator".into(),
                        }),
                    }
                } else {
                    Ok(self.ops.constant(BigRational::from_integer(n)))
                }
            }
            Some(Tok::Var(i)) => Ok(self.ops.var(i)),
            Some(Tok::DVar(i)) => self.ops.dvar(i, at),
            Some(Tok::Minus) => {
                let f = self.factor()?;
                Ok(self.ops.neg(f))
            }
            Some(Tok::LParen) => {
                let v = self.expr()?;
                let at2 = self.here();
                match self.bump() {
                    Some(Tok::RParen) => Ok(v),
                    _ => Err(ParseError {
                        position: at2,
                        message: "expected `)`".into(),
                    }),
                }
            }
            _ => Err(ParseError {
                position: at,
                message: "expected a value".into(),
            }),
        }
    }
}

struct PolyAlg {
    nvars: usize,
}

impl Alg<Poly> for PolyAlg {
    fn constant(&self, c: Rat) -> Poly {
        Poly::constant(self.nvars, c)
    }
    fn var(&self, i: usize) -> Poly {
        Poly::var(self.nvars, i)
    }
    fn dvar(&self, _i: usize, at: usize) -> Result<Poly, ParseError> {
        Err(ParseError {
            position: at,
            message: "derivations are not allowed in a polynomial".into(),
        })
    }
    fn add(&self, a: Poly, b: Poly) -> Poly {
        &a + &b
    }
    fn sub(&self, a: Poly, b: Poly) -> Poly {
        &a - &b
    }
    fn mul(&self, a: Poly, b: Poly) -> Poly {
        &a * &b
    }
    fn neg(&self, a: Poly) -> Poly {
        -&a
    }
    fn pow(&self, a: Poly, n: u32) -> Poly {
        a.pow(n)
    }
}

struct OpAlg {
    nvars: usize,
    twist: OneForm,
}

impl Alg<WeylOp> for OpAlg {
    fn constant(&self, c: Rat) -> WeylOp {
        WeylOp::constant(self.nvars, self.twist.clone(), c)
    }
    fn var(&self, i: usize) -> WeylOp {
        WeylOp::coordinate(self.nvars, self.twist.clone(), i)
    }
    fn dvar(&self, i: usize, _at: usize) -> Result<WeylOp, ParseError> {
        Ok(WeylOp::derivation(self.nvars, self.twist.clone(), i))
    }
    fn add(&self, a: WeylOp, b: WeylOp) -> WeylOp {
        a.checked_add(&b).expect("same twist by construction")
    }
    fn sub(&self, a: WeylOp, b: WeylOp) -> WeylOp {
        self.add(a, b.scale(&rat(-1)))
    }
    fn mul(&self, a: WeylOp, b: WeylOp) -> WeylOp {
        a.checked_mul(&b).expect("same twist by construction")
    }
    fn neg(&self, a: WeylOp) -> WeylOp {
        a.scale(&rat(-1))
    }
    fn pow(&self, a: WeylOp, n: u32) -> WeylOp {
        let mut out = self.constant(rat(1));
        for _ in 0..n {
            out = self.mul(out, a.clone());
        }
        out
    }
}

fn run<V>(src: &str, nvars: usize, ops: &dyn Alg<V>) -> Result<V, ParseError> {
    let toks = lex(src, nvars)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        end: src.len(),
        ops,
    };
    let v = p.expr()?;
    if p.pos != toks.len() {
        return Err(ParseError {
            position: p.here(),
            message: "trailing input".into(),
        });
    }
    Ok(v)
}

pub fn parse_poly(src: &str, nvars: usize) -> Result<Poly, ParseError> {
    run(src, nvars, &PolyAlg { nvars })
}

/// Parse an operator expression in the (possibly twisted) Weyl algebra.
pub fn parse_weyl(src: &str, nvars: usize, twist: &OneForm) -> Result<WeylOp, ParseError> {
    run(
        src,
        nvars,
        &OpAlg {
            nvars,
            twist: twist.clone(),
        },
    )
}

/// Parse a one-form `p1*d1 + ... + pN*dN`. Each `d`-symbol marks the
/// component its (polynomial) cofactor belongs to; a term may contain at
/// most one `d`-symbol, to the first power.
pub fn parse_one_form(src: &str, nvars: usize) -> Result<OneForm, ParseError> {
    // Reuse the operator parser over the untwisted algebra: a valid one-form
    // text parses to an operator that is linear in the derivations with
    // polynomial coefficients. Empty or "0" input is the zero form.
    if src.trim().is_empty() || src.trim() == "0" {
        return Ok(OneForm::zero(nvars));
    }
    let op = parse_weyl(src, nvars, &OneForm::zero(nvars))?;
    let mut comps = vec![Poly::zero(nvars); nvars];
    for (key, c) in op.terms() {
        let b = &key.1;
        if b.degree() != 1 {
            return Err(ParseError {
                position: 0,
                message: "a one-form must be linear in d-symbols".into(),
            });
        }
        let i = b.0.iter().position(|&e| e == 1).unwrap();
        comps[i].add_term(key.0.clone(), c.clone());
    }
    Ok(OneForm::new(comps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::ratio;

    #[test]
    fn poly_roundtrip() {
        let p = parse_poly("x^2 - 2/5*x*y + 3", 2).unwrap();
        assert_eq!(p.coeff(&crate::mono::Mono(vec![1, 1])), ratio(-2, 5));
        assert_eq!(parse_poly(&p.to_string(), 2).unwrap(), p);
    }

    #[test]
    fn numbered_variables() {
        let p = parse_poly("x1*x4^2", 4).unwrap();
        assert_eq!(p.degree(), Some(3));
        assert!(parse_poly("x", 4).is_err());
    }

    #[test]
    fn rejects_derivation_in_poly() {
        let err = parse_poly("dx + 1", 1).unwrap_err();
        assert!(err.message.contains("not allowed"));
    }

    #[test]
    fn error_position() {
        let err = parse_poly("x + ?", 1).unwrap_err();
        assert_eq!(err.position, 4);
    }
}
