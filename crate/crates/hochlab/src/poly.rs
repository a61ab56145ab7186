//! Sparse multivariate polynomials over the rationals.
//!
//! Terms live in a `BTreeMap` keyed by graded-lex monomials, so equality of
//! values is equality of representations and iteration order is canonical.
//! The zero polynomial is the empty map; no zero coefficient is ever stored.

use crate::error::ArityError;
use crate::mono::Mono;
use crate::rat::{is_zero, rat, Rat};
use num::traits::Zero;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Mono, Rat>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, rat(1))
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(Mono::zero(nvars), c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut p = Poly::zero(nvars);
        p.add_term(Mono::var(nvars, i), rat(1));
        p
    }

    pub fn monomial(nvars: usize, m: Mono, c: Rat) -> Self {
        assert_eq!(m.nvars(), nvars);
        let mut p = Poly::zero(nvars);
        p.add_term(m, c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn coeff(&self, m: &Mono) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add_term(&mut self, m: Mono, c: Rat) {
        if is_zero(&c) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if is_zero(&sum) {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if is_zero(c) {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly, ArityError> {
        if self.nvars != other.nvars {
            return Err(ArityError {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        let mut out = Poly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    /// Formal partial derivative by `x_i` (0-based).
    pub fn partial(&self, i: usize) -> Poly {
        assert!(i < self.nvars, "variable index out of range");
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut v = m.0.clone();
            v[i] = e - 1;
            out.add_term(Mono(v), c.clone() * rat(e as i64));
        }
        out
    }

    /// Iterated partial derivative `d^b`.
    pub fn partial_multi(&self, b: &Mono) -> Poly {
        let mut p = self.clone();
        for (i, &e) in b.0.iter().enumerate() {
            for _ in 0..e {
                p = p.partial(i);
                if p.is_zero() {
                    return p;
                }
            }
        }
        p
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::one(self.nvars);
        for _ in 0..n {
            out = out.checked_mul(self).expect("same arity");
        }
        out
    }

    /// Largest total degree `d` such that some term has degree `d`; zero poly
    /// reports `true` for any cap.
    pub fn degree_within(&self, cap: u32) -> bool {
        self.degree().map_or(true, |d| d <= cap)
    }

    fn var_name(nvars: usize, i: usize) -> String {
        if nvars <= 3 {
            ["x", "y", "z"][i].to_string()
        } else {
            format!("x{}", i + 1)
        }
    }

    fn mono_string(nvars: usize, m: &Mono) -> String {
        let mut parts = Vec::new();
        for (i, &e) in m.0.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(Self::var_name(nvars, i)),
                _ => parts.push(format!("{}^{}", Self::var_name(nvars, i), e)),
            }
        }
        parts.join("*")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c < &Rat::zero();
            let mag = crate::rat::display(&crate::rat::abs(c));
            let ms = Self::mono_string(self.nvars, m);
            let body = if ms.is_empty() {
                mag
            } else if mag == "1" {
                ms
            } else {
                format!("{}*{}", mag, ms)
            };
            if first {
                if neg {
                    write!(f, "-{}", body)?;
                } else {
                    write!(f, "{}", body)?;
                }
                first = false;
            } else if neg {
                write!(f, " - {}", body)?;
            } else {
                write!(f, " + {}", body)?;
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars, "variable arity mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, other: &Poly) -> Poly {
        self + &(-other)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&rat(-1))
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, other: &Poly) -> Poly {
        self.checked_mul(other).expect("variable arity mismatch")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Poly {
        Poly::var(1, 0)
    }

    #[test]
    fn difference_of_squares() {
        let p = &(&x() + &Poly::one(1)) * &(&x() - &Poly::one(1));
        let expected = &x().pow(2) - &Poly::one(1);
        assert_eq!(p, expected);
    }

    #[test]
    fn unit() {
        let p = &x().pow(3) + &x();
        assert_eq!(&p * &Poly::one(1), p);
    }

    #[test]
    fn binomial_square() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let sq = (&x + &y).pow(2);
        let mut expected = x.pow(2);
        expected = &expected + &(&x * &y).scale(&rat(2));
        expected = &expected + &y.pow(2);
        assert_eq!(sq, expected);
    }

    #[test]
    fn partial_power_rule() {
        assert_eq!(x().pow(3).partial(0), x().pow(2).scale(&rat(3)));
        let p = Poly::var(2, 0).pow(3);
        assert!(p.partial(1).is_zero());
    }

    #[test]
    fn partial_term_by_term() {
        // d/dx (x^2 y + x y^2) = 2xy + y^2
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = &(&x.pow(2) * &y) + &(&x * &y.pow(2));
        let expected = &(&x * &y).scale(&rat(2)) + &y.pow(2);
        assert_eq!(p.partial(0), expected);
    }

    #[test]
    fn arity_mismatch_rejected() {
        assert!(Poly::var(1, 0).checked_mul(&Poly::var(2, 0)).is_err());
    }

    #[test]
    fn display_canonical() {
        let p = &(&x().pow(2) - &Poly::one(1)) + &x().scale(&ratio_half());
        assert_eq!(p.to_string(), "x^2 + 1/2*x - 1");
    }

    fn ratio_half() -> Rat {
        crate::rat::ratio(1, 2)
    }
}
