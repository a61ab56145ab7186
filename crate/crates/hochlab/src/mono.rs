//! Exponent vectors with graded-lexicographic order.
//!
//! A `Mono` is the exponent vector of a monomial `x1^e1 * ... * xN^eN`. The
//! same type doubles as a pure-derivation multi-index (for `d1^e1 * ...`).
//! `Ord` is graded lex: first by total degree, then lexicographically with
//! `x1 > x2 > ...`; this order drives every canonical term iteration in the
//! crate.

use crate::rat::{binomial, Rat};
use num::traits::One;
use std::cmp::Ordering;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mono(pub Vec<u16>);

impl Mono {
    pub fn zero(nvars: usize) -> Self {
        Mono(vec![0; nvars])
    }

    /// The single variable `x_i` (0-based index).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Mono(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        debug_assert_eq!(self.0.len(), other.0.len());
        Mono(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise difference; `None` if any component would go negative.
    pub fn checked_sub(&self, other: &Mono) -> Option<Mono> {
        let mut e = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            e.push(a - b);
        }
        Some(Mono(e))
    }

    pub fn le(&self, other: &Mono) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Product of componentwise binomials `prod_i C(self_i, k_i)`.
    pub fn binom(&self, k: &Mono) -> Rat {
        let mut c = Rat::one();
        for (a, b) in self.0.iter().zip(&k.0) {
            c *= binomial(*a, *b);
        }
        c
    }

    /// All multi-indices `c` with `c <= self` componentwise, ascending.
    pub fn sub_indices(&self) -> Vec<Mono> {
        let mut out = vec![Mono::zero(self.0.len())];
        for (i, &e) in self.0.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
            for m in &out {
                for k in 0..=e {
                    let mut v = m.0.clone();
                    v[i] = k;
                    next.push(Mono(v));
                }
            }
            out = next;
        }
        out
    }

    /// All multi-indices over `nvars` variables of total degree exactly `d`.
    pub fn of_degree(nvars: usize, d: u32) -> Vec<Mono> {
        fn rec(nvars: usize, d: u32, i: usize, cur: &mut Vec<u16>, out: &mut Vec<Mono>) {
            if i + 1 == nvars {
                cur.push(d as u16);
                out.push(Mono(cur.clone()));
                cur.pop();
                return;
            }
            for e in 0..=d {
                cur.push(e as u16);
                rec(nvars, d - e, i + 1, cur, out);
                cur.pop();
            }
        }
        if nvars == 0 {
            return if d == 0 { vec![Mono(vec![])] } else { vec![] };
        }
        let mut out = Vec::new();
        rec(nvars, d, 0, &mut Vec::new(), &mut out);
        out
    }

    /// All multi-indices of total degree at most `d`.
    pub fn up_to_degree(nvars: usize, d: u32) -> Vec<Mono> {
        (0..=d).flat_map(|k| Mono::of_degree(nvars, k)).collect()
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex() {
        // x^2 > xy > y^2 > x > y > 1 for n=2 (x = x1 dominates).
        let x2 = Mono(vec![2, 0]);
        let xy = Mono(vec![1, 1]);
        let y2 = Mono(vec![0, 2]);
        let x = Mono(vec![1, 0]);
        assert!(x2 > xy && xy > y2 && y2 > x);
    }

    #[test]
    fn sub_indices_count() {
        let m = Mono(vec![2, 1]);
        assert_eq!(m.sub_indices().len(), 6);
    }

    #[test]
    fn degree_enumeration() {
        assert_eq!(Mono::of_degree(2, 3).len(), 4);
        assert_eq!(Mono::up_to_degree(3, 2).len(), 10);
    }
}
