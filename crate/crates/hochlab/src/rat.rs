//! Exact rational scalars.
//!
//! Every coefficient in the crate is a `Rat` (arbitrary-precision rational in
//! lowest terms with positive denominator). `num_rational::BigRational`
//! already maintains exactly that canonical form, so we use it directly and
//! only add the small constructors and the `p/q` formatting the reports need.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};

pub type Rat = BigRational;

/// Integer as a rational.
pub fn rat(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// `n/d` in lowest terms. Panics on `d = 0`.
pub fn ratio(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_zero(r: &Rat) -> bool {
    r.is_zero()
}

/// Canonical text form: `p` for integers, `p/q` otherwise, `q > 0`.
pub fn display(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Binomial coefficient as a rational (exponents are small in practice).
pub fn binomial(n: u16, k: u16) -> Rat {
    if k > n {
        return Rat::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    BigRational::new(num, den)
}

/// Sign as a rational unit, for Koszul bookkeeping.
pub fn sign(parity: u32) -> Rat {
    if parity % 2 == 0 {
        rat(1)
    } else {
        rat(-1)
    }
}

pub fn abs(r: &Rat) -> Rat {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        let r = ratio(4, -6);
        assert_eq!(display(&r), "-2/3");
        assert_eq!(ratio(3, 1), rat(3));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), rat(6));
        assert_eq!(binomial(3, 0), rat(1));
        assert_eq!(binomial(2, 5), rat(0));
    }
}
