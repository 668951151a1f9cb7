//! Exact rational scalars and the coefficient-ring abstraction shared by all
//! series types.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Canonical text form: `p/q` with `q > 0`, or `p` when `q = 1`.
pub fn to_text(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |x: &str| {
        x.trim()
            .parse::<BigInt>()
            .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(s)?)),
        Some((p, q)) => {
            let q = parse_int(q)?;
            if q.is_zero() {
                return Err(Error::Parse(format!("{s:?}: zero denominator")));
            }
            Ok(Rational::new(parse_int(p)?, q))
        }
    }
}

/// Coefficient ring of a truncated series. Implemented for [`Rational`],
/// [`crate::formal_algebra::Poly`] and [`crate::formal_algebra::HbarRational`].
pub trait Coeff:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    fn from_rational(r: &Rational) -> Self;

    fn scale(&self, r: &Rational) -> Self {
        self.clone() * &Self::from_rational(r)
    }
}

/// Coefficient rings where nonzero elements are invertible.
pub trait FieldCoeff: Coeff {
    fn try_inv(&self) -> Result<Self>;
}

impl Coeff for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn scale(&self, r: &Rational) -> Self {
        self * r
    }
}

impl FieldCoeff for Rational {
    fn try_inv(&self) -> Result<Self> {
        if self.is_zero() {
            Err(Error::Domain("inverse of zero".into()))
        } else {
            Ok(self.recip())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_form() {
        assert_eq!(to_text(&rat(4876875, 8)), "4876875/8");
        assert_eq!(to_text(&int(2875)), "2875");
        assert_eq!(to_text(&rat(-6, 4)), "-3/2");
        assert_eq!(to_text(&rat(3, -6)), "-1/2");
    }

    #[test]
    fn parse_round_trip() {
        for s in ["0", "-7", "22/7", "-1/3", "4876875/8"] {
            assert_eq!(to_text(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn lowest_terms() {
        let a = rat(1, 6) + rat(1, 3);
        assert_eq!(a, rat(1, 2));
        assert_eq!(a.denom(), &BigInt::from(2));
    }
}
