//! Polynomials in a nilpotent class `H`, i.e. elements of `R[H]/(H^{N+1})`.

use num_traits::Zero;

use super::rational::{Coeff, Rational};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Debug)]
pub struct HTruncPoly<R> {
    coeffs: Vec<R>,
}

impl<R: Coeff> HTruncPoly<R> {
    /// `coeffs[i]` is the coefficient of `H^i`; `H^{coeffs.len()} = 0`.
    pub fn new(coeffs: Vec<R>) -> Self {
        assert!(!coeffs.is_empty(), "nilpotency order must be at least 1");
        HTruncPoly { coeffs }
    }

    pub fn zero(nilpotency: usize) -> Self {
        HTruncPoly::new(vec![R::zero(); nilpotency])
    }

    pub fn constant(c: R, nilpotency: usize) -> Self {
        let mut p = Self::zero(nilpotency);
        p.coeffs[0] = c;
        p
    }

    /// The class `H` itself (zero when the nilpotency order is 1).
    pub fn h(nilpotency: usize) -> Self {
        let mut p = Self::zero(nilpotency);
        if nilpotency > 1 {
            p.coeffs[1] = R::one();
        }
        p
    }

    /// `N + 1` such that `H^{N+1} = 0`.
    pub fn nilpotency_order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &R {
        &self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.coeffs.len() != other.coeffs.len() {
            return Err(Error::OrderMismatch {
                left: self.coeffs.len(),
                right: other.coeffs.len(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(HTruncPoly {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() + b)
                .collect(),
        })
    }

    pub fn scale(&self, r: &Rational) -> Self {
        HTruncPoly {
            coeffs: self.coeffs.iter().map(|c| c.scale(r)).collect(),
        }
    }

    /// Product with all `H`-degrees above `N` discarded.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.coeffs.len();
        let mut out = vec![R::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..n - i].iter().enumerate() {
                out[i + j] = std::mem::replace(&mut out[i + j], R::zero()) + &(a.clone() * b);
            }
        }
        Ok(HTruncPoly { coeffs: out })
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::constant(R::one(), self.coeffs.len());
        for _ in 0..k {
            acc = acc.mul(self).expect("same nilpotency");
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formal_algebra::rational::int;

    #[test]
    fn h_is_nilpotent_exactly() {
        for n in 1..6 {
            let h = HTruncPoly::<Rational>::h(n);
            assert!(h.pow(n).is_zero());
            if n > 1 {
                assert!(!h.pow(n - 1).is_zero());
            }
        }
    }

    #[test]
    fn truncated_product() {
        // (1 + H)^3 mod H^2 = 1 + 3H
        let p = HTruncPoly::new(vec![int(1), int(1)]);
        assert_eq!(p.pow(3), HTruncPoly::new(vec![int(1), int(3)]));
    }
}
