//! Dense truncated power series `c_0 + c_1 q + … + c_D q^D` over a
//! coefficient ring.
//!
//! Binary operations require equal truncation orders; callers down-truncate
//! explicitly with [`TruncSeries::truncate`].

use num_traits::Zero;

use super::rational::{Coeff, FieldCoeff, Rational};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Debug)]
pub struct TruncSeries<R> {
    coeffs: Vec<R>,
}

impl<R: Coeff> TruncSeries<R> {
    /// Builds a series of order `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<R>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series needs at least c_0");
        TruncSeries { coeffs }
    }

    /// Pads or cuts `coeffs` to exactly `order + 1` entries.
    pub fn from_coeffs(mut coeffs: Vec<R>, order: usize) -> Self {
        coeffs.resize(order + 1, R::zero());
        TruncSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        TruncSeries {
            coeffs: vec![R::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(R::one(), order)
    }

    pub fn constant(c: R, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// `c q^k`, or zero if `k` exceeds the order.
    pub fn monomial(c: R, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [R] {
        &mut self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &R {
        &self.coeffs[k]
    }

    pub fn into_coeffs(self) -> Vec<R> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Explicit down-truncation to `order`.
    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order > self.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: order,
            });
        }
        Ok(TruncSeries {
            coeffs: self.coeffs[..=order].to_vec(),
        })
    }

    pub fn map<S: Coeff>(&self, f: impl Fn(&R) -> S) -> TruncSeries<S> {
        TruncSeries {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(TruncSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(TruncSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() - b)
                .collect(),
        })
    }

    pub fn neg(&self) -> Self {
        self.map(|c| -c.clone())
    }

    pub fn scale(&self, r: &Rational) -> Self {
        self.map(|c| c.scale(r))
    }

    pub fn mul_coeff(&self, c: &R) -> Self {
        self.map(|a| a.clone() * c)
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let n = self.order();
        let mut out = vec![R::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = std::mem::replace(&mut out[i + j], R::zero()) + &(a.clone() * b);
            }
        }
        Ok(TruncSeries { coeffs: out })
    }

    /// Multiplication by `q^k`; terms pushed past the order are dropped.
    pub fn shift(&self, k: usize) -> Self {
        let n = self.order();
        let mut out = vec![R::zero(); n + 1];
        for i in 0..=n {
            if i + k <= n {
                out[i + k] = self.coeffs[i].clone();
            }
        }
        TruncSeries { coeffs: out }
    }

    /// `q d/dq`
    pub fn q_derivative(&self) -> Self {
        TruncSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c.scale(&Rational::from_integer(k.into())))
                .collect(),
        }
    }

    /// `self^k` truncated.
    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::one(self.order());
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same order");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same order");
            }
        }
        acc
    }

    fn require_zero_constant(&self, what: &str) -> Result<()> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::Domain(format!("{what} requires zero constant term")));
        }
        Ok(())
    }

    /// `Σ a^k / k!` for a series without constant term.
    pub fn exp(&self) -> Result<Self> {
        self.require_zero_constant("exp")?;
        let n = self.order();
        // E' = a' E, solved coefficientwise: k e_k = Σ_{j=1}^{k} j a_j e_{k-j}
        let mut e = vec![R::zero(); n + 1];
        e[0] = R::one();
        for k in 1..=n {
            let mut acc = R::zero();
            for j in 1..=k {
                if self.coeffs[j].is_zero() {
                    continue;
                }
                let term = self.coeffs[j].scale(&Rational::from_integer(j.into())) * &e[k - j];
                acc = acc + &term;
            }
            e[k] = acc.scale(&Rational::new(1.into(), k.into()));
        }
        Ok(TruncSeries { coeffs: e })
    }

    /// Logarithm of a series with constant term 1; inverse of [`Self::exp`].
    pub fn log(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::Domain("log requires constant term 1".into()));
        }
        let n = self.order();
        // f L' = f', solved for l_k with l_0 = 0.
        let mut l = vec![R::zero(); n + 1];
        for k in 1..=n {
            let mut acc = self.coeffs[k].scale(&Rational::from_integer(k.into()));
            for j in 1..k {
                if l[j].is_zero() {
                    continue;
                }
                let term = l[j].scale(&Rational::from_integer(j.into())) * &self.coeffs[k - j];
                acc = acc - term;
            }
            l[k] = acc.scale(&Rational::new(1.into(), k.into()));
        }
        Ok(TruncSeries { coeffs: l })
    }

    /// `self(inner(q))` for `inner` without constant term (Horner).
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        self.check_order(inner)?;
        inner.require_zero_constant("composition")?;
        let n = self.order();
        let mut acc = Self::zero(n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner)?;
            acc.coeffs[0] = acc.coeffs[0].clone() + c;
        }
        Ok(acc)
    }

    /// Compositional inverse of `q ↦ q·v(q)` with `v(0) = 1`: returns `w`
    /// with `w(0) = 1` such that `q ↦ q·w(q)` inverts it through the order.
    ///
    /// Solved order by order: the `q^k` coefficient of `w(q)·v(q w(q))` is
    /// `w_k` plus terms in `w_0..w_{k-1}`, and must vanish for `k ≥ 1`.
    pub fn reversion(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::Domain("reversion requires v(0) = 1".into()));
        }
        let n = self.order();
        let mut w = Self::one(n);
        for k in 1..=n {
            let residual = Self::reversion_defect(self, &w)?;
            w.coeffs[k] = -residual.coeffs[k].clone();
        }
        Ok(w)
    }

    /// `w(q)·v(q w(q)) - 1`, zero through the order when `w` reverts `v`.
    pub fn reversion_defect(v: &Self, w: &Self) -> Result<Self> {
        let inner = w.shift(1);
        let composed = v.compose(&inner)?;
        let mut prod = w.mul(&composed)?;
        prod.coeffs[0] = prod.coeffs[0].clone() - R::one();
        Ok(prod)
    }
}

impl<R: FieldCoeff> TruncSeries<R> {
    /// Multiplicative inverse; the constant term must be invertible.
    pub fn inv(&self) -> Result<Self> {
        let c0 = self.coeffs[0]
            .try_inv()
            .map_err(|_| Error::Domain("series constant term is not invertible".into()))?;
        let n = self.order();
        let mut out = vec![R::zero(); n + 1];
        out[0] = c0.clone();
        for k in 1..=n {
            let mut acc = R::zero();
            for j in 1..=k {
                if self.coeffs[j].is_zero() {
                    continue;
                }
                acc = acc + &(self.coeffs[j].clone() * &out[k - j]);
            }
            out[k] = -(acc * &c0);
        }
        Ok(TruncSeries { coeffs: out })
    }

    /// `c` with `other · c = self` through the order.
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        self.mul(&other.inv()?)
    }
}
