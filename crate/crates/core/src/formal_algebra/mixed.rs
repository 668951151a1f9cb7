//! Two- and three-graded truncated series.
//!
//! [`BiSeries`] is a series in `x` and `q` truncated at `x^{x_cap}` and
//! `q^{q_cap}`. It plays the role of `ℚ[t][[e^t]]` (with `x = t`) as well as
//! of the double-correlator ring `[[z, q]]` (with `x = z`).
//! [`MixedSeries`] adds a nilpotent `H` grading on top.

use num_traits::Zero;

use super::rational::{Coeff, Rational};
use super::series::TruncSeries;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Debug)]
pub struct BiSeries<R> {
    x_cap: usize,
    q_cap: usize,
    /// `rows[k][d]` is the coefficient of `x^k q^d`.
    rows: Vec<Vec<R>>,
}

impl<R: Coeff> BiSeries<R> {
    pub fn zero(x_cap: usize, q_cap: usize) -> Self {
        BiSeries {
            x_cap,
            q_cap,
            rows: vec![vec![R::zero(); q_cap + 1]; x_cap + 1],
        }
    }

    pub fn one(x_cap: usize, q_cap: usize) -> Self {
        let mut s = Self::zero(x_cap, q_cap);
        s.rows[0][0] = R::one();
        s
    }

    pub fn monomial(c: R, k: usize, d: usize, x_cap: usize, q_cap: usize) -> Self {
        let mut s = Self::zero(x_cap, q_cap);
        if k <= x_cap && d <= q_cap {
            s.rows[k][d] = c;
        }
        s
    }

    /// Embeds a `q`-series as the `x^0` row.
    pub fn from_q_series(s: &TruncSeries<R>, x_cap: usize) -> Self {
        let mut out = Self::zero(x_cap, s.order());
        out.rows[0] = s.coeffs().to_vec();
        out
    }

    pub fn x_cap(&self) -> usize {
        self.x_cap
    }

    pub fn q_cap(&self) -> usize {
        self.q_cap
    }

    pub fn coeff(&self, k: usize, d: usize) -> &R {
        &self.rows[k][d]
    }

    pub fn set(&mut self, k: usize, d: usize, c: R) {
        self.rows[k][d] = c;
    }

    /// Same series with a different `x` cap: rows are dropped or zero-padded.
    pub fn with_x_cap(&self, x_cap: usize) -> Self {
        let mut rows = self.rows.clone();
        rows.resize(x_cap + 1, vec![R::zero(); self.q_cap + 1]);
        BiSeries {
            x_cap,
            q_cap: self.q_cap,
            rows,
        }
    }

    /// The coefficient of `x^k` as a `q`-series.
    pub fn x_row(&self, k: usize) -> TruncSeries<R> {
        TruncSeries::new(self.rows[k].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(Zero::is_zero)
    }

    /// All `(k, d, coefficient)` triples in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &R)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(k, row)| row.iter().enumerate().map(move |(d, c)| (k, d, c)))
    }

    /// First coefficient (in `(q, x)` order) where `self` and `other` differ.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize)> {
        for d in 0..=self.q_cap.min(other.q_cap) {
            for k in 0..=self.x_cap.min(other.x_cap) {
                if self.rows[k][d] != other.rows[k][d] {
                    return Some((k, d));
                }
            }
        }
        None
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.x_cap != other.x_cap {
            return Err(Error::OrderMismatch {
                left: self.x_cap,
                right: other.x_cap,
            });
        }
        if self.q_cap != other.q_cap {
            return Err(Error::OrderMismatch {
                left: self.q_cap,
                right: other.q_cap,
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&R, &R) -> R) -> Result<Self> {
        self.check(other)?;
        Ok(BiSeries {
            x_cap: self.x_cap,
            q_cap: self.q_cap,
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| f(x, y)).collect())
                .collect(),
        })
    }

    pub fn map(&self, f: impl Fn(&R) -> R) -> Self {
        BiSeries {
            x_cap: self.x_cap,
            q_cap: self.q_cap,
            rows: self
                .rows
                .iter()
                .map(|row| row.iter().map(&f).collect())
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() - b)
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

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.x_cap, self.q_cap);
        for (k1, row1) in self.rows.iter().enumerate() {
            for (d1, a) in row1.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for k2 in 0..=self.x_cap - k1 {
                    for d2 in 0..=self.q_cap - d1 {
                        let b = &other.rows[k2][d2];
                        if b.is_zero() {
                            continue;
                        }
                        let slot = &mut out.rows[k1 + k2][d1 + d2];
                        *slot = std::mem::replace(slot, R::zero()) + &(a.clone() * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_q_series(&self, s: &TruncSeries<R>) -> Result<Self> {
        self.mul(&Self::from_q_series(s, self.x_cap))
    }

    /// Multiplication by `q^k`.
    pub fn shift_q(&self, k: usize) -> Self {
        let mut out = Self::zero(self.x_cap, self.q_cap);
        for (x, row) in self.rows.iter().enumerate() {
            for d in 0..=self.q_cap {
                if d + k <= self.q_cap {
                    out.rows[x][d + k] = row[d].clone();
                }
            }
        }
        out
    }

    /// `d/dt` with `x = t` and `q = e^t`: `d/dt (t^k q^d) = k t^{k-1} q^d + d t^k q^d`.
    pub fn d_dt(&self) -> Self {
        let mut out = Self::zero(self.x_cap, self.q_cap);
        for (k, row) in self.rows.iter().enumerate() {
            for (d, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                if d > 0 {
                    let slot = &mut out.rows[k][d];
                    *slot = std::mem::replace(slot, R::zero())
                        + &c.scale(&Rational::from_integer(d.into()));
                }
                if k > 0 {
                    let slot = &mut out.rows[k - 1][d];
                    *slot = std::mem::replace(slot, R::zero())
                        + &c.scale(&Rational::from_integer(k.into()));
                }
            }
        }
        out
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::one(self.x_cap, self.q_cap);
        for _ in 0..k {
            acc = acc.mul(self).expect("same caps");
        }
        acc
    }

    /// `exp` of a series with zero constant term; the sum is finite because
    /// `a^k` has total degree at least `k`.
    pub fn exp(&self) -> Result<Self> {
        if !self.rows[0][0].is_zero() {
            return Err(Error::Domain("exp requires zero constant term".into()));
        }
        let mut acc = Self::one(self.x_cap, self.q_cap);
        let mut term = Self::one(self.x_cap, self.q_cap);
        for k in 1..=(self.x_cap + self.q_cap) {
            term = term.mul(self)?.scale(&Rational::new(1.into(), k.into()));
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// `self(X(x, q), Q(x, q))`. Every term of `x_sub` must carry `x`, and
    /// every term of `q_sub` must carry `q`, so truncation commutes with
    /// substitution.
    pub fn compose(&self, x_sub: &Self, q_sub: &Self) -> Result<Self> {
        self.check(x_sub)?;
        self.check(q_sub)?;
        if x_sub.rows[0].iter().any(|c| !c.is_zero()) {
            return Err(Error::Domain("x-substitute must be divisible by x".into()));
        }
        if q_sub.rows.iter().any(|row| !row[0].is_zero()) {
            return Err(Error::Domain("q-substitute must be divisible by q".into()));
        }
        let x_pows: Vec<Self> = (0..=self.x_cap).map(|k| x_sub.pow(k)).collect();
        let mut out = Self::zero(self.x_cap, self.q_cap);
        let mut q_pow = Self::one(self.x_cap, self.q_cap);
        for d in 0..=self.q_cap {
            let mut inner = Self::zero(self.x_cap, self.q_cap);
            for (k, xp) in x_pows.iter().enumerate() {
                let c = &self.rows[k][d];
                if !c.is_zero() {
                    inner = inner.add(&xp.mul_coeff(c))?;
                }
            }
            out = out.add(&inner.mul(&q_pow)?)?;
            q_pow = q_pow.mul(q_sub)?;
        }
        Ok(out)
    }

    /// `self(x + shift(q), q_sub(q))` where `self` is polynomial in `x`
    /// (so the shift may carry a constant term and nothing is lost).
    pub fn substitute_shift(&self, shift: &TruncSeries<R>, q_sub: &TruncSeries<R>) -> Result<Self> {
        if shift.order() != self.q_cap || q_sub.order() != self.q_cap {
            return Err(Error::OrderMismatch {
                left: self.q_cap,
                right: shift.order().max(q_sub.order()),
            });
        }
        if !q_sub.coeff(0).is_zero() {
            return Err(Error::Domain("q-substitute must be divisible by q".into()));
        }
        let mut x_plus = Self::from_q_series(shift, self.x_cap);
        if self.x_cap > 0 {
            x_plus.rows[1][0] = x_plus.rows[1][0].clone() + &R::one();
        }
        let x_pows: Vec<Self> = (0..=self.x_cap).map(|k| x_plus.pow(k)).collect();
        let q_pows: Vec<TruncSeries<R>> = (0..=self.q_cap).map(|d| q_sub.pow(d)).collect();
        let mut out = Self::zero(self.x_cap, self.q_cap);
        for (k, row) in self.rows.iter().enumerate() {
            let mut qpart = TruncSeries::zero(self.q_cap);
            for (d, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    qpart = qpart.add(&q_pows[d].mul_coeff(c))?;
                }
            }
            if !qpart.is_zero() {
                out = out.add(&x_pows[k].mul_q_series(&qpart)?)?;
            }
        }
        Ok(out)
    }
}

/// Series in `H^i t^k q^d`, `0 ≤ i ≤ h_cap`, `0 ≤ k ≤ t_cap`, `0 ≤ d ≤ q_cap`,
/// with `H^{h_cap+1} = 0`.
#[derive(Clone, PartialEq, Debug)]
pub struct MixedSeries<R> {
    parts: Vec<BiSeries<R>>,
}

impl<R: Coeff> MixedSeries<R> {
    pub fn zero(h_cap: usize, t_cap: usize, q_cap: usize) -> Self {
        MixedSeries {
            parts: vec![BiSeries::zero(t_cap, q_cap); h_cap + 1],
        }
    }

    pub fn from_parts(parts: Vec<BiSeries<R>>) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Structural("mixed series needs at least one H-part".into()))?;
        if parts.iter().any(|p| p.check(first).is_err()) {
            return Err(Error::Structural("H-parts with different caps".into()));
        }
        Ok(MixedSeries { parts })
    }

    /// `H^0 t^0` embedding of a `q`-series.
    pub fn from_q_series(s: &TruncSeries<R>, h_cap: usize, t_cap: usize) -> Self {
        let mut out = Self::zero(h_cap, t_cap, s.order());
        out.parts[0] = BiSeries::from_q_series(s, t_cap);
        out
    }

    /// `(h_cap, t_cap, q_cap)`
    pub fn caps(&self) -> (usize, usize, usize) {
        (self.parts.len() - 1, self.parts[0].x_cap, self.parts[0].q_cap)
    }

    pub fn component(&self, i: usize) -> &BiSeries<R> {
        &self.parts[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut BiSeries<R> {
        &mut self.parts[i]
    }

    pub fn parts(&self) -> &[BiSeries<R>] {
        &self.parts
    }

    pub fn coeff(&self, i: usize, k: usize, d: usize) -> &R {
        self.parts[i].coeff(k, d)
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(BiSeries::is_zero)
    }

    /// First `(i, k, d)` in `(d, i, k)` order where the two series differ.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize, usize)> {
        let (h, t, q) = self.caps();
        for d in 0..=q {
            for i in 0..=h {
                for k in 0..=t {
                    if self.coeff(i, k, d) != other.coeff(i, k, d) {
                        return Some((i, k, d));
                    }
                }
            }
        }
        None
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.caps() != other.caps() {
            return Err(Error::Structural(format!(
                "mixed series caps differ: {:?} vs {:?}",
                self.caps(),
                other.caps()
            )));
        }
        Ok(())
    }

    fn map_parts(&self, f: impl Fn(&BiSeries<R>) -> Result<BiSeries<R>>) -> Result<Self> {
        Ok(MixedSeries {
            parts: self.parts.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(MixedSeries {
            parts: self
                .parts
                .iter()
                .zip(&other.parts)
                .map(|(a, b)| a.add(b))
                .collect::<Result<_>>()?,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&Rational::from_integer((-1).into()))
    }

    pub fn scale(&self, r: &Rational) -> Self {
        MixedSeries {
            parts: self.parts.iter().map(|p| p.scale(r)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let (h, t, q) = self.caps();
        let mut out = Self::zero(h, t, q);
        for (i, a) in self.parts.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.parts[..=h - i].iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out.parts[i + j] = out.parts[i + j].add(&a.mul(b)?)?;
            }
        }
        Ok(out)
    }

    pub fn mul_q_series(&self, s: &TruncSeries<R>) -> Result<Self> {
        self.map_parts(|p| p.mul_q_series(s))
    }

    /// Multiplication by `e^t = q`.
    pub fn shift_q(&self, k: usize) -> Self {
        MixedSeries {
            parts: self.parts.iter().map(|p| p.shift_q(k)).collect(),
        }
    }

    pub fn d_dt(&self) -> Self {
        MixedSeries {
            parts: self.parts.iter().map(BiSeries::d_dt).collect(),
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(&R) -> R) -> Self {
        MixedSeries {
            parts: self.parts.iter().map(|p| p.map(&f)).collect(),
        }
    }
}

/// Change of variables `t = T - g(q)`, `q = q'·h(q')` where `h` reverts
/// `q ↦ q·exp(g(q))`. The result is a series in `(H, T, q' = e^T)`, exact
/// through the caps of `m`.
pub fn mixed_substitute(
    m: &MixedSeries<Rational>,
    g: &TruncSeries<Rational>,
) -> Result<MixedSeries<Rational>> {
    if !g.coeff(0).is_zero() {
        return Err(Error::Domain("mirror shift g must satisfy g(0) = 0".into()));
    }
    let (_, _, q_cap) = m.caps();
    if g.order() != q_cap {
        return Err(Error::OrderMismatch {
            left: q_cap,
            right: g.order(),
        });
    }
    let h = g.exp()?.reversion()?;
    let q_sub = h.shift(1);
    let shift = g.compose(&q_sub)?.neg();
    Ok(MixedSeries {
        parts: m
            .parts
            .iter()
            .map(|p| p.substitute_shift(&shift, &q_sub))
            .collect::<Result<_>>()?,
    })
}
