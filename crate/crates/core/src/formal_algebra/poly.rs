//! Dense univariate polynomials over `Rational`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::rational::{to_text, Coeff, Rational};
use crate::error::{Error, Result};

/// `c[0] + c[1] x + ... + c[n] x^n`, stored without trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    /// `c x^k`
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        Poly::new(v)
    }

    /// The linear polynomial `a + b x`.
    pub fn linear(a: Rational, b: Rational) -> Self {
        Poly::new(vec![a, b])
    }

    pub fn x() -> Self {
        Poly::monomial(Rational::one(), 1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, r: &Rational) -> Poly {
        if r.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// `p(-x)`
    pub fn reflect(&self) -> Poly {
        Poly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { -c } else { c.clone() })
                .collect(),
        }
    }

    /// Drops every term of degree above `max_degree`.
    pub fn truncate(&self, max_degree: usize) -> Poly {
        Poly::new(self.coeffs.iter().take(max_degree + 1).cloned().collect())
    }

    /// Multiplication by `x^k`.
    pub fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Rational::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Poly { coeffs: v }
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(l) => {
                let inv = l.recip();
                self.scale(&inv)
            }
        }
    }

    pub fn divrem(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        let dd = divisor
            .degree()
            .ok_or_else(|| Error::Domain("polynomial division by zero".into()))?;
        let lead_inv = divisor.coeffs[dd].recip();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                let t = &c * dc;
                rem[k + j] -= t;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    /// Exact quotient, or `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if divisor.coeffs.len() >= INTEGER_MUL_THRESHOLD {
            // Gauss: a primitive divisor over ℚ divides over ℤ
            let (ca, ia) = integer_content(self);
            let (cb, ib) = integer_content(divisor);
            let q = super::modgcd::exact_quotient(&ia, &ib)?;
            let c = ca / cb;
            return Some(Poly::new(q.into_iter().map(|v| Rational::from_integer(v) * &c).collect()));
        }
        match self.divrem(divisor) {
            Ok((q, r)) if r.is_zero() => Some(q),
            _ => None,
        }
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return if a.is_zero() { b.monic() } else { a.monic() };
        }
        if a.is_constant() || b.is_constant() {
            return Poly::one();
        }
        super::modgcd::gcd_modular(a, b).unwrap_or_else(|| Poly::gcd_euclid(a, b))
    }

    /// Euclid's algorithm over `ℚ`; the reference for `gcd`.
    pub fn gcd_euclid(a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.monic(), b.monic());
        while !b.is_zero() {
            // divisor is nonzero inside the loop
            let (_, r) = a.divrem(&b).expect("nonzero divisor");
            a = b;
            b = r.monic();
        }
        a
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(k.into()))
                .collect(),
        )
    }

    /// Product of the linear factors `(a_k + b_k x)`.
    pub fn product_of_linear<I>(factors: I) -> Poly
    where
        I: IntoIterator<Item = (Rational, Rational)>,
    {
        let mut layer: Vec<Poly> = factors.into_iter().map(|(a, b)| Poly::linear(a, b)).collect();
        if layer.is_empty() {
            return Poly::one();
        }
        // balanced pairing keeps both sides of each product of similar length
        while layer.len() > 1 {
            let mut next = Vec::with_capacity(layer.len().div_ceil(2));
            let mut it = layer.into_iter();
            while let Some(a) = it.next() {
                next.push(match it.next() {
                    Some(b) => a * &b,
                    None => a,
                });
            }
            layer = next;
        }
        layer.pop().expect("nonempty")
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", to_text(c))?,
                1 => write!(f, "({})x", to_text(c))?,
                _ => write!(f, "({})x^{k}", to_text(c))?,
            }
        }
        Ok(())
    }
}

impl Zero for Poly {
    fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for Poly {
    fn one() -> Self {
        Poly::constant(Rational::one())
    }
}

impl<'a> Add<&'a Poly> for Poly {
    type Output = Poly;

    fn add(self, rhs: &'a Poly) -> Poly {
        let (mut long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self.coeffs, &rhs.coeffs[..])
        } else {
            (rhs.coeffs.clone(), &self.coeffs[..])
        };
        for (a, b) in long.iter_mut().zip(short) {
            *a += b;
        }
        Poly::new(long)
    }
}

impl Add for Poly {
    type Output = Poly;

    fn add(self, rhs: Poly) -> Poly {
        self + &rhs
    }
}

impl<'a> Sub<&'a Poly> for Poly {
    type Output = Poly;

    fn sub(self, rhs: &'a Poly) -> Poly {
        self + &(-rhs.clone())
    }
}

impl Sub for Poly {
    type Output = Poly;

    fn sub(self, rhs: Poly) -> Poly {
        self - &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;

    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl<'a> Mul<&'a Poly> for Poly {
    type Output = Poly;

    fn mul(self, rhs: &'a Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        if self.coeffs.len().min(rhs.coeffs.len()) >= INTEGER_MUL_THRESHOLD {
            return mul_via_integers(&self, rhs);
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

/// Below this length on either side, multiply coefficientwise in `ℚ`.
const INTEGER_MUL_THRESHOLD: usize = 6;

/// `p = c · P` with `P` primitive over `ℤ`.
pub(super) fn integer_content(p: &Poly) -> (Rational, Vec<BigInt>) {
    let lcm = p.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.coeffs.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let ints = ints.into_iter().map(|c| c / &content).collect();
    (Rational::new(content, lcm), ints)
}

/// Product with one normalization per output coefficient.
fn mul_via_integers(a: &Poly, b: &Poly) -> Poly {
    let (ca, ia) = integer_content(a);
    let (cb, ib) = integer_content(b);
    let mut out = vec![BigInt::zero(); ia.len() + ib.len() - 1];
    for (i, x) in ia.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in ib.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    let c = ca * cb;
    Poly::new(out.into_iter().map(|v| Rational::from_integer(v) * &c).collect())
}

impl Mul for Poly {
    type Output = Poly;

    fn mul(self, rhs: Poly) -> Poly {
        self * &rhs
    }
}

impl Coeff for Poly {
    fn from_rational(r: &Rational) -> Self {
        Poly::constant(r.clone())
    }

    fn scale(&self, r: &Rational) -> Self {
        Poly::scale(self, r)
    }
}
