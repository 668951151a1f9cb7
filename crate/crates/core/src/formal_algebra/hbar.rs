//! Rational functions of `ħ` with rational coefficients, kept in canonical
//! form: `num / den` with `gcd(num, den) = 1` and `den` monic.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::poly::Poly;
use super::rational::{Coeff, FieldCoeff, Rational};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HbarRational {
    num: Poly,
    den: Poly,
}

/// Which arithmetic the generic `hbar_rat_ops` entry point performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HbarOp {
    Add,
    Mul,
    Div,
}

impl HbarRational {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Domain("rational function with zero denominator".into()));
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return HbarRational::zero();
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = Poly::gcd(&num, &den);
            if g.is_constant() {
                (num, den)
            } else {
                (
                    num.div_exact(&g).expect("gcd divides"),
                    den.div_exact(&g).expect("gcd divides"),
                )
            }
        };
        let lead = den.leading().expect("nonzero denominator").recip();
        HbarRational {
            num: num.scale(&lead),
            den: den.scale(&lead),
        }
    }

    /// `Π (a + bħ) / Π (a' + b'ħ)` from its linear factors, cancelling equal
    /// roots directly so no polynomial gcd is needed.
    pub fn from_linear_factors(
        num: &[(Rational, Rational)],
        den: &[(Rational, Rational)],
    ) -> Result<Self> {
        let mut scalar = Rational::one();
        let mut num_roots = Vec::new();
        for (a, b) in num {
            if b.is_zero() {
                scalar *= a;
            } else {
                scalar *= b;
                num_roots.push(-(a / b));
            }
        }
        if scalar.is_zero() {
            return Ok(HbarRational::zero());
        }
        let mut den_roots = Vec::new();
        for (a, b) in den {
            if b.is_zero() {
                if a.is_zero() {
                    return Err(Error::Domain("zero factor in denominator".into()));
                }
                scalar /= a;
            } else {
                scalar /= b;
                let root = -(a / b);
                match num_roots.iter().position(|r| *r == root) {
                    Some(k) => {
                        num_roots.swap_remove(k);
                    }
                    None => den_roots.push(root),
                }
            }
        }
        let monic = |roots: &[Rational]| {
            Poly::product_of_linear(roots.iter().map(|r| (-r.clone(), Rational::one())))
        };
        Ok(HbarRational {
            num: monic(&num_roots).scale(&scalar),
            den: monic(&den_roots),
        })
    }

    pub fn from_poly(p: Poly) -> Self {
        HbarRational {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    /// The variable `ħ` itself.
    pub fn hbar() -> Self {
        Self::from_poly(Poly::x())
    }

    /// `ħ^{-k}`
    pub fn hbar_inv_pow(k: usize) -> Self {
        HbarRational {
            num: Poly::one(),
            den: Poly::monomial(Rational::one(), k),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn as_polynomial(&self) -> Option<&Poly> {
        self.is_polynomial().then_some(&self.num)
    }

    pub fn eval(&self, at: &Rational) -> Result<Rational> {
        let d = self.den.eval(at);
        if d.is_zero() {
            return Err(Error::Pole(at.clone()));
        }
        Ok(self.num.eval(at) / d)
    }

    pub fn is_regular_at(&self, at: &Rational) -> bool {
        !self.den.eval(at).is_zero()
    }

    /// `f(-ħ)`
    pub fn reflect(&self) -> Self {
        // reflection preserves coprimality; only the sign of den may change
        let (num, den) = (self.num.reflect(), self.den.reflect());
        let lead = den.leading().expect("nonzero denominator").recip();
        HbarRational {
            num: num.scale(&lead),
            den: den.scale(&lead),
        }
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.clone() * &rhs.try_inv()?)
    }

    pub fn apply(&self, op: HbarOp, rhs: &Self) -> Result<Self> {
        match op {
            HbarOp::Add => Ok(self.clone() + rhs),
            HbarOp::Mul => Ok(self.clone() * rhs),
            HbarOp::Div => self.checked_div(rhs),
        }
    }

    /// Coefficients of `ħ^0, ħ^{-1}, …, ħ^{-k}` of the expansion at `ħ = ∞`.
    pub fn laurent_expand(&self, k: usize) -> Result<Vec<Rational>> {
        if self.num.is_zero() {
            return Ok(vec![Rational::zero(); k + 1]);
        }
        let a = self.num.degree().expect("nonzero");
        let n = self.den.degree().expect("nonzero");
        if a > n {
            return Err(Error::Structural(format!(
                "positive hbar power {} in Laurent expansion at infinity",
                a - n
            )));
        }
        // With x = 1/ħ: num/den = x^{n-a} · rn(x) / rd(x), rd(0) = 1.
        let rn: Vec<Rational> = (0..=a).map(|j| self.num.coeff(a - j)).collect();
        let rd: Vec<Rational> = (0..=n).map(|j| self.den.coeff(n - j)).collect();
        let offset = n - a;
        let mut quotient: Vec<Rational> = Vec::with_capacity(k + 1);
        for j in 0..=k {
            if j < offset {
                quotient.push(Rational::zero());
                continue;
            }
            let idx = j - offset;
            let mut c = rn.get(idx).cloned().unwrap_or_else(Rational::zero);
            for s in 1..=idx.min(n) {
                let prev = &quotient[j - s];
                if !prev.is_zero() {
                    c -= &rd[s] * prev;
                }
            }
            quotient.push(c);
        }
        Ok(quotient)
    }

    /// Degree bound used for polynomial-identity testing against `other`:
    /// the difference `f - g` has numerator degree at most this.
    pub fn identity_test_degree(&self, other: &Self) -> usize {
        let d = |p: &Poly| p.degree().unwrap_or(0);
        (d(&self.num) + d(&other.den)).max(d(&other.num) + d(&self.den))
    }
}

/// Exact identity test by evaluation: agreement at more points than the
/// numerator degree of the difference forces equality. Points where either
/// side has a pole are skipped.
pub fn agree_by_evaluation(f: &HbarRational, g: &HbarRational) -> bool {
    let needed = f.identity_test_degree(g) + 1;
    let mut found = 0;
    let mut x = 0i64;
    while found < needed {
        let at = Rational::from_integer(x.into());
        x += 1;
        let (Ok(a), Ok(b)) = (f.eval(&at), g.eval(&at)) else {
            continue;
        };
        if a != b {
            return false;
        }
        found += 1;
    }
    true
}

impl fmt::Debug for HbarRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for HbarRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num.to_string().replace('x', "h"))
        } else {
            write!(
                f,
                "({}) / ({})",
                self.num.to_string().replace('x', "h"),
                self.den.to_string().replace('x', "h")
            )
        }
    }
}

impl Zero for HbarRational {
    fn zero() -> Self {
        HbarRational {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for HbarRational {
    fn one() -> Self {
        Self::from_poly(Poly::one())
    }
}

impl<'a> Add<&'a HbarRational> for HbarRational {
    type Output = HbarRational;

    fn add(self, rhs: &'a HbarRational) -> HbarRational {
        if rhs.is_zero() {
            return self;
        }
        if self.is_zero() {
            return rhs.clone();
        }
        if self.den == rhs.den {
            return Self::normalized(self.num + &rhs.num, self.den);
        }
        if self.is_polynomial() && rhs.is_polynomial() {
            // both denominators are 1 after normalization
            return Self::from_poly(self.num + &rhs.num);
        }
        // Henrici: with both inputs reduced, any common factor of the new
        // numerator and denominator divides g = gcd(den1, den2).
        let g = Poly::gcd(&self.den, &rhs.den);
        let a_co = self.den.div_exact(&g).expect("gcd divides");
        let b_co = rhs.den.div_exact(&g).expect("gcd divides");
        let mut num = self.num * &b_co + &(rhs.num.clone() * &a_co);
        let mut den = a_co * &rhs.den;
        if num.is_zero() {
            return HbarRational::zero();
        }
        if !g.is_constant() {
            let h = Poly::gcd(&num, &g);
            if !h.is_constant() {
                num = num.div_exact(&h).expect("gcd divides");
                den = den.div_exact(&h).expect("gcd divides");
            }
        }
        let lead = den.leading().expect("nonzero").recip();
        HbarRational {
            num: num.scale(&lead),
            den: den.scale(&lead),
        }
    }
}

impl Add for HbarRational {
    type Output = HbarRational;

    fn add(self, rhs: HbarRational) -> HbarRational {
        self + &rhs
    }
}

impl<'a> Sub<&'a HbarRational> for HbarRational {
    type Output = HbarRational;

    fn sub(self, rhs: &'a HbarRational) -> HbarRational {
        self + &(-rhs.clone())
    }
}

impl Sub for HbarRational {
    type Output = HbarRational;

    fn sub(self, rhs: HbarRational) -> HbarRational {
        self - &rhs
    }
}

impl Neg for HbarRational {
    type Output = HbarRational;

    fn neg(self) -> HbarRational {
        HbarRational {
            num: -self.num,
            den: self.den,
        }
    }
}

impl<'a> Mul<&'a HbarRational> for HbarRational {
    type Output = HbarRational;

    fn mul(self, rhs: &'a HbarRational) -> HbarRational {
        if self.is_zero() || rhs.is_zero() {
            return HbarRational::zero();
        }
        if self.is_polynomial() && rhs.is_polynomial() {
            return Self::from_poly(self.num * &rhs.num);
        }
        if rhs.num.is_constant() && rhs.den.is_constant() {
            return Coeff::scale(&self, &rhs.num.coeff(0));
        }
        if self.num.is_constant() && self.den.is_constant() {
            return Coeff::scale(rhs, &self.num.coeff(0));
        }
        // Cross-cancel before multiplying; inputs are already reduced.
        let g1 = Poly::gcd(&self.num, &rhs.den);
        let g2 = Poly::gcd(&rhs.num, &self.den);
        let n1 = self.num.div_exact(&g1).expect("gcd divides");
        let d2 = rhs.den.div_exact(&g1).expect("gcd divides");
        let n2 = rhs.num.div_exact(&g2).expect("gcd divides");
        let d1 = self.den.div_exact(&g2).expect("gcd divides");
        let num = n1 * &n2;
        let den = d1 * &d2;
        let lead = den.leading().expect("nonzero").recip();
        HbarRational {
            num: num.scale(&lead),
            den: den.scale(&lead),
        }
    }
}

impl Mul for HbarRational {
    type Output = HbarRational;

    fn mul(self, rhs: HbarRational) -> HbarRational {
        self * &rhs
    }
}

impl Coeff for HbarRational {
    fn from_rational(r: &Rational) -> Self {
        Self::constant(r.clone())
    }

    fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return HbarRational::zero();
        }
        HbarRational {
            num: self.num.scale(r),
            den: self.den.clone(),
        }
    }
}

impl FieldCoeff for HbarRational {
    fn try_inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Domain("inverse of the zero rational function".into()));
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formal_algebra::rational::{int, rat};

    fn lin(a: i64, b: i64) -> Poly {
        Poly::linear(int(a), int(b))
    }

    fn frac(num: Poly, den: Poly) -> HbarRational {
        HbarRational::new(num, den).unwrap()
    }

    #[test]
    fn sum_over_common_denominator() {
        // 1/(ħ+1) + 1/(ħ-1) = 2ħ/(ħ²-1)
        let a = frac(Poly::one(), lin(1, 1));
        let b = frac(Poly::one(), lin(-1, 1));
        let expect = frac(Poly::monomial(int(2), 1), Poly::new(vec![int(-1), int(0), int(1)]));
        assert_eq!(a + &b, expect);
    }

    #[test]
    fn linear_factors_match_gcd_form() {
        // (2 + 4ħ)(1 + ħ) / ((3 + 6ħ)(5 - ħ))
        let num = [(int(2), int(4)), (int(1), int(1))];
        let den = [(int(3), int(6)), (int(5), int(-1))];
        let f = HbarRational::from_linear_factors(&num, &den).unwrap();
        let g = frac(lin(2, 4) * &lin(1, 1), lin(3, 6) * &lin(5, -1));
        assert_eq!(f, g);
        assert_eq!(f.den().degree(), Some(1));
        assert!(HbarRational::from_linear_factors(&num, &[(int(0), int(0))]).is_err());
    }

    #[test]
    fn eval_direct_substitution() {
        let f = frac(Poly::x(), lin(2, 1));
        assert_eq!(f.eval(&int(2)).unwrap(), rat(1, 2));
    }

    #[test]
    fn eval_at_pole_reports_point() {
        let f = frac(Poly::one(), lin(-1, 1));
        assert_eq!(f.eval(&int(1)), Err(Error::Pole(int(1))));
    }

    #[test]
    fn laurent_at_infinity() {
        let f = frac(Poly::one(), lin(1, 1));
        assert_eq!(f.laurent_expand(2).unwrap(), vec![int(0), int(1), int(-1)]);
        let g = frac(Poly::monomial(int(3), 2), lin(1, 1));
        assert!(matches!(g.laurent_expand(2), Err(Error::Structural(_))));
    }

    #[test]
    fn canonical_form_is_reduced_and_monic() {
        // (2ħ-2)(ħ+3) / (4ħ-4) = (ħ+3)/2
        let f = frac(lin(-2, 2) * lin(3, 1), lin(-4, 4));
        assert!(f.is_polynomial());
        assert_eq!(f, HbarRational::from_poly(Poly::linear(rat(3, 2), rat(1, 2))));
        let g = frac(Poly::one(), lin(6, 3));
        assert_eq!(g.den(), &lin(2, 1));
        assert_eq!(g.num(), &Poly::constant(rat(1, 3)));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(HbarRational::new(Poly::one(), Poly::zero()).is_err());
        assert!(HbarRational::zero().try_inv().is_err());
    }

    #[test]
    fn identity_testing_agrees_with_structure() {
        let a = frac(lin(1, 2), lin(3, 1)) * &frac(lin(-5, 1), lin(7, 2));
        let b = frac(lin(1, 2) * lin(-5, 1), lin(3, 1) * lin(7, 2));
        assert!(agree_by_evaluation(&a, &b));
        let c = b.clone() + &HbarRational::constant(rat(1, 1000));
        assert!(!agree_by_evaluation(&a, &c));
    }
}
