//! Localization recursions for the rescaled correlators
//! `y_i(Q, ħ) = Y_i(Q ħ^s, ħ)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::formal_algebra::{factorial, to_text, Coeff, HbarRational, Poly, Rational, TruncSeries};
use crate::hypergeom::CorrelatorFamily;
use crate::report::Report;

fn r(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `l < m`
    SubM,
    /// `l = m`
    EqualM,
    /// `l = m + 1`
    CalabiYau,
}

impl Regime {
    pub fn of(m: usize, l: usize) -> Result<Regime> {
        match l {
            0 => Err(Error::Domain("hypersurface degree must be positive".into())),
            l if l < m => Ok(Regime::SubM),
            l if l == m => Ok(Regime::EqualM),
            l if l == m + 1 => Ok(Regime::CalabiYau),
            _ => Err(Error::Domain(format!("l = {l} exceeds m + 1 = {}", m + 1))),
        }
    }

    /// The power `s` in `Q = q ħ^s`.
    pub fn hbar_shift(self, m: usize, l: usize) -> usize {
        match self {
            Regime::CalabiYau => 1,
            _ => m + 1 - l,
        }
    }
}

/// Coefficients `C_i^j(d, ħ)` for `j ≠ i`, `1 ≤ d ≤ order`, and the initial
/// `Q`-series `C_i(Q)` (absent in the Calabi–Yau case).
#[derive(Clone, Debug)]
pub struct RecursionCoefficients {
    pub regime: Regime,
    pub m: usize,
    pub l: usize,
    pub lambda: Vec<Rational>,
    pub order: usize,
    coeffs: BTreeMap<(usize, usize, usize), HbarRational>,
    initial: Option<Vec<TruncSeries<Rational>>>,
}

impl RecursionCoefficients {
    pub fn coeff(&self, i: usize, j: usize, d: usize) -> &HbarRational {
        &self.coeffs[&(i, j, d)]
    }

    pub fn initial(&self) -> Option<&[TruncSeries<Rational>]> {
        self.initial.as_deref()
    }
}

fn nonzero(x: Rational, what: &str) -> Result<Rational> {
    if x.is_zero() {
        Err(Error::Domain(format!("weight coincidence: {what} vanishes")))
    } else {
        Ok(x)
    }
}

/// `l ≤ m`:
/// `C_i^j(d,ħ) = 1/((λ_i-λ_j)/ħ + d) · Π_{r=1}^{ld}(ldλ_i/(λ_j-λ_i) + r)
///   / Π_α Π_{r=1..d, (α,r)≠(j,d)} (d(λ_i-λ_α)/(λ_j-λ_i) + r)`.
pub fn blob_coefficient(lambda: &[Rational], l: usize, i: usize, j: usize, d: usize) -> Result<HbarRational> {
    let gap = nonzero(&lambda[j] - &lambda[i], "lambda_j - lambda_i")?;
    let dr = r(d);
    let mut c = Rational::one();
    for k in 1..=l * d {
        c *= r(l) * &dr * &lambda[i] / &gap + r(k);
    }
    for (a, la) in lambda.iter().enumerate() {
        for k in 1..=d {
            if (a, k) == (j, d) {
                continue;
            }
            c /= nonzero(&dr * (&lambda[i] - la) / &gap + r(k), "blob denominator")?;
        }
    }
    // c·ħ / (λ_i - λ_j + dħ)
    HbarRational::from_linear_factors(
        &[(c, Rational::zero()), (Rational::zero(), Rational::one())],
        &[(&lambda[i] - &lambda[j], dr)],
    )
}

/// `l = m + 1`:
/// `C_i^j(d,ħ) = 1/(λ_i-λ_j+dħ) · Π_{r=1}^{(m+1)d}((m+1)λ_i + r(λ_j-λ_i)/d)
///   / (d! Π_{α≠i} Π_{r=1..d, (α,r)≠(j,d)} (λ_i-λ_α + r(λ_j-λ_i)/d))`.
pub fn cy_coefficient(lambda: &[Rational], i: usize, j: usize, d: usize) -> Result<HbarRational> {
    let m = lambda.len() - 1;
    let psi = (&lambda[j] - &lambda[i]) / r(d);
    let mut c = Rational::from_integer(factorial(d as u64)).recip();
    for k in 1..=(m + 1) * d {
        c *= r(m + 1) * &lambda[i] + r(k) * &psi;
    }
    for (a, la) in lambda.iter().enumerate() {
        if a == i {
            continue;
        }
        for k in 1..=d {
            if (a, k) == (j, d) {
                continue;
            }
            c /= nonzero(&lambda[i] - la + r(k) * &psi, "cy denominator")?;
        }
    }
    HbarRational::from_linear_factors(
        &[(c, Rational::zero())],
        &[(&lambda[i] - &lambda[j], r(d))],
    )
}

/// The same coefficient assembled from the fixed-locus data of a degree-`d`
/// edge from `p_i` to `p_j`: with `ψ = (λ_j-λ_i)/d`,
/// `(1/d)·ψ^d/(ħ-ψ) · e(E') · Π_{α≠i}(λ_i-λ_α) / e(N)`, where `e(N)` is the
/// product of all nonzero weights `λ_i-λ_α+rψ`, `0 ≤ r ≤ d`, and `e(E')`
/// omits the weight `(m+1)λ_i` at the marked point.
pub fn cy_coefficient_via_localization(lambda: &[Rational], i: usize, j: usize, d: usize) -> Result<HbarRational> {
    let m = lambda.len() - 1;
    let psi = nonzero((&lambda[j] - &lambda[i]) / r(d), "edge weight")?;
    let mut bundle = Rational::one();
    for k in 0..=(m + 1) * d {
        let w = r(m + 1) * &lambda[i] + r(k) * &psi;
        if k > 0 {
            bundle *= w;
        }
    }
    let mut normal = Rational::one();
    for la in lambda {
        for k in 0..=d {
            let w = &lambda[i] - la + r(k) * &psi;
            if !w.is_zero() {
                normal *= w;
            }
        }
    }
    let vertex: Rational = lambda
        .iter()
        .enumerate()
        .filter(|(a, _)| *a != i)
        .map(|(_, la)| &lambda[i] - la)
        .product();
    let c = num_traits::pow(psi.clone(), d) * bundle * vertex / normal / r(d);
    HbarRational::from_linear_factors(&[(c, Rational::zero())], &[(-psi, Rational::one())])
}

/// `e^{(-m! + (mλ_i)^m/Π_{α≠i}(λ_i-λ_α)) Q} - 1`
fn equal_m_initial(lambda: &[Rational], i: usize, order: usize) -> Result<TruncSeries<Rational>> {
    let m = lambda.len() - 1;
    let den: Rational = lambda
        .iter()
        .enumerate()
        .filter(|(a, _)| *a != i)
        .map(|(_, la)| &lambda[i] - la)
        .product();
    let w = num_traits::pow(r(m) * &lambda[i], m) / den;
    let a = w - Rational::from_integer(factorial(m as u64));
    let mut e = TruncSeries::monomial(a, 1, order).exp()?;
    e.coeffs_mut()[0] = Rational::zero();
    Ok(e)
}

pub fn recursion_coeffs(
    regime: Regime,
    m: usize,
    l: usize,
    lambda: &[Rational],
    order: usize,
) -> Result<RecursionCoefficients> {
    if Regime::of(m, l)? != regime {
        return Err(Error::Domain(format!("regime {regime:?} inconsistent with m={m}, l={l}")));
    }
    if lambda.len() != m + 1 {
        return Err(Error::Domain(format!("expected {} weights", m + 1)));
    }
    let mut coeffs = BTreeMap::new();
    for i in 0..=m {
        for j in 0..=m {
            if i == j {
                continue;
            }
            for d in 1..=order {
                let c = match regime {
                    Regime::CalabiYau => cy_coefficient(lambda, i, j, d)?,
                    _ => blob_coefficient(lambda, l, i, j, d)?,
                };
                coeffs.insert((i, j, d), c);
            }
        }
    }
    let initial = match regime {
        Regime::SubM => Some(vec![TruncSeries::zero(order); m + 1]),
        Regime::EqualM => Some(
            (0..=m)
                .map(|i| equal_m_initial(lambda, i, order))
                .collect::<Result<_>>()?,
        ),
        Regime::CalabiYau => None,
    };
    Ok(RecursionCoefficients {
        regime,
        m,
        l,
        lambda: lambda.to_vec(),
        order,
        coeffs,
        initial,
    })
}

/// `[Q^n] y_i = ħ^{sn} [q^n] Y_i`
fn rescaled(y: &CorrelatorFamily, s: usize, i: usize, n: usize) -> HbarRational {
    let c = y.entry(i).coeff(n);
    if s * n == 0 {
        return c.clone();
    }
    c.clone() * &HbarRational::from_poly(Poly::monomial(Rational::one(), s * n))
}

/// `e^{-m! Q}` applied to the rescaled correlators, expressed back in `q`:
/// since `q = Qħ` when `l = m`, this is `e^{-m! q/ħ}`.
pub fn equal_m_modified(y: &CorrelatorFamily) -> Result<CorrelatorFamily> {
    let m = y.m();
    let shift = Regime::EqualM.hbar_shift(m, m);
    let c = -Rational::from_integer(factorial(m as u64));
    let factor = TruncSeries::monomial(
        Coeff::scale(&HbarRational::hbar_inv_pow(shift), &c),
        1,
        y.order(),
    )
    .exp()?;
    let entries = y
        .entries()
        .iter()
        .map(|e| e.mul(&factor))
        .collect::<Result<_>>()?;
    y.with_entries(entries)
}

/// Residual `ρ_{in} = [Q^n]y_i - [Q^n]C_i - Σ_{j≠i} Σ_{d=1}^n C_i^j(d,ħ)·[Q^{n-d}]y_j|_{ħ=(λ_j-λ_i)/d}`
/// for `1 ≤ n ≤ order`; entry `[i][n-1]`.
pub fn recursion_residuals(
    y: &CorrelatorFamily,
    coeffs: &RecursionCoefficients,
    order: usize,
) -> Result<Vec<Vec<HbarRational>>> {
    if order > coeffs.order || order > y.order() {
        return Err(Error::OrderMismatch {
            left: order,
            right: coeffs.order.min(y.order()),
        });
    }
    if y.lambda() != coeffs.lambda.as_slice() {
        return Err(Error::Structural("family and coefficients use different weights".into()));
    }
    let m = coeffs.m;
    let s = coeffs.regime.hbar_shift(m, coeffs.l);
    let lambda = y.lambda();
    // Values of the rescaled y_j at the special points, keyed by (j, n-d, i, d).
    let mut values: BTreeMap<(usize, usize, usize, usize), Rational> = BTreeMap::new();
    let mut out = vec![Vec::with_capacity(order); m + 1];
    for (i, row) in out.iter_mut().enumerate() {
        for n in 1..=order {
            let mut res = rescaled(y, s, i, n);
            if let Some(init) = &coeffs.initial {
                res = res - HbarRational::constant(init[i].coeff(n).clone());
            }
            for j in 0..=m {
                if j == i {
                    continue;
                }
                for d in 1..=n {
                    let point = (&lambda[j] - &lambda[i]) / r(d);
                    let key = (j, n - d, i, d);
                    let v = match values.get(&key) {
                        Some(v) => v.clone(),
                        None => {
                            let v = rescaled(y, s, j, n - d).eval(&point)?;
                            values.insert(key, v.clone());
                            v
                        }
                    };
                    if v.is_zero() {
                        continue;
                    }
                    res = res - coeffs.coeff(i, j, d).clone() * &HbarRational::constant(v);
                }
            }
            row.push(res);
        }
    }
    Ok(out)
}

/// For `l ≤ m` every residual vanishes; in the Calabi–Yau case each residual
/// is a polynomial in `ħ` of degree at most `n`.
pub fn verify_recursion(
    y: &CorrelatorFamily,
    coeffs: &RecursionCoefficients,
    order: usize,
) -> Result<Report> {
    let res = recursion_residuals(y, coeffs, order)?;
    let mut failure = None;
    'outer: for (i, row) in res.iter().enumerate() {
        for (k, rho) in row.iter().enumerate() {
            let n = k + 1;
            let ok = match coeffs.regime {
                Regime::CalabiYau => rho
                    .as_polynomial()
                    .is_some_and(|p| p.degree().unwrap_or(0) <= n),
                _ => rho.is_zero(),
            };
            if !ok {
                failure = Some(format!("i={i}, Q^{n}: residual = {rho}"));
                break 'outer;
            }
        }
    }
    let (identity, anchor) = match coeffs.regime {
        Regime::SubM => (
            "z_i = 1 + sum_(j!=i) sum_d Q^d C_i^j(d) z_j(Q, (lambda_j-lambda_i)/d)",
            "C_i(Q, hbar, l<m) = 0",
        ),
        Regime::EqualM => (
            "e^(-m!Q) z_i = 1 + C_i + sum_(j!=i) sum_d Q^d C_i^j(d) (e^(-m!Q) z_j)(Q, (lambda_j-lambda_i)/d)",
            "C_i = -1 + exp((-m! + (m lambda_i)^m / prod(lambda_i - lambda_a)) Q)",
        ),
        Regime::CalabiYau => (
            "z_i - sum C_i^j(d) z_j(Q, (lambda_j-lambda_i)/d) = 1 + sum Q^d R_id / d!, deg R_id <= d",
            "C_i^j(d, hbar, m+1) = prod((m+1)lambda_i + r(lambda_j-lambda_i)/d) / (d! (lambda_i-lambda_j+d hbar) prod(...))",
        ),
    };
    Ok(Report::single(
        &format!("{identity}  (m={}, l={}, Q-order {order})", coeffs.m, coeffs.l),
        anchor,
        failure,
    ))
}

/// Builds the family determined by the recursion and its initial data:
/// `initial[i][n-1]` is the `Q^n` term not produced by the `C_i^j` sum.
pub fn forward_solve(
    coeffs: &RecursionCoefficients,
    initial: &[Vec<HbarRational>],
    order: usize,
) -> Result<CorrelatorFamily> {
    let m = coeffs.m;
    let lambda = &coeffs.lambda;
    let s = coeffs.regime.hbar_shift(m, coeffs.l);
    if order > coeffs.order || initial.len() != m + 1 || initial.iter().any(|v| v.len() < order) {
        return Err(Error::Structural("initial data does not cover the order".into()));
    }
    let mut y: Vec<Vec<HbarRational>> = vec![vec![HbarRational::one()]; m + 1];
    for n in 1..=order {
        let mut next = Vec::with_capacity(m + 1);
        for i in 0..=m {
            let mut acc = initial[i][n - 1].clone();
            for j in 0..=m {
                if j == i {
                    continue;
                }
                for d in 1..=n {
                    let point = (&lambda[j] - &lambda[i]) / r(d);
                    let v = y[j][n - d].eval(&point)?;
                    acc = acc + &(coeffs.coeff(i, j, d).clone() * &HbarRational::constant(v));
                }
            }
            next.push(acc);
        }
        for (i, v) in next.into_iter().enumerate() {
            y[i].push(v);
        }
    }
    let entries = y
        .into_iter()
        .map(|row| {
            TruncSeries::new(
                row.into_iter()
                    .enumerate()
                    .map(|(n, c)| {
                        if s * n == 0 {
                            c
                        } else {
                            c * &HbarRational::hbar_inv_pow(s * n)
                        }
                    })
                    .collect(),
            )
        })
        .collect();
    CorrelatorFamily::new(lambda.clone(), entries, coeffs.l)
}

/// The top two `ħ`-coefficients of each Calabi–Yau residual reproduce the
/// `ħ^0` and `ħ^{-1}` parts of `[q^d] Y_i`.
pub fn two_coefficient_check(
    y: &CorrelatorFamily,
    coeffs: &RecursionCoefficients,
    order: usize,
) -> Result<Report> {
    if coeffs.regime != Regime::CalabiYau {
        return Err(Error::Domain("two-coefficient determinacy is a Calabi-Yau statement".into()));
    }
    let res = recursion_residuals(y, coeffs, order)?;
    let mut failure = None;
    'outer: for (i, row) in res.iter().enumerate() {
        for (k, rho) in row.iter().enumerate() {
            let d = k + 1;
            let p = rho
                .as_polynomial()
                .ok_or_else(|| Error::ClassP(format!("residual i={i}, d={d} is not polynomial")))?;
            let expansion = y.entry(i).coeff(d).laurent_expand(1)?;
            let (top, next) = (p.coeff(d), p.coeff(d - 1));
            if top != expansion[0] || next != expansion[1] {
                failure = Some(format!(
                    "i={i}, q^{d}: residual top terms ({}, {}) vs expansion ({}, {})",
                    to_text(&top),
                    to_text(&next),
                    to_text(&expansion[0]),
                    to_text(&expansion[1])
                ));
                break 'outer;
            }
        }
    }
    Ok(Report::single(
        "Y_i = sum_d q^d (I0_id + I1_id / hbar) mod hbar^-2",
        "I_id = sum_j I^j_id hbar^(d-j)",
        failure,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formal_algebra::int;
    use crate::hypergeom::{sample_lambda, zstar_family, HypergeomConfig};

    fn zstar(m: usize, l: usize, order: usize, lambda: &[Rational]) -> CorrelatorFamily {
        zstar_family(&HypergeomConfig::hypersurface(m, l, order).unwrap(), lambda).unwrap()
    }

    #[test]
    fn regimes() {
        assert_eq!(Regime::of(5, 3).unwrap(), Regime::SubM);
        assert_eq!(Regime::of(4, 4).unwrap(), Regime::EqualM);
        assert_eq!(Regime::of(4, 5).unwrap(), Regime::CalabiYau);
        assert!(Regime::of(4, 6).is_err());
        let lambda = sample_lambda(5, 3, 1);
        assert!(recursion_coeffs(Regime::SubM, 4, 5, &lambda, 2).is_err());
    }

    #[test]
    fn sub_m_initial_terms_vanish() {
        let lambda = sample_lambda(6, 3, 2);
        let c = recursion_coeffs(Regime::SubM, 5, 3, &lambda, 3).unwrap();
        assert!(c.initial().unwrap().iter().all(TruncSeries::is_zero));
    }

    #[test]
    fn equal_m_initial_first_order() {
        let lambda = sample_lambda(4, 3, 3);
        let c = recursion_coeffs(Regime::EqualM, 3, 3, &lambda, 3).unwrap();
        let den: Rational = (1..4).map(|a| &lambda[0] - &lambda[a]).product();
        let expect = num_traits::pow(int(3) * &lambda[0], 3) / den - int(6);
        assert_eq!(c.initial().unwrap()[0].coeff(1), &expect);
        assert_eq!(c.initial().unwrap()[0].coeff(0), &int(0));
    }

    #[test]
    fn cy_coefficient_two_paths() {
        let lambda: Vec<_> = (0..5).map(int).collect();
        let a = cy_coefficient(&lambda, 0, 1, 1).unwrap();
        let b = cy_coefficient_via_localization(&lambda, 0, 1, 1).unwrap();
        assert_eq!(a.eval(&int(7)).unwrap(), b.eval(&int(7)).unwrap());
        let lambda = sample_lambda(5, 4, 11);
        for (i, j, d) in [(0, 1, 1), (2, 4, 2), (3, 0, 3)] {
            assert_eq!(
                cy_coefficient(&lambda, i, j, d).unwrap(),
                cy_coefficient_via_localization(&lambda, i, j, d).unwrap()
            );
        }
    }

    #[test]
    fn zstar_sub_m() {
        let lambda = sample_lambda(6, 3, 5);
        let y = zstar(5, 3, 3, &lambda);
        let c = recursion_coeffs(Regime::SubM, 5, 3, &lambda, 3).unwrap();
        assert!(verify_recursion(&y, &c, 3).unwrap().passed());
    }

    #[test]
    fn zstar_equal_m_modified() {
        let lambda = sample_lambda(5, 3, 6);
        let y = equal_m_modified(&zstar(4, 4, 3, &lambda)).unwrap();
        let c = recursion_coeffs(Regime::EqualM, 4, 4, &lambda, 3).unwrap();
        assert!(verify_recursion(&y, &c, 3).unwrap().passed());
        // the unmodified family does not satisfy it
        let raw = zstar(4, 4, 3, &lambda);
        assert!(!verify_recursion(&raw, &c, 3).unwrap().passed());
    }

    #[test]
    fn zstar_calabi_yau_and_uniqueness() {
        let lambda = sample_lambda(5, 3, 8);
        let y = zstar(4, 5, 2, &lambda);
        let c = recursion_coeffs(Regime::CalabiYau, 4, 5, &lambda, 2).unwrap();
        assert!(verify_recursion(&y, &c, 2).unwrap().passed());
        let res = recursion_residuals(&y, &c, 2).unwrap();
        // leading coefficients are F(q) = 1 + 120q + 113400q^2 + …
        assert_eq!(res[0][0].num().coeff(1), int(120));
        assert_eq!(res[0][1].num().coeff(2), int(113400));
        assert_eq!(forward_solve(&c, &res, 2).unwrap(), y);
        assert!(two_coefficient_check(&y, &c, 2).unwrap().passed());
    }
}
