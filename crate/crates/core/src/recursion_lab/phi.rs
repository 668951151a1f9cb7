//! The double correlator
//! `Φ^Y(z,q) = Σ_i (m+1)λ_i/Π_{j≠i}(λ_i-λ_j) · e^{λ_i z} Y_i(qe^{zħ}, ħ) Y_i(q, -ħ)`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::formal_algebra::{BiSeries, Coeff, HbarRational, Poly, Rational, TruncSeries};
use crate::hypergeom::CorrelatorFamily;
use crate::report::Report;

fn r(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `s(q e^{zħ}) = Σ_d s_d q^d e^{d z ħ}` through `z^{z_order}`.
pub fn q_exp_shift(s: &TruncSeries<HbarRational>, z_order: usize) -> BiSeries<HbarRational> {
    let mut out = BiSeries::zero(z_order, s.order());
    for (d, c) in s.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        // (dħ)^b / b!
        let mut factor = Poly::one();
        for b in 0..=z_order {
            if b > 0 {
                factor = factor * &Poly::monomial(r(d) / r(b), 1);
            }
            out.set(b, d, c.clone() * &HbarRational::from_poly(factor.clone()));
        }
    }
    out
}

/// `(m+1)λ_i / Π_{j≠i}(λ_i - λ_j)`
pub fn phi_weight(lambda: &[Rational], i: usize) -> Rational {
    let m = lambda.len() - 1;
    let den: Rational = lambda
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, lj)| &lambda[i] - lj)
        .product();
    r(m + 1) * &lambda[i] / den
}

fn phi_term(y: &CorrelatorFamily, i: usize, z_order: usize, q_order: usize) -> Result<BiSeries<HbarRational>> {
    let entry = y.entry(i).truncate(q_order)?;
    let lam = &y.lambda()[i];
    let shifted = q_exp_shift(&entry, z_order);
    let reflected = BiSeries::from_q_series(&entry.map(HbarRational::reflect), z_order);
    let mut e = BiSeries::zero(z_order, q_order);
    let mut c = Rational::one();
    for a in 0..=z_order {
        if a > 0 {
            c = c * lam / r(a);
        }
        e.set(a, 0, HbarRational::constant(c.clone()));
    }
    let w = phi_weight(y.lambda(), i);
    Ok(e.scale(&w).mul(&shifted)?.mul(&reflected)?)
}

pub fn phi_double_correlator(
    y: &CorrelatorFamily,
    z_order: usize,
    q_order: usize,
) -> Result<BiSeries<HbarRational>> {
    if q_order > y.order() {
        return Err(Error::OrderMismatch {
            left: q_order,
            right: y.order(),
        });
    }
    let terms = (0..=y.m())
        .into_par_iter()
        .map(|i| phi_term(y, i, z_order, q_order))
        .collect::<Result<Vec<_>>>()?;
    let mut acc = BiSeries::zero(z_order, q_order);
    for t in &terms {
        acc = acc.add(t)?;
    }
    Ok(acc)
}

/// First `z^k q^d` coefficient of `Φ` that is not a polynomial in `ħ`.
pub fn first_non_polynomial(phi: &BiSeries<HbarRational>) -> Option<(usize, usize)> {
    for d in 0..=phi.q_cap() {
        for k in 0..=phi.x_cap() {
            if !phi.coeff(k, d).is_polynomial() {
                return Some((k, d));
            }
        }
    }
    None
}

pub fn phi_polynomiality_report(y: &CorrelatorFamily, z_order: usize, q_order: usize) -> Result<Report> {
    let phi = phi_double_correlator(y, z_order, q_order)?;
    let failure = first_non_polynomial(&phi)
        .map(|(k, d)| format!("z^{k} q^{d}: {}", phi.coeff(k, d)));
    Ok(Report::single(
        &format!("Phi^Y(z,q) in Q[hbar][[z,q]] through z^{z_order} q^{q_order}"),
        "Phi(z,q) = sum_i (m+1)lambda_i/prod(lambda_i-lambda_j) e^(lambda_i z) Y_i(q e^(z hbar), hbar) Y_i(q, -hbar)",
        failure,
    ))
}

/// Lifts a rational series to `ħ`-rational coefficients.
pub fn lift(s: &TruncSeries<Rational>) -> TruncSeries<HbarRational> {
    s.map(HbarRational::from_rational)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formal_algebra::int;
    use crate::hypergeom::{sample_lambda, zstar_family, HypergeomConfig};

    #[test]
    fn constant_family_vanishing_sums() {
        let lambda = sample_lambda(5, 2, 9);
        let y = CorrelatorFamily::constant_one(lambda.clone(), 5, 1).unwrap();
        let phi = phi_double_correlator(&y, 5, 1).unwrap();
        // Σ λ_i^{k+1}/Π(λ_i-λ_j) vanishes for k + 1 < m
        assert!(phi.coeff(0, 0).is_zero());
        assert!(phi.coeff(1, 0).is_zero());
        assert!(phi.coeff(2, 0).is_zero());
        assert_eq!(phi.coeff(3, 0), &HbarRational::constant(int(5) / int(6)));
        let direct: Rational = (0..5).map(|i| phi_weight(&lambda, i)).sum();
        assert!(direct.is_zero());
    }

    #[test]
    fn zstar_phi_is_polynomial() {
        let lambda = sample_lambda(5, 3, 10);
        let y = zstar_family(&HypergeomConfig::hypersurface(4, 5, 2).unwrap(), &lambda).unwrap();
        assert!(phi_polynomiality_report(&y, 3, 2).unwrap().passed());
    }

    #[test]
    fn dropped_factor_detected() {
        let lambda = sample_lambda(5, 3, 12);
        let y = zstar_family(&HypergeomConfig::hypersurface(4, 5, 2).unwrap(), &lambda).unwrap();
        let mut entries = y.entries().to_vec();
        // remove the factor (5λ_0 + ħ) from the q^1 coefficient of Y_0
        let factor = HbarRational::from_poly(Poly::linear(int(5) * &lambda[0], int(1)));
        let c = entries[0].coeff(1).checked_div(&factor).unwrap();
        entries[0].coeffs_mut()[1] = c;
        let y = y.with_entries(entries).unwrap();
        assert!(!phi_polynomiality_report(&y, 3, 2).unwrap().passed());
    }
}
