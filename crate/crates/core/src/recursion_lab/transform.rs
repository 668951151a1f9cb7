//! The class-𝒫 preserving transformations
//! (a) `Ȳ_i = f(q) Y_i`,
//! (b) `Ȳ_i = exp(λ_i g(q)/ħ) Y_i(q e^{g(q)}, ħ)`,
//! (c) `Ȳ_i = exp(C g(q)/ħ) Y_i`,
//! their effect on `Φ`, and expansions modulo `ħ^{-2}`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::phi::{lift, phi_double_correlator, q_exp_shift};
use crate::error::{Error, Result};
use crate::formal_algebra::{to_text, BiSeries, Coeff, HbarRational, Rational, TruncSeries};
use crate::hypergeom::{f_and_g, CorrelatorFamily};
use crate::mirror_engine::mirror_map_build;
use crate::report::Report;

#[derive(Clone, Debug, PartialEq)]
pub enum Transform {
    /// (a), with `f(0) = 1`
    Multiply(TruncSeries<Rational>),
    /// (b), with `g(0) = 0`
    Shift(TruncSeries<Rational>),
    /// (c), with `g(0) = 0` and `C = Σ_α c_α λ_α`
    Exponential {
        g: TruncSeries<Rational>,
        c: Vec<Rational>,
    },
}

impl Transform {
    fn label(&self) -> &'static str {
        match self {
            Transform::Multiply(_) => "a",
            Transform::Shift(_) => "b",
            Transform::Exponential { .. } => "c",
        }
    }

    fn validate(&self, y: &CorrelatorFamily) -> Result<()> {
        let order = y.order();
        let (series, need) = match self {
            Transform::Multiply(f) => (f, Rational::one()),
            Transform::Shift(g) => (g, Rational::zero()),
            Transform::Exponential { g, c } => {
                if c.len() != y.lambda().len() {
                    return Err(Error::Domain(format!(
                        "linear form has {} coefficients for {} weights",
                        c.len(),
                        y.lambda().len()
                    )));
                }
                (g, Rational::zero())
            }
        };
        if series.coeff(0) != &need {
            return Err(Error::Domain(format!(
                "transformation ({}) needs constant term {}",
                self.label(),
                to_text(&need)
            )));
        }
        if series.order() != order {
            return Err(Error::OrderMismatch {
                left: order,
                right: series.order(),
            });
        }
        Ok(())
    }
}

/// `exp(a·g(q)/ħ)`
fn exp_over_hbar(g: &TruncSeries<Rational>, a: &Rational) -> Result<TruncSeries<HbarRational>> {
    let inv = Coeff::scale(&HbarRational::hbar_inv_pow(1), a);
    lift(g).mul_coeff(&inv).exp()
}

pub fn transform_family(y: &CorrelatorFamily, t: &Transform) -> Result<CorrelatorFamily> {
    t.validate(y)?;
    let entries = match t {
        Transform::Multiply(f) => {
            let f = lift(f);
            y.entries().iter().map(|e| e.mul(&f)).collect::<Result<_>>()?
        }
        Transform::Shift(g) => {
            let inner = lift(&g.exp()?.shift(1));
            y.entries()
                .iter()
                .zip(y.lambda())
                .map(|(e, lam)| e.compose(&inner)?.mul(&exp_over_hbar(g, lam)?))
                .collect::<Result<_>>()?
        }
        Transform::Exponential { g, c } => {
            let cval: Rational = c.iter().zip(y.lambda()).map(|(a, b)| a * b).sum();
            let factor = exp_over_hbar(g, &cval)?;
            y.entries().iter().map(|e| e.mul(&factor)).collect::<Result<_>>()?
        }
    };
    y.with_entries(entries)
}

/// `(g(q e^{zħ}) - g(q))/ħ`
fn shift_difference(g: &TruncSeries<Rational>, z_order: usize) -> Result<BiSeries<HbarRational>> {
    let lg = lift(g);
    q_exp_shift(&lg, z_order)
        .sub(&BiSeries::from_q_series(&lg, z_order))
        .map(|s| s.mul_coeff(&HbarRational::hbar_inv_pow(1)))
}

/// `Φ^Ȳ` predicted from `Φ^Y` by the transformation law of `t`.
pub fn phi_transformed_by_law(
    phi: &BiSeries<HbarRational>,
    lambda: &[Rational],
    t: &Transform,
) -> Result<BiSeries<HbarRational>> {
    let (kz, d) = (phi.x_cap(), phi.q_cap());
    let fit = |s: &TruncSeries<Rational>| s.truncate(d);
    match t {
        Transform::Multiply(f) => {
            let f = lift(&fit(f)?);
            q_exp_shift(&f, kz)
                .mul(&BiSeries::from_q_series(&f, kz))?
                .mul(phi)
        }
        Transform::Shift(g) => {
            let g = fit(g)?;
            let mut x_sub = shift_difference(&g, kz)?;
            if kz > 0 {
                let c = x_sub.coeff(1, 0).clone() + &HbarRational::one();
                x_sub.set(1, 0, c);
            }
            let q_sub = BiSeries::from_q_series(&lift(&g.exp()?.shift(1)), kz);
            phi.compose(&x_sub, &q_sub)
        }
        Transform::Exponential { g, c } => {
            let cval: Rational = c.iter().zip(lambda).map(|(a, b)| a * b).sum();
            shift_difference(&fit(g)?, kz)?.scale(&cval).exp()?.mul(phi)
        }
    }
}

/// `Φ^Ȳ` computed from the transformed family against the law.
pub fn phi_law_check(y: &CorrelatorFamily, t: &Transform, z_order: usize, q_order: usize) -> Result<Report> {
    let phi = phi_double_correlator(y, z_order, q_order)?;
    let direct = phi_double_correlator(&transform_family(y, t)?, z_order, q_order)?;
    let law = phi_transformed_by_law(&phi, y.lambda(), t)?;
    let failure = direct
        .first_difference(&law)
        .map(|(k, d)| format!("z^{k} q^{d}: direct {} vs law {}", direct.coeff(k, d), law.coeff(k, d)));
    let (identity, anchor) = match t {
        Transform::Multiply(_) => (
            "(a) Phi^Ybar(z,q) = f(q e^(z hbar)) f(q) Phi^Y(z,q)",
            "Ybar_i = f(q) Y_i",
        ),
        Transform::Shift(_) => (
            "(b) Phi^Ybar(z,q) = Phi^Y(z + (g(q e^(z hbar)) - g(q))/hbar, q e^g(q))",
            "Ybar_i = exp(lambda_i g/hbar) Y_i(q e^g, hbar)",
        ),
        Transform::Exponential { .. } => (
            "(c) Phi^Ybar(z,q) = exp(C (g(q e^(z hbar)) - g(q))/hbar) Phi^Y(z,q)",
            "Ybar_i = exp(C g/hbar) Y_i",
        ),
    };
    Ok(Report::single(
        &format!("{identity} through z^{z_order} q^{q_order}"),
        anchor,
        failure,
    ))
}

/// The `ħ^0` and `ħ^{-1}` parts of each `Y_i`.
pub fn mod_hbar2_expansion(
    y: &CorrelatorFamily,
) -> Result<Vec<(TruncSeries<Rational>, TruncSeries<Rational>)>> {
    y.entries()
        .iter()
        .map(|e| {
            let mut c0 = Vec::with_capacity(e.order() + 1);
            let mut c1 = Vec::with_capacity(e.order() + 1);
            for c in e.coeffs() {
                let l = c.laurent_expand(1)?;
                c0.push(l[0].clone());
                c1.push(l[1].clone());
            }
            Ok((TruncSeries::new(c0), TruncSeries::new(c1)))
        })
        .collect()
}

/// The composite sending `Z` to `Z*` in the Calabi–Yau case is
/// `F(q)·exp(((m+1)λ_i(G_{m+1}-G_1) + G_1Σλ_α)/(ħF)) · Z(q e^{(m+1)(G_{m+1}-G_1)/F})`;
/// this applies its inverse: (a) with `1/F`, (c) with `-G_1/F` and
/// `C = Σλ_α`, then (b) with `log h` where `q'h(q')` inverts the `q`-shift.
pub fn inverse_composite(y: &CorrelatorFamily) -> Result<CorrelatorFamily> {
    let (m, order) = (y.m(), y.order());
    let (f, g1) = f_and_g(m, 1, order)?;
    let inv_f = f.inv()?;
    let step_a = transform_family(y, &Transform::Multiply(inv_f.clone()))?;
    let step_c = transform_family(
        &step_a,
        &Transform::Exponential {
            g: g1.mul(&inv_f)?.neg(),
            c: vec![Rational::one(); m + 1],
        },
    )?;
    let h = mirror_map_build(m, order)?.h;
    transform_family(&step_c, &Transform::Shift(h.log()?))
}

/// `Y_i ≡ 1 mod ħ^{-2}` for all `i`.
pub fn is_one_mod_hbar2(y: &CorrelatorFamily) -> Result<Option<String>> {
    for (i, (c0, c1)) in mod_hbar2_expansion(y)?.iter().enumerate() {
        for d in 0..=y.order() {
            let expect = if d == 0 { Rational::one() } else { Rational::zero() };
            if c0.coeff(d) != &expect || !c1.coeff(d).is_zero() {
                return Ok(Some(format!(
                    "i={i}, q^{d}: hbar^0 part {}, hbar^-1 part {}",
                    to_text(c0.coeff(d)),
                    to_text(c1.coeff(d))
                )));
            }
        }
    }
    Ok(None)
}

fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.gen_range(-4i64..=4).into(), rng.gen_range(1i64..=3).into())
}

/// One admissible instance of each of (a), (b), (c) with small random
/// coefficients.
pub fn random_transforms(len: usize, order: usize, seed: u64) -> Vec<Transform> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let series = |head: Rational, rng: &mut ChaCha8Rng| {
        let mut c = vec![head];
        c.extend((1..=order).map(|_| small_rational(rng)));
        TruncSeries::new(c)
    };
    let f = series(Rational::one(), &mut rng);
    let g_b = series(Rational::zero(), &mut rng);
    let g_c = series(Rational::zero(), &mut rng);
    let c = (0..len).map(|_| small_rational(&mut rng)).collect();
    vec![
        Transform::Multiply(f),
        Transform::Shift(g_b),
        Transform::Exponential { g: g_c, c },
    ]
}

fn r(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `Z*_i ≡ F + (λ_i(m+1)(G_{m+1}-G_1) + G_1 Σλ_α)/ħ mod ħ^{-2}`.
pub fn zstar_mod_hbar2_prediction(
    m: usize,
    lambda: &[Rational],
    order: usize,
) -> Result<Vec<(TruncSeries<Rational>, TruncSeries<Rational>)>> {
    let (f, g_top) = f_and_g(m, m + 1, order)?;
    let (_, g1) = f_and_g(m, 1, order)?;
    let sum: Rational = lambda.iter().sum();
    let diff = g_top.sub(&g1)?.scale(&r(m + 1));
    lambda
        .iter()
        .map(|lam| Ok((f.clone(), diff.scale(lam).add(&g1.scale(&sum))?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formal_algebra::{int, rat};
    use crate::hypergeom::{sample_lambda, zstar_family, HypergeomConfig};

    fn zstar(order: usize, seed: u64) -> CorrelatorFamily {
        let lambda = sample_lambda(5, 3, seed);
        zstar_family(&HypergeomConfig::hypersurface(4, 5, order).unwrap(), &lambda).unwrap()
    }

    fn series(v: &[Rational]) -> TruncSeries<Rational> {
        TruncSeries::new(v.to_vec())
    }

    #[test]
    fn trivial_transforms_are_identity() {
        let y = zstar(2, 1);
        assert_eq!(transform_family(&y, &Transform::Multiply(TruncSeries::one(2))).unwrap(), y);
        assert_eq!(transform_family(&y, &Transform::Shift(TruncSeries::zero(2))).unwrap(), y);
        let bad = Transform::Shift(series(&[int(1), int(0), int(0)]));
        assert!(matches!(transform_family(&y, &bad), Err(Error::Domain(_))));
    }

    #[test]
    fn phi_laws_small() {
        let y = zstar(2, 2);
        let f = series(&[int(1), rat(2, 3), int(-1)]);
        let g = series(&[int(0), rat(-1, 2), int(3)]);
        let c = vec![int(1), int(0), int(2), int(0), rat(1, 2)];
        for t in [
            Transform::Multiply(f),
            Transform::Shift(g.clone()),
            Transform::Exponential { g, c },
        ] {
            let rep = phi_law_check(&y, &t, 2, 2).unwrap();
            assert!(rep.passed(), "{}", rep.to_text());
        }
    }

    #[test]
    fn zstar_expansion_mod_hbar2() {
        let y = zstar(2, 3);
        let got = mod_hbar2_expansion(&y).unwrap();
        let want = zstar_mod_hbar2_prediction(4, y.lambda(), 2).unwrap();
        assert_eq!(got, want);
        let sum: Rational = y.lambda().iter().sum();
        assert_eq!(got[0].1.coeff(1), &(&y.lambda()[0] * int(770) + int(120) * sum));
        let one = CorrelatorFamily::constant_one(y.lambda().to_vec(), 5, 2).unwrap();
        let e = mod_hbar2_expansion(&one).unwrap();
        assert_eq!(e[0], (TruncSeries::one(2), TruncSeries::zero(2)));
    }

    #[test]
    fn inverse_composite_trivializes_zstar() {
        let y = zstar(2, 4);
        assert_eq!(is_one_mod_hbar2(&inverse_composite(&y).unwrap()).unwrap(), None);
        assert!(is_one_mod_hbar2(&y).unwrap().is_some());
    }
}
