//! Explicit hypergeometric series: `S*_X`, `S_{P^m}`, the equivariant
//! correlators `Z*_i`, and the generating functions `F`, `G_l`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::formal_algebra::{
    factorial, BiSeries, HbarRational, MixedSeries, Poly, Rational, TruncSeries,
};

/// Ambient dimension `m`, hypersurface degree `l`, `q`-order and `H` cap.
/// The series built from it live modulo `H^{h_cap}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HypergeomConfig {
    m: usize,
    l: usize,
    order: usize,
    h_cap: usize,
}

impl HypergeomConfig {
    pub fn new(m: usize, l: usize, order: usize, h_cap: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("ambient dimension m must be positive".into()));
        }
        if l == 0 || l > m + 1 {
            return Err(Error::Domain(format!("need 1 <= l <= m+1, got l={l}, m={m}")));
        }
        if order == 0 {
            return Err(Error::Domain("order must be at least 1".into()));
        }
        if h_cap != m && h_cap != m + 1 {
            return Err(Error::Domain(format!("h_cap must be m or m+1, got {h_cap}")));
        }
        Ok(HypergeomConfig { m, l, order, h_cap })
    }

    /// The hypersurface convention: series modulo `H^m`.
    pub fn hypersurface(m: usize, l: usize, order: usize) -> Result<Self> {
        Self::new(m, l, order, m)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn h_cap(&self) -> usize {
        self.h_cap
    }
}

fn r(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `Π (a + bH) / Π (a' + b'H)` expanded in `H` modulo `H^n`.
fn linear_ratio_in_h(
    num: &[(Rational, Rational)],
    den: &[(Rational, Rational)],
    n: usize,
) -> Result<TruncSeries<Rational>> {
    let order = n - 1;
    let mut acc = TruncSeries::one(order);
    for (a, b) in num {
        let mut f = TruncSeries::constant(a.clone(), order);
        if order >= 1 {
            f.coeffs_mut()[1] = b.clone();
        }
        acc = acc.mul(&f)?;
    }
    for (a, b) in den {
        if a.is_zero() {
            return Err(Error::Domain("denominator factor vanishes at H = 0".into()));
        }
        // 1/(a + bH) = Σ (-b)^k H^k / a^{k+1}
        let ratio = -(b / a);
        let mut coeffs = Vec::with_capacity(n);
        let mut c = a.recip();
        for _ in 0..n {
            coeffs.push(c.clone());
            c *= &ratio;
        }
        acc = acc.mul(&TruncSeries::new(coeffs))?;
    }
    Ok(acc)
}

/// Places `Σ_d q^d e^{Ht/ħ} A_d(H)` into a mixed series, where `a[d]` is the
/// `H`-expansion of `A_d` and `inv_hbar` is `1/ħ`.
fn assemble_with_exponential(
    a: &[TruncSeries<Rational>],
    h_parts: usize,
    inv_hbar: &Rational,
) -> MixedSeries<Rational> {
    let order = a.len() - 1;
    let t_cap = h_parts - 1;
    let mut out = MixedSeries::<Rational>::zero(h_parts - 1, t_cap, order);
    // e^{Ht/ħ} = Σ_k H^k t^k ħ^{-k} / k!
    let mut exp_coeffs = Vec::with_capacity(h_parts);
    let mut c = Rational::one();
    for k in 0..h_parts {
        if k > 0 {
            c = c * inv_hbar / r(k);
        }
        exp_coeffs.push(c.clone());
    }
    for (d, ad) in a.iter().enumerate() {
        for j in 0..h_parts {
            let coef = ad.coeff(j);
            if coef.is_zero() {
                continue;
            }
            for (k, e) in exp_coeffs.iter().enumerate().take(h_parts - j) {
                let part = out.component_mut(j + k);
                let v = part.coeff(k, d).clone() + coef * e;
                part.set(k, d, v);
            }
        }
    }
    out
}

/// `S*_X = Σ_d e^{(H+d)t} Π_{r=1}^{ld}(lH+r) / Π_{r=1}^d (H+r)^{m+1}` modulo
/// `H^{h_cap}`, with `q = e^t`. Its `H^b` components are the `I_b(t)`.
pub fn hyper_series_sx(cfg: &HypergeomConfig) -> Result<MixedSeries<Rational>> {
    let (m, l, n) = (cfg.m, cfg.l, cfg.h_cap);
    let a: Vec<TruncSeries<Rational>> = (0..=cfg.order)
        .map(|d| {
            let num: Vec<_> = (1..=l * d).map(|k| (r(k), r(l))).collect();
            let den: Vec<_> = (1..=d)
                .flat_map(|k| std::iter::repeat((r(k), Rational::one())).take(m + 1))
                .collect();
            linear_ratio_in_h(&num, &den, n)
        })
        .collect::<Result<_>>()?;
    Ok(assemble_with_exponential(&a, n, &Rational::one()))
}

/// The non-equivariant limit `λ = 0` of
/// `S*_T = Σ_d e^{(H/ħ+d)t} Π_{r=0}^{ld}(lH+rħ) / Π_α Π_{r=1}^d (H-λ_α+rħ)`
/// modulo `H^{m+1}`, at a numeric `ħ`.
pub fn hyper_series_t_at(cfg: &HypergeomConfig, hbar: &Rational) -> Result<MixedSeries<Rational>> {
    if hbar.is_zero() {
        return Err(Error::Domain("hbar must be nonzero".into()));
    }
    let (m, l) = (cfg.m, cfg.l);
    let a: Vec<TruncSeries<Rational>> = (0..=cfg.order)
        .map(|d| {
            let num: Vec<_> = (0..=l * d).map(|k| (r(k) * hbar, r(l))).collect();
            let den: Vec<_> = (1..=d)
                .flat_map(|k| std::iter::repeat((r(k) * hbar, Rational::one())).take(m + 1))
                .collect();
            linear_ratio_in_h(&num, &den, m + 1)
        })
        .collect::<Result<_>>()?;
    Ok(assemble_with_exponential(&a, m + 1, &hbar.recip()))
}

/// `S*_X` recovered from the equivariant formula: `(1/lH)·S*_T` at `λ = 0`,
/// `ħ = 1`, which lands modulo `H^m`.
pub fn sx_via_equivariant(cfg: &HypergeomConfig) -> Result<MixedSeries<Rational>> {
    let t = hyper_series_t_at(cfg, &Rational::one())?;
    if !t.component(0).is_zero() {
        return Err(Error::Consistency("S*_T is not divisible by H".into()));
    }
    let inv_l = r(cfg.l).recip();
    let parts = t.parts()[1..]
        .iter()
        .map(|p| p.with_x_cap(cfg.m - 1).scale(&inv_l))
        .collect();
    MixedSeries::from_parts(parts)
}

/// `F(q) = Σ_d q^d ((m+1)d)!/(d!)^{m+1}` and
/// `G_l(q) = Σ_{d≥1} q^d ((m+1)d)!/(d!)^{m+1} Σ_{r=1}^{ld} 1/r`.
pub fn f_and_g(
    m: usize,
    l_index: usize,
    order: usize,
) -> Result<(TruncSeries<Rational>, TruncSeries<Rational>)> {
    if l_index == 0 || l_index > m + 1 {
        return Err(Error::Domain(format!("G_l needs 1 <= l <= m+1, got {l_index}")));
    }
    let mut f = Vec::with_capacity(order + 1);
    let mut g = Vec::with_capacity(order + 1);
    for d in 0..=order {
        let c = Rational::new(
            factorial(((m + 1) * d) as u64),
            num_traits::pow(factorial(d as u64), m + 1),
        );
        let harmonic: Rational = (1..=l_index * d).map(|k| r(k).recip()).sum();
        g.push(&c * harmonic);
        f.push(c);
    }
    Ok((TruncSeries::new(f), TruncSeries::new(g)))
}

/// Smallest `ħ^{-1}` depth that holds `S_{P^m}` through the given order.
pub fn required_hbar_depth(m: usize, order: usize) -> usize {
    (m + 1) * order + m
}

/// `S_{P^m} = Σ_d e^{(H/ħ+d)t} / Π_{r=1}^d (H+rħ)^{m+1}` modulo `H^{m+1}`,
/// with coefficients polynomials in `u = ħ^{-1}`.
pub fn hyper_series_pm(m: usize, order: usize, hbar_depth: usize) -> Result<MixedSeries<Poly>> {
    let need = required_hbar_depth(m, order);
    if hbar_depth < need {
        return Err(Error::Structural(format!(
            "hbar depth {hbar_depth} too small; order {order} needs {need}"
        )));
    }
    let mut out = MixedSeries::<Poly>::zero(m, m, order);
    for d in 0..=order {
        // Π 1/(H+rħ)^{m+1}, with 1/(H+rħ) = Σ_k (-1)^k H^k u^{k+1} / r^{k+1}
        let mut b = TruncSeries::one(m);
        for k in 1..=d {
            let inv_r = r(k).recip();
            let factor = TruncSeries::new(
                (0..=m)
                    .map(|j| {
                        let mut c = num_traits::pow(inv_r.clone(), j + 1);
                        if j % 2 == 1 {
                            c = -c;
                        }
                        Poly::monomial(c, j + 1)
                    })
                    .collect(),
            );
            for _ in 0..=m {
                b = b.mul(&factor)?;
            }
        }
        let mut inv_fact = Rational::one();
        for k in 0..=m {
            if k > 0 {
                inv_fact /= r(k);
            }
            let e = Poly::monomial(inv_fact.clone(), k);
            for j in 0..=m - k {
                let c = b.coeff(j);
                if c.is_zero() {
                    continue;
                }
                let part = out.component_mut(j + k);
                let v = part.coeff(k, d).clone() + &(c.clone() * &e);
                part.set(k, d, v);
            }
        }
    }
    Ok(out)
}

/// `ħ d/dt` on a series with coefficients in `ℚ[ħ^{-1}]`.
pub fn hbar_dt(s: &MixedSeries<Poly>) -> Result<MixedSeries<Poly>> {
    let ds = s.d_dt();
    for part in ds.parts() {
        for (k, d, c) in part.iter() {
            if !c.coeff(0).is_zero() {
                return Err(Error::Structural(format!(
                    "hbar d/dt leaves a positive hbar power at t^{k} q^{d}"
                )));
            }
        }
    }
    Ok(ds.map_coeffs(|c| Poly::new(c.coeffs().get(1..).unwrap_or_default().to_vec())))
}

/// `𝒟 S_{P^m}` with `𝒟 = (ħ d/dt)^{m+1} - e^t`; identically zero through the order.
pub fn pm_operator_residual(m: usize, order: usize, hbar_depth: usize) -> Result<MixedSeries<Poly>> {
    let s = hyper_series_pm(m, order, hbar_depth)?;
    let mut lhs = s.clone();
    for _ in 0..=m {
        lhs = hbar_dt(&lhs)?;
    }
    lhs.sub(&s.shift_q(1))
}

/// `⟨τ_{dm+d-2}(T_m)⟩_d`: the `H^0 t^0 q^d` coefficient of `S_{P^m}`, which is
/// a single monomial `c·ħ^{-(m+1)d}`; returns `c`.
pub fn descendent_value(m: usize, d: usize) -> Result<Rational> {
    if d == 0 {
        return Err(Error::Domain("descendent degree must be positive".into()));
    }
    Ok(descendent_values(m, d, required_hbar_depth(m, d))?.pop().unwrap())
}

/// `⟨τ_{dm+d-2}(T_m)⟩_d` for `d = 1..=order` from one expansion of depth
/// `hbar_depth`.
pub fn descendent_values(m: usize, order: usize, hbar_depth: usize) -> Result<Vec<Rational>> {
    let s = hyper_series_pm(m, order, hbar_depth)?;
    (1..=order)
        .map(|d| {
            let c = s.coeff(0, 0, d);
            let k = (m + 1) * d;
            if c.coeffs().iter().enumerate().any(|(j, a)| j != k && !a.is_zero()) {
                return Err(Error::Consistency(format!(
                    "H^0 q^{d} coefficient is not a pure power of 1/hbar: {c}"
                )));
            }
            Ok(c.coeff(k))
        })
        .collect()
}

/// An indexed family `{Y_i}_{i=0..m}` of `q`-series with `ħ`-rational
/// coefficients at a fixed numeric `λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelatorFamily {
    lambda: Vec<Rational>,
    entries: Vec<TruncSeries<HbarRational>>,
    m: usize,
    l: usize,
}

impl CorrelatorFamily {
    pub fn new(
        lambda: Vec<Rational>,
        entries: Vec<TruncSeries<HbarRational>>,
        l: usize,
    ) -> Result<Self> {
        if lambda.len() < 2 {
            return Err(Error::Domain("need at least two weights".into()));
        }
        check_distinct(&lambda)?;
        if entries.len() != lambda.len() {
            return Err(Error::Structural(format!(
                "{} entries for {} weights",
                entries.len(),
                lambda.len()
            )));
        }
        let order = entries[0].order();
        for (i, e) in entries.iter().enumerate() {
            if e.order() != order {
                return Err(Error::OrderMismatch {
                    left: order,
                    right: e.order(),
                });
            }
            if !e.coeff(0).is_one() {
                return Err(Error::Structural(format!("entry {i} has constant term != 1")));
            }
        }
        let m = lambda.len() - 1;
        Ok(CorrelatorFamily {
            lambda,
            entries,
            m,
            l,
        })
    }

    /// The family `Y_i = 1`.
    pub fn constant_one(lambda: Vec<Rational>, l: usize, order: usize) -> Result<Self> {
        let entries = vec![TruncSeries::one(order); lambda.len()];
        Self::new(lambda, entries, l)
    }

    pub fn lambda(&self) -> &[Rational] {
        &self.lambda
    }

    pub fn entries(&self) -> &[TruncSeries<HbarRational>] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> &TruncSeries<HbarRational> {
        &self.entries[i]
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn order(&self) -> usize {
        self.entries[0].order()
    }

    /// Same weights and degree, new entries.
    pub fn with_entries(&self, entries: Vec<TruncSeries<HbarRational>>) -> Result<Self> {
        Self::new(self.lambda.clone(), entries, self.l)
    }
}

/// The `q^d` coefficient of `Z*_i`:
/// `Π_{r=1}^{ld}(lλ_i + rħ) / Π_α Π_{r=1}^d (λ_i - λ_α + rħ)`.
pub fn zstar_coefficient(lambda: &[Rational], l: usize, i: usize, d: usize) -> Result<HbarRational> {
    let li = r(l) * &lambda[i];
    let num: Vec<_> = (1..=l * d).map(|k| (li.clone(), r(k))).collect();
    let den: Vec<_> = lambda
        .iter()
        .flat_map(|la| (1..=d).map(move |k| (&lambda[i] - la, r(k))))
        .collect();
    HbarRational::from_linear_factors(&num, &den)
}

/// `Z*_i(q, ħ) = Σ_d q^d Π_{r=1}^{ld}(lλ_i+rħ) / Π_α Π_{r=1}^d (λ_i-λ_α+rħ)`.
pub fn zstar_family(cfg: &HypergeomConfig, lambda: &[Rational]) -> Result<CorrelatorFamily> {
    if lambda.len() != cfg.m + 1 {
        return Err(Error::Domain(format!(
            "expected {} weights, got {}",
            cfg.m + 1,
            lambda.len()
        )));
    }
    check_distinct(lambda)?;
    let entries = (0..=cfg.m)
        .map(|i| {
            (0..=cfg.order)
                .map(|d| zstar_coefficient(lambda, cfg.l, i, d))
                .collect::<Result<Vec<_>>>()
                .map(TruncSeries::new)
        })
        .collect::<Result<Vec<_>>>()?;
    CorrelatorFamily::new(lambda.to_vec(), entries, cfg.l)
}

fn check_distinct(lambda: &[Rational]) -> Result<()> {
    let mut sorted = lambda.to_vec();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Domain("weights lambda must be distinct".into()));
    }
    Ok(())
}

/// Rejects weight tuples with accidental coincidences among the special
/// points `(λ_i - λ_j)/n`, `1 ≤ n ≤ bound`: such collisions put the
/// evaluation points of the recursions on top of poles.
pub fn check_lambda(lambda: &[Rational], bound: usize) -> Result<()> {
    check_distinct(lambda).map_err(|_| Error::DegenerateLambda("repeated weight".into()))?;
    let mut points = Vec::new();
    for (i, a) in lambda.iter().enumerate() {
        for (j, b) in lambda.iter().enumerate() {
            if i != j {
                for n in 1..=bound.max(1) {
                    points.push((a - b) / r(n));
                }
            }
        }
    }
    points.sort();
    if let Some(w) = points.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DegenerateLambda(format!(
            "special point {} occurs twice",
            crate::formal_algebra::to_text(&w[0])
        )));
    }
    Ok(())
}

/// Random distinct nonzero weights of small height, `λ_i = s·(i+1) + o_i`,
/// redrawn until [`check_lambda`] accepts them.
pub fn sample_lambda(len: usize, bound: usize, seed: u64) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut p: i64 = rng.gen_range(1..=5);
        if rng.gen_bool(0.5) {
            p = -p;
        }
        let s = Rational::new(p.into(), rng.gen_range(1i64..=3).into());
        let lambda: Vec<Rational> = (0..len)
            .map(|i| {
                let o = Rational::new(
                    rng.gen_range(-6i64..=6).into(),
                    rng.gen_range(1i64..=3).into(),
                );
                &s * r(i + 1) + o
            })
            .collect();
        if lambda.iter().all(|x| !x.is_zero()) && check_lambda(&lambda, bound).is_ok() {
            return lambda;
        }
    }
}

/// `I_b(t)` for `b = 0..h_cap`, the `H`-components of `S*_X`.
pub fn i_components(sx: &MixedSeries<Rational>) -> Vec<BiSeries<Rational>> {
    sx.parts().to_vec()
}
