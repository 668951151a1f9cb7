//! The three regimes of the correspondence between `S*_X` and `S_X`:
//! operator identities for `l < m` and `l = m`, and the mirror map for the
//! Calabi–Yau case `l = m + 1`, including extraction of the quintic
//! invariants `N_d` and the virtual counts `n_d`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::formal_algebra::{
    factorial, mixed_substitute, to_text, BiSeries, MixedSeries, Rational, TruncSeries,
};
use crate::hypergeom::{f_and_g, hyper_series_sx, HypergeomConfig};
use crate::report::Report;

fn r(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `a·(d/dt) s + b·e^t s + c·s`
fn linear_op(
    s: &MixedSeries<Rational>,
    a: &Rational,
    b: &Rational,
    c: &Rational,
) -> Result<MixedSeries<Rational>> {
    let mut out = s.d_dt().scale(a);
    if !b.is_zero() {
        out = out.add(&s.shift_q(1).scale(b))?;
    }
    if !c.is_zero() {
        out = out.add(&s.scale(c))?;
    }
    Ok(out)
}

fn compare_mixed(
    identity: &str,
    anchor: &str,
    lhs: &MixedSeries<Rational>,
    rhs: &MixedSeries<Rational>,
) -> Report {
    let failure = lhs.first_difference(rhs).map(|(i, k, d)| {
        format!(
            "H^{i} t^{k} q^{d}: lhs = {}, rhs = {}",
            to_text(lhs.coeff(i, k, d)),
            to_text(rhs.coeff(i, k, d))
        )
    });
    Report::single(identity, anchor, failure)
}

fn compare_bi(identity: &str, anchor: &str, lhs: &BiSeries<Rational>, rhs: &BiSeries<Rational>) -> Report {
    let failure = lhs.first_difference(rhs).map(|(k, d)| {
        format!(
            "t^{k} q^{d}: lhs = {}, rhs = {}",
            to_text(lhs.coeff(k, d)),
            to_text(rhs.coeff(k, d))
        )
    });
    Report::single(identity, anchor, failure)
}

const CASE_I_ANCHOR: &str = "H^m = l^l q H^(l-1)";

/// `D^m S = l e^t Π_{r=1}^{l-1}(lD + r) S` modulo `H^m` for a given series.
pub fn case_i_check_series(cfg: &HypergeomConfig, s: &MixedSeries<Rational>) -> Result<Report> {
    let (m, l) = (cfg.m(), cfg.l());
    let zero = Rational::zero();
    let mut lhs = s.clone();
    for _ in 0..m {
        lhs = linear_op(&lhs, &Rational::one(), &zero, &zero)?;
    }
    let mut rhs = s.clone();
    for k in 1..l {
        rhs = linear_op(&rhs, &r(l), &zero, &r(k))?;
    }
    rhs = rhs.shift_q(1).scale(&r(l));
    Ok(compare_mixed(
        &format!("case i: D^{m} S = {l} e^t prod_(r<{l}) ({l}D + r) S  (m={m}, l={l})"),
        CASE_I_ANCHOR,
        &lhs,
        &rhs,
    ))
}

/// Case `l < m`: `S_X = S*_X`, checked through its differential equation.
pub fn case_i_check(cfg: &HypergeomConfig) -> Result<Report> {
    if cfg.l() >= cfg.m() {
        return Err(Error::Domain(format!(
            "case i needs l < m, got m={}, l={}",
            cfg.m(),
            cfg.l()
        )));
    }
    let s = hyper_series_sx(&HypergeomConfig::hypersurface(cfg.m(), cfg.l(), cfg.order())?)?;
    case_i_check_series(cfg, &s)
}

/// `e^{-m! q}` through the given order.
pub fn case_ii_prefactor(m: usize, order: usize) -> Result<TruncSeries<Rational>> {
    let c = -Rational::from_integer(factorial(m as u64));
    TruncSeries::monomial(c, 1, order).exp()
}

const CASE_II_ANCHOR: &str = "(H + m! q)^m = m^m q (H + m! q)^(m-1)";

/// `(D + m! e^t)^m S = m e^t Π_{r=1}^{m-1}(mD + m·m! e^t + r) S` for a given series.
pub fn case_ii_check_series(cfg: &HypergeomConfig, s: &MixedSeries<Rational>) -> Result<Report> {
    let m = cfg.m();
    let mf = Rational::from_integer(factorial(m as u64));
    let zero = Rational::zero();
    let mut lhs = s.clone();
    for _ in 0..m {
        lhs = linear_op(&lhs, &Rational::one(), &mf, &zero)?;
    }
    let mut rhs = s.clone();
    let mmf = r(m) * &mf;
    for k in 1..m {
        rhs = linear_op(&rhs, &r(m), &mmf, &r(k))?;
    }
    rhs = rhs.shift_q(1).scale(&r(m));
    Ok(compare_mixed(
        &format!("case ii: (D + {m}! e^t)^{m} S = {m} e^t prod_(r<{m}) ({m}D + {m}*{m}! e^t + r) S"),
        CASE_II_ANCHOR,
        &lhs,
        &rhs,
    ))
}

/// Case `l = m`: returns `S_X = e^{-m! e^t} S*_X` and checks its equation.
pub fn case_ii_transform(cfg: &HypergeomConfig) -> Result<(MixedSeries<Rational>, Report)> {
    if cfg.l() != cfg.m() {
        return Err(Error::Domain(format!(
            "case ii needs l = m, got m={}, l={}",
            cfg.m(),
            cfg.l()
        )));
    }
    let sx = hyper_series_sx(&HypergeomConfig::hypersurface(cfg.m(), cfg.l(), cfg.order())?)?;
    let s = sx.mul_q_series(&case_ii_prefactor(cfg.m(), cfg.order())?)?;
    let report = case_ii_check_series(cfg, &s)?;
    Ok((s, report))
}

/// `D^m I = (m+1) e^t Π_{r=1}^m ((m+1)D + r) I` for a given series.
pub fn picard_fuchs_check_series(m: usize, s: &MixedSeries<Rational>) -> Result<Report> {
    let zero = Rational::zero();
    let mut lhs = s.clone();
    for _ in 0..m {
        lhs = linear_op(&lhs, &Rational::one(), &zero, &zero)?;
    }
    let mut rhs = s.clone();
    for k in 1..=m {
        rhs = linear_op(&rhs, &r(m + 1), &zero, &r(k))?;
    }
    rhs = rhs.shift_q(1).scale(&r(m + 1));
    let n = m + 1;
    Ok(compare_mixed(
        &format!("Picard-Fuchs: D^{m} I_b = {n} e^t prod_(r=1..{m}) ({n}D + r) I_b, all b"),
        "D^4 I = 5 e^t (5D+1)(5D+2)(5D+3)(5D+4) I",
        &lhs,
        &rhs,
    ))
}

/// The Calabi–Yau equation on every `I_b`, `l = m + 1`.
pub fn picard_fuchs_check(m: usize, order: usize) -> Result<Report> {
    let s = hyper_series_sx(&HypergeomConfig::hypersurface(m, m + 1, order)?)?;
    picard_fuchs_check_series(m, &s)
}

/// `T = t + g(e^t)` and the inverse `q = q'·h(q')`.
#[derive(Clone, Debug, PartialEq)]
pub struct MirrorMap {
    pub g: TruncSeries<Rational>,
    pub h: TruncSeries<Rational>,
}

impl MirrorMap {
    /// `q'·h(q')·exp(g(q'·h(q'))) / q' - 1`, zero when `h` inverts the map.
    pub fn round_trip_defect(&self) -> Result<TruncSeries<Rational>> {
        TruncSeries::reversion_defect(&self.g.exp()?, &self.h)
    }
}

/// `g = (m+1)(G_{m+1} - G_1)/F`, `h` = reversion of `exp(g)`.
pub fn mirror_map_build(m: usize, order: usize) -> Result<MirrorMap> {
    let (f, g_top) = f_and_g(m, m + 1, order)?;
    let (_, g_one) = f_and_g(m, 1, order)?;
    let g = g_top.sub(&g_one)?.scale(&r(m + 1)).div(&f)?;
    let h = g.exp()?.reversion()?;
    Ok(MirrorMap { g, h })
}

/// `J_b = I_b / I_0` for the Calabi–Yau hypersurface in `P^m`.
pub fn normalized_sx(m: usize, order: usize) -> Result<MixedSeries<Rational>> {
    let sx = hyper_series_sx(&HypergeomConfig::hypersurface(m, m + 1, order)?)?;
    let i0 = sx.component(0);
    for k in 1..=i0.x_cap() {
        if !i0.x_row(k).is_zero() {
            return Err(Error::Consistency("I_0 depends on t".into()));
        }
    }
    sx.mul_q_series(&i0.x_row(0).inv()?)
}

/// `S_X` in the mirror coordinates `(T, q' = e^T)`.
pub fn transformed_sx(m: usize, order: usize) -> Result<(MirrorMap, MixedSeries<Rational>)> {
    let map = mirror_map_build(m, order)?;
    let s = mixed_substitute(&normalized_sx(m, order)?, &map.g)?;
    Ok((map, s))
}

/// Genus-0 invariants `N_d` and virtual counts `n_d`, `d = 1..=degree_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantTable {
    pub degree_max: usize,
    pub big_n: Vec<Rational>,
    pub n: Vec<Rational>,
}

impl InvariantTable {
    pub fn from_big_n(big_n: Vec<Rational>) -> Self {
        let n = multiple_cover_invert(&big_n);
        InvariantTable {
            degree_max: big_n.len(),
            big_n,
            n,
        }
    }

    /// Rows `(d, N_d, n_d)`.
    pub fn rows(&self) -> impl Iterator<Item = (usize, &Rational, &Rational)> {
        self.big_n
            .iter()
            .zip(&self.n)
            .enumerate()
            .map(|(k, (a, b))| (k + 1, a, b))
    }

    /// Degrees whose virtual count is not an integer.
    pub fn non_integral(&self) -> Vec<usize> {
        self.rows()
            .filter(|(_, _, n)| !n.is_integer())
            .map(|(d, _, _)| d)
            .collect()
    }
}

/// Solves `N_d = Σ_{k|d} n_{d/k} k^{-3}` for `n`; index 0 holds degree 1.
pub fn multiple_cover_invert(big_n: &[Rational]) -> Vec<Rational> {
    let mut n: Vec<Rational> = Vec::with_capacity(big_n.len());
    for d in 1..=big_n.len() {
        let mut v = big_n[d - 1].clone();
        for k in 2..=d {
            if d % k == 0 {
                v -= &n[d / k - 1] / r(k * k * k);
            }
        }
        n.push(v);
    }
    n
}

/// `N_d = Σ_{k|d} n_{d/k} k^{-3}`.
pub fn multiple_cover_sum(n: &[Rational]) -> Vec<Rational> {
    (1..=n.len())
        .map(|d| {
            (1..=d)
                .filter(|k| d % k == 0)
                .map(|k| &n[d / k - 1] / r(k * k * k))
                .sum()
        })
        .collect()
}

/// Reads `N_d` off the `H^2` component `T^2/2 + (1/5) Σ d N_d q'^d`.
fn extract_quintic(s: &MixedSeries<Rational>) -> Result<Vec<Rational>> {
    let h2 = s.component(2);
    let (_, t_cap, order) = s.caps();
    for k in 1..=t_cap {
        for d in 0..=order {
            let expect = if k == 2 && d == 0 {
                Rational::new(1.into(), 2.into())
            } else {
                Rational::zero()
            };
            if h2.coeff(k, d) != &expect {
                return Err(Error::Consistency(format!(
                    "H^2 component has unexpected T^{k} q'^{d} coefficient {}",
                    to_text(h2.coeff(k, d))
                )));
            }
        }
    }
    if !h2.coeff(0, 0).is_zero() {
        return Err(Error::Consistency("H^2 component has a constant term".into()));
    }
    Ok((1..=order).map(|d| h2.coeff(0, d) * r(5) / r(d)).collect())
}

/// The quintic pipeline: `J_b = I_b/I_0`, mirror change of variables,
/// `N_d` from the `H^2` component, `n_d` by multiple-cover inversion.
pub fn quintic_invariants(order: usize) -> Result<InvariantTable> {
    if order == 0 {
        return Ok(InvariantTable::from_big_n(Vec::new()));
    }
    let (_, s) = transformed_sx(4, order)?;
    Ok(InvariantTable::from_big_n(extract_quintic(&s)?))
}

/// `S_X = 1 + TH + (1/5)(dℱ/dT)H^2 + ((1/5)T dℱ/dT - (2/5)ℱ)H^3` against the
/// transformed series, with `N_d` taken from `table`.
pub fn quintic_closed_form_check(order: usize, table: &InvariantTable) -> Result<Report> {
    let (_, s) = transformed_sx(4, order)?;
    let (_, t_cap, q_cap) = s.caps();
    let big_n = |d: usize| table.big_n.get(d - 1).cloned().unwrap_or_else(Rational::zero);
    let mut expect = MixedSeries::<Rational>::zero(3, t_cap, q_cap);
    expect.component_mut(0).set(0, 0, Rational::one());
    expect.component_mut(1).set(1, 0, Rational::one());
    expect.component_mut(2).set(2, 0, Rational::new(1.into(), 2.into()));
    expect.component_mut(3).set(3, 0, Rational::new(1.into(), 6.into()));
    for d in 1..=q_cap {
        let nd = big_n(d);
        expect.component_mut(2).set(0, d, &nd * r(d) / r(5));
        expect.component_mut(3).set(1, d, &nd * r(d) / r(5));
        expect.component_mut(3).set(0, d, -(&nd * r(2)) / r(5));
    }
    let anchor = "S_X = 1 + TH + (1/5) dF/dT H^2 + ((1/5) T dF/dT - (2/5) F) H^3";
    let mut report = Report::new();
    for (b, name) in [(0, "H^0 = 1"), (1, "H^1 = T"), (2, "H^2 = (1/5) dF/dT"), (3, "H^3 = (1/5)T dF/dT - (2/5)F")] {
        let part = compare_bi(
            &format!("quintic transformed S_X: {name}"),
            anchor,
            s.component(b),
            expect.component(b),
        );
        report = report.merge(part);
    }
    Ok(report)
}

/// `ℱ(T(t)) = (5/2)(J_1 J_2 - J_3)` with `ℱ = 5T^3/6 + Σ N_d e^{dT}` and
/// `T = t + g(e^t)`, comparing as series in `(t, q = e^t)`.
pub fn mirror_identity_check_with(order: usize, table: &InvariantTable) -> Result<Report> {
    let j = normalized_sx(4, order)?;
    let map = mirror_map_build(4, order)?;
    let t_cap = 3;
    let rhs = j
        .component(1)
        .mul(j.component(2))?
        .sub(j.component(3))?
        .scale(&Rational::new(5.into(), 2.into()));
    // T = t + g(q)
    let mut big_t = BiSeries::from_q_series(&map.g, t_cap);
    big_t.set(1, 0, Rational::one());
    let mut lhs = big_t.pow(3).scale(&Rational::new(5.into(), 6.into()));
    for d in 1..=order {
        let nd = table.big_n.get(d - 1).cloned().unwrap_or_else(Rational::zero);
        if nd.is_zero() {
            continue;
        }
        // e^{dT} = q^d exp(d·g(q))
        let e = map.g.scale(&r(d)).exp()?.shift(d).scale(&nd);
        lhs = lhs.add(&BiSeries::from_q_series(&e, t_cap))?;
    }
    Ok(compare_bi(
        "F(T(t)) = (5/2)(I1 I2 / I0^2 - I3 / I0)",
        "F = 5T^3/6 + sum N_d e^(dT)",
        &lhs,
        &rhs,
    ))
}

/// `g(q) = 770q + …` for the quintic, and `q = q'h(q')` inverts `q' = q e^{g(q)}`.
pub fn quintic_mirror_map_check(order: usize) -> Result<Report> {
    let map = mirror_map_build(4, order)?;
    let mut report = Report::new();
    let first = (order >= 1 && map.g.coeff(1) != &r(770))
        .then(|| format!("q^1: g = {}", to_text(map.g.coeff(1))));
    report.push("quintic mirror map: [q^1] g = 770", "T = I1/I0 = t + g(e^t)", first);
    let defect = map.round_trip_defect()?;
    let round = (0..=defect.order())
        .find(|&d| !defect.coeff(d).is_zero())
        .map(|d| format!("q^{d}: defect {}", to_text(defect.coeff(d))));
    report.push(
        &format!("q' h(q') exp(g(q' h(q'))) = q' through q^{order}"),
        "T = t + g(e^t)",
        round,
    );
    Ok(report)
}

/// The mirror map, the mirror identity and the closed form of the
/// transformed series.
pub fn mirror_identity_check(order: usize) -> Result<Report> {
    let table = quintic_invariants(order)?;
    Ok(quintic_mirror_map_check(order)?
        .merge(mirror_identity_check_with(order, &table)?)
        .merge(quintic_closed_form_check(order, &table)?))
}
