//! Class-𝒫 data: the numerators `N_id` and the interpolated `E_d(P, ħ)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::formal_algebra::{HbarRational, Poly, Rational};
use crate::hypergeom::CorrelatorFamily;
use crate::report::Report;

use super::phi::phi_polynomiality_report;
use super::recursion::{recursion_coeffs, verify_recursion, Regime};

fn r(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `Σ_k c_k(ħ) P^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct BivariatePoly {
    coeffs: Vec<Poly>,
}

impl BivariatePoly {
    pub fn new(mut coeffs: Vec<Poly>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        BivariatePoly { coeffs }
    }

    pub fn one() -> Self {
        BivariatePoly {
            coeffs: vec![Poly::one()],
        }
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn p_degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Multiplication by `a·P + b(ħ)`.
    pub fn mul_linear(&self, a: &Rational, b: &Poly) -> Self {
        let mut out = vec![Poly::zero(); self.coeffs.len() + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k + 1] = std::mem::take(&mut out[k + 1]) + &c.scale(a);
            out[k] = std::mem::take(&mut out[k]) + &(c.clone() * b);
        }
        Self::new(out)
    }

    /// Exact quotient by `P - root(ħ)`, assuming `root` is a root.
    fn div_by_root(&self, root: &Poly) -> Self {
        let n = self.coeffs.len();
        let mut out = vec![Poly::zero(); n - 1];
        let mut carry = Poly::zero();
        for k in (1..n).rev() {
            carry = self.coeffs[k].clone() + &(carry * root);
            out[k - 1] = carry.clone();
        }
        Self::new(out)
    }

    pub fn eval(&self, p: &Rational, hbar: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * p + c.eval(hbar))
    }
}

/// `N_id(ħ)` for `0 ≤ d ≤ order` and `E_d(P, ħ)` at the family's numeric `λ`.
#[derive(Clone, Debug)]
pub struct ClassPData {
    pub n_table: Vec<Vec<Poly>>,
    pub e_poly: Vec<BivariatePoly>,
}

/// `N_id = [Q^d]y_i · d! · Π_{j≠i} Π_{r=1}^d (λ_i - λ_j + rħ)` with `Q = q/ħ`.
pub fn n_coefficient(y: &CorrelatorFamily, i: usize, d: usize) -> Result<Poly> {
    let lambda = y.lambda();
    let m = y.m();
    let mut factors: Vec<(Rational, Rational)> = lambda
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .flat_map(|(_, lj)| (1..=d).map(move |k| (&lambda[i] - lj, r(k))))
        .collect();
    factors.push((Rational::from_integer(crate::formal_algebra::factorial(d as u64)), Rational::zero()));
    for _ in 0..d {
        factors.push((Rational::zero(), Rational::one()));
    }
    let prod = HbarRational::from_linear_factors(&factors, &[])?;
    let n = y.entry(i).coeff(d).clone() * &prod;
    let p = n
        .as_polynomial()
        .ok_or_else(|| Error::ClassP(format!("N_{i}{d} = {n} is not a polynomial in hbar")))?;
    if p.degree().unwrap_or(0) > (m + 1) * d {
        return Err(Error::ClassP(format!(
            "N_{i}{d} has hbar-degree {} > {}",
            p.degree().unwrap_or(0),
            (m + 1) * d
        )));
    }
    Ok(p.clone())
}

/// Linear factor `a + bħ` as a monic root plus scalar.
enum Linear {
    Scalar(Rational),
    Root(Rational, Rational),
}

fn linear(a: Rational, b: Rational) -> Linear {
    if b.is_zero() {
        Linear::Scalar(a)
    } else {
        Linear::Root(-(a / &b), b)
    }
}

/// `E_d(P)` of `P`-degree `< (m+1)(d+1)` through the nodes `P = λ_i + rħ`,
/// `0 ≤ r ≤ d`, with values `(m+1)λ_i N_ir(ħ) N_i(d-r)(-ħ)`.
///
/// Every Lagrange denominator is a product of linear forms in `ħ`; the sum is
/// brought over their least common multiple `L`, and polynomiality in `ħ`
/// becomes exact divisibility of each `P`-coefficient by `L`.
pub fn interpolate_e(lambda: &[Rational], n_table: &[Vec<Poly>], d: usize) -> Result<BivariatePoly> {
    let m = lambda.len() - 1;
    let nodes: Vec<(usize, usize)> = (0..=m).flat_map(|i| (0..=d).map(move |k| (i, k))).collect();
    let node_poly = |(i, k): (usize, usize)| Poly::linear(lambda[i].clone(), r(k));

    let mut lcm: BTreeMap<Rational, usize> = BTreeMap::new();
    let mut per_node = Vec::with_capacity(nodes.len());
    for &a in &nodes {
        let mut scalar = Rational::one();
        let mut roots: BTreeMap<Rational, usize> = BTreeMap::new();
        for &b in &nodes {
            if a == b {
                continue;
            }
            match linear(&lambda[a.0] - &lambda[b.0], r(a.1) - r(b.1)) {
                Linear::Scalar(c) => {
                    if c.is_zero() {
                        return Err(Error::DegenerateLambda("interpolation nodes collide".into()));
                    }
                    scalar *= c;
                }
                Linear::Root(root, c) => {
                    scalar *= c;
                    *roots.entry(root).or_default() += 1;
                }
            }
        }
        for (root, k) in &roots {
            let e = lcm.entry(root.clone()).or_default();
            *e = (*e).max(*k);
        }
        per_node.push((scalar, roots));
    }

    let mut w = BivariatePoly::one();
    for &b in &nodes {
        w = w.mul_linear(&Rational::one(), &(-node_poly(b)));
    }

    let mut sum: Vec<Poly> = vec![Poly::zero(); nodes.len()];
    for (&a, (scalar, roots)) in nodes.iter().zip(&per_node) {
        let (i, k) = a;
        let value = n_table[i][k].clone() * &n_table[i][d - k].reflect();
        let value = value.scale(&(r(m + 1) * &lambda[i] / scalar));
        if value.is_zero() {
            continue;
        }
        let cofactor = Poly::product_of_linear(lcm.iter().flat_map(|(root, e)| {
            let own = roots.get(root).copied().unwrap_or(0);
            std::iter::repeat((-root.clone(), Rational::one())).take(e - own)
        }));
        let weight = value * &cofactor;
        let basis = w.div_by_root(&node_poly(a));
        for (slot, c) in sum.iter_mut().zip(basis.coeffs()) {
            *slot = std::mem::take(slot) + &(c.clone() * &weight);
        }
    }

    let l_poly = Poly::product_of_linear(
        lcm.iter()
            .flat_map(|(root, e)| std::iter::repeat((-root.clone(), Rational::one())).take(*e)),
    );
    let coeffs = sum
        .into_iter()
        .enumerate()
        .map(|(k, c)| {
            c.div_exact(&l_poly).ok_or_else(|| {
                Error::ClassP(format!("E_{d}: coefficient of P^{k} is not polynomial in hbar"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let e = BivariatePoly::new(coeffs);
    if e.p_degree().unwrap_or(0) > (m + 1) * d + m {
        return Err(Error::ClassP(format!("E_{d} exceeds P-degree {}", (m + 1) * d + m)));
    }
    Ok(e)
}

/// `N_id` for every `i` and `d ≤ order`, then `E_d` for `d ≤ order`.
pub fn classp_extract(y: &CorrelatorFamily, order: usize) -> Result<ClassPData> {
    if order > y.order() {
        return Err(Error::OrderMismatch {
            left: order,
            right: y.order(),
        });
    }
    let n_table = (0..=y.m())
        .map(|i| (0..=order).map(|d| n_coefficient(y, i, d)).collect())
        .collect::<Result<Vec<Vec<Poly>>>>()?;
    let e_poly = (0..=order)
        .into_par_iter()
        .map(|d| interpolate_e(y.lambda(), &n_table, d))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassPData { n_table, e_poly })
}

/// `Π_{r=0}^{(m+1)d} ((m+1)P - rħ)`
pub fn zstar_e_closed_form(m: usize, d: usize) -> BivariatePoly {
    (0..=(m + 1) * d).fold(BivariatePoly::one(), |acc, k| {
        acc.mul_linear(&r(m + 1), &Poly::monomial(-r(k), 1))
    })
}

/// Degree bounds on `N_id`, `N_i0 = 1`, and `E_d` against the closed form,
/// both structurally and at the given `(P, ħ)` points.
pub fn zstar_classp_report(
    y: &CorrelatorFamily,
    order: usize,
    points: &[(Rational, Rational)],
) -> Result<Report> {
    let data = classp_extract(y, order)?;
    let m = y.m();
    let mut report = Report::new();
    let n_fail = data
        .n_table
        .iter()
        .enumerate()
        .find_map(|(i, row)| {
            (!row[0].is_one()).then(|| format!("N_{i}0 = {}", row[0])).or_else(|| {
                row.iter().enumerate().find_map(|(d, p)| {
                    let deg = p.degree().unwrap_or(0);
                    (deg > (m + 1) * d).then(|| format!("deg N_{i}{d} = {deg}"))
                })
            })
        });
    report.push(
        "N_i0 = 1 and deg_hbar N_id <= (m+1)d",
        "y_i = sum_d Q^d N_id / (d! prod_(j!=i) prod_r (lambda_i - lambda_j + r hbar))",
        n_fail,
    );
    let mut e_fail = None;
    for (d, e) in data.e_poly.iter().enumerate() {
        let closed = zstar_e_closed_form(m, d);
        if *e != closed {
            e_fail = Some(format!("E_{d} differs structurally from the closed form"));
            break;
        }
        if let Some((p, h)) = points.iter().find(|(p, h)| e.eval(p, h) != closed.eval(p, h)) {
            e_fail = Some(format!("E_{d} differs at P = {p}, hbar = {h}"));
            break;
        }
        if e.p_degree() != Some((m + 1) * d + 1) {
            e_fail = Some(format!("deg_P E_{d} = {:?}", e.p_degree()));
            break;
        }
    }
    report.push(
        "E_d = prod_(r=0..(m+1)d) ((m+1)P - r hbar), deg_P E_d = (m+1)d+1",
        "E_d^Z* = prod_(r=0)^((m+1)d) ((m+1)P - r hbar)",
        e_fail,
    );
    Ok(report)
}

/// The three class-𝒫 conditions for a Calabi–Yau family: regular
/// numerators `N_id`, the recursion with polynomial remainders, and
/// polynomiality of `Φ` through `z^{z_order} q^{order}`.
pub fn classp_conditions(y: &CorrelatorFamily, order: usize, z_order: usize) -> Result<Report> {
    let (m, l) = (y.m(), y.l());
    if l != m + 1 {
        return Err(Error::Domain(format!("class P is stated for l = m + 1, got m={m}, l={l}")));
    }
    let mut regular = None;
    'scan: for i in 0..=m {
        for d in 0..=order {
            match n_coefficient(y, i, d) {
                Ok(_) => {}
                Err(Error::ClassP(msg)) => {
                    regular = Some(msg);
                    break 'scan;
                }
                Err(e) => return Err(e),
            }
        }
    }
    let mut report = Report::single(
        &format!("N_id in Q[hbar], deg <= (m+1)d, for d <= {order}"),
        "y_i = sum_d Q^d N_id / (d! prod_(j!=i) prod_r (lambda_i - lambda_j + r hbar))",
        regular,
    );
    let c = recursion_coeffs(Regime::CalabiYau, m, l, y.lambda(), order)?;
    report = report.merge(verify_recursion(y, &c, order)?);
    Ok(report.merge(phi_polynomiality_report(y, z_order, order)?))
}
