//! Polynomial gcd over `ℚ` by images modulo word-size primes, Chinese
//! remaindering and trial division.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::{integer_content, Poly};
use super::rational::Rational;

const MAX_PRIMES: usize = 400;

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller–Rabin for 64-bit integers.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The largest primes below `2^62`, in decreasing order.
fn primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::with_capacity(MAX_PRIMES);
        let mut n = (1u64 << 62) - 1;
        while out.len() < MAX_PRIMES {
            if is_prime(n) {
                out.push(n);
            }
            n -= 2;
        }
        out
    })
}

/// Primitive integer polynomial proportional to `p`.
fn primitive(p: &Poly) -> Vec<BigInt> {
    integer_content(p).1
}

fn reduce(a: &[BigInt], p: u64) -> Vec<u64> {
    let pb = BigInt::from(p);
    let mut v: Vec<u64> = a
        .iter()
        .map(|c| c.mod_floor(&pb).to_u64().expect("residue fits"))
        .collect();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// Remainder of `a` by `b` modulo `p`, `b` nonzero.
fn rem_mod(mut a: Vec<u64>, b: &[u64], p: u64) -> Vec<u64> {
    let db = b.len() - 1;
    let inv = inv_mod(b[db], p);
    while a.len() > db {
        let top = a.len() - 1;
        let c = mul_mod(a[top], inv, p);
        if c != 0 {
            let shift = top - db;
            for (j, bc) in b.iter().enumerate() {
                let t = mul_mod(c, *bc, p);
                a[shift + j] = (a[shift + j] + p - t) % p;
            }
        }
        a.pop();
        while a.last() == Some(&0) {
            a.pop();
        }
    }
    a
}

fn monic_gcd_mod(a: Vec<u64>, b: Vec<u64>, p: u64) -> Vec<u64> {
    let (mut a, mut b) = (a, b);
    while !b.is_empty() {
        let r = rem_mod(a, &b, p);
        a = b;
        b = r;
    }
    let inv = inv_mod(*a.last().expect("nonzero gcd"), p);
    a.iter().map(|c| mul_mod(*c, inv, p)).collect()
}

/// `a / b` over `ℤ` when `b` divides `a` there, `b` primitive.
pub(super) fn exact_quotient(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let db = b.len() - 1;
    if a.len() < b.len() {
        return a.iter().all(Zero::is_zero).then(Vec::new);
    }
    let mut rem = a.to_vec();
    let mut quot = vec![BigInt::zero(); a.len() - db];
    let lead = &b[db];
    for k in (0..quot.len()).rev() {
        let (q, r) = rem[k + db].div_rem(lead);
        if !r.is_zero() {
            return None;
        }
        if !q.is_zero() {
            for (j, bc) in b.iter().enumerate() {
                rem[k + j] -= &q * bc;
            }
        }
        quot[k] = q;
    }
    rem.iter().all(Zero::is_zero).then_some(quot)
}

fn divides(b: &[BigInt], a: &[BigInt]) -> bool {
    exact_quotient(a, b).is_some()
}

fn symmetric(c: &BigInt, modulus: &BigInt, half: &BigInt) -> BigInt {
    if c > half {
        c - modulus
    } else {
        c.clone()
    }
}

/// Monic gcd of two nonconstant polynomials, or `None` if the prime budget
/// runs out.
pub(super) fn gcd_modular(a: &Poly, b: &Poly) -> Option<Poly> {
    let (ai, bi) = (primitive(a), primitive(b));
    let lc = ai.last()?.gcd(bi.last()?);
    let mut best: Option<(usize, Vec<BigInt>, BigInt)> = None;
    let mut previous: Option<Vec<BigInt>> = None;
    for &p in primes() {
        let (ap, bp) = (reduce(&ai, p), reduce(&bi, p));
        if ap.len() != ai.len() || bp.len() != bi.len() {
            continue;
        }
        let g = monic_gcd_mod(ap, bp, p);
        let deg = g.len() - 1;
        if deg == 0 {
            return Some(Poly::one());
        }
        let lcp = lc.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits");
        let g: Vec<u64> = g.iter().map(|c| mul_mod(*c, lcp, p)).collect();
        match &mut best {
            Some((d, _, _)) if deg > *d => continue,
            Some((d, crt, modulus)) if deg == *d => {
                let pb = BigInt::from(p);
                let m_inv = BigInt::from(inv_mod(modulus.mod_floor(&pb).to_u64().expect("residue fits"), p));
                for (c, gp) in crt.iter_mut().zip(&g) {
                    let delta = (BigInt::from(*gp) - &*c).mod_floor(&pb) * &m_inv % &pb;
                    *c += &*modulus * delta;
                }
                *modulus *= &pb;
            }
            _ => {
                best = Some((deg, g.iter().map(|c| BigInt::from(*c)).collect(), BigInt::from(p)));
                previous = None;
                continue;
            }
        }
        let (_, crt, modulus) = best.as_ref().expect("set above");
        let half: BigInt = modulus / 2;
        let lifted: Vec<BigInt> = crt.iter().map(|c| symmetric(c, modulus, &half)).collect();
        if previous.as_ref() == Some(&lifted) {
            let content = lifted.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
            let mut h: Vec<BigInt> = lifted.iter().map(|c| c / &content).collect();
            if h.last().is_some_and(|c| c.is_negative()) {
                h.iter_mut().for_each(|c| *c = -&*c);
            }
            if divides(&h, &ai) && divides(&h, &bi) {
                let lead = Rational::from_integer(h.last().expect("nonzero").clone());
                return Some(Poly::new(
                    h.into_iter().map(|c| Rational::from_integer(c) / &lead).collect(),
                ));
            }
        }
        previous = Some(lifted);
    }
    None
}
