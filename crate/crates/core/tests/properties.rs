use mirrorlab::formal_algebra::{agree_by_evaluation, BiSeries, HbarRational, Poly, Rational, TruncSeries};
use mirrorlab::mirror_engine::{multiple_cover_invert, multiple_cover_sum};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-30i64..=30, 1i64..=7).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn series_of(order: usize) -> impl Strategy<Value = TruncSeries<Rational>> {
    prop::collection::vec(rational(), order + 1).prop_map(TruncSeries::new)
}

fn three_series() -> impl Strategy<Value = (TruncSeries<Rational>, TruncSeries<Rational>, TruncSeries<Rational>)> {
    (0usize..=7).prop_flat_map(|n| (series_of(n), series_of(n), series_of(n)))
}

fn without_constant(s: TruncSeries<Rational>) -> TruncSeries<Rational> {
    let mut s = s;
    s.coeffs_mut()[0] = Rational::zero();
    s
}

fn with_unit_constant(s: TruncSeries<Rational>) -> TruncSeries<Rational> {
    let mut s = s;
    s.coeffs_mut()[0] = Rational::one();
    s
}

fn poly(max_degree: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(rational(), 1..=max_degree + 1).prop_map(Poly::new)
}

fn nonzero_poly(max_degree: usize) -> impl Strategy<Value = Poly> {
    poly(max_degree).prop_filter("nonzero", |p| !p.is_zero())
}

fn linear_product(max_factors: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec((rational(), 1i64..=4), 0..=max_factors).prop_map(|fs| {
        Poly::product_of_linear(fs.into_iter().map(|(a, b)| (a, Rational::from_integer(b.into()))))
    })
}

fn hbar_rational() -> impl Strategy<Value = HbarRational> {
    (poly(3), linear_product(3)).prop_map(|(n, d)| HbarRational::new(n, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn series_ring_laws((a, b, c) in three_series()) {
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(
            a.mul(&b.add(&c).unwrap()).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
        );
        let one = TruncSeries::one(a.order());
        prop_assert_eq!(a.mul(&one).unwrap(), a.clone());
        prop_assert!(a.sub(&a).unwrap().is_zero());
    }

    #[test]
    fn exp_log_round_trip((a, b, _) in three_series()) {
        let a0 = without_constant(a);
        prop_assert_eq!(a0.exp().unwrap().log().unwrap(), a0.clone());
        let b1 = with_unit_constant(b);
        prop_assert_eq!(b1.log().unwrap().exp().unwrap(), b1.clone());
        // exp turns sums into products
        let c0 = without_constant(b1.sub(&TruncSeries::one(b1.order())).unwrap());
        prop_assert_eq!(
            a0.add(&c0).unwrap().exp().unwrap(),
            a0.exp().unwrap().mul(&c0.exp().unwrap()).unwrap()
        );
    }

    #[test]
    fn reversion_round_trip((a, _, _) in three_series()) {
        let v = with_unit_constant(a);
        let w = v.reversion().unwrap();
        prop_assert!(TruncSeries::reversion_defect(&v, &w).unwrap().is_zero());
        // the inverse of the inverse map is the original one
        prop_assert_eq!(w.reversion().unwrap(), v);
    }

    #[test]
    fn series_inverse((a, b, _) in three_series()) {
        let u = with_unit_constant(a);
        prop_assert_eq!(u.mul(&u.inv().unwrap()).unwrap(), TruncSeries::one(u.order()));
        prop_assert_eq!(b.div(&u).unwrap().mul(&u).unwrap(), b);
    }

    #[test]
    fn bivariate_ring_laws(
        a in prop::collection::vec(rational(), 12),
        b in prop::collection::vec(rational(), 12),
    ) {
        let build = |v: &[Rational]| {
            let mut s = BiSeries::<Rational>::zero(2, 3);
            for (k, c) in v.iter().enumerate() {
                s.set(k / 4, k % 4, c.clone());
            }
            s
        };
        let (x, y) = (build(&a), build(&b));
        prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
        prop_assert_eq!(x.add(&y).unwrap().sub(&y).unwrap(), x);
    }

    #[test]
    fn modular_gcd_matches_euclid(common in linear_product(4), a in nonzero_poly(5), b in nonzero_poly(5)) {
        let (x, y) = (common.clone() * &a, common * &b);
        prop_assert_eq!(Poly::gcd(&x, &y), Poly::gcd_euclid(&x, &y));
    }

    #[test]
    fn exact_division(a in nonzero_poly(8), b in nonzero_poly(8)) {
        let p = a.clone() * &b;
        prop_assert_eq!(p.div_exact(&b), Some(a.clone()));
        let (q, r) = p.divrem(&b).unwrap();
        prop_assert_eq!(q, a);
        prop_assert!(r.is_zero());
    }

    #[test]
    fn hbar_field_laws(f in hbar_rational(), g in hbar_rational(), h in hbar_rational()) {
        prop_assert_eq!(f.clone() + &g, g.clone() + &f);
        prop_assert_eq!(f.clone() * &g, g.clone() * &f);
        prop_assert_eq!(f.clone() * &(g.clone() + &h), f.clone() * &g + f.clone() * &h);
        prop_assert!((f.clone() - &f).is_zero());
        if !g.is_zero() {
            prop_assert_eq!((f.clone() * &g).checked_div(&g).unwrap(), f.clone());
        }
    }

    #[test]
    fn identity_testing_matches_structure(f in hbar_rational(), g in hbar_rational()) {
        let sum = f.clone() + &g;
        prop_assert!(agree_by_evaluation(&sum, &(g.clone() + &f)));
        prop_assert_eq!(agree_by_evaluation(&f, &g), f == g);
    }

    #[test]
    fn multiple_cover_round_trip(n in prop::collection::vec(rational(), 0..10)) {
        prop_assert_eq!(multiple_cover_invert(&multiple_cover_sum(&n)), n);
    }
}
