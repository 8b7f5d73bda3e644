use num::{BigInt, BigRational, One};
use proptest::prelude::*;

use iwasawa::char_ideal::weierstrass::generator_series;
use iwasawa::char_ideal::{base_change, weierstrass, BaseChange, FractionalIdeal, IdealComponent, LambdaTrunc};
use iwasawa::characters::all_characters;
use iwasawa::exact::{bernoulli_numbers, bernoulli_poly, CycloInt};
use iwasawa::group_ring::{GroupRingElem, LevelGroup};
use iwasawa::padic::{CoeffRing, PadicApprox};
use iwasawa::series::PowerSeries;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// A series over Lambda/(3^6, T^8) whose first unit coefficient sits at index `at`.
fn series(lam: &LambdaTrunc, mut v: Vec<i64>, at: usize, mu: u32) -> PowerSeries {
    for x in v.iter_mut().take(at) {
        *x *= 3;
    }
    v[at] = 3 * v[at] + 1;
    let f = lam.from_ints(&v).unwrap();
    f.scale(&PadicApprox::from_i64(lam.ring(), 3i64.pow(mu)))
}

fn lam() -> LambdaTrunc {
    LambdaTrunc::new(&CoeffRing::new(3, 6, 1).unwrap(), 8).unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-400i64..400, 8)
}

proptest! {
    #[test]
    fn bernoulli_difference(k in 1usize..14, n in -20i64..20, d in 1i64..9) {
        let b = bernoulli_numbers(k);
        let x = rat(n, d);
        let lhs = bernoulli_poly(k, &(&x + BigRational::one()), &b) - bernoulli_poly(k, &x, &b);
        let mut rhs = BigRational::from_integer(BigInt::from(k as u64));
        for _ in 1..k {
            rhs *= &x;
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn norm_is_multiplicative(m in prop::sample::select(vec![5u64, 8, 9, 12]), a in prop::collection::vec(-5i64..5, 6), b in prop::collection::vec(-5i64..5, 6)) {
        let x = CycloInt::from_coeffs(m, a.into_iter().map(BigInt::from).collect());
        let y = CycloInt::from_coeffs(m, b.into_iter().map(BigInt::from).collect());
        prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
        // sigma_a is a ring map
        for s in [1u64, m - 1] {
            prop_assert_eq!((&x * &y).galois(s), &x.galois(s) * &y.galois(s));
        }
    }

    #[test]
    fn padic_matches_integers(p in prop::sample::select(vec![3u64, 5, 7, 37]), a in -100_000i64..100_000, b in -100_000i64..100_000) {
        let ring = CoeffRing::new(p, 4, 1).unwrap();
        let q = (p as i128).pow(4);
        let of = |x: i128| PadicApprox::from_i64(&ring, x.rem_euclid(q) as i64);
        let (x, y) = (PadicApprox::from_i64(&ring, a), PadicApprox::from_i64(&ring, b));
        prop_assert_eq!(x.mul(&y), of(a as i128 * b as i128));
        prop_assert_eq!(x.add(&y), of(a as i128 + b as i128));
        if a.rem_euclid(p as i64) != 0 {
            prop_assert_eq!(x.inv().unwrap().mul(&x), PadicApprox::one(&ring));
        }
    }

    #[test]
    fn unit_series_invert(v in coeffs()) {
        let l = lam();
        let f = series(&l, v, 0, 0);
        prop_assert_eq!(f.mul(&f.inverse().unwrap()), l.one());
    }

    #[test]
    fn canonical_form_is_idempotent(v in coeffs(), at in 0usize..3, mu in 0u32..2) {
        let l = lam();
        let f = series(&l, v, at, mu);
        let w = weierstrass(&f).unwrap();
        prop_assert_eq!(w.lambda(), at);
        prop_assert_eq!(w.mu, mu);
        let g = generator_series(w.mu, &w.dist, l.ring(), l.trunc());
        prop_assert_eq!(IdealComponent::from_series(&g).unwrap(), IdealComponent::from_series(&f).unwrap());
    }

    #[test]
    fn ideals_multiply(a in coeffs(), b in coeffs(), i in 0usize..3, j in 0usize..2) {
        let l = lam();
        let (f, g) = (series(&l, a, i, 0), series(&l, b, j, 1));
        let fg = IdealComponent::from_series(&f.mul(&g)).unwrap();
        let prod = IdealComponent::from_series(&f).unwrap().mul(&IdealComponent::from_series(&g).unwrap());
        prop_assert_eq!(fg.lambda(), (i + j) as i64);
        prop_assert_eq!(fg, prod);
    }

    #[test]
    fn base_change_is_transitive(v in coeffs(), at in 0usize..3) {
        let l = lam();
        let i = FractionalIdeal::single("1", IdealComponent::from_series(&series(&l, v, at, 0)).unwrap());
        let mid = BaseChange::Reduce { prec: 4, trunc: 7 };
        let low = BaseChange::Reduce { prec: 2, trunc: 6 };
        let two_step = base_change(&base_change(&i, &mid).unwrap(), &low).unwrap();
        prop_assert_eq!(two_step, base_change(&i, &low).unwrap());
        prop_assert_eq!(base_change(&i, &BaseChange::Identity).unwrap(), i);
    }

    #[test]
    fn characters_form_a_group(m in 3u64..60, a in 1i64..500, b in 1i64..500) {
        for chi in all_characters(m) {
            prop_assert!(chi.mul(&chi.inverse()).is_trivial());
            prop_assert_eq!(m % chi.conductor(), 0);
            if let (Some(x), Some(y)) = (chi.value(a), chi.value(b)) {
                prop_assert_eq!(chi.value(a * b).unwrap(), &x * &y);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn projection_is_a_ring_map(a in prop::collection::vec(-9i64..9, 108), b in prop::collection::vec(-9i64..9, 108)) {
        let top = LevelGroup::new(7, 3, 3).unwrap();
        let elem = |v: &[i64]| GroupRingElem::from_coeffs(&top, v.iter().map(|&x| rat(x, 3)).take(top.order() as usize).collect());
        let (x, y) = (elem(&a), elem(&b));
        let xy = x.multiply(&y).unwrap();
        prop_assert_eq!(&xy, &y.multiply(&x).unwrap());
        prop_assert_eq!(xy.project(2).unwrap(), x.project(2).unwrap().multiply(&y.project(2).unwrap()).unwrap());
        prop_assert_eq!(x.add(&y).unwrap().project(1).unwrap(), x.project(1).unwrap().add(&y.project(1).unwrap()).unwrap());
    }
}
