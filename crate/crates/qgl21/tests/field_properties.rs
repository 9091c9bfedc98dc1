//! Property tests for the exact scalar field and the q-number helpers.

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use qgl21::{qfact, qint, qpow, HalfInt, QScalar};

fn laurent(terms: &[(i64, i64)]) -> QScalar {
    terms.iter().fold(QScalar::zero(), |acc, &(c, k)| {
        &acc + &QScalar::monomial(BigRational::from_integer(BigInt::from(c)), k)
    })
}

fn scalar() -> impl Strategy<Value = QScalar> {
    let terms = || prop::collection::vec((-5i64..=5, -6i64..=6), 1..4);
    (terms(), terms())
        .prop_filter_map("zero denominator", |(n, d)| laurent(&n).checked_div(&laurent(&d)))
}

fn nonzero() -> impl Strategy<Value = QScalar> {
    scalar().prop_filter("nonzero", |x| !x.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn addition_is_commutative_and_associative(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
    }

    #[test]
    fn multiplication_is_commutative_and_associative(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn multiplication_distributes(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn identities_and_inverses(a in scalar(), b in nonzero()) {
        prop_assert_eq!(&a + &QScalar::zero(), a.clone());
        prop_assert_eq!(&a * &QScalar::one(), a.clone());
        prop_assert!((&a - &a).is_zero());
        prop_assert!((&a + &-&a).is_zero());
        prop_assert!((&b * &b.inv().unwrap()).is_one());
        prop_assert_eq!(&(&a * &b).checked_div(&b).unwrap(), &a);
    }

    #[test]
    fn canonical_text_round_trips(a in scalar()) {
        let text = a.to_string();
        prop_assert_eq!(text.parse::<QScalar>().unwrap(), a.clone());
        // Equal values print identically.
        let again = &(&a * &QScalar::q()) * &QScalar::q().inv().unwrap();
        prop_assert_eq!(again.to_string(), text);
    }

    #[test]
    fn qint_is_odd_and_additive(m in -12i64..=12, n in -12i64..=12) {
        prop_assert_eq!(qint(-m), -qint(m));
        let q = |k: i64| qpow(HalfInt::from_int(k));
        prop_assert_eq!(qint(m + n), &(&q(n) * &qint(m)) + &(&q(-m) * &qint(n)));
    }

    #[test]
    fn qpow_is_additive(a in -40i64..=40, b in -40i64..=40) {
        let (ha, hb) = (HalfInt::from_twice(a), HalfInt::from_twice(b));
        prop_assert_eq!(&qpow(ha) * &qpow(hb), qpow(ha + hb));
    }

    #[test]
    fn qint_at_q_equal_one_is_the_integer(n in -15i64..=15) {
        let one = BigRational::from_integer(BigInt::from(1));
        prop_assert_eq!(qint(n).eval_at(&one).unwrap(), BigRational::from_integer(BigInt::from(n)));
    }
}

#[test]
fn qfact_recursion() {
    assert!(qfact(0).is_one());
    for n in 1..8u32 {
        assert_eq!(qfact(n), &qfact(n - 1) * &qint(i64::from(n)));
    }
}

#[test]
fn canonical_form_of_q_two() {
    assert_eq!(qint(2).to_string(), "(z^2 + z^-2)/(1)");
}
