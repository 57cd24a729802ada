use num_bigint::BigInt;
use num_traits::{One, Zero};
use padic_cf::{
    classify, convergents, evaluate_finite, evaluate_periodic, expand, jp_convergents, jp_expand,
    predicted_profile, approximation_profile, redei_expansion, satisfies_polynomial, verify_valuation_identities,
    AlgorithmId, Classification, Convention, Error, Expansion, MjpExpansion, PadicContext, QpNumber, Rational, Status,
};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-100_000i64..=100_000, 1i64..=100_000)
        .prop_filter("nonzero", |(a, _)| *a != 0)
        .prop_map(|(a, b)| Rational::new(a.into(), b.into()))
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5, 7, 11, 13])
}

fn is_residue(d: i64, p: u64) -> bool {
    let p = p as i64;
    let r = d.rem_euclid(p);
    r != 0 && (1..p).any(|x| (x * x) % p == r)
}

fn is_square(d: i64) -> bool {
    d >= 0 && ((d as f64).sqrt().round() as i64).pow(2) == d
}

/// `(p, D)` with `sqrt(D)` in Q_p.
fn radicand() -> impl Strategy<Value = (u64, i64)> {
    (prime(), -300i64..=300).prop_filter("square root in Q_p", |(p, d)| !is_square(*d) && is_residue(*d, *p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn browkin_family_terminates_on_rationals(x in rational(), p in prime()) {
        for alg in [AlgorithmId::BrowkinI, AlgorithmId::BrowkinII, AlgorithmId::MrST] {
            let e = expand(&QpNumber::from_rational(x.clone()), alg, &alg.context(p).unwrap()).unwrap();
            prop_assert_eq!(e.status(), Status::Finite);
            prop_assert_eq!(evaluate_finite(&e).unwrap(), x.clone());
        }
    }

    #[test]
    fn mrs3_terminates_for_p_at_least_five(x in rational(), p in prop::sample::select(vec![5u64, 7, 11, 13])) {
        let alg = AlgorithmId::Mrs3;
        let e = expand(&QpNumber::from_rational(x.clone()), alg, &alg.context(p).unwrap()).unwrap();
        prop_assert_eq!(e.status(), Status::Finite);
        prop_assert_eq!(evaluate_finite(&e).unwrap(), x);
    }

    #[test]
    fn ruban_rationals_end_finite_or_in_the_lao_tail(x in rational(), p in prime()) {
        let ctx = AlgorithmId::Ruban.context(p).unwrap();
        let q = QpNumber::from_rational(x.clone());
        let e = expand(&q, AlgorithmId::Ruban, &ctx).unwrap();
        match e.status() {
            Status::Finite => prop_assert_eq!(evaluate_finite(&e).unwrap(), x),
            Status::Periodic { period, .. } => {
                prop_assert_eq!(period, 1);
                let tail = Rational::from_integer(p.into()) - Rational::new(BigInt::one(), p.into());
                prop_assert_eq!(e.stored_quotients().last().unwrap(), &tail);
                prop_assert!(evaluate_periodic(&e).unwrap().same_value(&q, &ctx).unwrap());
            }
            Status::Truncated { .. } => prop_assert!(false, "Ruban on a rational hit the budget"),
        }
    }

    #[test]
    fn browkin_one_valuation_identities(x in rational(), p in prime()) {
        let alg = AlgorithmId::BrowkinI;
        let e = expand(&QpNumber::from_rational(x), alg, &alg.context(p).unwrap()).unwrap();
        // a_0 = 0 puts v(A_0) at infinity
        prop_assume!(!e.quotient(0).unwrap().is_zero());
        prop_assert!(verify_valuation_identities(&e, 30));
    }

    #[test]
    fn determinant_identity(x in rational(), p in prime()) {
        let ctx = AlgorithmId::Schneider.context(p).unwrap();
        let e = match expand(&QpNumber::from_rational(x), AlgorithmId::Schneider, &ctx) {
            Err(Error::SchneiderDomain) => return Ok(()),
            r => r.unwrap(),
        };
        let upto = match e.status() {
            Status::Finite => e.len().unwrap() - 1,
            _ => 20,
        };
        let c = convergents(&e, upto).unwrap();
        let mut prod = Rational::one();
        for n in 1..=upto {
            prod *= e.numerator(n).unwrap();
            let det = &c[n].num * &c[n - 1].den - &c[n - 1].num * &c[n].den;
            let sign = if n % 2 == 1 { Rational::one() } else { -Rational::one() };
            prop_assert_eq!(det, sign * &prod);
        }
    }

    #[test]
    fn square_root_profiles_match((p, d) in radicand()) {
        let x = QpNumber::sqrt(d).unwrap();
        for alg in [AlgorithmId::BrowkinI, AlgorithmId::BrowkinII, AlgorithmId::MrST] {
            let ctx = alg.context(p).unwrap().with_budget(40).unwrap();
            let e = expand(&x, alg, &ctx).unwrap();
            let n = match e.status() {
                Status::Truncated { steps } => steps - 2,
                _ => 30,
            };
            prop_assert_eq!(approximation_profile(&e, &x, n).unwrap(), predicted_profile(&e, n).unwrap());
        }
    }

    #[test]
    fn periodic_square_roots_evaluate_back((p, d) in radicand()) {
        let x = QpNumber::sqrt(d).unwrap();
        for alg in [AlgorithmId::BrowkinI, AlgorithmId::BrowkinII, AlgorithmId::MrST] {
            let ctx = alg.context(p).unwrap().with_budget(300).unwrap();
            let e = expand(&x, alg, &ctx).unwrap();
            if let Status::Periodic { .. } = e.status() {
                prop_assert!(evaluate_periodic(&e).unwrap().same_value(&x, &ctx).unwrap());
            }
        }
    }

    #[test]
    fn expansion_json_round_trip(x in rational(), p in prime(), i in 0usize..6) {
        let alg = AlgorithmId::ALL[i];
        let e = match expand(&QpNumber::from_rational(x), alg, &alg.context(p).unwrap().with_budget(50).unwrap()) {
            Err(Error::SchneiderDomain) => return Ok(()),
            r => r.unwrap(),
        };
        let text = serde_json::to_string(&e.to_json()).unwrap();
        let back = Expansion::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(&back, &e);
        prop_assert_eq!(serde_json::to_string(&back.to_json()).unwrap(), text);
    }

    #[test]
    fn classification_json_round_trip((p, d) in radicand(), i in 0usize..6) {
        let alg = AlgorithmId::ALL[i];
        let ctx = alg.context(p).unwrap().with_budget(60).unwrap();
        if let Ok(c) = classify(&QpNumber::sqrt(d).unwrap(), alg, &ctx) {
            prop_assert_eq!(Classification::from_json(&c.to_json()).unwrap(), c);
        }
    }

    #[test]
    fn value_text_round_trip(x in rational(), (_, d) in radicand(), conj in any::<bool>()) {
        let q = QpNumber::from_rational(x);
        prop_assert_eq!(q.to_string().parse::<QpNumber>().unwrap(), q);
        let text = format!("quad:1,3,{d}{}", if conj { ",conj" } else { "" });
        let r: QpNumber = text.parse().unwrap();
        prop_assert_eq!(r.to_string().parse::<QpNumber>().unwrap(), r);
    }

    #[test]
    fn jp_recovers_rational_tuples(xs in prop::collection::vec(rational(), 1..4), p in prime()) {
        let qs: Vec<QpNumber> = xs.iter().cloned().map(QpNumber::from_rational).collect();
        let ctx = PadicContext::new(p, Convention::Balanced).unwrap();
        let e = jp_expand(&qs, &ctx).unwrap();
        prop_assert_eq!(e.status(), Status::Finite);
        let convs = jp_convergents(&e, e.len().unwrap() - 1).unwrap();
        let last = convs.last().unwrap();
        let m = xs.len();
        for (k, x) in xs.iter().enumerate() {
            prop_assert_eq!(&(&last[k] / &last[m]), x);
        }
        prop_assert_eq!(MjpExpansion::from_json(&e.to_json()).unwrap(), e);
    }

    #[test]
    fn redei_square_roots(d in 2i64..200, z in 1i64..20, p in prime()) {
        prop_assume!(!is_square(d) && d != z * z);
        let ctx = PadicContext::new(p, Convention::Balanced).unwrap();
        let (h, db, zb) = (BigInt::zero(), BigInt::from(d), BigInt::from(z));
        let e = redei_expansion(&h, &db, &zb, &ctx).unwrap();
        let q = e.stored_quotients();
        prop_assert_eq!(&q[1], &Rational::new((2 * z).into(), (d - z * z).into()));
        prop_assert_eq!(&q[2], &Rational::from_integer((2 * z).into()));
        // positive D: the expansion converges in R at least
        let x = evaluate_periodic(&e).unwrap();
        prop_assert!(satisfies_polynomial(&x, &h, &db));
    }
}
