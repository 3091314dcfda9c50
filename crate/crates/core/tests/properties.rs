use std::collections::HashMap;
use std::sync::Arc;

use gl3q::scalar::{parse_scalar, CycNumber, Domain, Param, Rat, Scalar};
use gl3q::tensor::{decompose, recompose, Tensor3, Variance};
use proptest::prelude::*;

fn dom() -> Arc<Domain> {
    Domain::new(12, vec![Param::new("u", 1), Param::new("v", 2)])
}

/// Σ c·ζ₁₂^e·u^a·v^b over a small set of terms, optionally divided by 1 + k·u.
fn build(terms: &[(i64, i64, i64, i64)], den: Option<i64>) -> Scalar {
    let d = dom();
    let u = Scalar::param(&d, "u").unwrap();
    let v = Scalar::param(&d, "v").unwrap();
    let mut acc = Scalar::zero(&d);
    for &(c, e, a, b) in terms {
        let z = Scalar::root_of_unity(&d, 12, e).unwrap();
        acc = acc + Scalar::from_ratio(&d, c, 1 + e.abs()) * z * u.pow(a).unwrap() * v.pow(b).unwrap();
    }
    match den {
        Some(k) => acc.checked_div(&(Scalar::one(&d) + Scalar::from_int(&d, k) * u)).unwrap(),
        None => acc,
    }
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (
        prop::collection::vec((-6i64..=6, 0i64..12, -2i64..=2, 0i64..=2), 0..4),
        prop::option::of(1i64..=3),
    )
        .prop_map(|(t, d)| build(&t, d))
}

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    #[allow(clippy::eq_op)]
    fn ring_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &Scalar::one(&dom()), a.clone());
    }

    #[test]
    fn inverses(a in scalar()) {
        prop_assume!(!a.is_zero());
        prop_assert!((&a * &a.inv().unwrap()).is_one());
        prop_assert!(Scalar::zero(&dom()).inv().is_err());
    }

    #[test]
    fn render_parses_back(a in scalar()) {
        let text = a.render();
        prop_assert_eq!(parse_scalar(&text, &dom()).unwrap(), a);
    }

    #[test]
    fn specialization_is_a_homomorphism(
        a in scalar(),
        b in scalar(),
        un in 2i64..40,
        ud in 41i64..80,
        vn in 2i64..40,
    ) {
        let pt: HashMap<String, Rat> = [("u".to_string(), rat(un, ud)), ("v".to_string(), rat(vn, 7))].into();
        let (Ok(sa), Ok(sb)) = (a.specialize(&pt), b.specialize(&pt)) else { return Ok(()) };
        prop_assert_eq!((&a * &b).specialize(&pt).unwrap(), &sa * &sb);
        prop_assert_eq!((&a + &b).specialize(&pt).unwrap(), &sa + &sb);
    }

    #[test]
    fn galois_action_is_multiplicative(
        x in prop::collection::vec(-5i64..=5, 4),
        y in prop::collection::vec(-5i64..=5, 4),
        k in prop::sample::select(vec![1i64, 5, 7, 11]),
    ) {
        let c = |v: &[i64]| CycNumber::from_coeffs(12, v.iter().map(|&n| rat(n, 1)).collect());
        let (a, b) = (c(&x), c(&y));
        prop_assert_eq!(a.mul(&b).galois(k), a.galois(k).mul(&b.galois(k)));
    }

    #[test]
    fn decomposition_round_trips(entries in prop::collection::vec(prop::option::of(scalar()), 27), upper in any::<bool>()) {
        let d = dom();
        let variance = if upper { Variance::Upper } else { Variance::Lower };
        let t = Tensor3 { v: entries.into_iter().map(|e| e.unwrap_or_else(|| Scalar::zero(&d))).collect(), variance };
        let parts = decompose(&t);
        prop_assert!(parts.s.trace().is_zero());
        prop_assert!(parts.t.trace().is_zero());
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    prop_assert_eq!(parts.phi.get(i, j, k), parts.phi.get(j, k, i));
                    prop_assert_eq!(parts.phi.get(i, j, k), parts.phi.get(j, i, k));
                }
            }
        }
        prop_assert_eq!(recompose(&parts), t);
    }
}
