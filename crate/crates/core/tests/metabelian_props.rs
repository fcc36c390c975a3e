mod common;

use proptest::prelude::*;
use provar_core::metabelian::*;
use provar_core::Word;
use rand::Rng;

use common::{is_prime, random_word, route_image as oracle_image, route_name, rng, smallest_primitive_root, Magnus};

fn w(s: &str) -> Word {
    Word::parse(s, 2).unwrap()
}

/// An element of the second derived subgroup.
fn double_commutator(r: &mut rand_chacha::ChaCha8Rng) -> Word {
    let c1 = random_word(r, 2, 1, 5).commutator(&random_word(r, 2, 1, 5)).unwrap();
    let c2 = random_word(r, 2, 1, 5).commutator(&random_word(r, 2, 1, 5)).unwrap();
    c1.commutator(&c2).unwrap()
}

/// Zero row and column sums and zero endpoint, but a nonzero flow in general.
fn balanced_word(r: &mut rand_chacha::ChaCha8Rng) -> Word {
    let c = w("abAB");
    let square = c
        .mul(&c.conjugate_by(&w("a")).unwrap().inverse())
        .unwrap()
        .mul(&c.conjugate_by(&w("b")).unwrap().inverse())
        .unwrap()
        .mul(&c.conjugate_by(&w("ab")).unwrap())
        .unwrap();
    let mut out = Word::identity(2).unwrap();
    for _ in 0..r.gen_range(1..3) {
        let piece = square.conjugate_by(&random_word(r, 2, 0, 3)).unwrap();
        out = out.mul(if r.gen_bool(0.5) { &piece } else { &square }).unwrap();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]
    #[test]
    fn flow_is_a_crossed_homomorphism(seed in any::<u64>()) {
        let mut r = rng(seed);
        let u = random_word(&mut r, 2, 0, 12);
        let v = random_word(&mut r, 2, 0, 12);
        let fu = flow_of(&u).unwrap();
        let fv = flow_of(&v).unwrap();
        let expected = fu.add(&fv.translate(fu.endpoint.0, fu.endpoint.1));
        prop_assert_eq!(flow_of(&u.mul(&v).unwrap()).unwrap(), expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]
    #[test]
    fn equality_matches_magnus_embedding(seed in any::<u64>()) {
        let mut r = rng(seed);
        let u = random_word(&mut r, 2, 0, 10);
        let v = if r.gen_bool(0.5) { u.mul(&double_commutator(&mut r)).unwrap() } else { random_word(&mut r, 2, 0, 10) };
        let eq = metab_equal(&u, &v).unwrap();
        prop_assert_eq!(eq, Magnus::of(&u) == Magnus::of(&v));
        // congruence
        let z = random_word(&mut r, 2, 0, 6);
        prop_assert_eq!(metab_equal(&u.mul(&z).unwrap(), &v.mul(&z).unwrap()).unwrap(), eq);
        prop_assert_eq!(metab_equal(&z.mul(&u).unwrap(), &z.mul(&v).unwrap()).unwrap(), eq);
    }

    #[test]
    fn witnesses_are_verified_and_first_in_search_order(seed in any::<u64>()) {
        let mut r = rng(seed);
        let u = random_word(&mut r, 2, 1, 12);
        prop_assume!(!flow_of(&u).unwrap().is_zero());
        let wit = separating_witness(&u, DEFAULT_WITNESS_PRIME_LIMIT).unwrap();
        let (p, q) = (wit.p_u64().unwrap(), u64::try_from(&wit.q).unwrap());
        prop_assert!(wit.verify(&u).unwrap());
        let k = u.len() as i64;
        let img = oracle_image(&u, route_name(wit.route), p, q, k);
        prop_assert!(img != (0, 0));
        prop_assert_eq!((img.0, img.1), (u64::try_from(&wit.image_x).unwrap(), u64::try_from(&wit.image_y).unwrap()));
        let order = ["direct", "swapped", "theta", "swapped-theta"];
        for p2 in (3..=p).filter(|&x| is_prime(x)) {
            let q2 = smallest_primitive_root(p2);
            for route in order {
                if p2 == p && route == route_name(wit.route) {
                    break;
                }
                prop_assert_eq!(oracle_image(&u, route, p2, q2, k), (0, 0));
            }
        }
    }

    #[test]
    fn theta_repairs_balanced_flows(seed in any::<u64>()) {
        let mut r = rng(seed);
        let u = balanced_word(&mut r);
        let f = flow_of(&u).unwrap();
        let (h, v) = sums(&f);
        prop_assert!(h.is_empty() && v.is_empty());
        if !f.is_zero() {
            let t = theta_substitute(&u, u.len() as i64).unwrap();
            prop_assert!(!sums(&flow_of(&t).unwrap()).0.is_empty());
            prop_assert!(separating_witness(&u, DEFAULT_WITNESS_PRIME_LIMIT).unwrap().verify(&u).unwrap());
        }
    }
}

#[test]
fn commutator_fixture() {
    let wit = separating_witness(&w("abAB"), DEFAULT_WITNESS_PRIME_LIMIT).unwrap();
    assert_eq!((wit.p_u64(), wit.image_string()), (Some(3), "x^2".to_string()));
    assert!(separating_witness(&w("abAB").commutator(&w("baBA")).unwrap(), 100).is_err());
}
