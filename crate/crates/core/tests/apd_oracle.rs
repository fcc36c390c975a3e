mod common;

use num_bigint::BigUint;
use proptest::prelude::*;
use provar_core::apd::*;
use provar_core::fplinalg::ApdPresentation;
use provar_core::numtheory::q_sets;
use provar_core::stallings::Index;
use provar_core::{Automaton, Word};
use rand::Rng;

use common::{image_count, random_word, rng, Gpd, TupleModel};

const CAP: usize = DEFAULT_APD_CAP;

#[test]
fn free_object_orders_match_tuple_model() {
    for (n, p, d, expected) in [(1, 3, 2, 6u64), (2, 3, 2, 972), (2, 5, 2, 12500), (1, 5, 4, 20), (1, 7, 6, 42)] {
        let fo = FreeObject::new(n, p, d).unwrap();
        let model = TupleModel::new(n, p, d, fo.q());
        assert_eq!(model.whole().len() as u64, expected);
        assert_eq!(fo.order(), BigUint::from(expected));
        assert_eq!(fo.formula_order(), BigUint::from(expected));
        assert_eq!(fo.enumerate(CAP).unwrap().len() as u64, expected);
    }
    // beyond enumeration, only the formula
    let fo = FreeObject::new(2, 5, 4).unwrap();
    assert_eq!(fo.order(), BigUint::from(5u32).pow(17) * 16u32);
}

#[test]
fn free_object_evaluation_matches_tuples() {
    let fo = FreeObject::new(2, 3, 2).unwrap();
    let model = TupleModel::new(2, 3, 2, fo.q());
    let g = fo.group();
    let mut r = rng(11);
    for _ in 0..300 {
        let u = random_word(&mut r, 2, 0, 12);
        let v = random_word(&mut r, 2, 0, 12);
        assert_eq!(fo.eval(&u).unwrap() == fo.eval(&v).unwrap(), model.eval(&u) == model.eval(&v));
        let tu = model.eval(&u);
        let e = fo.eval(&u).unwrap();
        for (phi, &(uu, tt)) in model.assignments.iter().zip(&tu) {
            let assignment: Vec<GpdElement> = phi.iter().map(|&(a, b)| g.element(a as i64, b as i64)).collect();
            assert_eq!(fo.tuple_at(&e, &assignment).unwrap(), GpdElement { u: uu, t: tt });
        }
    }
}

fn random_subgroup(r: &mut rand_chacha::ChaCha8Rng, rank: usize) -> Automaton {
    let gens: Vec<Word> = (0..r.gen_range(1..=4)).map(|_| random_word(r, rank, 1, 6)).collect();
    Automaton::build(&gens, rank).unwrap()
}

/// Stabilizer of a point under random permutations of at most `degree` points.
fn finite_index_subgroup(r: &mut rand_chacha::ChaCha8Rng, rank: usize, degree: usize) -> Automaton {
    use rand::seq::SliceRandom;
    let n = r.gen_range(1..=degree);
    let perms: Vec<Vec<usize>> = (0..rank)
        .map(|_| {
            let mut p: Vec<usize> = (0..n).collect();
            p.shuffle(r);
            p
        })
        .collect();
    Automaton::from_action(&perms, 0).unwrap()
}

fn closure_membership_case(n: usize, p: u64, d: u64, seed: u64) {
    let fo = FreeObject::new(n, p, d).unwrap();
    let model = TupleModel::new(n, p, d, fo.q());
    let mut r = rng(seed);
    let h = random_subgroup(&mut r, n);
    let image = model.generate(&h.basis().iter().map(|w| model.eval(w)).collect::<Vec<_>>());
    let cl = closure_apd(&h, p, d, CAP).unwrap();
    assert!(cl.is_complete());
    assert_eq!(cl.index(), Index::Finite(model.whole().len() / image.len()));
    for _ in 0..100 {
        let w = random_word(&mut r, n, 0, 10);
        assert_eq!(cl.contains(&w).unwrap(), image.contains(&model.eval(&w)), "{w} in closure of {:?}", h.basis());
    }
    assert_eq!(closure_apd_with(&h, p, d, CAP, ClosureAlgorithm::Cayley).unwrap(), cl);
}

#[test]
fn closure_membership_oracle() {
    for seed in 0..12 {
        closure_membership_case(2, 3, 2, seed);
        closure_membership_case(1, 5, 4, seed);
        closure_membership_case(1, 7, 6, seed);
    }
    for seed in 0..4 {
        closure_membership_case(2, 5, 2, seed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn closure_idempotent_and_monotone(seed in any::<u64>(), pd in prop::sample::select(vec![(3u64, 2u64), (5, 2), (5, 4)])) {
        let (p, d) = pd;
        let mut r = rng(seed);
        let mut h = random_subgroup(&mut r, 2);
        if d == 4 || r.gen_bool(0.5) {
            // keep the closure small in the larger free object
            h = h.join(&finite_index_subgroup(&mut r, 2, 8)).unwrap();
        }
        let k = h.join_word(&random_word(&mut r, 2, 1, 6)).unwrap();
        let ch = closure_apd(&h, p, d, CAP).unwrap();
        let ck = closure_apd(&k, p, d, CAP).unwrap();
        prop_assert!(ch.contains_subgroup(&h).unwrap());
        prop_assert_eq!(closure_apd(&ch, p, d, CAP).unwrap(), ch.clone());
        for w in ch.basis() {
            prop_assert!(ck.contains(&w).unwrap());
        }
        let st = status_apd(&h, p, d).unwrap();
        prop_assert_eq!(st.closed, ch == h);
        prop_assert_eq!(Index::Finite(st.index_of_closure.try_into().unwrap()), ch.index());
        prop_assert_eq!(st.dense, ch.index() == Index::Finite(1));
    }
}

#[test]
fn closure_examples() {
    let f2 = Automaton::whole_group(2).unwrap();
    assert_eq!(closure_apd(&f2, 3, 2, CAP).unwrap(), f2);
    let a2 = Automaton::from_strs(&["aa"], 1).unwrap();
    let a4 = Automaton::from_strs(&["aaaa"], 1).unwrap();
    assert_eq!(closure_apd(&a2, 3, 2, CAP).unwrap(), a2);
    assert_eq!(closure_apd(&a4, 3, 2, CAP).unwrap(), a2);
    let st = status_apd(&a2, 3, 2).unwrap();
    assert!(st.closed && !st.dense);
    assert!(status_apd(&f2, 3, 2).unwrap().dense);
    let h = Automaton::from_strs(&["a", "bb"], 2).unwrap();
    assert!(!status_apd(&h, 3, 2).unwrap().dense);
}

#[test]
fn kernel_membership_examples() {
    let w = |s: &str, n| Word::parse(s, n).unwrap();
    assert!(kernel_membership(&w("abAB", 2), KernelSpec::K { n: 2, m: 5 }).unwrap());
    assert!(kernel_membership(&w("aa", 2), KernelSpec::K { n: 2, m: 2 }).unwrap());
    assert!(!kernel_membership(&w("a", 2), KernelSpec::K { n: 2, m: 2 }).unwrap());
    assert!(kernel_membership(&w("a^6", 1), KernelSpec::L { n: 1, p: 3, d: 2 }).unwrap());
    assert!(!kernel_membership(&w("a^3", 1), KernelSpec::L { n: 1, p: 3, d: 2 }).unwrap());
}

#[test]
fn gpd_iso_is_verified_on_all_elements() {
    for (p, d) in [(3u64, 2u64), (5, 2), (5, 4), (7, 3), (7, 6), (11, 10)] {
        let (_, qp) = q_sets(p, d).unwrap();
        for &q in &qp {
            for &r in &qp {
                let iso = gpd_iso(p, d, q, r).unwrap();
                assert_eq!(iso.m * iso.k % d, 1 % d);
                let (gq, gr) = (Gpd { p, d, q }, Gpd { p, d, q: r });
                let phi = |e: (u64, u64)| (e.0, e.1 * iso.m % d);
                let psi = |e: (u64, u64)| (e.0, e.1 * iso.k % d);
                for a in gq.elements() {
                    assert_eq!(psi(phi(a)), a);
                    assert_eq!(phi(psi(a)), a);
                    for b in gq.elements() {
                        assert_eq!(phi(gq.mul(a, b)), gr.mul(phi(a), phi(b)));
                        assert_eq!(psi(gr.mul(a, b)), gq.mul(psi(a), psi(b)));
                    }
                }
            }
        }
    }
}

#[test]
fn decompositions_are_injective() {
    for (p, d, dj, q) in [
        (5u64, 4u64, vec![4u64], vec![vec![2u64]]),
        (3, 2, vec![2], vec![vec![2], vec![2]]),
        (7, 6, vec![6], vec![vec![2]]),
        (7, 6, vec![3, 2], vec![vec![2, 6], vec![4, 1]]),
    ] {
        let pres = ApdPresentation::new(p, d, dj, q).unwrap();
        let dec = decompose_apd(&pres, CAP).unwrap();
        assert!(dec.is_injective());
        assert_eq!(dec.group_order as u128, pres.order());
        assert_eq!(image_count(&pres, &dec) as u128, pres.order());
    }
}
