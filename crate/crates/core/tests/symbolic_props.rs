use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thinlab_core::sample;
use thinlab_core::symbolic::SymbolicSet;

const WIDE: i64 = 1 << 30;

fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

fn chain(seed: u64) -> SymbolicSet {
    sample::chain_set(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn mixed(seed: u64) -> SymbolicSet {
    sample::mixed_set(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn window(a: &SymbolicSet, lo: i64, hi: i64) -> BTreeSet<BigInt> {
    a.enumerate_window(&int(lo), &int(hi))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn translate_matches_window(seed: u64, g in -5000i64..5000, lo in -3000i64..3000) {
        let a = mixed(seed);
        let hi = lo + 2000;
        let expected: BTreeSet<BigInt> = window(&a, lo - g, hi - g).into_iter().map(|x| x + g).collect();
        prop_assert_eq!(window(&a.translate(&int(g)), lo, hi), expected);
    }

    #[test]
    fn scale_matches_window(seed: u64, k in -6i64..=6, lo in -3000i64..3000) {
        prop_assume!(k != 0);
        let a = mixed(seed);
        let hi = lo + 2000;
        let (l, h) = if k > 0 { (lo, hi) } else { (hi, lo) };
        let expected: BTreeSet<BigInt> =
            window(&a, Integer::div_ceil(&l, &k), Integer::div_floor(&h, &k)).into_iter().map(|x| x * k).collect();
        prop_assert_eq!(window(&a.scale(&int(k)).unwrap(), lo, hi), expected);
    }

    #[test]
    fn boolean_operations_match_window(s1: u64, s2: u64, lo in -3000i64..3000) {
        let (a, b) = (mixed(s1), mixed(s2));
        let hi = lo + 2000;
        let (wa, wb) = (window(&a, lo, hi), window(&b, lo, hi));
        prop_assert_eq!(window(&a.union(&b).unwrap(), lo, hi), wa.union(&wb).cloned().collect::<BTreeSet<_>>());
        prop_assert_eq!(window(&a.intersect(&b).unwrap(), lo, hi), wa.intersection(&wb).cloned().collect::<BTreeSet<_>>());
    }

    #[test]
    fn chain_sets_agree_on_wide_windows(s1: u64, s2: u64) {
        let (a, b) = (chain(s1), chain(s2));
        let (wa, wb) = (window(&a, -WIDE, WIDE), window(&b, -WIDE, WIDE));
        prop_assert_eq!(window(&a.intersect(&b).unwrap(), -WIDE, WIDE), wa.intersection(&wb).cloned().collect::<BTreeSet<_>>());
    }

    #[test]
    fn canonical_form_is_unique(s1: u64, s2: u64, g in -100i64..100) {
        let (a, b) = (mixed(s1), mixed(s2));
        prop_assert_eq!(a.union(&a).unwrap(), a.clone());
        prop_assert_eq!(a.intersect(&a).unwrap(), a.clone());
        prop_assert_eq!(a.union(&b).unwrap(), b.union(&a).unwrap());
        prop_assert_eq!(a.intersect(&b).unwrap(), b.intersect(&a).unwrap());
        prop_assert_eq!(a.translate(&int(g)).translate(&int(-g)), a.clone());
        let rebuilt = SymbolicSet::from_terms(2, a.finite_part().iter().cloned(), &a.geo_terms(), &a.ap_terms()).unwrap();
        prop_assert_eq!(rebuilt, a.clone());
        prop_assert_eq!(SymbolicSet::from_json(2, &a.to_json()).unwrap(), a);
    }

    #[test]
    fn translation_normal_form_is_invariant(seed: u64, g in -100_000i64..100_000) {
        let a = mixed(seed);
        let (n, t) = a.translation_normal_form();
        let (m, s) = a.translate(&int(g)).translation_normal_form();
        prop_assert_eq!(&n, &m);
        prop_assert_eq!(n.translate(&t), a.clone());
        prop_assert_eq!(m.translate(&s), a.translate(&int(g)));
    }

    #[test]
    fn child_size_bound_is_sound(seed: u64, g in -1024i64..=1024) {
        prop_assume!(g != 0);
        let a = chain(seed);
        let child = a.shift_child(&int(g)).unwrap();
        match a.child_size_bound(&int(g)) {
            Some(bound) => {
                prop_assert!(child.is_finite());
                prop_assert!(window(&child, -WIDE, WIDE).len() <= bound);
            }
            None => {
                prop_assert!(!child.is_finite());
                prop_assert!(a.in_spectrum(&int(g)));
            }
        }
    }

    #[test]
    fn spectrum_lists_every_infinite_child(seed: u64) {
        let a = mixed(seed);
        let spectrum = a.shift_spectrum().unwrap();
        for g in -1024i64..=1024 {
            if g == 0 {
                continue;
            }
            let infinite = !a.shift_child(&int(g)).unwrap().is_finite();
            prop_assert_eq!(spectrum.covers(&int(g)), infinite, "g = {}", g);
        }
    }

    #[test]
    fn class_children_share_their_periodic_part(seed: u64, steps in -20i64..20) {
        let a = mixed(seed);
        for (class, rep) in a.class_shifts() {
            let g = &rep + &class.modulus * steps;
            if g == BigInt::from(0) {
                continue;
            }
            let at_rep = a.shift_child(&rep).unwrap();
            let at_g = a.shift_child(&g).unwrap();
            prop_assert_eq!(at_rep.ap_terms(), at_g.ap_terms());
            if a.chain_count() == 0 && a.finite_part().is_empty() {
                prop_assert_eq!(at_rep, at_g);
            }
        }
    }

    #[test]
    fn explicit_shift_children_are_infinite(seed: u64) {
        let a = chain(seed);
        for g in a.explicit_shifts() {
            prop_assert!(!a.shift_child(&g).unwrap().is_finite());
        }
    }
}

#[test]
fn pure_progressions_are_translate_uniform() {
    let a = SymbolicSet::ap(2, 6, 1)
        .unwrap()
        .union(&SymbolicSet::ap(2, 4, 0).unwrap())
        .unwrap();
    let classes = a.class_shifts();
    assert!(!classes.is_empty());
    for (class, rep) in classes {
        for steps in -5..5 {
            let g = &rep + &class.modulus * steps;
            if g != BigInt::from(0) {
                assert_eq!(a.shift_child(&g).unwrap(), a.shift_child(&rep).unwrap());
            }
        }
    }
}
