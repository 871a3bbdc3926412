//! Seeded random symbolic sets for randomized suites.

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::symbolic::{ApTerm, GeoTerm, SymbolicSet};

const COEFFS: [i64; 10] = [1, -1, 3, -3, 5, -5, 2, 6, 7, -9];

/// A union of a few geometric chains (some sharing a coefficient, so that
/// translates of one another occur) and a small finite part.
pub fn chain_set<R: Rng>(rng: &mut R) -> SymbolicSet {
    let mut geos = Vec::new();
    for _ in 0..rng.gen_range(1..=2) {
        let c = *COEFFS.choose(rng).expect("nonempty");
        let b = if rng.gen_bool(0.8) { 2 } else { 4 };
        for _ in 0..rng.gen_range(1..=2) {
            geos.push(GeoTerm {
                base: BigInt::from(b),
                coeff: BigInt::from(c),
                offset: BigInt::from(rng.gen_range(-20i64..=20)),
                start: rng.gen_range(0..3),
            });
        }
    }
    let finite: Vec<BigInt> = (0..rng.gen_range(0..=3))
        .map(|_| BigInt::from(rng.gen_range(-50i64..=50)))
        .collect();
    SymbolicSet::from_terms(2, finite, &geos, &[]).expect("valid terms")
}

/// A chain set, plus with probability one half one or two progressions.
pub fn mixed_set<R: Rng>(rng: &mut R) -> SymbolicSet {
    let base = chain_set(rng);
    if rng.gen_bool(0.5) {
        return base;
    }
    let aps: Vec<ApTerm> = (0..rng.gen_range(1..=2))
        .map(|_| {
            let m = rng.gen_range(2i64..=12);
            ApTerm::new(m, rng.gen_range(0..m)).expect("positive modulus")
        })
        .collect();
    let extra = SymbolicSet::from_terms(2, Vec::new(), &[], &aps).expect("valid terms");
    base.union(&extra).expect("same base")
}

/// Nonzero integer in `[-bound, bound]`.
pub fn nonzero<R: Rng>(rng: &mut R, bound: i64) -> BigInt {
    loop {
        let g = rng.gen_range(-bound..=bound);
        if g != 0 {
            return BigInt::from(g);
        }
    }
}
