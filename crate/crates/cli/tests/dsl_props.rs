use proptest::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thinlab_cli::dsl::parse;
use thinlab_core::sample;

proptest! {
    #[test]
    fn printed_sets_reparse(seed: u64) {
        let a = sample::mixed_set(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(parse(&a.to_string(), 2).unwrap(), a);
    }

    #[test]
    fn garbage_never_panics(s in "[-0-9{}(),|&+* geoap]{0,24}") {
        if let Err(e) = parse(&s, 2) {
            prop_assert!(e.position <= s.len());
        }
    }
}
