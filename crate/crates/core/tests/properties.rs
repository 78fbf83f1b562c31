//! Randomized invariants; every property runs at least 200 instances with
//! `m <= 2`, `n <= 3`, weights up to `(3,3,3)` and degrees up to 4.

mod common;

use common::checks;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 200,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn shape() -> impl Strategy<Value = checks::Shape> {
    (0usize..=2, 1usize..=3, 0usize..=1, any::<u64>())
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn taylor_gap_lies_in_a_tau(s in shape(), len in 1usize..=2) {
        checks::taylor(s, len).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn alpha_push_stays_in_ia_tau(s in shape(), len in 1usize..=2) {
        checks::alpha_push_closure(s, len).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn strong_reduction_lands_in_every_box_point(s in shape()) {
        checks::strong_box(s).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn rho_maps_a_tau_onto_a_rho_tau(s in shape()) {
        checks::rho_generators(s).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn jacobian_chain_rule(s in shape()) {
        checks::chain_rule(s).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn word_times_inverse_is_identity(s in shape(), len in 0usize..=4) {
        checks::word_inverse(s, len).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn technical_conditions_agree_for_two_variables(seed in any::<u64>()) {
        checks::technical(seed).map_err(TestCaseError::fail)?;
    }
}
