//! Session-level properties across randomized configurations.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use asqkd::adversary::AttackModel;
use asqkd::analysis::{run_batch, KeysPolicy};
use asqkd::bits::BitString;
use asqkd::protocol::{run_session, run_session_with_key, PreSharedKeys, SessionConfig};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Honest completeness holds for every seed, not just statistically:
    /// every state the parties measure is an eigenstate of the measured
    /// basis.
    #[test]
    fn honest_sessions_always_succeed(
        n in 1usize..12,
        m in 1usize..8,
        seed in 0u64..u64::MAX,
    ) {
        let config = SessionConfig::new(n, m, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let keys = PreSharedKeys::random(&config, &mut rng);
        let (outcome, transcript) =
            run_session(&config, &keys, &AttackModel::Honest, &mut rng).unwrap();
        prop_assert!(outcome.alice_check_pass);
        prop_assert!(outcome.bob_check_pass);
        prop_assert!(outcome.keys_recycled);
        prop_assert_eq!(&outcome.sk_prime, &outcome.sk);
        // Every decoy slot recorded the |+⟩ outcome.
        prop_assert!(transcript.alice_recheck_bits.len() == 2 * (n + m));
    }

    /// Recycling is exactly the conjunction of the two verdicts.
    #[test]
    fn recycling_is_the_conjunction_of_verdicts(
        seed in 0u64..u64::MAX,
        p in 0.0f64..1.0,
    ) {
        let config = SessionConfig::new(4, 3, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let keys = PreSharedKeys::random(&config, &mut rng);
        let attack = AttackModel::InterceptResendZ { p_attack: p };
        let (outcome, transcript) = run_session(&config, &keys, &attack, &mut rng).unwrap();
        prop_assert_eq!(
            outcome.keys_recycled,
            outcome.alice_check_pass && outcome.bob_check_pass
        );
        use asqkd::protocol::AuthBit;
        prop_assert_eq!(
            transcript.alice_auth_bit,
            AuthBit::from(outcome.alice_check_pass)
        );
        prop_assert_eq!(transcript.bob_auth_bit, AuthBit::from(outcome.bob_check_pass));
    }

    /// A session is a deterministic function of (config, keys, sk, attack,
    /// generator stream).
    #[test]
    fn sessions_are_reproducible(seed in 0u64..u64::MAX) {
        let config = SessionConfig::new(6, 4, seed).unwrap();
        let mut key_rng = ChaCha8Rng::seed_from_u64(seed);
        let keys = PreSharedKeys::random(&config, &mut key_rng);
        let sk = BitString::random(6, &mut key_rng);
        let attack = AttackModel::InterceptResendX { p_attack: 0.7 };

        let mut rng_a = ChaCha8Rng::seed_from_u64(seed ^ 0xABCD);
        let (outcome_a, transcript_a) =
            run_session_with_key(&config, &keys, &sk, &attack, &mut rng_a).unwrap();
        let mut rng_b = ChaCha8Rng::seed_from_u64(seed ^ 0xABCD);
        let (outcome_b, transcript_b) =
            run_session_with_key(&config, &keys, &sk, &attack, &mut rng_b).unwrap();
        prop_assert_eq!(outcome_a, outcome_b);
        prop_assert_eq!(transcript_a, transcript_b);
    }
}

/// Detection under partial interception grows with the attack probability
/// (checked empirically with generous slack).
#[test]
fn detection_rate_is_monotone_in_attack_probability() {
    let config = SessionConfig::new(8, 8, 0).unwrap();
    let trials = 1500usize;
    let rates: Vec<f64> = [0.0, 0.5, 1.0]
        .into_iter()
        .map(|p| {
            run_batch(
                &config,
                &KeysPolicy::FreshPerTrial,
                &AttackModel::InterceptResendZ { p_attack: p },
                trials,
                123,
            )
            .unwrap()
            .detection_rate
        })
        .collect();
    assert_eq!(rates[0], 0.0);
    // 3σ slack on the comparison of adjacent rates.
    let slack = 3.0 * (0.25f64 / trials as f64).sqrt() * 2.0;
    assert!(rates[1] > rates[0], "rates = {rates:?}");
    assert!(rates[2] + slack > rates[1], "rates = {rates:?}");
    assert!(rates[2] > 0.99, "rates = {rates:?}");
}
