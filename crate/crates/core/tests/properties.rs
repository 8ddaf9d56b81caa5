use proptest::prelude::*;

use freestyle::analysis::{kgp, num_ciphertexts, KgpInputs};
use freestyle::hash::CollisionTable;
use freestyle::state::{build_initial_state, RoundSchedule};
use freestyle::stream::block::{decrypt_block, encrypt_block_with_rounds};
use freestyle::{
    decrypt_frame, encrypt_message, CipherParameter, EncryptedMessage, FrameHeader, HaltTag, Key,
    KeyMaterial, Nonce, RandomSource, RandomWords,
};

/// Valid parameters with small round counts: h_i first, then multiples of it.
fn parameter(i_c: std::ops::RangeInclusive<u8>) -> impl Strategy<Value = CipherParameter> {
    (1u16..=8, 1u16..=6, 0u16..=6, 1u8..=3, i_c).prop_map(|(h_i, a, span, h_c, i_c)| {
        CipherParameter::new(h_i * a, h_i * (a + span), h_i, h_c, i_c).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn messages_round_trip(
        cp in parameter(8..=8),
        key in any::<[u8; 32]>(),
        nonce in any::<[u8; 12]>(),
        data in proptest::collection::vec(any::<u8>(), 0..300),
        seed in any::<u64>(),
    ) {
        let km = KeyMaterial::new(Key::from_bytes(&key).unwrap(), Nonce(nonce));
        let mut rng = RandomSource::seeded(seed);
        let frame = encrypt_message(&km, &cp, &data, &mut rng).unwrap().to_bytes();
        prop_assert_eq!(decrypt_frame(&km.key, &frame).unwrap(), data);
    }

    #[test]
    fn block_round_trip_at_every_checkpoint(
        cp in parameter(8..=32),
        key in any::<[u8; 32]>(),
        rw in any::<[u32; 4]>(),
        counter in any::<u32>(),
        pick in any::<u32>(),
        mut block in any::<[u8; 64]>(),
    ) {
        let km = KeyMaterial::new(Key::from_bytes(&key).unwrap(), Nonce([0; 12]));
        let rw = RandomWords(rw);
        let s0 = build_initial_state(&km, &cp, &rw);
        let schedule = cp.schedule();
        let rounds = schedule.round_at(pick % schedule.round_choices());
        let original = block;
        let mut table = CollisionTable::new();
        let enc = encrypt_block_with_rounds(&s0, Some(&mut block), &rw, &schedule, counter, rounds, &mut table, &mut ());
        prop_assert_eq!(enc.checkpoints, (rounds - schedule.r_min()) / schedule.h_i() + 1);
        let dec = decrypt_block(&s0, Some(&mut block), enc.tag, &rw, &schedule, counter, &mut table);
        prop_assert_eq!(dec.rounds, rounds);
        prop_assert_eq!(block, original);
    }

    #[test]
    fn packing_is_a_bijection_on_valid_parameters(cp in parameter(8..=32)) {
        let packed = cp.pack();
        prop_assert_eq!(CipherParameter::unpack(packed).unwrap(), cp);
        prop_assert_eq!((packed >> 48) as u16, cp.r_min());
        prop_assert_eq!(packed as u8, cp.i_c());
    }

    #[test]
    fn schedule_checkpoints_are_the_multiples(cp in parameter(8..=8)) {
        let s: RoundSchedule = cp.schedule();
        let listed: Vec<u32> = (1..=s.r_max()).filter(|&r| s.is_checkpoint(r)).collect();
        let expected: Vec<u32> = (0..s.round_choices()).map(|k| s.round_at(k)).collect();
        prop_assert_eq!(listed, expected);
    }

    #[test]
    fn arbitrary_bytes_never_panic_the_parser(bytes in proptest::collection::vec(any::<u8>(), 0..400)) {
        let _ = FrameHeader::parse(&bytes);
        let _ = EncryptedMessage::from_bytes(&bytes);
        let key = Key::from_bytes(&[1; 32]).unwrap();
        let mut framed = bytes.clone();
        if framed.len() >= 13 {
            // force a header that parses, with i_c = 8 so the scan stays cheap
            framed[..5].copy_from_slice(b"FSTY\x01");
            framed[5..13].copy_from_slice(&0x0008_0020_0002_0208u64.to_be_bytes());
        }
        let _ = decrypt_frame(&key, &framed);
    }

    #[test]
    fn kgp_monotone(i_c in 9u8..=31, a in 0.0f64..1.0, b in 0.0f64..1.0, n_b in 1u64..1000) {
        let max = (1u64 << (i_c - 1)) as f64;
        let (lo, hi) = if a < b { (a * max, b * max) } else { (b * max, a * max) };
        prop_assume!(hi - lo > 1e-6 * max);
        let at = |i_c, e| kgp(&KgpInputs { i_c, e_pepper: e, e_r: 20.0, n_b });
        prop_assert!(at(i_c, hi) < at(i_c, lo));
        prop_assert!(at(i_c + 1, lo) > at(i_c, lo));
    }

    #[test]
    fn ciphertext_count_is_exact(cp in parameter(8..=32), n_b in 0u32..50) {
        let n = num_ciphertexts(&cp, n_b);
        let per_block = num_bigint::BigUint::from(cp.round_choices());
        prop_assert_eq!(n, (num_bigint::BigUint::from(1u8) << 128u32) * per_block.pow(n_b));
    }

    #[test]
    fn probe_result_is_fresh(marks in proptest::collection::vec(any::<u16>(), 0..200), tag in any::<u16>()) {
        let mut table = CollisionTable::new();
        for m in &marks {
            table.mark(HaltTag(*m));
        }
        let got = table.probe(HaltTag(tag));
        prop_assert!(!table.contains(got));
        let mut t = HaltTag(tag);
        while t != got {
            prop_assert!(table.contains(t));
            t = t.next();
        }
    }
}
