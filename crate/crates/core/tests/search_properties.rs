use proptest::prelude::*;

use tailseq_core::code::toy::random_rate_half;
use tailseq_core::search::{self, brute_force_nearest, enumerate_low_weight, CodewordList, SearchParams};
use tailseq_core::{BitWord, LinearCode};

fn word(bits: u128, len: usize) -> BitWord {
    BitWord::from_bits((0..len).map(|i| (bits >> (127 - i)) & 1 == 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // within half the minimum distance the nearest codeword is the sent one
    #[test]
    fn ncs_recovers_lightly_corrupted_codewords(msg in any::<u64>(), flips in proptest::collection::btree_set(0usize..128, 0..=4)) {
        let code = LinearCode::ccsds_128_64();
        let c = code.encode_left(&BitWord::from_words(64, &[msg]).unwrap()).unwrap();
        let mut s = c.clone();
        for &i in &flips {
            s.flip(i);
        }
        let r = search::ncs(&code, &s, &SearchParams::default()).unwrap();
        prop_assert_eq!(r.d, flips.len());
        prop_assert_eq!(r.nearest, vec![c]);
        prop_assert!(r.exact);
    }

    #[test]
    fn transform_stays_in_the_coset(v in any::<u128>(), target in any::<u64>()) {
        let code = LinearCode::ccsds_128_64();
        let v = word(v, 128);
        let target = BitWord::from_words(64, &[target]).unwrap();
        let t = search::transform_for_lrt(&code, &v, &target).unwrap();
        prop_assert_eq!(t.slice(64, 64), target);
        prop_assert_eq!(code.syndrome(&t).unwrap(), code.syndrome(&v).unwrap());
    }

    #[test]
    fn budgeted_search_agrees_when_exact(bits in any::<u128>(), seed in 0u64..50) {
        let code = random_rate_half(12, seed % 2 == 0, seed);
        let s = word(bits, 24);
        let budget = SearchParams { cost_ceiling: search::ncs_cost(12, 2), ..SearchParams::default() };
        let b = search::ncs_budgeted(&code, &s, &budget).unwrap();
        let full = brute_force_nearest(&code, &s, 64).unwrap();
        prop_assert!(b.d >= full.d);
        if b.exact {
            prop_assert_eq!(b.d, full.d);
        }
    }
}

#[test]
fn codeword_list_text_round_trip() {
    let code = random_rate_half(9, true, 4);
    let list = enumerate_low_weight(&code, 3, u128::MAX).unwrap();
    assert!(!list.is_empty());
    let back = CodewordList::parse(&list.to_text()).unwrap();
    assert_eq!(back.to_text(), list.to_text());
    assert_eq!(back.len(), list.len());
    assert!(list.iter().all(|c| code.is_codeword(c) && c.weight() <= 6));
}
