//! Exhaustive listing of low-weight codewords.

use alloc::vec::Vec;

use super::combos::scan;
use super::ncs::ncs_cost;
use super::{join_key, key_to_word, CodewordList};
use crate::code::LinearCode;
use crate::error::{Error, Result};

/// Encodings spent by [`enumerate_low_weight`] with the given budget.
pub fn enumeration_cost(k: usize, half_weight_budget: usize) -> u128 {
    ncs_cost(k, half_weight_budget)
}

/// Every codeword of weight at most `2·half_weight_budget`.
///
/// A codeword of weight `≤ 2b` has a half of weight `≤ b`, so running all
/// messages of weight `≤ b` through both systematic forms finds it. The
/// list is then closed under the quasi-cyclic shift when the code has one.
pub fn enumerate_low_weight(code: &LinearCode, half_weight_budget: usize, cost_ceiling: u128) -> Result<CodewordList> {
    let tables = code.half_tables()?;
    let k = code.k();
    let budget = half_weight_budget.min(k);
    let estimate = enumeration_cost(k, budget);
    if estimate > cost_ceiling {
        return Err(Error::CostCeiling {
            estimate,
            ceiling: cost_ceiling,
        });
    }
    let limit = 2 * half_weight_budget;
    let mut keys: Vec<u128> = Vec::new();
    let concat = |mut a: Vec<u128>, mut b: Vec<u128>| {
        a.append(&mut b);
        a
    };
    for w in 1..=budget {
        let room = limit - w;
        let left = scan(
            &tables.left,
            w,
            Vec::new,
            |found, e, acc| {
                if acc.count_ones() as usize <= room {
                    found.push(join_key(k, e, acc));
                }
                true
            },
            concat,
        );
        let right = scan(
            &tables.right,
            w,
            Vec::new,
            |found, e, acc| {
                if acc.count_ones() as usize <= room {
                    found.push(join_key(k, acc, e));
                }
                true
            },
            concat,
        );
        keys.extend(left);
        keys.extend(right);
        log::debug!("enumerate: half weight {w} done, {} candidates", keys.len());
    }
    keys.sort_unstable();
    keys.dedup();
    let mut list = CodewordList::new(code.n(), k, limit);
    for key in keys {
        list.insert(key_to_word(code, key))?;
    }
    if let Some(block) = code.qc_block() {
        list.close_under_qc(block)?;
    }
    Ok(list)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitWord;
    use crate::code::toy::random_rate_half;
    use crate::matrix::BinaryMatrix;

    #[test]
    fn pair_code() {
        let h = BinaryMatrix::from_strs(&["1010", "0101"]).unwrap();
        let code = LinearCode::from_parity_check(h, None).unwrap();
        let list = enumerate_low_weight(&code, 1, u128::MAX).unwrap();
        let hex: Vec<_> = list.iter().map(BitWord::to_hex).collect();
        assert_eq!(hex, ["5", "A"]);
        assert_eq!(list.completeness_bound, 2);
    }

    #[test]
    fn matches_full_listing_on_toy_code() {
        let k = 10;
        let code = random_rate_half(k, false, 4);
        let g = code.forms().g_left();
        for budget in 1..=4 {
            let list = enumerate_low_weight(&code, budget, u128::MAX).unwrap();
            let mut expected = CodewordList::new(2 * k, k, 2 * budget);
            for m in 1u32..(1 << k) {
                let c = (0..k)
                    .filter(|i| m >> i & 1 == 1)
                    .fold(BitWord::zeros(2 * k), |acc, i| &acc ^ g.row(i));
                if c.weight() <= 2 * budget {
                    expected.insert(c).unwrap();
                }
            }
            assert_eq!(list, expected);
        }
    }

    #[test]
    fn ceiling() {
        let code = LinearCode::ccsds_128_64();
        assert!(matches!(
            enumerate_low_weight(&code, 9, 1_000_000),
            Err(Error::CostCeiling { .. })
        ));
    }
}
