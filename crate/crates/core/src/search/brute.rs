//! Exhaustive nearest-codeword scan for small codes.

use alloc::collections::BTreeSet;

use super::DistanceReport;
use crate::bits::BitWord;
use crate::code::LinearCode;
use crate::error::{Error, Result};

/// Largest dimension [`brute_force_nearest`] accepts.
pub const BRUTE_FORCE_MAX_K: usize = 20;

/// Walks all `2^k` codewords in Gray-code order and keeps the `s_max`
/// smallest ones at minimum distance from `s`.
pub fn brute_force_nearest(code: &LinearCode, s: &BitWord, s_max: usize) -> Result<DistanceReport> {
    let k = code.k();
    if k > BRUTE_FORCE_MAX_K {
        return Err(Error::Unsupported(alloc::format!(
            "brute force needs k <= {BRUTE_FORCE_MAX_K}, got {k}"
        )));
    }
    if s.len() != code.n() {
        return Err(Error::LengthMismatch {
            expected: code.n(),
            actual: s.len(),
        });
    }
    if s_max == 0 {
        return Err(Error::InvalidParameter("s_max must be at least 1".into()));
    }
    let g = code.forms().g_left();
    let mut c = BitWord::zeros(code.n());
    let mut d = usize::MAX;
    let mut nearest = BTreeSet::new();
    let mut truncated = false;
    for i in 0u64..(1 << k) {
        if i > 0 {
            c ^= g.row(i.trailing_zeros() as usize);
        }
        let di = c.distance(s)?;
        if di < d {
            d = di;
            nearest.clear();
            truncated = false;
        }
        if di == d {
            nearest.insert(c.clone());
            if nearest.len() > s_max {
                nearest.pop_last();
                truncated = true;
            }
        }
    }
    Ok(DistanceReport {
        d,
        nearest: nearest.into_iter().collect(),
        exact: true,
        truncated,
    })
}
