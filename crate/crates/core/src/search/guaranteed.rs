//! Random search for words with a certified distance to the code.
//!
//! A word `v` whose overlap with every listed codeword of weight `ω` stays
//! within [`overlap_bound`] is at distance at least `‖v‖` from every
//! codeword, provided the list holds every codeword up to `w_max`.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CodewordList, SearchParams};
use crate::bits::BitWord;
use crate::code::LinearCode;
use crate::error::{Error, Result};

/// Weight of the drawn words, which is also the guaranteed distance.
///
/// Codes with only even-weight codewords admit `⌈(w_max+1)/2⌉`; any other
/// code gets `⌊(w_max+1)/2⌋`.
pub fn guaranteed_weight(w_max: usize, even_code: bool) -> usize {
    if even_code {
        (w_max + 2) / 2
    } else {
        (w_max + 1) / 2
    }
}

/// Largest overlap allowed between `v` and a codeword of weight `weight_c`:
/// `⌊(‖c‖ + ‖v‖ − (w_max+1)/2) / 2⌋`, or `None` when no overlap is allowed
/// at all (the bound is negative).
pub fn overlap_bound(weight_c: usize, weight_v: usize, w_max: usize) -> Option<usize> {
    // 4·bound ≤ 2‖c‖ + 2‖v‖ − w_max − 1
    let num = (2 * weight_c + 2 * weight_v) as i64 - w_max as i64 - 1;
    (num >= 0).then(|| (num / 4) as usize)
}

/// Result of [`guaranteed_search`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuaranteedOutcome {
    /// The accepted word, `None` when every attempt was rejected.
    pub word: Option<BitWord>,
    /// Certified distance of `word` to the code.
    pub guaranteed_distance: usize,
    /// `w_max` actually used; below the requested one when the list was not
    /// exhaustive that far.
    pub effective_w_max: usize,
    pub downgraded: bool,
    pub attempts: u64,
}

/// True when `v` respects the overlap bound against every listed codeword
/// with weight in `[1, w_max]`.
pub fn satisfies_overlap_bounds(v: &BitWord, list: &CodewordList, w_max: usize) -> Result<bool> {
    let wv = v.weight();
    for (&wc, words) in list.by_weight.range(1..=w_max) {
        let Some(bound) = overlap_bound(wc, wv, w_max) else {
            if !words.is_empty() {
                return Ok(false);
            }
            continue;
        };
        for c in words {
            if v.overlap(c)? > bound {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Draws random words of the guaranteed weight until one passes
/// [`satisfies_overlap_bounds`] or `params.max_attempts` is spent.
pub fn guaranteed_search(code: &LinearCode, low_weight: &CodewordList, params: &SearchParams) -> Result<GuaranteedOutcome> {
    params.validate()?;
    if low_weight.n != code.n() {
        return Err(Error::LengthMismatch {
            expected: code.n(),
            actual: low_weight.n,
        });
    }
    let effective = params.w_max.min(low_weight.completeness_bound);
    let downgraded = effective < params.w_max;
    if downgraded {
        log::warn!(
            "codeword list is exhaustive only to weight {}, guarantee computed for w_max = {effective}",
            low_weight.completeness_bound
        );
    }
    let d = guaranteed_weight(effective, code.is_even());
    let n = code.n();
    if d == 0 || d > n {
        return Err(Error::InvalidParameter(alloc::format!(
            "w_max = {effective} gives an unusable weight {d}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut outcome = GuaranteedOutcome {
        word: None,
        guaranteed_distance: d,
        effective_w_max: effective,
        downgraded,
        attempts: 0,
    };
    while outcome.attempts < params.max_attempts {
        outcome.attempts += 1;
        let mut v = BitWord::zeros(n);
        for i in index::sample(&mut rng, n, d) {
            v.set(i, true);
        }
        if satisfies_overlap_bounds(&v, low_weight, effective)? {
            outcome.word = Some(v);
            break;
        }
    }
    Ok(outcome)
}
