//! Moving a designed word within its coset.

use crate::bits::BitWord;
use crate::code::LinearCode;
use crate::error::{Error, Result};

/// Adds the codeword that makes the last `k` bits of `v` equal `target_half`.
///
/// The result differs from `v` by a codeword, so its distance profile to the
/// code is unchanged.
pub fn transform_for_lrt(code: &LinearCode, v: &BitWord, target_half: &BitWord) -> Result<BitWord> {
    let (n, k) = (code.n(), code.k());
    if v.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: v.len(),
        });
    }
    if target_half.len() != k {
        return Err(Error::LengthMismatch {
            expected: k,
            actual: target_half.len(),
        });
    }
    let p = &v.slice(n - k, k) ^ target_half;
    Ok(v ^ &code.encode_right(&p)?)
}
