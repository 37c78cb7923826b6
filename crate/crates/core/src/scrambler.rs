//! CCSDS pseudo-randomizer.
//!
//! The LFSR for `x^8 + x^6 + x^4 + x^3 + x^2 + x + 1` is reset to all ones
//! before every 128-bit block, so every block is XORed with the same
//! keystream prefix.

use crate::bits::BitWord;
use crate::decoder::LlrVector;
use crate::error::{Error, Result};

/// Block length over which the randomizer is reset.
pub const BLOCK_BITS: usize = 128;

/// Period of the maximal-length register.
pub const PERIOD: usize = 255;

/// First 128 keystream bits.
pub const KEYSTREAM_128_HEX: &str = "FF399E5A68E906F56C892FA1315E08C0";

/// Feedback taps of the Fibonacci register (shift left, output the MSB).
const FEEDBACK_MASK: u8 = 0xFA;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LfsrConfig {
    pub initial_state: u8,
}

impl Default for LfsrConfig {
    fn default() -> Self {
        Self { initial_state: 0xFF }
    }
}

#[derive(Clone, Debug)]
pub struct Lfsr {
    state: u8,
}

impl Lfsr {
    pub fn new(cfg: LfsrConfig) -> Self {
        Self {
            state: cfg.initial_state,
        }
    }

    #[inline]
    pub fn next_bit(&mut self) -> bool {
        let out = self.state & 0x80 != 0;
        let fb = ((self.state & FEEDBACK_MASK).count_ones() & 1) as u8;
        self.state = (self.state << 1) | fb;
        out
    }
}

impl Iterator for Lfsr {
    type Item = bool;

    fn next(&mut self) -> Option<bool> {
        Some(self.next_bit())
    }
}

/// First `len` output bits from a freshly reset register.
pub fn keystream(len: usize) -> BitWord {
    BitWord::from_bits(Lfsr::new(LfsrConfig::default()).take(len))
}

/// Checks the register arrangement against the published 128-bit prefix.
pub fn self_test() -> Result<()> {
    let expected = BitWord::from_hex(KEYSTREAM_128_HEX)?;
    if keystream(BLOCK_BITS) != expected {
        return Err(Error::InvalidParameter("randomizer keystream self-test failed".into()));
    }
    Ok(())
}

fn keystream_block() -> BitWord {
    BitWord::from_words(BLOCK_BITS, &[0xFF39_9E5A_68E9_06F5, 0x6C89_2FA1_315E_08C0]).expect("two words")
}

fn check_block(len: usize) -> Result<()> {
    if len != BLOCK_BITS {
        return Err(Error::LengthMismatch {
            expected: BLOCK_BITS,
            actual: len,
        });
    }
    Ok(())
}

/// XORs a 128-bit block with the keystream; an involution.
pub fn randomize(block: &BitWord) -> Result<BitWord> {
    check_block(block.len())?;
    Ok(block ^ &keystream_block())
}

/// Soft de-randomization: negates every LLR where the keystream bit is one.
pub fn derandomize_soft(llr: &LlrVector) -> Result<LlrVector> {
    check_block(llr.len())?;
    let ks = keystream_block();
    let values = llr
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| if ks.get(i) { -v } else { v })
        .collect();
    LlrVector::new(values)
}

/// Sign-flips received real samples in place, block by block, over any length.
pub fn derandomize_samples(samples: &mut [f64]) {
    let ks = keystream_block();
    for (i, s) in samples.iter_mut().enumerate() {
        if ks.get(i % BLOCK_BITS) {
            *s = -*s;
        }
    }
}
