//! BPSK over AWGN and LLR formation.
//!
//! Noise samples come from `rand_distr::StandardNormal` (ziggurat) scaled by
//! `σ`. Randomness is organized as per-trial substreams of a ChaCha8
//! generator keyed by `(master_seed, trial_index)`, so results do not depend
//! on how trials are split across workers.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::bits::BitWord;
use crate::decoder::LlrVector;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelParams {
    pub eb_n0_db: f64,
    pub rate: f64,
}

impl ChannelParams {
    pub fn new(eb_n0_db: f64, rate: f64) -> Result<Self> {
        if !eb_n0_db.is_finite() {
            return Err(Error::Domain {
                name: "eb_n0_db",
                value: eb_n0_db,
            });
        }
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::Domain { name: "rate", value: rate });
        }
        Ok(Self { eb_n0_db, rate })
    }

    /// `σ² = 1 / (2 R 10^(Eb/N0 / 10))` for unit-energy symbols.
    pub fn sigma2(&self) -> f64 {
        1.0 / (2.0 * self.rate * libm::pow(10.0, self.eb_n0_db / 10.0))
    }

    pub fn sigma(&self) -> f64 {
        libm::sqrt(self.sigma2())
    }

    /// Inverse of [`sigma2`](Self::sigma2).
    pub fn eb_n0_db_from_sigma2(sigma2: f64, rate: f64) -> f64 {
        10.0 * libm::log10(1.0 / (2.0 * rate * sigma2))
    }
}

/// Bit 0 maps to `+1`, bit 1 to `-1`.
pub fn modulate(bits: &BitWord) -> Vec<f64> {
    bits.iter().map(|b| if b { -1.0 } else { 1.0 }).collect()
}

/// Adds `N(0, σ²)` noise to every symbol.
pub fn transmit<R: Rng + ?Sized>(symbols: &[f64], params: &ChannelParams, rng: &mut R) -> Vec<f64> {
    let sigma = params.sigma();
    symbols
        .iter()
        .map(|&s| {
            let n: f64 = StandardNormal.sample(rng);
            s + sigma * n
        })
        .collect()
}

/// In-place variant of [`transmit`] writing into `out`.
pub fn transmit_into<R: Rng + ?Sized>(symbols: &[f64], sigma: f64, rng: &mut R, out: &mut [f64]) {
    for (o, &s) in out.iter_mut().zip(symbols) {
        let n: f64 = StandardNormal.sample(rng);
        *o = s + sigma * n;
    }
}

/// `llr_i = 2 r_i / σ²`.
pub fn llr(received: &[f64], params: &ChannelParams) -> Result<LlrVector> {
    let g = 2.0 / params.sigma2();
    LlrVector::new(received.iter().map(|r| g * r).collect())
}

/// Independent generator for trial `index` under `master_seed`.
pub fn substream(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}
