//! Flooding min-sum decoding.
//!
//! The decoder also serves as the decoder-based termination detector: a tail
//! sequence is "detected" when decoding fails.

use alloc::vec::Vec;

use crate::bits::BitWord;
use crate::code::LinearCode;
use crate::error::{Error, Result};

use wide::f32x8;

/// Per-symbol log-likelihood ratios; positive means bit 0 is more likely.
#[derive(Clone, Debug, PartialEq)]
pub struct LlrVector(Vec<f64>);

impl LlrVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!("non-finite LLR {v}")));
        }
        Ok(Self(values))
    }

    /// `+magnitude` for zero bits and `-magnitude` for one bits.
    pub fn from_bits(word: &BitWord, magnitude: f64) -> Self {
        Self(word.iter().map(|b| if b { -magnitude } else { magnitude }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    /// Bit 1 where the LLR is negative; exact zeros decide to 0.
    pub fn hard_decision(&self) -> BitWord {
        BitWord::from_bits(self.0.iter().map(|&v| v < 0.0))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0.iter().map(|v| v * factor).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecodeStatus {
    Converged,
    Failure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub status: DecodeStatus,
    /// Hard decision after the last iteration run.
    pub word: BitWord,
    /// Iterations run; zero when the channel decision was already a codeword.
    pub iterations: usize,
}

impl DecodeOutcome {
    pub fn converged(&self) -> bool {
        self.status == DecodeStatus::Converged
    }
}

/// Min-sum settings. The default is plain min-sum (no scaling, no offset).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinSumConfig {
    pub max_iter: usize,
    /// Multiplies every check-to-variable magnitude (normalized min-sum when < 1).
    pub scale: f32,
    /// Subtracted from every check-to-variable magnitude, floored at zero.
    pub offset: f32,
    /// Variable-to-check messages are clipped to `±clip`.
    pub clip: f32,
}

impl Default for MinSumConfig {
    fn default() -> Self {
        Self {
            max_iter: 100,
            scale: 1.0,
            offset: 0.0,
            clip: 1.0e3,
        }
    }
}

/// A min-sum decoder bound to one code, owning its working buffers.
///
/// Edges are stored grouped by check node. Each iteration makes one pass
/// over the checks: variable-to-check messages are formed on the fly from
/// the previous posterior totals, and the new check-to-variable messages are
/// accumulated into the next totals.
#[derive(Clone, Debug)]
pub struct MinSumDecoder {
    n: usize,
    words: usize,
    cfg: MinSumConfig,
    check_ptr: Vec<u32>,
    edge_var: Vec<u32>,
    /// Packed support of each check row, `words` u64s per check.
    check_masks: Vec<u64>,
    c2v: Vec<f32>,
    channel: Vec<f32>,
    total: Vec<f32>,
    next_total: Vec<f32>,
    scratch: Vec<f32>,
    hard: Vec<u64>,
    /// Common check degree when the graph is check-regular.
    regular: Option<usize>,
}

impl MinSumDecoder {
    pub fn new(code: &LinearCode, cfg: MinSumConfig) -> Self {
        let n = code.n();
        let words = n.div_ceil(64);
        let mut check_ptr = Vec::with_capacity(code.check_neighbors().len() + 1);
        let mut edge_var = Vec::new();
        let mut check_masks = Vec::with_capacity(code.check_neighbors().len() * words);
        let mut max_degree = 0;
        check_ptr.push(0);
        for vars in code.check_neighbors() {
            let mut mask = alloc::vec![0u64; words];
            for &v in vars {
                edge_var.push(v as u32);
                mask[v / 64] |= 1u64 << (63 - v % 64);
            }
            check_masks.extend(mask);
            max_degree = max_degree.max(vars.len());
            check_ptr.push(edge_var.len() as u32);
        }
        let edges = edge_var.len();
        let degrees = check_ptr.windows(2).map(|w| w[1] - w[0]);
        let regular = degrees.clone().min().filter(|&d| Some(d) == degrees.max()).map(|d| d as usize);
        Self {
            n,
            words,
            cfg,
            check_ptr,
            edge_var,
            check_masks,
            c2v: alloc::vec![0.0; edges],
            channel: alloc::vec![0.0; n],
            total: alloc::vec![0.0; n],
            next_total: alloc::vec![0.0; n],
            scratch: alloc::vec![0.0; max_degree],
            hard: alloc::vec![0; words],
            regular,
        }
    }

    /// Disables the fixed-degree kernel; used to cross-check the two paths.
    #[doc(hidden)]
    pub fn force_generic(&mut self) {
        self.regular = None;
    }

    pub fn config(&self) -> &MinSumConfig {
        &self.cfg
    }

    /// Decodes with the configured iteration cap.
    pub fn decode(&mut self, llr: &LlrVector) -> Result<DecodeOutcome> {
        self.decode_with(llr, self.cfg.max_iter)
    }

    pub fn decode_with(&mut self, llr: &LlrVector, max_iter: usize) -> Result<DecodeOutcome> {
        if llr.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: llr.len(),
            });
        }
        self.decode_slice(llr.values(), max_iter)
    }

    /// Same as [`decode_with`](Self::decode_with) on a raw slice; values must be finite.
    pub fn decode_slice(&mut self, llr: &[f64], max_iter: usize) -> Result<DecodeOutcome> {
        if llr.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: llr.len(),
            });
        }
        if max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        for (ch, &l) in self.channel.iter_mut().zip(llr) {
            *ch = l as f32;
        }
        self.total.copy_from_slice(&self.channel);
        self.c2v.fill(0.0);
        self.harden();
        if self.syndrome_is_zero() {
            return Ok(self.outcome(DecodeStatus::Converged, 0));
        }
        for iter in 1..=max_iter {
            self.iterate();
            self.harden();
            if self.syndrome_is_zero() {
                return Ok(self.outcome(DecodeStatus::Converged, iter));
            }
        }
        Ok(self.outcome(DecodeStatus::Failure, max_iter))
    }

    fn outcome(&self, status: DecodeStatus, iterations: usize) -> DecodeOutcome {
        DecodeOutcome {
            status,
            word: BitWord::from_words(self.n, &self.hard).expect("sized at construction"),
            iterations,
        }
    }

    fn iterate(&mut self) {
        match self.regular {
            Some(4) => self.iterate_regular::<4>(),
            Some(5) => self.iterate_regular::<5>(),
            Some(6) => self.iterate_regular::<6>(),
            Some(7) => self.iterate_regular::<7>(),
            Some(8) => self.iterate_regular::<8>(),
            _ => self.iterate_generic(),
        }
    }

    fn iterate_regular<const D: usize>(&mut self) {
        let MinSumConfig {
            scale, offset, clip, ..
        } = self.cfg;
        self.next_total.copy_from_slice(&self.channel);
        let total = &self.total;
        let next = &mut self.next_total;
        for (vars, out) in self.edge_var.chunks_exact(D).zip(self.c2v.chunks_exact_mut(D)) {
            let mut msgs = [0f32; D];
            let mut min1 = f32::INFINITY;
            let mut min2 = f32::INFINITY;
            let mut arg = 0;
            let mut negative = false;
            for i in 0..D {
                let m = (total[vars[i] as usize] - out[i]).clamp(-clip, clip);
                msgs[i] = m;
                let a = m.abs();
                negative ^= m < 0.0;
                min2 = min2.min(a.max(min1));
                arg = if a < min1 { i } else { arg };
                min1 = min1.min(a);
            }
            let shape = |x: f32| ((x - offset).max(0.0)) * scale;
            let (m1, m2) = (shape(min1), shape(min2));
            for i in 0..D {
                let mag = if i == arg { m2 } else { m1 };
                let o = if negative ^ (msgs[i] < 0.0) { -mag } else { mag };
                out[i] = o;
                next[vars[i] as usize] += o;
            }
        }
        core::mem::swap(&mut self.total, &mut self.next_total);
    }

    fn iterate_generic(&mut self) {
        let MinSumConfig {
            scale, offset, clip, ..
        } = self.cfg;
        self.next_total.copy_from_slice(&self.channel);
        let total = &self.total;
        let next = &mut self.next_total;
        for c in 0..self.check_ptr.len() - 1 {
            let (lo, hi) = (self.check_ptr[c] as usize, self.check_ptr[c + 1] as usize);
            let vars = &self.edge_var[lo..hi];
            let out = &mut self.c2v[lo..hi];
            let msgs = &mut self.scratch[..hi - lo];
            let mut min1 = f32::INFINITY;
            let mut min2 = f32::INFINITY;
            let mut arg = 0;
            let mut negative = false;
            for (i, ((m, &v), &old)) in msgs.iter_mut().zip(vars).zip(out.iter()).enumerate() {
                *m = (total[v as usize] - old).clamp(-clip, clip);
                let a = m.abs();
                negative ^= *m < 0.0;
                if a < min1 {
                    min2 = min1;
                    min1 = a;
                    arg = i;
                } else if a < min2 {
                    min2 = a;
                }
            }
            let shape = |x: f32| ((x - offset).max(0.0)) * scale;
            let (m1, m2) = (shape(min1), shape(min2));
            for (i, ((o, &m), &v)) in out.iter_mut().zip(msgs.iter()).zip(vars).enumerate() {
                let mag = if i == arg { m2 } else { m1 };
                *o = if negative ^ (m < 0.0) { -mag } else { mag };
                next[v as usize] += *o;
            }
        }
        core::mem::swap(&mut self.total, &mut self.next_total);
    }

    fn harden(&mut self) {
        self.hard.fill(0);
        for (v, &t) in self.total.iter().enumerate() {
            if t < 0.0 {
                self.hard[v / 64] |= 1u64 << (63 - v % 64);
            }
        }
    }

    fn syndrome_is_zero(&self) -> bool {
        self.check_masks.chunks_exact(self.words).all(|mask| {
            let mut x = mask.iter().zip(&self.hard).fold(0u64, |acc, (m, h)| acc ^ (m & h));
            x ^= x >> 32;
            x ^= x >> 16;
            x ^= x >> 8;
            x ^= x >> 4;
            x ^= x >> 2;
            x ^= x >> 1;
            x & 1 == 0
        })
    }
}

/// Frames decoded together by [`BatchMinSumDecoder`].
pub const LANES: usize = 8;

/// Decodes up to [`LANES`] independent frames at once.
///
/// Every lane runs the arithmetic of [`MinSumDecoder`] on its own frame, so
/// outcomes are identical to decoding the frames one at a time; the frames
/// only share SIMD registers.
#[derive(Clone, Debug)]
pub struct BatchMinSumDecoder {
    n: usize,
    cfg: MinSumConfig,
    check_ptr: Vec<u32>,
    edge_var: Vec<u32>,
    c2v: Vec<f32x8>,
    channel: Vec<f32x8>,
    total: Vec<f32x8>,
    next_total: Vec<f32x8>,
    scratch: Vec<f32x8>,
}

impl BatchMinSumDecoder {
    pub fn new(code: &LinearCode, cfg: MinSumConfig) -> Self {
        let mut check_ptr = alloc::vec![0u32];
        let mut edge_var = Vec::new();
        let mut max_degree = 0;
        for vars in code.check_neighbors() {
            edge_var.extend(vars.iter().map(|&v| v as u32));
            check_ptr.push(edge_var.len() as u32);
            max_degree = max_degree.max(vars.len());
        }
        let n = code.n();
        Self {
            n,
            cfg,
            c2v: alloc::vec![f32x8::ZERO; edge_var.len()],
            check_ptr,
            edge_var,
            channel: alloc::vec![f32x8::ZERO; n],
            total: alloc::vec![f32x8::ZERO; n],
            next_total: alloc::vec![f32x8::ZERO; n],
            scratch: alloc::vec![f32x8::ZERO; max_degree],
        }
    }

    pub fn config(&self) -> &MinSumConfig {
        &self.cfg
    }

    /// Decodes each slice in `frames` (at most [`LANES`], each of length n).
    pub fn decode_batch(&mut self, frames: &[&[f64]], max_iter: usize) -> Result<Vec<DecodeOutcome>> {
        if frames.len() > LANES {
            return Err(Error::InvalidParameter(alloc::format!(
                "at most {LANES} frames per batch, got {}",
                frames.len()
            )));
        }
        if max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        if let Some(f) = frames.iter().find(|f| f.len() != self.n) {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: f.len(),
            });
        }
        for (v, ch) in self.channel.iter_mut().enumerate() {
            // idle lanes hold a strong all-zero word and finish at once
            *ch = f32x8::new(core::array::from_fn(|l| frames.get(l).map_or(1.0, |f| f[v] as f32)));
        }
        self.total.copy_from_slice(&self.channel);
        self.c2v.fill(f32x8::ZERO);
        let mut done: [Option<DecodeOutcome>; LANES] = Default::default();
        self.collect_converged(&mut done, 0);
        for iter in 1..=max_iter {
            if done.iter().all(Option::is_some) {
                break;
            }
            self.iterate();
            self.collect_converged(&mut done, iter);
        }
        Ok(done
            .into_iter()
            .take(frames.len())
            .enumerate()
            .map(|(l, o)| {
                o.unwrap_or_else(|| DecodeOutcome {
                    status: DecodeStatus::Failure,
                    word: self.lane_word(l),
                    iterations: max_iter,
                })
            })
            .collect())
    }

    fn lane_word(&self, lane: usize) -> BitWord {
        BitWord::from_bits(self.total.iter().map(|t| t.as_array()[lane] < 0.0))
    }

    fn collect_converged(&self, done: &mut [Option<DecodeOutcome>; LANES], iter: usize) {
        let negative: Vec<u32> = self.total.iter().map(|t| t.simd_lt(f32x8::ZERO).to_bitmask()).collect();
        let mut unsatisfied = 0u32;
        for w in self.check_ptr.windows(2) {
            unsatisfied |= self.edge_var[w[0] as usize..w[1] as usize]
                .iter()
                .fold(0, |acc, &v| acc ^ negative[v as usize]);
        }
        for (l, slot) in done.iter_mut().enumerate() {
            if slot.is_none() && unsatisfied & (1 << l) == 0 {
                *slot = Some(DecodeOutcome {
                    status: DecodeStatus::Converged,
                    word: self.lane_word(l),
                    iterations: iter,
                });
            }
        }
    }

    fn iterate(&mut self) {
        let clip = f32x8::splat(self.cfg.clip);
        let offset = f32x8::splat(self.cfg.offset);
        let scale = f32x8::splat(self.cfg.scale);
        self.next_total.copy_from_slice(&self.channel);
        let total = &self.total;
        let next = &mut self.next_total;
        for w in self.check_ptr.windows(2) {
            let (lo, hi) = (w[0] as usize, w[1] as usize);
            let vars = &self.edge_var[lo..hi];
            let out = &mut self.c2v[lo..hi];
            let msgs = &mut self.scratch[..hi - lo];
            let mut min1 = f32x8::splat(f32::INFINITY);
            let mut min2 = min1;
            let mut negative = f32x8::ZERO;
            for ((m, &v), &old) in msgs.iter_mut().zip(vars).zip(out.iter()) {
                let x = (total[v as usize] - old).fast_max(-clip).fast_min(clip);
                *m = x;
                let a = x.abs();
                negative ^= x.simd_lt(f32x8::ZERO);
                min2 = min2.fast_min(a.fast_max(min1));
                min1 = min1.fast_min(a);
            }
            let m1 = (min1 - offset).fast_max(f32x8::ZERO) * scale;
            let m2 = (min2 - offset).fast_max(f32x8::ZERO) * scale;
            // The edge holding the minimum gets the second minimum; on a tie
            // both minima are equal, so matching by value is exact.
            for ((o, &m), &v) in out.iter_mut().zip(msgs.iter()).zip(vars) {
                let mag = m.abs().simd_eq(min1).select(m2, m1);
                let flip = negative ^ m.simd_lt(f32x8::ZERO);
                let x = flip.select(-mag, mag);
                *o = x;
                next[v as usize] += x;
            }
        }
        core::mem::swap(&mut self.total, &mut self.next_total);
    }
}

/// One-shot plain min-sum decode with a fresh decoder.
pub fn decode_min_sum(code: &LinearCode, llr: &LlrVector, max_iter: usize) -> Result<DecodeOutcome> {
    MinSumDecoder::new(code, MinSumConfig::default()).decode_with(llr, max_iter)
}
