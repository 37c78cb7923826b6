//! Stochastic local search away from the code.
//!
//! Starting from a weight-1 word, repeatedly flip a position on which `s`
//! agrees with every nearest codeword. Each such flip moves `s` one step
//! further from all of them.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ncs_budgeted, DistanceReport, SearchParams};
use crate::bits::BitWord;
use crate::code::LinearCode;
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    /// No position agrees with all nearest codewords.
    NoCandidates,
    IterationCap,
    /// The distance search hit the cost ceiling before it became exact.
    CostCeiling,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalSearchOutcome {
    pub word: BitWord,
    pub report: DistanceReport,
    pub stop: StopReason,
    /// Word and distance before each flip, then the final pair.
    pub path: Vec<(BitWord, usize)>,
}

impl LocalSearchOutcome {
    pub fn flips(&self) -> usize {
        self.path.len() - 1
    }
}

/// Positions where `s` agrees with every word of `nearest`.
pub fn flip_candidates(s: &BitWord, nearest: &[BitWord]) -> Result<Vec<usize>> {
    let Some(first) = nearest.first() else {
        return Ok(Vec::new());
    };
    let mut ones = first.clone();
    let mut zeros = first.not();
    for c in &nearest[1..] {
        ones = ones.and(c)?;
        zeros = zeros.and(&c.not())?;
    }
    let agree = &ones.and(s)? ^ &zeros.and(&s.not())?;
    Ok(agree.support().collect())
}

/// Runs the search with the seeded generator from `params`.
pub fn local_search(code: &LinearCode, params: &SearchParams) -> Result<LocalSearchOutcome> {
    params.validate()?;
    let n = code.n();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut s = BitWord::unit(n, rng.random_range(0..n));
    let mut path = Vec::new();
    let mut flips = 0;
    loop {
        let report = ncs_budgeted(code, &s, params)?;
        path.push((s.clone(), report.d));
        let stop = if !report.exact {
            Some(StopReason::CostCeiling)
        } else if flips >= params.max_iterations {
            Some(StopReason::IterationCap)
        } else {
            None
        };
        let candidates = flip_candidates(&s, &report.nearest)?;
        let stop = stop.or(candidates.is_empty().then_some(StopReason::NoCandidates));
        if let Some(stop) = stop {
            log::debug!("local search stopped after {flips} flips at d = {}: {stop:?}", report.d);
            return Ok(LocalSearchOutcome {
                word: s,
                report,
                stop,
                path,
            });
        }
        s.flip(candidates[rng.random_range(0..candidates.len())]);
        flips += 1;
    }
}
