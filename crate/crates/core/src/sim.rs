//! Chunked Monte Carlo runner.
//!
//! Trials are grouped in chunks; chunk `i` draws from substream `i` of the
//! master seed, so results do not depend on the number of workers. With the
//! `parallel` feature a wave of chunks runs on rayon before the stopping
//! rule is checked, which bounds the overshoot to one wave.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;

use crate::channel::substream;

/// Chunks evaluated between two checks of the stopping rule.
pub const WAVE: u64 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialPlan {
    pub seed: u64,
    pub max_trials: u64,
    /// Stop once this many events were seen (checked between waves).
    pub stop_events: Option<u64>,
    pub chunk: u64,
}

impl TrialPlan {
    pub fn fixed(seed: u64, trials: u64) -> Self {
        Self {
            seed,
            max_trials: trials,
            stop_events: None,
            chunk: 4096,
        }
    }

    pub fn until(seed: u64, max_trials: u64, stop_events: u64) -> Self {
        Self {
            stop_events: Some(stop_events),
            ..Self::fixed(seed, max_trials)
        }
    }

    fn chunk_len(&self, index: u64) -> u64 {
        let start = index * self.chunk;
        self.chunk.min(self.max_trials.saturating_sub(start))
    }

    fn chunks(&self) -> u64 {
        self.max_trials.div_ceil(self.chunk.max(1))
    }
}

/// Trials run and events counted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub trials: u64,
    pub events: u64,
}

fn run_wave<T: Send, F>(plan: &TrialPlan, first: u64, last: u64, f: &F) -> Vec<T>
where
    F: Fn(&mut ChaCha8Rng, u64, u64) -> T + Sync,
{
    let job = |i: u64| f(&mut substream(plan.seed, i), i, plan.chunk_len(i));
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (first..last).into_par_iter().map(job).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (first..last).map(job).collect()
    }
}

/// Runs every chunk and returns the per-chunk results in chunk order.
/// `f(rng, chunk_index, trials_in_chunk)`.
pub fn run_chunks<T: Send, F>(plan: &TrialPlan, f: F) -> Vec<T>
where
    F: Fn(&mut ChaCha8Rng, u64, u64) -> T + Sync,
{
    run_wave(plan, 0, plan.chunks(), &f)
}

/// Runs chunks wave by wave until `plan.stop_events` or `plan.max_trials`.
/// `f` returns the number of events in its chunk.
pub fn run_until<F>(plan: &TrialPlan, f: F) -> Tally
where
    F: Fn(&mut ChaCha8Rng, u64, u64) -> u64 + Sync,
{
    let total = plan.chunks();
    let mut tally = Tally::default();
    let mut next = 0;
    while next < total {
        let last = (next + WAVE).min(total);
        let events: u64 = run_wave(plan, next, last, &f).into_iter().sum();
        tally.events += events;
        tally.trials += (next..last).map(|i| plan.chunk_len(i)).sum::<u64>();
        next = last;
        if plan.stop_events.is_some_and(|s| tally.events >= s) {
            break;
        }
    }
    tally
}
