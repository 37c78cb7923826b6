//! Nearest-codeword search around a word.
//!
//! A codeword `c` at distance `d` from `s` differs from `s` in at most
//! `⌊d/2⌋` positions of one of its halves. Enumerating the left-half (resp.
//! right-half) error pattern `e` by increasing weight through `G_L` (resp.
//! `G_R`) therefore meets every codeword at distance `d` once `w` reaches
//! `⌈d/2⌉`.

use alloc::vec::Vec;

use super::combos::{binomial, scan};
use super::{join_key, key_to_word, DistanceReport, NearestSet, SearchParams};
use crate::bits::BitWord;
use crate::code::{HalfTables, LinearCode};
use crate::error::{Error, Result};

/// Encodings spent by a search that runs through half weight `w_max`.
pub fn ncs_cost(k: usize, w_max: usize) -> u128 {
    (0..=w_max.min(k))
        .map(|w| binomial(k, w))
        .fold(0u128, |a, b| a.saturating_add(b.saturating_mul(2)))
}

struct Split<'a> {
    tables: &'a HalfTables,
    k: usize,
    s_left: u64,
    s_right: u64,
    /// `s_R ⊕ parity_L(s_L)`: residual of the left reference codeword.
    t_left: u64,
    /// `s_L ⊕ parity_R(s_R)`: residual of the right reference codeword.
    t_right: u64,
}

impl<'a> Split<'a> {
    fn new(code: &'a LinearCode, s: &BitWord) -> Result<Self> {
        let tables = code.half_tables()?;
        if s.len() != code.n() {
            return Err(Error::LengthMismatch {
                expected: code.n(),
                actual: s.len(),
            });
        }
        let k = code.k();
        let s_left = s.read_u64(0, k);
        let s_right = s.read_u64(k, k);
        Ok(Self {
            tables,
            k,
            s_left,
            s_right,
            t_left: s_right ^ tables.left_parity(s_left),
            t_right: s_left ^ tables.right_parity(s_right),
        })
    }

    /// Offers every codeword whose left (then right) half is at distance `w` from `s`.
    fn scan_weight(&self, w: usize, best: NearestSet) -> NearestSet {
        let cap = best.cap();
        let (k, s_left, s_right, t_left, t_right) = (self.k, self.s_left, self.s_right, self.t_left, self.t_right);
        let merge = |a: NearestSet, b: NearestSet| a.merge(b);
        // seeding every worker with the current radius keeps the pruning tight
        let seed = NearestSet::empty_at(best.d, cap);
        let left = scan(
            &self.tables.left,
            w,
            || seed.clone(),
            |set, e, acc| {
                let d = w + (acc ^ t_left).count_ones() as usize;
                set.offer(d, || join_key(k, s_left ^ e, acc ^ t_left ^ s_right));
                true
            },
            merge,
        );
        let best = best.merge(left);
        let seed = NearestSet::empty_at(best.d, cap);
        let right = scan(
            &self.tables.right,
            w,
            || seed.clone(),
            |set, e, acc| {
                let d = w + (acc ^ t_right).count_ones() as usize;
                set.offer(d, || join_key(k, acc ^ t_right ^ s_left, s_right ^ e));
                true
            },
            merge,
        );
        best.merge(right)
    }

    /// True when some codeword with a half at distance `w` lies within `limit`.
    fn any_within(&self, w: usize, limit: usize) -> bool {
        let (t_left, t_right) = (self.t_left, self.t_right);
        let hit = |t: u64| {
            move |found: &mut bool, _e: u64, acc: u64| {
                *found |= w + (acc ^ t).count_ones() as usize <= limit;
                !*found
            }
        };
        let or = |a: bool, b: bool| a || b;
        scan(&self.tables.left, w, || false, hit(t_left), or) || scan(&self.tables.right, w, || false, hit(t_right), or)
    }
}

fn run(code: &LinearCode, s: &BitWord, s_max: usize, budget: Option<u128>) -> Result<DistanceReport> {
    if s_max == 0 {
        return Err(Error::InvalidParameter("s_max must be at least 1".into()));
    }
    let split = Split::new(code, s)?;
    let k = split.k;
    let mut best = NearestSet::new(s_max);
    let mut spent: u128 = 0;
    let mut exact = true;
    let mut w = 0;
    // the weight-0 pass always runs, so `best.d` is finite inside the loop
    while w <= k && (w == 0 || w <= best.d.div_ceil(2)) {
        let cost = 2 * binomial(k, w);
        if let Some(limit) = budget {
            if w > 0 && spent.saturating_add(cost) > limit {
                // every codeword at distance d has a half within ⌊d/2⌋
                exact = w > best.d / 2;
                break;
            }
        }
        spent = spent.saturating_add(cost);
        best = split.scan_weight(w, best);
        log::trace!("ncs: w={w} d={} nearest={}", best.d, best.keys.len());
        w += 1;
    }
    let nearest: Vec<BitWord> = best.keys.iter().map(|&key| key_to_word(code, key)).collect();
    Ok(DistanceReport {
        d: best.d,
        nearest,
        exact,
        truncated: best.truncated,
    })
}

/// Exact distance from `s` to the code with up to `params.s_max` nearest codewords.
///
/// Runs to completion regardless of cost; the search through half weight
/// `⌈d/2⌉` takes about `2·Σ C(k, w)` encodings.
pub fn ncs(code: &LinearCode, s: &BitWord, params: &SearchParams) -> Result<DistanceReport> {
    run(code, s, params.s_max, None)
}

/// Like [`ncs`] but stops before a weight pass would exceed
/// `params.cost_ceiling` encodings. When it stops short of half weight
/// `⌊d/2⌋` the distance is only an upper bound and `exact = false`.
pub fn ncs_budgeted(code: &LinearCode, s: &BitWord, params: &SearchParams) -> Result<DistanceReport> {
    run(code, s, params.s_max, Some(params.cost_ceiling))
}

/// True iff no codeword lies within distance `limit` of `s`.
///
/// Enumerates both halves through weight `⌈limit/2⌉`; refuses when that
/// exceeds `cost_ceiling` encodings.
pub fn certify_min_distance(code: &LinearCode, s: &BitWord, limit: usize, cost_ceiling: u128) -> Result<bool> {
    if limit > code.n() {
        return Err(Error::InvalidParameter(alloc::format!(
            "limit {limit} exceeds n = {}",
            code.n()
        )));
    }
    let split = Split::new(code, s)?;
    let top = limit.div_ceil(2).min(split.k);
    let estimate = ncs_cost(split.k, top);
    if estimate > cost_ceiling {
        return Err(Error::CostCeiling {
            estimate,
            ceiling: cost_ceiling,
        });
    }
    Ok(!(0..=top).any(|w| split.any_within(w, limit)))
}
