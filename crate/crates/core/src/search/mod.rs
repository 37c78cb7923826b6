//! Distance to the code and tail-sequence design.
//!
//! Everything here works on rate-1/2 codes with `k ≤ 64` and both systematic
//! forms, splitting each word into two packed `k`-bit halves.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::bits::BitWord;
use crate::code::LinearCode;
use crate::error::{Error, Result};

mod brute;
mod combos;
mod enumerate;
mod guaranteed;
mod local;
mod ncs;
mod transform;

pub use brute::{brute_force_nearest, BRUTE_FORCE_MAX_K};
pub use enumerate::{enumerate_low_weight, enumeration_cost};
pub use guaranteed::{guaranteed_search, guaranteed_weight, overlap_bound, satisfies_overlap_bounds, GuaranteedOutcome};
pub use local::{flip_candidates, local_search, LocalSearchOutcome, StopReason};
pub use ncs::{certify_min_distance, ncs, ncs_budgeted, ncs_cost};
pub use transform::transform_for_lrt;

/// Default ceiling on the number of encodings an exhaustive step may take.
pub const DEFAULT_COST_CEILING: u128 = 10_000_000_000;

/// Knobs shared by the search algorithms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchParams {
    /// Largest codeword weight the guaranteed search must know about.
    pub w_max: usize,
    /// Random draws before the guaranteed search gives up.
    pub max_attempts: u64,
    /// Flip cap of the local search.
    pub max_iterations: usize,
    /// Cap on the number of nearest codewords kept.
    pub s_max: usize,
    pub seed: u64,
    /// Refuse enumerations above this many encodings.
    pub cost_ceiling: u128,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            w_max: 22,
            max_attempts: 1_000_000,
            max_iterations: 512,
            s_max: 64,
            seed: 0,
            cost_ceiling: DEFAULT_COST_CEILING,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_attempts == 0 || self.max_iterations == 0 || self.s_max == 0 || self.w_max == 0 {
            return Err(Error::InvalidParameter("search counts must be at least 1".into()));
        }
        Ok(())
    }
}

/// Distance from a word to the code and the nearest codewords found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceReport {
    pub d: usize,
    /// Codewords at distance `d`, ascending, at most `s_max` of them (the
    /// smallest ones when more exist).
    pub nearest: Vec<BitWord>,
    /// True when the search radius proves `d` is the global minimum.
    pub exact: bool,
    /// True when codewords at distance `d` were dropped by the cap.
    pub truncated: bool,
}

impl DistanceReport {
    /// `d=<int> exact=<bool> truncated=<bool> nearest=<count>` followed by
    /// one hex codeword per line.
    pub fn render(&self) -> String {
        let mut out = format!(
            "d={} exact={} truncated={} nearest={}\n",
            self.d,
            self.exact,
            self.truncated,
            self.nearest.len()
        );
        for c in &self.nearest {
            let _ = writeln!(out, "{}", c.to_hex());
        }
        out
    }

    /// Inverse of [`render`](Self::render).
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |what: &str| Error::InvalidSpec(format!("distance report: {what}"));
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| bad("empty"))?;
        let mut fields = BTreeMap::new();
        for field in header.split_whitespace() {
            let (k, v) = field.split_once('=').ok_or_else(|| bad("bad header"))?;
            fields.insert(k, v);
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| bad(&format!("missing `{k}`")));
        let flag = |k: &str| match get(k)? {
            "true" => Ok(true),
            "false" => Ok(false),
            v => Err(bad(&format!("`{k}={v}`"))),
        };
        let d = get("d")?.parse().map_err(|_| bad("bad `d`"))?;
        let count: usize = get("nearest")?.parse().map_err(|_| bad("bad `nearest`"))?;
        let nearest = lines.map(BitWord::from_hex).collect::<Result<Vec<_>>>()?;
        if nearest.len() != count {
            return Err(bad("codeword count does not match header"));
        }
        Ok(Self {
            d,
            nearest,
            exact: flag("exact")?,
            truncated: flag("truncated")?,
        })
    }
}

/// Keeps the `cap` smallest keys seen at the smallest distance.
#[derive(Clone, Debug)]
pub(crate) struct NearestSet {
    pub d: usize,
    pub keys: BTreeSet<u128>,
    pub truncated: bool,
    cap: usize,
}

impl NearestSet {
    pub fn new(cap: usize) -> Self {
        Self {
            d: usize::MAX,
            keys: BTreeSet::new(),
            truncated: false,
            cap,
        }
    }

    /// An empty set that only accepts distances up to `d`.
    pub fn empty_at(d: usize, cap: usize) -> Self {
        Self { d, ..Self::new(cap) }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    #[inline]
    pub fn offer(&mut self, d: usize, key: impl FnOnce() -> u128) {
        if d > self.d {
            return;
        }
        if d < self.d {
            self.d = d;
            self.keys.clear();
            self.truncated = false;
        }
        let key = key();
        if self.keys.len() < self.cap {
            self.keys.insert(key);
        } else if !self.keys.contains(&key) {
            let largest = *self.keys.last().expect("cap >= 1");
            self.truncated = true;
            if key < largest {
                self.keys.pop_last();
                self.keys.insert(key);
            }
        }
    }

    pub fn merge(mut self, other: Self) -> Self {
        if other.d < self.d {
            return other.merge(self);
        }
        if other.d == self.d {
            self.truncated |= other.truncated;
            for k in other.keys {
                self.offer(other.d, || k);
            }
        }
        self
    }
}

/// Packs two `k`-bit halves into one ordering key (left half most significant).
#[inline]
pub(crate) fn join_key(k: usize, left: u64, right: u64) -> u128 {
    ((left as u128) << k) | right as u128
}

pub(crate) fn key_to_word(code: &LinearCode, key: u128) -> BitWord {
    let k = code.k();
    let mask = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    code.join_halves((key >> k) as u64, key as u64 & mask)
}

/// Codewords of low weight, grouped by weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodewordList {
    pub n: usize,
    pub k: usize,
    pub by_weight: BTreeMap<usize, Vec<BitWord>>,
    /// Every codeword of weight up to this value is listed.
    pub completeness_bound: usize,
}

impl CodewordList {
    pub fn new(n: usize, k: usize, completeness_bound: usize) -> Self {
        Self {
            n,
            k,
            by_weight: BTreeMap::new(),
            completeness_bound,
        }
    }

    /// Inserts a word, keeping each weight class sorted and duplicate free.
    pub fn insert(&mut self, word: BitWord) -> Result<bool> {
        if word.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: word.len(),
            });
        }
        let class = self.by_weight.entry(word.weight()).or_default();
        match class.binary_search(&word) {
            Ok(_) => Ok(false),
            Err(pos) => {
                class.insert(pos, word);
                Ok(true)
            }
        }
    }

    /// `A(w)` as listed.
    pub fn count(&self, weight: usize) -> usize {
        self.by_weight.get(&weight).map_or(0, Vec::len)
    }

    pub fn len(&self) -> usize {
        self.by_weight.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &BitWord> {
        self.by_weight.values().flatten()
    }

    /// Smallest listed nonzero weight.
    pub fn min_weight(&self) -> Option<usize> {
        self.by_weight.iter().find(|(w, v)| **w > 0 && !v.is_empty()).map(|(w, _)| *w)
    }

    /// Adds every simultaneous cyclic shift of every listed word.
    pub fn close_under_qc(&mut self, block: usize) -> Result<usize> {
        if block == 0 || self.n % block != 0 {
            return Err(Error::InvalidParameter(format!(
                "block size {block} does not divide n = {}",
                self.n
            )));
        }
        let words: Vec<BitWord> = self.iter().cloned().collect();
        let mut added = 0;
        for w in words {
            let mut s = w.qc_shift(block);
            while s != w {
                if self.insert(s.clone())? {
                    added += 1;
                }
                s = s.qc_shift(block);
            }
        }
        Ok(added)
    }

    /// Smallest member of each orbit under simultaneous cyclic shifts.
    pub fn orbit_representatives(&self, block: usize) -> Vec<BitWord> {
        let mut reps = BTreeSet::new();
        for w in self.iter() {
            let mut best = w.clone();
            let mut s = w.qc_shift(block);
            while &s != w {
                if s < best {
                    best = s.clone();
                }
                s = s.qc_shift(block);
            }
            reps.insert(best);
        }
        reps.into_iter().collect()
    }

    /// Header `n=<int> k=<int> complete_to=<int>` then `<weight> <hex>` lines.
    pub fn to_text(&self) -> String {
        let mut out = format!("n={} k={} complete_to={}\n", self.n, self.k, self.completeness_bound);
        for (w, words) in &self.by_weight {
            for c in words {
                let _ = writeln!(out, "{w} {}", c.to_hex());
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidSpec("empty codeword list".into()))?;
        let mut n = None;
        let mut k = None;
        let mut complete = None;
        for field in header.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::InvalidSpec(format!("bad header field `{field}`")))?;
            let value: usize = value
                .parse()
                .map_err(|_| Error::InvalidSpec(format!("bad header value `{field}`")))?;
            match key {
                "n" => n = Some(value),
                "k" => k = Some(value),
                "complete_to" => complete = Some(value),
                _ => return Err(Error::InvalidSpec(format!("unknown header key `{key}`"))),
            }
        }
        let missing = |name: &str| Error::InvalidSpec(format!("header is missing `{name}`"));
        let mut list = Self::new(
            n.ok_or_else(|| missing("n"))?,
            k.ok_or_else(|| missing("k"))?,
            complete.ok_or_else(|| missing("complete_to"))?,
        );
        for line in lines {
            let (w, hex) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::InvalidSpec(format!("bad codeword line `{line}`")))?;
            let w: usize = w
                .parse()
                .map_err(|_| Error::InvalidSpec(format!("bad weight in `{line}`")))?;
            let word = BitWord::from_hex_len(hex.trim(), list.n)?;
            if word.weight() != w {
                return Err(Error::InvalidSpec(format!(
                    "listed weight {w} does not match {}",
                    word.weight()
                )));
            }
            list.insert(word)?;
        }
        Ok(list)
    }
}
