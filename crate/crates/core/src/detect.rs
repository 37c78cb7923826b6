//! Presence detectors for known sequences and their threshold calibration.
//!
//! Three metrics over received BPSK samples `r` and a ±1 reference `v`:
//! hard correlation `|Σ sgn(r_i) v_i|`, soft correlation `|Σ r_i v_i|`, and
//! the likelihood-ratio metric `Σ ln(1 + exp(−2 v_i r_i / σ²))`, which
//! decreases when the sequence is present.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, RngCore};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::bits::BitWord;
use crate::channel::{modulate, ChannelParams};
use crate::code::LinearCode;
use crate::error::{Error, Result};
use crate::sim::{run_chunks, TrialPlan};
use crate::stats::BinomialEstimate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MetricKind {
    Hard,
    Soft,
    Lrt,
}

impl MetricKind {
    pub const ALL: [MetricKind; 3] = [MetricKind::Hard, MetricKind::Soft, MetricKind::Lrt];

    /// Whether large metric values indicate presence.
    pub fn higher_means_present(self) -> bool {
        !matches!(self, MetricKind::Lrt)
    }

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Hard => "hard",
            MetricKind::Soft => "soft",
            MetricKind::Lrt => "lrt",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hard" => Ok(MetricKind::Hard),
            "soft" => Ok(MetricKind::Soft),
            "lrt" | "cm" => Ok(MetricKind::Lrt),
            other => Err(Error::InvalidParameter(alloc::format!("unknown metric `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetectorConfig {
    pub kind: MetricKind,
    /// ±1 symbols of the sought pattern.
    pub reference: Vec<f64>,
    /// Noise variance, used by the LRT metric only.
    pub sigma2: f64,
    pub threshold: f64,
}

impl DetectorConfig {
    /// Detector for `pattern` (bit 0 ↦ +1) with the given threshold.
    pub fn new(kind: MetricKind, pattern: &BitWord, sigma2: f64, threshold: f64) -> Result<Self> {
        let cfg = Self {
            kind,
            reference: modulate(pattern),
            sigma2,
            threshold,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.reference.is_empty() {
            return Err(Error::InvalidParameter("empty detector reference".into()));
        }
        if self.kind == MetricKind::Lrt && !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!(
                "LRT needs a positive noise variance, got {}",
                self.sigma2
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.reference.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reference.is_empty()
    }

    /// Same detector with another threshold.
    pub fn with_threshold(&self, threshold: f64) -> Self {
        Self {
            threshold,
            ..self.clone()
        }
    }
}

#[inline]
fn softplus(x: f64) -> f64 {
    // ln(1 + e^x) without overflow
    x.max(0.0) + libm::log1p(libm::exp(-x.abs()))
}

/// Metric of `received` against the reference, without length checks.
#[inline]
pub fn metric_unchecked(cfg: &DetectorConfig, received: &[f64]) -> f64 {
    let pairs = cfg.reference.iter().zip(received);
    match cfg.kind {
        MetricKind::Hard => pairs
            .map(|(&v, &r)| if r >= 0.0 { v } else { -v })
            .sum::<f64>()
            .abs(),
        MetricKind::Soft => pairs.map(|(&v, &r)| v * r).sum::<f64>().abs(),
        MetricKind::Lrt => {
            let g = -2.0 / cfg.sigma2;
            pairs.map(|(&v, &r)| softplus(g * v * r)).sum()
        }
    }
}

fn check_len(cfg: &DetectorConfig, received: &[f64]) -> Result<()> {
    if received.len() != cfg.len() {
        return Err(Error::LengthMismatch {
            expected: cfg.len(),
            actual: received.len(),
        });
    }
    Ok(())
}

pub fn metric(cfg: &DetectorConfig, received: &[f64]) -> Result<f64> {
    check_len(cfg, received)?;
    Ok(metric_unchecked(cfg, received))
}

/// Whether a metric value counts as "present" under threshold `threshold`.
#[inline]
pub fn is_present(kind: MetricKind, value: f64, threshold: f64) -> bool {
    if kind.higher_means_present() {
        value >= threshold
    } else {
        value <= threshold
    }
}

pub fn decide(cfg: &DetectorConfig, received: &[f64]) -> Result<bool> {
    Ok(is_present(cfg.kind, metric(cfg, received)?, cfg.threshold))
}

/// Offsets `o` where the window `samples[o..o + len]` is declared present.
pub fn scan_start(samples: &[f64], cfg: &DetectorConfig) -> Vec<usize> {
    let len = cfg.len();
    if samples.len() < len {
        return Vec::new();
    }
    (0..=samples.len() - len)
        .filter(|&o| is_present(cfg.kind, metric_unchecked(cfg, &samples[o..o + len]), cfg.threshold))
        .collect()
}

/// Threshold chosen from absent-hypothesis metric samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Calibration {
    pub threshold: f64,
    /// Empirical false-alarm rate of `threshold` on the calibration samples.
    pub achieved: BinomialEstimate,
    pub target_pfa: f64,
    /// Fewer than `10 / target_pfa` samples were available.
    pub low_confidence: bool,
    /// The target asks for zero false alarms on this many samples, so the
    /// threshold sits just beyond the most extreme absent metric.
    pub infeasible: bool,
}

/// Picks the threshold whose empirical false-alarm rate is the largest one
/// not above `target_pfa`.
///
/// With `m = ⌊target · n⌋` allowed false alarms, the threshold is the
/// midpoint between the `(m+1)`-th most present-looking distinct value and
/// the next one; when no further value exists it is placed one unit beyond
/// the extreme. `samples` is sorted in place.
pub fn threshold_from_samples(kind: MetricKind, samples: &mut [f64], target_pfa: f64) -> Result<Calibration> {
    if !(0.0..=1.0).contains(&target_pfa) {
        return Err(Error::Domain {
            name: "target_pfa",
            value: target_pfa,
        });
    }
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no calibration samples".into()));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::InvalidParameter("NaN calibration sample".into()));
    }
    let n = samples.len();
    // most present-looking first
    let higher = kind.higher_means_present();
    samples.sort_unstable_by(|a, b| if higher { b.total_cmp(a) } else { a.total_cmp(b) });
    let allowed = libm::floor(target_pfa * n as f64) as usize;
    let toward = |x: f64, step: f64| if higher { x + step } else { x - step };
    let threshold = if allowed >= n {
        toward(samples[n - 1], -1.0)
    } else {
        let v = samples[allowed];
        // first strictly more present-looking value before position `allowed`
        let bigger = samples[..allowed].iter().rev().find(|&&x| x != v).copied();
        match bigger {
            Some(u) => (u + v) / 2.0,
            None => toward(v, 1.0),
        }
    };
    let fa = samples.iter().filter(|&&x| is_present(kind, x, threshold)).count() as u64;
    Ok(Calibration {
        threshold,
        achieved: BinomialEstimate::new(fa, n as u64),
        target_pfa,
        low_confidence: (n as f64) * target_pfa < 10.0,
        infeasible: allowed == 0,
    })
}

/// What the detector sees when the sought sequence is not there.
#[derive(Clone, Copy, Debug)]
pub enum AbsentModel<'a> {
    /// The first `len` symbols of uniformly random codewords.
    NoisyCodewords(&'a LinearCode),
    /// Noise only, no signal.
    PureNoise,
    /// Windows that straddle the end of an even-length idle run and the
    /// start of `start_seq`, with a uniform split point.
    IdleStart { start_seq: &'a BitWord, idle_start_bit: bool },
}

/// Writes the noiseless absent-hypothesis symbols of one window into `out`.
pub fn absent_signal(model: &AbsentModel<'_>, rng: &mut ChaCha8Rng, out: &mut [f64]) -> Result<()> {
    let len = out.len();
    match model {
        AbsentModel::PureNoise => out.fill(0.0),
        AbsentModel::NoisyCodewords(code) => {
            if code.n() < len {
                return Err(Error::LengthMismatch {
                    expected: len,
                    actual: code.n(),
                });
            }
            let k = code.k();
            let bit = |word: u64, i: usize| (word >> (k - 1 - i)) & 1 == 1;
            match code.half_tables() {
                Ok(t) => {
                    let m = if k == 64 { rng.next_u64() } else { rng.next_u64() & ((1u64 << k) - 1) };
                    let p = t.left_parity(m);
                    for (i, o) in out.iter_mut().enumerate() {
                        let b = if i < k { bit(m, i) } else { bit(p, i - k) };
                        *o = if b { -1.0 } else { 1.0 };
                    }
                }
                Err(_) => {
                    let m = BitWord::from_bits((0..k).map(|_| rng.random_bool(0.5)));
                    let c = code.encode_left(&m)?;
                    for (o, b) in out.iter_mut().zip(c.iter()) {
                        *o = if b { -1.0 } else { 1.0 };
                    }
                }
            }
        }
        AbsentModel::IdleStart {
            start_seq,
            idle_start_bit,
        } => {
            if len < 2 || start_seq.len() < len {
                return Err(Error::InvalidParameter("start windows need len >= 2 and a long enough start sequence".into()));
            }
            // j idle symbols followed by len - j start symbols, 1 <= j < len;
            // the idle run has even length, as in the framing default
            let j = rng.random_range(1..len);
            let idle = BitWord::alternating(2 * len, *idle_start_bit);
            for (i, o) in out.iter_mut().enumerate() {
                let bit = if i < j { idle.get(2 * len - j + i) } else { start_seq.get(i - j) };
                *o = if bit { -1.0 } else { 1.0 };
            }
        }
    }
    Ok(())
}

/// Metric values of `trials` absent-hypothesis windows, in trial order.
pub fn absent_metrics(
    cfg: &DetectorConfig,
    model: &AbsentModel<'_>,
    channel: &ChannelParams,
    trials: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let sigma = channel.sigma();
    let len = cfg.len();
    let plan = TrialPlan::fixed(seed, trials);
    let chunks = run_chunks(&plan, |rng, _, count| -> Result<Vec<f64>> {
        let mut window = alloc::vec![0.0; len];
        let mut out = Vec::with_capacity(count as usize);
        for _ in 0..count {
            absent_signal(model, rng, &mut window)?;
            for x in window.iter_mut() {
                let z: f64 = StandardNormal.sample(rng);
                *x += sigma * z;
            }
            out.push(metric_unchecked(cfg, &window));
        }
        Ok(out)
    });
    let mut all = Vec::with_capacity(trials as usize);
    for c in chunks {
        all.extend(c?);
    }
    Ok(all)
}

/// Monte Carlo threshold for `target_pfa` under `model`.
///
/// The threshold in `cfg` is ignored; the returned calibration carries the
/// new one.
pub fn calibrate_threshold(
    cfg: &DetectorConfig,
    target_pfa: f64,
    model: &AbsentModel<'_>,
    channel: &ChannelParams,
    trials: u64,
    seed: u64,
) -> Result<Calibration> {
    let mut samples = absent_metrics(cfg, model, channel, trials, seed)?;
    let cal = threshold_from_samples(cfg.kind, &mut samples, target_pfa)?;
    if cal.low_confidence {
        log::warn!(
            "{} calibration trials for P_fa = {target_pfa:e}; at least {} recommended",
            trials,
            libm::ceil(10.0 / target_pfa)
        );
    }
    Ok(cal)
}
