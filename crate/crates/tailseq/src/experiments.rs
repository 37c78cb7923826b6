//! Monte Carlo estimators for the probabilities entering the TC-rejection
//! bounds, ROC curves, and the full campaign.

use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use tailseq_core::channel::{modulate, ChannelParams};
use tailseq_core::decoder::{BatchMinSumDecoder, MinSumConfig, LANES};
use tailseq_core::detect::{self, AbsentModel, Calibration, DetectorConfig, MetricKind};
use tailseq_core::framing::{dts_of, tail};
use tailseq_core::rejection::{compose_rejection, RejectionInputs, TerminationMode};
use tailseq_core::sim::{run_chunks, run_until, Tally, TrialPlan};
use tailseq_core::stats::BinomialEstimate;
use tailseq_core::{BitWord, DecodeOutcome, LinearCode};

use crate::config::SimConfig;
use crate::error::Result;

/// Stopping rule and seed of one estimator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McParams {
    pub seed: u64,
    pub max_trials: u64,
    pub stop_errors: u64,
    pub max_iter: usize,
}

impl McParams {
    pub fn plan(&self) -> TrialPlan {
        TrialPlan::until(self.seed, self.max_trials, self.stop_errors)
    }
}

impl Default for McParams {
    fn default() -> Self {
        Self {
            seed: 1,
            max_trials: 1_000_000,
            stop_errors: 100,
            max_iter: 100,
        }
    }
}

/// One estimated probability.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateRecord {
    pub quantity: String,
    pub eb_n0_db: f64,
    pub estimate: f64,
    pub trials: u64,
    pub events: u64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub runtime_s: f64,
    pub seed: u64,
    /// The trial cap was reached before the requested number of events.
    pub low_confidence: bool,
}

impl EstimateRecord {
    pub fn from_tally(quantity: impl Into<String>, eb_n0_db: f64, tally: Tally, plan: &TrialPlan, started: Instant) -> Self {
        let b = BinomialEstimate::new(tally.events, tally.trials);
        Self {
            quantity: quantity.into(),
            eb_n0_db,
            estimate: b.estimate,
            trials: tally.trials,
            events: tally.events,
            ci_low: b.ci_low,
            ci_high: b.ci_high,
            runtime_s: started.elapsed().as_secs_f64(),
            seed: plan.seed,
            low_confidence: plan.stop_events.is_some_and(|s| tally.events < s),
        }
    }

    /// A fixed value with no sampling behind it.
    pub fn exact(quantity: impl Into<String>, eb_n0_db: f64, value: f64) -> Self {
        Self {
            quantity: quantity.into(),
            eb_n0_db,
            estimate: value,
            trials: 0,
            events: 0,
            ci_low: value,
            ci_high: value,
            runtime_s: 0.0,
            seed: 0,
            low_confidence: false,
        }
    }

    pub fn binomial(&self) -> BinomialEstimate {
        BinomialEstimate::new(self.events, self.trials)
    }
}

fn gaussian_frame(symbols: &[f64], sigma: f64, gain: f64, rng: &mut ChaCha8Rng, out: &mut [f64]) {
    for (o, &s) in out.iter_mut().zip(symbols) {
        let z: f64 = StandardNormal.sample(rng);
        *o = gain * (s + sigma * z);
    }
}

/// Runs `count` decodes in batches of [`LANES`]. `prepare` fills one LLR
/// frame and returns what `event` needs to classify its outcome.
fn decode_events<T, P, E>(code: &LinearCode, max_iter: usize, rng: &mut ChaCha8Rng, count: u64, mut prepare: P, event: E) -> u64
where
    P: FnMut(&mut ChaCha8Rng, &mut [f64]) -> T,
    E: Fn(&T, &DecodeOutcome) -> bool,
{
    let mut dec = BatchMinSumDecoder::new(code, MinSumConfig::default());
    let mut frames = vec![vec![0.0; code.n()]; LANES];
    let mut tags = Vec::with_capacity(LANES);
    let mut left = count;
    let mut events = 0;
    while left > 0 {
        let b = (left as usize).min(LANES);
        tags.clear();
        for f in frames.iter_mut().take(b) {
            tags.push(prepare(rng, f));
        }
        let refs: Vec<&[f64]> = frames[..b].iter().map(Vec::as_slice).collect();
        let outs = dec.decode_batch(&refs, max_iter).expect("frames sized to the code");
        events += tags.iter().zip(&outs).filter(|(t, o)| event(t, o)).count() as u64;
        left -= b as u64;
    }
    events
}

/// Codeword error rate: random messages, any outcome other than the sent
/// codeword (failure or wrong codeword) is an error.
pub fn estimate_cer(code: &LinearCode, eb_n0_db: f64, mc: &McParams) -> Result<EstimateRecord> {
    let started = Instant::now();
    let ch = ChannelParams::new(eb_n0_db, code.rate())?;
    let (sigma, gain) = (ch.sigma(), 2.0 / ch.sigma2());
    let k = code.k();
    code.encode_left(&BitWord::zeros(k))?;
    let plan = mc.plan();
    let tally = run_until(&plan, |rng, _, count| {
        decode_events(
            code,
            mc.max_iter,
            rng,
            count,
            |rng, frame| {
                let m = BitWord::from_bits((0..k).map(|_| rng.random_bool(0.5)));
                let c = code.encode_left(&m).expect("left form checked");
                gaussian_frame(&modulate(&c), sigma, gain, rng, frame);
                c
            },
            |sent, o| !o.converged() || o.word != *sent,
        )
    });
    Ok(EstimateRecord::from_tally("cer", eb_n0_db, tally, &plan, started))
}

/// Probability that the decoder converges to some codeword on the noisy
/// receiver-side word `dts`.
pub fn estimate_p_ds(code: &LinearCode, dts: &BitWord, eb_n0_db: f64, mc: &McParams, quantity: &str) -> Result<EstimateRecord> {
    let started = Instant::now();
    if dts.len() != code.n() {
        return Err(tailseq_core::Error::LengthMismatch {
            expected: code.n(),
            actual: dts.len(),
        }
        .into());
    }
    let ch = ChannelParams::new(eb_n0_db, code.rate())?;
    let (sigma, gain) = (ch.sigma(), 2.0 / ch.sigma2());
    let symbols = modulate(dts);
    let plan = mc.plan();
    let tally = run_until(&plan, |rng, _, count| {
        decode_events(
            code,
            mc.max_iter,
            rng,
            count,
            |rng, frame| gaussian_frame(&symbols, sigma, gain, rng, frame),
            |_, o| o.converged(),
        )
    });
    Ok(EstimateRecord::from_tally(quantity, eb_n0_db, tally, &plan, started))
}

/// Calibrated detector and its two error probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectorEstimate {
    pub detector: DetectorConfig,
    pub calibration: Calibration,
    pub p_md: EstimateRecord,
    pub p_fa: EstimateRecord,
}

/// Sizes of a detector evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorTrials {
    pub target_pfa: f64,
    pub absent: u64,
    pub present: u64,
    pub stop_errors: u64,
    pub seed: u64,
}

/// Calibrates `kind` on `pattern` for `target_pfa` under `model`, then
/// measures the miss rate on noisy copies of `pattern`.
///
/// The false-alarm record is the rate achieved on the calibration samples.
pub fn estimate_detector_probs(
    kind: MetricKind,
    pattern: &BitWord,
    model: &AbsentModel<'_>,
    eb_n0_db: f64,
    rate: f64,
    trials: &DetectorTrials,
    label: &str,
) -> Result<DetectorEstimate> {
    let started = Instant::now();
    let ch = ChannelParams::new(eb_n0_db, rate)?;
    let base = DetectorConfig::new(kind, pattern, ch.sigma2(), 0.0)?;
    let calibration = detect::calibrate_threshold(&base, trials.target_pfa, model, &ch, trials.absent, trials.seed)?;
    let detector = base.with_threshold(calibration.threshold);
    let p_fa = EstimateRecord {
        quantity: format!("p_fa_{label}"),
        eb_n0_db,
        estimate: calibration.achieved.estimate,
        trials: calibration.achieved.trials,
        events: calibration.achieved.events,
        ci_low: calibration.achieved.ci_low,
        ci_high: calibration.achieved.ci_high,
        runtime_s: started.elapsed().as_secs_f64(),
        seed: trials.seed,
        low_confidence: calibration.low_confidence,
    };
    let started = Instant::now();
    let plan = TrialPlan::until(trials.seed ^ 0x5EED_0F_9E5E_57, trials.present, trials.stop_errors);
    let symbols = modulate(pattern);
    let sigma = ch.sigma();
    let tally = run_until(&plan, |rng, _, count| {
        let mut r = vec![0.0; symbols.len()];
        (0..count)
            .filter(|_| {
                gaussian_frame(&symbols, sigma, 1.0, rng, &mut r);
                !detect::is_present(kind, detect::metric_unchecked(&detector, &r), detector.threshold)
            })
            .count() as u64
    });
    let p_md = EstimateRecord::from_tally(format!("p_md_{label}"), eb_n0_db, tally, &plan, started);
    Ok(DetectorEstimate {
        detector,
        calibration,
        p_md,
        p_fa,
    })
}

/// One point of an ROC curve.
#[derive(Clone, Debug, PartialEq)]
pub struct RocPoint {
    pub eb_n0_db: f64,
    pub metric: MetricKind,
    pub target_pfa: f64,
    pub threshold: f64,
    pub p_fa: BinomialEstimate,
    pub p_d: BinomialEstimate,
    pub seed: u64,
}

/// Sizes and grid of an ROC run.
#[derive(Clone, Debug, PartialEq)]
pub struct RocParams {
    pub trials_absent: u64,
    pub trials_present: u64,
    pub pfa_grid: Vec<f64>,
    pub seed: u64,
}

/// ROC curves of every metric in `metrics` at one `E_b/N_0`.
///
/// All metrics see the same noisy windows, so their curves differ only by
/// the metric.
pub fn roc(
    pattern: &BitWord,
    metrics: &[MetricKind],
    model: &AbsentModel<'_>,
    eb_n0_db: f64,
    rate: f64,
    params: &RocParams,
) -> Result<Vec<RocPoint>> {
    let ch = ChannelParams::new(eb_n0_db, rate)?;
    let sigma = ch.sigma();
    let detectors: Vec<DetectorConfig> = metrics
        .iter()
        .map(|&k| DetectorConfig::new(k, pattern, ch.sigma2(), 0.0))
        .collect::<std::result::Result<_, _>>()?;
    let len = pattern.len();
    let symbols = modulate(pattern);
    let sample = |present: bool, trials: u64, seed: u64| -> Result<Vec<Vec<f64>>> {
        let chunks = run_chunks(&TrialPlan::fixed(seed, trials), |rng, _, count| {
            let mut w = vec![0.0; len];
            let mut out = vec![Vec::with_capacity(count as usize); detectors.len()];
            for _ in 0..count {
                if present {
                    w.copy_from_slice(&symbols);
                } else {
                    detect::absent_signal(model, rng, &mut w)?;
                }
                for x in w.iter_mut() {
                    let z: f64 = StandardNormal.sample(rng);
                    *x += sigma * z;
                }
                for (d, o) in detectors.iter().zip(out.iter_mut()) {
                    o.push(detect::metric_unchecked(d, &w));
                }
            }
            Ok::<_, tailseq_core::Error>(out)
        });
        let mut per_metric = vec![Vec::with_capacity(trials as usize); detectors.len()];
        for c in chunks {
            for (all, part) in per_metric.iter_mut().zip(c?) {
                all.extend(part);
            }
        }
        Ok(per_metric)
    };
    let mut absent = sample(false, params.trials_absent, params.seed)?;
    let present = sample(true, params.trials_present, params.seed ^ 0xA11C_E5ED)?;
    let mut points = Vec::new();
    for ((d, a), p) in detectors.iter().zip(absent.iter_mut()).zip(&present) {
        for &target in &params.pfa_grid {
            let cal = detect::threshold_from_samples(d.kind, a, target)?;
            let hits = p.iter().filter(|&&m| detect::is_present(d.kind, m, cal.threshold)).count() as u64;
            points.push(RocPoint {
                eb_n0_db,
                metric: d.kind,
                target_pfa: target,
                threshold: cal.threshold,
                p_fa: cal.achieved,
                p_d: BinomialEstimate::new(hits, p.len() as u64),
                seed: params.seed,
            });
        }
    }
    Ok(points)
}

/// One row of the campaign table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampaignRow {
    pub eb_n0_db: f64,
    pub mode: String,
    pub ts_label: String,
    pub p_fa_s: f64,
    pub p_md_s: f64,
    pub p_fa_t: f64,
    pub p_md_t: f64,
    pub cer: f64,
    pub p_ds_t: f64,
    pub p_ds_i: f64,
    pub n: u32,
    pub p_tcrej: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials_total: u64,
    pub seed: u64,
}

/// Campaign output: the table plus every estimate behind it.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CampaignResult {
    pub rows: Vec<CampaignRow>,
    pub records: Vec<EstimateRecord>,
}

impl CampaignResult {
    pub fn low_confidence(&self) -> bool {
        self.records.iter().any(|r| r.low_confidence)
    }
}

/// Derives an independent seed for one estimator of the campaign.
pub fn derive_seed(master: u64, tag: &str) -> u64 {
    // FNV-1a over the tag, mixed into the master seed
    let h = tag
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3));
    master ^ h.rotate_left(17)
}

fn bound_with_ci(inputs: [&EstimateRecord; 7], n: u32, mode: TerminationMode) -> Result<(f64, f64, f64)> {
    let build = |pick: &dyn Fn(&EstimateRecord) -> f64| RejectionInputs {
        p_fa_s: pick(inputs[0]),
        p_md_s: pick(inputs[1]),
        p_fa_t: pick(inputs[2]),
        p_md_t: pick(inputs[3]),
        cer: pick(inputs[4]),
        p_ds_t: pick(inputs[5]),
        p_ds_i: pick(inputs[6]),
        n,
    };
    // the bound is monotone in every input, so the corner values bracket it
    Ok((
        compose_rejection(&build(&|r| r.estimate), mode)?,
        compose_rejection(&build(&|r| r.ci_low), mode)?,
        compose_rejection(&build(&|r| r.ci_high), mode)?,
    ))
}

/// Runs every estimator of `cfg` and composes the requested bounds.
pub fn run_campaign(code: &LinearCode, cfg: &SimConfig) -> Result<CampaignResult> {
    cfg.validate()?;
    let rate = code.rate();
    let mut result = CampaignResult::default();
    let start_seq = cfg.start_seq.clone();
    let idle_dts = BitWord::from_hex(tail::IDLE)?;
    for (gi, &ebn0) in cfg.eb_n0_db.iter().enumerate() {
        let mc = |tag: &str| McParams {
            seed: derive_seed(cfg.seed, &format!("{tag}/{gi}")),
            max_trials: cfg.max_trials,
            stop_errors: cfg.stop_errors,
            max_iter: cfg.max_iter,
        };
        let det_trials = |tag: &str| DetectorTrials {
            target_pfa: cfg.pfa_target,
            absent: cfg.detector_trials,
            present: cfg.detector_trials,
            stop_errors: cfg.stop_errors,
            seed: derive_seed(cfg.seed, &format!("{tag}/{gi}")),
        };
        log::info!("campaign: Eb/N0 = {ebn0} dB");
        let cer = estimate_cer(code, ebn0, &mc("cer"))?;
        // with no TS the decoder sees the randomized idle pattern
        let p_ds_i = estimate_p_ds(code, &idle_dts, ebn0, &mc("p_ds_i"), "p_ds_i")?;
        let start_model = AbsentModel::IdleStart {
            start_seq: &start_seq,
            idle_start_bit: cfg.idle_start_bit,
        };
        let start = estimate_detector_probs(cfg.detector, &start_seq, &start_model, ebn0, rate, &det_trials("start"), "s")?;
        result.records.extend([cer.clone(), p_ds_i.clone(), start.p_fa.clone(), start.p_md.clone()]);
        let none = EstimateRecord::exact("unused", ebn0, 0.0);

        if cfg.modes.contains(&TerminationMode::NoTs) {
            let inputs = [&start.p_fa, &start.p_md, &none, &none, &cer, &none, &p_ds_i];
            let (p, lo, hi) = bound_with_ci(inputs, cfg.n_codewords, TerminationMode::NoTs)?;
            result.rows.push(row(ebn0, TerminationMode::NoTs, "none", inputs, cfg, (p, lo, hi)));
        }
        for (label, ts) in &cfg.tail_sequences {
            let dts = dts_of(ts)?;
            let p_ds_t = estimate_p_ds(code, &dts, ebn0, &mc(&format!("p_ds_t/{label}")), &format!("p_ds_t_{label}"))?;
            result.records.push(p_ds_t.clone());
            let need_detector = cfg.modes.contains(&TerminationMode::LrtBased);
            let tail_det = if need_detector {
                let window = dts.slice(0, cfg.detection_length);
                let model = AbsentModel::NoisyCodewords(code);
                let d = estimate_detector_probs(
                    cfg.detector,
                    &window,
                    &model,
                    ebn0,
                    rate,
                    &det_trials(&format!("tail/{label}")),
                    &format!("t_{label}"),
                )?;
                result.records.extend([d.p_fa.clone(), d.p_md.clone()]);
                Some(d)
            } else {
                None
            };
            for &mode in &cfg.modes {
                let inputs = match (mode, &tail_det) {
                    (TerminationMode::DecoderBased, _) => [&start.p_fa, &start.p_md, &none, &none, &cer, &p_ds_t, &none],
                    (TerminationMode::LrtBased, Some(d)) => [&start.p_fa, &start.p_md, &d.p_fa, &d.p_md, &cer, &p_ds_t, &none],
                    _ => continue,
                };
                let bound = bound_with_ci(inputs, cfg.n_codewords, mode)?;
                result.rows.push(row(ebn0, mode, label, inputs, cfg, bound));
            }
        }
    }
    Ok(result)
}

fn row(ebn0: f64, mode: TerminationMode, label: &str, inputs: [&EstimateRecord; 7], cfg: &SimConfig, bound: (f64, f64, f64)) -> CampaignRow {
    CampaignRow {
        eb_n0_db: ebn0,
        mode: mode.name().to_string(),
        ts_label: label.to_string(),
        p_fa_s: inputs[0].estimate,
        p_md_s: inputs[1].estimate,
        p_fa_t: inputs[2].estimate,
        p_md_t: inputs[3].estimate,
        cer: inputs[4].estimate,
        p_ds_t: inputs[5].estimate,
        p_ds_i: inputs[6].estimate,
        n: cfg.n_codewords,
        p_tcrej: bound.0,
        ci_low: bound.1,
        ci_high: bound.2,
        trials_total: inputs.iter().map(|r| r.trials).sum(),
        seed: cfg.seed,
    }
}
