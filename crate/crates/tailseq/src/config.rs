//! Campaign configuration read from `key = value` files.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use tailseq_core::detect::MetricKind;
use tailseq_core::framing::{tail, DEFAULT_START_SEQ_HEX};
use tailseq_core::rejection::TerminationMode;
use tailseq_core::BitWord;

use crate::error::{Error, Result};

/// Keys every config file must set.
pub const REQUIRED_KEYS: [&str; 13] = [
    "eb_n0_db",
    "eta",
    "stop_errors",
    "max_trials",
    "seed",
    "ts",
    "detector",
    "modes",
    "n_codewords",
    "max_iter",
    "detector_trials",
    "pfa_target",
    "detection_length",
];

/// Keys with a default.
pub const OPTIONAL_KEYS: [&str; 2] = ["start_seq", "idle_start_bit"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimConfig {
    pub eb_n0_db: Vec<f64>,
    /// Target TC rejection probability; reported, not used by the estimators.
    pub eta: f64,
    pub stop_errors: u64,
    pub max_trials: u64,
    pub seed: u64,
    /// `(label, TS)` pairs; the TS is the transmitted (encapsulated) value.
    #[serde(serialize_with = "ser_ts")]
    pub tail_sequences: Vec<(String, BitWord)>,
    #[serde(serialize_with = "ser_display")]
    pub detector: MetricKind,
    #[serde(serialize_with = "ser_modes")]
    pub modes: Vec<TerminationMode>,
    pub n_codewords: u32,
    pub max_iter: usize,
    /// Absent and present trials of each detector estimate.
    pub detector_trials: u64,
    pub pfa_target: f64,
    /// Leading DTS bits watched by the tail detector.
    pub detection_length: usize,
    #[serde(serialize_with = "ser_hex")]
    pub start_seq: BitWord,
    pub idle_start_bit: bool,
}

fn ser_ts<S: serde::Serializer>(v: &[(String, BitWord)], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|(l, w)| format!("{l}:{}", w.to_hex())))
}

fn ser_display<S: serde::Serializer>(v: &MetricKind, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(v.name())
}

fn ser_modes<S: serde::Serializer>(v: &[TerminationMode], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|m| m.name()))
}

fn ser_hex<S: serde::Serializer>(v: &BitWord, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_hex())
}

/// Parses `label` (built-in) or `label:hex`.
pub fn parse_ts(entry: &str) -> Result<(String, BitWord)> {
    let entry = entry.trim();
    let (label, hex) = match entry.split_once(':') {
        Some((l, h)) => (l.trim(), h.trim()),
        None => (
            entry,
            tail::by_label(entry).ok_or_else(|| Error::Config(format!("unknown TS label `{entry}`")))?,
        ),
    };
    let ts = BitWord::from_hex_len(hex, 128).map_err(|e| Error::Config(format!("TS `{label}`: {e}")))?;
    Ok((label.to_string(), ts))
}

fn list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse().map_err(|e| Error::Config(format!("key `{key}`: {e}")))
}

impl SimConfig {
    /// Parses a config file. Blank lines and `#` comments are ignored;
    /// unknown and missing keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut kv = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", no + 1)))?;
            let k = k.trim();
            if !REQUIRED_KEYS.contains(&k) && !OPTIONAL_KEYS.contains(&k) {
                return Err(Error::Config(format!("line {}: unknown key `{k}`", no + 1)));
            }
            if kv.insert(k.to_string(), v.trim().to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key `{k}`", no + 1)));
            }
        }
        if let Some(missing) = REQUIRED_KEYS.iter().find(|k| !kv.contains_key(**k)) {
            return Err(Error::Config(format!("missing key `{missing}`")));
        }
        let get = |k: &str| kv[k].as_str();
        let cfg = Self {
            eb_n0_db: list(get("eb_n0_db")).map(|x| num("eb_n0_db", x)).collect::<Result<_>>()?,
            eta: num("eta", get("eta"))?,
            stop_errors: num("stop_errors", get("stop_errors"))?,
            max_trials: num("max_trials", get("max_trials"))?,
            seed: num("seed", get("seed"))?,
            tail_sequences: list(get("ts")).map(parse_ts).collect::<Result<_>>()?,
            detector: get("detector").parse().map_err(|e| Error::Config(format!("key `detector`: {e}")))?,
            modes: list(get("modes"))
                .map(|m| m.parse().map_err(|e| Error::Config(format!("key `modes`: {e}"))))
                .collect::<Result<_>>()?,
            n_codewords: num("n_codewords", get("n_codewords"))?,
            max_iter: num("max_iter", get("max_iter"))?,
            detector_trials: num("detector_trials", get("detector_trials"))?,
            pfa_target: num("pfa_target", get("pfa_target"))?,
            detection_length: num("detection_length", get("detection_length"))?,
            start_seq: match kv.get("start_seq") {
                Some(h) => BitWord::from_hex_len(h, 64).map_err(|e| Error::Config(format!("key `start_seq`: {e}")))?,
                None => BitWord::from_hex(DEFAULT_START_SEQ_HEX)?,
            },
            idle_start_bit: match kv.get("idle_start_bit").map(String::as_str) {
                None | Some("0") => false,
                Some("1") => true,
                Some(other) => return Err(Error::Config(format!("key `idle_start_bit`: expected 0 or 1, got `{other}`"))),
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.eb_n0_db.is_empty() || self.eb_n0_db.iter().any(|x| !x.is_finite()) {
            return bad("eb_n0_db must be a non-empty list of finite values");
        }
        if self.stop_errors == 0 || self.max_trials == 0 || self.detector_trials == 0 {
            return bad("stop_errors, max_trials and detector_trials must be at least 1");
        }
        if self.modes.is_empty() {
            return bad("modes must not be empty");
        }
        let needs_ts = self.modes.iter().any(|m| *m != TerminationMode::NoTs);
        if needs_ts && self.tail_sequences.is_empty() {
            return bad("ts must list at least one tail sequence for db/lrtb modes");
        }
        if self.n_codewords == 0 {
            return bad("n_codewords must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.pfa_target) || !(0.0..=1.0).contains(&self.eta) {
            return bad("pfa_target and eta must lie in [0, 1]");
        }
        if !(1..=128).contains(&self.detection_length) {
            return bad("detection_length must be in 1..=128");
        }
        if self.start_seq.len() < 2 {
            return bad("start_seq too short");
        }
        Ok(())
    }

    /// Renders the config in the file format; `parse(to_text())` round-trips.
    pub fn to_text(&self) -> String {
        let join = |it: Vec<String>| it.join(", ");
        let mut s = String::new();
        let _ = writeln!(s, "eb_n0_db = {}", join(self.eb_n0_db.iter().map(f64::to_string).collect()));
        let _ = writeln!(s, "eta = {:e}", self.eta);
        let _ = writeln!(s, "stop_errors = {}", self.stop_errors);
        let _ = writeln!(s, "max_trials = {}", self.max_trials);
        let _ = writeln!(s, "seed = {}", self.seed);
        let ts = self.tail_sequences.iter().map(|(l, w)| format!("{l}:{}", w.to_hex())).collect();
        let _ = writeln!(s, "ts = {}", join(ts));
        let _ = writeln!(s, "detector = {}", self.detector);
        let _ = writeln!(s, "modes = {}", join(self.modes.iter().map(|m| m.to_string()).collect()));
        let _ = writeln!(s, "n_codewords = {}", self.n_codewords);
        let _ = writeln!(s, "max_iter = {}", self.max_iter);
        let _ = writeln!(s, "detector_trials = {}", self.detector_trials);
        let _ = writeln!(s, "pfa_target = {:e}", self.pfa_target);
        let _ = writeln!(s, "detection_length = {}", self.detection_length);
        let _ = writeln!(s, "start_seq = {}", self.start_seq.to_hex());
        let _ = writeln!(s, "idle_start_bit = {}", u8::from(self.idle_start_bit));
        s
    }
}
