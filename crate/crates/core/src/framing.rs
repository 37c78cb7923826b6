//! CLTU assembly and receiver-side windowing.
//!
//! A stream is `idle ∥ start sequence ∥ randomized codewords ∥ TS ∥ idle`.
//! The TS is stored as the transmitted (encapsulation-side) value; the
//! decoder sees its de-randomized form, see [`dts_of`].

use alloc::vec::Vec;

use crate::bits::BitWord;
use crate::code::LinearCode;
use crate::error::{Error, Result};
use crate::scrambler::{self, BLOCK_BITS};

/// Start sequence length in bits.
pub const START_SEQ_BITS: usize = 64;

/// Codewords per CLTU in the reference setup.
pub const DEFAULT_N_CODEWORDS: usize = 40;

/// Default start sequence. Only its length is fixed by the link model; this
/// is the 64-bit start sequence CCSDS pairs with the LDPC telecommand codes.
pub const DEFAULT_START_SEQ_HEX: &str = "034776C7272895B0";

/// Encapsulation-side tail sequences used in the reference experiments.
pub mod tail {
    /// Randomized idle pattern (no dedicated TS).
    pub const IDLE: &str = "AA6CCB0F3DBC53A039DC7AF4640B5D95";
    /// The standard CCSDS tail sequence.
    pub const CCSDS: &str = "55555556AAAAAAAA5555555555555555";
    /// Published as a distance-12 design; its DTS measures distance 17.
    pub const V12: &str = "0BF39BF5948E906F5EC8B2FA1314E08C";
    /// Receiver distance 18 to the code.
    pub const V18: &str = "00C65E5A68E906F56C892FA1315E08C0";
    /// Distance-19 design transformed so its last half is the idle pattern.
    pub const V19_STAR: &str = "909CC808C0F62FD539DC7AF4640B5D95";

    /// `(label, hex)` pairs in a fixed order.
    pub const ALL: [(&str, &str); 5] = [
        ("idle", IDLE),
        ("ccsds", CCSDS),
        ("v12", V12),
        ("v18", V18),
        ("v19star", V19_STAR),
    ];

    pub fn by_label(label: &str) -> Option<&'static str> {
        ALL.iter().find(|(l, _)| *l == label).map(|(_, h)| *h)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CltuConfig {
    pub start_seq: BitWord,
    pub n_codewords: usize,
    /// Transmitted TS block, appended verbatim (not randomized again).
    pub ts: Option<BitWord>,
    pub idle_start_bit: bool,
    /// Idle bits before and after the CLTU.
    pub idle_len: usize,
}

impl Default for CltuConfig {
    fn default() -> Self {
        Self {
            start_seq: BitWord::from_hex(DEFAULT_START_SEQ_HEX).expect("valid constant"),
            n_codewords: DEFAULT_N_CODEWORDS,
            ts: None,
            idle_start_bit: false,
            idle_len: 128,
        }
    }
}

impl CltuConfig {
    pub fn validate(&self) -> Result<()> {
        if self.start_seq.len() != START_SEQ_BITS {
            return Err(Error::LengthMismatch {
                expected: START_SEQ_BITS,
                actual: self.start_seq.len(),
            });
        }
        if self.n_codewords == 0 {
            return Err(Error::InvalidParameter("n_codewords must be at least 1".into()));
        }
        if let Some(ts) = &self.ts {
            if ts.len() != BLOCK_BITS {
                return Err(Error::LengthMismatch {
                    expected: BLOCK_BITS,
                    actual: ts.len(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MarkerKind {
    CltuStart,
    Codeword(usize),
    TailSequence,
    IdleSuffix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Marker {
    pub offset: usize,
    pub kind: MarkerKind,
}

/// An assembled bit stream with ground-truth boundaries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolStream {
    pub bits: BitWord,
    pub markers: Vec<Marker>,
}

impl SymbolStream {
    pub fn cltu_start(&self) -> usize {
        self.markers
            .iter()
            .find(|m| m.kind == MarkerKind::CltuStart)
            .map_or(0, |m| m.offset)
    }

    pub fn marker_offsets(&self) -> Vec<usize> {
        self.markers.iter().map(|m| m.offset).collect()
    }
}

/// Builds the transmitted stream for up to `cfg.n_codewords` messages.
pub fn encapsulate(code: &LinearCode, messages: &[BitWord], cfg: &CltuConfig) -> Result<SymbolStream> {
    cfg.validate()?;
    if code.n() != BLOCK_BITS {
        return Err(Error::Unsupported(alloc::format!(
            "framing uses {BLOCK_BITS}-bit codewords, code has n = {}",
            code.n()
        )));
    }
    if messages.len() > cfg.n_codewords {
        return Err(Error::InvalidParameter(alloc::format!(
            "{} messages exceed N = {}",
            messages.len(),
            cfg.n_codewords
        )));
    }
    let idle = BitWord::alternating(cfg.idle_len, cfg.idle_start_bit);
    let mut parts = Vec::with_capacity(messages.len() + 4);
    let mut markers = Vec::with_capacity(messages.len() + 3);
    let mut offset = cfg.idle_len;
    parts.push(idle.clone());
    markers.push(Marker {
        offset,
        kind: MarkerKind::CltuStart,
    });
    parts.push(cfg.start_seq.clone());
    offset += START_SEQ_BITS;
    for (i, m) in messages.iter().enumerate() {
        markers.push(Marker {
            offset,
            kind: MarkerKind::Codeword(i),
        });
        parts.push(scrambler::randomize(&code.encode_left(m)?)?);
        offset += BLOCK_BITS;
    }
    if let Some(ts) = &cfg.ts {
        markers.push(Marker {
            offset,
            kind: MarkerKind::TailSequence,
        });
        parts.push(ts.clone());
        offset += BLOCK_BITS;
    }
    markers.push(Marker {
        offset,
        kind: MarkerKind::IdleSuffix,
    });
    parts.push(idle);
    let bits = parts.iter().skip(1).fold(parts[0].clone(), |acc, p| acc.concat(p));
    Ok(SymbolStream { bits, markers })
}

/// The TS as seen by the decoder after de-randomization.
pub fn dts_of(ts: &BitWord) -> Result<BitWord> {
    scrambler::randomize(ts)
}

/// Inverse of [`dts_of`]: the transmitted TS that yields a given DTS.
pub fn ts_of_dts(dts: &BitWord) -> Result<BitWord> {
    scrambler::randomize(dts)
}

/// 128-bit windows at `start_offset + 64 + i·128`, stopping at the stream end.
pub fn tail_windows(stream: &SymbolStream, start_offset: usize) -> impl Iterator<Item = BitWord> + '_ {
    let len = stream.bits.len();
    let first = start_offset.saturating_add(START_SEQ_BITS);
    (0..)
        .map(move |i| first + i * BLOCK_BITS)
        .take_while(move |&o| o + BLOCK_BITS <= len)
        .map(move |o| stream.bits.slice(o, BLOCK_BITS))
}
