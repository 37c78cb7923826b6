//! On-disk formats: QC specs, codeword lists, distance reports, stream
//! dumps and CSV tables.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use tailseq_core::framing::SymbolStream;
use tailseq_core::search::{CodewordList, DistanceReport};
use tailseq_core::stats::BinomialEstimate;
use tailseq_core::{BitWord, QcSpec};

use crate::error::{Error, Result};
use crate::experiments::{CampaignRow, EstimateRecord, RocPoint};

/// Hex digits per line of a stream dump.
const DUMP_WIDTH: usize = 64;

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_qc_spec(path: &Path) -> Result<QcSpec> {
    Ok(QcSpec::parse(&read_text(path)?)?)
}

pub fn read_codeword_list(path: &Path) -> Result<CodewordList> {
    Ok(CodewordList::parse(&read_text(path)?)?)
}

pub fn read_distance_report(path: &Path) -> Result<DistanceReport> {
    Ok(DistanceReport::parse(&read_text(path)?)?)
}

/// Path of the marker sidecar of a stream dump.
pub fn markers_path(dump: &Path) -> PathBuf {
    let mut p = dump.as_os_str().to_owned();
    p.push(".markers");
    PathBuf::from(p)
}

/// `bits=<len>` then the stream as hex, 64 digits per line.
pub fn render_stream(bits: &BitWord) -> String {
    let hex = bits.to_hex();
    let mut out = format!("bits={}\n", bits.len());
    for chunk in hex.as_bytes().chunks(DUMP_WIDTH) {
        out.push_str(std::str::from_utf8(chunk).expect("hex is ascii"));
        out.push('\n');
    }
    out
}

pub fn parse_stream(text: &str) -> Result<BitWord> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    let len: usize = header
        .trim()
        .strip_prefix("bits=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Config(format!("stream dump: bad header `{header}`")))?;
    let hex: String = lines.collect();
    let padded = BitWord::from_hex(&hex)?;
    if padded.len() != len.div_ceil(4) * 4 {
        return Err(Error::Config(format!(
            "stream dump: header says {len} bits, body has {}",
            padded.len()
        )));
    }
    Ok(padded.slice(0, len))
}

/// Writes the stream dump and its sidecar of marker offsets, one per line.
pub fn write_stream(path: &Path, stream: &SymbolStream) -> Result<PathBuf> {
    write_text(path, &render_stream(&stream.bits))?;
    let sidecar = markers_path(path);
    let offsets: String = stream.marker_offsets().iter().map(|o| format!("{o}\n")).collect();
    write_text(&sidecar, &offsets)?;
    Ok(sidecar)
}

pub fn read_markers(path: &Path) -> Result<Vec<usize>> {
    read_text(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim().parse().map_err(|_| Error::Format {
                path: path.to_path_buf(),
                line: i + 1,
                msg: format!("not an offset: `{l}`"),
            })
        })
        .collect()
}

fn ci(b: &BinomialEstimate) -> String {
    format!("{:e};{:e}", b.ci_low, b.ci_high)
}

#[derive(Serialize)]
struct RocRow<'a> {
    eb_n0_db: f64,
    metric: &'a str,
    threshold: f64,
    p_fa: f64,
    p_fa_ci: String,
    p_d: f64,
    p_d_ci: String,
    trials_absent: u64,
    trials_present: u64,
    seed: u64,
}

/// ROC table; confidence intervals are written as `low;high`.
pub fn write_roc_csv<W: Write>(out: W, points: &[RocPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        w.serialize(RocRow {
            eb_n0_db: p.eb_n0_db,
            metric: p.metric.name(),
            threshold: p.threshold,
            p_fa: p.p_fa.estimate,
            p_fa_ci: ci(&p.p_fa),
            p_d: p.p_d.estimate,
            p_d_ci: ci(&p.p_d),
            trials_absent: p.p_fa.trials,
            trials_present: p.p_d.trials,
            seed: p.seed,
        })?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn write_campaign_csv<W: Write>(out: W, rows: &[CampaignRow]) -> Result<()> {
    write_serialized(out, rows)
}

pub fn write_estimates_csv<W: Write>(out: W, records: &[EstimateRecord]) -> Result<()> {
    write_serialized(out, records)
}

fn write_serialized<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_dump_round_trips_odd_lengths() {
        for len in [1, 2, 6, 64, 130, 333] {
            let bits = BitWord::from_bits((0..len).map(|i| (i * 7 + i / 3) % 5 < 2));
            assert_eq!(parse_stream(&render_stream(&bits)).unwrap(), bits);
        }
        assert!(parse_stream("bits=12\nFF\n").is_err());
        assert!(parse_stream("nope\nFF\n").is_err());
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(markers_path(Path::new("out/s.hex")), PathBuf::from("out/s.hex.markers"));
    }
}
