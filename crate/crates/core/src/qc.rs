//! Quasi-cyclic block specifications and their expansion.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::matrix::BinaryMatrix;

/// One `M × M` block of a quasi-cyclic matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockToken {
    Zero,
    Identity,
    /// `Φ^i`, the identity circularly shifted right by `i` columns.
    Power(usize),
    /// `I ⊕ Φ^i`.
    IdentityPlusPower(usize),
}

impl fmt::Display for BlockToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockToken::Zero => f.write_str("Z"),
            BlockToken::Identity => f.write_str("I"),
            BlockToken::Power(i) => write!(f, "P{i}"),
            BlockToken::IdentityPlusPower(i) => write!(f, "I+P{i}"),
        }
    }
}

impl core::str::FromStr for BlockToken {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let exponent = |e: &str| {
            e.parse::<usize>()
                .map_err(|_| Error::InvalidSpec(format!("bad exponent in token `{t}`")))
        };
        match t {
            "Z" => Ok(BlockToken::Zero),
            "I" => Ok(BlockToken::Identity),
            _ => {
                if let Some(e) = t.strip_prefix("I+P") {
                    Ok(BlockToken::IdentityPlusPower(exponent(e)?))
                } else if let Some(e) = t.strip_prefix('P') {
                    Ok(BlockToken::Power(exponent(e)?))
                } else {
                    Err(Error::InvalidSpec(format!("unknown block token `{t}`")))
                }
            }
        }
    }
}

/// A grid of block tokens with a common circulant size.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QcSpec {
    pub block_size: usize,
    pub grid: Vec<Vec<BlockToken>>,
}

/// Parity-check matrix of the CCSDS short (128, 64) telecommand LDPC code.
pub const CCSDS_128_64_SPEC: &str = "\
M=16
I+P7,P2,P14,P6,Z,P0,P13,I
P6,I+P15,P0,P1,I,Z,P0,P7
P4,P1,I+P15,P14,P11,I,Z,P3
P0,P1,P9,I+P13,P14,P1,I,Z
";

impl QcSpec {
    /// The built-in spec of the (128, 64) code.
    pub fn ccsds_128_64() -> Self {
        Self::parse(CCSDS_128_64_SPEC).expect("built-in spec is well formed")
    }

    /// Parses the text format: an `M=<int>` header followed by one grid row per
    /// line with comma-separated tokens. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidSpec("empty specification".into()))?;
        let block_size = header
            .strip_prefix("M=")
            .and_then(|m| m.trim().parse::<usize>().ok())
            .ok_or_else(|| Error::InvalidSpec(format!("expected `M=<int>` header, got `{header}`")))?;
        let grid = lines
            .map(|l| l.split(',').map(str::parse).collect::<Result<Vec<BlockToken>>>())
            .collect::<Result<Vec<_>>>()?;
        let spec = Self { block_size, grid };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.block_size == 0 {
            return Err(Error::InvalidSpec("block size must be positive".into()));
        }
        let cols = self.grid.first().map_or(0, Vec::len);
        if self.grid.is_empty() || cols == 0 {
            return Err(Error::InvalidSpec("grid is empty".into()));
        }
        for (r, row) in self.grid.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::InvalidSpec(format!(
                    "row {r} has {} tokens, expected {cols}",
                    row.len()
                )));
            }
            for t in row {
                if let BlockToken::Power(i) | BlockToken::IdentityPlusPower(i) = *t {
                    if i >= self.block_size {
                        return Err(Error::InvalidSpec(format!(
                            "exponent {i} out of range for block size {}",
                            self.block_size
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn block_rows(&self) -> usize {
        self.grid.len()
    }

    pub fn block_cols(&self) -> usize {
        self.grid.first().map_or(0, Vec::len)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("M={}\n", self.block_size);
        for row in &self.grid {
            for (i, t) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{t}");
            }
            out.push('\n');
        }
        out
    }
}

fn circulant(m: usize, shift: usize) -> BinaryMatrix {
    let mut b = BinaryMatrix::zeros(m, m);
    for r in 0..m {
        b.set(r, (r + shift) % m, true);
    }
    b
}

fn block(m: usize, token: BlockToken) -> BinaryMatrix {
    match token {
        BlockToken::Zero => BinaryMatrix::zeros(m, m),
        BlockToken::Identity => BinaryMatrix::identity(m),
        BlockToken::Power(i) => circulant(m, i),
        BlockToken::IdentityPlusPower(i) => {
            let mut b = BinaryMatrix::identity(m);
            for r in 0..m {
                let c = (r + i) % m;
                let v = b.get(r, c);
                b.set(r, c, !v);
            }
            b
        }
    }
}

/// Expands the block grid into a `(rows·M) × (cols·M)` binary matrix.
pub fn expand_qc(spec: &QcSpec) -> Result<BinaryMatrix> {
    spec.validate()?;
    let m = spec.block_size;
    let mut h = BinaryMatrix::zeros(spec.block_rows() * m, spec.block_cols() * m);
    for (br, row) in spec.grid.iter().enumerate() {
        for (bc, &t) in row.iter().enumerate() {
            if t != BlockToken::Zero {
                h.place(br * m, bc * m, &block(m, t));
            }
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_expansion_shape_and_weights() {
        let spec = QcSpec::ccsds_128_64();
        assert_eq!(spec.block_size, 16);
        assert_eq!((spec.block_rows(), spec.block_cols()), (4, 8));
        let h = expand_qc(&spec).unwrap();
        assert_eq!((h.rows(), h.cols()), (64, 128));
        // Every block row holds one I⊕Φ block, six single circulants and one zero block.
        assert!(h.row_weights().iter().all(|&w| w == 8));
        let col_weights: Vec<usize> = (0..128).map(|c| h.column(c).weight()).collect();
        assert_eq!(col_weights.iter().sum::<usize>(), 512);
        assert_eq!(h.rank(), 64);
    }

    #[test]
    fn identity_and_self_cancellation() {
        let s = QcSpec { block_size: 3, grid: vec![vec![BlockToken::Identity]] };
        assert_eq!(expand_qc(&s).unwrap(), BinaryMatrix::identity(3));
        let s = QcSpec { block_size: 2, grid: vec![vec![BlockToken::IdentityPlusPower(0)]] };
        assert_eq!(expand_qc(&s).unwrap(), BinaryMatrix::zeros(2, 2));
    }

    #[test]
    fn identity_grid_is_block_diagonal() {
        let s = QcSpec {
            block_size: 4,
            grid: vec![
                vec![BlockToken::Identity, BlockToken::Zero],
                vec![BlockToken::Zero, BlockToken::Identity],
            ],
        };
        assert_eq!(expand_qc(&s).unwrap(), BinaryMatrix::identity(8));
    }

    #[test]
    fn power_is_right_shift() {
        let s = QcSpec { block_size: 3, grid: vec![vec![BlockToken::Power(1)]] };
        let h = expand_qc(&s).unwrap();
        assert_eq!(h, BinaryMatrix::from_strs(&["010", "001", "100"]).unwrap());
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let bad = QcSpec { block_size: 4, grid: vec![vec![BlockToken::Power(4)]] };
        assert!(matches!(expand_qc(&bad), Err(Error::InvalidSpec(_))));
        assert!(QcSpec::parse("M=4\nP4").is_err());
        assert!(QcSpec::parse("M=4\nI,Q1").is_err());
        assert!(QcSpec::parse("4\nI").is_err());
        assert!(QcSpec::parse("M=4\nI,Z\nI").is_err());
        assert!(QcSpec::parse("").is_err());
    }

    #[test]
    fn text_round_trip() {
        let spec = QcSpec::ccsds_128_64();
        assert_eq!(spec.to_text(), CCSDS_128_64_SPEC);
        assert_eq!(QcSpec::parse(&spec.to_text()).unwrap(), spec);
        let commented = "# header\nM=2\n\nI+P1, Z  # trailing\n";
        let s = QcSpec::parse(commented).unwrap();
        assert_eq!(s.grid, vec![vec![BlockToken::IdentityPlusPower(1), BlockToken::Zero]]);
    }
}
