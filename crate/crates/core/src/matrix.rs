//! Dense binary matrices and systematic generator derivation.

use alloc::vec::Vec;
use core::fmt;

use crate::bits::BitWord;
use crate::error::{Error, Result};

/// Row-major dense matrix over GF(2); every row is a packed [`BitWord`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    cols: usize,
    rows: Vec<BitWord>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: (0..rows).map(|_| BitWord::zeros(cols)).collect(),
        }
    }

    pub fn identity(size: usize) -> Self {
        Self {
            cols: size,
            rows: (0..size).map(|i| BitWord::unit(size, i)).collect(),
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitWord>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch {
                expected: cols,
                actual: bad.len(),
            });
        }
        Ok(Self { cols, rows })
    }

    /// Builds a matrix from `0`/`1` strings, one per row. Other characters are ignored.
    pub fn from_strs(rows: &[&str]) -> Result<Self> {
        let parsed: Vec<BitWord> = rows
            .iter()
            .map(|r| BitWord::from_bits(r.chars().filter(|c| *c == '0' || *c == '1').map(|c| c == '1')))
            .collect();
        let cols = parsed.first().map_or(0, BitWord::len);
        Self::from_rows(cols, parsed)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &BitWord {
        &self.rows[i]
    }

    pub fn row_words(&self) -> &[BitWord] {
        &self.rows
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value)
    }

    pub fn column(&self, c: usize) -> BitWord {
        BitWord::from_bits(self.rows.iter().map(|r| r.get(c)))
    }

    pub fn transpose(&self) -> Self {
        Self {
            cols: self.rows(),
            rows: (0..self.cols).map(|c| self.column(c)).collect(),
        }
    }

    /// Number of ones in each row.
    pub fn row_weights(&self) -> Vec<usize> {
        self.rows.iter().map(BitWord::weight).collect()
    }

    /// `word · selfᵀ`: one parity bit per row.
    pub fn mul_transposed(&self, word: &BitWord) -> Result<BitWord> {
        if word.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                actual: word.len(),
            });
        }
        Ok(BitWord::from_bits(
            self.rows.iter().map(|r| r.overlap(word).unwrap_or(0) % 2 == 1),
        ))
    }

    /// `message · self`: XOR of the rows selected by the message bits.
    pub fn left_mul(&self, message: &BitWord) -> Result<BitWord> {
        if message.len() != self.rows() {
            return Err(Error::LengthMismatch {
                expected: self.rows(),
                actual: message.len(),
            });
        }
        let mut out = BitWord::zeros(self.cols);
        for i in message.support() {
            out ^= &self.rows[i];
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        let order: Vec<usize> = (0..self.cols).collect();
        Echelon::reduce(self, &order).pivots.len()
    }

    /// Places `block` with its top-left corner at `(row, col)`.
    pub fn place(&mut self, row: usize, col: usize, block: &BinaryMatrix) {
        for r in 0..block.rows() {
            for c in block.row(r).support() {
                self.rows[row + r].set(col + c, true);
            }
        }
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryMatrix {}x{}", self.rows(), self.cols)?;
        for r in &self.rows {
            for b in r.iter() {
                f.write_str(if b { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Reduced row echelon form with pivot columns picked in a caller-given order.
struct Echelon {
    rows: Vec<BitWord>,
    /// `(row, column)` of each pivot.
    pivots: Vec<(usize, usize)>,
}

impl Echelon {
    fn reduce(m: &BinaryMatrix, column_order: &[usize]) -> Self {
        let mut rows = m.rows.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        for &c in column_order {
            if next == rows.len() {
                break;
            }
            let Some(p) = (next..rows.len()).find(|&r| rows[r].get(c)) else {
                continue;
            };
            rows.swap(next, p);
            let pivot_row = rows[next].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != next && row.get(c) {
                    *row ^= &pivot_row;
                }
            }
            pivots.push((next, c));
            next += 1;
        }
        Self { rows, pivots }
    }
}

/// A generator matrix whose information columns carry an identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystematicForm {
    pub generator: BinaryMatrix,
    /// Column holding message bit `i`, ascending.
    pub info_set: Vec<usize>,
    /// True when the information columns are not the half this form targets.
    pub permuted: bool,
}

impl SystematicForm {
    /// The information set, if it differs from the targeted half.
    pub fn column_permutation(&self) -> Option<&[usize]> {
        self.permuted.then_some(self.info_set.as_slice())
    }
}

/// Left form `[I_k | P_L]` and right form `[P_R | I_k]` of one code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystematicForms {
    pub left: SystematicForm,
    pub right: SystematicForm,
}

impl SystematicForms {
    pub fn g_left(&self) -> &BinaryMatrix {
        &self.left.generator
    }

    pub fn g_right(&self) -> &BinaryMatrix {
        &self.right.generator
    }
}

fn form_from(h: &BinaryMatrix, column_order: &[usize], expected: core::ops::Range<usize>, name: &str) -> SystematicForm {
    let n = h.cols();
    let ech = Echelon::reduce(h, column_order);
    let mut is_pivot = alloc::vec![false; n];
    for &(_, c) in &ech.pivots {
        is_pivot[c] = true;
    }
    let info_set: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
    let rows = info_set
        .iter()
        .map(|&c| {
            let mut g = BitWord::unit(n, c);
            for &(r, pc) in &ech.pivots {
                if ech.rows[r].get(c) {
                    g.set(pc, true);
                }
            }
            g
        })
        .collect();
    let permuted = !info_set.iter().copied().eq(expected);
    if permuted {
        log::warn!("{name} systematic form needed column pivoting; information set {info_set:?}");
    }
    SystematicForm {
        generator: BinaryMatrix { cols: n, rows },
        info_set,
        permuted,
    }
}

/// Derives both systematic generators of the code with parity-check matrix `h`.
///
/// The left form carries the message in columns `[0, k)` and pivots the parity
/// part on `[k, n)`; the right form carries the message in the last `k` columns. When the preferred block is singular, pivots spill into the other
/// half, the information set is recorded and a warning is logged.
pub fn systematic_forms(h: &BinaryMatrix) -> Result<SystematicForms> {
    let r = h.rows();
    let n = h.cols();
    let rank = h.rank();
    if rank < r {
        return Err(Error::RankDeficient { rank, rows: r });
    }
    let k = n - r;
    let left_order: Vec<usize> = (k..n).chain(0..k).collect();
    let right_order: Vec<usize> = (0..r).chain(r..n).collect();
    let left = form_from(h, &left_order, 0..k, "left");
    let right = form_from(h, &right_order, r..n, "right");
    Ok(SystematicForms { left, right })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_symmetric_code() {
        let h = BinaryMatrix::from_strs(&["1010", "0101"]).unwrap();
        let f = systematic_forms(&h).unwrap();
        let expected = BinaryMatrix::from_strs(&["1010", "0101"]).unwrap();
        assert_eq!(f.g_left(), &expected);
        assert_eq!(f.g_right(), &expected);
        assert!(!f.left.permuted && !f.right.permuted);
    }

    #[test]
    fn rank_deficient_is_reported() {
        let h = BinaryMatrix::from_strs(&["1010", "1010"]).unwrap();
        assert_eq!(h.rank(), 1);
        assert_eq!(
            systematic_forms(&h),
            Err(Error::RankDeficient { rank: 1, rows: 2 })
        );
    }

    #[test]
    fn singular_block_falls_back_to_pivoting() {
        // Right block [[1,1],[1,1]] is singular for the left form.
        let h = BinaryMatrix::from_strs(&["1011", "0111"]).unwrap();
        let f = systematic_forms(&h).unwrap();
        assert!(f.left.permuted);
        assert_eq!(f.left.column_permutation().map(<[usize]>::len), Some(2));
        for g in [f.g_left(), f.g_right()] {
            for i in 0..g.rows() {
                assert!(h.mul_transposed(g.row(i)).unwrap().is_zero());
            }
            assert_eq!(g.rank(), 2);
        }
    }

    #[test]
    fn transpose_and_products() {
        let m = BinaryMatrix::from_strs(&["110", "011"]).unwrap();
        let t = m.transpose();
        assert_eq!(t, BinaryMatrix::from_strs(&["10", "11", "01"]).unwrap());
        let v = BitWord::from_bits([true, true, true]);
        assert_eq!(m.mul_transposed(&v).unwrap().to_bools(), [false, false]);
        let msg = BitWord::from_bits([true, true]);
        assert_eq!(m.left_mul(&msg).unwrap().to_bools(), [true, false, true]);
        assert!(m.left_mul(&v).is_err());
        assert_eq!(BinaryMatrix::identity(5).rank(), 5);
    }
}
