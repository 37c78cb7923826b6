//! Binary linear codes given by a parity-check matrix.

use alloc::vec::Vec;

use crate::bits::BitWord;
use crate::error::{Error, Result};
use crate::matrix::{systematic_forms, BinaryMatrix, SystematicForm, SystematicForms};
use crate::qc::{expand_qc, QcSpec};

/// Packed parity blocks of a rate-1/2 code with `k ≤ 64`.
///
/// Each half of a codeword is a `k`-bit integer whose most significant bit is
/// the first position of the half. `left[i]` is the parity half produced by
/// message bit `i` through `[I | P_L]`; `right[i]` the one produced through
/// `[P_R | I]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfTables {
    pub k: usize,
    pub left: Vec<u64>,
    pub right: Vec<u64>,
}

impl HalfTables {
    /// Parity half of `message · [I | P_L]`.
    #[inline]
    pub fn left_parity(&self, message: u64) -> u64 {
        xor_rows(&self.left, self.k, message)
    }

    /// Parity half of `message · [P_R | I]`.
    #[inline]
    pub fn right_parity(&self, message: u64) -> u64 {
        xor_rows(&self.right, self.k, message)
    }
}

#[inline]
fn xor_rows(rows: &[u64], k: usize, message: u64) -> u64 {
    let mut acc = 0;
    let mut rest = message;
    while rest != 0 {
        let bit = 63 - rest.leading_zeros() as usize;
        rest &= !(1u64 << bit);
        acc ^= rows[k - 1 - bit];
    }
    acc
}

/// An `(n, k)` binary linear code with its systematic generators and Tanner graph.
#[derive(Clone, Debug)]
pub struct LinearCode {
    n: usize,
    k: usize,
    h: BinaryMatrix,
    forms: SystematicForms,
    check_neighbors: Vec<Vec<usize>>,
    var_neighbors: Vec<Vec<usize>>,
    qc_block: Option<usize>,
    halves: Option<HalfTables>,
}

impl LinearCode {
    /// Builds the code from a full-rank parity-check matrix.
    pub fn from_parity_check(h: BinaryMatrix, qc_block: Option<usize>) -> Result<Self> {
        let n = h.cols();
        let forms = systematic_forms(&h)?;
        let k = n - h.rows();
        let check_neighbors: Vec<Vec<usize>> = (0..h.rows()).map(|r| h.row(r).support().collect()).collect();
        let mut var_neighbors = alloc::vec![Vec::new(); n];
        for (c, vars) in check_neighbors.iter().enumerate() {
            for &v in vars {
                var_neighbors[v].push(c);
            }
        }
        if let Some(m) = qc_block {
            if m == 0 || n % m != 0 {
                return Err(Error::InvalidParameter(alloc::format!(
                    "QC block size {m} does not divide n = {n}"
                )));
            }
        }
        let halves = (n == 2 * k && k <= 64 && !forms.left.permuted && !forms.right.permuted).then(|| {
            let g_l = forms.g_left();
            let g_r = forms.g_right();
            HalfTables {
                k,
                left: (0..k).map(|i| g_l.row(i).read_u64(k, k)).collect(),
                right: (0..k).map(|i| g_r.row(i).read_u64(0, k)).collect(),
            }
        });
        Ok(Self {
            n,
            k,
            h,
            forms,
            check_neighbors,
            var_neighbors,
            qc_block,
            halves,
        })
    }

    pub fn from_qc_spec(spec: &QcSpec) -> Result<Self> {
        let h = expand_qc(spec)?;
        Self::from_parity_check(h, Some(spec.block_size))
    }

    /// The CCSDS short (128, 64) telecommand LDPC code.
    pub fn ccsds_128_64() -> Self {
        let code = Self::from_qc_spec(&QcSpec::ccsds_128_64()).expect("built-in code is full rank");
        debug_assert!(code.halves.is_some());
        code
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn parity_check(&self) -> &BinaryMatrix {
        &self.h
    }

    pub fn forms(&self) -> &SystematicForms {
        &self.forms
    }

    pub fn qc_block(&self) -> Option<usize> {
        self.qc_block
    }

    /// Variable indices attached to each check.
    pub fn check_neighbors(&self) -> &[Vec<usize>] {
        &self.check_neighbors
    }

    /// Check indices attached to each variable.
    pub fn var_neighbors(&self) -> &[Vec<usize>] {
        &self.var_neighbors
    }

    /// Packed half tables; only for unpermuted rate-1/2 codes with `k ≤ 64`.
    pub fn half_tables(&self) -> Result<&HalfTables> {
        if self.forms.left.permuted {
            return Err(Error::SingularBlock { form: "left" });
        }
        if self.forms.right.permuted {
            return Err(Error::SingularBlock { form: "right" });
        }
        self.halves.as_ref().ok_or_else(|| {
            Error::Unsupported(alloc::format!(
                "half-split search needs a rate-1/2 code with k <= 64, got ({}, {})",
                self.n,
                self.k
            ))
        })
    }

    fn encode_with(&self, form: &SystematicForm, name: &'static str, message: &BitWord) -> Result<BitWord> {
        if form.permuted {
            return Err(Error::SingularBlock { form: name });
        }
        form.generator.left_mul(message)
    }

    /// `message · [I_k | P_L]`: the message occupies the first `k` positions.
    pub fn encode_left(&self, message: &BitWord) -> Result<BitWord> {
        self.encode_with(&self.forms.left, "left", message)
    }

    /// `message · [P_R | I_k]`: the message occupies the last `k` positions.
    pub fn encode_right(&self, message: &BitWord) -> Result<BitWord> {
        self.encode_with(&self.forms.right, "right", message)
    }

    /// `word · Hᵀ`.
    pub fn syndrome(&self, word: &BitWord) -> Result<BitWord> {
        self.h.mul_transposed(word)
    }

    pub fn is_codeword(&self, word: &BitWord) -> bool {
        self.syndrome(word).map(|s| s.is_zero()).unwrap_or(false)
    }

    /// True when every generator row has even weight, i.e. all codewords do.
    pub fn is_even(&self) -> bool {
        let g = self.forms.g_left();
        (0..g.rows()).all(|i| g.row(i).weight() % 2 == 0)
    }

    /// Assembles a codeword from packed halves (rate-1/2, `k ≤ 64`).
    pub fn join_halves(&self, left: u64, right: u64) -> BitWord {
        let mut w = BitWord::zeros(self.n);
        w.write_u64(0, self.k, left);
        w.write_u64(self.k, self.n - self.k, right);
        w
    }
}

/// Small random codes for tests and oracles.
pub mod toy {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// A random rate-1/2 code `H = [Pᵀ | I_k]` whose left and right systematic
    /// forms both exist. With `even` set, every codeword has even weight.
    pub fn random_rate_half(k: usize, even: bool, seed: u64) -> LinearCode {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let p: Vec<BitWord> = (0..k)
                .map(|_| {
                    let mut row = BitWord::from_bits((0..k).map(|_| rng.random_bool(0.5)));
                    if even && row.weight() % 2 == 0 {
                        row.flip(rng.random_range(0..k));
                    }
                    row
                })
                .collect();
            let p = BinaryMatrix::from_rows(k, p).expect("square");
            if p.rank() < k {
                continue;
            }
            let pt = p.transpose();
            let mut h = BinaryMatrix::zeros(k, 2 * k);
            h.place(0, 0, &pt);
            h.place(0, k, &BinaryMatrix::identity(k));
            let code = LinearCode::from_parity_check(h, None).expect("full rank");
            if code.halves.is_some() {
                return code;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_message(rng: &mut ChaCha8Rng, k: usize) -> BitWord {
        BitWord::from_bits((0..k).map(|_| rng.random_bool(0.5)))
    }

    #[test]
    fn example_codeword_from_right_form() {
        let code = LinearCode::ccsds_128_64();
        let m = BitWord::from_hex("FD15755D75559557").unwrap();
        let c = code.encode_right(&m).unwrap();
        assert_eq!(c.to_hex(), "6FA5DE77A89F2981FD15755D75559557");
        assert!(code.syndrome(&c).unwrap().is_zero());
    }

    #[test]
    fn generators_have_zero_syndrome() {
        let code = LinearCode::ccsds_128_64();
        for g in [code.forms().g_left(), code.forms().g_right()] {
            assert_eq!(g.rows(), 64);
            assert_eq!(g.rank(), 64);
            for i in 0..64 {
                assert!(code.syndrome(g.row(i)).unwrap().is_zero());
            }
        }
        assert!(code.forms().left.column_permutation().is_none());
        assert!(code.forms().right.column_permutation().is_none());
        assert!(code.is_even());
    }

    #[test]
    fn systematic_placement_and_linearity() {
        let code = LinearCode::ccsds_128_64();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(code.encode_left(&BitWord::zeros(64)).unwrap().is_zero());
        for _ in 0..50 {
            let a = random_message(&mut rng, 64);
            let b = random_message(&mut rng, 64);
            let ca = code.encode_left(&a).unwrap();
            assert_eq!(ca.slice(0, 64), a);
            let cr = code.encode_right(&a).unwrap();
            assert_eq!(cr.slice(64, 64), a);
            let cb = code.encode_left(&b).unwrap();
            assert_eq!(&ca ^ &cb, code.encode_left(&(&a ^ &b)).unwrap());
            assert!(code.is_codeword(&cr));
        }
        assert!(matches!(code.encode_left(&BitWord::zeros(63)), Err(Error::LengthMismatch { .. })));
        assert!(code.syndrome(&BitWord::zeros(127)).is_err());
    }

    #[test]
    fn single_bit_syndrome_is_column() {
        let code = LinearCode::ccsds_128_64();
        let m = BitWord::from_hex("0123456789ABCDEF").unwrap();
        let mut c = code.encode_left(&m).unwrap();
        assert!(code.syndrome(&BitWord::zeros(128)).unwrap().is_zero());
        c.flip(0);
        assert_eq!(code.syndrome(&c).unwrap(), code.parity_check().column(0));
    }

    #[test]
    fn half_tables_match_generators() {
        let code = LinearCode::ccsds_128_64();
        let t = code.half_tables().unwrap();
        let m = 0xFD15_755D_7555_9557u64;
        let full = code.encode_right(&BitWord::from_words(64, &[m]).unwrap()).unwrap();
        assert_eq!(t.right_parity(m), full.read_u64(0, 64));
        let full = code.encode_left(&BitWord::from_words(64, &[m]).unwrap()).unwrap();
        assert_eq!(t.left_parity(m), full.read_u64(64, 64));
        assert_eq!(code.join_halves(m, t.left_parity(m)), full);
    }

    #[test]
    fn toy_codes_have_both_forms() {
        for (k, even) in [(5, false), (8, true), (12, false)] {
            let code = toy::random_rate_half(k, even, 3);
            assert_eq!(code.n(), 2 * k);
            assert!(code.half_tables().is_ok());
            assert_eq!(code.is_even(), even || code.is_even());
            if even {
                assert!(code.is_even());
            }
        }
    }
}
