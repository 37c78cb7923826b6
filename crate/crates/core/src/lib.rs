//! Core algorithms for CCSDS telecommand tail-sequence work with the short
//! (128, 64) LDPC code: GF(2) words and matrices, the quasi-cyclic code and
//! its min-sum decoder, the pseudo-randomizer, CLTU framing, BPSK/AWGN
//! channel helpers, tail-sequence search and certification, presence
//! detectors and the TC-rejection bounds.
//!
//! The crate is `no_std` and needs only `alloc`. The `parallel` feature
//! (which implies `std`) splits the exhaustive searches across rayon workers.
#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod bits;
pub mod channel;
pub mod code;
pub mod decoder;
pub mod detect;
pub mod error;
pub mod framing;
pub mod matrix;
pub mod qc;
pub mod rejection;
pub mod scrambler;
pub mod search;
pub mod sim;
pub mod stats;

pub use bits::BitWord;
pub use code::LinearCode;
pub use decoder::{DecodeOutcome, DecodeStatus, LlrVector, MinSumConfig, MinSumDecoder};
pub use error::{Error, Result};
pub use matrix::{BinaryMatrix, SystematicForms};
pub use qc::{expand_qc, BlockToken, QcSpec};
