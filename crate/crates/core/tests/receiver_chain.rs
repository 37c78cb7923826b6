//! End-to-end receiver path through the public API: framing, channel,
//! start detection, de-randomization and decoding.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tailseq_core::channel::{llr, modulate, transmit, ChannelParams};
use tailseq_core::detect::{self, DetectorConfig, MetricKind};
use tailseq_core::framing::{dts_of, encapsulate, tail, tail_windows, CltuConfig};
use tailseq_core::scrambler::{derandomize_samples, derandomize_soft};
use tailseq_core::search::certify_min_distance;
use tailseq_core::{BitWord, LinearCode, LlrVector, MinSumConfig, MinSumDecoder};

fn messages(count: u64) -> Vec<BitWord> {
    (1..=count)
        .map(|i| BitWord::from_words(64, &[i.wrapping_mul(0xD1B5_4A32_D192_ED03)]).unwrap())
        .collect()
}

#[test]
fn noiseless_stream_is_detected_and_decoded() {
    let code = LinearCode::ccsds_128_64();
    let cfg = CltuConfig {
        n_codewords: 5,
        ts: Some(BitWord::from_hex(tail::V18).unwrap()),
        idle_len: 96,
        ..CltuConfig::default()
    };
    let msgs = messages(5);
    let stream = encapsulate(&code, &msgs, &cfg).unwrap();
    let samples = modulate(&stream.bits);

    let start = DetectorConfig::new(MetricKind::Hard, &cfg.start_seq, 1.0, 64.0).unwrap();
    assert_eq!(detect::scan_start(&samples, &start), vec![stream.cltu_start()]);

    let mut dec = MinSumDecoder::new(&code, MinSumConfig::default());
    let blocks: Vec<BitWord> = tail_windows(&stream, stream.cltu_start()).collect();
    assert_eq!(blocks.len(), 6);
    for (m, block) in msgs.iter().zip(&blocks) {
        let soft = derandomize_soft(&LlrVector::from_bits(block, 4.0)).unwrap();
        let out = dec.decode(&soft).unwrap();
        assert!(out.converged());
        assert_eq!(out.word.slice(0, 64), *m);
    }
    // the tail block is not a codeword after de-randomization
    let dts = dts_of(&blocks[5]).unwrap();
    assert_eq!(dts.to_hex(), "FFFFC000000000000000000000000000");
    let out = dec.decode(&LlrVector::from_bits(&dts, 4.0)).unwrap();
    assert!(!out.converged());
}

#[test]
fn noisy_codewords_decode_at_moderate_snr() {
    let code = LinearCode::ccsds_128_64();
    let ch = ChannelParams::new(4.0, code.rate()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut dec = MinSumDecoder::new(&code, MinSumConfig::default());
    let mut ok = 0;
    for m in messages(50) {
        let c = code.encode_left(&m).unwrap();
        let tx = tailseq_core::scrambler::randomize(&c).unwrap();
        let mut rx = transmit(&modulate(&tx), &ch, &mut rng);
        derandomize_samples(&mut rx);
        let out = dec.decode(&llr(&rx, &ch).unwrap()).unwrap();
        ok += usize::from(out.converged() && out.word == c);
    }
    assert!(ok >= 48, "{ok}/50 decoded at 4 dB");
}

#[test]
fn published_tail_sequences_distance_profile() {
    let code = LinearCode::ccsds_128_64();
    let ceiling = tailseq_core::search::DEFAULT_COST_CEILING;
    let within = |hex: &str, l: usize| !certify_min_distance(&code, &BitWord::from_hex(hex).unwrap(), l, ceiling).unwrap();
    // decoder input without a TS: the randomized idle block, farther than 14
    assert!(!within(tail::IDLE, 14));
    // the plain alternating block sits at exactly 14
    let alt = BitWord::alternating(128, false).to_hex();
    assert!(!within(&alt, 13) && within(&alt, 14));
    let ccsds = dts_of(&BitWord::from_hex(tail::CCSDS).unwrap()).unwrap().to_hex();
    assert!(!within(&ccsds, 14));
    assert!(!within("FFFFC000000000000000000000000000", 14));
}
