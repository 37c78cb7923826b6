//! Upper bounds on the TC rejection probability.
//!
//! All CLTUs are assumed to carry the full `N` codewords, so the decoder
//! misses at least one of them with probability `1 − (1 − CER)^N`.

use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// How the end of a CLTU is detected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TerminationMode {
    /// The decoder fails on the tail sequence.
    DecoderBased,
    /// A likelihood-ratio detector looks for the tail sequence.
    LrtBased,
    /// No tail sequence; the decoder fails on the idle pattern.
    NoTs,
}

impl TerminationMode {
    pub const ALL: [TerminationMode; 3] = [
        TerminationMode::DecoderBased,
        TerminationMode::LrtBased,
        TerminationMode::NoTs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TerminationMode::DecoderBased => "db",
            TerminationMode::LrtBased => "lrtb",
            TerminationMode::NoTs => "nots",
        }
    }
}

impl fmt::Display for TerminationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TerminationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "db" | "decoder" | "decoder-based" => Ok(TerminationMode::DecoderBased),
            "lrtb" | "lrt" | "lrt-based" => Ok(TerminationMode::LrtBased),
            "nots" | "no-ts" | "none" => Ok(TerminationMode::NoTs),
            other => Err(Error::InvalidParameter(alloc::format!("unknown termination mode `{other}`"))),
        }
    }
}

/// The component probabilities of one operating point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RejectionInputs {
    /// False alarm on windows straddling idle and start sequence.
    pub p_fa_s: f64,
    /// Missed start sequence.
    pub p_md_s: f64,
    /// False alarm of the tail detector on a codeword.
    pub p_fa_t: f64,
    /// Missed tail sequence.
    pub p_md_t: f64,
    pub cer: f64,
    /// Decoder converges on the noisy DTS.
    pub p_ds_t: f64,
    /// Decoder converges on the idle block after the last codeword.
    pub p_ds_i: f64,
    /// Codewords per CLTU.
    pub n: u32,
}

impl RejectionInputs {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("p_fa_s", self.p_fa_s),
            ("p_md_s", self.p_md_s),
            ("p_fa_t", self.p_fa_t),
            ("p_md_t", self.p_md_t),
            ("cer", self.cer),
            ("p_ds_t", self.p_ds_t),
            ("p_ds_i", self.p_ds_i),
        ];
        for (name, value) in fields {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::Domain { name, value });
            }
        }
        if self.n == 0 {
            return Err(Error::InvalidParameter("N must be at least 1".into()));
        }
        Ok(())
    }
}

/// `P_fa-S + (1 − P_fa-S) {P_md-S + (1 − P_md-S) [1 − q^N + q^N · tail]}`.
fn frame(inputs: &RejectionInputs, q: f64, tail: f64) -> f64 {
    let qn = libm::pow(q, f64::from(inputs.n));
    let data = 1.0 - qn + qn * tail;
    inputs.p_fa_s + (1.0 - inputs.p_fa_s) * (inputs.p_md_s + (1.0 - inputs.p_md_s) * data)
}

/// Evaluates the bound for `mode`.
///
/// The LRT-based form treats detector and decoder failures on the tail as
/// independent.
pub fn compose_rejection(inputs: &RejectionInputs, mode: TerminationMode) -> Result<f64> {
    inputs.validate()?;
    let ok = 1.0 - inputs.cer;
    Ok(match mode {
        TerminationMode::DecoderBased => frame(inputs, ok, inputs.p_ds_t),
        TerminationMode::LrtBased => frame(inputs, (1.0 - inputs.p_fa_t) * ok, inputs.p_ds_t * inputs.p_md_t),
        TerminationMode::NoTs => frame(inputs, ok, inputs.p_ds_i),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn db_example() -> RejectionInputs {
        RejectionInputs {
            cer: 1e-6,
            p_ds_t: 1e-4,
            n: 40,
            ..RejectionInputs::default()
        }
    }

    #[test]
    fn hand_evaluated_instances() {
        let zero = RejectionInputs {
            n: 40,
            ..RejectionInputs::default()
        };
        for mode in TerminationMode::ALL {
            assert_eq!(compose_rejection(&zero, mode).unwrap(), 0.0);
        }
        let q40 = (1.0f64 - 1e-6).powi(40);
        let db = compose_rejection(&db_example(), TerminationMode::DecoderBased).unwrap();
        assert!((db - (1.0 - q40 + q40 * 1e-4)).abs() < 1e-18);
        assert!((db - 1.39996e-4).abs() < 1e-9);

        // start failures only
        let s = RejectionInputs {
            p_fa_s: 0.1,
            p_md_s: 0.2,
            n: 1,
            ..RejectionInputs::default()
        };
        let v = compose_rejection(&s, TerminationMode::NoTs).unwrap();
        assert!((v - (0.1 + 0.9 * 0.2)).abs() < 1e-15);

        // LRT form: q = (1 - 0.01)(1 - 0.001), N = 2, tail = 0.5 * 0.2
        let l = RejectionInputs {
            p_fa_t: 0.01,
            cer: 0.001,
            p_ds_t: 0.5,
            p_md_t: 0.2,
            n: 2,
            ..RejectionInputs::default()
        };
        let q2 = (0.99f64 * 0.999).powi(2);
        let v = compose_rejection(&l, TerminationMode::LrtBased).unwrap();
        assert!((v - (1.0 - q2 + q2 * 0.1)).abs() < 1e-15);
    }

    #[test]
    fn lrt_with_certain_tail_failures_folds_into_db() {
        let mut i = db_example();
        i.p_fa_t = 0.003;
        i.p_ds_t = 1.0;
        i.p_md_t = 1.0;
        let lrt = compose_rejection(&i, TerminationMode::LrtBased).unwrap();
        let folded = RejectionInputs {
            cer: 1.0 - (1.0 - i.p_fa_t) * (1.0 - i.cer),
            ..i
        };
        let db = compose_rejection(&folded, TerminationMode::DecoderBased).unwrap();
        assert!((lrt - db).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        let mut i = db_example();
        i.cer = 1.5;
        assert!(matches!(
            compose_rejection(&i, TerminationMode::DecoderBased),
            Err(Error::Domain { name: "cer", .. })
        ));
        i.cer = 0.0;
        i.n = 0;
        assert!(compose_rejection(&i, TerminationMode::NoTs).is_err());
        assert_eq!("lrt".parse::<TerminationMode>().unwrap(), TerminationMode::LrtBased);
    }

    fn inputs() -> impl Strategy<Value = RejectionInputs> {
        (proptest::array::uniform7(0.0f64..=1.0), 1u32..100).prop_map(|(p, n)| RejectionInputs {
            p_fa_s: p[0],
            p_md_s: p[1],
            p_fa_t: p[2],
            p_md_t: p[3],
            cer: p[4],
            p_ds_t: p[5],
            p_ds_i: p[6],
            n,
        })
    }

    proptest! {
        #[test]
        fn bounded_and_monotone(i in inputs(), field in 0usize..7, bump in 0.0f64..1.0) {
            let mut j = i;
            let slot = match field {
                0 => &mut j.p_fa_s,
                1 => &mut j.p_md_s,
                2 => &mut j.p_fa_t,
                3 => &mut j.p_md_t,
                4 => &mut j.cer,
                5 => &mut j.p_ds_t,
                _ => &mut j.p_ds_i,
            };
            *slot += (1.0 - *slot) * bump;
            for mode in TerminationMode::ALL {
                let a = compose_rejection(&i, mode).unwrap();
                let b = compose_rejection(&j, mode).unwrap();
                prop_assert!((0.0..=1.0).contains(&a));
                prop_assert!(b >= a - 1e-12);
            }
        }

        #[test]
        fn db_and_nots_swap_tail_terms(i in inputs()) {
            let swapped = RejectionInputs { p_ds_t: i.p_ds_i, p_ds_i: i.p_ds_t, ..i };
            let db = compose_rejection(&i, TerminationMode::DecoderBased).unwrap();
            let nots = compose_rejection(&swapped, TerminationMode::NoTs).unwrap();
            prop_assert!((db - nots).abs() < 1e-15);
        }

        #[test]
        fn lrt_never_exceeds_db_without_tail_false_alarms(i in inputs()) {
            let j = RejectionInputs { p_fa_t: 0.0, ..i };
            let lrt = compose_rejection(&j, TerminationMode::LrtBased).unwrap();
            let db = compose_rejection(&j, TerminationMode::DecoderBased).unwrap();
            prop_assert!(lrt <= db + 1e-15);
        }
    }
}
