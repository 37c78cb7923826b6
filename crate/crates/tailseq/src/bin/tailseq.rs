use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use tailseq::config::{parse_ts, SimConfig};
use tailseq::experiments::{self, DetectorTrials, RocParams};
use tailseq::formats;
use tailseq::manifest::{unix_now, RunManifest};
use tailseq::{Error, Result};
use tailseq_core::detect::{AbsentModel, MetricKind};
use tailseq_core::framing::{self, dts_of, ts_of_dts, CltuConfig};
use tailseq_core::search::{self, SearchParams, DEFAULT_COST_CEILING};
use tailseq_core::matrix::SystematicForm;
use tailseq_core::scrambler::BLOCK_BITS;
use tailseq_core::{BinaryMatrix, BitWord, LinearCode, QcSpec};

const DEFAULT_SEED: u64 = 1;

#[derive(Parser, Debug)]
#[command(name = "tailseq", version, about = "Telecommand tail-sequence design and evaluation")]
struct Cli {
    /// Master seed; fixes all randomness of the run (default 1; `simulate`
    /// defaults to the config file's seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory; results and a manifest.json go there instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Exit with status 4 when an estimate stopped at its trial cap.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
struct CodeSource {
    /// QC specification file; defaults to the built-in (128, 64) code.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Built-in code name.
    #[arg(long, default_value = "ccsds-128-64", conflicts_with = "spec")]
    builtin: String,
}

impl CodeSource {
    fn load(&self) -> Result<LinearCode> {
        match &self.spec {
            Some(p) => Ok(LinearCode::from_qc_spec(&formats::read_qc_spec(p)?)?),
            None if self.builtin == "ccsds-128-64" => Ok(LinearCode::ccsds_128_64()),
            None => Err(Error::Config(format!("unknown built-in code `{}`", self.builtin))),
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Form {
    Left,
    Right,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Alg {
    Alg1,
    Alg2,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Absent {
    /// Leading symbols of random codewords.
    Codewords,
    /// Noise only.
    Noise,
}

#[derive(Args, Debug, Clone, Serialize)]
struct SearchArgs {
    #[arg(long, default_value_t = 22)]
    w_max: usize,
    #[arg(long, default_value_t = 1_000_000)]
    max_attempts: u64,
    #[arg(long, default_value_t = 512)]
    max_iterations: usize,
    #[arg(long, default_value_t = 64)]
    s_max: usize,
    /// Largest number of encodings an exhaustive step may spend.
    #[arg(long, default_value_t = DEFAULT_COST_CEILING)]
    cost_ceiling: u128,
}

impl SearchArgs {
    fn params(&self, seed: u64) -> SearchParams {
        SearchParams {
            w_max: self.w_max,
            max_attempts: self.max_attempts,
            max_iterations: self.max_iterations,
            s_max: self.s_max,
            seed,
            cost_ceiling: self.cost_ceiling,
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
struct DetectArgs {
    /// Transmitted TS: built-in label or `label:hex`.
    #[arg(long, default_value = "v19star")]
    ts: String,
    /// Leading DTS bits the detector watches.
    #[arg(long, default_value_t = 64)]
    window: usize,
    #[arg(long, value_enum, default_value_t = Absent::Codewords)]
    absent: Absent,
    #[arg(long, default_value_t = 1_000_000)]
    trials_absent: u64,
    #[arg(long, default_value_t = 1_000_000)]
    trials_present: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Expand and inspect a QC code.
    Code {
        #[command(flatten)]
        code: CodeSource,
        /// Report rank and systematic forms.
        #[arg(long)]
        check: bool,
        /// Print H as hex rows.
        #[arg(long)]
        dump_h: bool,
        /// Print a systematic generator as hex rows.
        #[arg(long, value_enum)]
        dump_g: Option<Form>,
        /// Write the QC specification text.
        #[arg(long)]
        dump_spec: bool,
    },
    /// Encode hex messages with a systematic form.
    Encode {
        #[command(flatten)]
        code: CodeSource,
        #[arg(long, value_enum, default_value_t = Form::Left)]
        form: Form,
        /// Generator matrix file (hex rows) used instead of the code's own form.
        #[arg(long)]
        generator: Option<PathBuf>,
        #[arg(required = true)]
        messages: Vec<String>,
    },
    /// List all codewords up to twice a half-weight budget.
    Enumerate {
        #[command(flatten)]
        code: CodeSource,
        #[arg(long, default_value_t = 7)]
        budget: usize,
        #[arg(long, default_value_t = DEFAULT_COST_CEILING)]
        cost_ceiling: u128,
    },
    /// Design a tail sequence.
    DesignTs {
        #[command(flatten)]
        code: CodeSource,
        #[arg(long, value_enum, default_value_t = Alg::Alg2)]
        alg: Alg,
        #[command(flatten)]
        search: SearchArgs,
        /// Low-weight codeword list for alg1.
        #[arg(long)]
        codewords: Option<PathBuf>,
    },
    /// Distance of a DTS to the code.
    CertifyTs {
        #[command(flatten)]
        code: CodeSource,
        /// Decoder-side tail sequence (hex).
        dts: String,
        /// Certify that no codeword lies within this distance.
        #[arg(long)]
        min_distance: Option<usize>,
        /// Run the nearest-codeword search to completion regardless of cost.
        #[arg(long)]
        full: bool,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Move a DTS within its coset so its last half is a given pattern.
    TransformTs {
        #[command(flatten)]
        code: CodeSource,
        dts: String,
        /// `alt0`, `alt1` or a hex half word.
        #[arg(long, default_value = "alt0")]
        target_half: String,
    },
    /// Build a CLTU stream and write it with its marker sidecar.
    Cltu {
        #[arg(long, default_value_t = 4)]
        codewords: usize,
        /// TS label or `label:hex`; omit for none.
        #[arg(long)]
        ts: Option<String>,
        #[arg(long, default_value_t = 128)]
        idle_len: usize,
    },
    /// ROC curves of the detection metrics.
    Roc {
        #[command(flatten)]
        code: CodeSource,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = vec![-2.0, 0.0, 2.0])]
        ebn0: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "hard,soft,lrt")]
        metrics: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "1e-5,1e-4,1e-3,1e-2,1e-1")]
        pfa: Vec<f64>,
        #[command(flatten)]
        detect: DetectArgs,
    },
    /// Calibrate a detector and estimate its miss probability.
    DetectEval {
        #[command(flatten)]
        code: CodeSource,
        #[arg(long, default_value = "lrt")]
        metric: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = vec![-4.0])]
        ebn0: Vec<f64>,
        #[arg(long, default_value_t = 1e-5)]
        pfa: f64,
        #[arg(long, default_value_t = 100)]
        stop_errors: u64,
        #[command(flatten)]
        detect: DetectArgs,
    },
    /// Full TC-rejection campaign from a config file.
    Simulate {
        #[command(flatten)]
        code: CodeSource,
        #[arg(long)]
        config: PathBuf,
    },
}

/// Collected outputs: file name and contents.
#[derive(Default)]
struct Outputs {
    files: Vec<(String, Vec<u8>)>,
    low_confidence: Vec<String>,
}

impl Outputs {
    fn text(&mut self, name: &str, text: String) {
        self.files.push((name.to_string(), text.into_bytes()));
    }
}

fn hex_rows(m: &BinaryMatrix) -> String {
    m.row_words().iter().map(|r| format!("{}\n", r.to_hex())).collect()
}

fn load_generator(path: &Path, k: usize, n: usize) -> Result<BinaryMatrix> {
    let text = formats::read_text(path)?;
    let rows = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| BitWord::from_hex_len(l, n))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if rows.len() != k {
        return Err(Error::Config(format!("{}: expected {k} rows, found {}", path.display(), rows.len())));
    }
    Ok(BinaryMatrix::from_rows(n, rows)?)
}

fn parse_word(hex: &str, len: usize) -> Result<BitWord> {
    BitWord::from_hex_len(hex, len).map_err(|e| Error::Config(format!("`{hex}`: {e}")))
}

fn metric_list(names: &[String]) -> Result<Vec<MetricKind>> {
    names
        .iter()
        .map(|m| m.parse().map_err(|e| Error::Config(format!("{e}"))))
        .collect()
}

fn absent_model(kind: Absent, code: &LinearCode) -> AbsentModel<'_> {
    match kind {
        Absent::Codewords => AbsentModel::NoisyCodewords(code),
        Absent::Noise => AbsentModel::PureNoise,
    }
}

fn detect_pattern(d: &DetectArgs) -> Result<BitWord> {
    let (_, ts) = parse_ts(&d.ts)?;
    if !(1..=ts.len()).contains(&d.window) {
        return Err(Error::Config(format!("window must be in 1..={}", ts.len())));
    }
    Ok(dts_of(&ts)?.slice(0, d.window))
}

fn run(cli: &Cli) -> Result<(serde_json::Value, Outputs)> {
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let mut out = Outputs::default();
    let config = match &cli.command {
        Command::Code {
            code: src,
            check,
            dump_h,
            dump_g,
            dump_spec,
        } => {
            let code = src.load()?;
            let mut s = format!("n={} k={} even={}\n", code.n(), code.k(), code.is_even());
            if *check {
                let h = code.parity_check();
                let forms = code.forms();
                let form_ok = |f: &SystematicForm| if f.permuted { "permuted" } else { "ok" };
                let _ = writeln!(s, "rank={} rows={}", h.rank(), h.rows());
                let _ = writeln!(s, "left_form={} right_form={}", form_ok(&forms.left), form_ok(&forms.right));
            }
            if *dump_h {
                s.push_str(&hex_rows(code.parity_check()));
            }
            match dump_g {
                Some(Form::Left) => s.push_str(&hex_rows(code.forms().g_left())),
                Some(Form::Right) => s.push_str(&hex_rows(code.forms().g_right())),
                None => {}
            }
            if *dump_spec {
                let spec = match &src.spec {
                    Some(p) => formats::read_qc_spec(p)?,
                    None => QcSpec::ccsds_128_64(),
                };
                s.push_str(&spec.to_text());
            }
            out.text("code.txt", s);
            json!({ "code": src, "check": check, "dump_h": dump_h, "dump_g": dump_g, "dump_spec": dump_spec })
        }
        Command::Encode {
            code: src,
            form,
            generator,
            messages,
        } => {
            let code = src.load()?;
            let g = generator.as_deref().map(|p| load_generator(p, code.k(), code.n())).transpose()?;
            let mut s = String::new();
            for m in messages {
                let m = parse_word(m, code.k())?;
                let c = match (&g, form) {
                    (Some(g), _) => g.left_mul(&m)?,
                    (None, Form::Left) => code.encode_left(&m)?,
                    (None, Form::Right) => code.encode_right(&m)?,
                };
                let _ = writeln!(s, "{} syndrome_zero={}", c.to_hex(), code.is_codeword(&c));
            }
            out.text("codewords.txt", s);
            json!({ "code": src, "form": form, "generator": generator, "messages": messages })
        }
        Command::Enumerate {
            code: src,
            budget,
            cost_ceiling,
        } => {
            let code = src.load()?;
            let list = search::enumerate_low_weight(&code, *budget, *cost_ceiling)?;
            let mut summary = String::new();
            for (w, words) in &list.by_weight {
                let _ = writeln!(summary, "weight {w}: {}", words.len());
            }
            log::info!("enumeration complete to weight {}", list.completeness_bound);
            out.text("codewords.list", list.to_text());
            out.text("weights.txt", summary);
            json!({ "code": src, "budget": budget, "cost_ceiling": cost_ceiling.to_string() })
        }
        Command::DesignTs {
            code: src,
            alg,
            search: sa,
            codewords,
        } => {
            let code = src.load()?;
            let params = sa.params(seed);
            let mut s = String::new();
            let dts = match alg {
                Alg::Alg1 => {
                    let list = match codewords {
                        Some(p) => formats::read_codeword_list(p)?,
                        None => {
                            return Err(Error::Config("design-ts --alg alg1 needs --codewords <list>".into()));
                        }
                    };
                    let o = search::guaranteed_search(&code, &list, &params)?;
                    let _ = writeln!(
                        s,
                        "guaranteed_distance={} effective_w_max={} downgraded={} attempts={}",
                        o.guaranteed_distance, o.effective_w_max, o.downgraded, o.attempts
                    );
                    o.word
                }
                Alg::Alg2 => {
                    let o = search::local_search(&code, &params)?;
                    let _ = writeln!(s, "flips={} stop={:?}", o.flips(), o.stop);
                    Some(o.word)
                }
            };
            match dts {
                Some(v) => {
                    let report = search::ncs_budgeted(&code, &v, &params)?;
                    let _ = writeln!(s, "dts={}", v.to_hex());
                    if code.n() == BLOCK_BITS {
                        let _ = writeln!(s, "ts={}", ts_of_dts(&v)?.to_hex());
                    }
                    s.push_str(&report.render());
                }
                None => s.push_str("no word found\n"),
            }
            out.text("design.txt", s);
            json!({ "code": src, "alg": alg, "search": sa, "codewords": codewords })
        }
        Command::CertifyTs {
            code: src,
            dts,
            min_distance,
            full,
            search: sa,
        } => {
            let code = src.load()?;
            let v = parse_word(dts, code.n())?;
            let params = sa.params(seed);
            let mut s = String::new();
            if let Some(l) = min_distance {
                let ok = search::certify_min_distance(&code, &v, *l, sa.cost_ceiling)?;
                let _ = writeln!(s, "certified_min_distance_{l}={ok}");
            }
            if *full || min_distance.is_none() {
                let report = if *full {
                    search::ncs(&code, &v, &params)?
                } else {
                    search::ncs_budgeted(&code, &v, &params)?
                };
                s.push_str(&report.render());
            }
            out.text("certify.txt", s);
            json!({ "code": src, "dts": dts, "min_distance": min_distance, "full": full, "search": sa })
        }
        Command::TransformTs {
            code: src,
            dts,
            target_half,
        } => {
            let code = src.load()?;
            let v = parse_word(dts, code.n())?;
            let target = match target_half.as_str() {
                "alt0" => BitWord::alternating(code.k(), false),
                "alt1" => BitWord::alternating(code.k(), true),
                hex => parse_word(hex, code.k())?,
            };
            let t = search::transform_for_lrt(&code, &v, &target)?;
            let mut s = format!("dts={}\n", t.to_hex());
            if code.n() == BLOCK_BITS {
                let _ = writeln!(s, "ts={}", ts_of_dts(&t)?.to_hex());
            }
            out.text("transform.txt", s);
            json!({ "code": src, "dts": dts, "target_half": target_half })
        }
        Command::Cltu { codewords, ts, idle_len } => {
            let code = LinearCode::ccsds_128_64();
            let ts_word = ts.as_deref().map(parse_ts).transpose()?.map(|(_, w)| w);
            let cfg = CltuConfig {
                n_codewords: *codewords,
                ts: ts_word,
                idle_len: *idle_len,
                ..CltuConfig::default()
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let messages: Vec<BitWord> = (0..*codewords)
                .map(|_| BitWord::from_bits((0..code.k()).map(|_| rng.random_bool(0.5))))
                .collect();
            let stream = framing::encapsulate(&code, &messages, &cfg)?;
            out.text("stream.hex", formats::render_stream(&stream.bits));
            let markers: String = stream.marker_offsets().iter().map(|o| format!("{o}\n")).collect();
            out.text("stream.hex.markers", markers);
            json!({ "codewords": codewords, "ts": ts, "idle_len": idle_len })
        }
        Command::Roc {
            code: src,
            ebn0,
            metrics,
            pfa,
            detect,
        } => {
            let code = src.load()?;
            let pattern = detect_pattern(detect)?;
            let kinds = metric_list(metrics)?;
            let model = absent_model(detect.absent, &code);
            let mut points = Vec::new();
            for (i, &e) in ebn0.iter().enumerate() {
                let params = RocParams {
                    trials_absent: detect.trials_absent,
                    trials_present: detect.trials_present,
                    pfa_grid: pfa.clone(),
                    seed: experiments::derive_seed(seed, &format!("roc/{i}")),
                };
                points.extend(experiments::roc(&pattern, &kinds, &model, e, code.rate(), &params)?);
            }
            for p in &points {
                if (p.p_fa.trials as f64) * p.target_pfa < 10.0 {
                    out.low_confidence.push(format!("{} at {} dB, P_fa {:e}", p.metric, p.eb_n0_db, p.target_pfa));
                }
            }
            let mut buf = Vec::new();
            formats::write_roc_csv(&mut buf, &points)?;
            out.files.push(("roc.csv".into(), buf));
            json!({ "code": src, "ebn0": ebn0, "metrics": metrics, "pfa": pfa, "detect": detect })
        }
        Command::DetectEval {
            code: src,
            metric,
            ebn0,
            pfa,
            stop_errors,
            detect,
        } => {
            let code = src.load()?;
            let pattern = detect_pattern(detect)?;
            let kind: MetricKind = metric.parse().map_err(|e| Error::Config(format!("{e}")))?;
            let model = absent_model(detect.absent, &code);
            let mut records = Vec::new();
            for (i, &e) in ebn0.iter().enumerate() {
                let trials = DetectorTrials {
                    target_pfa: *pfa,
                    absent: detect.trials_absent,
                    present: detect.trials_present,
                    stop_errors: *stop_errors,
                    seed: experiments::derive_seed(seed, &format!("detect/{i}")),
                };
                let r = experiments::estimate_detector_probs(kind, &pattern, &model, e, code.rate(), &trials, kind.name())?;
                log::info!("{} dB: threshold {}", e, r.detector.threshold);
                records.push(r.p_fa);
                records.push(r.p_md);
            }
            out.low_confidence
                .extend(records.iter().filter(|r| r.low_confidence).map(|r| r.quantity.clone()));
            let mut buf = Vec::new();
            formats::write_estimates_csv(&mut buf, &records)?;
            out.files.push(("detect.csv".into(), buf));
            json!({ "code": src, "metric": metric, "ebn0": ebn0, "pfa": pfa, "stop_errors": stop_errors, "detect": detect })
        }
        Command::Simulate { code: src, config } => {
            let code = src.load()?;
            let mut cfg = SimConfig::parse(&formats::read_text(config)?)?;
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            let result = experiments::run_campaign(&code, &cfg)?;
            out.low_confidence
                .extend(result.records.iter().filter(|r| r.low_confidence).map(|r| r.quantity.clone()));
            let mut buf = Vec::new();
            formats::write_campaign_csv(&mut buf, &result.rows)?;
            out.files.push(("campaign.csv".into(), buf));
            let mut buf = Vec::new();
            formats::write_estimates_csv(&mut buf, &result.records)?;
            out.files.push(("estimates.csv".into(), buf));
            json!({ "code": src, "config": cfg })
        }
    };
    Ok((config, out))
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Code { .. } => "code",
        Command::Encode { .. } => "encode",
        Command::Enumerate { .. } => "enumerate",
        Command::DesignTs { .. } => "design-ts",
        Command::CertifyTs { .. } => "certify-ts",
        Command::TransformTs { .. } => "transform-ts",
        Command::Cltu { .. } => "cltu",
        Command::Roc { .. } => "roc",
        Command::DetectEval { .. } => "detect-eval",
        Command::Simulate { .. } => "simulate",
    }
}

fn emit(cli: &Cli, config: serde_json::Value, out: &Outputs, started: f64) -> Result<()> {
    let seed = match &cli.command {
        Command::Simulate { .. } => config["config"]["seed"].as_u64().unwrap_or(DEFAULT_SEED),
        _ => cli.seed.unwrap_or(DEFAULT_SEED),
    };
    match &cli.out {
        None => {
            let mut stdout = std::io::stdout().lock();
            for (name, bytes) in &out.files {
                // sidecars and secondary tables only go to files
                if out.files.len() > 1 && (name.ends_with(".markers") || name == "estimates.csv" || name == "weights.txt") {
                    continue;
                }
                stdout.write_all(bytes).map_err(|e| Error::io("<stdout>", e))?;
            }
        }
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            let mut manifest = RunManifest::new(subcommand_name(&cli.command), config, seed, started);
            for (name, bytes) in &out.files {
                let path = dir.join(name);
                std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
                manifest.add_output(&path)?;
                eprintln!("wrote {}", path.display());
            }
            manifest.finish(dir)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    let started = unix_now();
    let result = run(&cli).and_then(|(config, out)| {
        emit(&cli, config, &out, started)?;
        if cli.strict && !out.low_confidence.is_empty() {
            return Err(Error::LowConfidence(out.low_confidence.join(", ")));
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
