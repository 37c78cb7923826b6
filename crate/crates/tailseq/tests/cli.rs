use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tailseq::formats::{markers_path, parse_stream, read_markers};
use tailseq::manifest::sha256_hex;

fn tailseq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tailseq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

const SIM: &str = "\
eb_n0_db = 3.0
eta = 1e-2
stop_errors = 5
max_trials = 200
seed = 7
ts = v18
detector = hard
modes = db, nots
n_codewords = 4
max_iter = 50
detector_trials = 2000
pfa_target = 1e-2
detection_length = 64
";

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn check_digests(dir: &Path) {
    let m = manifest(dir);
    let outputs = m["outputs"].as_object().unwrap();
    assert!(!outputs.is_empty());
    for (name, digest) in outputs {
        let bytes = fs::read(dir.join(name)).unwrap();
        assert_eq!(digest.as_str().unwrap(), sha256_hex(&bytes), "{name}");
    }
}

#[test]
fn code_check_and_encode() {
    let text = stdout(&tailseq(&["code", "--check"]));
    assert!(text.contains("rank=64"));
    assert!(text.contains("left_form=ok right_form=ok"));

    let text = stdout(&tailseq(&["encode", "--form", "right", "FD15755D75559557"]));
    assert_eq!(text.trim(), "6FA5DE77A89F2981FD15755D75559557 syndrome_zero=true");
}

#[test]
fn tail_sequence_tools() {
    let text = stdout(&tailseq(&["transform-ts", "FFFFC000000000000000000000000000"]));
    assert!(text.contains("dts=55559555AAAAAAAA5555555555555555"));
    assert!(text.contains("ts=AA6C0B0FC243AC5F39DC7AF4640B5D95"));

    let text = stdout(&tailseq(&["certify-ts", "FFFFC000000000000000000000000000", "--min-distance", "14"]));
    assert_eq!(text.trim(), "certified_min_distance_14=true");
}

#[test]
fn exit_codes() {
    let out = tailseq(&["encode", "ZZ"]);
    assert_eq!(out.status.code(), Some(2));

    let out = tailseq(&["enumerate", "--budget", "7", "--cost-ceiling", "10"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds the ceiling"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sim.cfg");
    let without_ts: String = SIM.lines().filter(|l| !l.starts_with("ts ")).map(|l| format!("{l}\n")).collect();
    fs::write(&cfg, without_ts).unwrap();
    let out = tailseq(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing key `ts`"));
}

#[test]
fn simulate_writes_manifest_and_repeats() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sim.cfg");
    fs::write(&cfg, SIM).unwrap();
    let runs: Vec<_> = ["a", "b"]
        .iter()
        .map(|name| {
            let out = dir.path().join(name);
            let o = tailseq(&["--out", out.to_str().unwrap(), "simulate", "--config", cfg.to_str().unwrap()]);
            stdout(&o);
            check_digests(&out);
            out
        })
        .collect();
    let m = manifest(&runs[0]);
    assert_eq!(m["subcommand"], "simulate");
    assert_eq!(m["seed"], 7);
    assert_eq!(m["config"]["config"]["n_codewords"], 4);

    let a = fs::read_to_string(runs[0].join("campaign.csv")).unwrap();
    let b = fs::read_to_string(runs[1].join("campaign.csv")).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 3);
    assert!(a.starts_with("eb_n0_db,mode,ts_label,"));
}

#[test]
fn roc_depends_only_on_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        stdout(&tailseq(&[
            "--seed",
            seed,
            "--out",
            out.to_str().unwrap(),
            "roc",
            "--ebn0",
            "0",
            "--metrics",
            "hard,lrt",
            "--pfa",
            "1e-2",
            "--trials-absent",
            "2000",
            "--trials-present",
            "300",
        ]));
        check_digests(&out);
        fs::read_to_string(out.join("roc.csv")).unwrap()
    };
    let a = run("a", "3");
    assert_eq!(a, run("b", "3"));
    assert_ne!(a, run("c", "4"));
    assert_eq!(a.lines().count(), 3);
    for row in a.lines().skip(1) {
        let cols: Vec<&str> = row.split(',').collect();
        let p_fa: f64 = cols[3].parse().unwrap();
        assert!(p_fa <= 2e-2, "{row}");
        assert!(cols[4].contains(';'));
    }
}

#[test]
fn cltu_dump_and_markers() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    stdout(&tailseq(&[
        "--out",
        out.to_str().unwrap(),
        "cltu",
        "--codewords",
        "2",
        "--ts",
        "v18",
        "--idle-len",
        "64",
    ]));
    check_digests(&out);
    let dump = out.join("stream.hex");
    let bits = parse_stream(&fs::read_to_string(&dump).unwrap()).unwrap();
    assert_eq!(bits.len(), 64 + 64 + 3 * 128 + 64);
    let markers = read_markers(&markers_path(&dump)).unwrap();
    assert_eq!(markers, vec![64, 128, 256, 384, 512]);
    // the tail block sits right after the last codeword
    assert_eq!(bits.slice(384, 128).to_hex(), tailseq::core::framing::tail::V18);
}
