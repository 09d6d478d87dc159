use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scale-bench"))
        .args(args)
        .current_dir(dir)
        .env_remove("SCALE_BENCH_JOBS")
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = bin(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Exit code and the parsed JSON error record.
fn fails(dir: &Path, args: &[&str]) -> (i32, Value) {
    let out = bin(dir, args);
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    let stderr = String::from_utf8(out.stderr).unwrap();
    let last = stderr.lines().last().unwrap();
    (out.status.code().unwrap(), serde_json::from_str(last).unwrap())
}

fn row(sid: &str, mid: &str, country: &str, year: u16, pos: usize, code: &str) -> Value {
    json!({
        "statement_id": sid, "manifesto_id": mid, "party": format!("p-{mid}"), "country": country,
        "language": "xx", "year": year, "month": 5, "position": pos, "text": format!("text {sid}"), "code": code,
    })
}

/// Two countries, three manifestos with hand-checkable RILE scores.
fn tiny(dir: &Path) {
    let codes: [(&str, &str, u16, &[&str]); 3] = [
        ("a1", "A", 2015, &["104", "104", "106", "501"]),
        ("a2", "A", 2020, &["106", "106", "103", "0"]),
        ("b1", "B", 2016, &["201.1", "505", "605", "403", "701"]),
    ];
    let mut text = String::new();
    for (mid, country, year, cs) in codes {
        for (i, c) in cs.iter().enumerate() {
            text.push_str(&row(&format!("{mid}-{i}"), mid, country, year, i, c).to_string());
            text.push('\n');
        }
    }
    fs::write(dir.join("tiny.jsonl"), text).unwrap();
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

#[test]
fn score_matches_hand_counts() {
    let d = tempfile::tempdir().unwrap();
    tiny(d.path());
    let rows = csv_rows(&ok(d.path(), &["score", "--corpus", "tiny.jsonl"]));
    assert_eq!(rows[0], ["manifesto_id", "party", "country", "year", "right", "left", "other", "rile", "stance"]);
    let get = |id: &str| rows.iter().find(|r| r[0] == id).unwrap().clone();
    assert_eq!(get("a1")[4..], ["2", "1", "1", "0.25", "CentreRight"]);
    assert_eq!(get("a2")[4..], ["0", "3", "1", "-0.75", "HardLeft"]);
    assert_eq!(get("b1")[4..], ["3", "2", "0", "0.2", "CentreRight"]);
}

#[test]
fn exit_codes_follow_error_kind() {
    let d = tempfile::tempdir().unwrap();
    tiny(d.path());
    let (code, err) = fails(d.path(), &["score", "--corpus", "missing.jsonl"]);
    assert_eq!((code, err["error"]["kind"].as_str()), (5, Some("io")));
    let (code, _) = fails(d.path(), &["score", "--corpus", "tiny.jsonl", "--no-such-flag"]);
    assert_eq!(code, 2);
    let (code, _) = fails(d.path(), &["--jobs", "0", "registry"]);
    assert_eq!(code, 2);
    fs::write(d.path().join("bad.jsonl"), row("x", "m", "A", 2000, 0, "999").to_string()).unwrap();
    let (code, err) = fails(d.path(), &["score", "--corpus", "bad.jsonl"]);
    assert_eq!(code, 3);
    assert!(err["error"]["message"].as_str().unwrap().contains("999"));
    let (code, _) = fails(d.path(), &["split", "--mode", "xcountry", "--corpus", "tiny.jsonl", "--out", "s", "--dev-fraction", "1.5"]);
    assert_eq!(code, 2);
}

#[test]
fn lenient_ingest_reports_and_skips_bad_rows() {
    let d = tempfile::tempdir().unwrap();
    let text = [row("x0", "m", "A", 2000, 0, "104"), row("x1", "m", "A", 2000, 1, "999"), row("x2", "m", "A", 2000, 2, "106")]
        .map(|v| v.to_string())
        .join("\n");
    fs::write(d.path().join("in.jsonl"), text).unwrap();
    let (code, _) = fails(d.path(), &["ingest", "--in", "in.jsonl", "--out", "out.jsonl", "--strict"]);
    assert_eq!(code, 3);
    let out = bin(d.path(), &["ingest", "--in", "in.jsonl", "--out", "out.csv", "--lenient"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("999"));
    let written = fs::read_to_string(d.path().join("out.csv")).unwrap();
    assert_eq!(written.lines().count(), 3);
    assert!(d.path().join("out.csv.manifest.json").exists());
}

#[test]
fn config_fills_flags_and_command_line_wins() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["ingest", "--in", "synthetic:manifestos=30,countries=3", "--out", "c.jsonl"]);
    fs::write(d.path().join("cfg.json"), r#"{"seed": 5, "split": {"mode": "xcountry", "dev_fraction": 0.2}}"#).unwrap();
    ok(d.path(), &["--config", "cfg.json", "split", "--corpus", "c.jsonl", "--out", "s", "--seed", "9"]);
    let manifest: Value = serde_json::from_str(&fs::read_to_string(d.path().join("s/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["mode"], "xcountry");
    assert_eq!(manifest["config"]["dev_fraction"], 0.2);
    assert_eq!(manifest["config"]["seed"], 9);
    assert_eq!(manifest["command"], "split");

    fs::write(d.path().join("bad.json"), r#"{"colour": "red"}"#).unwrap();
    let (code, _) = fails(d.path(), &["--config", "bad.json", "registry"]);
    assert_eq!(code, 2);
}

#[test]
fn chunk_output_carries_the_training_contract() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["ingest", "--in", "synthetic:manifestos=4,countries=2", "--out", "c.jsonl"]);
    ok(d.path(), &["chunk", "--corpus", "c.jsonl", "--out", "chunks.jsonl", "--max-tokens", "300", "--min-tokens", "50"]);
    let text = fs::read_to_string(d.path().join("chunks.jsonl")).unwrap();
    let first: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    let mut keys: Vec<&str> = first.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort();
    assert_eq!(keys, ["chunk_index", "gold_rile", "manifesto_id", "oversized", "statement_ids", "token_count"]);
    let (code, _) = fails(d.path(), &["chunk", "--corpus", "c.jsonl", "--out", "x.jsonl", "--counter", "bpe"]);
    assert_eq!(code, 2);
}

#[test]
fn chunk_predictions_evaluate_at_manifesto_and_stance_level() {
    let d = tempfile::tempdir().unwrap();
    tiny(d.path());
    let preds = [
        json!({"manifesto_id": "a1", "chunk_index": 0, "score": 0.3, "model": "m", "split": "s"}),
        json!({"manifesto_id": "a2", "chunk_index": 0, "score": -0.7, "model": "m", "split": "s"}),
        json!({"manifesto_id": "a2", "chunk_index": 1, "score": -0.9, "model": "m", "split": "s"}),
        json!({"manifesto_id": "b1", "chunk_index": 0, "score": 0.22, "model": "m", "split": "s"}),
    ]
    .map(|v| v.to_string())
    .join("\n");
    fs::write(d.path().join("chunks.jsonl"), preds).unwrap();
    ok(d.path(), &["evaluate", "--gold", "tiny.jsonl", "--pred", "chunks.jsonl", "--level", "manifesto", "--out", "m"]);
    let m: Value = serde_json::from_str(&fs::read_to_string(d.path().join("m/metrics.json")).unwrap()).unwrap();
    assert_eq!(m["pooled"]["n"], 3);
    assert_eq!(m["pooled"]["spearman_r"], 1.0);
    ok(d.path(), &["evaluate", "--gold", "tiny.jsonl", "--pred", "chunks.jsonl", "--level", "stance", "--out", "t"]);
    let t: Value = serde_json::from_str(&fs::read_to_string(d.path().join("t/metrics.json")).unwrap()).unwrap();
    assert_eq!(t["pooled"]["accuracy"], 1.0);

    let stmt = json!({"statement_id": "a1-0", "label": "Right", "model": "m", "split": "s"}).to_string();
    fs::write(d.path().join("stmt.jsonl"), stmt).unwrap();
    let (code, _) = fails(d.path(), &["evaluate", "--gold", "tiny.jsonl", "--pred", "stmt.jsonl", "--pred", "chunks.jsonl", "--out", "x"]);
    assert_eq!(code, 2);
}

#[test]
fn statement_evaluation_writes_confusion_tables() {
    let d = tempfile::tempdir().unwrap();
    tiny(d.path());
    let labels = [("a1-0", "Right"), ("a1-1", "Other"), ("a1-2", "Left"), ("a1-3", "Other")];
    let preds = labels
        .map(|(s, l)| json!({"statement_id": s, "label": l, "model": "m", "split": "s"}).to_string())
        .join("\n");
    fs::write(d.path().join("p.jsonl"), preds).unwrap();
    ok(d.path(), &["evaluate", "--gold", "tiny.jsonl", "--pred", "p.jsonl", "--out", "e"]);
    let cm = fs::read_to_string(d.path().join("e/confusion.csv")).unwrap();
    assert_eq!(cm, "true\\pred,Left,Other,Right\nLeft,1,0,0\nOther,0,1,0\nRight,0,1,1\n");
    let m: Value = serde_json::from_str(&fs::read_to_string(d.path().join("e/metrics.json")).unwrap()).unwrap();
    assert_eq!(m["space"], "rile3");
    assert_eq!(m["pooled"]["accuracy"], 0.75);
}

#[test]
fn simulate_identity_and_report() {
    let d = tempfile::tempdir().unwrap();
    ok(
        d.path(),
        &["simulate", "--corpus", "synthetic:manifestos=30,countries=2", "--confusion", "identity", "--confusion", "uniform", "--replicates", "3", "--out", "sim"],
    );
    let summary: Value = serde_json::from_str(&fs::read_to_string(d.path().join("sim/summary.json")).unwrap()).unwrap();
    let identity = summary.as_array().unwrap().iter().find(|s| s["spec"] == "identity").unwrap();
    assert_eq!(identity["spearman_r"]["mean"], 1.0);
    let sweep = fs::read_to_string(d.path().join("sim/sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 1 + 2 * 3);

    tiny(d.path());
    let p = json!({"manifesto_id": "a1", "chunk_index": 0, "score": 0.1, "model": "m", "split": "s"}).to_string()
        + "\n"
        + &json!({"manifesto_id": "a2", "chunk_index": 0, "score": -0.1, "model": "m", "split": "s"}).to_string();
    fs::write(d.path().join("p.jsonl"), p).unwrap();
    ok(d.path(), &["evaluate", "--gold", "tiny.jsonl", "--pred", "p.jsonl", "--level", "manifesto", "--out", "e"]);
    let md = ok(d.path(), &["report", "--input", "chunky/xtime=e", "--out", "r.csv"]);
    assert_eq!(md, "|   | xtime |\n|---|---|\n| chunky | r=1.000 |\n");
    assert!(d.path().join("r.csv.manifest.json").exists());
}

#[test]
fn registry_exports_every_category() {
    let d = tempfile::tempdir().unwrap();
    let csv = ok(d.path(), &["registry", "--format", "csv"]);
    assert_eq!(csv.lines().count(), 1 + 143);
    let json: Value = serde_json::from_str(&ok(d.path(), &["registry", "--dump"])).unwrap();
    assert_eq!(json["categories"].as_array().unwrap().len(), 143);
}

#[test]
fn outputs_are_identical_across_reruns_and_job_counts() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["ingest", "--in", "synthetic:manifestos=40,countries=4", "--out", "c.jsonl"]);
    ok(d.path(), &["split", "--mode", "xcountry", "--corpus", "c.jsonl", "--out", "s"]);
    ok(d.path(), &["train", "--corpus", "c.jsonl", "--split", "s/xcountry-c00.json", "--out", "m.bin", "--hash-bits", "12"]);
    ok(d.path(), &["predict", "--corpus", "c.jsonl", "--model", "m.bin", "--split", "s/xcountry-c00.json", "--out", "p.jsonl"]);
    let run = |jobs: &str, out: &str| {
        ok(d.path(), &["--jobs", jobs, "evaluate", "--gold", "c.jsonl", "--pred", "p.jsonl", "--level", "manifesto", "--out", out]);
        ["metrics.json", "scores.csv", "histogram.csv"].map(|f| fs::read(d.path().join(out).join(f)).unwrap())
    };
    assert_eq!(run("1", "e1"), run("4", "e4"));
    let model = fs::read(d.path().join("m.bin")).unwrap();
    ok(d.path(), &["train", "--corpus", "c.jsonl", "--split", "s/xcountry-c00.json", "--out", "m.bin", "--hash-bits", "12"]);
    assert_eq!(fs::read(d.path().join("m.bin")).unwrap(), model);
}
