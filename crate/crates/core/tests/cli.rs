//! Runs the `bidbench` binary end to end on small synthetic datasets.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bidbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bidbench")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let o = bidbench(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    o
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn synth_dir(tmp: &TempDir, name: &str, auction: &str, n: usize, seed: u64) -> std::path::PathBuf {
    let dir = tmp.path().join(name);
    ok(&["synth", "--auction", auction, "-n", &n.to_string(), "--seed", &seed.to_string(), "--out", p(&dir)]);
    dir
}

fn csv_rows(path: &Path) -> Vec<BTreeMap<String, String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(str::to_string).collect();
    r.records()
        .map(|rec| header.iter().cloned().zip(rec.unwrap().iter().map(str::to_string)).collect())
        .collect()
}

#[test]
fn synth_honors_count_and_seed() {
    let tmp = TempDir::new().unwrap();
    let a = synth_dir(&tmp, "a", "fp", 23, 1);
    let b = synth_dir(&tmp, "b", "fp", 23, 1);
    let c = synth_dir(&tmp, "c", "fp", 23, 2);
    assert_eq!(csv_rows(&a.join("campaigns.csv")).len(), 23);
    let read = |d: &Path| std::fs::read(d.join("auction_stats.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
    let summary: serde_json::Value = serde_json::from_slice(&std::fs::read(a.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["n_campaigns"], 23);
}

#[test]
fn synth_with_two_auctions_writes_subdirectories() {
    let tmp = TempDir::new().unwrap();
    let dir = synth_dir(&tmp, "both", "vcg,fp", 5, 3);
    for t in ["vcg", "fp"] {
        assert!(dir.join(t).join("traffic.csv").is_file(), "{t}");
    }
    // the per-auction layout is picked up by validate
    ok(&["validate", "--dataset-dir", p(&dir), "--auction", "vcg,fp", "--report", p(&tmp.path().join("v.json"))]);
}

#[test]
fn validate_exit_codes() {
    let tmp = TempDir::new().unwrap();
    let dir = synth_dir(&tmp, "d", "vcg", 8, 4);
    let report = tmp.path().join("report.json");
    let o = bidbench(&["validate", "--dataset-dir", p(&dir), "--auction", "vcg", "--report", p(&report)]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(v[0]["report"]["passed"], true);

    // scale one region's shares so its week no longer sums to one
    let path = dir.join("traffic.csv");
    let mut r = csv::Reader::from_path(&path).unwrap();
    let header = r.headers().unwrap().clone();
    let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
    let region = rows[0][0].to_string();
    let mut w = csv::Writer::from_path(&path).unwrap();
    w.write_record(&header).unwrap();
    for row in rows {
        let mut f: Vec<String> = row.iter().map(str::to_string).collect();
        if f[0] == region {
            f[3] = (f[3].parse::<f64>().unwrap() * 1.01).to_string();
        }
        w.write_record(&f).unwrap();
    }
    w.flush().unwrap();
    drop(w);
    let o = bidbench(&["validate", "--dataset-dir", p(&dir), "--auction", "vcg", "--report", p(&report)]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("traffic_normalized") && err.contains(&format!("region {region}")), "{err}");

    let o = bidbench(&["validate", "--dataset-dir", p(&tmp.path().join("missing")), "--auction", "vcg"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing"));
}

#[test]
fn pacing_table_shape_and_inputs_untouched() {
    let tmp = TempDir::new().unwrap();
    let dir = synth_dir(&tmp, "d", "fp", 20, 5);
    let before: Vec<Vec<u8>> = ["campaigns.csv", "auction_stats.csv", "traffic.csv"]
        .iter()
        .map(|f| std::fs::read(dir.join(f)).unwrap())
        .collect();
    let out = tmp.path().join("out");
    ok(&["experiment", "--experiment", "pacing", "--dataset-dir", p(&dir), "--auction", "fp", "--out", p(&out), "--dump-trajectories"]);
    let table = csv_rows(&out.join("table.csv"));
    let algos: Vec<&str> = table.iter().map(|r| r["algorithm"].as_str()).collect();
    assert_eq!(algos, ["ALM", "TA-PID", "M-PID", "Mystique"]);
    assert!(table.iter().all(|r| r.contains_key("fp_rmse_t") && r.contains_key("fp_scr")));
    assert!(!csv_rows(&out.join("trajectories/fp_alm/1.csv")).is_empty());
    let after: Vec<Vec<u8>> = ["campaigns.csv", "auction_stats.csv", "traffic.csv"]
        .iter()
        .map(|f| std::fs::read(dir.join(f)).unwrap())
        .collect();
    assert_eq!(before, after);
}

#[test]
fn duration_split_partitions_clicks() {
    let tmp = TempDir::new().unwrap();
    let dir = synth_dir(&tmp, "d", "vcg", 60, 6);
    let split = tmp.path().join("split");
    let clicks = tmp.path().join("clicks");
    ok(&["experiment", "--experiment", "duration-split", "--dataset-dir", p(&dir), "--auction", "vcg", "--out", p(&split)]);
    ok(&["experiment", "--experiment", "clicks", "--dataset-dir", p(&dir), "--auction", "vcg", "--out", p(&clicks)]);
    let header = csv::Reader::from_path(split.join("table.csv")).unwrap().headers().unwrap().clone();
    assert_eq!(header.iter().collect::<Vec<_>>(), ["algorithm", "vcg_short_per_diem_scr", "vcg_long_per_diem_scr"]);

    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(split.join("report.json")).unwrap()).unwrap();
    let whole: serde_json::Value = serde_json::from_slice(&std::fs::read(clicks.join("report.json")).unwrap()).unwrap();
    for run in whole["runs"].as_array().unwrap() {
        let algo = &run["algorithm"];
        let parts: Vec<&serde_json::Value> = report["runs"].as_array().unwrap().iter().filter(|r| &r["algorithm"] == algo).collect();
        assert_eq!(parts.len(), 2);
        let n: u64 = parts.iter().map(|r| r["report"]["n_campaigns"].as_u64().unwrap()).sum();
        assert_eq!(n, run["report"]["n_campaigns"].as_u64().unwrap());
        let scr: f64 = parts.iter().map(|r| r["report"]["scr"].as_f64().unwrap()).sum();
        let total = run["report"]["scr"].as_f64().unwrap();
        assert!((scr - total).abs() <= 1e-9 * total.max(1.0), "{algo}: {scr} vs {total}");
    }
}

#[test]
fn tune_logs_every_trial() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("tune");
    ok(&[
        "tune", "--synth", "40", "--auction", "fp", "--experiment", "cpc", "--algo", "broi", "--tune-trials", "7", "--seed", "3", "--out", p(&out),
    ]);
    let trials = csv_rows(&out.join("trials/fp_broi.csv"));
    assert_eq!(trials.len(), 7);
    assert!(trials.iter().all(|t| t.contains_key("b0") && t.contains_key("score")));
    let best: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("best_fp_broi.json")).unwrap()).unwrap();
    assert_eq!(best["algorithm"], "broi");
    assert_eq!(best["objective"], "cpc");
    let train = best["tuning"]["split"]["train"].as_array().unwrap();
    let test = best["tuning"]["split"]["test"].as_array().unwrap();
    assert!(!train.is_empty() && !test.is_empty());
    assert!(train.iter().all(|id| !test.contains(id)));
}

#[test]
fn flags_override_config() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("bench.toml");
    std::fs::write(&cfg, "[run]\nexperiment = \"cpc\"\nsynth_campaigns = 12\nauction = \"vcg\"\n").unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    ok(&["experiment", "--config", p(&cfg), "--out", p(&a)]);
    ok(&["experiment", "--config", p(&cfg), "--experiment", "clicks", "--algo", "alm", "--out", p(&b)]);
    let ta = csv_rows(&a.join("table.csv"));
    assert_eq!(ta.len(), 2);
    assert!(ta[0].contains_key("vcg_rel_cpc"));
    let tb = csv_rows(&b.join("table.csv"));
    assert_eq!(tb.len(), 1);
    assert_eq!(tb[0]["algorithm"], "ALM");
    assert!(tb[0].contains_key("vcg_scr"));

    std::fs::write(&cfg, "[alm]\nbogus = 1\n").unwrap();
    let o = bidbench(&["experiment", "--config", p(&cfg), "--synth", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
}

#[test]
fn unknown_algorithm_is_rejected() {
    let o = bidbench(&["experiment", "--synth", "3", "--algo", "greedy"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("greedy"));
}

#[test]
fn describe_matches_synth_summary() {
    let tmp = TempDir::new().unwrap();
    let dir = synth_dir(&tmp, "d", "vcg", 15, 8);
    let o = ok(&["describe", "--dataset-dir", p(&dir), "--auction", "vcg"]);
    let described: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let written: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(described["durations"], written["durations"]);
    assert_eq!(described["budgets"], written["budgets"]);
    assert_eq!(described["n_records"], written["n_records"]);
}
