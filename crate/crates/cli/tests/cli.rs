use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use l2uwe::synthetic::synthetic_pair;
use l2uwe::{load_image, save_png};
use serde_json::Value;
use tempfile::TempDir;

fn l2uwe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_l2uwe"))
        .args(args)
        .env_remove("L2UWE_JOBS")
        .output()
        .unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_dark(dir: &Path, name: &str, seed: u64) -> PathBuf {
    let path = dir.join(name);
    save_png(&synthetic_pair(64, 48, seed).dark, &path).unwrap();
    path
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn single_png_with_defaults() {
    let tmp = TempDir::new().unwrap();
    let input = write_dark(tmp.path(), "reef.png", 1);
    let out_dir = tmp.path().join("out");
    let out = l2uwe(&["enhance", p(&input), "-o", p(&out_dir)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let img = load_image(out_dir.join("reef_l2uwe.png")).unwrap();
    assert_eq!(img.dims(), (64, 48));
    let m = manifest(&out_dir);
    let records = m["records"].as_array().unwrap();
    assert_eq!(records.len(), 1);
    assert_eq!(records[0]["status"], "ok");
    assert_eq!(m["config"]["m_bright"], 30);
    assert_eq!(m["config"]["lighting_mode"], "local_cg");
    assert!(m["timings"]["total_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn corrupt_file_is_recorded_and_skipped() {
    let tmp = TempDir::new().unwrap();
    let inputs = tmp.path().join("in");
    fs::create_dir(&inputs).unwrap();
    write_dark(&inputs, "a.png", 2);
    fs::write(inputs.join("b.png"), b"not a png").unwrap();
    let out_dir = tmp.path().join("out");
    let out = l2uwe(&["enhance", p(&inputs), "-o", p(&out_dir), "--metrics"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stderr(&out).contains("b.png"));
    let m = manifest(&out_dir);
    let records = m["records"].as_array().unwrap();
    assert_eq!(records.len(), 2);
    assert_eq!(records[0]["status"], "ok");
    assert!(records[0]["metrics"]["gcf"].as_f64().unwrap() > 0.0);
    assert_eq!(records[1]["status"], "error");
    assert!(records[1]["error"].as_str().unwrap().contains("b.png"));
}

#[test]
fn nothing_processed_exits_2() {
    let tmp = TempDir::new().unwrap();
    let bad = tmp.path().join("bad.png");
    fs::write(&bad, b"junk").unwrap();
    let out = l2uwe(&["enhance", p(&bad), "-o", p(&tmp.path().join("out"))]);
    assert_eq!(out.status.code(), Some(2));
    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let out = l2uwe(&["enhance", p(&empty), "-o", p(&tmp.path().join("out2"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_config_exits_1_naming_the_field() {
    let tmp = TempDir::new().unwrap();
    let input = write_dark(tmp.path(), "a.png", 3);
    let out_dir = tmp.path().join("out");
    let out = l2uwe(&["enhance", p(&input), "-o", p(&out_dir), "--omega", "1.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("omega"), "{}", stderr(&out));
    assert!(!out_dir.exists());

    let out = l2uwe(&["enhance", p(&input), "-o", p(&out_dir), "--m-detail", "30", "--m-bright", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("m_bright"), "{}", stderr(&out));

    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, r#"{"guided_radius": 8, "gamma": 2}"#).unwrap();
    let out = l2uwe(&["enhance", p(&input), "-o", p(&out_dir), "--config", p(&cfg)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("gamma"), "{}", stderr(&out));

    let out = l2uwe(&["enhance", p(&input), "-o", p(&out_dir), "--lighting-mode", "sideways"]);
    assert_eq!(out.status.code(), Some(1));
    let out = l2uwe(&["enhance", p(&input), "-o", p(&out_dir), "--jobs", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("jobs"));
}

#[test]
fn global_mode_differs_from_local() {
    let tmp = TempDir::new().unwrap();
    let input = write_dark(tmp.path(), "a.png", 4);
    let local = tmp.path().join("local");
    let global = tmp.path().join("global");
    assert!(l2uwe(&["enhance", p(&input), "-o", p(&local)]).status.success());
    assert!(l2uwe(&["enhance", p(&input), "-o", p(&global), "--lighting-mode", "global", "--fraction", "0.01"])
        .status
        .success());
    assert_eq!(manifest(&global)["config"]["atmosphere_fraction"], 0.01);
    let a = load_image(local.join("a_l2uwe.png")).unwrap();
    let b = load_image(global.join("a_l2uwe.png")).unwrap();
    assert_ne!(a.data(), b.data());
}

fn without_timings(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timings");
    v
}

#[test]
fn runs_are_deterministic_and_manifest_config_reproduces() {
    let tmp = TempDir::new().unwrap();
    let inputs = tmp.path().join("in");
    fs::create_dir(&inputs).unwrap();
    write_dark(&inputs, "a.png", 5);
    write_dark(&inputs, "b.png", 6);
    let out_dir = tmp.path().join("out");
    let args = ["enhance", p(&inputs), "-o", p(&out_dir), "--m-bright", "25", "--tolerance", "0.01", "--metrics"];
    assert!(l2uwe(&args).status.success());
    let first = manifest(&out_dir);
    let png = fs::read(out_dir.join("b_l2uwe.png")).unwrap();
    assert!(l2uwe(&[&args[..], &["--jobs", "2"]].concat()).status.success());
    assert_eq!(without_timings(manifest(&out_dir)), without_timings(first.clone()));
    assert_eq!(fs::read(out_dir.join("b_l2uwe.png")).unwrap(), png);

    let replay = tmp.path().join("replay");
    let saved = tmp.path().join("saved_manifest.json");
    fs::copy(out_dir.join("manifest.json"), &saved).unwrap();
    assert!(l2uwe(&["enhance", p(&inputs), "-o", p(&replay), "--config", p(&saved)]).status.success());
    assert_eq!(manifest(&replay)["config"], first["config"]);
    assert_eq!(fs::read(replay.join("b_l2uwe.png")).unwrap(), png);
}

#[test]
fn jobs_default_comes_from_environment() {
    let tmp = TempDir::new().unwrap();
    let input = write_dark(tmp.path(), "a.png", 7);
    let out_dir = tmp.path().join("out");
    let out = Command::new(env!("CARGO_BIN_EXE_l2uwe"))
        .args(["enhance", p(&input), "-o", p(&out_dir)])
        .env("L2UWE_JOBS", "3")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(manifest(&out_dir)["timings"]["jobs"], 3);
}

#[test]
fn dump_writes_intermediates() {
    let tmp = TempDir::new().unwrap();
    let input = write_dark(tmp.path(), "a.png", 8);
    let out_dir = tmp.path().join("out");
    assert!(l2uwe(&["enhance", p(&input), "-o", p(&out_dir), "--dump"]).status.success());
    let dump = out_dir.join("a_l2uwe");
    assert_eq!(manifest(&out_dir)["records"][0]["dump_dir"], p(&dump));
    for name in ["cci.png", "m5_light.pfm", "m30_transmission.pfm", "m30_weight_normalized.pfm", "fused_unclamped.pfm"] {
        assert!(dump.join(name).is_file(), "{name}");
    }
}

#[test]
fn inspect_dumps_weights_and_fused_image() {
    let tmp = TempDir::new().unwrap();
    let input = write_dark(tmp.path(), "a.png", 9);
    let out_dir = tmp.path().join("inspect");
    let out = l2uwe(&["inspect", p(&input), "-o", p(&out_dir), "--lighting-mode", "global"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let mut pfms = 0;
    for m in [5, 30] {
        for w in ["saliency", "luminance", "local_contrast", "normalized"] {
            let map = l2uwe::io::read_pfm(out_dir.join(format!("m{m}_weight_{w}.pfm"))).unwrap();
            assert_eq!(map.dims(), (64, 48));
            pfms += 1;
        }
    }
    assert_eq!(pfms, 8);
    let fused = l2uwe::io::read_pfm(out_dir.join("fused_unclamped.pfm")).unwrap();
    assert_eq!(fused.channels(), 3);
    let summary: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["code_histogram"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).sum::<u64>(), 64 * 48);
    assert!(summary["global_light"].is_array());
    assert!(out_dir.join("summary.json").is_file());
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn compare_identical_directories() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().join("imgs");
    fs::create_dir(&dir).unwrap();
    write_dark(&dir, "a.png", 10);
    write_dark(&dir, "b.png", 11);
    let report = tmp.path().join("report");
    let out = l2uwe(&["compare", p(&dir), p(&dir), "-o", p(&report)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let json: Value = serde_json::from_str(&fs::read_to_string(report.join("metrics.json")).unwrap()).unwrap();
    let pairs = json["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 2);
    for pair in pairs {
        assert_eq!(pair["metrics"]["e_score"], 0.0);
        assert_eq!(pair["metrics"]["r_score"], 1.0);
        assert_eq!(pair["metrics"]["mean_luminance_in"], pair["metrics"]["mean_luminance_out"]);
    }
    let rows = read_csv(&report.join("metrics.csv"));
    assert_eq!(rows[0], ["metric", "mean", "std"]);
    let delta = rows.iter().find(|r| r[0] == "delta_mean_luminance").unwrap();
    assert_eq!(delta[1].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn compare_with_no_common_names_writes_empty_csv() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    fs::create_dir(&a).unwrap();
    fs::create_dir(&b).unwrap();
    write_dark(&a, "x.png", 12);
    write_dark(&b, "y.png", 13);
    let report = tmp.path().join("report");
    let out = l2uwe(&["compare", p(&a), p(&b), "-o", p(&report)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("no matching"));
    assert_eq!(read_csv(&report.join("metrics.csv")), [["metric", "mean", "std"]]);
    let json: Value = serde_json::from_str(&fs::read_to_string(report.join("metrics.json")).unwrap()).unwrap();
    assert_eq!(json["unmatched"].as_array().unwrap().len(), 2);
}

#[test]
fn compare_matches_enhanced_suffix() {
    let tmp = TempDir::new().unwrap();
    let orig = tmp.path().join("orig");
    fs::create_dir(&orig).unwrap();
    for i in 0..3 {
        write_dark(&orig, &format!("img{i}.png"), 20 + i);
    }
    let enh = tmp.path().join("enh");
    assert!(l2uwe(&["enhance", p(&orig), "-o", p(&enh)]).status.success());
    let report = tmp.path().join("report");
    assert!(l2uwe(&["compare", p(&orig), p(&enh), "-o", p(&report)]).status.success());
    let json: Value = serde_json::from_str(&fs::read_to_string(report.join("metrics.json")).unwrap()).unwrap();
    assert_eq!(json["pairs"].as_array().unwrap().len(), 3);
    let rows = read_csv(&report.join("metrics.csv"));
    let get = |name: &str| rows.iter().find(|r| r[0] == name).unwrap()[1].parse::<f64>().unwrap();
    assert!(get("mean_luminance_out") > get("mean_luminance_in"));
}
