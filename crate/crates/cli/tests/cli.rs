use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn mccle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mccle"))
        .args(args)
        .env_remove("MCCLE_SEED")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) {
    let out = mccle(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn fails_with(args: &[&str], code: i32) -> String {
    let out = mccle(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with(&format!("mccle-error code={code} kind=")), "{err}");
    err
}

fn p(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn gen(dir: &TempDir, name: &str, n: usize, seed: u64) -> String {
    let path = p(dir, name);
    ok(&["gen", "--n", &n.to_string(), "--seed", &seed.to_string(), "--out", &path]);
    path
}

#[test]
fn gen_is_reproducible_and_records_provenance() {
    let dir = TempDir::new().unwrap();
    let a = gen(&dir, "a.jsonl", 100, 7);
    let b = gen(&dir, "b.jsonl", 100, 7);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().count(), 101);
    let header: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(header["seed"], 7);
    assert!(header["config_hash"].as_str().unwrap().len() == 16);
    let meta: serde_json::Value = serde_json::from_slice(&fs::read(format!("{a}.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 7);
    assert_eq!(meta["config_hash"], header["config_hash"]);
    let c = gen(&dir, "c.jsonl", 100, 8);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn gen_zero_is_header_only() {
    let dir = TempDir::new().unwrap();
    let a = gen(&dir, "empty.jsonl", 0, 1);
    assert_eq!(fs::read_to_string(a).unwrap().lines().count(), 1);
}

#[test]
fn unwritable_output_exits_2() {
    fails_with(&["gen", "--n", "3", "--out", "/nonexistent-dir/x/data.jsonl"], 2);
    let dir = TempDir::new().unwrap();
    fails_with(&["gen", "--n", "3", "--out", &dir.path().to_string_lossy()], 2);
}

#[test]
fn corrupt_dataset_exits_3_with_line() {
    let dir = TempDir::new().unwrap();
    let data = gen(&dir, "d.jsonl", 5, 1);
    let mut lines: Vec<String> = fs::read_to_string(&data).unwrap().lines().map(String::from).collect();
    lines[3] = "{\"tx\":[1,2],\"rx\":oops}".into();
    fs::write(&data, lines.join("\n")).unwrap();
    let err = fails_with(&["train", "--dataset", &data, "--epochs", "1", "--out", &p(&dir, "m.json")], 3);
    assert!(err.contains("line 4"), "{err}");
}

#[test]
fn zero_epochs_gives_seeded_init_and_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let data = gen(&dir, "d.jsonl", 40, 2);
    let a = p(&dir, "a.json");
    let b = p(&dir, "b.json");
    ok(&["train", "--dataset", &data, "--model", "mccle", "--epochs", "0", "--seed", "4", "--out", &a]);
    ok(&["train", "--dataset", &data, "--model", "mccle", "--epochs", "0", "--seed", "4", "--out", &b]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let ckpt = mccle_core::models::deserialize_params(&fs::read(&a).unwrap(), None).unwrap();
    assert_eq!(ckpt.model, mccle_core::Model::init(mccle_core::ModelKind::Mccle, 4));
    assert_eq!(ckpt.seed, 4);
    let hist = fs::read_to_string(format!("{a}.history.csv")).unwrap();
    assert!(hist.starts_with("# seed=4,config_hash="));
    assert_eq!(hist.lines().count(), 2);
}

#[test]
fn short_training_is_reproducible_across_worker_counts() {
    let dir = TempDir::new().unwrap();
    let data = gen(&dir, "d.jsonl", 60, 3);
    let mut outs = Vec::new();
    for (i, workers) in ["1", "2", "1"].iter().enumerate() {
        let out = p(&dir, &format!("m{i}.json"));
        ok(&[
            "train", "--dataset", &data, "--model", "gauss-polar", "--epochs", "3", "--k-candidates", "16",
            "--batch-size", "8", "--workers", workers, "--out", &out,
        ]);
        outs.push((fs::read(&out).unwrap(), fs::read(format!("{out}.history.csv")).unwrap()));
    }
    assert_eq!(outs[0], outs[2]);
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn uniform_baseline_eval() {
    let dir = TempDir::new().unwrap();
    let data = gen(&dir, "e.jsonl", 20, 5);
    let out = p(&dir, "metrics.json");
    ok(&["eval", "--dataset", &data, "--uniform", "--out", &out]);
    let v: serde_json::Value = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["model"], "uniform");
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[0]["k"], 961);
    assert_eq!(reports[1]["k"], 1000);
    for r in reports {
        assert!(r["loss"].as_f64().unwrap().abs() < 1e-12);
        assert!((r["geometric_improvement"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert!(r["gap_closure_pct"].as_f64().unwrap().abs() < 1e-9);
    }
}

#[test]
fn checkpoint_kind_mismatch_exits_4() {
    let dir = TempDir::new().unwrap();
    let data = gen(&dir, "d.jsonl", 20, 1);
    let ck = p(&dir, "g.json");
    ok(&["train", "--dataset", &data, "--model", "gauss-cart", "--epochs", "0", "--out", &ck]);
    fails_with(&["eval", "--dataset", &data, "--checkpoint", &ck, "--model", "mccle", "--out", &p(&dir, "m.json")], 4);
    fs::write(&ck, "{\"format\":\"mccle-checkpoint\",\"version\":99}").unwrap();
    fails_with(&["eval", "--dataset", &data, "--checkpoint", &ck, "--out", &p(&dir, "m.json")], 4);
}

#[test]
fn bad_geometry_exits_5() {
    let dir = TempDir::new().unwrap();
    let out = p(&dir, "maps");
    fails_with(&["heatmap", "--uniform", "--geometry", "1,2", "--out", &out], 5);
    fails_with(&["heatmap", "--uniform", "--geometry", "500,0,0", "--out", &out], 5);
}

#[test]
fn uniform_heatmaps_are_flat_and_reproducible() {
    let dir = TempDir::new().unwrap();
    let a = p(&dir, "a");
    let b = p(&dir, "b");
    ok(&["heatmap", "--uniform", "--seed", "3", "--ppm", "--out", &a]);
    ok(&["heatmap", "--uniform", "--seed", "3", "--ppm", "--out", &b]);
    let mut names: Vec<String> = fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names.len(), 20);
    for name in &names {
        let x = fs::read(Path::new(&a).join(name)).unwrap();
        assert_eq!(x, fs::read(Path::new(&b).join(name)).unwrap(), "{name}");
        if name.ends_with(".csv") {
            let text = String::from_utf8(x).unwrap();
            assert!(text.contains("seed=3,config_hash="));
            let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
            assert_eq!(rows.len(), 31);
            assert!(rows.iter().flat_map(|r| r.split(',')).all(|v| v.parse::<f64>().unwrap() == 0.0));
        }
    }
}

#[test]
fn full_suite_has_thirty_panels() {
    let dir = TempDir::new().unwrap();
    let data = gen(&dir, "d.jsonl", 10, 1);
    let mut args = vec!["heatmap".to_string()];
    for kind in ["mccle", "gauss-cart", "gauss-polar"] {
        let ck = p(&dir, &format!("{kind}.json"));
        ok(&["train", "--dataset", &data, "--model", kind, "--epochs", "0", "--out", &ck]);
        args.extend(["--checkpoint".to_string(), ck]);
    }
    let out = p(&dir, "maps");
    args.extend(["--out".to_string(), out.clone(), "--spacing".into(), "10".into()]);
    ok(&args.iter().map(String::as_str).collect::<Vec<_>>());
    let csvs = fs::read_dir(&out).unwrap().count();
    assert_eq!(csvs, 30);
    assert!(Path::new(&out).join("gauss-polar_dx-80_dy50_h0.csv").exists());
}

#[test]
fn single_geometry_in_degrees() {
    let dir = TempDir::new().unwrap();
    let out = p(&dir, "one");
    ok(&["heatmap", "--uniform", "--geometry", "-30,20,90", "--out", &out]);
    let text = fs::read_to_string(Path::new(&out).join("uniform_dx-30_dy20_h90.csv")).unwrap();
    assert!(text.contains("heading_deg=90"));
}

#[test]
fn env_overrides_seed() {
    let dir = TempDir::new().unwrap();
    let a = p(&dir, "a.jsonl");
    let status = Command::new(env!("CARGO_BIN_EXE_mccle"))
        .args(["gen", "--n", "3", "--out", &a])
        .env("MCCLE_SEED", "42")
        .status()
        .unwrap();
    assert!(status.success());
    let b = gen(&dir, "b.jsonl", 3, 42);
    assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
}

#[test]
fn desk_dataset_generates_within_budget() {
    let dir = TempDir::new().unwrap();
    let t = std::time::Instant::now();
    let path = gen(&dir, "desk.jsonl", 10_000, 0);
    assert!(t.elapsed().as_secs_f64() < 60.0, "{:?}", t.elapsed());
    assert_eq!(fs::read_to_string(path).unwrap().lines().count(), 10_001);
}
