use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use phdim::io::write_embeddings;
use phdim::{sample_manifold, ManifoldSpec};
use serde_json::Value;

fn phdim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phdim"))
        .args(args)
        .output()
        .expect("run phdim")
}

fn emb(dir: &Path, name: &str, d: usize, n: usize, seed: u64) -> PathBuf {
    let path = dir.join(name);
    let cloud = sample_manifold(&ManifoldSpec::cube(d, d + 2, n, 0.0, seed)).unwrap();
    write_embeddings(&path, &cloud).unwrap();
    path
}

fn lines(path: &Path) -> Vec<Value> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn estimate_single_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = emb(dir.path(), "a.emb", 3, 120, 1);
    let out = dir.path().join("r.jsonl");
    let o = phdim(&["estimate", "--input", s(&input), "--seed", "9", "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let recs = lines(&out);
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0]["method"], "phd");
    assert!(recs[0]["value"].as_f64().unwrap().is_finite());
    assert_eq!(recs[0]["slopes"].as_array().unwrap().len(), 3);
    assert_eq!(recs[0]["params"]["seed"], 9);
    assert_eq!(recs[0]["params"]["k_grid"], 8);
    assert_eq!(recs[0]["id"], s(&input));
}

#[test]
fn estimate_manifest_with_short_file() {
    let dir = tempfile::tempdir().unwrap();
    emb(dir.path(), "ok1.emb", 3, 100, 1);
    emb(dir.path(), "short.emb", 3, 30, 2);
    emb(dir.path(), "ok2.emb", 3, 90, 3);
    let manifest = dir.path().join("m.jsonl");
    fs::write(
        &manifest,
        "{\"path\":\"ok1.emb\",\"label\":\"human\"}\n{\"path\":\"short.emb\",\"label\":\"human\"}\n{\"path\":\"ok2.emb\"}\n",
    )
    .unwrap();
    let out = dir.path().join("r.jsonl");
    let o = phdim(&["estimate", "--input", s(&manifest), "--out", s(&out)]);
    assert!(o.status.success());
    let recs = lines(&out);
    assert_eq!(recs.len(), 3);
    assert!(recs[0]["value"].is_f64());
    assert_eq!(recs[1]["error"], "TooFewPoints");
    assert!(recs[1]["value"].is_null());
    assert!(recs[2]["value"].is_f64());
    assert_eq!(recs[0]["label"], "human");
}

#[test]
fn estimate_mle_method() {
    let dir = tempfile::tempdir().unwrap();
    let input = emb(dir.path(), "a.emb", 2, 200, 4);
    let out = dir.path().join("r.jsonl");
    let o = phdim(&["estimate", "--input", s(&input), "--method", "mle", "--mle-k", "10", "--out", s(&out)]);
    assert!(o.status.success());
    let recs = lines(&out);
    assert_eq!(recs[0]["method"], "mle");
    assert_eq!(recs[0]["params"]["k_neighbors"], 10);
    assert!(recs[0].get("slopes").is_none());
}

#[test]
fn estimate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for i in 0..4 {
        emb(dir.path(), &format!("c{i}.emb"), 2 + i, 80 + 20 * i, i as u64);
    }
    let manifest = dir.path().join("m.jsonl");
    let body: String = (0..4).map(|i| format!("{{\"path\":\"c{i}.emb\"}}\n")).collect();
    fs::write(&manifest, body).unwrap();
    let (a, b) = (dir.path().join("a.jsonl"), dir.path().join("b.jsonl"));
    assert!(phdim(&["estimate", "--input", s(&manifest), "--seed", "3", "--out", s(&a)]).status.success());
    assert!(phdim(&["estimate", "--input", s(&manifest), "--seed", "3", "--out", s(&b)]).status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn unreadable_input_sets_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    emb(dir.path(), "ok.emb", 3, 60, 1);
    fs::write(dir.path().join("bad.emb"), b"EMB2\x01\x00\x00\x00").unwrap();
    let manifest = dir.path().join("m.jsonl");
    fs::write(
        &manifest,
        "{\"path\":\"ok.emb\"}\n{\"path\":\"missing.emb\"}\n{\"path\":\"bad.emb\"}\n",
    )
    .unwrap();
    let out = dir.path().join("r.jsonl");
    let o = phdim(&["estimate", "--input", s(&manifest), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
    let recs = lines(&out);
    assert!(recs[0]["value"].is_f64());
    assert_eq!(recs[1]["error"], "IoError");
    assert_eq!(recs[2]["error"], "BadMagic");
}

#[test]
fn fit_modes_write_model_documents() {
    let dir = tempfile::tempdir().unwrap();
    let human = dir.path().join("h.txt");
    let generated = dir.path().join("g.txt");
    fs::write(&human, "9\n10\n{\"id\":\"x\",\"value\":11}\n{\"id\":\"y\",\"value\":null}\n").unwrap();
    fs::write(&generated, "7\n8\n").unwrap();

    let m = dir.path().join("fpr.json");
    assert!(phdim(&["fit", "--human", s(&human), "--mode", "fpr", "--target-fpr", "0.01", "--out", s(&m)]).status.success());
    let doc: Value = serde_json::from_str(&fs::read_to_string(&m).unwrap()).unwrap();
    assert_eq!(doc["rule"], "threshold");
    assert!(doc["threshold"].as_f64().unwrap() < 9.0);
    assert_eq!(doc["calibration"]["method"], "target_fpr");
    assert_eq!(doc["calibration"]["n_human"], 3);

    let m = dir.path().join("eer.json");
    assert!(phdim(&["fit", "--human", s(&human), "--generated", s(&generated), "--mode", "eer", "--out", s(&m)]).status.success());
    let doc: Value = serde_json::from_str(&fs::read_to_string(&m).unwrap()).unwrap();
    assert_eq!(doc["threshold"], 8.5);
    assert_eq!(doc["calibration"]["eer"], 0.0);

    let m = dir.path().join("lr.json");
    assert!(phdim(&["fit", "--human", s(&human), "--generated", s(&generated), "--mode", "logistic", "--out", s(&m)]).status.success());
    let doc: Value = serde_json::from_str(&fs::read_to_string(&m).unwrap()).unwrap();
    assert_eq!(doc["rule"], "threshold");
    assert!(doc["calibration"]["note"].as_str().unwrap().contains("separation"));

    let o = phdim(&["fit", "--human", s(&human), "--mode", "eer", "--out", s(&m)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn detect_and_eval() {
    let dir = tempfile::tempdir().unwrap();
    let mut manifest = String::new();
    for i in 0..6u64 {
        emb(dir.path(), &format!("h{i}.emb"), 6, 150, 100 + i);
        emb(dir.path(), &format!("g{i}.emb"), 2, 150, 200 + i);
        let lang = if i % 2 == 0 { "en" } else { "es" };
        manifest.push_str(&format!("{{\"path\":\"h{i}.emb\",\"label\":\"human\",\"language\":\"{lang}\"}}\n"));
        manifest.push_str(&format!(
            "{{\"path\":\"g{i}.emb\",\"label\":\"generated\",\"language\":\"{lang}\",\"generator\":\"toy\"}}\n"
        ));
    }
    let manifest_path = dir.path().join("m.jsonl");
    fs::write(&manifest_path, manifest).unwrap();

    let scores = dir.path().join("scores.jsonl");
    assert!(phdim(&["estimate", "--input", s(&manifest_path), "--out", s(&scores)]).status.success());
    let recs = lines(&scores);
    let (h, g): (Vec<&Value>, Vec<&Value>) = recs.iter().partition(|r| r["label"] == "human");
    let hs: String = h.iter().map(|r| format!("{}\n", r)).collect();
    let gs: String = g.iter().map(|r| format!("{}\n", r)).collect();
    let (hp, gp) = (dir.path().join("h.jsonl"), dir.path().join("g.jsonl"));
    fs::write(&hp, hs).unwrap();
    fs::write(&gp, gs).unwrap();

    let model = dir.path().join("model.json");
    assert!(phdim(&["fit", "--human", s(&hp), "--generated", s(&gp), "--mode", "eer", "--out", s(&model)]).status.success());

    let verdicts = dir.path().join("v.jsonl");
    assert!(phdim(&["detect", "--model", s(&model), "--input", s(&manifest_path), "--out", s(&verdicts)]).status.success());
    for v in lines(&verdicts) {
        let expected = if v["label"] == "human" { "human" } else { "generated" };
        assert_eq!(v["verdict"], expected, "{v}");
    }

    let report = dir.path().join("eval.jsonl");
    let o = phdim(&[
        "eval", "--model", s(&model), "--manifest", s(&manifest_path), "--fpr", "0.01", "--fpr", "0.2", "--out", s(&report),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = &lines(&report)[0];
    assert_eq!(r["roc_auc"], 1.0);
    assert_eq!(r["eer"], 0.0);
    assert_eq!(r["accuracy_at_fpr"].as_array().unwrap().len(), 2);
    assert_eq!(r["counts"]["human"], 6);
    let keys: Vec<String> = r["breakdowns"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| format!("{}={}", b["key"].as_str().unwrap(), b["value"].as_str().unwrap()))
        .collect();
    assert_eq!(keys, vec!["generator=toy", "language=en", "language=es"]);
}

#[test]
fn synth_bench_emits_cells() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.jsonl");
    fs::write(
        &spec,
        "{\"kind\":\"cube\",\"intrinsic_d\":2,\"ambient_d\":3,\"n_points\":120,\"seed\":1}\n\
         {\"kind\":\"sphere\",\"intrinsic_d\":2,\"ambient_d\":3,\"n_points\":120,\"noise_sigma\":0.01,\"seed\":2}\n",
    )
    .unwrap();
    let out = dir.path().join("bench.jsonl");
    let o = phdim(&["synth-bench", "--spec", s(&spec), "--repeats", "3", "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let cells = lines(&out);
    assert_eq!(cells.len(), 4);
    assert_eq!(cells[0]["estimator"], "phd");
    assert_eq!(cells[1]["estimator"], "mle");
    assert_eq!(cells[2]["spec"]["kind"], "sphere");
    assert_eq!(cells[0]["estimates"].as_array().unwrap().len(), 3);
}
