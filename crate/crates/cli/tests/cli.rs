use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str], out: &Path, envs: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cocycle-lab"));
    c.args(args).arg("--out").arg(out);
    for (k, v) in envs {
        c.env(k, v);
    }
    c.output().expect("binary runs")
}

fn run_config(cmd: &str, config: &Path, out: &Path) -> Output {
    run(&[cmd, "--config", config.to_str().unwrap()], out, &[])
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// A config in a temp dir, with fixture references made absolute.
fn write_config(dir: &Path, text: &str) -> PathBuf {
    let text = text.replace("@/", &format!("{}/", fixture("").display()));
    let p = dir.join("config.json");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn delta_fixture_is_ml_irregular() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config("irregular", &fixture("irregular_delta.json"), dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("verdict: ML-irregular"));
    let rows = csv_rows(&dir.path().join("irregular.csv"));
    assert_eq!(rows.len(), 8);
    let (ln2, ln3) = (2f64.ln(), 3f64.ln());
    for (i, r) in rows.iter().enumerate() {
        let v: f64 = r[3].parse().unwrap();
        let near = if i % 2 == 0 { ln3 } else { ln2 };
        assert!((v - near).abs() < 0.1, "row {i}: {v}");
        assert_eq!(r[7], "true");
    }
    let verdict = json(&dir.path().join("irregular_verdict.json"));
    assert_eq!(verdict["result"]["verdict"], "ML-irregular");
}

#[test]
fn distinguished_measures_get_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config("scheme", &fixture("scheme_tiny.json"), dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("alternative (2)"));
    let r = &json(&dir.path().join("scheme.json"))["result"];
    assert_eq!(r["alternative"], 2);
    assert_eq!(r["verdict"], "ML-irregular");
    assert_eq!(r["points"], 64);
    assert_eq!(r["edp_lower_bound"]["status"]["status"], "certified");
    assert_eq!(r["packing_lower_bound"]["status"]["status"], "certified");
    assert_eq!(r["ball_sweep"]["level_violations"], 0);
    assert_eq!(r["cover_above_lower_bound"], true);
    assert!(r["edp_lower_bound"]["s"].as_f64().unwrap() > 0.0);
}

#[test]
fn equal_measures_take_the_first_alternative() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config("scheme", &fixture("scheme_shared.json"), dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stdout(&o).contains("alternative (1): measures share MLE"));
    let r = &json(&dir.path().join("scheme.json"))["result"];
    assert_eq!(r["alternative"], 1);
    assert_eq!(r["a"], r["b"]);
}

fn all_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn outputs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let lab = fixture("lab.json");
    let lab = lab.to_str().unwrap();
    for cmd in ["mle", "measure-mle", "entropy"] {
        assert!(run(&[cmd, "--config", lab], a.path(), &[]).status.success());
        assert!(run(&[cmd, "--config", lab], b.path(), &[("COCYCLE_LAB_THREADS", "1")]).status.success());
    }
    let (fa, fb) = (all_files(a.path()), all_files(b.path()));
    assert_eq!(fa.len(), 6);
    assert_eq!(fa, fb);
}

#[test]
fn golden_files() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_config("irregular", &fixture("irregular_delta.json"), dir.path()).status.success());
    assert!(run_config("measure-mle", &fixture("lab.json"), dir.path()).status.success());
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for name in ["irregular.csv", "measure_mle.csv"] {
        let got = std::fs::read_to_string(dir.path().join(name)).unwrap();
        let want = std::fs::read_to_string(golden.join(name)).unwrap();
        assert_eq!(got, want, "{name}");
    }
}

#[test]
fn every_output_carries_the_config_hash() {
    let dir = tempfile::tempdir().unwrap();
    let lab = fixture("lab.json");
    assert!(run_config("entropy", &lab, dir.path()).status.success());
    let first = std::fs::read_to_string(dir.path().join("entropy.csv")).unwrap();
    let hash = first.lines().next().unwrap().split("config_sha256=").nth(1).unwrap().to_string();
    assert_eq!(hash.len(), 64);
    for (name, bytes) in all_files(dir.path()) {
        assert!(String::from_utf8(bytes).unwrap().contains(&hash), "{name}");
    }
    let other = tempfile::tempdir().unwrap();
    assert!(run(&["entropy", "--config", lab.to_str().unwrap(), "--seed", "8"], other.path(), &[]).status.success());
    let again = std::fs::read_to_string(other.path().join("entropy.csv")).unwrap();
    assert!(!again.contains(&hash));
}

#[test]
fn json_series_format() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("irregular_delta.json");
    let o = run(&["irregular", "--config", cfg.to_str().unwrap(), "--format", "json"], dir.path(), &[]);
    assert!(o.status.success());
    let rows = json(&dir.path().join("irregular.json"));
    assert_eq!(rows["result"].as_array().unwrap().len(), 8);
    assert_eq!(rows["result"][0]["measure"], 1);
}

#[test]
fn config_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad_measure = write_config(
        dir.path(),
        r#"{ "system": "@/full_shift.json", "measures": ["@/bernoulli_01.json", { "P": [0.5, 0.6, 0.5, 0.5] }] }"#,
    );
    let o = run_config("measure-mle", &bad_measure, dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("measures[1]"), "{}", stderr(&o));

    let unknown = write_config(dir.path(), r#"{ "system": "@/full_shift.json", "entropy": { "eps": [0.5], "horizon": 8, "families": ["whole"], "colour": 1 } }"#);
    let o = run_config("entropy", &unknown, dir.path());
    assert!(stderr(&o).contains("entropy"), "{}", stderr(&o));
    assert!(stderr(&o).contains("colour"), "{}", stderr(&o));

    let non_dyadic = write_config(dir.path(), r#"{ "system": "@/full_shift.json", "entropy": { "eps": [0.3], "horizon": 8, "families": ["whole"] } }"#);
    let o = run_config("entropy", &non_dyadic, dir.path());
    assert!(stderr(&o).contains("entropy.eps"), "{}", stderr(&o));

    let golden = write_config(
        dir.path(),
        r#"{ "system": "@/golden_mean.json", "cocycle": "@/test_cocycle.json", "mle": { "points": [{ "text": "L(1) C()@0 R(1)" }], "checkpoints": [4] } }"#,
    );
    let o = run_config("mle", &golden, dir.path());
    assert!(stderr(&o).contains("mle.points[0].text"), "{}", stderr(&o));

    let missing = run_config("scheme", &fixture("lab.json"), dir.path());
    assert!(stderr(&missing).contains("`scheme`"), "{}", stderr(&missing));
}

#[test]
fn budget_exceedance_reports_the_size() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("scheme_tiny.json");
    let o = run(&["scheme", "--config", cfg.to_str().unwrap(), "--budget-nodes", "10"], dir.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("budget"), "{err}");
    assert!(err.contains("10"), "{err}");
}

#[test]
fn bad_thread_count_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--only", "1"], dir.path(), &[("COCYCLE_LAB_THREADS", "zero")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("COCYCLE_LAB_THREADS"));
}

#[test]
fn verify_reports_selected_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--only", "1,3,10"], dir.path(), &[]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS criterion")).count(), 3);
    let r = json(&dir.path().join("verify.json"));
    assert!(r["result"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    assert!(r["result"][0].get("elapsed_s").is_none());
}
