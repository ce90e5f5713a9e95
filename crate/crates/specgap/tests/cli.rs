use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BARBELL: &str = "n 6\n1 2\n1 3\n2 3\n3 4\n4 5\n4 6\n5 6\n";
const TWO_TRIANGLES: &str = "n 6\n1 2\n1 3\n2 3\n4 5\n4 6\n5 6\n";

fn specgap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specgap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn specgap_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specgap"))
        .args(args)
        .env("SPECGAP_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad json ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

#[test]
fn generate_matches_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = specgap(&[
        "generate", "--family", "ring", "--k", "3", "--size", "4", "--bridges", "1", "--seed", "7",
        "--out", s(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["ring_k3_s4_b1_seed7.edges", "ring_k3_s4_b1_seed7.json"] {
        assert_eq!(
            fs::read(dir.path().join(name)).unwrap(),
            fs::read(golden(name)).unwrap(),
            "{name}"
        );
    }
    let side: Value = serde_json::from_slice(&fs::read(golden("ring_k3_s4_b1_seed7.json")).unwrap()).unwrap();
    assert_eq!(side["closed_form"]["num"], 1);
    assert_eq!(side["closed_form"]["den"], 7);
}

#[test]
fn generate_barbell() {
    let dir = tempfile::tempdir().unwrap();
    let out = specgap(&["generate", "--family", "ring", "--k", "2", "--size", "3", "--out", s(dir.path())]);
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read_to_string(dir.path().join("ring_k2_s3_b1_seed0.edges")).unwrap(), BARBELL);
}

#[test]
fn generate_planted_and_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let d = s(dir.path());
    let ok = specgap(&[
        "generate", "--family", "planted", "--k", "2", "--size", "3", "--p-in", "1", "--p-out", "0", "--out", d,
    ]);
    assert_eq!(code(&ok), 0);
    assert_eq!(fs::read_to_string(dir.path().join("planted_k2_s3_seed0.edges")).unwrap(), TWO_TRIANGLES);

    assert_eq!(code(&specgap(&["generate", "--family", "ring", "--size", "3", "--out", d])), 2);
    assert_eq!(code(&specgap(&["generate", "--family", "planted", "--k", "2", "--size", "3", "--out", d])), 2);
    assert_eq!(
        code(&specgap(&[
            "generate", "--family", "planted", "--k", "2", "--size", "3", "--p-in", "0.3", "--p-out", "0.5", "--out", d,
        ])),
        2
    );
    assert_eq!(code(&specgap(&["generate", "--family", "ring", "--k", "3", "--size", "3", "--bridges", "4", "--out", d])), 2);
}

#[test]
fn partition_reports() {
    let dir = tempfile::tempdir().unwrap();
    let bb = write(dir.path(), "bb.edges", BARBELL);
    let eig = dir.path().join("eig.csv");
    let emb = dir.path().join("emb.csv");
    let res = dir.path().join("res.json");
    let out = specgap(&[
        "partition", s(&bb), "--k", "2", "--embedding", "sm", "--eigen-csv", s(&eig), "--embedding-csv", s(&emb),
        "--result", s(&res),
    ]);
    assert_eq!(code(&out), 0);
    let rep = json(&out);
    assert_eq!(rep["schema"], 1);
    assert_eq!(rep["clustering"]["blocks"], serde_json::json!([[1, 2, 3], [4, 5, 6]]));
    assert!(rep["clustering"]["cost"].is_f64());
    assert_eq!(rep["clustering"]["alpha_certified"], true);
    let eig = fs::read_to_string(eig).unwrap();
    assert!(eig.starts_with("node,f_1,f_2\nlambda,"));
    assert_eq!(eig.lines().count(), 8);
    let emb = fs::read_to_string(emb).unwrap();
    assert!(emb.starts_with("node,weight,x_1,x_2\n1,2,"));
    let side: Value = serde_json::from_slice(&fs::read(res).unwrap()).unwrap();
    assert_eq!(side["blocks"], serde_json::json!([[1, 2, 3], [4, 5, 6]]));

    let tt = write(dir.path(), "tt.edges", TWO_TRIANGLES);
    let out = specgap(&["partition", s(&tt), "--k", "2", "--embedding", "njw"]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["clustering"]["cost"].as_f64().unwrap() <= 1e-20);

    assert_eq!(code(&specgap(&["partition", s(&bb), "--k", "6"])), 2);
    assert_eq!(code(&specgap(&["partition", "/nonexistent/graph", "--k", "2"])), 2);
    let bad = write(dir.path(), "bad.edges", "n 2\n1 1\n");
    assert_eq!(code(&specgap(&["partition", s(&bad), "--k", "1"])), 2);
}

#[test]
fn oracle_reports() {
    let dir = tempfile::tempdir().unwrap();
    let bb = write(dir.path(), "bb.edges", BARBELL);
    let rep = json(&specgap(&["oracle", s(&bb), "--k", "2"]));
    for key in ["phi_k", "phi_bar_k"] {
        assert_eq!((rep[key]["num"].as_i64(), rep[key]["den"].as_i64()), (Some(1), Some(7)));
    }
    let tt = write(dir.path(), "tt.edges", TWO_TRIANGLES);
    assert_eq!(json(&specgap(&["oracle", s(&tt), "--k", "2"]))["psi"], "inf");

    let gen = specgap(&["generate", "--family", "ring", "--k", "4", "--size", "5", "--out", s(dir.path())]);
    assert_eq!(code(&gen), 0);
    let big = dir.path().join("ring_k4_s5_b1_seed0.edges");
    assert_eq!(code(&specgap(&["oracle", s(&big), "--k", "4"])), 2);
}

#[test]
fn verify_certified_fixtures_pass() {
    let dir = tempfile::tempdir().unwrap();
    let bb = write(dir.path(), "bb.edges", BARBELL);
    for kind in ["sm", "njw"] {
        let out = specgap(&["verify", s(&bb), "--k", "2", "--embedding", kind, "--oracle"]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
        let rep = json(&out);
        assert_eq!(rep["summary"]["passed"], true);
        assert_eq!(rep["gap"]["certified"], true);
    }
    let ring = golden("ring_k3_s4_b1_seed7.edges");
    let out = specgap(&["verify", s(&ring), "--k", "3", "--oracle"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json(&out)["theorem1"]["applicable"], false);
}

#[test]
fn verify_surrogate_on_large_ring() {
    let dir = tempfile::tempdir().unwrap();
    let gen = specgap(&["generate", "--family", "ring", "--k", "4", "--size", "5", "--bridges", "2", "--out", s(dir.path())]);
    assert_eq!(code(&gen), 0);
    let g = dir.path().join("ring_k4_s5_b2_seed0.edges");
    let p = dir.path().join("ring_k4_s5_b2_seed0.json");
    let out = specgap(&["verify", s(&g), "--k", "4", "--planted", s(&p)]);
    assert_eq!(code(&out), 0);
    let rep = json(&out);
    assert_eq!(rep["gap"]["certified"], false);
    assert_eq!(rep["gap"]["source"], "planted");
    assert_eq!(rep["clustering"]["blocks"], rep["gap"]["partition"]);
    // too large for the oracle and no planted partition
    assert_eq!(code(&specgap(&["verify", s(&g), "--k", "4"])), 2);
}

#[test]
fn verify_flags_corrupted_result() {
    let dir = tempfile::tempdir().unwrap();
    let tt = write(dir.path(), "tt.edges", TWO_TRIANGLES);
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"schema": 1, "source": "test", "node_count": 6, "blocks": [[1, 2, 4], [3, 5, 6]]}"#,
    );
    let out = specgap(&["verify", s(&tt), "--k", "2", "--oracle", "--result", s(&bad), "--alpha", "1"]);
    assert_eq!(code(&out), 4);
    let rep = json(&out);
    assert_eq!(rep["summary"]["passed"], false);
    assert!(!rep["summary"]["violations"].as_array().unwrap().is_empty());

    // without an asserted ratio, α̂ = COST/0 = ∞ and nothing is claimed
    let out = specgap(&["verify", s(&tt), "--k", "2", "--oracle", "--result", s(&bad)]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["clustering"]["alpha_hat"], "inf");
}

#[test]
fn verify_is_byte_identical() {
    let ring = golden("ring_k3_s4_b1_seed7.edges");
    let args = ["verify", s(&ring), "--k", "3", "--embedding", "njw", "--oracle", "--seeds", "3,1,4,1,5"];
    let a = specgap_env(&args, "1");
    let b = specgap_env(&args, "4");
    assert_eq!(code(&a), 0);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let mut with_out = args.to_vec();
    with_out.extend(["--out", s(&out)]);
    let c = specgap(&with_out);
    assert!(c.stdout.is_empty());
    assert_eq!(fs::read(&out).unwrap(), a.stdout);

    assert_eq!(code(&specgap_env(&args, "zero")), 2);
}
