use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hardmis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardmis"))
        .args(args)
        .output()
        .expect("spawn hardmis")
}

fn ok(args: &[&str]) {
    let out = hardmis(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn generate_analyze_weight_solve() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let report = dir.path().join("report.json");
    let weighted = dir.path().join("weighted.json");
    let solved = dir.path().join("solve.json");
    let approx = dir.path().join("approx.json");

    ok(&["generate", "--kind", "native", "--n", "30", "--rho", "0.6", "--seed", "4", "--out", p(&inst)]);
    ok(&["analyze", "--in", p(&inst), "--orientations", "12", "--out", p(&report)]);
    let r = json(&report);
    assert_eq!(r["fill_density"], 0.6);
    assert_eq!(r["component_sizes"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).sum::<u64>(), 30);

    ok(&["weight", "--in", p(&inst), "--scheme", "degree_centrality", "--out", p(&weighted)]);
    ok(&["solve", "--in", p(&weighted), "--out", p(&solved)]);
    let s = json(&solved);
    assert_eq!(s["optimal"], true);
    let opt = s["optimum"].as_f64().unwrap();
    assert!(opt > 0.0);
    assert_eq!(s["qubo_cost"].as_f64().unwrap(), -opt);
    assert!(s["lp_root"].as_f64().unwrap() >= opt);

    ok(&["approx", "--in", p(&inst), "--out", p(&approx)]);
    let a = json(&approx);
    assert_eq!(a["size"].as_u64().unwrap() as usize, a["solution"].as_array().unwrap().len());
}

#[test]
fn generators_cover_box_and_kings() {
    let dir = tempfile::tempdir().unwrap();
    let b = dir.path().join("box.json");
    let k = dir.path().join("kl.json");
    ok(&["generate", "--kind", "box", "--n", "50", "--rho", "1.5", "--seed", "1", "--out", p(&b)]);
    ok(&["generate", "--kind", "kings", "--width", "5", "--height", "4", "--rewire", "0.5", "--seed", "2", "--out", p(&k)]);
    let out = hardmis(&["generate", "--kind", "native", "--n", "10", "--out", p(&b)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--rho"));
}

#[test]
fn exhausted_budget_exits_with_status_3() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("kl.json");
    let solved = dir.path().join("solve.json");
    ok(&["generate", "--kind", "kings", "--width", "10", "--height", "10", "--rewire", "1.0", "--seed", "1", "--out", p(&inst)]);
    let out = hardmis(&["solve", "--in", p(&inst), "--budget-ticks", "5", "--out", p(&solved)]);
    assert_eq!(out.status.code(), Some(3));
    let s = json(&solved);
    assert_eq!(s["optimal"], false);
}

#[test]
fn bad_alpha_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    ok(&["generate", "--kind", "box", "--n", "10", "--rho", "1.0", "--out", p(&inst)]);
    let out = hardmis(&["solve", "--in", p(&inst), "--alpha", "0.5", "--out", p(&dir.path().join("s.json"))]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn anneal_and_mitigate() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let sched = dir.path().join("sched.json");
    let samples = dir.path().join("samples.json");
    let noisy = dir.path().join("noisy.json");
    let mitigated = dir.path().join("mitigated.json");
    ok(&["generate", "--kind", "native", "--n", "5", "--rho", "0.8", "--seed", "2", "--out", p(&inst)]);
    std::fs::write(
        &sched,
        r#"{"duration_us": 1.0, "omega": [[0.0, 0.0], [0.2, 12.566], [0.8, 12.566], [1.0, 0.0]],
            "delta": [[0.0, -25.13], [1.0, 25.13]]}"#,
    )
    .unwrap();

    ok(&["anneal", "--in", p(&inst), "--schedule", p(&sched), "--shots", "200", "--seed", "3", "--repair", "--out", p(&samples)]);
    let s = json(&samples);
    assert_eq!(s["shots"], 200);
    let total: u64 = s["counts"].as_object().unwrap().values().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(total, 200);

    ok(&[
        "anneal", "--in", p(&inst), "--duration", "1.0", "--shots", "300", "--seed", "3", "--noise", "p=0.03,q=0.08",
        "--mitigate", "--out", p(&noisy),
    ]);
    let n = json(&noisy);
    let clipped: f64 = n["mitigated"]["clipped"].as_object().unwrap().values().map(|v| v.as_f64().unwrap()).sum();
    assert!((clipped - 1.0).abs() < 1e-9);

    ok(&["mitigate", "--in", p(&noisy), "--noise", "p=0.03,q=0.08", "--out", p(&mitigated)]);
    let m = json(&mitigated);
    assert_eq!(m["n"], 5);
    let raw: f64 = m["raw"].as_object().unwrap().values().map(|v| v.as_f64().unwrap()).sum();
    assert!((raw - 1.0).abs() < 1e-9);

    let out = hardmis(&["anneal", "--in", p(&inst), "--mitigate", "--out", p(&noisy)]);
    assert!(!out.status.success());
}

#[test]
fn bench_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let csv = dir.path().join("out.csv");
    let csv2 = dir.path().join("out2.csv");
    let fig = dir.path().join("fig.csv");
    std::fs::write(
        &cfg,
        r#"{"generator": "native", "sizes": [12, 16], "rhos": [0.4, 0.8], "replicates": 2,
            "master_seed": 9, "schemes": ["unweighted", "uniform_random"]}"#,
    )
    .unwrap();
    ok(&["bench", "--config", p(&cfg), "--out", p(&csv), "--workers", "1"]);
    ok(&["bench", "--config", p(&cfg), "--out", p(&csv2), "--workers", "3"]);
    let a = std::fs::read(&csv).unwrap();
    assert_eq!(a, std::fs::read(&csv2).unwrap());
    assert_eq!(String::from_utf8_lossy(&a).lines().count(), 1 + 2 * 2 * 2 * 2);

    ok(&["report", "--in", p(&csv), "--figure", "fig1c", "--out", p(&fig)]);
    let text = std::fs::read_to_string(&fig).unwrap();
    assert!(text.starts_with("figure,n,rho,rewire,scheme,metric,count,mean,median,min,max"));
    assert!(text.lines().count() > 1);

    let out = hardmis(&["report", "--in", p(&csv), "--figure", "nope", "--out", p(&fig)]);
    assert!(!out.status.success());
}
