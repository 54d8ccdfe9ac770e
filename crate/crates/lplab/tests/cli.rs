use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lplab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lplab"))
        .args(args)
        .env_remove("LPLAB_THREADS")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn norm_of_constant() {
    let o = lplab(&[
        "norm",
        "--space",
        "lebesgue:p=3",
        "--u0",
        "builtin:constant",
    ]);
    assert_eq!(code(&o), 0);
    let v: f64 = String::from_utf8(o.stdout).unwrap().trim().parse().unwrap();
    // default grid: 2-d box of side 2π, c = 2
    let want = 2.0 * (4.0 * std::f64::consts::PI * std::f64::consts::PI).cbrt();
    assert!((v - want).abs() <= 1e-12 * want, "{v} vs {want}");
}

#[test]
fn solve_small_datum() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("report.json");
    let dump = dir.path().join("u.lpf");
    let o = lplab(&[
        "solve",
        "--u0",
        "builtin:small",
        "--space",
        "lebesgue:p=3",
        "--N",
        "4",
        "--K",
        "12",
        "--tol",
        "1e-8",
        "--out",
        rep.to_str().unwrap(),
        "--dump",
        dump.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&rep);
    let res = r["result"]["final_residual"].as_f64().unwrap();
    assert!(res <= 1e-8, "{res}");
    assert!(r["result"]["margin"].as_f64().unwrap() < 0.25);
    assert_eq!(r["config"]["grid"]["n"], 32);
    assert_eq!(r["config"]["quad_nodes"], 32);
    assert!(dump.exists() && lplab::lpf::sidecar_path(&dump).exists());
    let f = lplab::lpf::read_field(&dump).unwrap();
    assert_eq!(f.grid.n, 32);
}

#[test]
fn refusal_exits_3_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("r.json");
    let o = lplab(&[
        "solve",
        "--u0",
        "builtin:large",
        "--probes",
        "4",
        "--out",
        rep.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3);
    let r = json(&rep);
    assert_eq!(r["result"]["refused"], true);
    assert!(r["result"]["margin"].as_f64().unwrap() > 1.0);
}

#[test]
fn selftest_passes() {
    let o = lplab(&["selftest"]);
    assert_eq!(code(&o), 0);
    assert!(!String::from_utf8(o.stdout).unwrap().contains("FAIL"));
}

#[test]
fn usage_and_precondition_codes() {
    assert_eq!(code(&lplab(&["--frobnicate", "selftest"])), 64);
    assert_eq!(code(&lplab(&["norm", "--space", "lebesgue:q=3"])), 64);
    assert_eq!(code(&lplab(&["--help"])), 0);
    assert_eq!(code(&lplab(&["--version"])), 0);
    assert_eq!(code(&lplab(&["--size", "48", "norm"])), 2);
    assert_eq!(code(&lplab(&["norm", "--u0", "/no/such/file.lpf"])), 2);
}

#[test]
fn threads_env_fallback_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"grid": {"dim": 2, "n": 16, "l": 1.0}, "seed": 5, "space": "besov:s=-0.5,p=6,q=inf"}"#,
    )
    .unwrap();
    let rep = dir.path().join("r.json");
    let o = Command::new(env!("CARGO_BIN_EXE_lplab"))
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            rep.to_str().unwrap(),
            "norm",
            "--u0",
            "builtin:critical",
        ])
        .env("LPLAB_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&rep);
    assert_eq!(r["config"]["threads"], 3);
    assert_eq!(r["config"]["seed"], 5);
    assert_eq!(r["config"]["grid"]["n"], 16);
    assert_eq!(r["config"]["space"], "besov:s=-0.5,p=6,q=inf");
    // flag beats environment
    let o = lplab(&["--threads", "2", "--out", rep.to_str().unwrap(), "selftest"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&rep)["config"]["threads"], 2);
}

#[test]
fn decompose_dumps_reload() {
    let dir = tempfile::tempdir().unwrap();
    let bands = dir.path().join("bands");
    let o = lplab(&[
        "--size",
        "32",
        "decompose",
        "--u0",
        "builtin:critical",
        "--dump-dir",
        bands.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let f = bands.join("band_2.lpf");
    assert!(f.exists());
    let via_file = lplab(&["norm", "--u0", f.to_str().unwrap()]);
    assert_eq!(code(&via_file), 0);
    let v: f64 = String::from_utf8(via_file.stdout)
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    let table = String::from_utf8(o.stdout).unwrap();
    let row = table.lines().find(|l| l.starts_with("2,")).unwrap();
    let want: f64 = row[2..].parse().unwrap();
    assert!((v - want).abs() <= 1e-12 * want);
}

#[test]
fn csv_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let o = lplab(&[
            "--quiet",
            "--csv",
            p.to_str().unwrap(),
            "counterexample",
            "kernel",
        ]);
        assert_eq!(code(&o), 0);
        assert!(o.stdout.is_empty());
        std::fs::read(p).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    assert!(String::from_utf8(a)
        .unwrap()
        .starts_with("x1,l1,l2,l3,integral,ratio,in_cone\n"));
}
