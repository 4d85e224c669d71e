use std::path::{Path, PathBuf};
use std::process::Command;

use hinf_cli::config::DesignConfig;
use hinf_cli::pipeline::{design, rebuild, DesignReport, RouteTaken};
use hinf_core::{Tolerances, C64};

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn stabhinf(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_stabhinf")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("cfg.json");
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const EX1: &str = include_str!("../examples/ex1.json");

#[test]
fn check_example_passes_case_i() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = stabhinf(&["check", "--config", example("ex1.json").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("case IF"));
    assert!(dir.path().join("assumptions.json").exists());
}

#[test]
fn delay_ordering_violation_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = EX1.replace(r#"[["0", [3.0, 1.0]], ["2/5", [-2.0, 2.0]]]"#, r#"[["2/5", [-2.0, 2.0]], ["0", [3.0, 1.0]]]"#);
    assert_ne!(bad, EX1);
    let cfg = write_config(dir.path(), &bad);
    let (code, _, err) = stabhinf(&["check", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("A.1(b)"), "{err}");
}

#[test]
fn axis_pole_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{
          "plant": { "numerator": [["0", [1.0]]], "denominator": [["0", [1.0, 0.0, 1.0]]] },
          "weights": { "w1": { "num": [1.0], "den": [1.0, 1.0] }, "w2": { "num": [0.5], "den": [1.0] } },
          "rho_schedule": [1.0]
        }"#,
    );
    let (code, out, err) = stabhinf(&["check", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 2, "{out}{err}");
    assert!(err.contains("A.2"), "{err}");
}

#[test]
fn malformed_config_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "{ \"plant\": ");
    let (code, _, _) = stabhinf(&["gamma", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 1);
    let cfg = write_config(dir.path(), &EX1.replace("[0.67]", "[0.7, 0.67]"));
    let (code, _, _) = stabhinf(&["gamma", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 1);
}

#[test]
fn gamma_scales_with_weights() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = stabhinf(&["gamma", "--config", example("ex1.json").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    let g: f64 = out.trim().parse().unwrap();
    assert!((g - 0.57).abs() < 0.01);
    let scaled = EX1
        .replace("[1.0, 0.1]", "[2.0, 0.2]")
        .replace(r#""num": [0.5]"#, r#""num": [1.0]"#);
    let cfg = write_config(dir.path(), &scaled);
    let (code, out, _) = stabhinf(&["gamma", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    let g2: f64 = out.trim().parse().unwrap();
    assert!((g2 - 2.0 * g).abs() < 1e-3 * g, "{g2} vs {g}");
}

#[test]
fn forced_finite_route_on_biproper_example_exhausts() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = stabhinf(&[
        "design",
        "--config",
        example("ex1.json").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--mode",
        "fin",
    ]);
    assert_eq!(code, 3, "{err}");
    let r: DesignReport = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert!(r.certificate.is_none());
    assert!(!r.diagnostics.is_empty());
}

#[test]
fn design_is_deterministic_and_writes_tables() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = example("ex1.json");
    for d in [&a, &b] {
        let (code, out, err) = stabhinf(&["design", "--config", cfg.to_str().unwrap(), "--out", d.path().to_str().unwrap(), "--workers", "2"]);
        assert_eq!(code, 0, "{out}{err}");
        assert!(out.contains("route Inf"));
    }
    let load = |d: &Path| -> DesignReport { serde_json::from_str(&std::fs::read_to_string(d.join("report.json")).unwrap()).unwrap() };
    let (ra, rb) = (load(a.path()), load(b.path()));
    assert_eq!(
        serde_json::to_string(&ra.without_timing()).unwrap(),
        serde_json::to_string(&rb.without_timing()).unwrap()
    );
    for f in ["u_response.csv", "nyquist.csv", "feasibility.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let (code, _, _) = stabhinf(&["verify", "--config", cfg.to_str().unwrap(), "--out", a.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    let (code, out, _) = stabhinf(&["response", "--config", cfg.to_str().unwrap(), "--out", a.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 6);
    let csv = std::fs::read_to_string(a.path().join("response_s.csv")).unwrap();
    assert!(csv.starts_with("omega,re,im,magnitude,phase_rad"));
}

fn round_trip(name: &str, route: RouteTaken) {
    let cfg = DesignConfig::load(&example(name)).unwrap();
    let tol = Tolerances::default();
    let d = design(&cfg, tol.clone()).map_err(|(e, _)| e).unwrap();
    assert_eq!(d.report.route, Some(route));
    let text = serde_json::to_string(&d.report).unwrap();
    let back: DesignReport = serde_json::from_str(&text).unwrap();
    // Path samples are not serialized; everything else survives exactly.
    assert_eq!(serde_json::to_string(&back).unwrap(), text);
    let (c, _) = rebuild(&cfg, &back, tol).unwrap();
    let orig = d.controller.as_ref().unwrap();
    for w in hinf_core::logspace(0.05, 50.0, 10) {
        let s = C64::new(0.0, w);
        let (x, y) = (orig.eval(s), c.eval(s));
        assert!((x - y).norm() <= 1e-10 * (1.0 + x.norm()), "{w}: {x} vs {y}");
        let (x, y) = (orig.u.eval(s), c.u.eval(s));
        assert!((x - y).norm() <= 1e-10 * (1.0 + x.norm()));
    }
}

#[test]
fn report_round_trip_infinite_route() {
    round_trip("ex1.json", RouteTaken::Inf);
}

#[test]
fn report_round_trip_finite_route() {
    round_trip("ex2.json", RouteTaken::Fin);
}
