use std::path::PathBuf;
use std::process::{Command, Output};

use pinchlab::cli::Report;
use pinchlab::exactalg::parse_alg;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pinchlab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Report {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is a report")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pinchlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn record<'a>(r: &'a Report, subset: &[usize]) -> &'a pinchlab::cli::SubsetRecord {
    r.records.iter().find(|x| x.subset == subset).expect("record present")
}

#[test]
fn pinches_lists_subsets() {
    let out = run(&["pinches", "two_loop_propagator.json", "--max-size", "2"]);
    let r = report(&out);
    assert_eq!(r.command, "pinches");
    assert_eq!(r.diagram.as_deref(), Some("two_loop_propagator"));
    assert_eq!(r.records.len(), 10);
    let rec = record(&r, &[0, 1]);
    assert_eq!(rec.classification.as_deref(), Some("Finite"));
    // alpha = -(s + m2sq - m1sq)/(2 s) along p
    let alpha = rec.pinch.as_ref().unwrap()["alpha"][0][0].as_str().unwrap();
    let want = parse_alg("-(s + m2sq - m1sq)/(2*s)").unwrap();
    assert_eq!(parse_alg(alpha).unwrap(), want);
    assert!(r.records.iter().all(|x| x.classification.is_some()));
}

#[test]
fn input_errors_exit_2() {
    let out = run(&["pinches", "no_such_file.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
    let out = run(&["pinches", "two_loop_propagator.json", "--max-size", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let out = run(&["asympt", "bubble.json", "--subset", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn asympt_exponents() {
    let r = report(&run(&["asympt", "two_loop_propagator.json", "--subset", "0,1"]));
    let a = r.records[0].asymptotics.as_ref().unwrap();
    assert_eq!(a["exponent"], "-1+(d-1)/2");
    assert_eq!(a["prefactor_power"], 1);
    let r = report(&run(&["asympt", "one_loop_vertex_k.json", "--subset", "0,1,2", "--dimension", "5"]));
    let rec = &r.records[0];
    assert_eq!(rec.asymptotics.as_ref().unwrap()["exponent"], "1/2");
    // the compact |I| exponent is surfaced, not silently used
    assert!(rec.warnings.iter().any(|w| w.contains("compact exponent")));
}

#[test]
fn non_finite_subset_exits_3() {
    let spec = scratch("degenerate.json");
    std::fs::write(
        &spec,
        r#"{"name":"degenerate","loops":1,"dimension":"d","externals":["p1","p2"],
        "gram":{"p1.p1":"s","p1.p2":"2*s","p2.p2":"4*s"},
        "masses_sq":{"m0sq":"m0sq","m1sq":"m1sq","m2sq":"m2sq"},
        "propagators":[{"routing":[1],"shift":{},"mass_sq":"m0sq"},
        {"routing":[1],"shift":{"p1":"1"},"mass_sq":"m1sq"},
        {"routing":[1],"shift":{"p2":"1"},"mass_sq":"m2sq"}]}"#,
    )
    .unwrap();
    let out = run(&["asympt", spec.to_str().unwrap(), "--subset", "0,1,2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("AtInfinity"));
}

#[test]
fn verify_bubble_and_csv() {
    let csv = scratch("bubble5.csv");
    let r = report(&run(&["verify", "bubble.json", "--subset", "0,1", "--d", "5", "--out", csv.to_str().unwrap()]));
    let o = r.oracle.as_ref().unwrap();
    assert_eq!(o["kind"], "bubble");
    assert_eq!(o["accepted"], true);
    let slope = o["scan"]["slope_fit"]["slope"].as_f64().unwrap();
    assert!((slope - 1.0).abs() < 0.05, "{}", slope);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "eps,re,im,abs");
    assert_eq!(lines.len(), 8);

    let r = report(&run(&["verify", "bubble.json", "--subset", "0,1", "--d", "3"]));
    let o = r.oracle.as_ref().unwrap();
    assert_eq!(o["scan"]["logarithmic_candidate"], true);
    assert!(o["scan"]["log_fit"]["b"].as_f64().unwrap().abs() > 0.1);
    assert!(r.records[0].warnings.iter().any(|w| w.contains("logarithmic")));

    let out = run(&["verify", "bubble.json", "--subset", "0,1", "--d", "4"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(out.stdout.is_empty());
}

#[test]
fn verify_qed_is_reproducible() {
    let (a, b, c) = (scratch("qa.csv"), scratch("qb.csv"), scratch("qc.csv"));
    let args = |p: &PathBuf, seed: &str| {
        run(&[
            "verify",
            "qed_crossed_vertex.json",
            "--subset",
            "0,1,2,3,4",
            "--samples",
            "100000",
            "--seed",
            seed,
            "--out",
            p.to_str().unwrap(),
        ])
    };
    let r = report(&args(&a, "1"));
    report(&args(&b, "1"));
    report(&args(&c, "2"));
    let (ba, bb, bc) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), std::fs::read(&c).unwrap());
    assert_eq!(ba, bb);
    assert_ne!(ba, bc);
    assert_eq!(r.oracle.as_ref().unwrap()["kind"], "qed");
    assert_eq!(r.oracle.as_ref().unwrap()["check"]["config"]["seed"], 1);
}

#[test]
fn config_file_mirrors_flags() {
    let cfg = scratch("run.toml");
    std::fs::write(&cfg, "subset = \"0,1\"\nd = 3\n[kinematics]\nm0sq = 1.0\nm1sq = 4.0\n").unwrap();
    let r = report(&run(&["--config", cfg.to_str().unwrap(), "verify", "bubble.json"]));
    assert_eq!(r.config["d"], 3);
    assert_eq!(r.oracle.as_ref().unwrap()["scan"]["threshold"], -9.0);
    assert!(!r.records[0].warnings.iter().any(|w| w.contains("set to 1")));
    // a flag overrides the file
    let r = report(&run(&["--config", cfg.to_str().unwrap(), "verify", "bubble.json", "--d", "5"]));
    assert_eq!(r.config["d"], 5);
    std::fs::write(&cfg, "no_such_key = 1\n").unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "oracle"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fixture_directory_override() {
    let dir = scratch("fx");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::copy(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/bubble.json"), dir.join("renamed.json")).unwrap();
    let out = bin().env("PINCHLAB_FIXTURES", &dir).args(["pinches", "renamed.json"]).output().unwrap();
    let r = report(&out);
    assert_eq!(r.diagram.as_deref(), Some("bubble"));
}

#[test]
fn oracle_self_tests() {
    let r = report(&run(&["oracle", "--pairs", "50"]));
    let o = r.oracle.unwrap();
    assert_eq!(o["residue"]["passed"], true);
    let morse = o["morse"].as_array().unwrap();
    assert_eq!(morse.len(), 12);
    assert!(morse.iter().all(|m| m["slope_ok"] == true));
}

fn expression_strings(v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match (k.as_str(), x) {
                    ("alpha", _) | ("conditions", _) | ("poly", _) => collect_strings(x, out),
                    _ => expression_strings(x, out),
                }
            }
        }
        Value::Array(a) => a.iter().for_each(|x| expression_strings(x, out)),
        _ => {}
    }
}

fn collect_strings(v: &Value, out: &mut Vec<String>) {
    match v {
        Value::String(s) => out.push(s.clone()),
        Value::Array(a) => a.iter().for_each(|x| collect_strings(x, out)),
        _ => {}
    }
}

#[test]
fn report_round_trip() {
    for args in [
        vec!["pinches", "qed_crossed_vertex.json", "--max-size", "3"],
        vec!["landau", "two_loop_propagator.json", "--subset", "0,1"],
        vec!["asympt", "qed_crossed_vertex.json", "--subset", "0,1,2,3,4"],
    ] {
        let out = run(&args);
        let r = report(&out);
        let again: Report = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(r, again);
        let mut exprs = Vec::new();
        for rec in &r.records {
            for v in [&rec.pinch, &rec.landau].into_iter().flatten() {
                expression_strings(v, &mut exprs);
            }
        }
        assert!(!exprs.is_empty());
        for e in exprs {
            let x = parse_alg(&e).unwrap_or_else(|err| panic!("{}: {}", e, err));
            assert_eq!(x.to_string(), e);
        }
    }
}
