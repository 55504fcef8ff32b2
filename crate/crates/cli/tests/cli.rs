use std::process::{Command, Output};

use serde_json::Value;

fn focklab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_focklab"))
        .args(args)
        .env_remove("FOCKLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn error_code(out: &Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).expect("JSON on stderr");
    v["error"]["code"].as_str().unwrap().to_string()
}

#[test]
fn norm_of_one() {
    let out = focklab(&["norm", "--symbol", "1", "--p", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "norm");
    assert!((v["results"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!(v["results"]["error_estimate"].as_f64().unwrap() < 1e-10);
    assert!(v["diagnostics"]["truncation_radius"].as_f64().unwrap() > 0.0);
}

#[test]
fn classify_half_dilation() {
    let out = focklab(&["classify", "--psi", "1", "--phi", "0.5,0", "--p", "2", "--q", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let r = &v["results"];
    assert_eq!(r["verdict"], "Compact");
    assert!((r["norm_lower"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((r["norm_upper"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert!(!v["citations"].as_array().unwrap().is_empty());
}

#[test]
fn infinite_values_are_flagged() {
    let v = json(&focklab(&[
        "classify", "--psi", "1", "--phi", "1,1", "--p", "2", "--q", "2",
    ]));
    assert_eq!(v["results"]["verdict"], "Unbounded");
    assert_eq!(v["results"]["norm_upper"]["value"], "inf");
    assert_eq!(v["results"]["norm_upper"]["infinite"], true);
}

#[test]
fn reports_are_byte_identical() {
    let args = ["classify", "--psi", "z+1", "--phi", "0.5,0.25", "--p", "3", "--q", "2"];
    let a = focklab(&args);
    let b = focklab(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert!(v["results"]["ls_norm"].as_f64().unwrap() > 0.0);
}

#[test]
fn exit_codes() {
    let out = focklab(&["norm", "--symbol", "z^", "--p", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_code(&out), "symbol.parse");

    assert_eq!(focklab(&["norm", "--p", "2"]).status.code(), Some(1));
    assert_eq!(focklab(&["frobnicate"]).status.code(), Some(1));

    let out = focklab(&["isolated", "--phi", "1,0", "--p", "3", "--q", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_code(&out), "topology.hypothesis_violated");

    let out = focklab(&["essnorm", "--psi", "1", "--phi", "1,0", "--p", "1", "--q", "2"]);
    assert_eq!(out.status.code(), Some(2));

    let out = focklab(&["norm", "--symbol", "exp(30*z)", "--p", "4", "--max-radius", "5"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_code(&out), "quadrature.tail_not_dominated");

    let out = focklab(&["norm", "--symbol", "1", "--p", "2", "--rel-tol=-1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_code(&out), "quadrature.invalid_spec");

    let out = focklab(&[
        "classify", "--psi", "1", "--phi", "0.5,0", "--p", "2", "--q", "2", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn topology_commands() {
    let v = json(&focklab(&[
        "isolated",
        "--phi",
        "(0.9210609940028851+0.3894183423086505i),0",
        "--p",
        "2",
        "--q",
        "2",
    ]));
    assert_eq!(v["results"]["isolated"], true);

    let v = json(&focklab(&[
        "component",
        "--psi",
        "exp(-1*z)",
        "--phi",
        "1,1",
        "--p",
        "2",
        "--q",
        "2",
    ]));
    assert_eq!(v["results"]["kind"], "UnitModulusLeaf");
    assert_eq!(v["results"]["leaf_key"]["b"][0], 1.0);

    let v = json(&focklab(&[
        "diff", "--psi1", "1", "--phi1", "1,0", "--psi2", "1", "--phi2", "-1,0", "--p", "2", "--q", "2",
    ]));
    assert_eq!(v["results"]["compact"], false);
    assert_eq!(v["results"]["reason"], "NotCompact");
}

#[test]
fn tabular_outputs() {
    let out = focklab(&[
        "path", "--kind", "weight", "--psi1", "1", "--psi2", "2", "--phi", "0.5,0", "--p", "2", "--q", "2", "--steps",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,distance");
    assert_eq!(lines.len(), 5);
    for line in &lines[1..] {
        let d: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((d - 0.25).abs() < 1e-10);
    }

    let v = json(&focklab(&[
        "path",
        "--kind",
        "translate",
        "--b1",
        "0",
        "--b2",
        "1",
        "--p",
        "2",
        "--q",
        "2",
        "--steps",
        "1",
        "--format",
        "json",
    ]));
    let pt = &v["results"]["points"][0];
    assert!(pt["distance"].as_f64().unwrap() <= pt["bound"].as_f64().unwrap());

    let out = focklab(&[
        "path", "--kind", "dilate", "--psi", "1", "--phi", "1,0", "--p", "2", "--q", "2",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = focklab(&["profile-m", "--psi", "exp(-1*z)", "--phi", "1,1", "--radii", "1,4,16"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("radius,annulus_sup\n"));
    assert_eq!(text.lines().count(), 4);

    let v = json(&focklab(&[
        "profile-m",
        "--psi",
        "1",
        "--phi",
        "0.5,0",
        "--radii",
        "1,2",
        "--format",
        "json",
    ]));
    assert_eq!(v["results"]["annuli"].as_array().unwrap().len(), 2);
}

#[test]
fn opnorm_fields() {
    let v = json(&focklab(&[
        "opnorm",
        "--psi",
        "1",
        "--phi",
        "0.5,0",
        "--p",
        "2",
        "--q",
        "2",
        "--matrix-order",
        "32",
    ]));
    let r = &v["results"];
    let sigma = r["matrix_sigma"].as_f64().unwrap();
    assert!((sigma - 1.0).abs() < 1e-10);
    assert!(r["empirical_lower"].as_f64().unwrap() <= r["theory_upper"].as_f64().unwrap());
    assert_eq!(v["diagnostics"]["matrix_order"], 32);
}

#[test]
fn verify_subset() {
    let out = focklab(&["verify", "--seed", "7", "--criteria", "1,2,10,11"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["results"]["passed"], 4);
    assert_eq!(v["results"]["failed"], 0);
    assert_eq!(focklab(&["verify", "--criteria", "13"]).status.code(), Some(1));
}

#[test]
fn thread_cap() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_focklab"))
            .args(["norm", "--symbol", "z^2*exp(0.5*z) + 3*z", "--p", "1.5"])
            .env("FOCKLAB_THREADS", threads)
            .output()
            .unwrap()
    };
    let two = run("2");
    assert_eq!(two.status.code(), Some(0));
    assert_eq!(two.stdout, run("1").stdout);
    assert_eq!(run("zero").status.code(), Some(1));
}

#[test]
fn text_format() {
    let out = focklab(&["isolated", "--phi", "0.5,1", "--p", "1", "--q", "2", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("isolated: false"));
}

#[test]
fn reports_follow_schema() {
    let schema: Value = serde_json::from_str(include_str!("../../../schema/report.schema.json")).unwrap();
    let defs = &schema["$defs"];
    let keys = |v: &Value| {
        let mut k: Vec<String> = v.as_object().unwrap().keys().cloned().collect();
        k.sort();
        k
    };
    let required = |name: &str| {
        let mut k: Vec<String> = defs[name]["required"]
            .as_array()
            .unwrap()
            .iter()
            .map(|s| s.as_str().unwrap().to_string())
            .collect();
        k.sort();
        k
    };
    let ok = json(&focklab(&["norm", "--symbol", "z", "--p", "2"]));
    assert_eq!(keys(&ok), required("report"));
    assert_eq!(
        ok["schema_version"],
        defs["report"]["properties"]["schema_version"]["const"]
    );
    assert!(defs["report"]["properties"]["command"]["enum"]
        .as_array()
        .unwrap()
        .contains(&ok["command"]));
    let bad = focklab(&["norm", "--symbol", "z+", "--p", "2"]);
    let err: Value = serde_json::from_slice(&bad.stderr).unwrap();
    assert_eq!(keys(&err), required("error"));
}
