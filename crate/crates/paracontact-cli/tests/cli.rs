use std::process::{Command, Output};
use std::time::Instant;

use paracontact::CurvatureModel;
use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_paracontact"));
    cmd.env_remove("PARACONTACT_TOL");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn schema() -> jsonschema::Validator {
    let text = include_str!("../report.schema.json");
    jsonschema::validator_for(&serde_json::from_str(text).unwrap()).unwrap()
}

fn assert_valid(report: &Value) {
    let validator = schema();
    let errors: Vec<String> = validator
        .iter_errors(report)
        .map(|e| e.to_string())
        .collect();
    assert!(errors.is_empty(), "{errors:#?}\n{report:#}");
}

fn kind(report: &Value) -> &str {
    report["subject"]["classification"]["kind"]
        .as_str()
        .unwrap()
}

fn params(v: &Value) -> [f64; 4] {
    let p = &v["structure"]["params"];
    ["a", "b", "c", "d"].map(|k| p[k].as_f64().unwrap())
}

#[test]
fn classify_parasasakian() {
    let out = run(&[
        "classify", "--a", "1", "--b", "0", "--c", "-2", "--model", "const:-1", "--dim", "4",
    ]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_valid(&r);
    assert_eq!(kind(&r), "ParaSasakian");
    assert_eq!(r["status"], "ok");
}

#[test]
fn classify_h_squared_zero() {
    let out = run(&[
        "classify", "--a", "2", "--b", "3", "--c", "2", "--model", "cpx:-4", "--dim", "4",
    ]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_valid(&r);
    assert_eq!(kind(&r), "HSquaredZeroNonzero");
}

#[test]
fn classify_a_zero_is_unsupported() {
    let out = run(&["classify", "--a", "0", "--b", "1", "--c", "5"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_valid(&r);
    assert_eq!(kind(&r), "Other");
    assert_eq!(
        r["subject"]["classification"]["witness"],
        "a=0: connection/curvature unsupported"
    );
}

#[test]
fn bad_input_exits_with_one() {
    // alpha = a(a+c) - b^2 > 0 admits no paracontact structure
    let out = run(&["classify", "--a", "1", "--b", "0", "--c", "1"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));
    assert!(out.stdout.is_empty());

    for args in [
        &[
            "classify", "--a", "1", "--b", "0", "--c", "-2", "--model", "sphere:1",
        ][..],
        &["classify", "--a", "1", "--b", "0", "--c", "-2", "--d", "7"],
        &[
            "classify", "--a", "1", "--b", "0", "--c", "-2", "--model", "cpx:-4", "--dim", "3",
        ],
        &["classify", "--a", "x", "--b", "0", "--c", "-2"],
        &["classify", "--b", "0", "--c", "-2"],
        &["deform", "--a", "1", "--b", "0", "--c", "-2"],
        &[
            "deform",
            "--canonical",
            "1",
            "--a",
            "1",
            "--b",
            "0",
            "--c",
            "-2",
        ],
        &[
            "deform",
            "--canonical",
            "3",
            "--a",
            "1",
            "--b",
            "0",
            "--c",
            "0",
            "--flavor",
            "contact",
        ],
        &["sweep", "--a", "", "--b", "0", "--c", "0"],
    ] {
        let out = run(args);
        assert_eq!(
            code(&out),
            1,
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn explicit_model_triggers_classification_diagnostic() {
    // constant curvature -1 handed over as a raw tensor: h vanishes numerically
    // while the parameter test cannot see a constant curvature
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hyperbolic.json");
    let doc = CurvatureModel::constant(3, -1.0).unwrap().to_document();
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let model = format!("file:{}", path.display());
    let out = run(&[
        "classify", "--a", "1", "--b", "0", "--c", "-2", "--model", &model,
    ]);
    assert_eq!(code(&out), 2);
    let r = json(&out);
    assert_valid(&r);
    assert_eq!(r["status"], "diagnostic");
    assert!(!r["subject"]["classification"]["diagnostics"]
        .as_array()
        .unwrap()
        .is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("diagnostic"));
}

const FLAT: [&str; 13] = [
    "verify",
    "--a",
    "1",
    "--b",
    "0.5",
    "--c",
    "-2",
    "--model",
    "const:0",
    "--dim",
    "4",
    "--samples",
    "200",
];

#[test]
fn verify_flat_base_is_green() {
    let start = Instant::now();
    let out = run(&FLAT);
    assert!(start.elapsed().as_secs_f64() < 5.0);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_valid(&r);
    let checks = r["checks"].as_array().unwrap();
    let names: Vec<&str> = checks.iter().map(|c| c["name"].as_str().unwrap()).collect();
    for prefix in [
        "axioms",
        "h_properties",
        "curvature.symmetry",
        "kappa_mu.identity",
        "h_squared",
        "d_homothetic",
    ] {
        assert!(
            names.iter().any(|n| n.starts_with(prefix)),
            "missing {prefix}"
        );
    }
    assert!(checks.iter().all(|c| c["status"] == "pass"), "{checks:#?}");
    assert!(
        r["subject"]["kappa_mu"]["identity_residual"]
            .as_f64()
            .unwrap()
            < 1e-8
    );
}

#[test]
fn verify_is_deterministic() {
    let first = run(&FLAT);
    let second = run(&FLAT);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);

    let mut other_seed = FLAT.to_vec();
    other_seed.extend(["--seed", "7"]);
    let third = run(&other_seed);
    assert_ne!(first.stdout, third.stdout);
}

#[test]
fn verify_corrupted_d_fails_with_three() {
    let out = run(&["verify", "--a", "1", "--b", "0", "--c", "-2", "--d", "5.5"]);
    assert_eq!(code(&out), 3);
    let r = json(&out);
    assert_valid(&r);
    assert_eq!(r["status"], "invariant_failure");
    let first = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["status"] == "fail")
        .unwrap();
    assert_eq!(first["name"], "axioms.phi_squared");
    assert!(String::from_utf8_lossy(&out.stderr).contains("axioms.phi_squared"));
}

#[test]
fn verify_cpx_and_contact() {
    let out = run(&[
        "verify", "--a", "2", "--b", "3", "--c", "2", "--model", "cpx:-4",
    ]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_valid(&r);
    let skipped: Vec<&Value> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "skipped")
        .collect();
    assert_eq!(skipped.len(), 2);

    let out = run(&[
        "verify",
        "--a",
        "1",
        "--b",
        "0.5",
        "--c",
        "0",
        "--flavor",
        "contact",
        "--model",
        "const:0.5",
    ]);
    assert_eq!(code(&out), 0);
    assert_valid(&json(&out));
}

#[test]
fn tolerance_from_environment() {
    let out = bin()
        .args(FLAT)
        .env("PARACONTACT_TOL", "1e-300")
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
    let r = json(&out);
    assert_eq!(r["inputs"]["tolerance"].as_f64(), Some(1e-300));

    let out = bin()
        .args(FLAT)
        .env("PARACONTACT_TOL", "1e-6")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["inputs"]["tolerance"].as_f64(), Some(1e-6));

    let out = bin()
        .args(FLAT)
        .env("PARACONTACT_TOL", "-1")
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
}

#[test]
fn timing_is_opt_in() {
    assert!(json(&run(&FLAT)).get("timing").is_none());
    let mut args = FLAT.to_vec();
    args.push("--timing");
    let r = json(&run(&args));
    assert_valid(&r);
    assert!(r["timing"]["seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let mut args = FLAT.to_vec();
    let p = path.to_str().unwrap();
    args.extend(["--output", p]);
    let out = run(&args);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let written = std::fs::read(&path).unwrap();
    assert_eq!(written, run(&FLAT).stdout);
}

#[test]
fn deform_d_homothetic() {
    let out = run(&["deform", "--dhom", "2", "--a", "1", "--b", "0", "--c", "-2"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_valid(&r);
    assert_eq!(params(&r["deformation"]["after"]), [2.0, 0.0, -4.0, 18.0]);
    let checks = r["checks"].as_array().unwrap();
    assert!(
        checks
            .iter()
            .filter(|c| c["name"].as_str().unwrap().starts_with("d_homothetic."))
            .count()
            == 5
    );
    assert!(checks.iter().all(|c| c["status"] == "pass"));
}

fn close(x: &Value, y: f64) -> bool {
    (x.as_f64().unwrap() - y).abs() < 1e-12
}

#[test]
fn deform_canonical() {
    let base = [
        "--a", "1", "--b", "0", "--c", "0", "--flavor", "contact", "--cbar", "0",
    ];

    let out = bin()
        .args(["deform", "--canonical", "1"])
        .args(base)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_valid(&r);
    let after = &r["deformation"]["after"];
    assert_eq!(params(after), [-1.0, 0.0, 2.0, 3.0]);
    assert!(close(&after["kappa_mu"]["kappa"], -15.0 / 16.0));
    assert!(close(&after["kappa_mu"]["mu"], 1.5));

    let out = bin()
        .args(["deform", "--canonical", "2"])
        .args(base)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_valid(&r);
    let after = &r["deformation"]["after"];
    assert_eq!(params(after), [0.0, 1.0, 0.0, 4.0]);
    assert!(close(&after["kappa_mu"]["kappa"], -1.0));
    assert!(close(&after["kappa_mu"]["mu"], 2.0));
}

#[test]
fn r4_export_formats_agree() {
    let common = [
        "r4", "--a", "1", "--b", "0.5", "--c", "-2", "--model", "const:-1",
    ];
    let out = bin()
        .args(common)
        .args(["--format", "csv"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(rdr.headers().unwrap(), vec!["i", "j", "k", "l", "value"]);
    let rows: Vec<(usize, usize, usize, usize, f64)> =
        rdr.deserialize().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 5usize.pow(4));

    let out = bin().args(common).output().unwrap();
    let doc = json(&out);
    assert_eq!(doc["base_dim"], 3);
    for (i, j, k, l, v) in rows {
        assert_eq!(doc["r4"][i][j][k][l].as_f64().unwrap(), v);
    }
}
