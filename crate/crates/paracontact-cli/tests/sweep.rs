use std::process::{Command, Output};

use serde::Deserialize;

#[derive(Debug, Deserialize)]
struct Row {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    alpha: f64,
    phi: f64,
    cbar: f64,
    kind: String,
    kappa: Option<f64>,
    mu: Option<f64>,
    costphi_lhs: f64,
}

fn sweep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paracontact"))
        .arg("sweep")
        .args(args)
        .output()
        .expect("binary runs")
}

fn rows(out: &Output) -> Vec<Row> {
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(
        rdr.headers().unwrap(),
        vec![
            "a",
            "b",
            "c",
            "d",
            "alpha",
            "phi",
            "cbar",
            "kind",
            "kappa",
            "mu",
            "costphi_lhs"
        ]
    );
    rdr.deserialize().map(|r| r.unwrap()).collect()
}

const GRID: [&str; 8] = [
    "--a",
    "1,1.5,2,2.5,3",
    "--b",
    "0,0.5,-0.5,1,2",
    "--c",
    "-4,-4.5,-5,-5.5,-6",
    "--cbar",
    "-1,-2,-3,0",
];

#[test]
fn parasasakian_rows_follow_the_parameter_condition() {
    let rows = rows(&sweep(&GRID));
    assert_eq!(rows.len(), 500);
    let mut hits = 0;
    for r in &rows {
        assert!(r.alpha < 0.0);
        assert_eq!(r.alpha, r.a * (r.a + r.c) - r.b * r.b);
        assert_eq!(r.phi, r.a * (r.a + r.c + r.d) - r.b * r.b);
        let expected = r.b == 0.0 && r.cbar == (r.a + r.c) / r.a;
        assert_eq!(r.kind == "ParaSasakian", expected, "{r:?}");
        hits += usize::from(expected);
    }
    assert!(
        hits >= 5,
        "grid hits the paraSasakian family only {hits} times"
    );
}

#[test]
fn rows_are_in_grid_order_and_reproducible() {
    let first = sweep(&GRID);
    let second = sweep(&GRID);
    assert_eq!(first.stdout, second.stdout);
    let rows = rows(&first);
    let key = |r: &Row| {
        let pos = |v: f64, grid: &[f64]| grid.iter().position(|&g| g == v).unwrap();
        (
            pos(r.a, &[1.0, 1.5, 2.0, 2.5, 3.0]),
            pos(r.b, &[0.0, 0.5, -0.5, 1.0, 2.0]),
            pos(r.c, &[-4.0, -4.5, -5.0, -5.5, -6.0]),
            pos(r.cbar, &[-1.0, -2.0, -3.0, 0.0]),
        )
    };
    assert!(rows.windows(2).all(|w| key(&w[0]) < key(&w[1])));
}

#[test]
fn costphi_vanishes_exactly_on_the_constant_phi_sectional_rows() {
    // (1, 1.5, 1) over a flat base lies on the family b^2 = (a+c)(a+1/8)
    let rows = rows(&sweep(&[
        "--a",
        "1,2",
        "--b",
        "1.5,1,0.5",
        "--c",
        "1,-0.5",
        "--cbar",
        "0,0.5,-1",
    ]));
    let mut on_family = 0;
    for r in &rows {
        let (kappa, mu) = (r.kappa.unwrap(), r.mu.unwrap());
        if (kappa + 1.0).abs() < 1e-9 {
            continue;
        }
        let via_mu = (mu - (1.0 - kappa)).abs() <= 1e-9 * mu.abs().max(1.0);
        assert_eq!(r.costphi_lhs.abs() < 1e-9, via_mu, "{r:?}");
        on_family += usize::from(via_mu);
    }
    assert!(on_family >= 1);
    assert!(rows
        .iter()
        .any(|r| (r.a, r.b, r.c, r.cbar) == (1.0, 1.5, 1.0, 0.0) && r.costphi_lhs.abs() < 1e-9));
}

#[test]
fn empty_region_gives_header_and_warning() {
    let out = sweep(&["--a", "1,2", "--b", "0", "--c", "lin:1:2:3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    assert!(rows(&out).is_empty());
}

#[test]
fn oversize_grid_is_rejected() {
    let out = sweep(&[
        "--a",
        "lin:1:2:101",
        "--b",
        "lin:0:1:101",
        "--c",
        "lin:-3:-2:101",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds"));
    assert!(out.stdout.is_empty());
}

#[test]
fn a_zero_rows_leave_kappa_mu_empty() {
    let rows = rows(&sweep(&["--a", "0", "--b", "1", "--c", "5"]));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].kind, "Other");
    assert!(rows[0].kappa.is_none() && rows[0].mu.is_none());
}

#[test]
fn floats_round_trip() {
    let rows = rows(&sweep(&[
        "--a", "0.1", "--b", "0.3", "--c", "-0.7", "--cbar", "0.2",
    ]));
    let r = &rows[0];
    assert_eq!((r.a, r.b, r.c, r.cbar), (0.1, 0.3, -0.7, 0.2));
    assert_eq!(r.d, -4.0 * r.alpha - (r.a + r.c));
}
