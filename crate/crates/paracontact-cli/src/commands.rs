use std::time::Instant;

use anyhow::{bail, Result};
use paracontact::classify::{h_squared_residual, kappa_mu_checked};
use paracontact::deform::{canonical_kappa_mu, deform2_with, deformed_kappa_mu};
use paracontact::{
    assemble_r4, classify_structure, constant_phi_sectional_check, contact_kappa_mu, d_homothetic,
    d_homothetic_tensors_check, deform1, kappa_mu, CurvatureModel, Flavor, GeometryError,
    ParacontactStructure, StructureKind,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{self, MAX_SWEEP_ROWS};
use crate::report::{Check, Deformation, Inputs, Report, Snapshot, Status, Timing};
use crate::{DeformArgs, ModelArgs, R4Args, R4Format, StructureArgs, SweepArgs, VerifyArgs};

fn inputs(s: &StructureArgs, model: &CurvatureModel, tol: f64) -> Inputs {
    Inputs {
        a: s.a,
        b: s.b,
        c: s.c,
        d: s.d,
        flavor: s.flavor.to_string(),
        model: model.descriptor(),
        dim: model.dim(),
        tolerance: tol,
        ..Inputs::default()
    }
}

fn load_model(m: &ModelArgs) -> Result<CurvatureModel> {
    config::parse_model(&m.model, m.dim)
}

/// Classification over `model`. Contact structures only get their `(kappa, mu)`,
/// which is also reported for `a = 0` when the base has constant curvature.
fn snapshot(s: &ParacontactStructure, model: &CurvatureModel) -> Result<Snapshot> {
    let (classification, km) = match s.flavor() {
        Flavor::Paracontact => {
            let class = classify_structure(s, model)?;
            let km = class
                .kappa_mu
                .or_else(|| model.constant_curvature().map(|c| kappa_mu(s, c)));
            (Some(class), km)
        }
        Flavor::Contact => (None, model.constant_curvature().map(|c| kappa_mu(s, c))),
    };
    Ok(Snapshot {
        structure: s.into(),
        classification,
        kappa_mu: km,
    })
}

fn finish(mut report: Report, start: Instant, timing: bool) -> Report {
    report.settle();
    if timing {
        report.timing = Some(Timing {
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    report
}

pub fn classify(args: &crate::ClassifyArgs, tol: f64, timing: bool) -> Result<Report> {
    let start = Instant::now();
    let model = load_model(&args.model)?;
    let s = config::structure(
        args.s.a,
        args.s.b,
        args.s.c,
        args.s.d,
        args.s.flavor.into(),
        false,
    )?;
    let report = Report {
        schema_version: crate::report::SCHEMA_VERSION,
        command: "classify".into(),
        inputs: inputs(&args.s, &model, tol),
        subject: snapshot(&s, &model)?,
        checks: Vec::new(),
        deformation: None,
        status: Status::Ok,
        timing: None,
    };
    Ok(finish(report, start, timing))
}

/// Appends the outcome of a computation that may be unsupported for `s`.
fn record<T>(
    checks: &mut Vec<Check>,
    name: &str,
    tol: f64,
    result: paracontact::Result<T>,
    residuals: impl FnOnce(T) -> Vec<(&'static str, f64)>,
) {
    match result {
        Ok(v) => {
            for (field, r) in residuals(v) {
                let full = if field.is_empty() {
                    name.to_string()
                } else {
                    format!("{name}.{field}")
                };
                checks.push(Check::measured(full, r, tol));
            }
        }
        Err(GeometryError::Unsupported(msg)) => checks.push(Check::skipped(name, tol, msg)),
        Err(GeometryError::Inconsistent { what, residual }) if residual.is_finite() => {
            let mut c = Check::measured(name, residual, tol);
            c.note = Some(what);
            checks.push(c);
        }
        Err(e) => checks.push(Check::failed(name, tol, e.to_string())),
    }
}

pub fn verify(args: &VerifyArgs, tol: f64, timing: bool) -> Result<Report> {
    let start = Instant::now();
    let model = load_model(&args.model)?;
    let s = config::structure(
        args.s.a,
        args.s.b,
        args.s.c,
        args.s.d,
        args.s.flavor.into(),
        true,
    )?;
    let (samples, seed) = (args.samples.max(1), args.seed);
    let dim = model.dim();
    let mut checks = Vec::new();

    record(
        &mut checks,
        "axioms",
        tol,
        s.verify_axioms(dim, samples, seed),
        |r| {
            vec![
                ("phi_squared", r.phi_squared),
                ("compatibility", r.compatibility),
                ("eta_phi", r.eta_phi),
                ("skew", r.skew),
                ("eta_metric", r.eta_metric),
                ("reeb", r.reeb),
            ]
        },
    );
    record(
        &mut checks,
        "h_properties",
        tol,
        s.verify_h_properties(&model, samples, seed),
        |r| {
            vec![
                ("self_adjoint", r.self_adjoint),
                ("trace", r.trace),
                ("eta_h", r.eta_h),
                ("anticommute", r.anticommute),
                ("h_xi", r.h_xi),
            ]
        },
    );
    record(
        &mut checks,
        "curvature.symmetry",
        tol,
        assemble_r4(&s, &model),
        |c| vec![("", c.symmetry_residual())],
    );
    let mut checked_km = None;
    if model.constant_curvature().is_some() {
        let km = kappa_mu_checked(&s, &model, samples, seed);
        checked_km = km.as_ref().ok().copied();
        let kappa = checked_km.map(|k| k.kappa);
        record(&mut checks, "kappa_mu.identity", tol, km, |k| {
            vec![("", k.identity_residual.unwrap_or(f64::NAN))]
        });
        if let Some(kappa) = kappa {
            record(
                &mut checks,
                "h_squared",
                tol,
                h_squared_residual(&s, &model, kappa),
                |r| vec![("", r)],
            );
        }
    } else {
        for name in ["kappa_mu.identity", "h_squared"] {
            checks.push(Check::skipped(
                name,
                tol,
                "base is not of constant curvature".into(),
            ));
        }
    }
    record(
        &mut checks,
        "d_homothetic",
        tol,
        d_homothetic_tensors_check(&s, &model, args.dhom, samples, seed),
        |r| {
            vec![
                ("metric", r.metric),
                ("eta", r.eta),
                ("xi", r.xi),
                ("phi", r.phi),
                ("h", r.h),
            ]
        },
    );

    let subject = match snapshot(&s, &model) {
        Ok(mut snap) => {
            snap.kappa_mu = checked_km.or(snap.kappa_mu);
            snap
        }
        Err(e) => {
            checks.push(Check::failed("classification", tol, e.to_string()));
            Snapshot {
                structure: (&s).into(),
                classification: None,
                kappa_mu: None,
            }
        }
    };
    let mut inp = inputs(&args.s, &model, tol);
    inp.samples = Some(samples);
    inp.seed = Some(seed);
    inp.dhom = Some(args.dhom);
    let report = Report {
        schema_version: crate::report::SCHEMA_VERSION,
        command: "verify".into(),
        inputs: inp,
        subject,
        checks,
        deformation: None,
        status: Status::Ok,
        timing: None,
    };
    Ok(finish(report, start, timing))
}

fn kappa_mu_check(name: &str, got: (f64, f64), expected: (f64, f64), tol: f64) -> Check {
    let scale = expected.0.abs().max(expected.1.abs()).max(1.0);
    let r = (got.0 - expected.0).abs().max((got.1 - expected.1).abs()) / scale;
    Check::measured(name, r, tol)
}

pub fn deform(args: &DeformArgs, tol: f64, timing: bool) -> Result<Report> {
    let start = Instant::now();
    let model = CurvatureModel::constant(args.dim, args.cbar)?;
    let flavor: Flavor = args.s.flavor.into();
    let s = config::structure(args.s.a, args.s.b, args.s.c, args.s.d, flavor, false)?;
    let (samples, seed) = (args.samples.max(1), args.seed);
    let cbar = args.cbar;
    let mut checks = Vec::new();

    let (kind, after, expected) = match (args.dhom, args.canonical) {
        (Some(t), None) => {
            let st = d_homothetic(&s, t)?;
            record(
                &mut checks,
                "d_homothetic",
                tol,
                d_homothetic_tensors_check(&s, &model, t, samples, seed),
                |r| {
                    vec![
                        ("metric", r.metric),
                        ("eta", r.eta),
                        ("xi", r.xi),
                        ("phi", r.phi),
                        ("h", r.h),
                    ]
                },
            );
            let expected = (flavor == Flavor::Paracontact).then(|| {
                let k = kappa_mu(&s, cbar);
                deformed_kappa_mu(k.kappa, k.mu, t)
            });
            (format!("d_homothetic(t = {t})"), st, expected)
        }
        (None, Some(which)) => {
            if flavor != Flavor::Contact {
                bail!(
                    "canonical deformations start from a contact structure (use --flavor contact)"
                );
            }
            let (kappa, mu) = contact_kappa_mu(&s, cbar)?;
            let (first, second) = canonical_kappa_mu(kappa, mu);
            match which {
                1 => ("canonical 1".to_string(), deform1(&s, cbar)?, Some(first)),
                2 => (
                    "canonical 2".to_string(),
                    deform2_with(&s, cbar, args.sign.into())?,
                    Some(second),
                ),
                n => bail!("--canonical must be 1 or 2, got {n}"),
            }
        }
        _ => bail!("give exactly one of --dhom or --canonical"),
    };
    if let Some(exp) = expected {
        let got = kappa_mu(&after, cbar);
        checks.push(kappa_mu_check("kappa_mu", (got.kappa, got.mu), exp, tol));
    }

    let mut inp = inputs(&args.s, &model, tol);
    inp.samples = Some(samples);
    inp.seed = Some(seed);
    inp.cbar = Some(cbar);
    inp.dhom = args.dhom;
    inp.canonical = args.canonical;
    let report = Report {
        schema_version: crate::report::SCHEMA_VERSION,
        command: "deform".into(),
        inputs: inp,
        subject: snapshot(&s, &model)?,
        checks,
        deformation: Some(Deformation {
            kind,
            after: snapshot(&after, &model)?,
            expected_kappa_mu: expected.map(|(k, m)| [k, m]),
        }),
        status: Status::Ok,
        timing: None,
    };
    Ok(finish(report, start, timing))
}

#[derive(Debug, Serialize)]
struct SweepRow {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    alpha: f64,
    phi: f64,
    cbar: f64,
    kind: StructureKind,
    kappa: Option<f64>,
    mu: Option<f64>,
    costphi_lhs: f64,
}

const SWEEP_HEADER: [&str; 11] = [
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
    "costphi_lhs",
];

fn sweep_row(s: &ParacontactStructure, cbar: f64, dim: usize) -> Result<SweepRow> {
    let model = CurvatureModel::constant(dim, cbar)?;
    let class = classify_structure(s, &model)?;
    let p = *s.params();
    Ok(SweepRow {
        a: p.a,
        b: p.b,
        c: p.c,
        d: p.d,
        alpha: s.alpha(),
        phi: p.phi(),
        cbar,
        kind: class.kind,
        kappa: class.kappa_mu.map(|k| k.kappa),
        mu: class.kappa_mu.map(|k| k.mu),
        costphi_lhs: constant_phi_sectional_check(s, cbar).costphi_lhs,
    })
}

/// Sweep rows as CSV, in grid order.
pub fn sweep(args: &SweepArgs) -> Result<Vec<u8>> {
    let a = config::parse_grid(&args.a, "--a")?;
    let b = config::parse_grid(&args.b, "--b")?;
    let c = config::parse_grid(&args.c, "--c")?;
    let cbar = config::parse_grid(&args.cbar, "--cbar")?;
    let total = [a.len(), b.len(), c.len(), cbar.len()]
        .into_iter()
        .try_fold(1usize, |acc, n| acc.checked_mul(n))
        .filter(|&n| n <= MAX_SWEEP_ROWS);
    let Some(total) = total else {
        bail!("grid exceeds {MAX_SWEEP_ROWS} rows");
    };
    CurvatureModel::constant(args.dim, 0.0)?;

    let mut tuples = Vec::with_capacity(total);
    for &a in &a {
        for &b in &b {
            for &c in &c {
                for &k in &cbar {
                    tuples.push((a, b, c, k));
                }
            }
        }
    }
    let rows: Vec<Option<SweepRow>> = tuples
        .par_iter()
        .map(
            |&(a, b, c, k)| match paracontact::build_structure(a, b, c, Flavor::Paracontact) {
                Ok(s) => sweep_row(&s, k, args.dim).map(Some),
                Err(_) => Ok(None),
            },
        )
        .collect::<Result<_>>()?;
    let rows: Vec<SweepRow> = rows.into_iter().flatten().collect();
    if rows.is_empty() {
        eprintln!(
            "warning: no admissible tuples in the grid (alpha >= 0 or a+c+d <= 0 everywhere)"
        );
    }

    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(SWEEP_HEADER)?;
    for row in &rows {
        w.serialize(row)?;
    }
    Ok(w.into_inner()?)
}

#[derive(Serialize)]
struct R4Entry {
    i: usize,
    j: usize,
    k: usize,
    l: usize,
    value: f64,
}

pub fn r4(args: &R4Args) -> Result<Vec<u8>> {
    let model = load_model(&args.model)?;
    let s = config::structure(
        args.s.a,
        args.s.b,
        args.s.c,
        args.s.d,
        args.s.flavor.into(),
        false,
    )?;
    let curv = assemble_r4(&s, &model)?;
    match args.format {
        R4Format::Json => {
            let mut out = serde_json::to_vec_pretty(&curv.to_document(&s, &model))?;
            out.push(b'\n');
            Ok(out)
        }
        R4Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let n = curv.dim();
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            w.serialize(R4Entry {
                                i,
                                j,
                                k,
                                l,
                                value: curv.get(i, j, k, l),
                            })?;
                        }
                    }
                }
            }
            Ok(w.into_inner()?)
        }
    }
}
