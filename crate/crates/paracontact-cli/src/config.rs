//! Parsing of model descriptors, parameter grids and structure arguments.

use std::fs;

use anyhow::{anyhow, bail, Context, Result};
use paracontact::{build_structure, CurvatureModel, Flavor, MetricParams, ParacontactStructure};

/// Largest number of rows a sweep may produce.
pub const MAX_SWEEP_ROWS: usize = 1_000_000;

/// Parses `const:<cbar>`, `cpx:<chol>` or `file:<path>`.
///
/// `dim` is required for the first two and, when given, must match the file.
pub fn parse_model(desc: &str, dim: Option<usize>) -> Result<CurvatureModel> {
    let (kind, arg) = desc
        .split_once(':')
        .ok_or_else(|| anyhow!("model descriptor `{desc}` is not of the form kind:value"))?;
    let model = match kind {
        "const" => CurvatureModel::constant(dim.unwrap_or(3), parse_f64(arg, "const")?)?,
        "cpx" => CurvatureModel::complex_space_form(dim.unwrap_or(4), parse_f64(arg, "cpx")?)?,
        "file" => {
            let text = fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?;
            let model = CurvatureModel::from_json(&text)?;
            if let Some(n) = dim.filter(|&n| n != model.dim()) {
                bail!(
                    "--dim {n} does not match the dimension {} of {arg}",
                    model.dim()
                );
            }
            model
        }
        other => bail!("unknown model kind `{other}` (expected const, cpx or file)"),
    };
    Ok(model)
}

fn parse_f64(text: &str, what: &str) -> Result<f64> {
    let v: f64 = text
        .trim()
        .parse()
        .with_context(|| format!("{what}: `{text}` is not a number"))?;
    if !v.is_finite() {
        bail!("{what}: value must be finite, got {v}");
    }
    Ok(v)
}

/// Parses a grid: `v1,v2,...` or `lin:start:stop:count`.
pub fn parse_grid(spec: &str, what: &str) -> Result<Vec<f64>> {
    let values = if let Some(rest) = spec.strip_prefix("lin:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let [start, stop, count] = parts[..] else {
            bail!("{what}: expected lin:start:stop:count, got `{spec}`");
        };
        let (start, stop) = (parse_f64(start, what)?, parse_f64(stop, what)?);
        let count: usize = count
            .parse()
            .with_context(|| format!("{what}: bad count `{count}`"))?;
        match count {
            0 => Vec::new(),
            1 => vec![start],
            n => (0..n)
                .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    } else {
        spec.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| parse_f64(s, what))
            .collect::<Result<Vec<_>>>()?
    };
    if values.is_empty() {
        bail!("{what}: grid is empty");
    }
    Ok(values)
}

/// Structure from `(a, b, c)`, with an optional explicit `d`.
///
/// When `unchecked` is set an explicit `d` is accepted as is, with `rho`
/// recomputed from it; otherwise it must agree with the compatibility condition.
pub fn structure(
    a: f64,
    b: f64,
    c: f64,
    d: Option<f64>,
    flavor: Flavor,
    unchecked: bool,
) -> Result<ParacontactStructure> {
    for (name, v) in [("a", a), ("b", b), ("c", c), ("d", d.unwrap_or(0.0))] {
        if !v.is_finite() {
            bail!("{name} must be finite, got {v}");
        }
    }
    let Some(d) = d else {
        return Ok(build_structure(a, b, c, flavor)?);
    };
    let params = MetricParams::new(a, b, c, d);
    if unchecked {
        let trace = params.trace();
        if trace.is_nan() || trace <= 0.0 {
            bail!("a+c+d must be positive, got {trace}");
        }
        return Ok(ParacontactStructure::from_parts_unchecked(
            params,
            1.0 / trace.sqrt(),
            flavor,
        ));
    }
    Ok(ParacontactStructure::from_params(params, flavor)?)
}

/// Tolerance from `--tol` or `PARACONTACT_TOL`.
pub fn check_tolerance(tol: f64) -> Result<f64> {
    if !(tol.is_finite() && tol > 0.0) {
        bail!("tolerance must be positive and finite, got {tol}");
    }
    Ok(tol)
}
