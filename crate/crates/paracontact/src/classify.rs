//! Classification of g-natural paracontact structures: paraSasakian,
//! `h^2 = 0 != h`, `(kappa, mu)`-spaces and constant phi-sectional curvature.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curvature_models::CurvatureModel;
use crate::curvature_t1m::assemble_r4;
use crate::error::{GeometryError, Result};
use crate::frames::{e, Frame, T1MVector};
use crate::gnatural::MetricParams;
use crate::paracontact::{build_structure, Flavor, ParacontactStructure};
use crate::{approx_eq, REL_TOL};

/// Threshold below which an operator norm counts as zero.
pub const ZERO_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KappaMuSource {
    /// Closed form in `(a, b, c, d, cbar)`.
    FormulaEqValues,
    /// Least-squares fit of `R(V, xi)xi = kappa(V - eta(V)xi) + mu hV`.
    CurvatureFit,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KappaMuReport {
    pub kappa: f64,
    pub mu: f64,
    /// Largest relative violation of
    /// `R(V,W)xi = kappa(eta(W)V - eta(V)W) + mu(eta(W)hV - eta(V)hW)`;
    /// `None` when not evaluated.
    pub identity_residual: Option<f64>,
    pub source: KappaMuSource,
    /// Set when `h = 0`, so that `mu` does not enter the identity.
    pub mu_unconstrained: bool,
}

fn parasasakian_params(p: &MetricParams, cbar: f64) -> bool {
    p.a != 0.0 && p.b.abs() < ZERO_TOL && approx_eq(cbar, (p.a + p.c) / p.a)
}

/// `(kappa, mu)` over a base of constant curvature `cbar`:
/// `kappa = (a^2 cbar^2 - 2(alpha - b^2)cbar - d(2(a+c) + d))/(16 alpha^2)`,
/// `mu = (a cbar - d)/(2 alpha)`.
///
/// Contact structures use the contact values, which differ by overall sign
/// in both numerators.
pub fn kappa_mu(s: &ParacontactStructure, cbar: f64) -> KappaMuReport {
    let p = *s.params();
    let MetricParams { a, b, c, d } = p;
    let al = s.alpha();
    let sign = match s.flavor() {
        Flavor::Paracontact => 1.0,
        Flavor::Contact => -1.0,
    };
    let kappa = sign * (a * a * cbar * cbar - 2.0 * (al - b * b) * cbar - d * (2.0 * (a + c) + d))
        / (16.0 * al * al);
    let mu = sign * (a * cbar - d) / (2.0 * al);
    KappaMuReport {
        kappa,
        mu,
        identity_residual: None,
        source: KappaMuSource::FormulaEqValues,
        mu_unconstrained: s.flavor() == Flavor::Paracontact && parasasakian_params(&p, cbar),
    }
}

/// Largest relative residual of the `(kappa, mu)` identity over sampled `V, W`.
pub fn kappa_mu_identity_residual(
    s: &ParacontactStructure,
    model: &CurvatureModel,
    kappa: f64,
    mu: f64,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let curv = assemble_r4(s, model)?;
    let dim = model.dim();
    let frame = Frame::new(dim)?;
    let xi = s.xi(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut check = |v: &T1MVector, w: &T1MVector| -> Result<()> {
        let lhs = curv.apply(v, w, &xi);
        let (ev, ew) = (s.eta(v), s.eta(w));
        let hv = s.h_apply(model, v)?;
        let hw = s.h_apply(model, w)?;
        let rhs = kappa * &(&(ew * v) - &(ev * w)) + mu * &(&(ew * &hv) - &(ev * &hw));
        worst = worst.max((&lhs - &rhs).norm() / lhs.norm().max(1.0));
        Ok(())
    };
    let basis = frame.basis();
    for v in &basis {
        check(v, &xi)?;
    }
    for _ in 0..samples {
        let v = frame.random_vector(&mut rng);
        let w = frame.random_vector(&mut rng);
        check(&v, &w)?;
    }
    Ok(worst)
}

/// [`kappa_mu`] with the identity residual evaluated on the constant-curvature `model`.
pub fn kappa_mu_checked(
    s: &ParacontactStructure,
    model: &CurvatureModel,
    samples: usize,
    seed: u64,
) -> Result<KappaMuReport> {
    let cbar = model.constant_curvature().ok_or_else(|| {
        GeometryError::InvalidModel(
            "the closed-form kappa, mu need a constant-curvature base".into(),
        )
    })?;
    let mut rep = kappa_mu(s, cbar);
    rep.identity_residual = Some(kappa_mu_identity_residual(
        s, model, rep.kappa, rep.mu, samples, seed,
    )?);
    Ok(rep)
}

/// Fits `kappa, mu` to `R(X, xi)xi = kappa X + mu hX` over the frame vectors
/// orthogonal to `xi`, then reports the identity residual of the fit.
pub fn kappa_mu_fit(
    s: &ParacontactStructure,
    model: &CurvatureModel,
    samples: usize,
    seed: u64,
) -> Result<KappaMuReport> {
    let curv = assemble_r4(s, model)?;
    let dim = model.dim();
    let frame = Frame::new(dim)?;
    let xi = s.xi(dim);
    let basis = frame.basis();
    let n = basis.len() - 1;
    let mut lhs = DMatrix::zeros(n * basis.len(), 2);
    let mut rhs = DVector::zeros(n * basis.len());
    for (row, v) in basis.iter().skip(1).enumerate() {
        let r = curv.apply(v, &xi, &xi).to_frame_coords();
        let x = v.to_frame_coords();
        let hx = s.h_apply(model, v)?.to_frame_coords();
        for k in 0..basis.len() {
            let i = row * basis.len() + k;
            lhs[(i, 0)] = x[k];
            lhs[(i, 1)] = hx[k];
            rhs[i] = r[k];
        }
    }
    let h_zero = lhs.column(1).amax() < ZERO_TOL;
    let (kappa, mu) = if h_zero {
        let col = lhs.column(0).into_owned();
        (col.dot(&rhs) / col.dot(&col), 0.0)
    } else {
        let sol =
            lhs.svd(true, true)
                .solve(&rhs, 1e-14)
                .map_err(|m| GeometryError::Inconsistent {
                    what: format!("kappa, mu fit: {m}"),
                    residual: f64::NAN,
                })?;
        (sol[0], sol[1])
    };
    let residual = kappa_mu_identity_residual(s, model, kappa, mu, samples, seed)?;
    Ok(KappaMuReport {
        kappa,
        mu,
        identity_residual: Some(residual),
        source: KappaMuSource::CurvatureFit,
        mu_unconstrained: h_zero,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StructureKind {
    ParaSasakian,
    KParacontactOnly,
    HSquaredZeroNonzero,
    KappaMuGeneric,
    Other,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureClass {
    pub kind: StructureKind,
    pub witness: String,
    /// Largest entry of `h` in the adapted frame.
    pub h_norm: Option<f64>,
    /// Largest entry of `h^2` in the adapted frame.
    pub h2_norm: Option<f64>,
    pub kappa_mu: Option<KappaMuReport>,
    /// Disagreements between the parameter test and the numerical test.
    pub diagnostics: Vec<String>,
}

/// Matrix of `h` in the adapted frame.
pub fn h_matrix(s: &ParacontactStructure, model: &CurvatureModel) -> Result<DMatrix<f64>> {
    let basis = Frame::new(model.dim())?.basis();
    let mut cols = Vec::with_capacity(basis.len());
    for v in &basis {
        cols.push(s.h_apply(model, v)?.to_frame_coords());
    }
    Ok(DMatrix::from_columns(&cols))
}

/// Largest entry of `h^2 - (1 + kappa) phi^2`, relative to `max(1, |h^2|)`.
/// Contact structures are compared with `(kappa - 1) phi^2` instead.
pub fn h_squared_residual(
    s: &ParacontactStructure,
    model: &CurvatureModel,
    kappa: f64,
) -> Result<f64> {
    let h = h_matrix(s, model)?;
    let p = ParacontactStructure::operator_matrix(model.dim(), |v| s.phi_apply(v));
    let h2 = &h * &h;
    let coeff = match s.flavor() {
        Flavor::Paracontact => 1.0 + kappa,
        Flavor::Contact => kappa - 1.0,
    };
    Ok((&h2 - coeff * (&p * &p)).amax() / h2.amax().max(1.0))
}

/// Jacobi eigenvalues `-(sqrt(-alpha) +- |b|)^2/a^2` allowed when `h^2 = 0 != h`.
pub fn h2_zero_eigenvalues(p: &MetricParams) -> Option<(f64, f64)> {
    let al = p.alpha();
    if al >= 0.0 || p.a == 0.0 {
        return None;
    }
    let r = (-al).sqrt();
    let a2 = p.a * p.a;
    Some((-(r + p.b.abs()).powi(2) / a2, -(r - p.b.abs()).powi(2) / a2))
}

/// Whether `alpha` is one of `-b^2/9`, `-9b^2`.
pub fn alpha_in_h2_zero_set(p: &MetricParams) -> bool {
    let (al, b2) = (p.alpha(), p.b * p.b);
    b2 > 0.0 && (approx_eq(al, -b2 / 9.0) || approx_eq(al, -9.0 * b2))
}

fn close(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-7 * x.abs().max(y.abs()).max(1.0)
}

/// Classifies `s` over `model`, testing parameters first and confirming numerically.
pub fn classify_structure(
    s: &ParacontactStructure,
    model: &CurvatureModel,
) -> Result<StructureClass> {
    let p = *s.params();
    if p.a.abs() < crate::ABS_TOL {
        return Ok(StructureClass {
            kind: StructureKind::Other,
            witness: "a=0: connection/curvature unsupported".into(),
            h_norm: None,
            h2_norm: None,
            kappa_mu: None,
            diagnostics: Vec::new(),
        });
    }
    let cbar = model.constant_curvature();
    let hm = h_matrix(s, model)?;
    let h_norm = hm.amax();
    let h2_norm = (&hm * &hm).amax();
    let mut diagnostics = Vec::new();
    let km = cbar.map(|c| kappa_mu(s, c));
    let param_ps = cbar.is_some_and(|c| parasasakian_params(&p, c));

    let (kind, witness) = if h_norm < ZERO_TOL {
        if param_ps {
            (
                StructureKind::ParaSasakian,
                format!("h = 0, b = 0 and cbar = (a+c)/a = {}", (p.a + p.c) / p.a),
            )
        } else {
            diagnostics.push(format!(
                "h vanishes (|h| = {h_norm:e}) but the parameters are not b = 0, cbar = (a+c)/a"
            ));
            (StructureKind::KParacontactOnly, format!("|h| = {h_norm:e}"))
        }
    } else if h2_norm < ZERO_TOL {
        if p.b.abs() < ZERO_TOL {
            diagnostics.push("h^2 = 0 != h with b = 0".into());
        }
        let spectrum = model.jacobi_spectrum(&e(model.dim(), 0))?;
        match h2_zero_eigenvalues(&p) {
            Some((l1, l2)) => {
                for &(lam, _) in &spectrum {
                    if !close(lam, l1) && !close(lam, l2) {
                        diagnostics
                            .push(format!("Jacobi eigenvalue {lam} is not one of {l1}, {l2}"));
                    }
                }
                if spectrum.len() == 2 && !alpha_in_h2_zero_set(&p) {
                    diagnostics.push(format!(
                        "two Jacobi eigenvalues but alpha = {} is not -b^2/9 or -9b^2",
                        p.alpha()
                    ));
                }
            }
            None => diagnostics.push("h^2 = 0 != h needs alpha < 0".into()),
        }
        let eig: Vec<String> = spectrum
            .iter()
            .map(|(l, m)| format!("{l} (x{m})"))
            .collect();
        (
            StructureKind::HSquaredZeroNonzero,
            format!(
                "|h^2| = {h2_norm:e}, |h| = {h_norm:e}, Jacobi spectrum [{}]",
                eig.join(", ")
            ),
        )
    } else if let Some(k) = km {
        (
            StructureKind::KappaMuGeneric,
            format!(
                "constant curvature base, kappa = {}, mu = {}",
                k.kappa, k.mu
            ),
        )
    } else {
        (
            StructureKind::Other,
            format!("base is not of constant curvature and h^2 != 0 (|h^2| = {h2_norm:e})"),
        )
    };
    if param_ps && kind != StructureKind::ParaSasakian {
        diagnostics.push(format!(
            "parameters give a paraSasakian structure but |h| = {h_norm:e}"
        ));
    }
    Ok(StructureClass {
        kind,
        witness,
        h_norm: Some(h_norm),
        h2_norm: Some(h2_norm),
        kappa_mu: km,
        diagnostics,
    })
}

/// Largest `|(nabla_Z phi)W + G(Z,W)xi - eta(W)Z|` over sampled `Z, W`.
pub fn parasasakian_residual(
    s: &ParacontactStructure,
    model: &CurvatureModel,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let dim = model.dim();
    let frame = Frame::new(dim)?;
    let xi = s.xi(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let z = frame.random_vector(&mut rng);
        let w = frame.random_vector(&mut rng);
        let lhs = s.nabla_phi(model, &z, &w)?;
        let r = &(&lhs + &(s.inner(&z, &w) * &xi)) - &(s.eta(&w) * &z);
        worst = worst.max(r.norm());
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantPhiSectional {
    pub constant: bool,
    /// `2mu - 1` when constant and `kappa != -1`.
    pub value: Option<f64>,
    pub via_costphi: bool,
    /// `mu = 1 - kappa`; `None` when `kappa = -1`.
    pub via_mu: Option<bool>,
    /// `a^2 cbar^2 + 2((4a-1)alpha + b^2)cbar - (a+c)(a+c+2d)`.
    pub costphi_lhs: f64,
    pub kappa: f64,
    pub mu: f64,
}

impl ConstantPhiSectional {
    /// Whether the two criteria agree (vacuously when only one applies).
    pub fn criteria_agree(&self) -> bool {
        self.via_mu.map_or(true, |m| m == self.via_costphi)
    }
}

pub fn costphi_lhs(p: &MetricParams, cbar: f64) -> f64 {
    let MetricParams { a, b, c, d } = *p;
    let al = p.alpha();
    a * a * cbar * cbar + 2.0 * ((4.0 * a - 1.0) * al + b * b) * cbar - (a + c) * (a + c + 2.0 * d)
}

/// Tests constancy of the phi-sectional curvature over a base of constant curvature `cbar`.
pub fn constant_phi_sectional_check(s: &ParacontactStructure, cbar: f64) -> ConstantPhiSectional {
    let p = *s.params();
    let lhs = costphi_lhs(&p, cbar);
    let MetricParams { a, b, c, d } = p;
    let scale = [
        a * a * cbar * cbar,
        2.0 * ((4.0 * a - 1.0) * p.alpha() + b * b) * cbar,
        (a + c) * (a + c + 2.0 * d),
    ]
    .into_iter()
    .fold(1.0, |m: f64, t| m.max(t.abs()));
    let via_costphi = lhs.abs() < ZERO_TOL * scale;
    let km = kappa_mu(s, cbar);
    let kappa_is_minus_one = (km.kappa + 1.0).abs() < ZERO_TOL;
    let via_mu = (!kappa_is_minus_one)
        .then(|| (km.mu - (1.0 - km.kappa)).abs() <= REL_TOL * km.mu.abs().max(1.0));
    let constant = via_costphi;
    ConstantPhiSectional {
        constant,
        value: (constant && !kappa_is_minus_one).then_some(2.0 * km.mu - 1.0),
        via_costphi,
        via_mu,
        costphi_lhs: lhs,
        kappa: km.kappa,
        mu: km.mu,
    }
}

/// Paracontact constants with constant phi-sectional curvature over a flat base.
///
/// The first family is `b = +-sqrt((a+c)(a + 1/8))`, `d = -(a+c)/2`; it is empty
/// when the radicand is negative. When `a + c = 0` the representative `b = 1`,
/// `d = 4` of the second family `a + c = 0, b != 0, d = 4b^2` is returned.
/// Every tuple is checked against `a + c + d = -4 alpha`.
pub fn flat_base_families(a: f64, a_plus_c: f64) -> Vec<MetricParams> {
    let c = a_plus_c - a;
    let mut candidates = Vec::new();
    let radicand = a_plus_c * (a + 0.125);
    if radicand >= 0.0 {
        let b = radicand.sqrt();
        candidates.push(MetricParams::new(a, b, c, -a_plus_c / 2.0));
        if b > 0.0 {
            candidates.push(MetricParams::new(a, -b, c, -a_plus_c / 2.0));
        }
    }
    if a_plus_c == 0.0 {
        candidates.push(MetricParams::new(a, 1.0, c, 4.0));
    }
    candidates
        .into_iter()
        .filter(|p| {
            build_structure(p.a, p.b, p.c, Flavor::Paracontact)
                .is_ok_and(|s| approx_eq(s.params().d, p.d))
        })
        .collect()
}
