//! D-homothetic deformations and the canonical contact to paracontact deformations.
//!
//! A D-homothetic deformation with constant `t != 0` replaces
//! `(phi, xi, eta, g)` by `(phi, xi/t, t eta, t g + t(t-1) eta (x) eta)`.
//! On g-natural structures it acts on the constants by
//! `(a, b, c, d, rho) -> (ta, tb, tc, t(d + (t-1)/rho^2), rho/t)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curvature_models::CurvatureModel;
use crate::error::{GeometryError, Result};
use crate::frames::Frame;
use crate::gnatural::MetricParams;
use crate::paracontact::{Flavor, ParacontactStructure};
use crate::{approx_eq, ABS_TOL};

/// Largest number of integer steps tried by [`normalize_phi`].
const MAX_NORMALIZE_STEPS: u32 = 1_000_000;

pub fn d_homothetic(s: &ParacontactStructure, t: f64) -> Result<ParacontactStructure> {
    if t == 0.0 || !t.is_finite() {
        return Err(GeometryError::InvalidParameters(format!(
            "deformation constant must be finite and non-zero, got {t}"
        )));
    }
    let MetricParams { a, b, c, d } = *s.params();
    let rho = s.rho();
    let params = MetricParams::new(t * a, t * b, t * c, t * (d + (t - 1.0) / (rho * rho)));
    ParacontactStructure::from_parts(params, rho / t, s.flavor())
}

/// `phi_t = t^2 phi + a t^2 (t - 1)/rho^2`.
pub fn deformed_phi(s: &ParacontactStructure, t: f64) -> f64 {
    let rho = s.rho();
    t * t * s.params().phi() + s.params().a * t * t * (t - 1.0) / (rho * rho)
}

/// `(kappa_t, mu_t) = ((kappa + 1 - t^2)/t^2, (mu + 2t - 2)/t)`.
pub fn deformed_kappa_mu(kappa: f64, mu: f64, t: f64) -> (f64, f64) {
    ((kappa + 1.0 - t * t) / (t * t), (mu + 2.0 * t - 2.0) / t)
}

/// A D-homothetic deformation with `phi_t > 0`, and the `t` used.
///
/// `t = 1` when `phi` is already positive. Otherwise `t` runs over
/// `sign(a) * 2, sign(a) * 3, ...` (and `t = -1` first when `a < 0`) until
/// `phi_t > 0`, since `phi_t` grows without bound in that direction.
pub fn normalize_phi(s: &ParacontactStructure) -> Result<(ParacontactStructure, f64)> {
    let a = s.params().a;
    if a.abs() < ABS_TOL {
        return Err(GeometryError::Unsupported(
            "a = 0: phi = -b^2 < 0 for every D-homothetic deformation".into(),
        ));
    }
    if s.params().phi() > 0.0 {
        return Ok((*s, 1.0));
    }
    let start = if a > 0.0 { 2 } else { 1 };
    for k in start..MAX_NORMALIZE_STEPS {
        let t = a.signum() * f64::from(k);
        if deformed_phi(s, t) > 0.0 {
            let st = d_homothetic(s, t)?;
            if st.params().phi() > 0.0 {
                return Ok((st, t));
            }
        }
    }
    Err(GeometryError::Unsupported(
        "no admissible integer deformation constant found".into(),
    ))
}

/// Residuals comparing the structure built from deformed constants with the
/// deformation applied to the tensors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DHomotheticReport {
    pub t: f64,
    /// `G_t - (t G + t(t-1) eta (x) eta)`.
    pub metric: f64,
    /// `eta_t - t eta`.
    pub eta: f64,
    /// `xi_t - xi/t`.
    pub xi: f64,
    /// `phi_t - phi`.
    pub phi: f64,
    /// `h_t - h/t`.
    pub h: f64,
}

impl DHomotheticReport {
    pub fn max(&self) -> f64 {
        [self.metric, self.eta, self.xi, self.phi, self.h]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

pub fn d_homothetic_tensors_check(
    s: &ParacontactStructure,
    model: &CurvatureModel,
    t: f64,
    samples: usize,
    seed: u64,
) -> Result<DHomotheticReport> {
    let st = d_homothetic(s, t)?;
    let dim = model.dim();
    let frame = Frame::new(dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = DHomotheticReport {
        t,
        xi: (&st.xi(dim) - &((1.0 / t) * &s.xi(dim))).norm(),
        ..DHomotheticReport::default()
    };
    for _ in 0..samples {
        let v = frame.random_vector(&mut rng);
        let w = frame.random_vector(&mut rng);
        let g = t * s.inner(&v, &w) + t * (t - 1.0) * s.eta(&v) * s.eta(&w);
        rep.metric = rep.metric.max((st.inner(&v, &w) - g).abs());
        rep.eta = rep.eta.max((st.eta(&v) - t * s.eta(&v)).abs());
        rep.phi = rep.phi.max((&st.phi_apply(&v) - &s.phi_apply(&v)).norm());
        let h = (1.0 / t) * &s.h_apply(model, &v)?;
        rep.h = rep.h.max((&st.h_apply(model, &v)? - &h).norm());
    }
    Ok(rep)
}

fn require_contact(s: &ParacontactStructure) -> Result<()> {
    if s.flavor() != Flavor::Contact {
        return Err(GeometryError::InvalidParameters(
            "expected a contact structure".into(),
        ));
    }
    Ok(())
}

/// `(kappa, mu)` of a g-natural contact structure over a base of constant curvature `cbar`.
pub fn contact_kappa_mu(s: &ParacontactStructure, cbar: f64) -> Result<(f64, f64)> {
    require_contact(s)?;
    let MetricParams { a, b, c, d } = *s.params();
    let al = s.alpha();
    let kappa = (-a * a * cbar * cbar + 2.0 * (al - b * b) * cbar + d * (2.0 * (a + c) + d))
        / (16.0 * al * al);
    let mu = (d - a * cbar) / (2.0 * al);
    if kappa >= 1.0 - ABS_TOL {
        return Err(GeometryError::Sasakian(kappa));
    }
    Ok((kappa, mu))
}

/// `((kappa_1, mu_1), (kappa_2, mu_2))` of the two canonical deformations of a
/// contact `(kappa, mu)`-space.
pub fn canonical_kappa_mu(kappa: f64, mu: f64) -> ((f64, f64), (f64, f64)) {
    let s = (1.0 - kappa).sqrt();
    let q = (1.0 - mu / 2.0).powi(2);
    ((q - 1.0, 2.0 * (1.0 - s)), (kappa - 2.0 + q, 2.0))
}

fn finish(
    sc: &ParacontactStructure,
    params: MetricParams,
    what: &str,
) -> Result<ParacontactStructure> {
    let residual = (params.alpha() + sc.alpha()).abs();
    if !approx_eq(params.alpha(), -sc.alpha()) {
        return Err(GeometryError::Inconsistent {
            what: format!("{what}: alpha_i = -alpha'"),
            residual,
        });
    }
    ParacontactStructure::from_parts(params, sc.rho(), Flavor::Paracontact).map_err(|_| {
        GeometryError::Inconsistent {
            what: format!("{what}: a+c+d = -4 alpha"),
            residual: (params.trace() + 4.0 * params.alpha()).abs(),
        }
    })
}

/// Constants of the structure `phi_1 = phi' h' / sqrt(1 - kappa)`,
/// `g_1 = -g'(., h'.)/sqrt(1 - kappa) + eta' (x) eta'`.
pub fn deform1(sc: &ParacontactStructure, cbar: f64) -> Result<ParacontactStructure> {
    let (kappa, _) = contact_kappa_mu(sc, cbar)?;
    let MetricParams { a, b, c, d } = *sc.params();
    let al = sc.alpha();
    let k = 1.0 / (4.0 * al * (1.0 - kappa).sqrt());
    let a1 = k * (a * a * cbar - al + b * b);
    let b1 = k * b * (a * cbar + a + c);
    let c1 = k * ((-a * a - al + b * b) * cbar + al - b * b + (a + c) * (a + c));
    let d1 = (a + c + d) + k * ((al - b * b) * cbar - (a + c) * (a + c));
    finish(sc, MetricParams::new(a1, b1, c1, d1), "deform1")
}

/// `alpha_1` for the two readings of `b_1`: with the factor `b'`, and without it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Deform1Candidates {
    pub with_b_factor: f64,
    pub without_b_factor: f64,
    /// `-alpha'`, the value both should equal.
    pub expected: f64,
}

pub fn deform1_alpha_candidates(sc: &ParacontactStructure, cbar: f64) -> Result<Deform1Candidates> {
    let (kappa, _) = contact_kappa_mu(sc, cbar)?;
    let MetricParams { a, b, c, .. } = *sc.params();
    let al = sc.alpha();
    let k = 1.0 / (4.0 * al * (1.0 - kappa).sqrt());
    let a1 = k * (a * a * cbar - al + b * b);
    let c1 = k * ((-a * a - al + b * b) * cbar + al - b * b + (a + c) * (a + c));
    let bare = k * (a * cbar + a + c);
    Ok(Deform1Candidates {
        with_b_factor: a1 * (a1 + c1) - (b * bare).powi(2),
        without_b_factor: a1 * (a1 + c1) - bare * bare,
        expected: -al,
    })
}

/// Sign of `h'` in the second canonical deformation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Deform2Sign {
    /// `phi_2 = -h'/sqrt(1 - kappa)`; yields `b_2 = -(rho/(2 sqrt(1-kappa)))(a' cbar - (a'+c'))`.
    #[default]
    MinusH,
    /// `phi_2 = h'/sqrt(1 - kappa)`; all of `a_2, b_2, c_2` change sign.
    PlusH,
}

/// Second canonical deformation with the default sign, see [`deform2_with`].
pub fn deform2(sc: &ParacontactStructure, cbar: f64) -> Result<ParacontactStructure> {
    deform2_with(sc, cbar, Deform2Sign::default())
}

/// Constants of `g_2 = +-g'(., phi' h'.)/sqrt(1 - kappa) + eta' (x) eta'`:
///
/// ```text
/// a_2 = s rho b'/sqrt(1-kappa)         b_2 = -s rho (a' cbar - (a'+c'))/(2 sqrt(1-kappa))
/// c_2 = -s rho (1 + cbar) b'/sqrt(1-kappa)   d_2 = 1/rho^2 - a_2 - c_2
/// ```
/// with `s = 1` for [`Deform2Sign::MinusH`] and `s = -1` for [`Deform2Sign::PlusH`].
pub fn deform2_with(
    sc: &ParacontactStructure,
    cbar: f64,
    sign: Deform2Sign,
) -> Result<ParacontactStructure> {
    let (kappa, _) = contact_kappa_mu(sc, cbar)?;
    let MetricParams { a, b, c, .. } = *sc.params();
    let s = match sign {
        Deform2Sign::MinusH => 1.0,
        Deform2Sign::PlusH => -1.0,
    };
    let rho = sc.rho();
    let k = s * rho / (1.0 - kappa).sqrt();
    let a2 = k * b;
    let b2 = -k / 2.0 * (a * cbar - (a + c));
    let c2 = -k * (1.0 + cbar) * b;
    let d2 = 1.0 / (rho * rho) - a2 - c2;
    // `+ 0.0` turns the -0.0 produced by b' = 0 into 0.0
    let clean = |x: f64| x + 0.0;
    finish(
        sc,
        MetricParams::new(clean(a2), clean(b2), clean(c2), clean(d2)),
        "deform2",
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paracontact::build_structure;

    fn p0() -> ParacontactStructure {
        build_structure(1.0, 0.0, -2.0, Flavor::Paracontact).unwrap()
    }

    #[test]
    fn dhom_examples() {
        let s = d_homothetic(&p0(), 2.0).unwrap();
        assert_eq!(*s.params(), MetricParams::new(2.0, 0.0, -4.0, 18.0));
        assert_eq!(s.rho(), 0.25);
        assert_eq!(d_homothetic(&p0(), 1.0).unwrap(), p0());
        let q = build_structure(2.0, 3.0, 2.0, Flavor::Paracontact).unwrap();
        let qt = d_homothetic(&q, 2.0).unwrap();
        assert_eq!(*qt.params(), MetricParams::new(4.0, 6.0, 4.0, 8.0));
        assert_eq!(qt.alpha(), -4.0);
        assert!(d_homothetic(&q, 0.0).is_err());
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_phi(&p0()).unwrap().1, 1.0);
        let q = build_structure(2.0, 3.0, 2.0, Flavor::Paracontact).unwrap();
        let (qt, t) = normalize_phi(&q).unwrap();
        assert_eq!(t, 2.0);
        assert_eq!(deformed_phi(&q, 2.0), 28.0);
        assert_eq!(qt.params().phi(), 28.0);
        let z = build_structure(0.0, 1.0, 5.0, Flavor::Paracontact).unwrap();
        assert!(normalize_phi(&z).is_err());
    }

    #[test]
    fn contact_examples() {
        let sc = build_structure(1.0, 0.0, 0.0, Flavor::Contact).unwrap();
        assert_eq!(contact_kappa_mu(&sc, 0.0).unwrap(), (15.0 / 16.0, 1.5));
        assert_eq!(contact_kappa_mu(&sc, -1.0).unwrap(), (0.75, 2.0));
        assert!(matches!(
            contact_kappa_mu(&sc, 1.0),
            Err(GeometryError::Sasakian(_))
        ));
        assert!(contact_kappa_mu(&p0(), 0.0).is_err());
    }

    #[test]
    fn deform_examples() {
        let sc = build_structure(1.0, 0.0, 0.0, Flavor::Contact).unwrap();
        let s1 = deform1(&sc, 0.0).unwrap();
        assert_eq!(*s1.params(), MetricParams::new(-1.0, 0.0, 2.0, 3.0));
        assert_eq!(s1.rho(), 0.5);
        let s2 = deform2(&sc, 0.0).unwrap();
        assert_eq!(*s2.params(), MetricParams::new(0.0, 1.0, 0.0, 4.0));
        let s2p = deform2_with(&sc, 0.0, Deform2Sign::PlusH).unwrap();
        assert_eq!(s2p.params().b, -1.0);
        let ((k1, m1), (k2, m2)) = canonical_kappa_mu(15.0 / 16.0, 1.5);
        assert_eq!((k1, m1, k2, m2), (-15.0 / 16.0, 1.5, -1.0, 2.0));
    }

    #[test]
    fn deform1_candidates_differ_when_b_is_not_one() {
        let sc = build_structure(1.0, 0.5, 0.3, Flavor::Contact).unwrap();
        let c = deform1_alpha_candidates(&sc, -0.4).unwrap();
        assert!((c.with_b_factor - c.expected).abs() < 1e-12);
        assert!((c.without_b_factor - c.expected).abs() > 1e-2);
    }
}
