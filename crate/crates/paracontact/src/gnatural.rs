//! Parameter algebra and signature classification for g-natural metrics.
//!
//! On `TM` a g-natural metric is determined pointwise by six functions
//! `alpha_i, beta_i` of `t = |u|^2`. Restricted to the unit tangent sphere
//! bundle it collapses to four constants `(a, b, c, d)`:
//!
//! ```text
//! G(X1^h, X2^h) = (a+c)<X1,X2> + d<X1,u><X2,u>
//! G(X^h,  Y^t)  = b<X,Y>
//! G(Y1^t, Y2^t) = a<Y1,Y2>
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::ABS_TOL;

/// The four constants of a g-natural metric on `T_1M`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl MetricParams {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    /// `alpha = a(a+c) - b^2`.
    pub fn alpha(&self) -> f64 {
        self.a * (self.a + self.c) - self.b * self.b
    }

    /// `phi = a(a+c+d) - b^2`.
    pub fn phi(&self) -> f64 {
        self.a * self.trace() - self.b * self.b
    }

    /// `a + c + d`, the squared length of `u^h`.
    pub fn trace(&self) -> f64 {
        self.a + self.c + self.d
    }

    /// `a + c + d r^2` on the tangent sphere bundle of radius `r`.
    pub fn trace_at(&self, r: f64) -> f64 {
        self.a + self.c + self.d * r * r
    }

    /// `a(a + c + d r^2) - b^2`.
    pub fn phi_at(&self, r: f64) -> f64 {
        self.a * self.trace_at(r) - self.b * self.b
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(s * self.a, s * self.b, s * self.c, s * self.d)
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite()
    }
}

/// The six coefficient functions of a g-natural metric on `TM`, evaluated at `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TMCoefficients {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    /// The squared norm `t = r^2` at which the functions were evaluated.
    pub t: f64,
}

impl TMCoefficients {
    pub fn sasaki() -> Self {
        Self {
            alpha1: 1.0,
            alpha2: 0.0,
            alpha3: 0.0,
            beta1: 0.0,
            beta2: 0.0,
            beta3: 0.0,
            t: 1.0,
        }
    }

    /// Cheeger-Gromoll metric at `t = |u|^2`.
    pub fn cheeger_gromoll(t: f64) -> Self {
        let s = 1.0 / (1.0 + t);
        Self {
            alpha1: s,
            alpha2: 0.0,
            alpha3: 1.0 - s,
            beta1: s,
            beta2: 0.0,
            beta3: -s,
            t,
        }
    }

    pub fn phi1(&self) -> f64 {
        self.alpha1 + self.t * self.beta1
    }

    pub fn phi2(&self) -> f64 {
        self.alpha2 + self.t * self.beta2
    }

    pub fn phi3(&self) -> f64 {
        self.alpha3 + self.t * self.beta3
    }

    /// `alpha = alpha1(alpha1 + alpha3) - alpha2^2`.
    pub fn alpha(&self) -> f64 {
        self.alpha1 * (self.alpha1 + self.alpha3) - self.alpha2 * self.alpha2
    }

    /// `phi = phi1(phi1 + phi3) - phi2^2`.
    pub fn phi(&self) -> f64 {
        let p1 = self.phi1();
        p1 * (p1 + self.phi3()) - self.phi2() * self.phi2()
    }

    /// The g-natural metric this induces on `T_rM`, `r^2 = t`.
    pub fn induced(&self) -> MetricParams {
        MetricParams::new(
            self.alpha1,
            self.alpha2,
            self.alpha3,
            self.beta1 + self.beta3,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignatureKind {
    Riemannian,
    NeutralAdmissible,
    Degenerate,
    OtherPseudo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignatureReport {
    pub kind: SignatureKind,
    /// Distinct eigenvalues of the Gram matrix in an adapted frame.
    pub eigenvalues: Vec<f64>,
    /// For neutral metrics, whether `u^h` is spacelike.
    pub spacelike_uh: Option<bool>,
    pub details: String,
}

/// Eigenvalues of the symmetric matrix `[[p + q, s], [s, p]]`.
fn pair_eigenvalues(p: f64, q: f64, s: f64) -> (f64, f64) {
    let mid = (2.0 * p + q) / 2.0;
    let half = (q * q + 4.0 * s * s).sqrt() / 2.0;
    (mid + half, mid - half)
}

/// Signature of a g-natural metric on `TM` at a point with `|u|^2 = t`.
///
/// In a frame `{e_0 = u/|u|, e_1, ..., e_n}` the Gram matrix splits into one
/// 2x2 block on `(e_0^h, e_0^v)` built from the `phi_i` and `n` copies of a
/// 2x2 block on `(e_i^h, e_i^v)` built from the `alpha_i`.
pub fn tm_signature(coeffs: &TMCoefficients) -> SignatureReport {
    let (u_hi, u_lo) = pair_eigenvalues(coeffs.phi1(), coeffs.phi3(), coeffs.phi2());
    let (p_hi, p_lo) = pair_eigenvalues(coeffs.alpha1, coeffs.alpha3, coeffs.alpha2);
    let alpha = coeffs.alpha();
    let phi = coeffs.phi();
    let eigenvalues = vec![u_hi, u_lo, p_hi, p_lo];
    let details = format!(
        "alpha = {alpha}, phi = {phi}; eigenvalues {u_hi}, {u_lo} (once) and {p_hi}, {p_lo} (n times)"
    );
    let kind = if alpha.abs() < ABS_TOL || phi.abs() < ABS_TOL {
        SignatureKind::Degenerate
    } else if coeffs.alpha1 > 0.0 && coeffs.phi1() > 0.0 && alpha > 0.0 && phi > 0.0 {
        SignatureKind::Riemannian
    } else {
        SignatureKind::OtherPseudo
    };
    SignatureReport {
        kind,
        eigenvalues,
        spacelike_uh: None,
        details,
    }
}

/// Signature of the induced metric on the tangent sphere bundle of radius `r`.
pub fn t1m_signature(params: &MetricParams, r: f64) -> Result<SignatureReport> {
    if r.is_nan() || r <= 0.0 {
        return Err(GeometryError::InvalidParameters(format!(
            "radius must be positive, got {r}"
        )));
    }
    let trace = params.trace_at(r);
    let alpha = params.alpha();
    let (hi, lo) = pair_eigenvalues(params.a, params.c, params.b);
    let eigenvalues = vec![trace, hi, lo];

    let (kind, spacelike_uh) = if trace.abs() < ABS_TOL || alpha.abs() < ABS_TOL {
        (SignatureKind::Degenerate, None)
    } else if params.a > 0.0 && trace > 0.0 && alpha > 0.0 {
        (SignatureKind::Riemannian, None)
    } else if alpha < 0.0 {
        (SignatureKind::NeutralAdmissible, Some(trace > 0.0))
    } else {
        (SignatureKind::OtherPseudo, None)
    };
    let details = format!("a+c+dr^2 = {trace}, alpha = {alpha}; 2x2 block eigenvalues {hi}, {lo}");
    Ok(SignatureReport {
        kind,
        eigenvalues,
        spacelike_uh,
        details,
    })
}

/// Which kind of metric on `TM` induces the given metric on `T_rM`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TmInducedClass {
    RiemannianTM,
    DegenerateTM,
    LorentzTM,
}

pub fn tm_induced_class(params: &MetricParams, r: f64) -> TmInducedClass {
    let phi = params.phi_at(r);
    if phi.abs() < ABS_TOL {
        TmInducedClass::DegenerateTM
    } else if phi > 0.0 {
        TmInducedClass::RiemannianTM
    } else {
        TmInducedClass::LorentzTM
    }
}

/// Unit normal `N = (-b u^h + (a+c+d) u^v) / sqrt(|(a+c+d) phi|)` to `T_1M` in `TM`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitNormal {
    /// Coefficient of `u^h`.
    pub horizontal: f64,
    /// Coefficient of `u^v`.
    pub vertical: f64,
    pub spacelike: bool,
}

pub fn unit_normal(params: &MetricParams) -> Result<UnitNormal> {
    let trace = params.trace();
    let phi = params.phi();
    if trace.abs() < ABS_TOL {
        return Err(GeometryError::DegenerateDirection);
    }
    if phi.abs() < ABS_TOL {
        return Err(GeometryError::DegenerateMetric("phi = 0".into()));
    }
    let scale = 1.0 / (trace * phi).abs().sqrt();
    Ok(UnitNormal {
        horizontal: -params.b * scale,
        vertical: trace * scale,
        spacelike: phi > 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_scalars() {
        let p = MetricParams::new(1.0, 0.0, -2.0, 5.0);
        assert_eq!(p.alpha(), -1.0);
        assert_eq!(p.phi(), 4.0);
        assert_eq!(p.trace(), 4.0);
        let q = MetricParams::new(2.0, 3.0, 2.0, 0.0);
        assert_eq!(q.phi(), -1.0);
    }

    #[test]
    fn tm_examples() {
        assert_eq!(
            tm_signature(&TMCoefficients::sasaki()).kind,
            SignatureKind::Riemannian
        );
        let cg = TMCoefficients::cheeger_gromoll(1.0);
        assert_eq!(cg.alpha1, 0.5);
        assert_eq!(cg.alpha3, 0.5);
        assert_eq!(cg.beta3, -0.5);
        assert_eq!(tm_signature(&cg).kind, SignatureKind::Riemannian);
        let c = TMCoefficients {
            alpha1: 0.0,
            alpha2: 1.0,
            alpha3: 0.0,
            beta1: 0.0,
            beta2: 0.0,
            beta3: 0.0,
            t: 1.0,
        };
        let rep = tm_signature(&c);
        assert_eq!(c.alpha(), -1.0);
        assert_eq!(rep.kind, SignatureKind::OtherPseudo);
    }

    #[test]
    fn t1m_examples() {
        let k = |p: MetricParams| t1m_signature(&p, 1.0).unwrap();
        assert_eq!(
            k(MetricParams::new(1.0, 0.0, 0.0, 0.0)).kind,
            SignatureKind::Riemannian
        );
        let n = k(MetricParams::new(1.0, 0.0, -2.0, 5.0));
        assert_eq!(n.kind, SignatureKind::NeutralAdmissible);
        assert_eq!(n.spacelike_uh, Some(true));
        assert_eq!(
            k(MetricParams::new(1.0, 0.0, -1.0, 0.0)).kind,
            SignatureKind::Degenerate
        );
        assert!(t1m_signature(&MetricParams::new(1.0, 0.0, 0.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn induced_class_examples() {
        assert_eq!(
            tm_induced_class(&MetricParams::new(1.0, 0.0, -2.0, 5.0), 1.0),
            TmInducedClass::RiemannianTM
        );
        assert_eq!(
            tm_induced_class(&MetricParams::new(2.0, 3.0, 2.0, 0.0), 1.0),
            TmInducedClass::LorentzTM
        );
        assert_eq!(
            tm_induced_class(&MetricParams::new(1.0, 2.0, 0.0, 3.0), 1.0),
            TmInducedClass::DegenerateTM
        );
    }

    #[test]
    fn unit_normal_examples() {
        let n = unit_normal(&MetricParams::new(1.0, 0.0, -2.0, 5.0)).unwrap();
        assert_eq!((n.horizontal, n.vertical, n.spacelike), (0.0, 1.0, true));
        let n = unit_normal(&MetricParams::new(2.0, 3.0, 2.0, 0.0)).unwrap();
        assert_eq!((n.horizontal, n.vertical, n.spacelike), (-1.5, 2.0, false));
        // b = 0, a + c + d = 1, phi = a
        let n = unit_normal(&MetricParams::new(3.0, 0.0, -4.0, 2.0)).unwrap();
        assert!((n.vertical - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(n.horizontal, 0.0);
        assert!(unit_normal(&MetricParams::new(1.0, 2.0, 0.0, 3.0)).is_err());
    }
}
