//! g-natural paracontact (and contact) metric structures on `T_1M`.
//!
//! For constants `(a, b, c)` with `alpha = a(a+c) - b^2 < 0` the choice
//! `d = -4 alpha - (a+c)` makes `u^h` spacelike of length `1/rho` and
//!
//! ```text
//! xi    = rho u^h
//! eta   (X^h) = <X,u>/rho,   eta(Y^t) = b rho <Y,u>
//! phi   (X^h) = (1/(2 rho alpha)) (-b X^h + (a+c) X^t + (b d/(a+c+d)) <X,u> u^h)
//! phi   (Y^t) = (1/(2 rho alpha)) (-a Y^h + b Y^t + (phi/(a+c+d)) <Y,u> u^h)
//! ```
//!
//! is a paracontact metric structure. The contact flavor uses the same formulas
//! with `alpha > 0` and `a + c + d = 4 alpha`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curvature_models::CurvatureModel;
use crate::error::{GeometryError, Result};
use crate::frames::{e, lift_unchecked, perp, t1m_inner, BaseVector, Frame, T1MVector};
use crate::gnatural::MetricParams;
use crate::{approx_eq, ABS_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Flavor {
    Paracontact,
    Contact,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParacontactStructure {
    params: MetricParams,
    rho: f64,
    flavor: Flavor,
}

/// Bases of the `+1` and `-1` eigenspaces of `phi` on `ker eta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigendistributionBasis {
    pub plus: Vec<T1MVector>,
    pub minus: Vec<T1MVector>,
}

/// Largest residuals of the structure identities over the sampled vectors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    /// `phi^2 V - V + eta(V) xi` (sign flipped for the contact flavor).
    pub phi_squared: f64,
    /// `G(phi V, phi W) + G(V, W) - eta(V) eta(W)` (contact: `- G + eta eta`).
    pub compatibility: f64,
    /// `eta(phi V)`.
    pub eta_phi: f64,
    /// `G(V, phi W) + G(phi V, W)`.
    pub skew: f64,
    /// `eta(V) - G(V, xi)`.
    pub eta_metric: f64,
    /// `|eta(xi) - 1|` and `|phi xi|`.
    pub reeb: f64,
}

impl AxiomReport {
    pub fn max(&self) -> f64 {
        [
            self.phi_squared,
            self.compatibility,
            self.eta_phi,
            self.skew,
            self.eta_metric,
            self.reeb,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Residuals of the algebraic identities satisfied by `h`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HPropertiesReport {
    /// `G(hV, W) - G(V, hW)`.
    pub self_adjoint: f64,
    /// Trace of the matrix of `h` in the adapted frame.
    pub trace: f64,
    /// `eta(hV)`.
    pub eta_h: f64,
    /// `h phi + phi h`.
    pub anticommute: f64,
    /// `h xi`.
    pub h_xi: f64,
}

impl HPropertiesReport {
    pub fn max(&self) -> f64 {
        [
            self.self_adjoint,
            self.trace,
            self.eta_h,
            self.anticommute,
            self.h_xi,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// `d` making `(a, b, c, d)` paracontact.
pub fn paracontact_d(a: f64, b: f64, c: f64) -> f64 {
    let alpha = a * (a + c) - b * b;
    -4.0 * alpha - (a + c)
}

/// `d` making `(a, b, c, d)` contact.
pub fn contact_d(a: f64, b: f64, c: f64) -> f64 {
    let alpha = a * (a + c) - b * b;
    4.0 * alpha - (a + c)
}

/// Builds the structure determined by `(a, b, c)`.
pub fn build_structure(a: f64, b: f64, c: f64, flavor: Flavor) -> Result<ParacontactStructure> {
    let alpha = a * (a + c) - b * b;
    if !(a.is_finite() && b.is_finite() && c.is_finite()) {
        return Err(GeometryError::InvalidParameters(
            "non-finite constant".into(),
        ));
    }
    if alpha.abs() < ABS_TOL {
        return Err(GeometryError::DegenerateMetric("alpha = 0".into()));
    }
    let d = match flavor {
        Flavor::Paracontact => {
            if alpha > 0.0 {
                return Err(GeometryError::InvalidParameters(format!(
                    "paracontact structures need alpha < 0, got {alpha}"
                )));
            }
            paracontact_d(a, b, c)
        }
        Flavor::Contact => {
            if a.is_nan() || a <= 0.0 || alpha < 0.0 {
                return Err(GeometryError::InvalidParameters(format!(
                    "contact structures need a > 0 and alpha > 0, got a = {a}, alpha = {alpha}"
                )));
            }
            contact_d(a, b, c)
        }
    };
    let params = MetricParams::new(a, b, c, d);
    Ok(ParacontactStructure {
        params,
        rho: 1.0 / params.trace().sqrt(),
        flavor,
    })
}

impl ParacontactStructure {
    /// Validates `params` and `rho` against the compatibility condition.
    pub fn from_parts(params: MetricParams, rho: f64, flavor: Flavor) -> Result<Self> {
        let s = Self {
            params,
            rho,
            flavor,
        };
        let alpha = params.alpha();
        let trace = params.trace();
        let expected = match flavor {
            Flavor::Paracontact => -4.0 * alpha,
            Flavor::Contact => 4.0 * alpha,
        };
        if alpha.abs() < ABS_TOL {
            return Err(GeometryError::DegenerateMetric("alpha = 0".into()));
        }
        let sign_ok = match flavor {
            Flavor::Paracontact => alpha < 0.0,
            Flavor::Contact => alpha > 0.0 && params.a > 0.0,
        };
        if !sign_ok || !approx_eq(trace, expected) || !approx_eq(rho * rho * trace, 1.0) {
            return Err(GeometryError::InvalidParameters(format!(
                "{params:?} with rho = {rho} is not a {flavor:?} structure \
                 (a+c+d = {trace}, expected {expected})"
            )));
        }
        Ok(s)
    }

    /// From `params` alone, taking `rho > 0`.
    pub fn from_params(params: MetricParams, flavor: Flavor) -> Result<Self> {
        let trace = params.trace();
        if trace.is_nan() || trace <= 0.0 {
            return Err(GeometryError::InvalidParameters(format!(
                "a+c+d must be positive, got {trace}"
            )));
        }
        Self::from_parts(params, 1.0 / trace.sqrt(), flavor)
    }

    /// Skips validation. Intended for negative controls such as a perturbed `d`.
    pub fn from_parts_unchecked(params: MetricParams, rho: f64, flavor: Flavor) -> Self {
        Self {
            params,
            rho,
            flavor,
        }
    }

    pub fn params(&self) -> &MetricParams {
        &self.params
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn alpha(&self) -> f64 {
        self.params.alpha()
    }

    pub fn inner(&self, v: &T1MVector, w: &T1MVector) -> f64 {
        t1m_inner(&self.params, v, w)
    }

    fn lift(&self, x: &BaseVector) -> T1MVector {
        lift_unchecked(self.params.b / self.params.trace(), x)
    }

    /// `H^h + {T}^{t_G}` for base vectors `H`, `T`.
    pub(crate) fn ht(&self, h: BaseVector, t: &BaseVector) -> T1MVector {
        T1MVector::horizontal(h) + self.lift(t)
    }

    pub fn xi(&self, dim: usize) -> T1MVector {
        T1MVector::horizontal(e(dim, 0) * self.rho)
    }

    pub fn eta(&self, v: &T1MVector) -> f64 {
        v.h()[0] / self.rho
    }

    pub fn phi_apply(&self, v: &T1MVector) -> T1MVector {
        let MetricParams { a, b, c, d } = self.params;
        let trace = self.params.trace();
        let k = 1.0 / (2.0 * self.rho * self.alpha());
        let x = v.h();
        let y = v.t();
        let mut uh = DVector::zeros(x.len());
        uh[0] = b * d / trace * x[0];
        let from_h = T1MVector::horizontal(x * -b + uh) + (a + c) * self.lift(x);
        let from_t = T1MVector::horizontal(y * -a) + b * &T1MVector::tangential(y.clone());
        k * (from_h + from_t)
    }

    /// Matrix of a linear operator on `T_(x,u) T_1M` in the adapted frame.
    pub fn operator_matrix<F>(dim: usize, op: F) -> DMatrix<f64>
    where
        F: Fn(&T1MVector) -> T1MVector,
    {
        let basis = Frame::new(dim)
            .expect("dimension checked by caller")
            .basis();
        let cols: Vec<DVector<f64>> = basis.iter().map(|v| op(v).to_frame_coords()).collect();
        DMatrix::from_columns(&cols)
    }

    /// Eigenvectors of `phi` for `+1` and `-1` on `ker eta`.
    pub fn eigendistributions(&self, dim: usize) -> Result<EigendistributionBasis> {
        if self.flavor != Flavor::Paracontact {
            return Err(GeometryError::Unsupported(
                "phi has no real eigendistributions for contact structures".into(),
            ));
        }
        let frame = Frame::new(dim)?;
        let MetricParams { a, b, c, .. } = self.params;
        let mut plus = Vec::with_capacity(dim - 1);
        let mut minus = Vec::with_capacity(dim - 1);
        for i in 1..dim {
            let h = T1MVector::horizontal(frame.e(i));
            let t = T1MVector::tangential(frame.e(i));
            if a.abs() > ABS_TOL {
                let ra = 2.0 * self.rho * self.alpha();
                plus.push(&h - &(((b + ra) / a) * &t));
                minus.push(&h - &(((b - ra) / a) * &t));
            } else {
                // a = 0: phi(Y^t) = -sign(b) Y^t and X^h - (c/2b) X^t has eigenvalue sign(b).
                let mixed = &h - &((c / (2.0 * b)) * &t);
                if b * self.rho > 0.0 {
                    plus.push(mixed);
                    minus.push(t);
                } else {
                    plus.push(t);
                    minus.push(mixed);
                }
            }
        }
        Ok(EigendistributionBasis { plus, minus })
    }

    pub fn verify_axioms(&self, dim: usize, samples: usize, seed: u64) -> Result<AxiomReport> {
        let frame = Frame::new(dim)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xi = self.xi(dim);
        let sign = match self.flavor {
            Flavor::Paracontact => 1.0,
            Flavor::Contact => -1.0,
        };
        let mut rep = AxiomReport {
            reeb: (self.eta(&xi) - 1.0).abs().max(self.phi_apply(&xi).norm()),
            ..AxiomReport::default()
        };
        for _ in 0..samples {
            let v = frame.random_vector(&mut rng);
            let w = frame.random_vector(&mut rng);
            let (pv, pw) = (self.phi_apply(&v), self.phi_apply(&w));
            let (ev, ew) = (self.eta(&v), self.eta(&w));
            let sq = &(&self.phi_apply(&pv) - &(sign * &v)) + &((sign * ev) * &xi);
            rep.phi_squared = rep.phi_squared.max(sq.norm());
            let comp = self.inner(&pv, &pw) + sign * (self.inner(&v, &w) - ev * ew);
            rep.compatibility = rep.compatibility.max(comp.abs());
            rep.eta_phi = rep.eta_phi.max(self.eta(&pv).abs());
            rep.skew = rep
                .skew
                .max((self.inner(&v, &pw) + self.inner(&pv, &w)).abs());
            rep.eta_metric = rep.eta_metric.max((ev - self.inner(&v, &xi)).abs());
        }
        Ok(rep)
    }

    pub(crate) fn check_connection(&self, model: &CurvatureModel, dims: &[usize]) -> Result<()> {
        for &d in dims {
            if d != model.dim() {
                return Err(GeometryError::DimensionMismatch {
                    expected: model.dim(),
                    found: d,
                });
            }
        }
        if self.params.a.abs() < ABS_TOL {
            return Err(GeometryError::Unsupported(
                "a = 0: connection and curvature are not evaluated".into(),
            ));
        }
        if self.params.trace().abs() < ABS_TOL || self.alpha().abs() < ABS_TOL {
            return Err(GeometryError::DegenerateMetric(
                "a+c+d = 0 or alpha = 0".into(),
            ));
        }
        Ok(())
    }

    /// The tensor `h = (1/2) L_xi phi`.
    ///
    /// For the paracontact flavor this is the closed form
    /// `hX^h = (1/4 alpha){-(a+c)(X - <X,u>u)^h + a(R_u X)^h - 2b(R_u X)^t}`,
    /// `hY^t = (1/4 alpha){-2b Y^h + (a+c) Y^t - a(R_u Y)^t}`.
    /// When `phi <= 0` the value is obtained through a D-homothetic deformation
    /// with `phi_t > 0` and mapped back by `h = t h_t`.
    pub fn h_apply(&self, model: &CurvatureModel, v: &T1MVector) -> Result<T1MVector> {
        match self.flavor {
            Flavor::Paracontact => {
                if self.params.phi() <= 0.0 {
                    let (st, t) = crate::deform::normalize_phi(self)?;
                    return Ok(t * &st.h_closed_form(model, v)?);
                }
                self.h_closed_form(model, v)
            }
            Flavor::Contact => {
                // Contact metric identity nabla xi = -phi - phi h.
                let dim = v.base_dim();
                let nx = self.nabla_xi(model, v)?;
                Ok(&(&self.phi_apply(&nx) - v) + &(self.eta(v) * &self.xi(dim)))
            }
        }
    }

    fn h_closed_form(&self, model: &CurvatureModel, v: &T1MVector) -> Result<T1MVector> {
        if model.dim() != v.base_dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: model.dim(),
                found: v.base_dim(),
            });
        }
        let MetricParams { a, b, c, .. } = self.params;
        let u = e(v.base_dim(), 0);
        let (x, y) = (v.h(), v.t());
        let rux = model.curvature(x, &u, &u);
        let ruy = model.curvature(y, &u, &u);
        let h_part = T1MVector::horizontal(perp(x) * -(a + c) + &rux * a)
            + T1MVector::tangential(&rux * (-2.0 * b));
        let t_part =
            T1MVector::horizontal(y * (-2.0 * b)) + T1MVector::tangential(y * (a + c) - &ruy * a);
        Ok((1.0 / (4.0 * self.alpha())) * (h_part + t_part))
    }

    /// Levi-Civita connection `nabla_V W` at the point.
    ///
    /// `W` is read as the lift of base vector fields whose covariant derivative
    /// vanishes at `x`, unless `base_deriv` supplies the lifted value of that
    /// derivative, which is then added.
    pub fn nabla(
        &self,
        model: &CurvatureModel,
        v: &T1MVector,
        w: &T1MVector,
        base_deriv: Option<&T1MVector>,
    ) -> Result<T1MVector> {
        self.check_connection(model, &[v.base_dim(), w.base_dim()])?;
        let mut out = self.nabla_hh(model, v.h(), w.h())
            + self.nabla_ht(model, v.h(), w.t())
            + self.nabla_th(model, v.t(), w.h());
        if let Some(dv) = base_deriv {
            out += dv.clone();
        }
        Ok(out)
    }

    /// `nabla_{X^h} Y^h`.
    fn nabla_hh(&self, model: &CurvatureModel, x: &BaseVector, y: &BaseVector) -> T1MVector {
        let MetricParams { a, b, c, d } = self.params;
        let (al, tr) = (self.alpha(), self.params.trace());
        let u = e(x.len(), 0);
        let r = |p: &BaseVector, q: &BaseVector, s: &BaseVector| model.curvature(p, q, s);
        let (xu, yu) = (x[0], y[0]);
        let rxuy = r(x, &u, y);
        let ryux = r(y, &u, x);
        let rxuyu = rxuy[0];
        let h = (&rxuy + &ryux) * (-a * b / (2.0 * al))
            + (y * xu + x * yu) * (b * d / (2.0 * al))
            + &u * (b / (tr * al) * ((a * d + b * b) * rxuyu - d * tr * xu * yu));
        let t = &rxuy * (b * b / al)
            - r(x, y, &u) * (a * (a + c) / (2.0 * al))
            - (x * yu + y * xu) * ((a + c) * d / (2.0 * al))
            + &u * ((-b * b * rxuyu + d * (a + c) * xu * yu) / al);
        self.ht(h, &t)
    }

    /// `nabla_{X^h} Y^t` for `Y` orthogonal to `u`.
    fn nabla_ht(&self, model: &CurvatureModel, x: &BaseVector, y: &BaseVector) -> T1MVector {
        let MetricParams { a, b, d, .. } = self.params;
        let (al, tr) = (self.alpha(), self.params.trace());
        let u = e(x.len(), 0);
        let ryux = model.curvature(y, &u, x);
        let rxuyu = model.curvature(x, &u, y)[0];
        let h = &ryux * (-a * a / (2.0 * al))
            + y * (a * d / (2.0 * al) * x[0])
            + &u * ((a * (a * d + b * b) * rxuyu + d * al * x.dot(y)) / (2.0 * tr * al));
        let t = &ryux * (a * b / (2.0 * al))
            - y * (b * d / (2.0 * al) * x[0])
            - &u * (a * b / (2.0 * al) * rxuyu);
        self.ht(h, &t)
    }

    /// `nabla_{X^t} Y^h` for `X` orthogonal to `u`.
    fn nabla_th(&self, model: &CurvatureModel, x: &BaseVector, y: &BaseVector) -> T1MVector {
        let MetricParams { a, b, d, .. } = self.params;
        let (al, tr) = (self.alpha(), self.params.trace());
        let u = e(x.len(), 0);
        let rxuy = model.curvature(x, &u, y);
        let rxuyu = rxuy[0];
        let h = &rxuy * (-a * a / (2.0 * al))
            + x * (a * d / (2.0 * al) * y[0])
            + &u * ((a * (a * d + b * b) * rxuyu + d * al * x.dot(y)) / (2.0 * tr * al));
        let t = &rxuy * (a * b / (2.0 * al))
            - x * (b * d / (2.0 * al) * y[0])
            - &u * (a * b / (2.0 * al) * rxuyu);
        self.ht(h, &t)
    }

    /// `nabla_V xi`.
    ///
    /// ```text
    /// nabla_{X^h} xi = (rho/2alpha){b d X' - a b R_u X}^h + (rho/2alpha){-(a+c) d X' + (b^2 - alpha) R_u X}^t
    /// nabla_{Y^t} xi = (rho/2alpha){(a d + 2alpha) Y - a^2 R_u Y}^h + (rho/2alpha){-b d Y + a b R_u Y}^t
    /// ```
    /// with `X' = X - <X,u>u`. Only the paracontact flavor uses this closed
    /// form; contact structures go through the connection.
    pub fn nabla_xi(&self, model: &CurvatureModel, v: &T1MVector) -> Result<T1MVector> {
        let dim = v.base_dim();
        self.check_connection(model, &[dim])?;
        if self.flavor == Flavor::Contact {
            return self.nabla_xi_from_connection(model, v);
        }
        let MetricParams { a, b, c, d } = self.params;
        let al = self.alpha();
        let u = e(dim, 0);
        let (x, y) = (perp(v.h()), v.t());
        let rux = model.curvature(&x, &u, &u);
        let ruy = model.curvature(y, &u, &u);
        let from_h = T1MVector::horizontal(&x * (b * d) - &rux * (a * b))
            + T1MVector::tangential(&x * (-(a + c) * d) + &rux * (b * b - al));
        let from_t = T1MVector::horizontal(y * (a * d + 2.0 * al) - &ruy * (a * a))
            + T1MVector::tangential(y * (-b * d) + &ruy * (a * b));
        Ok((self.rho / (2.0 * al)) * (from_h + from_t))
    }

    /// `nabla_V xi` from the general connection: `xi = rho u^h` with `u`
    /// varying along the fibre, so `nabla_{Y^t} u^h` picks up an extra `Y^h`.
    pub fn nabla_xi_from_connection(
        &self,
        model: &CurvatureModel,
        v: &T1MVector,
    ) -> Result<T1MVector> {
        let dim = v.base_dim();
        let uh = T1MVector::horizontal(e(dim, 0));
        let w = self.nabla(model, v, &uh, None)? + T1MVector::horizontal(v.t().clone());
        Ok(self.rho * w)
    }

    /// `(nabla_Z phi) W`.
    ///
    /// `W` is split as `eta(W) xi + X^h + Y^t` with `X, Y` orthogonal to `u`, the
    /// lifted fields being parallel at `x`. The `<X,u>` coefficients inside
    /// `phi(X^h)`, `phi(Y^t)` vanish at the point but their derivative along
    /// `Z^t` does not.
    pub fn nabla_phi(
        &self,
        model: &CurvatureModel,
        z: &T1MVector,
        w: &T1MVector,
    ) -> Result<T1MVector> {
        let dim = z.base_dim();
        self.check_connection(model, &[dim, w.base_dim()])?;
        let MetricParams { a, b, c, d } = self.params;
        let tr = self.params.trace();
        let k = 1.0 / (2.0 * self.rho * self.alpha());
        let u = e(dim, 0);
        let x = perp(w.h());
        let y = w.t().clone();
        let ew = self.eta(w);

        let nab = |p: &T1MVector| self.nabla(model, z, p, None);
        let xh = T1MVector::horizontal(x.clone());
        let xt = T1MVector::tangential(x.clone());
        let yh = T1MVector::horizontal(y.clone());
        let yt = T1MVector::tangential(y.clone());
        let dx = z.t().dot(&x);
        let dy = z.t().dot(&y);

        let d_phi_x = k
            * (&(&((-b) * &nab(&xh)?) + &((a + c) * &nab(&xt)?))
                + &T1MVector::horizontal(&u * (b * d / tr * dx)));
        let d_phi_y = k
            * (&(&((-a) * &nab(&yh)?) + &(b * &nab(&yt)?))
                + &T1MVector::horizontal(&u * (self.params.phi() / tr * dy)));
        let term_x = &d_phi_x - &self.phi_apply(&nab(&xh)?);
        let term_y = &d_phi_y - &self.phi_apply(&nab(&yt)?);
        let term_xi = (-ew) * &self.phi_apply(&self.nabla_xi(model, z)?);
        Ok(term_x + term_y + term_xi)
    }

    /// Residuals of the algebraic properties of `h` over the frame and samples.
    pub fn verify_h_properties(
        &self,
        model: &CurvatureModel,
        samples: usize,
        seed: u64,
    ) -> Result<HPropertiesReport> {
        let dim = model.dim();
        let frame = Frame::new(dim)?;
        let hm = {
            let basis = frame.basis();
            let mut cols = Vec::with_capacity(basis.len());
            for b in &basis {
                cols.push(self.h_apply(model, b)?.to_frame_coords());
            }
            DMatrix::from_columns(&cols)
        };
        let mut rep = HPropertiesReport {
            trace: hm.trace().abs(),
            h_xi: self.h_apply(model, &self.xi(dim))?.norm(),
            ..HPropertiesReport::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let v = frame.random_vector(&mut rng);
            let w = frame.random_vector(&mut rng);
            let hv = self.h_apply(model, &v)?;
            let hw = self.h_apply(model, &w)?;
            rep.self_adjoint = rep
                .self_adjoint
                .max((self.inner(&hv, &w) - self.inner(&v, &hw)).abs());
            rep.eta_h = rep.eta_h.max(self.eta(&hv).abs());
            let anti = &self.h_apply(model, &self.phi_apply(&v))? + &self.phi_apply(&hv);
            rep.anticommute = rep.anticommute.max(anti.norm());
        }
        Ok(rep)
    }
}
