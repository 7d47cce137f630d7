//! Riemann curvature of a g-natural metric on `T_1M` at the point `(x, u)`.
//!
//! Three families of components are given in closed form:
//! `R(X^h, Y^h)Z^h`, `R(X^h, Y^t)Z^h` and `R(X^t, Y^t)Z^t`. The lowered
//! tensor `R(i, j, k, l) = G(R(B_i, B_j)B_k, B_l)` in the adapted frame is
//! completed from them through the algebraic symmetries and the first Bianchi
//! identity, and the remaining symmetries are then checked numerically.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classify::kappa_mu;
use crate::curvature_models::CurvatureModel;
use crate::error::{GeometryError, Result};
use crate::frames::{e, gram_matrix, BaseVector, Frame, T1MVector};
use crate::gnatural::MetricParams;
use crate::paracontact::ParacontactStructure;

/// Symmetry residual above which an assembled tensor is rejected.
pub const SYMMETRY_TOL: f64 = 1e-6;
/// Smallest `|G(A,A)G(B,B) - G(A,B)^2|` accepted by [`sectional`].
pub const PLANE_TOL: f64 = 1e-10;
/// Rejection margin for samples in [`phi_sectional_profile`].
pub const SAMPLE_MARGIN: f64 = 1e-3;

struct Blocks<'a> {
    model: &'a CurvatureModel,
    s: &'a ParacontactStructure,
    u: BaseVector,
}

impl Blocks<'_> {
    fn r(&self, x: &BaseVector, y: &BaseVector, z: &BaseVector) -> BaseVector {
        self.model.curvature(x, y, z)
    }

    fn ru(&self, x: &BaseVector) -> BaseVector {
        self.r(x, &self.u, &self.u)
    }

    /// `R(X^h, Y^h)Z^h`.
    fn hhh(&self, x: &BaseVector, y: &BaseVector, z: &BaseVector) -> T1MVector {
        let MetricParams { a, b, c, d } = *self.s.params();
        let al = self.s.alpha();
        let tr = self.s.params().trace();
        let u = &self.u;
        let r = |p: &BaseVector, q: &BaseVector, w: &BaseVector| self.r(p, q, w);
        let (rux, ruy, ruz) = (self.ru(x), self.ru(y), self.ru(z));
        let (xu, yu, zu) = (x[0], y[0], z[0]);
        let ryuz = r(y, u, z);
        let rxuz = r(x, u, z);
        let rzuy = r(z, u, y);
        let rzux = r(z, u, x);
        let (ryuzu, rxuzu) = (ryuz[0], rxuz[0]);
        let ryzu = r(y, z, u);
        let rxzu = r(x, z, u);
        let rxyu = r(x, y, u);
        let rxyz = r(x, y, z);

        let quad = r(&ryzu, u, x) - r(&rxzu, u, y) - r(&rxyu, u, z) * 2.0;
        let swap = r(x, u, &ryuz) - r(y, u, &rxuz) + r(x, u, &rzuy) - r(y, u, &rzux);
        let lin = &rxyu * zu + &rxuz * yu - &ryuz * xu;
        let cx = -(a * d + b * b) / tr * ryuzu + d * yu * zu;
        let cy = -(a * d + b * b) / tr * rxuzu + d * xu * zu;
        let mixed = ryuzu * xu - rxuzu * yu;

        let vert = a * a * (ryzu.dot(&rux) - rxzu.dot(&ruy) - 2.0 * rxyu.dot(&ruz))
            + a * a * b * b / al * ((&ryuz + &rzuy).dot(&rux) - (&rxuz + &rzux).dot(&ruy))
            - (a * d * (b * b - al) / al + 4.0 * b * b - 2.0 * b * b * d / tr) * mixed
            - 3.0 * a * (a + c) * rxyz[0]
            + (a + c) * d * (xu * y.dot(z) - yu * x.dot(z));

        let h = &rxyz
            + &quad * (a * a / (4.0 * al))
            + &swap * (a * a * b * b / (4.0 * al * al))
            + &lin * (a * d * (al - b * b) / (4.0 * al * al))
            + &rux * (a * b * b / (2.0 * al * al) * cx)
            - &ruy * (a * b * b / (2.0 * al * al) * cy)
            + x * (d / (4.0 * al) * (-2.0 * b * b / tr * ryuzu + d * yu * zu))
            - y * (d / (4.0 * al) * (-2.0 * b * b / tr * rxuzu + d * xu * zu))
            + u * (d / (4.0 * al * tr) * vert);

        let quad_t = &quad - r(x, &ryuz, u) - r(x, &rzuy, u) + r(y, &rxuz, u) + r(y, &rzux, u);
        let t = &quad_t * (-a * b / (4.0 * al))
            - &swap * (a * b * b * b / (4.0 * al * al))
            - &lin * (b * d * (3.0 * al - b * b) / (4.0 * al * al))
            - &rux * (b * (b * b - al) / (2.0 * al * al) * cx)
            + &ruy * (b * (b * b - al) / (2.0 * al * al) * cy)
            + (x * ryuzu - y * rxuzu) * ((a + c) * b * d / (2.0 * al * tr));
        self.s.ht(h, &t)
    }

    /// `R(X^h, Y^t)Z^h` for `Y` orthogonal to `u`.
    fn hth(&self, x: &BaseVector, y: &BaseVector, z: &BaseVector) -> T1MVector {
        let MetricParams { a, b, c, d } = *self.s.params();
        let al = self.s.alpha();
        let tr = self.s.params().trace();
        let ph = self.s.params().phi();
        let u = &self.u;
        let r = |p: &BaseVector, q: &BaseVector, w: &BaseVector| self.r(p, q, w);
        let (rux, ruy) = (self.ru(x), self.ru(y));
        let (xu, zu) = (x[0], z[0]);
        let ryuz = r(y, u, z);
        let rxuz = r(x, u, z);
        let rzux = r(z, u, x);
        let (ryuzu, rxuzu) = (ryuz[0], rxuz[0]);
        let rxyz = r(x, y, z);
        let rzyx = r(z, y, x);
        let rxyu = r(x, y, u);
        let (yz, xy) = (y.dot(z), x.dot(y));

        let swap = r(x, u, &ryuz) - r(y, u, &rxuz) - r(y, u, &rzux);
        let lin = &ryuz * xu - &rxyu * zu;
        let cx = a * (a * d + b * b) * ryuzu + al * d * yz;
        let cy = (a * d + b * b) / tr * rxuzu - d * xu * zu;
        let cxx = a * ryuzu + (2.0 * (a + c) + d) * yz;

        let vert = a * a * a * b / al * (ryuz.dot(&rux) - (&rxuz + &rzux).dot(&ruy))
            + a * b * (-(al + ph) / al + d / tr) * xu * ryuzu
            - 2.0 * a * b * (2.0 * rxyz[0] + rzyx[0])
            + b * d * ((3.0 - d / tr) * xu * yz + 2.0 * zu * xy);

        let h = (&rxyz + &rzyx) * (a * b / (2.0 * al))
            + &swap * (a * a * a * b / (4.0 * al * al))
            + &lin * (a * a * b * d / (4.0 * al * al))
            - &rux * (a * b / (4.0 * al * al * tr) * cx)
            + &ruy * (a * a * b / (2.0 * al * al) * cy)
            - x * (b * d / (4.0 * al * tr) * cxx)
            + y * (b / al * (-(a * d + 2.0 * b * b) / (2.0 * tr) * rxuzu + d * xu * zu))
            - z * (b * d / (2.0 * al) * xy)
            + u * (d / (4.0 * al * tr) * vert);

        let t = r(x, &ryuz, u) * (a * a / (4.0 * al))
            - &swap * (a * a * b * b / (4.0 * al * al))
            - &rxyz * (b * b / al)
            + r(x, z, y) * (a * (a + c) / (2.0 * al))
            + &lin * (a * d * (al - b * b) / (4.0 * al * al))
            - &rux * ((al - b * b) / (4.0 * al * al * tr) * cx)
            - &ruy * (a * b * b / (2.0 * al * al) * cy)
            + x * ((a + c) * d / (4.0 * al * tr) * cxx)
            + y * (1.0 / (4.0 * al)
                * (2.0 * b * b * (2.0 - d / tr) * rxuzu - d * (4.0 * (a + c) + d) * xu * zu))
            + z * ((a + c) * d / (2.0 * al) * xy);
        self.s.ht(h, &t)
    }

    /// `R(X^t, Y^t)Z^t` for `X, Y, Z` orthogonal to `u`.
    fn ttt(&self, x: &BaseVector, y: &BaseVector, z: &BaseVector) -> T1MVector {
        let MetricParams { a, b, c, d } = *self.s.params();
        let al = self.s.alpha();
        let tr = self.s.params().trace();
        let ph = self.s.params().phi();
        let k = 1.0 / (2.0 * al * tr);
        let (yz, xz) = (y.dot(z), x.dot(z));
        let ja = self.ru(x) * yz - self.ru(y) * xz;
        let jb = x * yz - y * xz;
        let h = (&ja * (a * a * b) - &jb * (b * (al + ph))) * k;
        let t = (&ja * (-a * b * b) + &jb * ((a + c) * (al + ph) + al * d)) * k;
        self.s.ht(h, &t)
    }
}

/// Lowered curvature tensor of `T_1M` in the adapted frame.
#[derive(Clone, Debug)]
pub struct CurvatureT1M {
    base_dim: usize,
    dim: usize,
    r4: Vec<f64>,
    gram: DMatrix<f64>,
    gram_inv: DMatrix<f64>,
    symmetry_residual: f64,
}

/// Portable form of [`CurvatureT1M`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureDocument {
    pub params: MetricParams,
    pub rho: f64,
    pub model: String,
    pub base_dim: usize,
    pub symmetry_residual: f64,
    /// `r4[i][j][k][l] = G(R(B_i, B_j)B_k, B_l)`.
    pub r4: Vec<Vec<Vec<Vec<f64>>>>,
}

impl CurvatureT1M {
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.dim + j) * self.dim + k) * self.dim + l
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    /// Dimension `2n + 1` of `T_1M`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.r4[self.idx(i, j, k, l)]
    }

    /// Flat row-major table.
    pub fn table(&self) -> &[f64] {
        &self.r4
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Largest violation of the pair symmetries and the first Bianchi identity,
    /// relative to `max(1, max |R|)`.
    pub fn symmetry_residual(&self) -> f64 {
        self.symmetry_residual
    }

    /// `G(R(A, B)C, D)`.
    pub fn lowered(&self, a: &T1MVector, b: &T1MVector, c: &T1MVector, d: &T1MVector) -> f64 {
        let (a, b, c, d) = (
            a.to_frame_coords(),
            b.to_frame_coords(),
            c.to_frame_coords(),
            d.to_frame_coords(),
        );
        let n = self.dim;
        let mut sum = 0.0;
        for i in 0..n {
            if a[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if b[j] == 0.0 {
                    continue;
                }
                for k in 0..n {
                    if c[k] == 0.0 {
                        continue;
                    }
                    let w = a[i] * b[j] * c[k];
                    for l in 0..n {
                        sum += w * d[l] * self.get(i, j, k, l);
                    }
                }
            }
        }
        sum
    }

    /// `R(A, B)C`.
    pub fn apply(&self, a: &T1MVector, b: &T1MVector, c: &T1MVector) -> T1MVector {
        let (a, b, c) = (
            a.to_frame_coords(),
            b.to_frame_coords(),
            c.to_frame_coords(),
        );
        let n = self.dim;
        let mut low = DVector::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let w = a[i] * b[j] * c[k];
                    if w == 0.0 {
                        continue;
                    }
                    for l in 0..n {
                        low[l] += w * self.get(i, j, k, l);
                    }
                }
            }
        }
        T1MVector::from_frame_coords(&(&self.gram_inv * low)).expect("frame dimension is odd")
    }

    /// `K(A, B) = G(R(A,B)B, A)/(G(A,A)G(B,B) - G(A,B)^2)`.
    pub fn sectional(&self, a: &T1MVector, b: &T1MVector) -> Result<f64> {
        let (ca, cb) = (a.to_frame_coords(), b.to_frame_coords());
        let gaa = ca.dot(&(&self.gram * &ca));
        let gbb = cb.dot(&(&self.gram * &cb));
        let gab = ca.dot(&(&self.gram * &cb));
        let den = gaa * gbb - gab * gab;
        if den.abs() < PLANE_TOL {
            return Err(GeometryError::DegeneratePlane(den));
        }
        Ok(self.lowered(a, b, b, a) / den)
    }

    pub fn to_document(
        &self,
        s: &ParacontactStructure,
        model: &CurvatureModel,
    ) -> CurvatureDocument {
        let n = self.dim;
        let r4 = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n)
                            .map(|k| (0..n).map(|l| self.get(i, j, k, l)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        CurvatureDocument {
            params: *s.params(),
            rho: s.rho(),
            model: model.descriptor(),
            base_dim: self.base_dim,
            symmetry_residual: self.symmetry_residual,
            r4,
        }
    }
}

fn symmetry_residual(r: &[f64], n: usize) -> f64 {
    let at = |i: usize, j: usize, k: usize, l: usize| r[((i * n + j) * n + k) * n + l];
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let v = at(i, j, k, l);
                    scale = scale.max(v.abs());
                    worst = worst
                        .max((v + at(j, i, k, l)).abs())
                        .max((v + at(i, j, l, k)).abs())
                        .max((v - at(k, l, i, j)).abs())
                        .max((v + at(j, k, i, l) + at(k, i, j, l)).abs());
                }
            }
        }
    }
    worst / scale
}

/// Assembles the lowered curvature tensor at `(x, u)`.
///
/// Fails with [`GeometryError::Inconsistent`] when the completed tensor
/// violates its symmetries by more than [`SYMMETRY_TOL`].
pub fn assemble_r4(s: &ParacontactStructure, model: &CurvatureModel) -> Result<CurvatureT1M> {
    let base_dim = model.dim();
    s.check_connection(model, &[base_dim])?;
    let frame = Frame::new(base_dim)?;
    let basis = frame.basis();
    let n = basis.len();
    let horiz: Vec<bool> = (0..n).map(Frame::is_horizontal).collect();
    let params = *s.params();
    let gram = gram_matrix(&params, &frame);
    let gram_inv = gram
        .clone()
        .try_inverse()
        .ok_or_else(|| GeometryError::DegenerateMetric("Gram matrix is singular".into()))?;
    let blocks = Blocks {
        model,
        s,
        u: e(base_dim, 0),
    };

    let idx = |i: usize, j: usize, k: usize, l: usize| ((i * n + j) * n + k) * n + l;
    let mut r: Vec<Option<f64>> = vec![None; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (bi, bj, bk) = (&basis[i], &basis[j], &basis[k]);
                let out = match (horiz[i], horiz[j], horiz[k]) {
                    (true, true, true) => blocks.hhh(bi.h(), bj.h(), bk.h()),
                    (true, false, true) => blocks.hth(bi.h(), bj.t(), bk.h()),
                    (false, true, true) => -blocks.hth(bj.h(), bi.t(), bk.h()),
                    (false, false, false) => blocks.ttt(bi.t(), bj.t(), bk.t()),
                    _ => continue,
                };
                let low = &gram * out.to_frame_coords();
                for l in 0..n {
                    r[idx(i, j, k, l)] = Some(low[l]);
                }
            }
        }
    }

    let fill_by_symmetry = |r: &mut Vec<Option<f64>>| loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        if r[idx(i, j, k, l)].is_some() {
                            continue;
                        }
                        let v = r[idx(k, l, i, j)]
                            .or_else(|| r[idx(l, k, i, j)].map(|v| -v))
                            .or_else(|| r[idx(k, l, j, i)].map(|v| -v))
                            .or_else(|| r[idx(j, i, k, l)].map(|v| -v))
                            .or_else(|| r[idx(i, j, l, k)].map(|v| -v));
                        if v.is_some() {
                            r[idx(i, j, k, l)] = v;
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    };
    fill_by_symmetry(&mut r);
    // R(X^h, Y^h, Z^t, W^t) from the first Bianchi identity.
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    if r[idx(i, j, k, l)].is_some() {
                        continue;
                    }
                    if let (Some(p), Some(q)) = (r[idx(j, k, i, l)], r[idx(k, i, j, l)]) {
                        r[idx(i, j, k, l)] = Some(-p - q);
                    }
                }
            }
        }
    }
    fill_by_symmetry(&mut r);

    let missing = r.iter().filter(|v| v.is_none()).count();
    if missing > 0 {
        return Err(GeometryError::Inconsistent {
            what: format!("curvature assembly left {missing} components undetermined"),
            residual: f64::NAN,
        });
    }
    let r4: Vec<f64> = r.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect();
    let residual = symmetry_residual(&r4, n);
    if residual.is_nan() || residual > SYMMETRY_TOL {
        return Err(GeometryError::Inconsistent {
            what: "curvature symmetries".into(),
            residual,
        });
    }
    Ok(CurvatureT1M {
        base_dim,
        dim: n,
        r4,
        gram,
        gram_inv,
        symmetry_residual: residual,
    })
}

/// `R(A, B)C`. Assembles the full tensor; prefer [`CurvatureT1M::apply`] in loops.
pub fn rcurv(
    s: &ParacontactStructure,
    model: &CurvatureModel,
    a: &T1MVector,
    b: &T1MVector,
    c: &T1MVector,
) -> Result<T1MVector> {
    for v in [a, b, c] {
        if v.base_dim() != model.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: model.dim(),
                found: v.base_dim(),
            });
        }
    }
    Ok(assemble_r4(s, model)?.apply(a, b, c))
}

/// Sectional curvature of the plane spanned by `A` and `B`.
pub fn sectional(
    s: &ParacontactStructure,
    model: &CurvatureModel,
    a: &T1MVector,
    b: &T1MVector,
) -> Result<f64> {
    assemble_r4(s, model)?.sectional(a, b)
}

/// Statistics of `K(X, phi X)` over random `X` orthogonal to `xi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiSectionalProfile {
    pub mean: f64,
    pub variance: f64,
    pub min: f64,
    pub max: f64,
    pub samples: usize,
    /// Largest deviation from
    /// `K(X, phi X) = 2mu - 1 - ((kappa - 1 + mu)/(kappa + 1))(G(hX,X)^2 - G(phi hX,X)^2)/G(X,X)^2`,
    /// evaluated on bases of constant curvature with `kappa != -1`.
    pub formula_residual: Option<f64>,
}

/// Samples `K(X, phi X)` with `X` in `ker eta`, rejecting samples whose
/// `|G(X,X)|` or plane determinant falls below [`SAMPLE_MARGIN`].
pub fn phi_sectional_profile(
    s: &ParacontactStructure,
    model: &CurvatureModel,
    samples: usize,
    seed: u64,
) -> Result<PhiSectionalProfile> {
    let curv = assemble_r4(s, model)?;
    let dim = model.dim();
    let frame = Frame::new(dim)?;
    let xi = s.xi(dim);
    let km = model.constant_curvature().map(|cbar| kappa_mu(s, cbar));
    let km = km.filter(|k| (k.kappa + 1.0).abs() > 1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(samples);
    let mut residual: f64 = 0.0;
    let mut attempts = 0usize;
    while values.len() < samples {
        attempts += 1;
        if attempts > 1000 * samples.max(1) {
            return Err(GeometryError::Inconsistent {
                what: "phi-sectional sampling rejected every sample".into(),
                residual: f64::NAN,
            });
        }
        let v = frame.random_vector(&mut rng);
        let x = &v - &(s.eta(&v) * &xi);
        let px = s.phi_apply(&x);
        let gxx = s.inner(&x, &x);
        let den = gxx * s.inner(&px, &px) - s.inner(&x, &px).powi(2);
        if gxx.abs() < SAMPLE_MARGIN || den.abs() < SAMPLE_MARGIN {
            continue;
        }
        let k = curv.lowered(&x, &px, &px, &x) / den;
        if let Some(km) = km {
            let hx = s.h_apply(model, &x)?;
            let ghx = s.inner(&hx, &x);
            let gphx = s.inner(&s.phi_apply(&hx), &x);
            let formula = 2.0 * km.mu
                - 1.0
                - (km.kappa - 1.0 + km.mu) / (km.kappa + 1.0) * (ghx * ghx - gphx * gphx)
                    / (gxx * gxx);
            residual = residual.max((k - formula).abs() / k.abs().max(1.0));
        }
        values.push(k);
    }
    let count = values.len().max(1) as f64;
    let mean = values.iter().sum::<f64>() / count;
    let variance = values.iter().map(|k| (k - mean).powi(2)).sum::<f64>() / count;
    Ok(PhiSectionalProfile {
        mean,
        variance,
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        samples: values.len(),
        formula_residual: km.map(|_| residual),
    })
}
