//! Curvature of the base manifold at a point.
//!
//! Only locally symmetric bases are modelled, so `nabla R = 0` throughout.
//! The sign convention is `R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]`, under which
//! the round sphere has `R(X,Y)Z = <Y,Z>X - <X,Z>Y`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::frames::BaseVector;

/// Relative gap below which Jacobi eigenvalues are merged into one cluster.
pub const SPECTRUM_GAP: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq)]
pub enum ModelKind {
    ConstantCurvature {
        cbar: f64,
    },
    /// Holomorphic sectional curvature `chol`; `j` is the complex structure in the frame.
    ComplexSpaceForm {
        chol: f64,
        j: DMatrix<f64>,
    },
    /// `r4[((i*N + j)*N + k)*N + l] = <R(e_i, e_j) e_k, e_l>`.
    Explicit {
        r4: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureModel {
    dim: usize,
    kind: ModelKind,
}

/// On-disk form of an explicit model.
#[derive(Debug, Serialize, Deserialize)]
pub struct ExplicitDocument {
    pub dim: usize,
    #[serde(rename = "R4")]
    pub r4: Vec<Vec<Vec<Vec<f64>>>>,
}

/// The complex structure with `J e_{2k} = e_{2k+1}`, so that `J u = e_1`.
pub fn standard_complex_structure(dim: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(dim, dim);
    for k in (0..dim).step_by(2) {
        j[(k + 1, k)] = 1.0;
        j[(k, k + 1)] = -1.0;
    }
    j
}

impl CurvatureModel {
    pub fn constant(dim: usize, cbar: f64) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            kind: ModelKind::ConstantCurvature { cbar },
        })
    }

    pub fn complex_space_form(dim: usize, chol: f64) -> Result<Self> {
        check_dim(dim)?;
        if dim % 2 != 0 {
            return Err(GeometryError::InvalidModel(format!(
                "complex space form needs even dimension, got {dim}"
            )));
        }
        Self::complex_space_form_with(chol, standard_complex_structure(dim))
    }

    pub fn complex_space_form_with(chol: f64, j: DMatrix<f64>) -> Result<Self> {
        let dim = j.nrows();
        check_dim(dim)?;
        if dim % 2 != 0 || j.ncols() != dim {
            return Err(GeometryError::InvalidModel(
                "complex structure must be square of even size".into(),
            ));
        }
        let id = DMatrix::<f64>::identity(dim, dim);
        let orth = (j.transpose() * &j - &id).amax();
        let square = (&j * &j + &id).amax();
        if orth > 1e-12 || square > 1e-12 {
            return Err(GeometryError::InvalidModel(format!(
                "J must be orthogonal with J^2 = -I (residuals {orth:e}, {square:e})"
            )));
        }
        Ok(Self {
            dim,
            kind: ModelKind::ComplexSpaceForm { chol, j },
        })
    }

    /// An explicit algebraic curvature tensor, validated for the curvature
    /// symmetries and for `R . R = 0`, the pointwise trace of `nabla R = 0`.
    pub fn explicit(dim: usize, r4: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        if r4.len() != dim.pow(4) {
            return Err(GeometryError::InvalidModel(format!(
                "expected {} components, got {}",
                dim.pow(4),
                r4.len()
            )));
        }
        let model = Self {
            dim,
            kind: ModelKind::Explicit { r4 },
        };
        model.validate_explicit()?;
        Ok(model)
    }

    pub fn from_document(doc: ExplicitDocument) -> Result<Self> {
        let n = doc.dim;
        let mut flat = Vec::with_capacity(n.pow(4));
        let bad = || GeometryError::InvalidModel("R4 must be a dim^4 nested array".into());
        if doc.r4.len() != n {
            return Err(bad());
        }
        for a in &doc.r4 {
            if a.len() != n {
                return Err(bad());
            }
            for b in a {
                if b.len() != n {
                    return Err(bad());
                }
                for c in b {
                    if c.len() != n {
                        return Err(bad());
                    }
                    flat.extend_from_slice(c);
                }
            }
        }
        Self::explicit(n, flat)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_document(serde_json::from_str(text)?)
    }

    pub fn to_document(&self) -> ExplicitDocument {
        let n = self.dim;
        let t = self.r4_table();
        let r4 = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n)
                            .map(|k| (0..n).map(|l| t[idx(n, i, j, k, l)]).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        ExplicitDocument { dim: n, r4 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    /// `Some(cbar)` for constant-curvature models.
    pub fn constant_curvature(&self) -> Option<f64> {
        match self.kind {
            ModelKind::ConstantCurvature { cbar } => Some(cbar),
            _ => None,
        }
    }

    /// Short textual form, as accepted on the command line.
    pub fn descriptor(&self) -> String {
        match &self.kind {
            ModelKind::ConstantCurvature { cbar } => format!("const:{cbar}"),
            ModelKind::ComplexSpaceForm { chol, .. } => format!("cpx:{chol}"),
            ModelKind::Explicit { .. } => "explicit".into(),
        }
    }

    /// `R(X,Y)Z`. Panics if the vectors do not have the model's dimension.
    pub fn curvature(&self, x: &BaseVector, y: &BaseVector, z: &BaseVector) -> BaseVector {
        assert!(
            x.len() == self.dim && y.len() == self.dim && z.len() == self.dim,
            "vector dimension does not match curvature model"
        );
        match &self.kind {
            ModelKind::ConstantCurvature { cbar } => (x * y.dot(z) - y * x.dot(z)) * *cbar,
            ModelKind::ComplexSpaceForm { chol, j } => {
                let (jx, jy, jz) = (j * x, j * y, j * z);
                let out = x * y.dot(z) - y * x.dot(z) + &jx * jy.dot(z)
                    - &jy * jx.dot(z)
                    - jz * (2.0 * jx.dot(y));
                out * (chol / 4.0)
            }
            ModelKind::Explicit { r4 } => {
                let n = self.dim;
                let mut out = DVector::zeros(n);
                for i in 0..n {
                    if x[i] == 0.0 {
                        continue;
                    }
                    for jj in 0..n {
                        let xy = x[i] * y[jj];
                        if xy == 0.0 {
                            continue;
                        }
                        for k in 0..n {
                            let xyz = xy * z[k];
                            if xyz == 0.0 {
                                continue;
                            }
                            for l in 0..n {
                                out[l] += xyz * r4[idx(n, i, jj, k, l)];
                            }
                        }
                    }
                }
                out
            }
        }
    }

    /// Jacobi operator `R_u X = R(X,u)u`.
    pub fn jacobi(&self, u: &BaseVector, x: &BaseVector) -> Result<BaseVector> {
        check_unit(u)?;
        Ok(self.curvature(x, u, u))
    }

    /// Eigenvalues of `R_u` on `u^perp`, ascending, with multiplicities.
    pub fn jacobi_spectrum(&self, u: &BaseVector) -> Result<Vec<(f64, usize)>> {
        check_unit(u)?;
        let n = self.dim;
        let basis = perp_basis(u);
        let m = DMatrix::from_fn(n - 1, n - 1, |i, j| {
            self.curvature(&basis[i], u, u).dot(&basis[j])
        });
        let sym = (&m + m.transpose()) * 0.5;
        let mut eig: Vec<f64> = SymmetricEigen::new(sym)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        eig.sort_by(f64::total_cmp);
        Ok(cluster(&eig))
    }

    /// All components `<R(e_i,e_j)e_k, e_l>`, flattened row-major.
    pub fn r4_table(&self) -> Vec<f64> {
        if let ModelKind::Explicit { r4 } = &self.kind {
            return r4.clone();
        }
        let n = self.dim;
        let basis: Vec<BaseVector> = (0..n).map(|i| crate::frames::e(n, i)).collect();
        let mut out = vec![0.0; n.pow(4)];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let r = self.curvature(&basis[i], &basis[j], &basis[k]);
                    for l in 0..n {
                        out[idx(n, i, j, k, l)] = r[l];
                    }
                }
            }
        }
        out
    }

    fn validate_explicit(&self) -> Result<()> {
        let n = self.dim;
        let r = self.r4_table();
        let scale = r.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let tol = 1e-9 * scale;
        let mut worst = (0.0, "");
        let mut note = |res: f64, what: &'static str| {
            if res > worst.0 {
                worst = (res, what);
            }
        };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = r[idx(n, i, j, k, l)];
                        note(
                            (v + r[idx(n, j, i, k, l)]).abs(),
                            "antisymmetry in the first pair",
                        );
                        note(
                            (v + r[idx(n, i, j, l, k)]).abs(),
                            "antisymmetry in the second pair",
                        );
                        note((v - r[idx(n, k, l, i, j)]).abs(), "pair symmetry");
                        let bianchi = v + r[idx(n, j, k, i, l)] + r[idx(n, k, i, j, l)];
                        note(bianchi.abs(), "first Bianchi identity");
                    }
                }
            }
        }
        if worst.0 > tol {
            return Err(GeometryError::InvalidModel(format!(
                "{} fails with residual {:e}",
                worst.1, worst.0
            )));
        }
        let semi = self.semi_symmetry_residual();
        if semi > 1e-9 * scale * scale {
            return Err(GeometryError::InvalidModel(format!(
                "R.R = 0 fails (residual {semi:e}); the tensor cannot come from a locally symmetric space"
            )));
        }
        Ok(())
    }

    /// `max |(R(X,Y).R)(Z,W)V|` over frame vectors.
    fn semi_symmetry_residual(&self) -> f64 {
        let n = self.dim;
        let e: Vec<BaseVector> = (0..n).map(|i| crate::frames::e(n, i)).collect();
        let r = |x: &BaseVector, y: &BaseVector, z: &BaseVector| self.curvature(x, y, z);
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in (a + 1)..n {
                for i in 0..n {
                    for j in (i + 1)..n {
                        for k in 0..n {
                            let rab = |v: &BaseVector| r(&e[a], &e[b], v);
                            let lhs = rab(&r(&e[i], &e[j], &e[k]))
                                - r(&rab(&e[i]), &e[j], &e[k])
                                - r(&e[i], &rab(&e[j]), &e[k])
                                - r(&e[i], &e[j], &rab(&e[k]));
                            worst = worst.max(lhs.amax());
                        }
                    }
                }
            }
        }
        worst
    }
}

fn idx(n: usize, i: usize, j: usize, k: usize, l: usize) -> usize {
    ((i * n + j) * n + k) * n + l
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(GeometryError::InvalidDimension(dim));
    }
    Ok(())
}

fn check_unit(u: &BaseVector) -> Result<()> {
    let sq = u.norm_squared();
    if (sq - 1.0).abs() > 1e-9 {
        return Err(GeometryError::NonUnit(sq));
    }
    Ok(())
}

/// Orthonormal basis of `u^perp` from the Householder reflection taking `u` to `e_0`.
fn perp_basis(u: &BaseVector) -> Vec<BaseVector> {
    let n = u.len();
    let mut v = u.clone();
    v[0] -= 1.0;
    let vv = v.norm_squared();
    (1..n)
        .map(|i| {
            let ei = crate::frames::e(n, i);
            if vv < 1e-24 {
                ei
            } else {
                &ei - &v * (2.0 * v[i] / vv)
            }
        })
        .collect()
}

/// Groups sorted eigenvalues whose consecutive gaps are below `SPECTRUM_GAP`.
fn cluster(sorted: &[f64]) -> Vec<(f64, usize)> {
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for &v in sorted {
        match groups.last_mut() {
            Some(g) if (v - g[g.len() - 1]).abs() <= SPECTRUM_GAP * v.abs().max(1.0) => g.push(v),
            _ => groups.push(vec![v]),
        }
    }
    groups
        .into_iter()
        .map(|g| (g.iter().sum::<f64>() / g.len() as f64, g.len()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::e;

    #[test]
    fn flat_is_zero() {
        let m = CurvatureModel::constant(3, 0.0).unwrap();
        assert_eq!(m.curvature(&e(3, 1), &e(3, 0), &e(3, 2)).norm(), 0.0);
    }

    #[test]
    fn constant_examples() {
        let m = CurvatureModel::constant(3, -1.0).unwrap();
        assert_eq!(m.curvature(&e(3, 1), &e(3, 0), &e(3, 0)), -e(3, 1));
        let m = CurvatureModel::constant(4, 0.7).unwrap();
        assert_eq!(m.jacobi(&e(4, 0), &e(4, 2)).unwrap(), e(4, 2) * 0.7);
        assert_eq!(m.jacobi(&e(4, 0), &e(4, 0)).unwrap().norm(), 0.0);
        let spec = m.jacobi_spectrum(&e(4, 0)).unwrap();
        assert_eq!(spec.len(), 1);
        assert!((spec[0].0 - 0.7).abs() < 1e-14 && spec[0].1 == 3);
    }

    #[test]
    fn complex_examples() {
        let m = CurvatureModel::complex_space_form(4, -4.0).unwrap();
        assert_eq!(m.curvature(&e(4, 1), &e(4, 0), &e(4, 0)), -e(4, 1) * 4.0);
        assert_eq!(m.jacobi(&e(4, 0), &e(4, 2)).unwrap(), -e(4, 2));
        let spec = m.jacobi_spectrum(&e(4, 0)).unwrap();
        assert_eq!(spec.len(), 2);
        assert!((spec[0].0 + 4.0).abs() < 1e-12 && spec[0].1 == 1);
        assert!((spec[1].0 + 1.0).abs() < 1e-12 && spec[1].1 == 2);
        assert!(CurvatureModel::complex_space_form(3, -4.0).is_err());
    }

    #[test]
    fn spectrum_in_rotated_direction() {
        let m = CurvatureModel::complex_space_form(6, 2.0).unwrap();
        let u = DVector::from_vec(vec![0.5, -0.5, 0.5, 0.5, 0.0, 0.0]);
        let spec = m.jacobi_spectrum(&u).unwrap();
        assert_eq!(spec.len(), 2);
        assert!((spec[0].0 - 0.5).abs() < 1e-12 && spec[0].1 == 4);
        assert!((spec[1].0 - 2.0).abs() < 1e-12 && spec[1].1 == 1);
        assert!(m.jacobi_spectrum(&(u * 2.0)).is_err());
    }

    #[test]
    fn explicit_roundtrip_and_flat() {
        let m = CurvatureModel::complex_space_form(4, -1.3).unwrap();
        let text = serde_json::to_string(&m.to_document()).unwrap();
        let back = CurvatureModel::from_json(&text).unwrap();
        assert_eq!(back.r4_table(), m.r4_table());
        let flat = CurvatureModel::explicit(3, vec![0.0; 81]).unwrap();
        assert_eq!(flat.jacobi_spectrum(&e(3, 0)).unwrap(), vec![(0.0, 2)]);
    }

    #[test]
    fn explicit_rejects_bad_tensors() {
        let mut r = vec![0.0; 81];
        r[idx(3, 0, 1, 0, 1)] = 1.0;
        assert!(CurvatureModel::explicit(3, r).is_err());
        assert!(CurvatureModel::explicit(3, vec![0.0; 80]).is_err());
    }

    #[test]
    fn explicit_rejects_non_symmetric_curvature() {
        // Algebraic curvature tensor of diagonal type with distinct sectional
        // curvatures; it satisfies every symmetry but not R.R = 0.
        let n: usize = 3;
        let k = [1.0, 2.0, 5.0];
        let mut r = vec![0.0; n.pow(4)];
        let mut set = |i: usize, j: usize, v: f64| {
            r[idx(n, i, j, j, i)] = v;
            r[idx(n, j, i, i, j)] = v;
            r[idx(n, i, j, i, j)] = -v;
            r[idx(n, j, i, j, i)] = -v;
        };
        set(0, 1, k[0]);
        set(0, 2, k[1]);
        set(1, 2, k[2]);
        let err = CurvatureModel::explicit(n, r).unwrap_err();
        assert!(err.to_string().contains("R.R"), "{err}");
    }
}
