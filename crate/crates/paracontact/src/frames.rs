//! Pointwise linear algebra at a point `(x, u)` of `T_1M`.
//!
//! Every vector of the base lives in an orthonormal frame `{e_0 = u, e_1, ..., e_n}`
//! at `x`. A tangent vector of `T_1M` is written `X^h + Y^t` with `Y` orthogonal
//! to `u`, which in coordinates means `t[0] == 0`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::gnatural::MetricParams;
use crate::ABS_TOL;

/// Components of a base tangent vector in the adapted orthonormal frame.
pub type BaseVector = DVector<f64>;

pub fn base_inner(x: &BaseVector, y: &BaseVector) -> Result<f64> {
    check_dim(x.len(), y.len())?;
    Ok(x.dot(y))
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(GeometryError::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// The `i`-th frame vector; `e(dim, 0)` is `u`.
pub fn e(dim: usize, i: usize) -> BaseVector {
    let mut v = DVector::zeros(dim);
    v[i] = 1.0;
    v
}

/// `X - <X,u>u`.
pub fn perp(x: &BaseVector) -> BaseVector {
    let mut out = x.clone();
    out[0] = 0.0;
    out
}

/// A tangent vector `X^h + Y^t` of `T_1M` at `(x, u)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct T1MVector {
    h: BaseVector,
    t: BaseVector,
}

impl T1MVector {
    pub fn new(h: BaseVector, t: BaseVector) -> Result<Self> {
        check_dim(h.len(), t.len())?;
        if h.len() < 2 {
            return Err(GeometryError::InvalidDimension(h.len()));
        }
        if t[0] != 0.0 {
            return Err(GeometryError::NotTangential(t[0]));
        }
        Ok(Self { h, t })
    }

    /// Builds from raw parts, dropping any `u` component of `t`.
    pub(crate) fn from_parts(h: BaseVector, mut t: BaseVector) -> Self {
        debug_assert_eq!(h.len(), t.len());
        t[0] = 0.0;
        Self { h, t }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            h: DVector::zeros(dim),
            t: DVector::zeros(dim),
        }
    }

    pub fn horizontal(x: BaseVector) -> Self {
        let dim = x.len();
        Self {
            h: x,
            t: DVector::zeros(dim),
        }
    }

    /// `Y^t` for `Y` orthogonal to `u`; the `u` component of `y` is discarded.
    pub fn tangential(y: BaseVector) -> Self {
        let dim = y.len();
        Self::from_parts(DVector::zeros(dim), y)
    }

    pub fn h(&self) -> &BaseVector {
        &self.h
    }

    pub fn t(&self) -> &BaseVector {
        &self.t
    }

    /// Dimension of the base, `n + 1`.
    pub fn base_dim(&self) -> usize {
        self.h.len()
    }

    pub fn norm(&self) -> f64 {
        (self.h.norm_squared() + self.t.norm_squared()).sqrt()
    }

    /// Coordinates in the frame `{u^h, e_1^h, e_1^t, ..., e_n^h, e_n^t}`.
    pub fn to_frame_coords(&self) -> DVector<f64> {
        let dim = self.base_dim();
        let mut out = DVector::zeros(2 * dim - 1);
        out[0] = self.h[0];
        for i in 1..dim {
            out[2 * i - 1] = self.h[i];
            out[2 * i] = self.t[i];
        }
        out
    }

    pub fn from_frame_coords(coords: &DVector<f64>) -> Result<Self> {
        let len = coords.len();
        if len < 3 || len % 2 == 0 {
            return Err(GeometryError::InvalidDimension(len));
        }
        let dim = len.div_ceil(2);
        let mut h = DVector::zeros(dim);
        let mut t = DVector::zeros(dim);
        h[0] = coords[0];
        for i in 1..dim {
            h[i] = coords[2 * i - 1];
            t[i] = coords[2 * i];
        }
        Ok(Self { h, t })
    }
}

impl Add for T1MVector {
    type Output = T1MVector;
    fn add(self, rhs: T1MVector) -> T1MVector {
        T1MVector {
            h: self.h + rhs.h,
            t: self.t + rhs.t,
        }
    }
}

impl Add<&T1MVector> for &T1MVector {
    type Output = T1MVector;
    fn add(self, rhs: &T1MVector) -> T1MVector {
        T1MVector {
            h: &self.h + &rhs.h,
            t: &self.t + &rhs.t,
        }
    }
}

impl AddAssign for T1MVector {
    fn add_assign(&mut self, rhs: T1MVector) {
        self.h += rhs.h;
        self.t += rhs.t;
    }
}

impl Sub for T1MVector {
    type Output = T1MVector;
    fn sub(self, rhs: T1MVector) -> T1MVector {
        T1MVector {
            h: self.h - rhs.h,
            t: self.t - rhs.t,
        }
    }
}

impl Sub<&T1MVector> for &T1MVector {
    type Output = T1MVector;
    fn sub(self, rhs: &T1MVector) -> T1MVector {
        T1MVector {
            h: &self.h - &rhs.h,
            t: &self.t - &rhs.t,
        }
    }
}

impl Neg for T1MVector {
    type Output = T1MVector;
    fn neg(self) -> T1MVector {
        T1MVector {
            h: -self.h,
            t: -self.t,
        }
    }
}

impl Mul<T1MVector> for f64 {
    type Output = T1MVector;
    fn mul(self, v: T1MVector) -> T1MVector {
        T1MVector {
            h: v.h * self,
            t: v.t * self,
        }
    }
}

impl Mul<&T1MVector> for f64 {
    type Output = T1MVector;
    fn mul(self, v: &T1MVector) -> T1MVector {
        T1MVector {
            h: &v.h * self,
            t: &v.t * self,
        }
    }
}

/// The adapted frame at `(x, u)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    base_dim: usize,
}

impl Frame {
    pub fn new(base_dim: usize) -> Result<Self> {
        if base_dim < 2 {
            return Err(GeometryError::InvalidDimension(base_dim));
        }
        Ok(Self { base_dim })
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    /// `2n + 1`.
    pub fn dim(&self) -> usize {
        2 * self.base_dim - 1
    }

    pub fn u(&self) -> BaseVector {
        e(self.base_dim, 0)
    }

    pub fn e(&self, i: usize) -> BaseVector {
        e(self.base_dim, i)
    }

    /// `{u^h, e_1^h, e_1^t, ..., e_n^h, e_n^t}`.
    pub fn basis(&self) -> Vec<T1MVector> {
        let mut out = Vec::with_capacity(self.dim());
        out.push(T1MVector::horizontal(self.u()));
        for i in 1..self.base_dim {
            out.push(T1MVector::horizontal(self.e(i)));
            out.push(T1MVector::tangential(self.e(i)));
        }
        out
    }

    /// Whether the `k`-th basis vector is horizontal.
    pub fn is_horizontal(k: usize) -> bool {
        k == 0 || k % 2 == 1
    }

    /// A vector with frame components uniform in `[-1, 1]`.
    pub fn random_vector<R: Rng + ?Sized>(&self, rng: &mut R) -> T1MVector {
        let coords = DVector::from_fn(self.dim(), |_, _| rng.random_range(-1.0..=1.0));
        T1MVector::from_frame_coords(&coords).expect("frame dimension is odd and at least 3")
    }
}

/// `G(V, W)` for the g-natural metric with constants `params`.
pub fn t1m_inner(params: &MetricParams, v: &T1MVector, w: &T1MVector) -> f64 {
    let MetricParams { a, b, c, d } = *params;
    (a + c) * v.h.dot(&w.h)
        + d * (v.h[0] * w.h[0])
        + b * (v.h.dot(&w.t) + v.t.dot(&w.h))
        + a * v.t.dot(&w.t)
}

/// `X^{t_G} = (X - <X,u>u)^t + (b/(a+c+d)) <X,u> u^h` for an arbitrary base vector `X`.
pub fn tangential_lift(params: &MetricParams, x: &BaseVector) -> Result<T1MVector> {
    let trace = params.trace();
    if trace.abs() < ABS_TOL {
        return Err(GeometryError::DegenerateDirection);
    }
    Ok(lift_unchecked(params.b / trace, x))
}

/// Tangential lift with the ratio `b/(a+c+d)` already computed.
pub(crate) fn lift_unchecked(ratio: f64, x: &BaseVector) -> T1MVector {
    let mut h = DVector::zeros(x.len());
    h[0] = ratio * x[0];
    T1MVector::from_parts(h, x.clone())
}

/// Gram matrix of `t1m_inner` in the adapted frame.
pub fn gram_matrix(params: &MetricParams, frame: &Frame) -> DMatrix<f64> {
    let basis = frame.basis();
    let n = basis.len();
    DMatrix::from_fn(n, n, |i, j| t1m_inner(params, &basis[i], &basis[j]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_inner_examples() {
        let f = Frame::new(3).unwrap();
        assert_eq!(base_inner(&f.e(1), &f.e(1)).unwrap(), 1.0);
        assert_eq!(base_inner(&f.e(1), &f.e(2)).unwrap(), 0.0);
        let x = DVector::from_vec(vec![1.0, 2.0, 0.0]);
        let y = DVector::from_vec(vec![3.0, 0.0, 4.0]);
        assert_eq!(base_inner(&x, &y).unwrap(), 3.0);
        assert!(base_inner(&x, &f.e(1).rows(0, 2).into_owned()).is_err());
    }

    #[test]
    fn inner_examples() {
        let f = Frame::new(3).unwrap();
        let p = MetricParams::new(1.0, 0.0, -2.0, 5.0);
        let uh = T1MVector::horizontal(f.u());
        assert_eq!(t1m_inner(&p, &uh, &uh), 4.0);
        let e1h = T1MVector::horizontal(f.e(1));
        let e1t = T1MVector::tangential(f.e(1));
        assert_eq!(t1m_inner(&p, &e1h, &e1t), 0.0);
        let q = MetricParams::new(1.0, 2.0, 0.0, 11.0);
        assert_eq!(t1m_inner(&q, &e1h, &e1t), 2.0);
    }

    #[test]
    fn lift_examples() {
        let f = Frame::new(3).unwrap();
        let q = MetricParams::new(1.0, 2.0, 0.0, 11.0);
        let x = f.e(2);
        let l = tangential_lift(&q, &x).unwrap();
        assert_eq!(l, T1MVector::tangential(f.e(2)));
        let l = tangential_lift(&q, &f.u()).unwrap();
        assert_eq!(l.h()[0], 2.0 / 12.0);
        assert_eq!(l.t().norm(), 0.0);
        let p = MetricParams::new(1.0, 0.0, -2.0, 5.0);
        assert_eq!(tangential_lift(&p, &f.u()).unwrap().norm(), 0.0);
        assert!(tangential_lift(&MetricParams::new(1.0, 0.0, -1.0, 0.0), &x).is_err());
    }

    #[test]
    fn frame_coords_roundtrip() {
        let f = Frame::new(4).unwrap();
        for (k, v) in f.basis().iter().enumerate() {
            let c = v.to_frame_coords();
            assert_eq!(c[k], 1.0);
            assert_eq!(c.sum(), 1.0);
            assert_eq!(&T1MVector::from_frame_coords(&c).unwrap(), v);
            assert_eq!(Frame::is_horizontal(k), v.h().norm() > 0.0);
        }
    }

    #[test]
    fn rejects_non_tangential() {
        let f = Frame::new(3).unwrap();
        assert!(T1MVector::new(f.e(1), f.u()).is_err());
        assert!(T1MVector::new(f.e(1), f.e(2)).is_ok());
    }
}
