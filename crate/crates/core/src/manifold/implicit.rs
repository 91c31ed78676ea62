//! Level-set representations `M = {x : F(x) = 0}`.

use std::fmt::Debug;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::diff;
use crate::error::{Error, Result};

/// A scalar level function with first and second derivatives.
///
/// Only [`value`](LevelFunction::value) is required; the default derivatives
/// are central finite differences.
pub trait LevelFunction: Send + Sync + Debug {
    fn ambient_dim(&self) -> usize;

    fn value(&self, x: &DVector<f64>) -> f64;

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        diff::central_gradient(|y| self.value(y), x)
    }

    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        diff::symmetric_jacobian(|y| self.gradient(y), x)
    }

    /// Whether `gradient` and `hessian` are closed-form.
    fn is_analytic(&self) -> bool {
        false
    }
}

/// `<normal, x> = offset`.
#[derive(Debug, Clone)]
pub struct Hyperplane {
    normal: DVector<f64>,
    offset: f64,
}

impl Hyperplane {
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let normal = DVector::from_vec(normal);
        if normal.is_empty()
            || normal.iter().any(|c| !c.is_finite())
            || normal.norm() == 0.0
            || !offset.is_finite()
        {
            return Err(Error::InvalidParameter(
                "plane needs a nonzero finite normal and finite offset".into(),
            ));
        }
        Ok(Hyperplane { normal, offset })
    }
}

impl LevelFunction for Hyperplane {
    fn ambient_dim(&self) -> usize {
        self.normal.len()
    }
    fn value(&self, x: &DVector<f64>) -> f64 {
        self.normal.dot(x) - self.offset
    }
    fn gradient(&self, _x: &DVector<f64>) -> DVector<f64> {
        self.normal.clone()
    }
    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::zeros(x.len(), x.len())
    }
    fn is_analytic(&self) -> bool {
        true
    }
}

/// `|x - c|^2 - r^2`.
#[derive(Debug, Clone)]
pub struct Sphere {
    center: DVector<f64>,
    radius: f64,
}

impl Sphere {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() || radius <= 0.0 || !radius.is_finite() {
            return Err(Error::InvalidParameter(
                "sphere needs a center and a positive radius".into(),
            ));
        }
        Ok(Sphere {
            center: DVector::from_vec(center),
            radius,
        })
    }
}

impl LevelFunction for Sphere {
    fn ambient_dim(&self) -> usize {
        self.center.len()
    }
    fn value(&self, x: &DVector<f64>) -> f64 {
        (x - &self.center).norm_squared() - self.radius * self.radius
    }
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        (x - &self.center) * 2.0
    }
    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::identity(x.len(), x.len()) * 2.0
    }
    fn is_analytic(&self) -> bool {
        true
    }
}

/// Round cylinder: points at distance `radius` from the line through
/// `center` along `axis`.
#[derive(Debug, Clone)]
pub struct Cylinder {
    center: DVector<f64>,
    axis: DVector<f64>,
    radius: f64,
}

impl Cylinder {
    pub fn new(center: Vec<f64>, axis: Vec<f64>, radius: f64) -> Result<Self> {
        if center.len() < 2 || center.len() != axis.len() {
            return Err(Error::DimensionMismatch {
                left: center.len(),
                right: axis.len(),
            });
        }
        let axis = DVector::from_vec(axis);
        let len = axis.norm();
        if len == 0.0 || !len.is_finite() || radius <= 0.0 || !radius.is_finite() {
            return Err(Error::InvalidParameter(
                "cylinder needs a nonzero axis and a positive radius".into(),
            ));
        }
        Ok(Cylinder {
            center: DVector::from_vec(center),
            axis: axis / len,
            radius,
        })
    }

    fn radial(&self, x: &DVector<f64>) -> DVector<f64> {
        let y = x - &self.center;
        let along = y.dot(&self.axis);
        y - &self.axis * along
    }
}

impl LevelFunction for Cylinder {
    fn ambient_dim(&self) -> usize {
        self.center.len()
    }
    fn value(&self, x: &DVector<f64>) -> f64 {
        self.radial(x).norm_squared() - self.radius * self.radius
    }
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        self.radial(x) * 2.0
    }
    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = x.len();
        (DMatrix::identity(n, n) - &self.axis * self.axis.transpose()) * 2.0
    }
    fn is_analytic(&self) -> bool {
        true
    }
}

/// Ring torus in R^3 around the z axis through `center`:
/// `(|y|^2 + R^2 - r^2)^2 - 4 R^2 (y_x^2 + y_y^2)` with `y = x - center`.
#[derive(Debug, Clone)]
pub struct Torus {
    center: DVector<f64>,
    major: f64,
    minor: f64,
}

impl Torus {
    pub fn new(center: Vec<f64>, major: f64, minor: f64) -> Result<Self> {
        if center.len() != 3 {
            return Err(Error::DimensionMismatch {
                left: center.len(),
                right: 3,
            });
        }
        if !(minor > 0.0 && major > minor) || !major.is_finite() {
            return Err(Error::InvalidParameter(
                "torus needs 0 < minor_radius < major_radius".into(),
            ));
        }
        Ok(Torus {
            center: DVector::from_vec(center),
            major,
            minor,
        })
    }

    pub fn major(&self) -> f64 {
        self.major
    }

    pub fn minor(&self) -> f64 {
        self.minor
    }
}

impl LevelFunction for Torus {
    fn ambient_dim(&self) -> usize {
        3
    }
    fn value(&self, x: &DVector<f64>) -> f64 {
        let y = x - &self.center;
        let r2 = self.major * self.major;
        let k = y.norm_squared() + r2 - self.minor * self.minor;
        k * k - 4.0 * r2 * (y[0] * y[0] + y[1] * y[1])
    }
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let y = x - &self.center;
        let r2 = self.major * self.major;
        let k = y.norm_squared() + r2 - self.minor * self.minor;
        let mut g = &y * (4.0 * k);
        g[0] -= 8.0 * r2 * y[0];
        g[1] -= 8.0 * r2 * y[1];
        g
    }
    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let y = x - &self.center;
        let r2 = self.major * self.major;
        let k = y.norm_squared() + r2 - self.minor * self.minor;
        let mut h = &y * y.transpose() * 8.0 + DMatrix::identity(3, 3) * (4.0 * k);
        h[(0, 0)] -= 8.0 * r2;
        h[(1, 1)] -= 8.0 * r2;
        h
    }
    fn is_analytic(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub coefficient: f64,
    pub exponents: Vec<u32>,
}

/// Polynomial level function given as a list of weighted monomials.
#[derive(Debug, Clone)]
pub struct Polynomial {
    dim: usize,
    terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn new(dim: usize, terms: Vec<Monomial>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        for t in &terms {
            if t.exponents.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: t.exponents.len(),
                });
            }
            if !t.coefficient.is_finite() {
                return Err(Error::InvalidParameter(
                    "polynomial coefficients must be finite".into(),
                ));
            }
        }
        Ok(Polynomial { dim, terms })
    }

    /// Mixed partial derivative of `x^e` with respect to the listed axes.
    fn monomial_derivative(exponents: &[u32], x: &DVector<f64>, axes: &[usize]) -> f64 {
        let mut out = 1.0;
        for (i, (&e, &xi)) in exponents.iter().zip(x.iter()).enumerate() {
            let order = axes.iter().filter(|&&a| a == i).count() as u32;
            if order > e {
                return 0.0;
            }
            let mut factor = 1.0;
            for k in 0..order {
                factor *= f64::from(e - k);
            }
            out *= factor * xi.powi((e - order) as i32);
        }
        out
    }

    fn derivative(&self, x: &DVector<f64>, axes: &[usize]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coefficient * Self::monomial_derivative(&t.exponents, x, axes))
            .sum()
    }
}

impl LevelFunction for Polynomial {
    fn ambient_dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &DVector<f64>) -> f64 {
        self.derivative(x, &[])
    }
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(self.dim, |i, _| self.derivative(x, &[i]))
    }
    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.derivative(x, &[i, j]))
    }
    fn is_analytic(&self) -> bool {
        true
    }
}

/// Hides the analytic derivatives of a level function so that every
/// derivative goes through finite differences of its values.
#[derive(Debug, Clone)]
pub struct Numeric<F>(pub F);

impl<F: LevelFunction> LevelFunction for Numeric<F> {
    fn ambient_dim(&self) -> usize {
        self.0.ambient_dim()
    }
    fn value(&self, x: &DVector<f64>) -> f64 {
        self.0.value(x)
    }
}
