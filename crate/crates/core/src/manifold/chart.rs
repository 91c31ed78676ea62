//! Parametric charts `psi: R^k -> R^n` over an axis-aligned parameter box.

use std::fmt::Debug;

use nalgebra::{DMatrix, DVector};

use crate::diff;
use crate::error::{Error, Result};

pub trait Parametrization: Send + Sync + Debug {
    fn param_dim(&self) -> usize;

    fn ambient_dim(&self) -> usize;

    fn eval(&self, u: &DVector<f64>) -> DVector<f64>;

    /// `n x k` matrix of first derivatives.
    fn jacobian(&self, u: &DVector<f64>) -> DMatrix<f64> {
        diff::central_jacobian(|w| self.eval(w), u, self.ambient_dim())
    }

    /// Second derivatives, one symmetric `k x k` matrix per ambient
    /// coordinate. Defaults to central differences of the jacobian.
    fn second_derivatives(&self, u: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let (n, k) = (self.ambient_dim(), self.param_dim());
        let mut out = vec![DMatrix::zeros(k, k); n];
        let mut probe = u.clone();
        for j in 0..k {
            let h = diff::fd_step(u[j]);
            probe[j] = u[j] + h;
            let up = self.jacobian(&probe);
            probe[j] = u[j] - h;
            let down = self.jacobian(&probe);
            probe[j] = u[j];
            let d = (up - down) / (2.0 * h);
            for (a, m) in out.iter_mut().enumerate() {
                for i in 0..k {
                    m[(i, j)] = d[(a, i)];
                }
            }
        }
        for m in &mut out {
            *m = (&*m + m.transpose()) * 0.5;
        }
        out
    }
}

/// Standard ring-torus parametrization around the z axis:
/// `(R + r cos v) (cos u, sin u, 0) + r sin v e_z`.
#[derive(Debug, Clone)]
pub struct TorusChart {
    pub center: [f64; 3],
    pub major: f64,
    pub minor: f64,
}

impl Parametrization for TorusChart {
    fn param_dim(&self) -> usize {
        2
    }
    fn ambient_dim(&self) -> usize {
        3
    }
    fn eval(&self, u: &DVector<f64>) -> DVector<f64> {
        let (su, cu) = u[0].sin_cos();
        let (sv, cv) = u[1].sin_cos();
        let ring = self.major + self.minor * cv;
        DVector::from_vec(vec![
            self.center[0] + ring * cu,
            self.center[1] + ring * su,
            self.center[2] + self.minor * sv,
        ])
    }
    fn jacobian(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let (su, cu) = u[0].sin_cos();
        let (sv, cv) = u[1].sin_cos();
        let ring = self.major + self.minor * cv;
        let r = self.minor;
        DMatrix::from_row_slice(
            3,
            2,
            &[
                -ring * su,
                -r * sv * cu,
                ring * cu,
                -r * sv * su,
                0.0,
                r * cv,
            ],
        )
    }
    fn second_derivatives(&self, u: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let (su, cu) = u[0].sin_cos();
        let (sv, cv) = u[1].sin_cos();
        let ring = self.major + self.minor * cv;
        let r = self.minor;
        vec![
            DMatrix::from_row_slice(2, 2, &[-ring * cu, r * sv * su, r * sv * su, -r * cv * cu]),
            DMatrix::from_row_slice(
                2,
                2,
                &[-ring * su, -r * sv * cu, -r * sv * cu, -r * cv * su],
            ),
            DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, -r * sv]),
        ]
    }
}

/// Sphere in polar/azimuth coordinates `(theta, phi)`. Only the jacobian is
/// closed-form; second derivatives go through finite differences.
#[derive(Debug, Clone)]
pub struct SphereChart {
    pub center: [f64; 3],
    pub radius: f64,
}

impl Parametrization for SphereChart {
    fn param_dim(&self) -> usize {
        2
    }
    fn ambient_dim(&self) -> usize {
        3
    }
    fn eval(&self, u: &DVector<f64>) -> DVector<f64> {
        let (st, ct) = u[0].sin_cos();
        let (sp, cp) = u[1].sin_cos();
        let r = self.radius;
        DVector::from_vec(vec![
            self.center[0] + r * st * cp,
            self.center[1] + r * st * sp,
            self.center[2] + r * ct,
        ])
    }
    fn jacobian(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let (st, ct) = u[0].sin_cos();
        let (sp, cp) = u[1].sin_cos();
        let r = self.radius;
        DMatrix::from_row_slice(
            3,
            2,
            &[
                r * ct * cp,
                -r * st * sp,
                r * ct * sp,
                r * st * cp,
                -r * st,
                0.0,
            ],
        )
    }
}

/// Uniform bicubic B-spline patch over a `rows x cols` control net
/// (row-major), with parameter domain `[0, rows - 3] x [0, cols - 3]`.
#[derive(Debug, Clone)]
pub struct BSplinePatch {
    rows: usize,
    cols: usize,
    ambient: usize,
    control: Vec<DVector<f64>>,
}

fn basis(t: f64) -> [f64; 4] {
    let s = 1.0 - t;
    [
        s * s * s / 6.0,
        (3.0 * t * t * t - 6.0 * t * t + 4.0) / 6.0,
        (-3.0 * t * t * t + 3.0 * t * t + 3.0 * t + 1.0) / 6.0,
        t * t * t / 6.0,
    ]
}

fn basis_d1(t: f64) -> [f64; 4] {
    let s = 1.0 - t;
    [
        -s * s / 2.0,
        (3.0 * t * t - 4.0 * t) / 2.0,
        (-3.0 * t * t + 2.0 * t + 1.0) / 2.0,
        t * t / 2.0,
    ]
}

fn basis_d2(t: f64) -> [f64; 4] {
    [1.0 - t, 3.0 * t - 2.0, 1.0 - 3.0 * t, t]
}

impl BSplinePatch {
    pub fn new(rows: usize, cols: usize, control: Vec<Vec<f64>>) -> Result<Self> {
        if rows < 4 || cols < 4 {
            return Err(Error::InvalidParameter(
                "chart grid needs at least 4 x 4 control points".into(),
            ));
        }
        if control.len() != rows * cols {
            return Err(Error::InvalidParameter(format!(
                "chart grid expects {} control points, got {}",
                rows * cols,
                control.len()
            )));
        }
        let ambient = control[0].len();
        if ambient < 3 {
            return Err(Error::InvalidParameter(
                "chart grid control points need at least 3 coordinates".into(),
            ));
        }
        for c in &control {
            if c.len() != ambient {
                return Err(Error::DimensionMismatch {
                    left: ambient,
                    right: c.len(),
                });
            }
        }
        Ok(BSplinePatch {
            rows,
            cols,
            ambient,
            control: control.into_iter().map(DVector::from_vec).collect(),
        })
    }

    pub fn domain(&self) -> (Vec<f64>, Vec<f64>) {
        (
            vec![0.0, 0.0],
            vec![(self.rows - 3) as f64, (self.cols - 3) as f64],
        )
    }

    fn span(param: f64, count: usize) -> (usize, f64) {
        let last = count - 4;
        let i = (param.floor().max(0.0) as usize).min(last);
        (i, param - i as f64)
    }

    fn combine(&self, u: &DVector<f64>, bu: [f64; 4], bv: [f64; 4]) -> DVector<f64> {
        let (i, _) = Self::span(u[0], self.rows);
        let (j, _) = Self::span(u[1], self.cols);
        let mut out = DVector::zeros(self.ambient);
        for (a, wa) in bu.iter().enumerate() {
            for (b, wb) in bv.iter().enumerate() {
                out += &self.control[(i + a) * self.cols + j + b] * (wa * wb);
            }
        }
        out
    }
}

impl Parametrization for BSplinePatch {
    fn param_dim(&self) -> usize {
        2
    }
    fn ambient_dim(&self) -> usize {
        self.ambient
    }
    fn eval(&self, u: &DVector<f64>) -> DVector<f64> {
        let (_, s) = Self::span(u[0], self.rows);
        let (_, t) = Self::span(u[1], self.cols);
        self.combine(u, basis(s), basis(t))
    }
    fn jacobian(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let (_, s) = Self::span(u[0], self.rows);
        let (_, t) = Self::span(u[1], self.cols);
        let du = self.combine(u, basis_d1(s), basis(t));
        let dv = self.combine(u, basis(s), basis_d1(t));
        DMatrix::from_columns(&[du, dv])
    }
    fn second_derivatives(&self, u: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let (_, s) = Self::span(u[0], self.rows);
        let (_, t) = Self::span(u[1], self.cols);
        let uu = self.combine(u, basis_d2(s), basis(t));
        let uv = self.combine(u, basis_d1(s), basis_d1(t));
        let vv = self.combine(u, basis(s), basis_d2(t));
        (0..self.ambient)
            .map(|a| DMatrix::from_row_slice(2, 2, &[uu[a], uv[a], uv[a], vv[a]]))
            .collect()
    }
}
