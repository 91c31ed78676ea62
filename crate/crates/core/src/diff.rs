//! Central finite differences used wherever analytic derivatives are absent.

use nalgebra::{DMatrix, DVector};

/// Per-component step `max(1e-5, 1e-7 |x_i|)`.
pub fn fd_step(xi: f64) -> f64 {
    f64::max(1e-5, 1e-7 * xi.abs())
}

pub fn central_gradient(f: impl Fn(&DVector<f64>) -> f64, x: &DVector<f64>) -> DVector<f64> {
    let mut g = DVector::zeros(x.len());
    let mut probe = x.clone();
    for i in 0..x.len() {
        let h = fd_step(x[i]);
        probe[i] = x[i] + h;
        let up = f(&probe);
        probe[i] = x[i] - h;
        let down = f(&probe);
        probe[i] = x[i];
        g[i] = (up - down) / (2.0 * h);
    }
    g
}

/// Jacobian of a vector map, one column per input coordinate.
pub fn central_jacobian(
    f: impl Fn(&DVector<f64>) -> DVector<f64>,
    x: &DVector<f64>,
    rows: usize,
) -> DMatrix<f64> {
    let mut jac = DMatrix::zeros(rows, x.len());
    let mut probe = x.clone();
    for j in 0..x.len() {
        let h = fd_step(x[j]);
        probe[j] = x[j] + h;
        let up = f(&probe);
        probe[j] = x[j] - h;
        let down = f(&probe);
        probe[j] = x[j];
        jac.set_column(j, &((up - down) / (2.0 * h)));
    }
    jac
}

/// Symmetrized Jacobian of a gradient map.
pub fn symmetric_jacobian(
    grad: impl Fn(&DVector<f64>) -> DVector<f64>,
    x: &DVector<f64>,
) -> DMatrix<f64> {
    let j = central_jacobian(grad, x, x.len());
    (&j + j.transpose()) * 0.5
}
