//! Per-point objective and its gradient, and their sums over a lattice.
//!
//! For an embedded position `z` with footpoint `p` on the manifold:
//!
//! ```text
//! O(z) = alpha |(z - p)_T|^2 + beta |(z - p)_N|^2     alignment
//!      + lambda mu(z)                                 reinforcement
//!      + gamma (1 - A(z))^2                           activation penalty
//!      + kappa_w K(p)^2                               curvature penalty
//! ```
//!
//! The gradient of the alignment term holds the footpoint fixed. Since
//! `z - p` is normal at the closest point, this is the exact derivative of
//! `beta d(z)^2`.

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diff;
use crate::error::{Error, Result};
use crate::fields::Fields;
use crate::lattice::{ContinuousPoint, Lattice};
use crate::manifold::{Footpoint, Manifold};
use crate::optimizer::EmbeddingState;
use crate::reduce::pairwise_sum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveParams {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub kappa_w: f64,
}

impl Default for ObjectiveParams {
    fn default() -> Self {
        ObjectiveParams {
            alpha: 1.0,
            beta: 1.0,
            lambda: 0.0,
            gamma: 1.0,
            kappa_w: 0.0,
        }
    }
}

impl ObjectiveParams {
    pub fn validate(&self) -> Result<()> {
        for (name, w) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("lambda", self.lambda),
            ("gamma", self.gamma),
            ("kappa_w", self.kappa_w),
        ] {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and nonnegative, got {w}"
                )));
            }
        }
        if self.alpha + self.beta <= 0.0 {
            return Err(Error::InvalidParameter(
                "alpha + beta must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveBreakdown {
    pub alignment: f64,
    pub reinforcement: f64,
    pub activation_penalty: f64,
    pub curvature_penalty: f64,
    pub total: f64,
}

impl ObjectiveBreakdown {
    pub fn from_parts(
        alignment: f64,
        reinforcement: f64,
        activation_penalty: f64,
        curvature_penalty: f64,
    ) -> Self {
        ObjectiveBreakdown {
            alignment,
            reinforcement,
            activation_penalty,
            curvature_penalty,
            total: alignment + reinforcement + activation_penalty + curvature_penalty,
        }
    }

    /// Component-wise pairwise sum. `total` is the sum of the per-point
    /// totals, which keeps it monotone in each of them.
    pub fn sum(items: &[ObjectiveBreakdown]) -> ObjectiveBreakdown {
        let column = |f: fn(&ObjectiveBreakdown) -> f64| {
            pairwise_sum(&items.iter().map(f).collect::<Vec<_>>())
        };
        ObjectiveBreakdown {
            alignment: column(|b| b.alignment),
            reinforcement: column(|b| b.reinforcement),
            activation_penalty: column(|b| b.activation_penalty),
            curvature_penalty: column(|b| b.curvature_penalty),
            total: column(|b| b.total),
        }
    }
}

/// `alpha |(q - p)_T|^2 + beta |(q - p)_N|^2` with the split taken at `p`.
pub fn alignment_metric(
    m: &Manifold,
    p: &ContinuousPoint,
    q: &ContinuousPoint,
    params: &ObjectiveParams,
) -> Result<f64> {
    let offset = q.as_vector() - p.as_vector();
    let split = m.split_tangent_normal(p, &offset)?;
    Ok(params.alpha * split.tangential.norm_squared() + params.beta * split.normal.norm_squared())
}

#[derive(Debug, Clone)]
pub(crate) struct PointEvaluation {
    pub breakdown: ObjectiveBreakdown,
    pub gradient: Option<DVector<f64>>,
}

fn curvature_term(m: &Manifold, foot: &Footpoint, params: &ObjectiveParams) -> Result<f64> {
    if params.kappa_w == 0.0 {
        return Ok(0.0);
    }
    match m.gaussian_curvature_at(foot) {
        Ok(k) => Ok(params.kappa_w * k * k),
        Err(Error::UnsupportedDimension { .. }) => Ok(0.0),
        Err(e) => Err(e),
    }
}

pub(crate) fn evaluate_point(
    m: &Manifold,
    fields: &Fields,
    z: &DVector<f64>,
    params: &ObjectiveParams,
    with_gradient: bool,
) -> Result<PointEvaluation> {
    let foot = m.footpoint(z)?;
    let frame = m.frame_at_footpoint(&foot)?;
    let offset = z - &foot.point;
    let split = frame.split(&offset);

    let alignment =
        params.alpha * split.tangential.norm_squared() + params.beta * split.normal.norm_squared();
    let reinforcement = params.lambda * f64::from(fields.reinforcement.at(z.as_slice()));
    let activation = fields.activation.value_at_distance(foot.distance);
    let activation_penalty = params.gamma * (1.0 - activation).powi(2);
    let curvature_penalty = curvature_term(m, &foot, params)?;
    let breakdown = ObjectiveBreakdown::from_parts(
        alignment,
        reinforcement,
        activation_penalty,
        curvature_penalty,
    );

    let gradient = if with_gradient {
        let mut g = split.tangential * (2.0 * params.alpha) + split.normal * (2.0 * params.beta);
        if params.gamma != 0.0 {
            let da = fields.activation.gradient_at_footpoint(z, &foot);
            g += da * (-2.0 * params.gamma * (1.0 - activation));
        }
        if params.kappa_w != 0.0 {
            g += curvature_gradient(m, z, params)?;
        }
        Some(g)
    } else {
        None
    };
    Ok(PointEvaluation {
        breakdown,
        gradient,
    })
}

/// Central differences of `kappa_w K(footpoint(z))^2`.
fn curvature_gradient(
    m: &Manifold,
    z: &DVector<f64>,
    params: &ObjectiveParams,
) -> Result<DVector<f64>> {
    let penalty = |x: &DVector<f64>| -> Result<f64> {
        let foot = m.footpoint(x)?;
        curvature_term(m, &foot, params)
    };
    let mut g = DVector::zeros(z.len());
    let mut probe = z.clone();
    for i in 0..z.len() {
        let h = diff::fd_step(z[i]);
        probe[i] = z[i] + h;
        let up = penalty(&probe)?;
        probe[i] = z[i] - h;
        let down = penalty(&probe)?;
        probe[i] = z[i];
        g[i] = (up - down) / (2.0 * h);
    }
    Ok(g)
}

/// Objective of one embedded position. Activation is measured against `m`.
pub fn point_objective(
    m: &Manifold,
    fields: &Fields,
    zeta_q: &ContinuousPoint,
    params: &ObjectiveParams,
) -> Result<ObjectiveBreakdown> {
    Ok(evaluate_point(m, fields, zeta_q.as_vector(), params, false)?.breakdown)
}

fn positions<'a>(
    lattice: &'a Lattice,
    zeta: &'a EmbeddingState,
) -> Result<Vec<&'a ContinuousPoint>> {
    lattice
        .iter()
        .map(|q| {
            zeta.get(q)
                .ok_or_else(|| Error::MissingEmbedding(q.clone()))
        })
        .collect()
}

pub fn total_objective(
    lattice: &Lattice,
    zeta: &EmbeddingState,
    m: &Manifold,
    fields: &Fields,
    params: &ObjectiveParams,
) -> Result<ObjectiveBreakdown> {
    Ok(ObjectiveBreakdown::sum(&per_point_objective(
        lattice, zeta, m, fields, params,
    )?))
}

/// Breakdown of every lattice point, in lattice order.
pub fn per_point_objective(
    lattice: &Lattice,
    zeta: &EmbeddingState,
    m: &Manifold,
    fields: &Fields,
    params: &ObjectiveParams,
) -> Result<Vec<ObjectiveBreakdown>> {
    let zs = positions(lattice, zeta)?;
    lattice
        .points()
        .par_iter()
        .zip(zs.par_iter())
        .map(|(q, z)| {
            evaluate_point(m, fields, z.as_vector(), params, false)
                .map(|e| e.breakdown)
                .map_err(|e| e.at(q))
        })
        .collect()
}

/// Gradient with respect to each embedded position, in lattice order.
pub fn objective_gradient(
    lattice: &Lattice,
    zeta: &EmbeddingState,
    m: &Manifold,
    fields: &Fields,
    params: &ObjectiveParams,
) -> Result<Vec<DVector<f64>>> {
    let zs = positions(lattice, zeta)?;
    lattice
        .points()
        .par_iter()
        .zip(zs.par_iter())
        .map(|(q, z)| {
            evaluate_point(m, fields, z.as_vector(), params, true)
                .map(|e| e.gradient.expect("gradient requested"))
                .map_err(|e| e.at(q))
        })
        .collect()
}
