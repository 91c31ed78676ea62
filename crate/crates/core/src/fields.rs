//! Scalar fields over R^n used by the objective: a smoothed indicator of the
//! manifold and a binary reinforcement mask.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{check_dims, ContinuousPoint};
use crate::manifold::{Footpoint, Manifold};

pub const DEFAULT_EPSILON: f64 = 0.25;

/// `exp(-d(x, M)^2 / eps^2)`, with `d` the unsigned distance to the manifold.
#[derive(Debug, Clone)]
pub struct ActivationField {
    manifold: Manifold,
    epsilon: f64,
}

impl ActivationField {
    pub fn new(manifold: Manifold, epsilon: f64) -> Result<Self> {
        if epsilon <= 0.0 || !epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "activation width must be positive and finite, got {epsilon}"
            )));
        }
        Ok(ActivationField { manifold, epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    pub fn activation(&self, x: &ContinuousPoint) -> Result<f64> {
        let foot = self.manifold.footpoint(x.as_vector())?;
        Ok(self.value_at_distance(foot.distance))
    }

    pub fn activation_gradient(&self, x: &ContinuousPoint) -> Result<DVector<f64>> {
        let foot = self.manifold.footpoint(x.as_vector())?;
        Ok(self.gradient_at_footpoint(x.as_vector(), &foot))
    }

    pub fn value_at_distance(&self, distance: f64) -> f64 {
        (-(distance * distance) / (self.epsilon * self.epsilon)).exp()
    }

    /// `-(2 / eps^2) A(x) (x - p)`; zero on the manifold.
    pub(crate) fn gradient_at_footpoint(&self, x: &DVector<f64>, foot: &Footpoint) -> DVector<f64> {
        if foot.ambiguous {
            log::warn!(
                "activation gradient near the medial axis at {:?}; footpoint {:?} is not unique",
                x.as_slice(),
                foot.point.as_slice()
            );
        }
        let a = self.value_at_distance(foot.distance);
        (x - &foot.point) * (-2.0 * a / (self.epsilon * self.epsilon))
    }
}

/// A closed region marked for reinforcement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Region {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lower: Vec<f64>, upper: Vec<f64> },
}

impl Region {
    pub fn dim(&self) -> usize {
        match self {
            Region::Ball { center, .. } => center.len(),
            Region::Box { lower, .. } => lower.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Region::Ball { center, radius } => {
                if center.iter().any(|c| !c.is_finite()) || *radius < 0.0 || !radius.is_finite() {
                    return Err(Error::InvalidParameter(
                        "ball needs a finite center and a nonnegative radius".into(),
                    ));
                }
            }
            Region::Box { lower, upper } => {
                check_dims(lower.len(), upper.len())?;
                if lower
                    .iter()
                    .zip(upper)
                    .any(|(lo, hi)| lo > hi || !lo.is_finite() || !hi.is_finite())
                {
                    return Err(Error::InvalidParameter(
                        "box needs finite bounds with lower <= upper".into(),
                    ));
                }
            }
        }
        if self.dim() == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(())
    }

    /// Boundary points count as inside.
    pub fn contains(&self, q: &[f64]) -> bool {
        if q.len() != self.dim() {
            return false;
        }
        match self {
            Region::Ball { center, radius } => {
                let d2: f64 = q.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                d2 <= radius * radius
            }
            Region::Box { lower, upper } => q
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(x, (lo, hi))| lo <= x && x <= hi),
        }
    }
}

/// Indicator of the union of the marked regions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReinforcementField {
    regions: Vec<Region>,
}

impl ReinforcementField {
    pub fn new(regions: Vec<Region>) -> Result<Self> {
        for r in &regions {
            r.validate()?;
        }
        Ok(ReinforcementField { regions })
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn reinforcement(&self, q: &ContinuousPoint) -> u8 {
        self.at(q.coords())
    }

    pub(crate) fn at(&self, q: &[f64]) -> u8 {
        u8::from(self.regions.iter().any(|r| r.contains(q)))
    }
}

#[derive(Debug, Clone)]
pub struct Fields {
    pub activation: ActivationField,
    pub reinforcement: ReinforcementField,
}

impl Fields {
    pub fn new(activation: ActivationField, reinforcement: ReinforcementField) -> Result<Self> {
        let n = activation.manifold().ambient_dim();
        for r in reinforcement.regions() {
            check_dims(n, r.dim())?;
        }
        Ok(Fields {
            activation,
            reinforcement,
        })
    }

    /// Default activation width and no reinforcement.
    pub fn with_defaults(manifold: Manifold) -> Self {
        Fields {
            activation: ActivationField::new(manifold, DEFAULT_EPSILON)
                .expect("default width is valid"),
            reinforcement: ReinforcementField::default(),
        }
    }
}
