//! Gradient descent on the embedded positions.
//!
//! The total objective is a sum of independent per-point terms, so every
//! lattice point takes its own Armijo-backtracked step each iteration. Points
//! are processed in parallel; all reductions run afterwards on the ordered
//! results, which makes runs bit-identical for any worker count.

use std::collections::BTreeMap;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::Fields;
use crate::lattice::{check_dims, embed, ContinuousPoint, Lattice, LatticePoint};
use crate::manifold::Manifold;
use crate::objective::{evaluate_point, ObjectiveBreakdown, ObjectiveParams};
use crate::reduce::pairwise_sum;

/// Offset applied along the first axis to points whose starting position has
/// no unique footpoint.
pub const MEDIAL_NUDGE: f64 = 1e-6;

/// Current position of every lattice point.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingState {
    positions: BTreeMap<LatticePoint, ContinuousPoint>,
    iteration: usize,
}

impl EmbeddingState {
    pub fn new(
        positions: BTreeMap<LatticePoint, ContinuousPoint>,
        iteration: usize,
    ) -> Result<Self> {
        for (q, z) in &positions {
            check_dims(q.dim(), z.dim())?;
        }
        Ok(EmbeddingState {
            positions,
            iteration,
        })
    }

    pub fn get(&self, q: &LatticePoint) -> Option<&ContinuousPoint> {
        self.positions.get(q)
    }

    /// Replaces the position of a point already in the state.
    pub fn set(&mut self, q: &LatticePoint, z: ContinuousPoint) -> Result<()> {
        check_dims(q.dim(), z.dim())?;
        match self.positions.get_mut(q) {
            Some(slot) => {
                *slot = z;
                Ok(())
            }
            None => Err(Error::MissingEmbedding(q.clone())),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LatticePoint, &ContinuousPoint)> {
        self.positions.iter()
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// Smallest distance between two embedded positions, `None` below two
    /// points. Collapsed points give zero.
    pub fn min_pairwise_distance(&self) -> Option<f64> {
        let zs: Vec<&DVector<f64>> = self.positions.values().map(|z| z.as_vector()).collect();
        let mut best: Option<f64> = None;
        for (i, a) in zs.iter().enumerate() {
            for b in &zs[i + 1..] {
                let d = (*a - *b).norm();
                best = Some(best.map_or(d, |m| m.min(d)));
            }
        }
        best
    }
}

/// Identity embedding: every lattice point starts at its own coordinates.
pub fn initialize(lattice: &Lattice) -> EmbeddingState {
    EmbeddingState {
        positions: lattice.iter().map(|q| (q.clone(), embed(q))).collect(),
        iteration: 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    pub initial_step: f64,
    pub shrink: f64,
    pub armijo: f64,
    pub max_halvings: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            initial_step: 0.1,
            shrink: 0.5,
            armijo: 1e-4,
            max_halvings: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopCriteria {
    pub grad_tol: f64,
    pub max_iters: usize,
}

impl Default for StopCriteria {
    fn default() -> Self {
        StopCriteria {
            grad_tol: 1e-6,
            max_iters: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Converged,
    MaxIters,
    LineSearchFailure,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxIters => "max-iters",
            Termination::LineSearchFailure => "line-search-failure",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointReport {
    pub lattice: LatticePoint,
    pub position: Vec<f64>,
    pub gradient_sup_norm: f64,
    pub breakdown: ObjectiveBreakdown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationReport {
    pub termination: Termination,
    pub iterations: usize,
    pub final_grad_sup_norm: f64,
    /// Set when alpha != beta: the alignment gradient drops the footpoint
    /// sensitivity in that regime.
    pub footpoint_fixed_alignment: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_pairwise_distance: Option<f64>,
    /// Points moved off the medial axis before the first iteration.
    pub nudged_points: Vec<LatticePoint>,
    /// Points whose line search failed on the last iteration.
    pub failed_points: Vec<LatticePoint>,
    /// Total objective at the start and after every accepted iteration.
    pub objective_trace: Vec<f64>,
    pub final_objective: ObjectiveBreakdown,
    pub points: Vec<PointReport>,
}

#[derive(Debug, Clone)]
struct Evaluated {
    point: LatticePoint,
    position: DVector<f64>,
    breakdown: ObjectiveBreakdown,
    gradient: DVector<f64>,
}

impl Evaluated {
    fn grad_sup(&self) -> f64 {
        self.gradient.amax()
    }
}

fn evaluate_state(
    state: &EmbeddingState,
    m: &Manifold,
    fields: &Fields,
    params: &ObjectiveParams,
) -> Result<Vec<Evaluated>> {
    let entries: Vec<(&LatticePoint, &ContinuousPoint)> = state.iter().collect();
    entries
        .par_iter()
        .map(|(q, z)| {
            let e = evaluate_point(m, fields, z.as_vector(), params, true).map_err(|e| e.at(q))?;
            Ok(Evaluated {
                point: (*q).clone(),
                position: z.as_vector().clone(),
                breakdown: e.breakdown,
                gradient: e.gradient.expect("gradient requested"),
            })
        })
        .collect()
}

fn total_of(evals: &[Evaluated]) -> f64 {
    pairwise_sum(&evals.iter().map(|e| e.breakdown.total).collect::<Vec<_>>())
}

/// Armijo backtracking along the negative gradient of one point. Returns the
/// accepted position, or `None` when every trial failed.
fn line_search(
    e: &Evaluated,
    m: &Manifold,
    fields: &Fields,
    params: &ObjectiveParams,
    control: &StepControl,
) -> Option<DVector<f64>> {
    let f0 = e.breakdown.total;
    let slope = e.gradient.norm_squared();
    let mut t = control.initial_step;
    for _ in 0..=control.max_halvings {
        let trial = &e.position - &e.gradient * t;
        if trial.iter().all(|c| c.is_finite()) {
            if let Ok(eval) = evaluate_point(m, fields, &trial, params, false) {
                if eval.breakdown.total <= f0 - control.armijo * t * slope {
                    return Some(trial);
                }
            }
        }
        t *= control.shrink;
    }
    None
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: EmbeddingState,
    pub objective_before: f64,
    pub objective_after: f64,
    /// Points with a nonzero gradient whose line search found no descent.
    pub failed: Vec<(LatticePoint, f64)>,
}

fn advance(
    state: &EmbeddingState,
    evals: &[Evaluated],
    m: &Manifold,
    fields: &Fields,
    params: &ObjectiveParams,
    control: &StepControl,
) -> (EmbeddingState, Vec<(LatticePoint, f64)>) {
    let moves: Vec<Option<DVector<f64>>> = evals
        .par_iter()
        .map(|e| {
            if e.grad_sup() == 0.0 {
                return Some(e.position.clone());
            }
            line_search(e, m, fields, params, control)
        })
        .collect();

    let mut next = state.clone();
    let mut failed = Vec::new();
    for (e, mv) in evals.iter().zip(moves) {
        match mv {
            Some(z) => {
                let z = ContinuousPoint::from_vector(z)
                    .expect("line search only accepts finite trials");
                next.positions.insert(e.point.clone(), z);
            }
            None => failed.push((e.point.clone(), e.grad_sup())),
        }
    }
    next.iteration += 1;
    (next, failed)
}

/// One descent iteration over all points.
pub fn step(
    state: &EmbeddingState,
    m: &Manifold,
    fields: &Fields,
    params: &ObjectiveParams,
    control: &StepControl,
) -> Result<StepOutcome> {
    let evals = evaluate_state(state, m, fields, params)?;
    let (next, failed) = advance(state, &evals, m, fields, params, control);
    let after = evaluate_state(&next, m, fields, params)?;
    Ok(StepOutcome {
        state: next,
        objective_before: total_of(&evals),
        objective_after: total_of(&after),
        failed,
    })
}

/// Moves starting positions that sit on the medial axis (no unique footpoint
/// or a vanishing level-set gradient) by [`MEDIAL_NUDGE`] along the first axis.
pub fn nudge_medial_points(state: &mut EmbeddingState, m: &Manifold) -> Result<Vec<LatticePoint>> {
    let mut nudged = Vec::new();
    for (q, z) in state.positions.iter_mut() {
        let on_axis = match m.footpoint(z.as_vector()) {
            Ok(foot) => foot.ambiguous,
            Err(Error::Singularity { .. }) => true,
            Err(e) => return Err(e.at(q)),
        };
        if on_axis {
            let mut v = z.as_vector().clone();
            v[0] += MEDIAL_NUDGE;
            *z = ContinuousPoint::from_vector(v)?;
            nudged.push(q.clone());
        }
    }
    Ok(nudged)
}

/// Minimizes the total objective from the identity embedding.
pub fn optimize(
    lattice: &Lattice,
    m: &Manifold,
    fields: &Fields,
    params: &ObjectiveParams,
    stop: &StopCriteria,
    control: &StepControl,
) -> Result<(EmbeddingState, OptimizationReport)> {
    params.validate()?;
    check_dims(lattice.dimension(), m.ambient_dim())?;
    let mut state = initialize(lattice);
    let nudged_points = nudge_medial_points(&mut state, m)?;
    optimize_from(state, nudged_points, m, fields, params, stop, control)
}

/// Minimizes the total objective from an arbitrary starting state.
pub fn optimize_from(
    mut state: EmbeddingState,
    nudged_points: Vec<LatticePoint>,
    m: &Manifold,
    fields: &Fields,
    params: &ObjectiveParams,
    stop: &StopCriteria,
    control: &StepControl,
) -> Result<(EmbeddingState, OptimizationReport)> {
    let mut evals = evaluate_state(&state, m, fields, params)?;
    let mut trace = vec![total_of(&evals)];
    let mut failed_points = Vec::new();
    let termination = loop {
        let sup = evals.iter().map(Evaluated::grad_sup).fold(0.0, f64::max);
        if sup <= stop.grad_tol {
            break Termination::Converged;
        }
        if state.iteration >= stop.max_iters {
            break Termination::MaxIters;
        }
        let (next, failed) = advance(&state, &evals, m, fields, params, control);
        state = next;
        evals = evaluate_state(&state, m, fields, params)?;
        trace.push(total_of(&evals));
        failed_points = failed
            .into_iter()
            .filter(|(_, g)| *g > stop.grad_tol)
            .map(|(q, _)| q)
            .collect();
        if !failed_points.is_empty() {
            log::warn!("line search failed at {} point(s)", failed_points.len());
            break Termination::LineSearchFailure;
        }
    };

    let final_grad_sup_norm = evals.iter().map(Evaluated::grad_sup).fold(0.0, f64::max);
    let breakdowns: Vec<ObjectiveBreakdown> = evals.iter().map(|e| e.breakdown).collect();
    let report = OptimizationReport {
        termination,
        iterations: state.iteration,
        final_grad_sup_norm,
        footpoint_fixed_alignment: params.alpha != params.beta,
        min_pairwise_distance: state.min_pairwise_distance(),
        nudged_points,
        failed_points,
        objective_trace: trace,
        final_objective: ObjectiveBreakdown::sum(&breakdowns),
        points: evals
            .into_iter()
            .map(|e| PointReport {
                gradient_sup_norm: e.grad_sup(),
                lattice: e.point,
                position: e.position.as_slice().to_vec(),
                breakdown: e.breakdown,
            })
            .collect(),
    };
    Ok((state, report))
}
