//! Smooth manifolds in R^n and the geometry the objective needs: footpoint
//! projection, tangent/normal splitting and curvature.
//!
//! Two representations are supported. An [`ImplicitHypersurface`] is the zero
//! set of a [`LevelFunction`] with a nonvanishing gradient near the surface.
//! A [`ParametricChart`] is the image of a [`Parametrization`] over a box of
//! parameters. Curvature is only defined for 2-surfaces in R^3.

pub mod chart;
pub mod implicit;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::lattice::{check_dims, ContinuousPoint};

pub use chart::{BSplinePatch, Parametrization, SphereChart, TorusChart};
pub use implicit::{
    Cylinder, Hyperplane, LevelFunction, Monomial, Numeric, Polynomial, Sphere, Torus,
};

/// `|F(p)|` below which a point counts as lying on an implicit manifold.
pub const ON_MANIFOLD_TOL: f64 = 1e-8;
/// Gradient norms below this are treated as singular.
pub const SINGULAR_GRADIENT: f64 = 1e-12;
/// Required `|F(p)|` at a returned footpoint.
pub const FOOTPOINT_LEVEL_TOL: f64 = 1e-10;
/// Largest tangential component allowed in `q - p` at a footpoint.
pub const NORMAL_ALIGNMENT_TOL: f64 = 1e-8;
/// Relative normal component above which a vector is rejected as non-tangent.
pub const TANGENCY_TOL: f64 = 1e-8;
/// Gram determinant below which two tangent vectors are dependent.
pub const GRAM_TOL: f64 = 1e-12;

/// Smallest eigenvalue of the reduced distance hessian under which a
/// footpoint is flagged as sitting on (or past) a focal point.
const MEDIAL_MARGIN: f64 = 1e-8;
const MAX_ITERATIONS: usize = 100;
const MAX_HALVINGS: usize = 60;
const CHART_SEEDS: usize = 8;
const CHART_GRID_BUDGET: f64 = 1024.0;

#[derive(Debug, Clone)]
pub struct ImplicitHypersurface {
    level: Arc<dyn LevelFunction>,
    neighborhood: f64,
}

impl ImplicitHypersurface {
    pub fn level(&self) -> &dyn LevelFunction {
        &*self.level
    }
}

#[derive(Debug, Clone)]
pub struct ParametricChart {
    map: Arc<dyn Parametrization>,
    lower: DVector<f64>,
    upper: DVector<f64>,
    neighborhood: f64,
}

impl ParametricChart {
    pub fn map(&self) -> &dyn Parametrization {
        &*self.map
    }

    fn clamp(&self, u: &DVector<f64>) -> DVector<f64> {
        u.zip_zip_map(&self.lower, &self.upper, |x, lo, hi| x.clamp(lo, hi))
    }

    fn is_interior(&self, u: &DVector<f64>) -> bool {
        u.iter()
            .zip(self.lower.iter().zip(self.upper.iter()))
            .all(|(&x, (&lo, &hi))| x > lo + 1e-12 && x < hi - 1e-12)
    }

    /// Starting parameters for the multi-start descent: the best points of
    /// a regular parameter grid, at most one per grid neighborhood.
    fn seeds(&self, q: &DVector<f64>) -> Vec<DVector<f64>> {
        let k = self.lower.len();
        let per_axis = (CHART_GRID_BUDGET.powf(1.0 / k as f64).floor() as usize).clamp(2, 64);
        let total = per_axis.pow(k as u32);
        let mut candidates: Vec<(f64, Vec<usize>)> = Vec::with_capacity(total);
        for flat in 0..total {
            let mut idx = Vec::with_capacity(k);
            let mut rest = flat;
            for _ in 0..k {
                idx.push(rest % per_axis);
                rest /= per_axis;
            }
            let u = self.grid_param(&idx, per_axis);
            let d = (self.map.eval(&u) - q).norm_squared();
            candidates.push((d, idx));
        }
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut chosen: Vec<&Vec<usize>> = Vec::new();
        for (_, idx) in &candidates {
            let near = chosen
                .iter()
                .any(|c| c.iter().zip(idx.iter()).all(|(&a, &b)| a.abs_diff(b) <= 1));
            if !near {
                chosen.push(idx);
                if chosen.len() == CHART_SEEDS {
                    break;
                }
            }
        }
        chosen
            .into_iter()
            .map(|idx| self.grid_param(idx, per_axis))
            .collect()
    }

    fn grid_param(&self, idx: &[usize], per_axis: usize) -> DVector<f64> {
        let denom = (per_axis - 1) as f64;
        DVector::from_fn(idx.len(), |i, _| {
            self.lower[i] + (self.upper[i] - self.lower[i]) * idx[i] as f64 / denom
        })
    }

    /// Damped Newton descent on `|psi(u) - q|^2 / 2` projected onto the
    /// parameter box, falling back to Gauss-Newton and then to the gradient.
    fn descend(&self, q: &DVector<f64>, seed: DVector<f64>) -> (f64, DVector<f64>, DVector<f64>) {
        let half_sq = |u: &DVector<f64>| 0.5 * (self.map.eval(u) - q).norm_squared();
        let mut u = self.clamp(&seed);
        for _ in 0..MAX_ITERATIONS {
            let r = self.map.eval(&u) - q;
            let phi = 0.5 * r.norm_squared();
            let jac = self.map.jacobian(&u);
            let grad = jac.transpose() * &r;
            let gauss_newton = jac.transpose() * &jac;
            let mut newton = gauss_newton.clone();
            for (a, s) in self.map.second_derivatives(&u).iter().enumerate() {
                newton += s * r[a];
            }
            let mut dir = newton
                .cholesky()
                .map(|c| -c.solve(&grad))
                .or_else(|| gauss_newton.cholesky().map(|c| -c.solve(&grad)))
                .unwrap_or_else(|| -&grad);
            if grad.dot(&dir) >= 0.0 {
                dir = -&grad;
            }
            let mut t = 1.0;
            let mut next = None;
            for _ in 0..MAX_HALVINGS {
                let trial = self.clamp(&(&u + &dir * t));
                let phi_t = half_sq(&trial);
                if phi_t <= phi + 1e-4 * grad.dot(&(&trial - &u)) && phi_t <= phi {
                    next = Some(trial);
                    break;
                }
                t *= 0.5;
            }
            let Some(next) = next else { break };
            let moved = (&next - &u).norm();
            u = next;
            if moved <= 1e-15 * (1.0 + u.norm()) {
                break;
            }
        }
        let x = self.map.eval(&u);
        ((&x - q).norm(), u, x)
    }
}

#[derive(Debug, Clone)]
pub enum Manifold {
    Implicit(ImplicitHypersurface),
    Chart(ParametricChart),
}

/// Closest point on the manifold together with solver diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Footpoint {
    pub point: DVector<f64>,
    /// Chart parameters of `point`; `None` for implicit manifolds.
    pub param: Option<DVector<f64>>,
    pub distance: f64,
    /// Set when the query sits near the medial axis, where the footpoint is
    /// not unique and the distance field is not differentiable.
    pub ambiguous: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TangentNormalSplit {
    pub tangential: DVector<f64>,
    pub normal: DVector<f64>,
}

/// First- and second-order data of the manifold at one of its points.
#[derive(Debug, Clone)]
pub(crate) enum LocalFrame {
    Implicit {
        unit_normal: DVector<f64>,
        /// Hessian of F divided by |grad F|.
        shape: DMatrix<f64>,
    },
    Chart {
        /// Orthonormal basis of the tangent space (`n x k`).
        tangent: DMatrix<f64>,
        jacobian: DMatrix<f64>,
        param: DVector<f64>,
    },
}

impl LocalFrame {
    pub(crate) fn split(&self, v: &DVector<f64>) -> TangentNormalSplit {
        match self {
            LocalFrame::Implicit { unit_normal, .. } => {
                let normal = unit_normal * unit_normal.dot(v);
                TangentNormalSplit {
                    tangential: v - &normal,
                    normal,
                }
            }
            LocalFrame::Chart { tangent, .. } => {
                let tangential = tangent * (tangent.transpose() * v);
                TangentNormalSplit {
                    normal: v - &tangential,
                    tangential,
                }
            }
        }
    }
}

/// Orthonormal basis of the complement of a unit vector, from the Householder
/// reflection that maps it onto its dominant coordinate axis.
fn complement_basis(unit: &DVector<f64>) -> DMatrix<f64> {
    let n = unit.len();
    let k = unit.iamax();
    let sign = if unit[k] >= 0.0 { 1.0 } else { -1.0 };
    let mut w = unit.clone();
    w[k] -= sign;
    let w_norm2 = w.norm_squared();
    let reflect = if w_norm2 > 0.0 {
        DMatrix::identity(n, n) - (&w * w.transpose()) * (2.0 / w_norm2)
    } else {
        DMatrix::identity(n, n)
    };
    let cols: Vec<DVector<f64>> = (0..n)
        .filter(|&j| j != k)
        .map(|j| reflect.column(j).into_owned())
        .collect();
    DMatrix::from_columns(&cols)
}

fn cross(a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
    DVector::from_vec(vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])
}

/// Newton steps along the gradient that drive `|F|` down, with halving.
fn normal_projection(
    level: &dyn LevelFunction,
    mut x: DVector<f64>,
    tol: f64,
) -> Result<DVector<f64>> {
    let mut fx = level.value(&x);
    for _ in 0..MAX_ITERATIONS {
        if fx.abs() <= tol {
            break;
        }
        let g = level.gradient(&x);
        let gn2 = g.norm_squared();
        if gn2.sqrt() < SINGULAR_GRADIENT {
            return Err(Error::Singularity {
                point: x.as_slice().to_vec(),
                norm: gn2.sqrt(),
            });
        }
        let step = g * (-fx / gn2);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let trial = &x + &step * t;
            let ft = level.value(&trial);
            if ft.abs() < fx.abs() {
                x = trial;
                fx = ft;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(x)
}

/// Newton on the stationarity system `x - q + lambda grad F = 0, F = 0`
/// started from a point near the level set.
fn refine_implicit(
    level: &dyn LevelFunction,
    q: &DVector<f64>,
    mut x: DVector<f64>,
) -> Result<Footpoint> {
    let n = q.len();

    let g = level.gradient(&x);
    let mut lambda = (q - &x).dot(&g) / g.norm_squared().max(f64::MIN_POSITIVE);
    let merit = |x: &DVector<f64>, lambda: f64| {
        let g = level.gradient(x);
        let f = level.value(x);
        ((x - q) + g * lambda).norm_squared() + f * f
    };

    // Newton on the stationarity system x - q + lambda grad F = 0, F = 0.
    for _ in 0..MAX_ITERATIONS {
        let g = level.gradient(&x);
        if g.norm() < SINGULAR_GRADIENT {
            return Err(Error::Singularity {
                point: x.as_slice().to_vec(),
                norm: g.norm(),
            });
        }
        let fx = level.value(&x);
        let top = (&x - q) + &g * lambda;
        let current = top.norm_squared() + fx * fx;
        let floor = 1e-15 * (1.0 + x.norm());
        if current.sqrt() <= floor {
            break;
        }
        let h = level.hessian(&x);
        let mut kkt = DMatrix::zeros(n + 1, n + 1);
        kkt.view_mut((0, 0), (n, n))
            .copy_from(&(DMatrix::identity(n, n) + h * lambda));
        kkt.view_mut((0, n), (n, 1)).copy_from(&g);
        kkt.view_mut((n, 0), (1, n)).copy_from(&g.transpose());
        let mut rhs = DVector::zeros(n + 1);
        rhs.rows_mut(0, n).copy_from(&(-top));
        rhs[n] = -fx;

        let Some(delta) = kkt.lu().solve(&rhs) else {
            // Degenerate system (focal point): slide along the tangent
            // plane toward q, then return to the level set.
            let unit = &g / g.norm();
            let offset = q - &x;
            let tangential = &offset - &unit * unit.dot(&offset);
            if tangential.norm() <= floor {
                break;
            }
            x = normal_projection(level, &x + tangential, 1e-14)?;
            let g = level.gradient(&x);
            lambda = (q - &x).dot(&g) / g.norm_squared();
            continue;
        };
        let dx = delta.rows(0, n).into_owned();
        let dl = delta[n];
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial = &x + &dx * t;
            let trial_lambda = lambda + dl * t;
            if merit(&trial, trial_lambda) < current {
                x = trial;
                lambda = trial_lambda;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted || dx.norm() * t <= 1e-16 * (1.0 + x.norm()) {
            break;
        }
    }
    let mut p = normal_projection(level, x, 0.0)?;
    if tangential_residual(level, q, &p) > NORMAL_ALIGNMENT_TOL {
        p = tangent_descent(level, q, p)?;
    }

    let g = level.gradient(&p);
    let g_norm = g.norm();
    if g_norm < SINGULAR_GRADIENT {
        return Err(Error::Singularity {
            point: p.as_slice().to_vec(),
            norm: g_norm,
        });
    }
    let fp = level.value(&p);
    let unit = &g / g_norm;
    let offset = q - &p;
    let tangential = (&offset - &unit * unit.dot(&offset)).norm();
    if fp.abs() > FOOTPOINT_LEVEL_TOL || tangential > NORMAL_ALIGNMENT_TOL {
        return Err(Error::NonConvergence {
            last: p.as_slice().to_vec(),
            residual: fp.abs().max(tangential),
            iterations: MAX_ITERATIONS,
        });
    }

    // Second-order check: the distance hessian restricted to the tangent
    // space, I + lambda H, degenerates on the focal set.
    let lambda = offset.dot(&g) / (g_norm * g_norm);
    let basis = complement_basis(&unit);
    let reduced =
        basis.transpose() * (DMatrix::identity(n, n) + level.hessian(&p) * lambda) * &basis;
    let margin = if reduced.nrows() == 0 {
        f64::INFINITY
    } else {
        SymmetricEigen::new(reduced).eigenvalues.min()
    };
    if margin < -MEDIAL_MARGIN {
        // Stationary, but the distance decreases along some tangent direction.
        return Err(Error::NonConvergence {
            last: p.as_slice().to_vec(),
            residual: -margin,
            iterations: MAX_ITERATIONS,
        });
    }

    Ok(Footpoint {
        distance: offset.norm(),
        point: p,
        param: None,
        ambiguous: margin < MEDIAL_MARGIN,
    })
}

fn tangential_residual(level: &dyn LevelFunction, q: &DVector<f64>, p: &DVector<f64>) -> f64 {
    let g = level.gradient(p);
    let unit = &g / g.norm().max(f64::MIN_POSITIVE);
    let offset = q - p;
    (&offset - &unit * unit.dot(&offset)).norm()
}

/// Riemannian Newton on `|x - q|^2 / 2` over the level set, falling back to
/// the tangential gradient where the reduced hessian is not positive. Every
/// step is retracted onto the level set and must shorten the distance.
fn tangent_descent(
    level: &dyn LevelFunction,
    q: &DVector<f64>,
    mut x: DVector<f64>,
) -> Result<DVector<f64>> {
    let n = q.len();
    let mut dist2 = (&x - q).norm_squared();
    for _ in 0..MAX_ITERATIONS {
        let g = level.gradient(&x);
        let g_norm = g.norm();
        if g_norm < SINGULAR_GRADIENT {
            return Err(Error::Singularity {
                point: x.as_slice().to_vec(),
                norm: g_norm,
            });
        }
        let basis = complement_basis(&(&g / g_norm));
        let grad = basis.transpose() * (&x - q);
        if grad.norm() <= 1e-15 * (1.0 + x.norm()) {
            break;
        }
        let lambda = (q - &x).dot(&g) / (g_norm * g_norm);
        let reduced =
            basis.transpose() * (DMatrix::identity(n, n) + level.hessian(&x) * lambda) * &basis;
        let newton = SymmetricEigen::new(reduced.clone())
            .eigenvalues
            .min()
            .gt(&1e-14)
            .then(|| reduced.cholesky().map(|c| -c.solve(&grad)))
            .flatten();
        let step = &basis * newton.unwrap_or_else(|| -&grad);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let trial = normal_projection(level, &x + &step * t, 0.0)?;
            let d2 = (&trial - q).norm_squared();
            if d2 < dist2 {
                x = trial;
                dist2 = d2;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(x)
}

/// Unit directions used when the normal projection stalls: the nonzero
/// vectors of `{-1, 0, 1}^n` in low dimension, coordinate axes otherwise.
fn ray_directions(n: usize) -> Vec<DVector<f64>> {
    if n > 4 {
        return (0..2 * n)
            .map(|k| {
                let mut d = DVector::zeros(n);
                d[k / 2] = if k % 2 == 0 { 1.0 } else { -1.0 };
                d
            })
            .collect();
    }
    let mut out = Vec::new();
    for code in 0..3usize.pow(n as u32) {
        let mut c = code;
        let d = DVector::from_fn(n, |_, _| {
            let v = (c % 3) as f64 - 1.0;
            c /= 3;
            v
        });
        if d.norm() > 0.0 {
            out.push(d.normalize());
        }
    }
    out
}

/// Casts rays from `q`, refines the first level-set crossing on each and
/// keeps the nearest footpoint.
fn ray_footpoint(level: &dyn LevelFunction, q: &DVector<f64>) -> Option<Footpoint> {
    let scale = 1.0 + q.norm();
    let f0 = level.value(q);
    let mut best: Option<Footpoint> = None;
    let mut rival = false;
    for d in ray_directions(q.len()) {
        let (mut t_prev, mut f_prev) = (0.0, f0);
        let mut t = 1e-3 * scale;
        let crossing = loop {
            if t > 1e3 * scale {
                break None;
            }
            let f = level.value(&(q + &d * t));
            if f == 0.0 || f.signum() != f_prev.signum() {
                let (mut lo, mut hi) = (t_prev, t);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if level.value(&(q + &d * mid)).signum() == f_prev.signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                break Some(q + &d * (0.5 * (lo + hi)));
            }
            (t_prev, f_prev) = (t, f);
            t *= 1.25;
        };
        let Some(Ok(foot)) = crossing.map(|x| refine_implicit(level, q, x)) else {
            continue;
        };
        match &best {
            Some(b) if foot.distance > b.distance + 1e-9 * scale => {}
            Some(b) if foot.distance >= b.distance - 1e-9 * scale => {
                if (&foot.point - &b.point).norm() > 1e-6 * scale {
                    rival = true;
                }
            }
            _ => {
                rival = false;
                best = Some(foot);
            }
        }
    }
    best.map(|mut b| {
        b.ambiguous |= rival;
        b
    })
}

impl Manifold {
    pub fn implicit(level: impl LevelFunction + 'static) -> Manifold {
        Manifold::Implicit(ImplicitHypersurface {
            level: Arc::new(level),
            neighborhood: f64::INFINITY,
        })
    }

    pub fn chart(
        map: impl Parametrization + 'static,
        lower: Vec<f64>,
        upper: Vec<f64>,
    ) -> Result<Manifold> {
        let k = map.param_dim();
        if k == 0 || k >= map.ambient_dim() {
            return Err(Error::InvalidParameter(format!(
                "chart must map R^k into R^n with 0 < k < n (got k = {k}, n = {})",
                map.ambient_dim()
            )));
        }
        check_dims(k, lower.len())?;
        check_dims(k, upper.len())?;
        if lower
            .iter()
            .zip(&upper)
            .any(|(lo, hi)| lo >= hi || !lo.is_finite() || !hi.is_finite())
        {
            return Err(Error::InvalidParameter(
                "chart parameter domain must be a nonempty finite box".into(),
            ));
        }
        Ok(Manifold::Chart(ParametricChart {
            map: Arc::new(map),
            lower: DVector::from_vec(lower),
            upper: DVector::from_vec(upper),
            neighborhood: f64::INFINITY,
        }))
    }

    pub fn plane(normal: Vec<f64>, offset: f64) -> Result<Manifold> {
        Ok(Self::implicit(Hyperplane::new(normal, offset)?))
    }

    pub fn sphere(center: Vec<f64>, radius: f64) -> Result<Manifold> {
        Ok(Self::implicit(Sphere::new(center, radius)?))
    }

    pub fn cylinder(center: Vec<f64>, axis: Vec<f64>, radius: f64) -> Result<Manifold> {
        Ok(Self::implicit(Cylinder::new(center, axis, radius)?))
    }

    pub fn torus(center: Vec<f64>, major: f64, minor: f64) -> Result<Manifold> {
        Ok(Self::implicit(Torus::new(center, major, minor)?))
    }

    pub fn polynomial(dim: usize, terms: Vec<Monomial>) -> Result<Manifold> {
        Ok(Self::implicit(Polynomial::new(dim, terms)?))
    }

    pub fn chart_grid(rows: usize, cols: usize, control: Vec<Vec<f64>>) -> Result<Manifold> {
        let patch = BSplinePatch::new(rows, cols, control)?;
        let (lower, upper) = patch.domain();
        Self::chart(patch, lower, upper)
    }

    /// Restricts closest-point queries to points within `radius` of M.
    pub fn with_neighborhood(mut self, radius: f64) -> Manifold {
        match &mut self {
            Manifold::Implicit(s) => s.neighborhood = radius,
            Manifold::Chart(c) => c.neighborhood = radius,
        }
        self
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            Manifold::Implicit(s) => s.level.ambient_dim(),
            Manifold::Chart(c) => c.map.ambient_dim(),
        }
    }

    pub fn manifold_dim(&self) -> usize {
        match self {
            Manifold::Implicit(s) => s.level.ambient_dim() - 1,
            Manifold::Chart(c) => c.map.param_dim(),
        }
    }

    /// `F(x)` for implicit manifolds.
    pub fn level_value(&self, x: &DVector<f64>) -> Option<f64> {
        match self {
            Manifold::Implicit(s) => Some(s.level.value(x)),
            Manifold::Chart(_) => None,
        }
    }

    pub fn closest_point(&self, q: &ContinuousPoint) -> Result<ContinuousPoint> {
        let foot = self.footpoint(q.as_vector())?;
        ContinuousPoint::from_vector(foot.point)
    }

    pub fn footpoint(&self, q: &DVector<f64>) -> Result<Footpoint> {
        check_dims(self.ambient_dim(), q.len())?;
        let (foot, radius) = match self {
            Manifold::Implicit(s) => (Self::implicit_footpoint(s, q)?, s.neighborhood),
            Manifold::Chart(c) => (Self::chart_footpoint(c, q)?, c.neighborhood),
        };
        if foot.distance > radius {
            return Err(Error::OutsideNeighborhood {
                distance: foot.distance,
                radius,
            });
        }
        Ok(foot)
    }

    fn implicit_footpoint(s: &ImplicitHypersurface, q: &DVector<f64>) -> Result<Footpoint> {
        let level = &*s.level;
        let primary =
            normal_projection(level, q.clone(), 1e-9).and_then(|x| refine_implicit(level, q, x));
        match primary {
            Err(Error::Singularity { ref point, .. }) if point.as_slice() == q.as_slice() => {
                primary
            }
            Err(e @ (Error::NonConvergence { .. } | Error::Singularity { .. })) => {
                ray_footpoint(level, q).ok_or(e)
            }
            other => other,
        }
    }

    fn chart_footpoint(c: &ParametricChart, q: &DVector<f64>) -> Result<Footpoint> {
        let mut results: Vec<(f64, DVector<f64>, DVector<f64>)> = c
            .seeds(q)
            .into_iter()
            .map(|seed| c.descend(q, seed))
            .collect();
        results.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (distance, u, x) = results[0].clone();
        let ambiguous = results[1..].iter().any(|(d, _, other)| {
            (d - distance).abs() <= 1e-9 * distance.max(1.0) && (other - &x).norm() > 1e-6
        });

        let frame = Self::chart_frame(c, &u)?;
        if c.is_interior(&u) {
            let residual = frame.split(&(q - &x)).tangential.norm();
            if residual > NORMAL_ALIGNMENT_TOL {
                return Err(Error::NonConvergence {
                    last: x.as_slice().to_vec(),
                    residual,
                    iterations: MAX_ITERATIONS,
                });
            }
        }
        Ok(Footpoint {
            point: x,
            param: Some(u),
            distance,
            ambiguous,
        })
    }

    fn chart_frame(c: &ParametricChart, u: &DVector<f64>) -> Result<LocalFrame> {
        let jacobian = c.map.jacobian(u);
        let k = jacobian.ncols();
        let svd = jacobian.clone().svd(true, false);
        let sigma = &svd.singular_values;
        let (smax, smin) = (sigma.max(), sigma.min());
        if !smax.is_finite() || smin <= 1e-10 * smax {
            return Err(Error::ImmersionViolation {
                param: u.as_slice().to_vec(),
            });
        }
        let tangent = svd
            .u
            .expect("left singular vectors requested")
            .columns(0, k)
            .into_owned();
        Ok(LocalFrame::Chart {
            tangent,
            jacobian,
            param: u.clone(),
        })
    }

    pub(crate) fn frame_at_footpoint(&self, foot: &Footpoint) -> Result<LocalFrame> {
        match self {
            Manifold::Implicit(s) => {
                let g = s.level.gradient(&foot.point);
                let g_norm = g.norm();
                if g_norm.is_nan() || g_norm < SINGULAR_GRADIENT {
                    return Err(Error::Singularity {
                        point: foot.point.as_slice().to_vec(),
                        norm: g_norm,
                    });
                }
                Ok(LocalFrame::Implicit {
                    unit_normal: g / g_norm,
                    shape: s.level.hessian(&foot.point) / g_norm,
                })
            }
            Manifold::Chart(c) => {
                let u = match &foot.param {
                    Some(u) => u.clone(),
                    None => Self::chart_footpoint(c, &foot.point)?
                        .param
                        .expect("chart footpoint has parameters"),
                };
                Self::chart_frame(c, &u)
            }
        }
    }

    fn frame_at(&self, p: &DVector<f64>) -> Result<LocalFrame> {
        check_dims(self.ambient_dim(), p.len())?;
        match self {
            Manifold::Implicit(_) => self.frame_at_footpoint(&Footpoint {
                point: p.clone(),
                param: None,
                distance: 0.0,
                ambiguous: false,
            }),
            Manifold::Chart(c) => {
                let foot = Self::chart_footpoint(c, p)?;
                self.frame_at_footpoint(&foot)
            }
        }
    }

    /// Splits `v` into its components along `T_pM` and `N_pM`.
    pub fn split_tangent_normal(
        &self,
        p: &ContinuousPoint,
        v: &DVector<f64>,
    ) -> Result<TangentNormalSplit> {
        check_dims(self.ambient_dim(), v.len())?;
        Ok(self.frame_at(p.as_vector())?.split(v))
    }

    fn require_surface_in_r3(&self) -> Result<()> {
        if self.manifold_dim() != 2 || self.ambient_dim() != 3 {
            return Err(Error::UnsupportedDimension {
                manifold_dim: self.manifold_dim(),
                ambient_dim: self.ambient_dim(),
            });
        }
        Ok(())
    }

    /// Second fundamental form as a bilinear form on ambient tangent vectors.
    /// Only meaningful up to the sign of the normal.
    fn second_form(&self, frame: &LocalFrame) -> Result<SecondForm> {
        match frame {
            LocalFrame::Implicit { shape, .. } => Ok(SecondForm::Ambient(shape.clone())),
            LocalFrame::Chart {
                jacobian, param, ..
            } => {
                let Manifold::Chart(c) = self else {
                    unreachable!("chart frame built from a chart manifold")
                };
                let metric = jacobian.transpose() * jacobian;
                let det = metric.determinant();
                let trace = metric.trace();
                if det.is_nan() || det <= 1e-12 * trace * trace {
                    return Err(Error::SingularMetric { determinant: det });
                }
                let normal = cross(
                    &jacobian.column(0).into_owned(),
                    &jacobian.column(1).into_owned(),
                );
                let normal = &normal / normal.norm();
                let mut form = DMatrix::zeros(2, 2);
                for (a, s) in c.map.second_derivatives(param).iter().enumerate() {
                    form += s * normal[a];
                }
                let to_params = metric
                    .clone()
                    .try_inverse()
                    .ok_or(Error::SingularMetric { determinant: det })?
                    * jacobian.transpose();
                Ok(SecondForm::Chart {
                    form,
                    metric,
                    to_params,
                })
            }
        }
    }

    pub(crate) fn gaussian_curvature_at(&self, foot: &Footpoint) -> Result<f64> {
        self.require_surface_in_r3()?;
        let frame = self.frame_at_footpoint(foot)?;
        match self.second_form(&frame)? {
            SecondForm::Ambient(shape) => {
                let LocalFrame::Implicit { unit_normal, .. } = &frame else {
                    unreachable!()
                };
                let basis = complement_basis(unit_normal);
                let reduced = basis.transpose() * shape * &basis;
                Ok(reduced.determinant())
            }
            SecondForm::Chart { form, metric, .. } => Ok(form.determinant() / metric.determinant()),
        }
    }

    /// Gaussian curvature `det II / det I` at a point of a 2-surface in R^3.
    pub fn gaussian_curvature(&self, p: &ContinuousPoint) -> Result<f64> {
        self.require_surface_in_r3()?;
        check_dims(3, p.dim())?;
        let foot = match self {
            Manifold::Implicit(_) => Footpoint {
                point: p.as_vector().clone(),
                param: None,
                distance: 0.0,
                ambiguous: false,
            },
            Manifold::Chart(c) => Self::chart_footpoint(c, p.as_vector())?,
        };
        self.gaussian_curvature_at(&foot)
    }

    /// Sectional curvature of the tangent plane spanned by `v` and `w`.
    pub fn sectional_curvature(
        &self,
        p: &ContinuousPoint,
        v: &DVector<f64>,
        w: &DVector<f64>,
    ) -> Result<f64> {
        self.require_surface_in_r3()?;
        check_dims(3, p.dim())?;
        check_dims(3, v.len())?;
        check_dims(3, w.len())?;
        let frame = self.frame_at(p.as_vector())?;
        for vec in [v, w] {
            let normal = frame.split(vec).normal.norm();
            if normal > TANGENCY_TOL * vec.norm() {
                return Err(Error::NotTangent { normal });
            }
        }
        let gram = v.norm_squared() * w.norm_squared() - v.dot(w).powi(2);
        if gram.is_nan() || gram <= GRAM_TOL {
            return Err(Error::DependentVectors { gram });
        }
        let form = self.second_form(&frame)?;
        let (vv, ww, vw) = (form.eval(v, v), form.eval(w, w), form.eval(v, w));
        Ok((vv * ww - vw * vw) / gram)
    }
}

enum SecondForm {
    Ambient(DMatrix<f64>),
    Chart {
        form: DMatrix<f64>,
        metric: DMatrix<f64>,
        /// Maps a tangent vector to its parameter-space coordinates.
        to_params: DMatrix<f64>,
    },
}

impl SecondForm {
    fn eval(&self, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
        match self {
            SecondForm::Ambient(shape) => v.dot(&(shape * w)),
            SecondForm::Chart {
                form, to_params, ..
            } => {
                let a = to_params * v;
                let b = to_params * w;
                a.dot(&(form * b))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cp(c: &[f64]) -> ContinuousPoint {
        ContinuousPoint::new(c.to_vec()).unwrap()
    }

    fn v(c: &[f64]) -> DVector<f64> {
        DVector::from_vec(c.to_vec())
    }

    fn unit_sphere() -> Manifold {
        Manifold::sphere(vec![0.0; 3], 1.0).unwrap()
    }

    fn plane_z() -> Manifold {
        Manifold::plane(vec![0.0, 0.0, 1.0], 0.0).unwrap()
    }

    fn torus_chart() -> Manifold {
        Manifold::chart(
            TorusChart {
                center: [0.0; 3],
                major: 2.0,
                minor: 0.5,
            },
            vec![0.0, 0.0],
            vec![2.0 * PI, 2.0 * PI],
        )
        .unwrap()
    }

    fn close(a: &DVector<f64>, b: &[f64], tol: f64) -> bool {
        (a - v(b)).amax() <= tol
    }

    #[test]
    fn closest_point_examples() {
        let p = unit_sphere().closest_point(&cp(&[2.0, 0.0, 0.0])).unwrap();
        assert!(close(p.as_vector(), &[1.0, 0.0, 0.0], 1e-12));
        let p = plane_z().closest_point(&cp(&[1.0, 2.0, 3.0])).unwrap();
        assert!(close(p.as_vector(), &[1.0, 2.0, 0.0], 1e-12));
        let torus = Manifold::torus(vec![0.0; 3], 2.0, 0.5).unwrap();
        let p = torus.closest_point(&cp(&[3.0, 0.0, 0.0])).unwrap();
        assert!(close(p.as_vector(), &[2.5, 0.0, 0.0], 1e-10));
    }

    #[test]
    fn chart_closest_point_matches_implicit() {
        let q = v(&[1.1, 2.3, 0.3]);
        let a = torus_chart().footpoint(&q).unwrap();
        let b = Manifold::torus(vec![0.0; 3], 2.0, 0.5)
            .unwrap()
            .footpoint(&q)
            .unwrap();
        assert!(
            (&a.point - &b.point).norm() < 1e-9,
            "{} vs {}",
            a.point,
            b.point
        );
        assert!(!a.ambiguous);
    }

    #[test]
    fn sphere_center_is_singular() {
        let err = unit_sphere()
            .closest_point(&cp(&[0.0, 0.0, 0.0]))
            .unwrap_err();
        assert!(matches!(err, Error::Singularity { .. }));
    }

    #[test]
    fn near_center_is_flagged_ambiguous() {
        let foot = unit_sphere().footpoint(&v(&[1e-9, 0.0, 0.0])).unwrap();
        assert!(foot.ambiguous);
        assert!(close(&foot.point, &[1.0, 0.0, 0.0], 1e-12));
        let foot = unit_sphere().footpoint(&v(&[0.5, 0.0, 0.0])).unwrap();
        assert!(!foot.ambiguous);
    }

    #[test]
    fn torus_chart_axis_is_ambiguous() {
        let foot = torus_chart().footpoint(&v(&[0.0, 0.0, 0.3])).unwrap();
        assert!(foot.ambiguous);
    }

    #[test]
    fn torus_axis_falls_back_to_rays() {
        let torus = Manifold::torus(vec![0.0; 3], 2.0, 0.5).unwrap();
        let on_axis = torus.footpoint(&v(&[0.0, 0.0, -2.0])).unwrap();
        assert!(on_axis.ambiguous);
        let expected = (2.0f64.powi(2) + 2.0f64.powi(2)).sqrt() - 0.5;
        assert!((on_axis.distance - expected).abs() < 1e-9);

        let off_axis = torus.footpoint(&v(&[1e-6, 0.0, -2.0])).unwrap();
        let ring = 2.0 / 8.0f64.sqrt();
        assert!(close(
            &off_axis.point,
            &[2.0 - 0.5 * ring, 0.0, -0.5 * ring],
            1e-5
        ));
    }

    #[test]
    fn distance_maximizers_are_rejected() {
        let torus = Manifold::torus(vec![0.0; 3], 2.0, 0.5).unwrap();
        let foot = torus.footpoint(&v(&[2.000001, 0.0, 0.0])).unwrap();
        assert!(close(&foot.point, &[2.5, 0.0, 0.0], 1e-8), "{foot:?}");
        let foot = torus.footpoint(&v(&[1.999999, 0.0, 0.0])).unwrap();
        assert!(close(&foot.point, &[1.5, 0.0, 0.0], 1e-8), "{foot:?}");
    }

    #[test]
    fn torus_footpoint_next_to_the_core_circle() {
        let torus = Manifold::torus(vec![0.0; 3], 2.0, 0.5).unwrap();
        let (dx, dz) = (1e-6, 1e-5);
        let foot = torus.footpoint(&v(&[-2.0 + dx, 0.0, dz])).unwrap();
        let len = (dx * dx + dz * dz).sqrt();
        assert!(close(
            &foot.point,
            &[-2.0 + 0.5 * dx / len, 0.0, 0.5 * dz / len],
            1e-9
        ));
    }

    #[test]
    fn neighborhood_is_enforced() {
        let m = unit_sphere().with_neighborhood(0.5);
        let err = m.closest_point(&cp(&[3.0, 0.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::OutsideNeighborhood { .. }));
        assert!(m.closest_point(&cp(&[1.2, 0.0, 0.0])).is_ok());
    }

    #[test]
    fn dimension_checks() {
        assert!(matches!(
            unit_sphere().closest_point(&cp(&[1.0, 0.0])),
            Err(Error::DimensionMismatch { left: 3, right: 2 })
        ));
    }

    #[test]
    fn split_examples() {
        let s = unit_sphere()
            .split_tangent_normal(&cp(&[1.0, 0.0, 0.0]), &v(&[0.5, 0.2, 0.0]))
            .unwrap();
        assert!(close(&s.tangential, &[0.0, 0.2, 0.0], 1e-15));
        assert!(close(&s.normal, &[0.5, 0.0, 0.0], 1e-15));

        let s = plane_z()
            .split_tangent_normal(&cp(&[0.0, 0.0, 0.0]), &v(&[1.0, 2.0, 3.0]))
            .unwrap();
        assert!(close(&s.tangential, &[1.0, 2.0, 0.0], 1e-15));
        assert!(close(&s.normal, &[0.0, 0.0, 3.0], 1e-15));

        for m in [unit_sphere(), plane_z(), torus_chart()] {
            let p = m.closest_point(&cp(&[2.0, 0.3, 0.2])).unwrap();
            let s = m.split_tangent_normal(&p, &v(&[0.0; 3])).unwrap();
            assert_eq!(s.tangential.norm(), 0.0);
            assert_eq!(s.normal.norm(), 0.0);
        }
    }

    #[test]
    fn split_on_chart() {
        let m = torus_chart();
        let s = m
            .split_tangent_normal(&cp(&[2.5, 0.0, 0.0]), &v(&[1.0, 2.0, 3.0]))
            .unwrap();
        assert!(close(&s.normal, &[1.0, 0.0, 0.0], 1e-10));
        assert!(close(&s.tangential, &[0.0, 2.0, 3.0], 1e-10));
    }

    #[test]
    fn singular_split_and_rank_deficient_chart() {
        let cyl = Manifold::cylinder(vec![0.0; 3], vec![0.0, 0.0, 1.0], 1.0).unwrap();
        let err = cyl
            .split_tangent_normal(&cp(&[0.0, 0.0, 5.0]), &v(&[1.0, 0.0, 0.0]))
            .unwrap_err();
        assert!(matches!(err, Error::Singularity { .. }));

        // The polar chart degenerates at theta = 0.
        let sphere = Manifold::chart(
            SphereChart {
                center: [0.0; 3],
                radius: 1.0,
            },
            vec![0.0, 0.0],
            vec![PI, 2.0 * PI],
        )
        .unwrap();
        let err = sphere
            .split_tangent_normal(&cp(&[0.0, 0.0, 1.0]), &v(&[1.0, 0.0, 0.0]))
            .unwrap_err();
        assert!(matches!(err, Error::ImmersionViolation { .. }));
    }

    #[test]
    fn curvature_examples() {
        for p in [[1.0, 0.0, 0.0], [0.0, 0.6, 0.8]] {
            let k = unit_sphere().gaussian_curvature(&cp(&p)).unwrap();
            assert!((k - 1.0).abs() < 1e-12);
        }
        let k = plane_z()
            .gaussian_curvature(&cp(&[3.0, -1.0, 0.0]))
            .unwrap();
        assert_eq!(k, 0.0);
        let torus = Manifold::torus(vec![0.0; 3], 2.0, 0.5).unwrap();
        let k = torus.gaussian_curvature(&cp(&[2.5, 0.0, 0.0])).unwrap();
        assert!((k - 0.8).abs() < 1e-12, "{k}");
        let k = torus_chart()
            .gaussian_curvature(&cp(&[2.5, 0.0, 0.0]))
            .unwrap();
        assert!((k - 0.8).abs() < 1e-9, "{k}");
    }

    #[test]
    fn sectional_examples() {
        let k = unit_sphere()
            .sectional_curvature(
                &cp(&[0.0, 0.0, 1.0]),
                &v(&[1.0, 0.0, 0.0]),
                &v(&[0.0, 1.0, 0.0]),
            )
            .unwrap();
        assert!((k - 1.0).abs() < 1e-12);
        let k = plane_z()
            .sectional_curvature(
                &cp(&[0.0, 0.0, 0.0]),
                &v(&[1.0, 1.0, 0.0]),
                &v(&[0.0, 2.0, 0.0]),
            )
            .unwrap();
        assert_eq!(k, 0.0);
    }

    #[test]
    fn sectional_errors() {
        let s = unit_sphere();
        let p = cp(&[0.0, 0.0, 1.0]);
        assert!(matches!(
            s.sectional_curvature(&p, &v(&[1.0, 0.0, 0.1]), &v(&[0.0, 1.0, 0.0])),
            Err(Error::NotTangent { .. })
        ));
        assert!(matches!(
            s.sectional_curvature(&p, &v(&[1.0, 0.0, 0.0]), &v(&[2.0, 0.0, 0.0])),
            Err(Error::DependentVectors { .. })
        ));
    }

    #[test]
    fn curvature_unsupported_outside_r3() {
        let s4 = Manifold::sphere(vec![0.0; 4], 1.0).unwrap();
        assert!(matches!(
            s4.gaussian_curvature(&cp(&[1.0, 0.0, 0.0, 0.0])),
            Err(Error::UnsupportedDimension {
                manifold_dim: 3,
                ambient_dim: 4
            })
        ));
        let circle = Manifold::sphere(vec![0.0; 2], 1.0).unwrap();
        assert!(circle.gaussian_curvature(&cp(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn complement_basis_is_orthonormal() {
        for n in [
            v(&[0.0, 0.0, 1.0]),
            v(&[0.6, -0.8, 0.0]),
            v(&[-0.5, 0.5, 0.5, 0.5]),
        ] {
            let b = complement_basis(&n);
            assert_eq!(b.ncols(), n.len() - 1);
            assert!((b.transpose() * &b - DMatrix::identity(b.ncols(), b.ncols())).amax() < 1e-15);
            assert!((b.transpose() * &n).amax() < 1e-15);
        }
    }
}
