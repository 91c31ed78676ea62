//! Run configuration: a strict TOML schema plus cross-field validation.
//!
//! Parsing rejects unknown keys. [`RunConfig::prepare`] then builds the
//! library objects and reports every semantic problem it finds, each tied to
//! a dotted field path and, when it can be found, a line in the source.

use std::fmt;
use std::path::Path;

use latembed::manifold::Monomial;
use latembed::{
    generate_box_lattice, ActivationField, Fields, Lattice, LatticePoint, Manifold,
    ObjectiveParams, Region, ReinforcementField, StepControl, StopCriteria,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub lattice: LatticeConfig,
    pub manifold: ManifoldConfig,
    #[serde(default)]
    pub fields: FieldsConfig,
    #[serde(default)]
    pub objective: ObjectiveConfig,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Either a box `lower..=upper` or an explicit point list.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<i64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ManifoldConfig {
    Plane {
        normal: Vec<f64>,
        #[serde(default)]
        offset: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        neighborhood: Option<f64>,
    },
    Sphere {
        center: Vec<f64>,
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        neighborhood: Option<f64>,
    },
    Cylinder {
        center: Vec<f64>,
        axis: Vec<f64>,
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        neighborhood: Option<f64>,
    },
    Torus {
        center: Vec<f64>,
        major: f64,
        minor: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        neighborhood: Option<f64>,
    },
    ImplicitPolynomial {
        dim: usize,
        terms: Vec<Monomial>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        neighborhood: Option<f64>,
    },
    /// Bicubic B-spline patch; `control` is row-major with `rows * cols` points.
    ChartGrid {
        rows: usize,
        cols: usize,
        control: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        neighborhood: Option<f64>,
    },
}

impl ManifoldConfig {
    fn neighborhood(&self) -> Option<f64> {
        match self {
            ManifoldConfig::Plane { neighborhood, .. }
            | ManifoldConfig::Sphere { neighborhood, .. }
            | ManifoldConfig::Cylinder { neighborhood, .. }
            | ManifoldConfig::Torus { neighborhood, .. }
            | ManifoldConfig::ImplicitPolynomial { neighborhood, .. }
            | ManifoldConfig::ChartGrid { neighborhood, .. } => *neighborhood,
        }
    }

    fn build(&self) -> latembed::Result<Manifold> {
        let m = match self.clone() {
            ManifoldConfig::Plane { normal, offset, .. } => Manifold::plane(normal, offset),
            ManifoldConfig::Sphere { center, radius, .. } => Manifold::sphere(center, radius),
            ManifoldConfig::Cylinder {
                center,
                axis,
                radius,
                ..
            } => Manifold::cylinder(center, axis, radius),
            ManifoldConfig::Torus {
                center,
                major,
                minor,
                ..
            } => Manifold::torus(center, major, minor),
            ManifoldConfig::ImplicitPolynomial { dim, terms, .. } => {
                Manifold::polynomial(dim, terms)
            }
            ManifoldConfig::ChartGrid {
                rows,
                cols,
                control,
                ..
            } => Manifold::chart_grid(rows, cols, control),
        }?;
        Ok(match self.neighborhood() {
            Some(r) => m.with_neighborhood(r),
            None => m,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldsConfig {
    #[serde(default)]
    pub activation: ActivationConfig,
    #[serde(default)]
    pub reinforcement: ReinforcementConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActivationConfig {
    pub epsilon: f64,
}

impl Default for ActivationConfig {
    fn default() -> Self {
        ActivationConfig {
            epsilon: latembed::fields::DEFAULT_EPSILON,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReinforcementConfig {
    #[serde(default)]
    pub regions: Vec<Region>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObjectiveConfig {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub kappa_w: f64,
}

impl Default for ObjectiveConfig {
    fn default() -> Self {
        let p = ObjectiveParams::default();
        ObjectiveConfig {
            alpha: p.alpha,
            beta: p.beta,
            lambda: p.lambda,
            gamma: p.gamma,
            kappa_w: p.kappa_w,
        }
    }
}

/// The seed is recorded in the report; the solver itself is deterministic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    pub grad_tol: f64,
    pub max_iters: usize,
    pub initial_step: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        let stop = StopCriteria::default();
        OptimizerConfig {
            grad_tol: stop.grad_tol,
            max_iters: stop.max_iters,
            initial_step: StepControl::default().initial_step,
            seed: 0,
        }
    }
}

/// Output locations. A relative `dir` is resolved against the directory
/// holding the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: String,
    pub points_csv: String,
    pub edges_csv: String,
    pub report: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: "output".into(),
            points_csv: "points.csv".into(),
            edges_csv: "edges.csv".into(),
            report: "report.toml".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}: {}", self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

/// Library objects built from a valid config.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub lattice: Lattice,
    pub manifold: Manifold,
    pub fields: Fields,
    pub params: ObjectiveParams,
    pub stop: StopCriteria,
    pub control: StepControl,
}

impl RunConfig {
    pub fn from_toml(source: &str) -> Result<RunConfig, Vec<Diagnostic>> {
        toml::from_str(source).map_err(|e| vec![parse_diagnostic(source, &e)])
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Builds the run inputs, or every problem found. `source` is only used
    /// to attach line numbers.
    pub fn prepare(&self, source: &str) -> Result<Prepared, Vec<Diagnostic>> {
        let mut out = Vec::new();
        let mut report = |section: &str, key: &str, message: String| {
            out.push(Diagnostic {
                line: locate(source, section, key),
                field: if key.is_empty() {
                    section.to_string()
                } else {
                    format!("{section}.{key}")
                },
                message,
            });
        };

        let lattice = match build_lattice(&self.lattice) {
            Ok(l) => Some(l),
            Err((key, message)) => {
                report("lattice", key, message);
                None
            }
        };

        let manifold = match self.manifold.build() {
            Ok(m) => Some(m),
            Err(e) => {
                report("manifold", "", e.to_string());
                None
            }
        };
        if let Some(r) = self.manifold.neighborhood() {
            if r.is_nan() || r <= 0.0 {
                report(
                    "manifold",
                    "neighborhood",
                    format!("must be positive, got {r}"),
                );
            }
        }

        if let (Some(l), Some(m)) = (&lattice, &manifold) {
            if l.dimension() != m.ambient_dim() {
                report(
                    "lattice",
                    "",
                    format!(
                        "lattice dimension {} does not match the manifold's ambient dimension {}",
                        l.dimension(),
                        m.ambient_dim()
                    ),
                );
            }
        }

        let eps = self.fields.activation.epsilon;
        if !(eps.is_finite() && eps > 0.0) {
            report(
                "fields.activation",
                "epsilon",
                format!("must be positive and finite, got {eps}"),
            );
        }
        for (i, region) in self.fields.reinforcement.regions.iter().enumerate() {
            let section = "fields.reinforcement.regions";
            if let Err(e) = region.validate() {
                report(section, "", format!("region {i}: {e}"));
            }
            if let Some(m) = &manifold {
                if region.dim() != m.ambient_dim() {
                    report(
                        section,
                        "",
                        format!("region {i} has dimension {} but the manifold's ambient dimension is {}", region.dim(), m.ambient_dim()),
                    );
                }
            }
        }

        let o = &self.objective;
        for (key, value) in [
            ("alpha", o.alpha),
            ("beta", o.beta),
            ("lambda", o.lambda),
            ("gamma", o.gamma),
            ("kappa_w", o.kappa_w),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                report(
                    "objective",
                    key,
                    format!("must be nonnegative and finite, got {value}"),
                );
            }
        }

        let opt = &self.optimizer;
        if !(opt.grad_tol.is_finite() && opt.grad_tol > 0.0) {
            report(
                "optimizer",
                "grad_tol",
                format!("must be positive, got {}", opt.grad_tol),
            );
        }
        if !(opt.initial_step.is_finite() && opt.initial_step > 0.0) {
            report(
                "optimizer",
                "initial_step",
                format!("must be positive, got {}", opt.initial_step),
            );
        }

        for (key, value) in [
            ("dir", &self.output.dir),
            ("points_csv", &self.output.points_csv),
            ("edges_csv", &self.output.edges_csv),
            ("report", &self.output.report),
        ] {
            if value.trim().is_empty() {
                report("output", key, "must not be empty".into());
            }
        }

        let fields = match &manifold {
            Some(m) if out.is_empty() => {
                let built = ActivationField::new(m.clone(), eps).and_then(|activation| {
                    Fields::new(
                        activation,
                        ReinforcementField::new(self.fields.reinforcement.regions.clone())?,
                    )
                });
                match built {
                    Ok(f) => Some(f),
                    Err(e) => {
                        out.push(Diagnostic {
                            line: None,
                            field: "fields".into(),
                            message: e.to_string(),
                        });
                        None
                    }
                }
            }
            _ => None,
        };

        match (out.is_empty(), lattice, manifold, fields) {
            (true, Some(lattice), Some(manifold), Some(fields)) => Ok(Prepared {
                lattice,
                manifold,
                fields,
                params: ObjectiveParams {
                    alpha: o.alpha,
                    beta: o.beta,
                    lambda: o.lambda,
                    gamma: o.gamma,
                    kappa_w: o.kappa_w,
                },
                stop: StopCriteria {
                    grad_tol: opt.grad_tol,
                    max_iters: opt.max_iters,
                },
                control: StepControl {
                    initial_step: opt.initial_step,
                    ..StepControl::default()
                },
            }),
            _ => Err(out),
        }
    }
}

fn build_lattice(c: &LatticeConfig) -> Result<Lattice, (&'static str, String)> {
    let point = |v: &Vec<i64>| LatticePoint::new(v.clone());
    match (&c.lower, &c.upper, &c.points) {
        (Some(lower), Some(upper), None) => {
            let (lo, hi) = (
                point(lower).map_err(|e| ("lower", e.to_string()))?,
                point(upper).map_err(|e| ("upper", e.to_string()))?,
            );
            generate_box_lattice(&lo, &hi).map_err(|e| ("", e.to_string()))
        }
        (None, None, Some(points)) => {
            let first = points
                .first()
                .ok_or(("points", "must list at least one point".to_string()))?;
            let pts = points
                .iter()
                .map(point)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| ("points", e.to_string()))?;
            Lattice::new(first.len(), pts).map_err(|e| ("points", e.to_string()))
        }
        _ => Err((
            "",
            "give either both `lower` and `upper`, or `points`".to_string(),
        )),
    }
}

/// Parses and prepares `source`, returning every diagnostic.
pub fn validate_str(source: &str) -> Vec<Diagnostic> {
    match RunConfig::from_toml(source) {
        Ok(config) => config.prepare(source).err().unwrap_or_default(),
        Err(d) => d,
    }
}

/// Reads and checks a config file without running it. An empty list means
/// the config is valid.
pub fn validate(path: &Path) -> std::io::Result<Vec<Diagnostic>> {
    Ok(validate_str(&std::fs::read_to_string(path)?))
}

fn line_of(source: &str, offset: usize) -> usize {
    source[..offset.min(source.len())].matches('\n').count() + 1
}

fn header_of(line: &str) -> Option<&str> {
    let t = line.trim();
    let inner = t
        .strip_prefix("[[")
        .and_then(|r| r.split("]]").next())
        .or_else(|| t.strip_prefix('[').and_then(|r| r.split(']').next()))?;
    Some(inner.trim())
}

/// Line of `key = ...` inside table `section`, or of the section header when
/// `key` is empty or absent.
fn locate(source: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = "";
    let mut header_line = None;
    for (i, line) in source.lines().enumerate() {
        if let Some(h) = header_of(line) {
            current = h;
            if current == section && header_line.is_none() {
                header_line = Some(i + 1);
            }
            continue;
        }
        if current == section && !key.is_empty() {
            if let Some(rest) = line.trim_start().strip_prefix(key) {
                if rest.trim_start().starts_with('=') {
                    return Some(i + 1);
                }
            }
        }
    }
    header_line
}

fn parse_diagnostic(source: &str, e: &toml::de::Error) -> Diagnostic {
    let message = e.message().trim().to_string();
    let Some(span) = e.span() else {
        return Diagnostic {
            line: None,
            field: "config".into(),
            message,
        };
    };
    let line = line_of(source, span.start);
    let section = source
        .lines()
        .take(line)
        .filter_map(header_of)
        .last()
        .unwrap_or("");
    let key = source.get(span.clone()).unwrap_or("").trim();
    let key = key.split(['=', '\n']).next().unwrap_or("").trim();
    let field = match (section.is_empty(), key.is_empty() || key.starts_with('[')) {
        (true, _) => key.to_string(),
        (false, true) => section.to_string(),
        (false, false) => format!("{section}.{key}"),
    };
    Diagnostic {
        line: Some(line),
        field,
        message,
    }
}
