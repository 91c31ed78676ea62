//! Built-in example configs.

pub const NAMES: [&str; 4] = ["plane", "sphere", "torus", "cylinder"];

const PLANE: &str = r#"# 5x5 grid lifted to z = 1, projected onto the plane z = 0.
[lattice]
lower = [0, 0, 1]
upper = [4, 4, 1]

[manifold]
kind = "plane"
normal = [0.0, 0.0, 1.0]
offset = 0.0

[fields.activation]
epsilon = 0.25

[objective]
alpha = 1.0
beta = 1.0
lambda = 0.0
gamma = 1.0
kappa_w = 0.0

[optimizer]
grad_tol = 1e-6
max_iters = 10000
initial_step = 0.1
seed = 7

[output]
dir = "plane-output"
points_csv = "points.csv"
edges_csv = "edges.csv"
report = "report.toml"
"#;

const SPHERE: &str = r#"# 3x3x3 cube around the center of the unit sphere. The center point starts
# on the medial axis and is nudged before descent.
[lattice]
lower = [-1, -1, -1]
upper = [1, 1, 1]

[manifold]
kind = "sphere"
center = [0.0, 0.0, 0.0]
radius = 1.0

[fields.activation]
epsilon = 0.25

[[fields.reinforcement.regions]]
shape = "ball"
center = [0.0, 0.0, 1.0]
radius = 0.5

[objective]
alpha = 1.0
beta = 1.0
lambda = 0.5
gamma = 1.0
kappa_w = 0.0

[optimizer]
grad_tol = 1e-6
max_iters = 10000
initial_step = 0.1
seed = 7

[output]
dir = "sphere-output"
"#;

const TORUS: &str = r#"# Planar 5x5 grid through a torus with major radius 2 and minor radius 0.5.
[lattice]
lower = [-2, -2, 0]
upper = [2, 2, 0]

[manifold]
kind = "torus"
center = [0.0, 0.0, 0.0]
major = 2.0
minor = 0.5

[fields.activation]
epsilon = 0.25

[objective]
alpha = 1.0
beta = 1.0
lambda = 0.0
gamma = 1.0
kappa_w = 0.01

[optimizer]
grad_tol = 1e-6
max_iters = 10000
initial_step = 0.1
seed = 7

[output]
dir = "torus-output"
"#;

const CYLINDER: &str = r#"# 3x3x3 cube around the axis of a unit cylinder.
[lattice]
lower = [-1, -1, -1]
upper = [1, 1, 1]

[manifold]
kind = "cylinder"
center = [0.0, 0.0, 0.0]
axis = [0.0, 0.0, 1.0]
radius = 1.0

[fields.activation]
epsilon = 0.25

[[fields.reinforcement.regions]]
shape = "box"
lower = [-2.0, -2.0, 0.5]
upper = [2.0, 2.0, 2.0]

[objective]
alpha = 1.0
beta = 2.0
lambda = 1.0
gamma = 1.0
kappa_w = 0.0

[optimizer]
grad_tol = 1e-6
max_iters = 10000
initial_step = 0.1
seed = 7

[output]
dir = "cylinder-output"
"#;

pub fn config(name: &str) -> Option<&'static str> {
    match name {
        "plane" => Some(PLANE),
        "sphere" => Some(SPHERE),
        "torus" => Some(TORUS),
        "cylinder" => Some(CYLINDER),
        _ => None,
    }
}
