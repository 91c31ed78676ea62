//! Acceptance suite. Each criterion runs under its wall-clock budget and
//! prints one PASS or FAIL line; the process fails if any criterion does.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use latembed::lattice::{embed, generate_box_lattice, grid_distance, is_adjacent, join, meet};
use latembed::manifold::{Numeric, Sphere};
use latembed::objective::{objective_gradient, total_objective};
use latembed::optimizer::optimize;
use latembed::{
    ActivationField, ContinuousPoint, EmbeddingState, Fields, Lattice, LatticePoint, Manifold,
    ObjectiveParams, Region, ReinforcementField, StepControl, StopCriteria, Termination,
};
use latembed_cli::config::RunConfig;
use latembed_cli::demo;
use latembed_cli::run::{read_points, run_config};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

macro_rules! check {
    ($cond:expr, $($msg:tt)+) => {
        match $cond {
            true => {}
            false => return Err(format!($($msg)+)),
        }
    };
}

fn lp(c: Vec<i64>) -> LatticePoint {
    LatticePoint::new(c).unwrap()
}

fn cp(v: &DVector<f64>) -> ContinuousPoint {
    ContinuousPoint::from_vector(v.clone()).unwrap()
}

fn v3(x: f64, y: f64, z: f64) -> DVector<f64> {
    DVector::from_vec(vec![x, y, z])
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> LatticePoint {
    lp((0..n).map(|_| rng.gen_range(-1000..=1000)).collect())
}

fn lattice_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let m = |a: &LatticePoint, b: &LatticePoint| meet(a, b).unwrap();
    let j = |a: &LatticePoint, b: &LatticePoint| join(a, b).unwrap();
    let le = |a: &LatticePoint, b: &LatticePoint| a.le_componentwise(b).unwrap();
    let per_dim = 1000;
    for n in 1..=5 {
        for _ in 0..per_dim {
            let (a, b, c) = (
                random_point(&mut rng, n),
                random_point(&mut rng, n),
                random_point(&mut rng, n),
            );
            check!(
                m(&a, &b) == m(&b, &a) && j(&a, &b) == j(&b, &a),
                "commutativity fails at {a} {b}"
            );
            check!(
                m(&m(&a, &b), &c) == m(&a, &m(&b, &c)),
                "meet associativity fails at {a} {b} {c}"
            );
            check!(
                j(&j(&a, &b), &c) == j(&a, &j(&b, &c)),
                "join associativity fails at {a} {b} {c}"
            );
            check!(m(&a, &a) == a && j(&a, &a) == a, "idempotency fails at {a}");
            check!(
                m(&a, &j(&a, &b)) == a && j(&a, &m(&a, &b)) == a,
                "absorption fails at {a} {b}"
            );
            check!(
                m(&a, &j(&b, &c)) == j(&m(&a, &b), &m(&a, &c)),
                "distributivity fails at {a} {b} {c}"
            );
            check!(
                j(&a, &m(&b, &c)) == m(&j(&a, &b), &j(&a, &c)),
                "dual distributivity fails at {a} {b} {c}"
            );
            // Modularity and monotonicity need ordered pairs; build them from the triple.
            let (lo, hi) = (m(&a, &c), j(&a, &c));
            check!(
                le(&lo, &c) && le(&a, &hi),
                "meet/join bounds fail at {a} {c}"
            );
            check!(
                j(&lo, &m(&b, &c)) == m(&j(&lo, &b), &c),
                "modularity fails at {lo} {b} {c}"
            );
            check!(
                le(&m(&lo, &b), &m(&hi, &b)) && le(&j(&lo, &b), &j(&hi, &b)),
                "monotonicity fails at {lo} {hi} {b}"
            );
        }
    }
    Ok(format!("{per_dim} triples in each dimension 1..=5"))
}

fn uniformity() -> Outcome {
    let l = generate_box_lattice(&lp(vec![0; 3]), &lp(vec![9; 3])).unwrap();
    let pairs = l.adjacent_pairs();
    check!(
        pairs.len() == 2700,
        "expected 2700 adjacent pairs, found {}",
        pairs.len()
    );
    for &(i, k) in &pairs {
        let (a, b) = (&l.points()[i], &l.points()[k]);
        check!(
            is_adjacent(a, b).unwrap(),
            "{a} and {b} listed but not adjacent"
        );
        let d = grid_distance(a, b).unwrap();
        check!(d == 1.0, "distance {d} between {a} and {b}");
    }
    Ok(format!(
        "{} adjacent pairs at distance exactly 1",
        pairs.len()
    ))
}

fn structure_preservation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=5);
        let (a, b) = (random_point(&mut rng, n), random_point(&mut rng, n));
        check!(
            embed(&meet(&a, &b).unwrap()) == embed(&a).meet(&embed(&b)).unwrap(),
            "meet not preserved at {a} {b}"
        );
        check!(
            embed(&join(&a, &b).unwrap()) == embed(&a).join(&embed(&b)).unwrap(),
            "join not preserved at {a} {b}"
        );
    }
    Ok("1000 pairs, exact".into())
}

/// Built-in surfaces with a sampler returning a surface point and unit normal.
struct Surface {
    name: &'static str,
    manifold: Manifold,
    sample: fn(&mut ChaCha8Rng) -> (DVector<f64>, DVector<f64>),
    /// Normal offsets `(inner, outer)` that keep the footpoint unique.
    offsets: (f64, f64),
}

fn surfaces() -> Vec<Surface> {
    vec![
        Surface {
            name: "plane",
            manifold: Manifold::plane(vec![0.0, 0.0, 1.0], 0.0).unwrap(),
            sample: |rng| {
                (
                    v3(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), 0.0),
                    v3(0.0, 0.0, 1.0),
                )
            },
            offsets: (-2.0, 2.0),
        },
        Surface {
            name: "sphere",
            manifold: Manifold::sphere(vec![0.0; 3], 1.0).unwrap(),
            sample: |rng| {
                let z: f64 = rng.gen_range(-1.0..1.0);
                let phi: f64 = rng.gen_range(0.0..2.0 * PI);
                let s = (1.0 - z * z).sqrt();
                let p = v3(s * phi.cos(), s * phi.sin(), z);
                (p.clone(), p)
            },
            offsets: (-0.8, 2.0),
        },
        Surface {
            name: "cylinder",
            manifold: Manifold::cylinder(vec![0.0; 3], vec![0.0, 0.0, 1.0], 1.0).unwrap(),
            sample: |rng| {
                let phi: f64 = rng.gen_range(0.0..2.0 * PI);
                (
                    v3(phi.cos(), phi.sin(), rng.gen_range(-2.0..2.0)),
                    v3(phi.cos(), phi.sin(), 0.0),
                )
            },
            offsets: (-0.8, 2.0),
        },
        Surface {
            name: "torus",
            manifold: Manifold::torus(vec![0.0; 3], 2.0, 0.5).unwrap(),
            sample: |rng| {
                let (u, w): (f64, f64) =
                    (rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI));
                let ring = 2.0 + 0.5 * w.cos();
                let n = v3(w.cos() * u.cos(), w.cos() * u.sin(), w.sin());
                (v3(ring * u.cos(), ring * u.sin(), 0.5 * w.sin()), n)
            },
            offsets: (-0.4, 1.0),
        },
    ]
}

fn query(s: &Surface, rng: &mut ChaCha8Rng) -> (DVector<f64>, DVector<f64>) {
    let (p, n) = (s.sample)(rng);
    let t = rng.gen_range(s.offsets.0..s.offsets.1);
    (&p + &n * t, p)
}

/// Closest sample among 10^6 torus parameters: a 500 x 500 global grid, then
/// an 866 x 866 grid spanning two coarse cells around the best coarse sample.
fn brute_force_torus(q: &[f64; 3]) -> [f64; 3] {
    let (major, minor) = (2.0, 0.5);
    let search = |u0: f64, v0: f64, span: f64, count: usize| {
        let step = span / count as f64;
        let us: Vec<(f64, f64, f64)> = (0..count)
            .map(|i| u0 + step * i as f64)
            .map(|u| (u, u.cos(), u.sin()))
            .collect();
        let vs: Vec<(f64, f64, f64)> = (0..count)
            .map(|i| v0 + step * i as f64)
            .map(|v| (v, v.cos(), v.sin()))
            .collect();
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for &(u, cu, su) in &us {
            for &(v, cv, sv) in &vs {
                let ring = major + minor * cv;
                let (dx, dy, dz) = (ring * cu - q[0], ring * su - q[1], minor * sv - q[2]);
                let d = dx * dx + dy * dy + dz * dz;
                if d < best.0 {
                    best = (d, u, v);
                }
            }
        }
        (best.1, best.2, step)
    };
    let (u, v, coarse) = search(0.0, 0.0, 2.0 * PI, 500);
    let (u, v, _) = search(u - 2.0 * coarse, v - 2.0 * coarse, 4.0 * coarse, 866);
    let ring = major + minor * v.cos();
    [ring * u.cos(), ring * u.sin(), minor * v.sin()]
}

fn geometry_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut worst_level, mut worst_alignment, mut worst_oracle) = (0.0f64, 0.0f64, 0.0f64);
    for s in surfaces() {
        for _ in 0..100 {
            let (q, _) = query(&s, &mut rng);
            let p = s
                .manifold
                .closest_point(&cp(&q))
                .map_err(|e| format!("{}: {e}", s.name))?;
            let level = s.manifold.level_value(p.as_vector()).unwrap().abs();
            let split = s
                .manifold
                .split_tangent_normal(&p, &(&q - p.as_vector()))
                .unwrap();
            let alignment = split.tangential.norm();
            check!(
                level <= 1e-10,
                "{}: |F(p)| = {level:e} at q = {q:?}",
                s.name
            );
            check!(
                alignment <= 1e-8,
                "{}: tangential residual {alignment:e} at q = {q:?}",
                s.name
            );
            worst_level = worst_level.max(level);
            worst_alignment = worst_alignment.max(alignment);
            if s.name == "torus" {
                let sampled = brute_force_torus(&[q[0], q[1], q[2]]);
                let err = (0..3)
                    .map(|i| (sampled[i] - p.coords()[i]).powi(2))
                    .sum::<f64>()
                    .sqrt();
                check!(
                    err <= 1e-3,
                    "torus footpoint {:?} vs brute force {sampled:?} for q = {q:?}",
                    p.coords()
                );
                worst_oracle = worst_oracle.max(err);
            }
        }
    }
    Ok(format!(
        "max |F| {worst_level:.1e}, max tangential {worst_alignment:.1e}, torus vs brute force {worst_oracle:.1e}"
    ))
}

fn random_tangent(rng: &mut ChaCha8Rng, n: &DVector<f64>) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(3, |_, _| rng.gen_range(-1.0..1.0));
        let t = &v - n * n.dot(&v);
        if t.norm() > 1e-2 {
            let len = t.norm();
            return t * (rng.gen_range(0.5..2.0) / len);
        }
    }
}

fn curvature() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut worst_analytic, mut worst_fd) = (0.0f64, 0.0f64);
    let catalog = surfaces();
    for r in [0.5, 1.0, 2.0] {
        let analytic = Manifold::sphere(vec![0.0; 3], r).unwrap();
        let numeric = Manifold::implicit(Numeric(Sphere::new(vec![0.0; 3], r).unwrap()));
        for _ in 0..10 {
            let (unit, _) = (catalog[1].sample)(&mut rng);
            let p = cp(&(unit * r));
            let expected = 1.0 / (r * r);
            let ka = analytic.gaussian_curvature(&p).map_err(|e| e.to_string())?;
            let kf = numeric.gaussian_curvature(&p).map_err(|e| e.to_string())?;
            check!(
                (ka - expected).abs() <= 1e-6,
                "analytic K = {ka} on sphere r = {r}"
            );
            check!(
                (kf - expected).abs() <= 1e-3,
                "finite-difference K = {kf} on sphere r = {r}"
            );
            worst_analytic = worst_analytic.max((ka - expected).abs());
            worst_fd = worst_fd.max((kf - expected).abs());
        }
    }
    for s in &catalog[..3] {
        if s.name == "sphere" {
            continue;
        }
        for _ in 0..10 {
            let (p, _) = (s.sample)(&mut rng);
            let k = s
                .manifold
                .gaussian_curvature(&cp(&p))
                .map_err(|e| e.to_string())?;
            check!(k.abs() <= 1e-8, "{}: K = {k}", s.name);
        }
    }

    let sphere2 = Manifold::sphere(vec![0.0; 3], 2.0).unwrap();
    let (unit, _) = (catalog[1].sample)(&mut rng);
    let p = cp(&(&unit * 2.0));
    let mut worst_sectional = 0.0f64;
    for _ in 0..10 {
        let (v, w) = (
            random_tangent(&mut rng, &unit),
            random_tangent(&mut rng, &unit),
        );
        let k = sphere2
            .sectional_curvature(&p, &v, &w)
            .map_err(|e| e.to_string())?;
        check!(
            (k - 0.25).abs() <= 1e-6,
            "sectional K = {k} on sphere r = 2"
        );
        worst_sectional = worst_sectional.max((k - 0.25).abs());
    }
    let torus = &catalog[3];
    let (tp, tn) = (torus.sample)(&mut rng);
    let reference = torus.manifold.gaussian_curvature(&cp(&tp)).unwrap();
    for _ in 0..10 {
        let (v, w) = (random_tangent(&mut rng, &tn), random_tangent(&mut rng, &tn));
        let k = torus
            .manifold
            .sectional_curvature(&cp(&tp), &v, &w)
            .map_err(|e| e.to_string())?;
        check!(
            (k - reference).abs() <= 1e-6,
            "torus sectional K = {k}, Gaussian {reference}"
        );
        worst_sectional = worst_sectional.max((k - reference).abs());
    }
    Ok(format!(
        "sphere error {worst_analytic:.1e} analytic, {worst_fd:.1e} finite-difference; sectional spread {worst_sectional:.1e}"
    ))
}

fn random_state(s: &Surface, lattice: &Lattice, rng: &mut ChaCha8Rng) -> EmbeddingState {
    let positions = lattice
        .iter()
        .map(|q| {
            let (p, n) = (s.sample)(rng);
            let t = rng.gen_range(s.offsets.0..s.offsets.1) * 0.5;
            (q.clone(), cp(&(&p + &n * t)))
        })
        .collect();
    EmbeddingState::new(positions, 0).unwrap()
}

/// Largest norm-wise relative error between the analytic gradient and central
/// differences of the total objective over 100 random states per surface.
fn gradient_error(params: &ObjectiveParams, seed: u64) -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lattice = generate_box_lattice(&lp(vec![0; 3]), &lp(vec![1; 3])).unwrap();
    let far = ReinforcementField::new(vec![Region::Ball {
        center: vec![20.0; 3],
        radius: 1.0,
    }])
    .unwrap();
    let mut worst = 0.0f64;
    for s in surfaces() {
        let fields = Fields::new(
            ActivationField::new(s.manifold.clone(), 0.25).unwrap(),
            far.clone(),
        )
        .unwrap();
        for _ in 0..100 {
            let state = random_state(&s, &lattice, &mut rng);
            let analytic = objective_gradient(&lattice, &state, &s.manifold, &fields, params)
                .map_err(|e| e.to_string())?;
            let mut a = Vec::new();
            let mut fd = Vec::new();
            for (q, g) in lattice.iter().zip(&analytic) {
                let z = state.get(q).unwrap().as_vector().clone();
                for i in 0..3 {
                    let h = 1e-6;
                    let mut probe = state.clone();
                    let mut x = z.clone();
                    x[i] += h;
                    probe.set(q, cp(&x)).unwrap();
                    let up = total_objective(&lattice, &probe, &s.manifold, &fields, params)
                        .map_err(|e| e.to_string())?
                        .total;
                    x[i] -= 2.0 * h;
                    probe.set(q, cp(&x)).unwrap();
                    let down = total_objective(&lattice, &probe, &s.manifold, &fields, params)
                        .map_err(|e| e.to_string())?
                        .total;
                    fd.push((up - down) / (2.0 * h));
                    a.push(g[i]);
                }
            }
            let (a, fd) = (DVector::from_vec(a), DVector::from_vec(fd));
            worst = worst.max((&a - &fd).norm() / fd.norm().max(1e-8));
        }
    }
    Ok(worst)
}

fn gradient_fidelity() -> Outcome {
    let equal = gradient_error(&ObjectiveParams::default(), 6)?;
    check!(equal < 1e-4, "relative error {equal:e} with alpha = beta");
    let unequal = gradient_error(
        &ObjectiveParams {
            alpha: 0.5,
            beta: 2.0,
            lambda: 0.5,
            ..ObjectiveParams::default()
        },
        7,
    )?;
    check!(
        unequal < 1e-2,
        "relative error {unequal:e} with alpha != beta"
    );
    Ok(format!(
        "relative error {equal:.1e} (alpha = beta), {unequal:.1e} (alpha != beta)"
    ))
}

fn plane_convergence() -> Outcome {
    let m = Manifold::plane(vec![0.0, 0.0, 1.0], 0.0).unwrap();
    let lattice = generate_box_lattice(&lp(vec![0, 0, 1]), &lp(vec![4, 4, 1])).unwrap();
    let (state, report) = optimize(
        &lattice,
        &m,
        &Fields::with_defaults(m.clone()),
        &ObjectiveParams::default(),
        &StopCriteria::default(),
        &StepControl::default(),
    )
    .map_err(|e| e.to_string())?;
    check!(
        report.termination == Termination::Converged,
        "terminated with {:?}",
        report.termination
    );
    check!(report.iterations <= 200, "{} iterations", report.iterations);
    let max_z = state
        .iter()
        .map(|(_, z)| z.coords()[2].abs())
        .fold(0.0, f64::max);
    check!(max_z <= 1e-6, "max |z| = {max_z:e}");
    let total = report.final_objective.total;
    check!(total <= 1e-10, "total objective {total:e}");
    Ok(format!(
        "{} iterations, max |z| {max_z:.1e}, total {total:.1e}",
        report.iterations
    ))
}

fn sphere_convergence() -> Outcome {
    let m = Manifold::sphere(vec![0.0; 3], 1.0).unwrap();
    let cube = generate_box_lattice(&lp(vec![-1; 3]), &lp(vec![1; 3])).unwrap();
    let shell = Lattice::new(
        3,
        cube.iter()
            .filter(|q| q.coords().iter().any(|&c| c != 0))
            .cloned(),
    )
    .unwrap();
    let mut notes = Vec::new();
    for (label, lattice) in [("cube", &cube), ("shell", &shell)] {
        let (state, report) = optimize(
            lattice,
            &m,
            &Fields::with_defaults(m.clone()),
            &ObjectiveParams::default(),
            &StopCriteria::default(),
            &StepControl::default(),
        )
        .map_err(|e| e.to_string())?;
        check!(
            report.termination == Termination::Converged,
            "{label}: terminated with {:?}",
            report.termination
        );
        let worst = state
            .iter()
            .map(|(_, z)| (z.as_vector().norm() - 1.0).abs())
            .fold(0.0, f64::max);
        check!(worst <= 1e-4, "{label}: max | |x| - 1 | = {worst:e}");
        notes.push(format!(
            "{label} {} pts, {} nudged, max radial error {worst:.1e}",
            state.len(),
            report.nudged_points.len()
        ));
    }
    Ok(notes.join("; "))
}

fn reinforcement_semantics() -> Outcome {
    let m = Manifold::sphere(vec![0.0; 3], 1.0).unwrap();
    let lattice = generate_box_lattice(&lp(vec![-1; 3]), &lp(vec![1; 3])).unwrap();
    let covering = ReinforcementField::new(vec![Region::Box {
        lower: vec![-3.0; 3],
        upper: vec![3.0; 3],
    }])
    .unwrap();
    let fields = Fields::new(ActivationField::new(m.clone(), 0.25).unwrap(), covering).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let frozen = EmbeddingState::new(
        lattice
            .iter()
            .map(|q| {
                (
                    q.clone(),
                    cp(&DVector::from_fn(3, |_, _| rng.gen_range(-2.0..2.0))),
                )
            })
            .collect(),
        0,
    )
    .unwrap();
    for lambda in [0.3, 1.0, 7.25] {
        let one = total_objective(
            &lattice,
            &frozen,
            &m,
            &fields,
            &ObjectiveParams {
                lambda,
                ..Default::default()
            },
        )
        .map_err(|e| e.to_string())?;
        let two = total_objective(
            &lattice,
            &frozen,
            &m,
            &fields,
            &ObjectiveParams {
                lambda: 2.0 * lambda,
                ..Default::default()
            },
        )
        .map_err(|e| e.to_string())?;
        check!(
            two.reinforcement.to_bits() == (2.0 * one.reinforcement).to_bits(),
            "lambda {lambda}: {} vs 2 x {}",
            two.reinforcement,
            one.reinforcement
        );
    }

    let solve = |lambda: f64| {
        optimize(
            &lattice,
            &m,
            &fields,
            &ObjectiveParams {
                lambda,
                ..Default::default()
            },
            &StopCriteria::default(),
            &StepControl::default(),
        )
    };
    let (a, _) = solve(0.0).map_err(|e| e.to_string())?;
    let (b, _) = solve(1.0).map_err(|e| e.to_string())?;
    let gap = a
        .iter()
        .zip(b.iter())
        .map(|((_, x), (_, y))| (x.as_vector() - y.as_vector()).amax())
        .fold(0.0, f64::max);
    check!(gap <= 1e-8, "argmin moved by {gap:e}");
    Ok(format!("doubling exact; argmin gap {gap:.1e}"))
}

fn determinism() -> Outcome {
    let tmp = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    for name in ["sphere", "plane"] {
        let text = demo::config(name).unwrap();
        let config = RunConfig::from_toml(text).map_err(|d| format!("{d:?}"))?;
        let run_with = |threads: usize, tag: &str| -> Result<Vec<u8>, String> {
            let dir = tmp.path().join(format!("{name}-{threads}-{tag}"));
            let summary =
                run_config(&config, text, &dir, Some(threads)).map_err(|e| e.to_string())?;
            std::fs::read(summary.points_csv).map_err(|e| e.to_string())
        };
        let first = run_with(4, "a")?;
        let second = run_with(4, "b")?;
        check!(
            first == second,
            "{name}: points CSV differs between identical runs"
        );

        let reference = read_points(&tmp.path().join(format!("{name}-4-a/points.csv")))
            .map_err(|e| e.to_string())?;
        let mut gap = 0.0f64;
        for threads in [1, 2, 8] {
            run_with(threads, "x")?;
            let rows = read_points(&tmp.path().join(format!("{name}-{threads}-x/points.csv")))
                .map_err(|e| e.to_string())?;
            for (a, b) in rows.iter().zip(&reference) {
                for (x, y) in a.position.iter().zip(&b.position) {
                    gap = gap.max((x - y).abs());
                }
            }
        }
        check!(
            gap <= 1e-12,
            "{name}: positions differ by {gap:e} across worker counts"
        );
        notes.push(format!("{name} identical, cross-pool gap {gap:.1e}"));
    }
    Ok(notes.join("; "))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("lattice axioms", lattice_axioms, Duration::from_secs(1)),
        ("uniformity", uniformity, Duration::from_secs(1)),
        (
            "structure preservation",
            structure_preservation,
            Duration::from_secs(1),
        ),
        (
            "geometry oracles",
            geometry_oracles,
            Duration::from_secs(30),
        ),
        ("curvature", curvature, Duration::from_secs(10)),
        (
            "gradient fidelity",
            gradient_fidelity,
            Duration::from_secs(30),
        ),
        (
            "plane convergence",
            plane_convergence,
            Duration::from_secs(1),
        ),
        (
            "sphere convergence",
            sphere_convergence,
            Duration::from_secs(5),
        ),
        (
            "reinforcement semantics",
            reinforcement_semantics,
            Duration::from_secs(5),
        ),
        ("determinism", determinism, Duration::from_secs(5)),
    ];
    let mut failures = 0;
    for (i, (name, run, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => {
                Err(format!("{detail}; took {elapsed:.2?}, budget {budget:?}"))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS  {:>2}. {name} ({elapsed:.2?}): {detail}", i + 1),
            Err(reason) => {
                failures += 1;
                println!("FAIL  {:>2}. {name} ({elapsed:.2?}): {reason}", i + 1);
            }
        }
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
