#![allow(dead_code)]

use std::f64::consts::PI;

use latembed::manifold::Manifold;
use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub struct Sampled {
    pub name: &'static str,
    pub manifold: Manifold,
    /// Returns a surface point and its unit normal.
    pub sample: fn(&mut ChaCha8Rng) -> (DVector<f64>, DVector<f64>),
    /// Largest normal offset that keeps the footpoint unique.
    pub reach: f64,
}

fn v3(x: f64, y: f64, z: f64) -> DVector<f64> {
    DVector::from_vec(vec![x, y, z])
}

pub fn catalog() -> Vec<Sampled> {
    vec![
        Sampled {
            name: "plane",
            manifold: Manifold::plane(vec![0.0, 0.0, 1.0], 0.0).unwrap(),
            sample: |rng| {
                (
                    v3(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), 0.0),
                    v3(0.0, 0.0, 1.0),
                )
            },
            reach: 10.0,
        },
        Sampled {
            name: "sphere",
            manifold: Manifold::sphere(vec![0.0; 3], 1.0).unwrap(),
            sample: |rng| {
                let z: f64 = rng.gen_range(-1.0..1.0);
                let phi: f64 = rng.gen_range(0.0..2.0 * PI);
                let r = (1.0 - z * z).sqrt();
                let p = v3(r * phi.cos(), r * phi.sin(), z);
                (p.clone(), p)
            },
            reach: 1.0,
        },
        Sampled {
            name: "cylinder",
            manifold: Manifold::cylinder(vec![0.0; 3], vec![0.0, 0.0, 1.0], 1.0).unwrap(),
            sample: |rng| {
                let phi: f64 = rng.gen_range(0.0..2.0 * PI);
                let n = v3(phi.cos(), phi.sin(), 0.0);
                (v3(phi.cos(), phi.sin(), rng.gen_range(-2.0..2.0)), n)
            },
            reach: 1.0,
        },
        Sampled {
            name: "torus",
            manifold: Manifold::torus(vec![0.0; 3], 2.0, 0.5).unwrap(),
            sample: |rng| {
                let u: f64 = rng.gen_range(0.0..2.0 * PI);
                let w: f64 = rng.gen_range(0.0..2.0 * PI);
                let n = v3(w.cos() * u.cos(), w.cos() * u.sin(), w.sin());
                let ring = 2.0 + 0.5 * w.cos();
                (v3(ring * u.cos(), ring * u.sin(), 0.5 * w.sin()), n)
            },
            reach: 0.5,
        },
    ]
}

/// A query point at a random normal offset within `fraction` of the reach.
pub fn near_point(
    s: &Sampled,
    rng: &mut ChaCha8Rng,
    fraction: f64,
) -> (DVector<f64>, DVector<f64>) {
    let (p, n) = (s.sample)(rng);
    let offset = rng.gen_range(-fraction..fraction) * s.reach.min(1.0);
    (&p + &n * offset, p)
}

/// Random unit vector tangent to the surface with unit normal `n`.
pub fn random_tangent(rng: &mut ChaCha8Rng, n: &DVector<f64>) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n.len(), |_, _| rng.gen_range(-1.0..1.0));
        let t = &v - n * n.dot(&v);
        if t.norm() > 1e-3 {
            return t.normalize();
        }
    }
}
