//! Seeded generators of random configurations with controlled geometry.
//!
//! Every generator returns a configuration whose largest mutual distance is 1,
//! placed in a random plane (or random position) of 3-space. Samples are
//! rejected until they are bounded away from the degenerate cases relevant to
//! their family, so predicates can be tested at fixed margins.

use std::f64::consts::TAU;

use nalgebra::{Quaternion, Rotation3, UnitQuaternion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Configuration, Masses, Vec3};
use crate::planarity::cayley_menger;

/// Minimum angular gap between consecutive vertices on a circle.
const MIN_GAP: f64 = 0.35;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn rotation(&mut self) -> Rotation3<f64> {
        loop {
            let q = [(); 4].map(|_| self.uniform(-1.0, 1.0));
            let n2: f64 = q.iter().map(|x| x * x).sum();
            if n2 > 1e-4 && n2 <= 1.0 {
                let uq = UnitQuaternion::from_quaternion(Quaternion::new(q[0], q[1], q[2], q[3]));
                return uq.to_rotation_matrix();
            }
        }
    }

    pub fn masses(&mut self) -> Masses {
        Masses::new([(); 4].map(|_| self.uniform(0.2, 2.0))).expect("positive masses")
    }

    /// Places planar points in a random plane and rescales to unit diameter.
    pub fn embed(&mut self, points: [[f64; 2]; 4]) -> Configuration {
        let rotation = self.rotation();
        let shift = Vec3::new(self.uniform(-2.0, 2.0), self.uniform(-2.0, 2.0), self.uniform(-2.0, 2.0));
        let raw = Configuration::from_vectors(points.map(|[x, y]| Vec3::new(x, y, 0.0)), Masses::equal());
        let raw = raw.scaled(1.0 / raw.max_distance());
        raw.transformed(&rotation, shift)
    }

    fn sorted_angles(&mut self) -> [f64; 4] {
        loop {
            let mut t = [(); 4].map(|_| self.uniform(0.0, TAU));
            t.sort_by(f64::total_cmp);
            let gaps = [t[1] - t[0], t[2] - t[1], t[3] - t[2], TAU - t[3] + t[0]];
            if gaps.iter().all(|&g| g > MIN_GAP) {
                return t;
            }
        }
    }

    /// A convex quadrilateral labeled sequentially around its boundary.
    pub fn convex_planar(&mut self) -> Configuration {
        loop {
            let t = self.sorted_angles();
            let pts = t.map(|a| {
                let r = self.uniform(0.5, 1.5);
                [r * a.cos(), r * a.sin()]
            });
            if convex_margin(&pts) > 0.02 {
                return self.embed(pts);
            }
        }
    }

    /// Four points on a common circle, labeled sequentially.
    pub fn cyclic(&mut self) -> Configuration {
        let t = self.sorted_angles();
        let r = self.uniform(0.5, 2.0);
        let (cx, cy) = (self.uniform(-1.0, 1.0), self.uniform(-1.0, 1.0));
        self.embed(t.map(|a| [cx + r * a.cos(), cy + r * a.sin()]))
    }

    /// A triangle with one point strictly inside; returns the interior label.
    pub fn concave_planar(&mut self) -> (Configuration, usize) {
        loop {
            let mut t = [(); 3].map(|_| self.uniform(0.0, TAU));
            t.sort_by(f64::total_cmp);
            let gaps = [t[1] - t[0], t[2] - t[1], TAU - t[2] + t[0]];
            if gaps.iter().any(|&g| g < 0.8) {
                continue;
            }
            let tri = t.map(|a| {
                let r = self.uniform(0.7, 1.3);
                [r * a.cos(), r * a.sin()]
            });
            let w = [(); 3].map(|_| self.uniform(0.15, 1.0));
            let ws: f64 = w.iter().sum();
            let inner = [
                (0..3).map(|i| w[i] * tri[i][0]).sum::<f64>() / ws,
                (0..3).map(|i| w[i] * tri[i][1]).sum::<f64>() / ws,
            ];
            let interior = self.index(4);
            let mut pts = [[0.0; 2]; 4];
            let mut outer = tri.iter();
            for (slot, p) in pts.iter_mut().enumerate() {
                *p = if slot == interior { inner } else { *outer.next().unwrap() };
            }
            return (self.embed(pts), interior + 1);
        }
    }

    /// A tetrahedron whose Cayley–Menger determinant is at least `1e-3` at unit diameter.
    pub fn nonplanar(&mut self) -> Configuration {
        loop {
            let q = [(); 4].map(|_| Vec3::new(self.uniform(-1.0, 1.0), self.uniform(-1.0, 1.0), self.uniform(-1.0, 1.0)));
            let raw = Configuration::from_vectors(q, Masses::equal());
            let config = raw.scaled(1.0 / raw.max_distance());
            let Ok(dist) = crate::geometry::mutual_distances(&config) else {
                continue;
            };
            if dist.as_array().iter().all(|&r| r > 0.1) && cayley_menger(&dist) > 1e-3 {
                return config;
            }
        }
    }
}

/// Smallest signed turn `(p_{i+1} − p_i) × (p_{i+2} − p_{i+1})` around the polygon,
/// normalized by the squared diameter. Positive for strictly convex counter-clockwise polygons.
pub fn convex_margin(pts: &[[f64; 2]; 4]) -> f64 {
    let mut l2: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            l2 = l2.max((pts[i][0] - pts[j][0]).powi(2) + (pts[i][1] - pts[j][1]).powi(2));
        }
    }
    (0..4)
        .map(|i| {
            let (p, q, r) = (pts[i], pts[(i + 1) % 4], pts[(i + 2) % 4]);
            ((q[0] - p[0]) * (r[1] - q[1]) - (q[1] - p[1]) * (r[0] - q[0])) / l2
        })
        .fold(f64::INFINITY, f64::min)
}
