//! Geometric kernel for four labeled points.
//!
//! Everything here is computable either from positions or from the six mutual
//! distances alone. The distance-space functions never look at positions, so
//! the two coordinate systems can be checked against each other.
//!
//! Side labels are fixed throughout the crate:
//!
//! | label | pair  | role in a standard quadrilateral |
//! |-------|-------|----------------------------------|
//! | `a`   | `r12` | side                             |
//! | `b`   | `r23` | side                             |
//! | `c`   | `r34` | side                             |
//! | `d`   | `r14` | side                             |
//! | `e`   | `r13` | diagonal                         |
//! | `f`   | `r24` | diagonal                         |

use std::f64::consts::PI;

use nalgebra::{Rotation3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::{COINCIDENT, DEGENERATE_AREA, RADICAND_EPS};

pub type Vec3 = Vector3<f64>;

/// One of the six unordered pairs of bodies, in `a..f` order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pair {
    P12,
    P23,
    P34,
    P14,
    P13,
    P24,
}

impl Pair {
    pub const ALL: [Pair; 6] = [Pair::P12, Pair::P23, Pair::P34, Pair::P14, Pair::P13, Pair::P24];

    /// One-based body labels, smaller first.
    pub const fn indices(self) -> (usize, usize) {
        match self {
            Pair::P12 => (1, 2),
            Pair::P23 => (2, 3),
            Pair::P34 => (3, 4),
            Pair::P14 => (1, 4),
            Pair::P13 => (1, 3),
            Pair::P24 => (2, 4),
        }
    }

    pub fn from_indices(i: usize, j: usize) -> Pair {
        match (i.min(j), i.max(j)) {
            (1, 2) => Pair::P12,
            (2, 3) => Pair::P23,
            (3, 4) => Pair::P34,
            (1, 4) => Pair::P14,
            (1, 3) => Pair::P13,
            (2, 4) => Pair::P24,
            _ => panic!("invalid body pair ({i}, {j})"),
        }
    }

    /// Position in the `a..f` ordering.
    pub const fn slot(self) -> usize {
        self as usize
    }

    pub const fn label(self) -> &'static str {
        match self {
            Pair::P12 => "r12",
            Pair::P23 => "r23",
            Pair::P34 => "r34",
            Pair::P14 => "r14",
            Pair::P13 => "r13",
            Pair::P24 => "r24",
        }
    }

    pub fn is_diagonal(self) -> bool {
        matches!(self, Pair::P13 | Pair::P24)
    }
}

/// Four body masses. Zero masses are only admitted through [`Masses::with_massless`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct Masses([f64; 4]);

impl Masses {
    pub fn new(m: [f64; 4]) -> Result<Self> {
        if m.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
            return Err(Error::InvalidMasses(format!("all masses must be positive, got {m:?}")));
        }
        Ok(Masses(m))
    }

    /// Admits zero masses (restricted problems); the total must stay positive.
    pub fn with_massless(m: [f64; 4]) -> Result<Self> {
        if m.iter().any(|&x| !(x.is_finite() && x >= 0.0)) || m.iter().sum::<f64>() <= 0.0 {
            return Err(Error::InvalidMasses(format!(
                "masses must be non-negative with positive total, got {m:?}"
            )));
        }
        Ok(Masses(m))
    }

    pub const fn equal() -> Self {
        Masses([1.0; 4])
    }

    /// Mass of body `i` (one-based).
    pub fn get(&self, i: usize) -> f64 {
        self.0[i - 1]
    }

    pub fn as_array(&self) -> [f64; 4] {
        self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn pair_product(&self, pair: Pair) -> f64 {
        let (i, j) = pair.indices();
        self.get(i) * self.get(j)
    }
}

impl TryFrom<[f64; 4]> for Masses {
    type Error = Error;

    fn try_from(m: [f64; 4]) -> Result<Self> {
        Masses::new(m)
    }
}

impl From<Masses> for [f64; 4] {
    fn from(m: Masses) -> Self {
        m.0
    }
}

/// Four labeled points in 3-space together with their masses.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    positions: [Vec3; 4],
    masses: Masses,
}

impl Configuration {
    /// Rejects configurations in which two bodies coincide.
    pub fn new(positions: [[f64; 3]; 4], masses: Masses) -> Result<Self> {
        let config = Self::new_unchecked(positions, masses);
        config.check_distinct()?;
        Ok(config)
    }

    /// Builds a configuration without any degeneracy check.
    pub fn new_unchecked(positions: [[f64; 3]; 4], masses: Masses) -> Self {
        Configuration {
            positions: positions.map(Vec3::from),
            masses,
        }
    }

    pub fn planar(points: [[f64; 2]; 4], masses: Masses) -> Result<Self> {
        Self::new(points.map(|[x, y]| [x, y, 0.0]), masses)
    }

    pub fn from_vectors(positions: [Vec3; 4], masses: Masses) -> Self {
        Configuration { positions, masses }
    }

    pub fn positions(&self) -> &[Vec3; 4] {
        &self.positions
    }

    /// Position of body `i` (one-based).
    pub fn position(&self, i: usize) -> Vec3 {
        self.positions[i - 1]
    }

    pub fn masses(&self) -> &Masses {
        &self.masses
    }

    pub fn with_masses(&self, masses: Masses) -> Self {
        Configuration {
            positions: self.positions,
            masses,
        }
    }

    pub fn center_of_mass(&self) -> Vec3 {
        let m = self.masses.as_array();
        let weighted = self
            .positions
            .iter()
            .zip(m)
            .fold(Vec3::zeros(), |acc, (q, mi)| acc + q * mi);
        weighted / self.masses.total()
    }

    pub fn max_distance(&self) -> f64 {
        let mut l: f64 = 0.0;
        for i in 0..4 {
            for j in i + 1..4 {
                l = l.max((self.positions[i] - self.positions[j]).norm());
            }
        }
        l
    }

    /// Applies `q -> rotation * q + shift` to every body.
    pub fn transformed(&self, rotation: &Rotation3<f64>, shift: Vec3) -> Self {
        Configuration {
            positions: self.positions.map(|q| rotation * q + shift),
            masses: self.masses,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Configuration {
            positions: self.positions.map(|q| q * factor),
            masses: self.masses,
        }
    }

    /// Reorders bodies so that new body `k` is old body `perm[k]` (zero-based).
    pub fn permuted(&self, perm: [usize; 4]) -> Self {
        let m = self.masses.as_array();
        Configuration {
            positions: perm.map(|p| self.positions[p]),
            masses: Masses(perm.map(|p| m[p])),
        }
    }

    pub fn to_arrays(&self) -> [[f64; 3]; 4] {
        self.positions.map(|q| [q.x, q.y, q.z])
    }

    fn check_distinct(&self) -> Result<()> {
        let scale = self.max_distance();
        for pair in Pair::ALL {
            let (i, j) = pair.indices();
            let r = (self.position(i) - self.position(j)).norm();
            if scale == 0.0 || r < COINCIDENT * scale {
                return Err(Error::CoincidentPoints(i, j));
            }
        }
        Ok(())
    }
}

/// The six mutual distances, `a = r12, b = r23, c = r34, d = r14, e = r13, f = r24`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceSextuple {
    #[serde(rename = "r12")]
    pub a: f64,
    #[serde(rename = "r23")]
    pub b: f64,
    #[serde(rename = "r34")]
    pub c: f64,
    #[serde(rename = "r14")]
    pub d: f64,
    #[serde(rename = "r13")]
    pub e: f64,
    #[serde(rename = "r24")]
    pub f: f64,
}

impl DistanceSextuple {
    /// Arguments in `a..f` order. All entries must be positive and finite.
    pub fn new(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> Result<Self> {
        Self::from_array([a, b, c, d, e, f])
    }

    pub fn from_array(r: [f64; 6]) -> Result<Self> {
        if let Some(slot) = r.iter().position(|&x| !(x.is_finite() && x > 0.0)) {
            let (i, j) = Pair::ALL[slot].indices();
            return Err(Error::CoincidentPoints(i, j));
        }
        Ok(Self::from_array_unchecked(r))
    }

    pub(crate) fn from_array_unchecked(r: [f64; 6]) -> Self {
        let [a, b, c, d, e, f] = r;
        DistanceSextuple { a, b, c, d, e, f }
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.a, self.b, self.c, self.d, self.e, self.f]
    }

    pub fn get(&self, pair: Pair) -> f64 {
        self.as_array()[pair.slot()]
    }

    /// Distance between bodies `i` and `j` (one-based).
    pub fn r(&self, i: usize, j: usize) -> f64 {
        self.get(Pair::from_indices(i, j))
    }

    pub fn with(&self, pair: Pair, value: f64) -> Self {
        let mut r = self.as_array();
        r[pair.slot()] = value;
        Self::from_array_unchecked(r)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_array_unchecked(self.as_array().map(|x| x * factor))
    }

    /// Semiperimeter `(a + b + c + d) / 2` of the boundary quadrilateral.
    pub fn semiperimeter(&self) -> f64 {
        0.5 * (self.a + self.b + self.c + self.d)
    }

    pub fn max(&self) -> f64 {
        self.as_array().into_iter().fold(0.0, f64::max)
    }

    /// `b² + d² − a² − c²`, which equals `2 e·f` for edge vectors.
    pub fn diagonal_dot2(&self) -> f64 {
        self.b * self.b + self.d * self.d - self.a * self.a - self.c * self.c
    }
}

/// Edge vectors of the closed polygon `P1 P2 P3 P4` and its two diagonals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeVectors {
    pub a: Vec3,
    pub b: Vec3,
    pub c: Vec3,
    pub d: Vec3,
    pub e: Vec3,
    pub f: Vec3,
}

/// `Δ` and the four triangle areas; `A_k` omits body `k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaSet {
    pub delta: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
}

impl AreaSet {
    /// `A_k` for one-based `k`.
    pub fn triangle(&self, k: usize) -> f64 {
        [self.a1, self.a2, self.a3, self.a4][k - 1]
    }

    /// Areas from cross products of the edge vectors.
    pub fn from_positions(config: &Configuration) -> Self {
        let v = edge_vectors(config);
        AreaSet {
            delta: 0.5 * v.e.cross(&v.f).norm(),
            a1: 0.5 * v.b.cross(&v.c).norm(),
            a2: 0.5 * v.c.cross(&v.d).norm(),
            a3: 0.5 * v.d.cross(&v.a).norm(),
            a4: 0.5 * v.a.cross(&v.b).norm(),
        }
    }
}

/// The Condition-5 angles: `alpha` between `a` and `d`, `beta` between `b` and `c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition5Angles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Diagonal angle, every vertex angle, and the Condition-5 angles.
#[derive(Clone, Debug, PartialEq)]
pub struct AngleSet {
    pub theta: f64,
    vertex: [[[f64; 4]; 4]; 4],
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl AngleSet {
    /// `θ_ijk`, the angle at body `j` subtended by bodies `i` and `k`.
    pub fn vertex(&self, i: usize, j: usize, k: usize) -> f64 {
        let v = self.vertex[i - 1][j - 1][k - 1];
        assert!(!v.is_nan(), "invalid vertex triple ({i}, {j}, {k})");
        v
    }
}

pub fn mutual_distances(config: &Configuration) -> Result<DistanceSextuple> {
    config.check_distinct()?;
    let r = Pair::ALL.map(|p| {
        let (i, j) = p.indices();
        (config.position(i) - config.position(j)).norm()
    });
    Ok(DistanceSextuple::from_array_unchecked(r))
}

pub fn edge_vectors(config: &Configuration) -> EdgeVectors {
    let [q1, q2, q3, q4] = *config.positions();
    EdgeVectors {
        a: q2 - q1,
        b: q3 - q2,
        c: q4 - q3,
        d: q1 - q4,
        e: q3 - q1,
        f: q4 - q2,
    }
}

fn clamp_radicand(value: f64, scale: f64, context: &'static str) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -RADICAND_EPS * scale.powi(4) {
        Ok(0.0)
    } else {
        Err(Error::NegativeRadicand { context, value })
    }
}

/// `4Δ² = e²f² − ¼(b² + d² − a² − c²)²`, evaluated in factored form.
pub fn quad_area_radicand(dist: &DistanceSextuple) -> f64 {
    let ef = dist.e * dist.f;
    let half_k = 0.5 * dist.diagonal_dot2();
    (ef - half_k) * (ef + half_k)
}

/// `Δ = ½‖e × f‖` from distances only.
pub fn quad_area_delta(dist: &DistanceSextuple) -> Result<f64> {
    let rad = clamp_radicand(quad_area_radicand(dist), dist.max(), "quadrilateral area")?;
    Ok(0.5 * rad.sqrt())
}

/// `16A²` for a triangle with sides `x, y, z`, via the cancellation-safe
/// factorization of `2(x²y² + x²z² + y²z²) − (x⁴ + y⁴ + z⁴)`.
pub fn heron_radicand(x: f64, y: f64, z: f64) -> f64 {
    let mut s = [x, y, z];
    s.sort_by(|p, q| q.total_cmp(p));
    let [p, q, r] = s;
    (p + (q + r)) * (r - (p - q)) * (r + (p - q)) * (p + (q - r))
}

pub fn heron_area(x: f64, y: f64, z: f64) -> Result<f64> {
    let scale = x.max(y).max(z);
    let rad = clamp_radicand(heron_radicand(x, y, z), scale, "triangle area")?;
    Ok(0.25 * rad.sqrt())
}

/// Labels of the triangle that omits body `k`, in increasing order.
pub const fn triangle_without(k: usize) -> [usize; 3] {
    match k {
        1 => [2, 3, 4],
        2 => [1, 3, 4],
        3 => [1, 2, 4],
        _ => [1, 2, 3],
    }
}

/// Area `A_k` of the triangle omitting body `k`.
pub fn triangle_area(dist: &DistanceSextuple, k: usize) -> Result<f64> {
    let [i, j, l] = triangle_without(k);
    let rad = heron_radicand(dist.r(i, j), dist.r(j, l), dist.r(i, l));
    const CONTEXT: [&str; 4] = ["triangle A1", "triangle A2", "triangle A3", "triangle A4"];
    let rad = clamp_radicand(rad, dist.max(), CONTEXT[k - 1])?;
    Ok(0.25 * rad.sqrt())
}

pub fn triangle_areas(dist: &DistanceSextuple) -> Result<AreaSet> {
    Ok(AreaSet {
        delta: quad_area_delta(dist)?,
        a1: triangle_area(dist, 1)?,
        a2: triangle_area(dist, 2)?,
        a3: triangle_area(dist, 3)?,
        a4: triangle_area(dist, 4)?,
    })
}

pub(crate) fn degenerate_area(area: f64, scale: f64) -> bool {
    area < DEGENERATE_AREA * scale * scale
}

/// Angle between the diagonals `e` and `f`, in `(0, π)`.
///
/// `sin θ = 2Δ/(ef)` is taken positive and the sign of `cos θ` follows
/// `b² + d² − a² − c²`, so that `Δ = ½ef sin θ` and
/// `Δ = ¼(b² + d² − a² − c²) tan θ` both hold.
pub fn diagonal_angle(dist: &DistanceSextuple) -> Result<f64> {
    let delta = quad_area_delta(dist)?;
    if degenerate_area(delta, dist.max()) {
        return Err(Error::DegenerateQuadrilateral { area: delta });
    }
    Ok((4.0 * delta).atan2(dist.diagonal_dot2()))
}

/// `θ_ijk`: the angle at body `j` between bodies `i` and `k`.
pub fn vertex_angle(dist: &DistanceSextuple, i: usize, j: usize, k: usize) -> Result<f64> {
    let (i, k) = (i.min(k), i.max(k));
    let degenerate = || {
        let mut t = [i, j, k];
        t.sort_unstable();
        Error::DegenerateTriangle(t)
    };
    if i == k || i == j || j == k {
        return Err(degenerate());
    }
    let rij = dist.r(i, j);
    let rjk = dist.r(j, k);
    let rik = dist.r(i, k);
    let area = heron_area(rij, rjk, rik).map_err(|_| degenerate())?;
    if degenerate_area(area, dist.max()) {
        return Err(degenerate());
    }
    Ok((4.0 * area).atan2(rij * rij + rjk * rjk - rik * rik))
}

/// `α = π − θ_214`, `β = π − θ_234`, `γ = (α + β)/2`.
pub fn condition5_angles(dist: &DistanceSextuple) -> Result<Condition5Angles> {
    let alpha = PI - vertex_angle(dist, 2, 1, 4)?;
    let beta = PI - vertex_angle(dist, 2, 3, 4)?;
    Ok(Condition5Angles {
        alpha,
        beta,
        gamma: 0.5 * (alpha + beta),
    })
}

/// All angles at once; requires every triangle and the quadrilateral to be non-degenerate.
pub fn angle_set(dist: &DistanceSextuple) -> Result<AngleSet> {
    let theta = diagonal_angle(dist)?;
    let mut vertex = [[[f64::NAN; 4]; 4]; 4];
    for j in 1..=4 {
        for i in 1..=4 {
            for k in i + 1..=4 {
                if i == j || k == j {
                    continue;
                }
                let v = vertex_angle(dist, i, j, k)?;
                vertex[i - 1][j - 1][k - 1] = v;
                vertex[k - 1][j - 1][i - 1] = v;
            }
        }
    }
    let c5 = condition5_angles(dist)?;
    Ok(AngleSet {
        theta,
        vertex,
        alpha: c5.alpha,
        beta: c5.beta,
        gamma: c5.gamma,
    })
}
