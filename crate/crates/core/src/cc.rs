//! Central configuration equations.
//!
//! Position space: `∇U + λ_pos ∇I = 0` with `λ_pos > 0`.
//!
//! Distance space: critical points of `U + λ m′ (I − I₀) + η F` where `F` is a
//! planarity constraint. With the constant in front of `I` fixed to the total
//! mass `m′`, the distance-space `λ` is the Dziobek multiplier and
//! `λ_pos = m′ λ`. Each pair equation reads
//!
//! ```text
//! r_ij⁻³ = λ + (η / (m_i m_j)) · bracket_ij
//! ```
//!
//! where the bracket depends on the constraint:
//!
//! - `F1 = Δ − A1 − A3`, `F2 = Δ − A2 − A4`: the angle brackets, which equal
//!   `(2 / r_ij) ∂F/∂r_ij` (the factor ½ is absorbed into `η`);
//! - `P = ac + bd − ef` (co-circular): `(1 / r_ij) ∂P/∂r_ij`.

use std::ops::{Index, IndexMut};

use nalgebra::{DMatrix, DVector};
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{
    angle_set, condition5_angles, diagonal_angle, heron_area, mutual_distances, quad_area_delta,
    triangle_area, triangle_without, Configuration, DistanceSextuple, Masses, Pair, Vec3,
};
use crate::planarity::ptolemy_defect;
use crate::tolerance::{DEGENERATE_AREA, PTOLEMY_ZERO, SVD_RANK};

/// One value per body pair, indexed by [`Pair`]. Serializes as `{"r12": .., ..}`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PairValues(pub [f64; 6]);

impl PairValues {
    pub fn from_fn(mut f: impl FnMut(Pair) -> f64) -> Self {
        PairValues(Pair::ALL.map(&mut f))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Pair, f64)> + '_ {
        Pair::ALL.into_iter().map(|p| (p, self[p]))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

impl Index<Pair> for PairValues {
    type Output = f64;

    fn index(&self, p: Pair) -> &f64 {
        &self.0[p.slot()]
    }
}

impl IndexMut<Pair> for PairValues {
    fn index_mut(&mut self, p: Pair) -> &mut f64 {
        &mut self.0[p.slot()]
    }
}

impl Serialize for PairValues {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut ordered: Vec<(Pair, f64)> = self.iter().collect();
        ordered.sort_by_key(|(p, _)| p.indices());
        let mut map = serializer.serialize_map(Some(6))?;
        for (p, v) in ordered {
            map.serialize_entry(p.label(), &v)?;
        }
        map.end()
    }
}

/// Which equation system a residual or multiplier refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum System {
    /// Angle equations with the constraint `Δ − A1 − A3 = 0`.
    F1,
    /// Angle equations with the constraint `Δ − A2 − A4 = 0`.
    F2,
    /// Both angle constraints with independent multipliers.
    Both,
    /// Ptolemy constraint `ac + bd − ef = 0`.
    Cocircular,
    /// `∇U + λ ∇I = 0` in position space.
    Position,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MultiplierEstimate {
    /// Dziobek-normalized multiplier (position-space value divided by `m′`).
    pub lambda: f64,
    /// `η₁` for [`System::F1`] and [`System::Both`], `η₂` for [`System::F2`].
    pub eta: Option<f64>,
    /// `η₂` for [`System::Both`].
    pub eta2: Option<f64>,
    pub sigma: Option<f64>,
    pub residual_norm: f64,
}

impl MultiplierEstimate {
    /// Constraint multipliers in the order the system uses them.
    pub fn constraint_multipliers(&self) -> Vec<f64> {
        [self.eta, self.eta2, self.sigma].into_iter().flatten().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub system: System,
    /// Left minus right side of each pair equation.
    pub pairs: PairValues,
    /// `I − I₀`, when a target was supplied.
    pub inertia_residual: Option<f64>,
    /// Value of the active constraint (`F1`, `F2`, `max(|F1|, |F2|)` or `P`).
    pub constraint: f64,
}

pub fn potential_u(masses: &Masses, dist: &DistanceSextuple) -> Result<f64> {
    Pair::ALL.iter().try_fold(0.0, |acc, &p| {
        let r = dist.get(p);
        if r <= 0.0 {
            let (i, j) = p.indices();
            return Err(Error::CoincidentPoints(i, j));
        }
        Ok(acc + masses.pair_product(p) / r)
    })
}

/// `I = (1 / 2m′) Σ m_i m_j r_ij²`.
pub fn moment_i(masses: &Masses, dist: &DistanceSextuple) -> f64 {
    let s: f64 = Pair::ALL.iter().map(|&p| masses.pair_product(p) * dist.get(p).powi(2)).sum();
    s / (2.0 * masses.total())
}

/// `I = ½ Σ m_i ‖q_i − q_CM‖²`.
pub fn moment_i_positions(config: &Configuration) -> f64 {
    let cm = config.center_of_mass();
    let m = config.masses().as_array();
    0.5 * config.positions().iter().zip(m).map(|(q, mi)| mi * (q - cm).norm_squared()).sum::<f64>()
}

/// `∂U/∂q_i = Σ_j m_i m_j (q_j − q_i) / r_ij³`.
pub fn gradient_u(config: &Configuration) -> Result<[Vec3; 4]> {
    mutual_distances(config)?;
    let q = config.positions();
    let m = config.masses().as_array();
    let mut g = [Vec3::zeros(); 4];
    for i in 0..4 {
        for j in i + 1..4 {
            let diff = q[j] - q[i];
            let f = diff * (m[i] * m[j] / diff.norm().powi(3));
            g[i] += f;
            g[j] -= f;
        }
    }
    Ok(g)
}

/// `∂I/∂q_i = m_i (q_i − q_CM)`.
pub fn gradient_i(config: &Configuration) -> [Vec3; 4] {
    let cm = config.center_of_mass();
    let m = config.masses().as_array();
    let q = config.positions();
    [0, 1, 2, 3].map(|i| (q[i] - cm) * m[i])
}

/// Residuals `λ m_i (q_i − q_CM) + Σ_j m_i m_j (q_j − q_i)/r_ij³`, flattened body by body.
pub fn position_cc_residual(config: &Configuration, lambda_pos: f64) -> Result<[f64; 12]> {
    let gu = gradient_u(config)?;
    let gi = gradient_i(config);
    let mut out = [0.0; 12];
    for i in 0..4 {
        let r = gi[i] * lambda_pos + gu[i];
        out[3 * i..3 * i + 3].copy_from_slice(r.as_slice());
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LambdaFit {
    /// Position-space multiplier.
    pub lambda: f64,
    /// `‖∇U + λ∇I‖`.
    pub residual_norm: f64,
}

/// Least-squares `λ` for `∇U + λ∇I = 0` over the twelve position components.
pub fn lambda_from_config(config: &Configuration) -> Result<LambdaFit> {
    let gu = gradient_u(config)?;
    let gi = gradient_i(config);
    let ii: f64 = gi.iter().map(|v| v.norm_squared()).sum();
    let scale = config.max_distance().powi(2) * config.masses().total().powi(2);
    if ii <= 1e-28 * scale {
        return Err(Error::ZeroGradient);
    }
    let ui: f64 = gu.iter().zip(&gi).map(|(u, i)| u.dot(i)).sum();
    let lambda = -ui / ii;
    let residual_norm = gu
        .iter()
        .zip(&gi)
        .map(|(u, i)| (u + i * lambda).norm_squared())
        .sum::<f64>()
        .sqrt();
    Ok(LambdaFit { lambda, residual_norm })
}

fn nondegenerate_delta(dist: &DistanceSextuple) -> Result<f64> {
    let delta = quad_area_delta(dist)?;
    if delta < DEGENERATE_AREA * dist.max().powi(2) {
        return Err(Error::DegenerateQuadrilateral { area: delta });
    }
    Ok(delta)
}

/// Partials of `Δ` from Bretschneider's formula: `∂Δ/∂e = ef²/(4Δ)`,
/// `∂Δ/∂a = aK/(8Δ)` with `K = b² + d² − a² − c²`, and sign pattern `(+, −, +, −)` on `a..d`.
pub fn delta_partials(dist: &DistanceSextuple) -> Result<PairValues> {
    let delta = nondegenerate_delta(dist)?;
    let k = dist.diagonal_dot2();
    let DistanceSextuple { a, b, c, d, e, f } = *dist;
    Ok(PairValues([
        a * k / (8.0 * delta),
        -b * k / (8.0 * delta),
        c * k / (8.0 * delta),
        -d * k / (8.0 * delta),
        e * f * f / (4.0 * delta),
        f * e * e / (4.0 * delta),
    ]))
}

/// The same partials through the diagonal angle: `(a/2) cot θ`, `(f/2) csc θ`, ...
pub fn delta_partials_trig(dist: &DistanceSextuple) -> Result<PairValues> {
    let theta = diagonal_angle(dist)?;
    let (cot, csc) = (1.0 / theta.tan(), 1.0 / theta.sin());
    let DistanceSextuple { a, b, c, d, e, f } = *dist;
    Ok(PairValues([
        0.5 * a * cot,
        -0.5 * b * cot,
        0.5 * c * cot,
        -0.5 * d * cot,
        0.5 * f * csc,
        0.5 * e * csc,
    ]))
}

/// Partials of one triangle area with respect to its three sides.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrianglePartials {
    /// The body not in the triangle (`A_k` omits `P_k`).
    pub omitted: usize,
    pub pairs: [Pair; 3],
    pub values: [f64; 3],
}

impl TrianglePartials {
    pub fn get(&self, pair: Pair) -> Option<f64> {
        self.pairs.iter().position(|&p| p == pair).map(|i| self.values[i])
    }
}

fn triangle_pairs(k: usize) -> [Pair; 3] {
    let [i, j, l] = triangle_without(k);
    [Pair::from_indices(i, j), Pair::from_indices(j, l), Pair::from_indices(i, l)]
}

fn nondegenerate_triangle(dist: &DistanceSextuple, k: usize) -> Result<f64> {
    let area = triangle_area(dist, k)?;
    if area < DEGENERATE_AREA * dist.max().powi(2) {
        return Err(Error::DegenerateTriangle(triangle_without(k)));
    }
    Ok(area)
}

/// `∂A/∂x = x (y² + z² − x²) / (8A)` for every side of every triangle.
pub fn area_partials(dist: &DistanceSextuple) -> Result<[TrianglePartials; 4]> {
    let mut out = Vec::with_capacity(4);
    for k in 1..=4 {
        let area = nondegenerate_triangle(dist, k)?;
        let pairs = triangle_pairs(k);
        let sides = pairs.map(|p| dist.get(p));
        let values = [0, 1, 2].map(|n| {
            let x = sides[n];
            let (y, z) = (sides[(n + 1) % 3], sides[(n + 2) % 3]);
            x * (y * y + z * z - x * x) / (8.0 * area)
        });
        out.push(TrianglePartials { omitted: k, pairs, values });
    }
    Ok(out.try_into().expect("four triangles"))
}

/// The same partials as `(x/2) cot δ`, `δ` the angle opposite side `x`.
pub fn area_partials_trig(dist: &DistanceSextuple) -> Result<[TrianglePartials; 4]> {
    let angles = angle_set(dist)?;
    let mut out = Vec::with_capacity(4);
    for k in 1..=4 {
        let pairs = triangle_pairs(k);
        let [i, j, l] = triangle_without(k);
        let values = pairs.map(|p| {
            let (u, v) = p.indices();
            let opposite = [i, j, l].into_iter().find(|&w| w != u && w != v).unwrap();
            0.5 * dist.get(p) / angles.vertex(u, opposite, v).tan()
        });
        out.push(TrianglePartials { omitted: k, pairs, values });
    }
    Ok(out.try_into().expect("four triangles"))
}

/// `F1 = Δ − A1 − A3`.
pub fn f1_constraint(dist: &DistanceSextuple) -> Result<f64> {
    Ok(quad_area_delta(dist)? - triangle_area(dist, 1)? - triangle_area(dist, 3)?)
}

/// `F2 = Δ − A2 − A4`.
pub fn f2_constraint(dist: &DistanceSextuple) -> Result<f64> {
    Ok(quad_area_delta(dist)? - triangle_area(dist, 2)? - triangle_area(dist, 4)?)
}

/// Brackets of the `F1` angle equations.
pub fn f1_brackets(dist: &DistanceSextuple) -> Result<PairValues> {
    let s = angle_set(dist)?;
    let (cot, csc) = (1.0 / s.theta.tan(), 1.0 / s.theta.sin());
    let cotv = |i, j, k| 1.0 / s.vertex(i, j, k).tan();
    let mut b = PairValues::default();
    b[Pair::P12] = cot - cotv(1, 4, 2);
    b[Pair::P13] = dist.f / dist.e * csc;
    b[Pair::P14] = -cot - cotv(1, 2, 4);
    b[Pair::P23] = -cot - cotv(2, 4, 3);
    b[Pair::P24] = dist.e / dist.f * csc - cotv(2, 3, 4) - cotv(2, 1, 4);
    b[Pair::P34] = cot - cotv(3, 2, 4);
    Ok(b)
}

/// Brackets of the `F2` angle equations.
pub fn f2_brackets(dist: &DistanceSextuple) -> Result<PairValues> {
    let s = angle_set(dist)?;
    let (cot, csc) = (1.0 / s.theta.tan(), 1.0 / s.theta.sin());
    let cotv = |i, j, k| 1.0 / s.vertex(i, j, k).tan();
    let mut b = PairValues::default();
    b[Pair::P12] = cot - cotv(1, 3, 2);
    b[Pair::P13] = dist.f / dist.e * csc - cotv(1, 4, 3) - cotv(1, 2, 3);
    b[Pair::P14] = -cot - cotv(1, 3, 4);
    b[Pair::P23] = -cot - cotv(2, 1, 3);
    b[Pair::P24] = dist.e / dist.f * csc;
    b[Pair::P34] = cot - cotv(3, 1, 4);
    Ok(b)
}

/// Brackets `(1/r) ∂P/∂r` of the co-circular equations.
pub fn cocircular_brackets(dist: &DistanceSextuple) -> PairValues {
    let DistanceSextuple { a, b, c, d, e, f } = *dist;
    PairValues([c / a, d / b, a / c, b / d, -f / e, -e / f])
}

fn pair_residuals(
    masses: &Masses,
    dist: &DistanceSextuple,
    lambda: f64,
    terms: &[(f64, PairValues)],
) -> PairValues {
    PairValues::from_fn(|p| {
        let constraint: f64 = terms.iter().map(|(mult, br)| mult * br[p]).sum();
        dist.get(p).powi(-3) - lambda - constraint / masses.pair_product(p)
    })
}

pub fn f1_residuals(masses: &Masses, dist: &DistanceSextuple, lambda: f64, eta1: f64) -> Result<ResidualReport> {
    Ok(ResidualReport {
        system: System::F1,
        pairs: pair_residuals(masses, dist, lambda, &[(eta1, f1_brackets(dist)?)]),
        inertia_residual: None,
        constraint: f1_constraint(dist)?,
    })
}

pub fn f2_residuals(masses: &Masses, dist: &DistanceSextuple, lambda: f64, eta2: f64) -> Result<ResidualReport> {
    Ok(ResidualReport {
        system: System::F2,
        pairs: pair_residuals(masses, dist, lambda, &[(eta2, f2_brackets(dist)?)]),
        inertia_residual: None,
        constraint: f2_constraint(dist)?,
    })
}

pub fn cocircular_residuals(masses: &Masses, dist: &DistanceSextuple, lambda: f64, sigma: f64) -> ResidualReport {
    ResidualReport {
        system: System::Cocircular,
        pairs: pair_residuals(masses, dist, lambda, &[(sigma, cocircular_brackets(dist))]),
        inertia_residual: None,
        constraint: ptolemy_defect(dist),
    }
}

/// Brackets for each constraint multiplier of a distance-space system.
pub fn system_brackets(dist: &DistanceSextuple, system: System) -> Result<Vec<PairValues>> {
    match system {
        System::F1 => Ok(vec![f1_brackets(dist)?]),
        System::F2 => Ok(vec![f2_brackets(dist)?]),
        System::Both => Ok(vec![f1_brackets(dist)?, f2_brackets(dist)?]),
        System::Cocircular => Ok(vec![cocircular_brackets(dist)]),
        System::Position => Err(Error::PreconditionViolated(
            "the position system has no distance-space brackets".into(),
        )),
    }
}

/// Constraint values in the order of [`system_brackets`].
pub fn system_constraints(dist: &DistanceSextuple, system: System) -> Result<Vec<f64>> {
    match system {
        System::F1 => Ok(vec![f1_constraint(dist)?]),
        System::F2 => Ok(vec![f2_constraint(dist)?]),
        System::Both => Ok(vec![f1_constraint(dist)?, f2_constraint(dist)?]),
        System::Cocircular => Ok(vec![ptolemy_defect(dist)]),
        System::Position => Err(Error::PreconditionViolated(
            "the position system has no distance-space constraint".into(),
        )),
    }
}

fn estimate(system: System, lambda: f64, mult: &[f64], residual_norm: f64) -> MultiplierEstimate {
    let (first, second) = (mult.first().copied(), mult.get(1).copied());
    let (eta, eta2, sigma) = match system {
        System::F1 | System::F2 => (first, None, None),
        System::Both => (first, second, None),
        System::Cocircular => (None, None, first),
        System::Position => (None, None, None),
    };
    MultiplierEstimate {
        lambda,
        eta,
        eta2,
        sigma,
        residual_norm,
    }
}

/// Assembles a multiplier estimate from raw values.
pub fn multiplier_estimate(system: System, lambda: f64, constraint_mult: &[f64], residual_norm: f64) -> MultiplierEstimate {
    estimate(system, lambda, constraint_mult, residual_norm)
}

/// Residuals of any distance-space system at given multipliers.
pub fn system_residuals(
    masses: &Masses,
    dist: &DistanceSextuple,
    system: System,
    multipliers: &MultiplierEstimate,
    i0: Option<f64>,
) -> Result<ResidualReport> {
    let brackets = system_brackets(dist, system)?;
    let mult = multipliers.constraint_multipliers();
    if mult.len() != brackets.len() {
        return Err(Error::PreconditionViolated(format!(
            "system {system:?} needs {} constraint multipliers, got {}",
            brackets.len(),
            mult.len()
        )));
    }
    let terms: Vec<(f64, PairValues)> = mult.into_iter().zip(brackets).collect();
    let constraint = system_constraints(dist, system)?.into_iter().fold(0.0, |m: f64, c| if c.abs() > m.abs() { c } else { m });
    Ok(ResidualReport {
        system,
        pairs: pair_residuals(masses, dist, multipliers.lambda, &terms),
        inertia_residual: i0.map(|i0| moment_i(masses, dist) - i0),
        constraint,
    })
}

/// Least-squares `(λ, η…)` for the six pair equations of a distance-space system.
pub fn fit_multipliers(masses: &Masses, dist: &DistanceSextuple, system: System) -> Result<MultiplierEstimate> {
    let brackets = system_brackets(dist, system)?;
    let cols = 1 + brackets.len();
    let mut a = DMatrix::zeros(6, cols);
    let mut rhs = DVector::zeros(6);
    for (row, p) in Pair::ALL.into_iter().enumerate() {
        a[(row, 0)] = 1.0;
        for (k, br) in brackets.iter().enumerate() {
            a[(row, k + 1)] = br[p] / masses.pair_product(p);
        }
        rhs[row] = dist.get(p).powi(-3);
    }
    let svd = a.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|&&s| s > SVD_RANK * sigma_max).count();
    if rank < cols {
        return Err(Error::RankDeficient { rank, expected: cols });
    }
    let x = svd.solve(&rhs, 0.0).map_err(|e| Error::PreconditionViolated(e.to_string()))?;
    let residual_norm = (&a * &x - &rhs).norm();
    let mult: Vec<f64> = x.iter().skip(1).copied().collect();
    Ok(estimate(system, x[0], &mult, residual_norm))
}

/// `(D1, D2)` with `D1 = (r12⁻³−λ)(r34⁻³−λ) − (r13⁻³−λ)(r24⁻³−λ)` and
/// `D2 = (r13⁻³−λ)(r24⁻³−λ) − (r14⁻³−λ)(r23⁻³−λ)`.
pub fn dziobek_residuals(dist: &DistanceSextuple, lambda: f64) -> (f64, f64) {
    let s = |i, j| dist.r(i, j).powi(-3) - lambda;
    let (p1, p2, p3) = (s(1, 2) * s(3, 4), s(1, 3) * s(2, 4), s(1, 4) * s(2, 3));
    (p1 - p2, p2 - p3)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GConstraint {
    /// `G = P − Q cos²γ`
    pub g: f64,
    /// `P = ac + bd − ef`
    pub p: f64,
    /// `Q = 4abcd / (ac + bd + ef)`
    pub q: f64,
}

pub fn g_constraint(dist: &DistanceSextuple) -> Result<GConstraint> {
    let gamma = condition5_angles(dist)?.gamma;
    let DistanceSextuple { a, b, c, d, e, f } = *dist;
    let p = ptolemy_defect(dist);
    let q = 4.0 * a * b * c * d / (a * c + b * d + e * f);
    Ok(GConstraint {
        g: p - q * gamma.cos().powi(2),
        p,
        q,
    })
}

/// Central-difference gradient of a function of the six distances, step `h = rel_step · max r`.
pub fn distance_gradient_fd(
    dist: &DistanceSextuple,
    rel_step: f64,
    f: impl Fn(&DistanceSextuple) -> Result<f64>,
) -> Result<PairValues> {
    let h = rel_step * dist.max();
    let mut g = PairValues::default();
    for p in Pair::ALL {
        let x = dist.get(p);
        g[p] = (f(&dist.with(p, x + h))? - f(&dist.with(p, x - h))?) / (2.0 * h);
    }
    Ok(g)
}

/// Largest component of `|∇G − ∇P|`, both gradients by central differences.
///
/// Requires `P ≈ 0` (co-circular input). Writing `∂G/∂r = ∂P/∂r + cos γ · L sin(γ − φ)`
/// with `L cos φ = 2Q ∂γ/∂r` and `L sin φ = ∂Q/∂r`, the correction vanishes with `cos γ`.
pub fn gradient_equality_check(dist: &DistanceSextuple) -> Result<f64> {
    let p = ptolemy_defect(dist);
    if p.abs() > PTOLEMY_ZERO * dist.max().powi(2) {
        return Err(Error::PreconditionViolated(format!("Ptolemy defect {p:e} is not zero")));
    }
    let grad_g = distance_gradient_fd(dist, 1e-6, |d| Ok(g_constraint(d)?.g))?;
    let grad_p = distance_gradient_fd(dist, 1e-6, |d| Ok(ptolemy_defect(d)))?;
    Ok(Pair::ALL.iter().fold(0.0, |m: f64, &k| m.max((grad_g[k] - grad_p[k]).abs())))
}

/// Heron area of a bare triangle, used by the finite-difference checks.
pub fn triangle_area_of_sides(x: f64, y: f64, z: f64) -> Result<f64> {
    heron_area(x, y, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::SQRT_2;

    const LAMBDA_SQ: f64 = 0.676_776_695_296_636_9; // (1 + 2^{-3/2}) / 2
    const ETA_SQ: f64 = -0.323_223_304_703_363_1; // (2^{-3/2} − 1) / 2

    fn square() -> Configuration {
        Configuration::planar([[0.5, 0.5], [-0.5, 0.5], [-0.5, -0.5], [0.5, -0.5]], Masses::equal()).unwrap()
    }

    fn sq() -> DistanceSextuple {
        DistanceSextuple::new(1.0, 1.0, 1.0, 1.0, SQRT_2, SQRT_2).unwrap()
    }

    fn rect() -> DistanceSextuple {
        DistanceSextuple::new(1.0, 2.0, 1.0, 2.0, 5f64.sqrt(), 5f64.sqrt()).unwrap()
    }

    #[test]
    fn square_multiplier_constants() {
        // λ − η = 1 and λ + η = 2^{-3/2} at the square.
        let t = 2f64.powf(-1.5);
        assert_relative_eq!(LAMBDA_SQ, (1.0 + t) / 2.0, epsilon = 1e-16);
        assert_relative_eq!(ETA_SQ, (t - 1.0) / 2.0, epsilon = 1e-16);
    }

    #[test]
    fn potential_examples() {
        let u = potential_u(&Masses::equal(), &sq()).unwrap();
        assert_relative_eq!(u, 4.0 + SQRT_2, epsilon = 1e-14);
        let pair = Masses::with_massless([1.0, 1.0, 0.0, 0.0]).unwrap();
        let d = DistanceSextuple::new(1.0, 2.0, 3.0, 4.0, 5.0, 6.0).unwrap();
        assert_relative_eq!(potential_u(&pair, &d).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(potential_u(&Masses::equal(), &sq().scaled(2.0)).unwrap(), u / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn moment_examples() {
        assert_relative_eq!(moment_i(&Masses::equal(), &sq()), 1.0, epsilon = 1e-15);
        assert_relative_eq!(moment_i_positions(&square()), 1.0, epsilon = 1e-15);
        assert_relative_eq!(moment_i(&Masses::equal(), &sq().scaled(2.0)), 4.0, epsilon = 1e-14);
        let pair = Masses::with_massless([1.0, 1.0, 0.0, 0.0]).unwrap();
        let d = DistanceSextuple::new(1.0, 2.0, 3.0, 4.0, 5.0, 6.0).unwrap();
        assert_relative_eq!(moment_i(&pair, &d), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn square_position_residuals() {
        let lambda = 2.0 + 0.5f64.sqrt();
        let r = position_cc_residual(&square(), lambda).unwrap();
        assert!(r.iter().all(|x| x.abs() < 1e-12), "{r:?}");
        let wrong = position_cc_residual(&square(), 1.0).unwrap();
        assert!(wrong.iter().any(|x| x.abs() > 0.1));
        let u = potential_u(&Masses::equal(), &sq()).unwrap();
        assert_relative_eq!(lambda, u / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn lagrange_triangle_with_massless_body() {
        let h = 0.75f64.sqrt();
        let masses = Masses::with_massless([1.0, 1.0, 1.0, 0.0]).unwrap();
        let c = Configuration::new([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, h, 0.0], [3.0, 2.0, 0.0]], masses).unwrap();
        // Equilateral side 1, three unit masses: λ_pos = 3 / s³.
        let r = position_cc_residual(&c, 3.0).unwrap();
        assert!(r[..9].iter().all(|x| x.abs() < 1e-12), "{r:?}");
    }

    #[test]
    fn lambda_examples() {
        let fit = lambda_from_config(&square()).unwrap();
        assert_relative_eq!(fit.lambda, 2.0 + 0.5f64.sqrt(), epsilon = 1e-13);
        assert!(fit.residual_norm < 1e-12);
        let big = lambda_from_config(&square().scaled(2.0)).unwrap();
        assert_relative_eq!(big.lambda, fit.lambda / 8.0, epsilon = 1e-13);
        let random = Configuration::planar([[0.0, 0.0], [1.0, 0.1], [1.3, 1.2], [-0.2, 0.7]], Masses::equal()).unwrap();
        assert!(lambda_from_config(&random).unwrap().residual_norm > 1e-2);
    }

    #[test]
    fn delta_partial_examples() {
        let p = delta_partials(&sq()).unwrap();
        assert_relative_eq!(p[Pair::P13], SQRT_2 / 2.0, epsilon = 1e-14);
        assert!(p[Pair::P12].abs() < 1e-15);
        let r = delta_partials(&rect()).unwrap();
        assert_relative_eq!(r[Pair::P23], -0.75, epsilon = 1e-14);
        let fd = distance_gradient_fd(&rect(), 1e-6, quad_area_delta).unwrap();
        assert_relative_eq!(fd[Pair::P23], -0.75, epsilon = 1e-8);
        let trig = delta_partials_trig(&rect()).unwrap();
        for k in Pair::ALL {
            assert_relative_eq!(trig[k], r[k], epsilon = 1e-13);
        }
    }

    #[test]
    fn area_partial_examples() {
        let eq = DistanceSextuple::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let tri = area_partials(&eq).unwrap();
        assert_relative_eq!(tri[0].values[0], 1.0 / (2.0 * 3f64.sqrt()), epsilon = 1e-14);
        // A right triangle 3-4-5 as A4 = (a, b, e).
        let d = DistanceSextuple::new(3.0, 4.0, 4.0, 3.0, 5.0, 5.0).unwrap();
        let tri = area_partials(&d).unwrap();
        assert!(tri[3].get(Pair::P13).unwrap().abs() < 1e-14);
        // A3 = (a, d, f) = (1, 1, √2) in the unit square.
        let a3 = area_partials(&sq()).unwrap()[2];
        assert_relative_eq!(a3.get(Pair::P12).unwrap(), 0.5, epsilon = 1e-14);
        let h = 1e-6;
        let fd = (heron_area(1.0 + h, 1.0, SQRT_2).unwrap() - heron_area(1.0 - h, 1.0, SQRT_2).unwrap()) / (2.0 * h);
        assert_relative_eq!(fd, 0.5, epsilon = 1e-8);
        let trig = area_partials_trig(&sq()).unwrap();
        for (t, c) in trig.iter().zip(area_partials(&sq()).unwrap()) {
            for n in 0..3 {
                assert_relative_eq!(t.values[n], c.values[n], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn square_angle_systems() {
        let m = Masses::equal();
        for report in [
            f1_residuals(&m, &sq(), LAMBDA_SQ, ETA_SQ).unwrap(),
            f2_residuals(&m, &sq(), LAMBDA_SQ, ETA_SQ).unwrap(),
        ] {
            assert!(report.pairs.max_abs() < 1e-12, "{report:?}");
            assert!(report.constraint.abs() < 1e-14);
        }
        let free = f1_residuals(&m, &sq(), LAMBDA_SQ, 0.0).unwrap();
        for (p, v) in free.pairs.iter() {
            assert_eq!(v, sq().get(p).powi(-3) - LAMBDA_SQ);
        }
        let free2 = f2_residuals(&m, &sq(), 0.3, 0.0).unwrap();
        assert_eq!(free2.pairs[Pair::P24], sq().f.powi(-3) - 0.3);
    }

    #[test]
    fn brackets_match_constraint_gradients() {
        let mut s = crate::sampling::Sampler::new(21);
        for _ in 0..50 {
            let d = mutual_distances(&s.convex_planar()).unwrap();
            let g1 = distance_gradient_fd(&d, 1e-6, f1_constraint).unwrap();
            let g2 = distance_gradient_fd(&d, 1e-6, f2_constraint).unwrap();
            let (b1, b2) = (f1_brackets(&d).unwrap(), f2_brackets(&d).unwrap());
            for p in Pair::ALL {
                assert!((b1[p] - 2.0 * g1[p] / d.get(p)).abs() < 1e-6 * b1[p].abs().max(1.0), "{p:?}");
                assert!((b2[p] - 2.0 * g2[p] / d.get(p)).abs() < 1e-6 * b2[p].abs().max(1.0), "{p:?}");
            }
            let gp = distance_gradient_fd(&d, 1e-6, |x| Ok(ptolemy_defect(x))).unwrap();
            let bp = cocircular_brackets(&d);
            for p in Pair::ALL {
                assert!((bp[p] - gp[p] / d.get(p)).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn cocircular_cot_terms_vanish() {
        let mut s = crate::sampling::Sampler::new(8);
        for _ in 0..50 {
            let d = mutual_distances(&s.cyclic()).unwrap();
            let a = angle_set(&d).unwrap();
            let c = |i, j, k| 1.0 / a.vertex(i, j, k).tan();
            assert!((c(1, 4, 3) + c(1, 2, 3)).abs() < 1e-10);
            assert!((c(2, 3, 4) + c(2, 1, 4)).abs() < 1e-10);
        }
    }

    #[test]
    fn fit_examples() {
        let m = Masses::equal();
        let f1 = fit_multipliers(&m, &sq(), System::F1).unwrap();
        assert_relative_eq!(f1.lambda, LAMBDA_SQ, epsilon = 1e-13);
        assert_relative_eq!(f1.eta.unwrap(), ETA_SQ, epsilon = 1e-13);
        assert!(f1.residual_norm < 1e-12);
        let f2 = fit_multipliers(&m, &sq(), System::F2).unwrap();
        assert_relative_eq!(f2.eta.unwrap(), ETA_SQ, epsilon = 1e-13);
        let rnd = DistanceSextuple::new(1.0, 1.1, 0.9, 1.2, 1.5, 1.4).unwrap();
        assert!(fit_multipliers(&m, &rnd, System::F1).unwrap().residual_norm > 1e-6);
        assert!(matches!(
            fit_multipliers(&m, &sq(), System::Both),
            Err(Error::RankDeficient { rank: 2, expected: 3 })
        ));
    }

    #[test]
    fn dziobek_examples() {
        let (d1, d2) = dziobek_residuals(&sq(), LAMBDA_SQ);
        assert!(d1.abs() < 1e-12 && d2.abs() < 1e-12);
        let (d1, _) = dziobek_residuals(&sq(), 0.0);
        assert_relative_eq!(d1, 7.0 / 8.0, epsilon = 1e-14);
    }

    #[test]
    fn g_examples() {
        let g = g_constraint(&sq()).unwrap();
        assert!(g.g.abs() < 1e-14 && g.p.abs() < 1e-14);
        assert_relative_eq!(g.q, 1.0, epsilon = 1e-14);
        let g = g_constraint(&rect()).unwrap();
        assert!(g.g.abs() < 1e-14 && g.p.abs() < 1e-14);
        assert_relative_eq!(g.q, 1.6, epsilon = 1e-14);
        let rh = DistanceSextuple::new(1.0, 1.0, 1.0, 1.0, 3f64.sqrt(), 1.0).unwrap();
        let g = g_constraint(&rh).unwrap();
        assert_relative_eq!(g.p, 2.0 - 3f64.sqrt(), epsilon = 1e-14);
        assert!(g.g.abs() < 1e-14);
        assert_relative_eq!(g.q * (2.0 * std::f64::consts::FRAC_PI_3).cos().powi(2), 2.0 - 3f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn gradient_equality_examples() {
        assert!(gradient_equality_check(&sq()).unwrap() < 1e-7);
        assert!(gradient_equality_check(&rect()).unwrap() < 1e-7);
        let rh = DistanceSextuple::new(1.0, 1.0, 1.0, 1.0, 3f64.sqrt(), 1.0).unwrap();
        assert!(matches!(gradient_equality_check(&rh), Err(Error::PreconditionViolated(_))));
        let mut s = crate::sampling::Sampler::new(2);
        let d = mutual_distances(&s.cyclic()).unwrap();
        assert!(gradient_equality_check(&d).unwrap() < 1e-6);
    }
}
