//! Geometric classification of four-body configurations, and numerical checks
//! of the symmetric-mass shape propositions at solved points.

use nalgebra::{Matrix4x3, Vector2};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{mutual_distances, vertex_angle, Configuration, DistanceSextuple, Masses, Pair};
use crate::planarity::{affine_dependence, check_condition3, ptolemy_defect};
use crate::solver::SolveResult;
use crate::cc::System;
use crate::tolerance::SHAPE_REL;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Convexity {
    Convex,
    /// `interior` is the body inside the triangle of the other three.
    Concave { interior: usize },
    /// Not a genuine planar quadrilateral: collinear triples, lower dimension, or non-planar.
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Square,
    Rhombus,
    Kite,
    IsoscelesTrapezoid,
    Parallelogram,
    Rectangle,
    Equidiagonal,
    Generic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    /// Dimension of the affine hull.
    pub dimension: usize,
    pub convexity: Convexity,
    pub sequentially_ordered: bool,
    /// Relabeling to the standard configuration: new body `k + 1` is old body `perm[k] + 1`.
    pub permutation: Option<[usize; 4]>,
    pub cocircular: bool,
    /// Radial distance of `P4` from the circle through `P1 P2 P3`.
    pub circumcircle_deviation: Option<f64>,
    /// Ptolemy defect in the standard labeling.
    pub ptolemy_defect: Option<f64>,
    /// Evaluated in the standard labeling; `generic` unless convex.
    pub shape: Shape,
    /// Equal mutual distances, such as `"r13 = r24"`.
    pub equalities: Vec<String>,
}

/// In-plane coordinates of a (near-)planar configuration.
fn plane_coordinates(config: &Configuration) -> [Vector2<f64>; 4] {
    let center = config.positions().iter().sum::<crate::Vec3>() / 4.0;
    let mut m = Matrix4x3::zeros();
    for (i, q) in config.positions().iter().enumerate() {
        m.set_row(i, &(q - center).transpose());
    }
    let v_t = m.svd(false, true).v_t.expect("right singular vectors requested");
    let (u, w) = (v_t.row(0).transpose(), v_t.row(1).transpose());
    config.positions().map(|q| {
        let p = q - center;
        Vector2::new(p.dot(&u), p.dot(&w))
    })
}

fn dimension(config: &Configuration) -> usize {
    affine_dependence(config).map_or(3, |a| a.configuration_dim())
}

/// Relabeling that traverses the boundary of a convex planar configuration,
/// starting at body 1 and taking the lexicographically smaller direction.
pub fn order_sequentially(config: &Configuration) -> Result<[usize; 4]> {
    match dimension(config) {
        2 => {}
        3 => return Err(Error::NotPlanar),
        _ => return Err(Error::NotConvex),
    }
    let dist = mutual_distances(config)?;
    match check_condition3(&dist) {
        Ok(None) => {}
        Ok(Some(_)) | Err(_) => return Err(Error::NotConvex),
    }
    let pts = plane_coordinates(config);
    let centroid = pts.iter().sum::<Vector2<f64>>() / 4.0;
    let mut order = [0usize, 1, 2, 3];
    let angle = |i: usize| {
        let v = pts[i] - centroid;
        v.y.atan2(v.x)
    };
    order.sort_by(|&i, &j| angle(i).total_cmp(&angle(j)));
    let start = order.iter().position(|&i| i == 0).expect("body 1 present");
    let forward = [0, 1, 2, 3].map(|k| order[(start + k) % 4]);
    let backward = [forward[0], forward[3], forward[2], forward[1]];
    Ok(forward.min(backward))
}

fn circumcircle_deviation(pts: &[Vector2<f64>; 4]) -> Option<f64> {
    let (p, q, r) = (pts[0], pts[1], pts[2]);
    let (b, c) = (q - p, r - p);
    let det = 2.0 * (b.x * c.y - b.y * c.x);
    let scale = b.norm_squared().max(c.norm_squared());
    if det.abs() < 1e-12 * scale {
        return None;
    }
    let ux = (c.y * b.norm_squared() - b.y * c.norm_squared()) / det;
    let uy = (b.x * c.norm_squared() - c.x * b.norm_squared()) / det;
    let center = p + Vector2::new(ux, uy);
    let radius = (p - center).norm();
    Some(((pts[3] - center).norm() - radius).abs())
}

fn shape_of(d: &DistanceSextuple, cocircular: bool, tol: f64) -> Result<Shape> {
    let eq = |x: f64, y: f64| (x - y).abs() < tol;
    let sides = [d.a, d.b, d.c, d.d];
    if sides.iter().all(|&s| eq(s, d.a)) {
        return Ok(if cocircular { Shape::Square } else { Shape::Rhombus });
    }
    if eq(d.a, d.c) && eq(d.b, d.d) {
        return Ok(if eq(d.e, d.f) { Shape::Rectangle } else { Shape::Parallelogram });
    }
    // Alternate angles on a diagonal are equal exactly when the cut sides are parallel.
    let angle_tol = tol / d.max();
    let parallel_ac = (vertex_angle(d, 1, 2, 4)? - vertex_angle(d, 2, 4, 3)?).abs() < angle_tol;
    let parallel_bd = (vertex_angle(d, 1, 3, 2)? - vertex_angle(d, 3, 1, 4)?).abs() < angle_tol;
    if (eq(d.b, d.d) && parallel_ac) || (eq(d.a, d.c) && parallel_bd) {
        return Ok(Shape::IsoscelesTrapezoid);
    }
    if (eq(d.a, d.b) && eq(d.c, d.d)) || (eq(d.a, d.d) && eq(d.b, d.c)) {
        return Ok(Shape::Kite);
    }
    if eq(d.e, d.f) {
        return Ok(Shape::Equidiagonal);
    }
    Ok(Shape::Generic)
}

fn equalities(d: &DistanceSextuple, tol: f64) -> Vec<String> {
    let mut pairs = Pair::ALL.to_vec();
    pairs.sort_by_key(|p| p.indices());
    let mut out = Vec::new();
    for (n, &p) in pairs.iter().enumerate() {
        for &q in &pairs[n + 1..] {
            if (d.get(p) - d.get(q)).abs() < tol {
                out.push(format!("{} = {}", p.label(), q.label()));
            }
        }
    }
    out
}

/// Classifies with distances equal when they differ by less than `rel_tol · L`.
pub fn classify_with_tolerance(config: &Configuration, rel_tol: f64) -> ClassificationReport {
    let dim = dimension(config);
    let scale = config.max_distance();
    let tol = rel_tol * scale;
    let dist = mutual_distances(config).ok();
    let mut report = ClassificationReport {
        dimension: dim,
        convexity: Convexity::Degenerate,
        sequentially_ordered: false,
        permutation: None,
        cocircular: false,
        circumcircle_deviation: None,
        ptolemy_defect: None,
        shape: Shape::Generic,
        equalities: dist.map(|d| equalities(&d, tol)).unwrap_or_default(),
    };
    let Some(dist) = dist else {
        return report;
    };
    if dim != 2 {
        return report;
    }
    report.convexity = match check_condition3(&dist) {
        Ok(None) => Convexity::Convex,
        Ok(Some(k)) => Convexity::Concave { interior: k },
        Err(_) => Convexity::Degenerate,
    };
    let deviation = circumcircle_deviation(&plane_coordinates(config));
    report.circumcircle_deviation = deviation;
    report.cocircular = report.convexity == Convexity::Convex && deviation.is_some_and(|d| d < tol);
    if report.convexity != Convexity::Convex {
        return report;
    }
    let Ok(perm) = order_sequentially(config) else {
        return report;
    };
    report.permutation = Some(perm);
    report.sequentially_ordered = perm == [0, 1, 2, 3];
    if let Ok(ordered) = mutual_distances(&config.permuted(perm)) {
        report.ptolemy_defect = Some(ptolemy_defect(&ordered));
        report.shape = shape_of(&ordered, report.cocircular, tol).unwrap_or(Shape::Generic);
    }
    report
}

pub fn classify_configuration(config: &Configuration) -> ClassificationReport {
    classify_with_tolerance(config, SHAPE_REL)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Proposition {
    /// Equal masses: the convex solution is a square.
    EqualMassesSquare,
    /// `m1 = m2`, `m3 = m4`, co-circular: isosceles trapezoid.
    PairedCocircularTrapezoid,
    /// `m1 = m2`, `m3 = m4`, convex: `r13 = r24` exactly when `r14 = r23`.
    PairedConvexEquivalence,
    /// `m1 = m3`, `m2 = m4`, convex: `r12 = r34` exactly when `r14 = r23`, and then a rhombus.
    OppositeRhombus,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EqualityCheck {
    pub equality: String,
    pub difference: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropositionReport {
    pub proposition: Proposition,
    pub confirmed: bool,
    pub checks: Vec<EqualityCheck>,
    pub shape: Shape,
}

/// Distances are compared at `1e-8 · L`.
pub const PROPOSITION_TOL: f64 = 1e-8;

fn same(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-12 * x.abs().max(y.abs())
}

fn check(d: &DistanceSextuple, p: Pair, q: Pair, tol: f64) -> EqualityCheck {
    let difference = (d.get(p) - d.get(q)).abs();
    EqualityCheck {
        equality: format!("{} = {}", p.label(), q.label()),
        difference,
        holds: difference < tol,
    }
}

/// Evaluates the proposition matching the mass pattern at a converged solution.
pub fn verify_propositions(masses: &Masses, result: &SolveResult) -> Result<PropositionReport> {
    if !result.converged {
        return Err(Error::PreconditionViolated("solution has not converged".into()));
    }
    let [m1, m2, m3, m4] = masses.as_array();
    let d = result.distances;
    let tol = PROPOSITION_TOL * d.max();
    let config = result
        .configuration()
        .ok_or_else(|| Error::PreconditionViolated("solution has no planar embedding".into()))?;
    let report = classify_configuration(&config);
    let convex_standard = report.convexity == Convexity::Convex && report.sequentially_ordered;

    let (proposition, checks, confirmed) = if same(m1, m2) && same(m2, m3) && same(m3, m4) {
        if !convex_standard {
            return Err(Error::NotApplicable);
        }
        (Proposition::EqualMassesSquare, vec![], report.shape == Shape::Square)
    } else if same(m1, m2) && same(m3, m4) {
        let checks = vec![check(&d, Pair::P13, Pair::P24, tol), check(&d, Pair::P14, Pair::P23, tol)];
        if result.system == System::Cocircular {
            let ok = checks.iter().all(|c| c.holds);
            (Proposition::PairedCocircularTrapezoid, checks, ok)
        } else {
            if !convex_standard {
                return Err(Error::NotApplicable);
            }
            let ok = checks[0].holds == checks[1].holds;
            (Proposition::PairedConvexEquivalence, checks, ok)
        }
    } else if same(m1, m3) && same(m2, m4) {
        if !convex_standard {
            return Err(Error::NotApplicable);
        }
        let checks = vec![check(&d, Pair::P12, Pair::P34, tol), check(&d, Pair::P14, Pair::P23, tol)];
        let joint = checks[0].holds == checks[1].holds;
        let rhombus = !checks[0].holds || matches!(report.shape, Shape::Rhombus | Shape::Square);
        (Proposition::OppositeRhombus, checks, joint && rhombus)
    } else {
        return Err(Error::NotApplicable);
    };
    Ok(PropositionReport {
        proposition,
        confirmed,
        checks,
        shape: report.shape,
    })
}
