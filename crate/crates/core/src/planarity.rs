//! Five independent planarity certificates for four points, plus the Ptolemy defect.
//!
//! 1. the Cayley–Menger determinant vanishes;
//! 2. an affine dependence `ΣA_i = 0, ΣA_i q_i = 0` exists (unique up to scale in dimension 2);
//! 3. one triangle area equals the sum of the other three (concave case);
//! 4. `Δ = A1 + A3` and/or `Δ = A2 + A4`;
//! 5. `F = (ac + bd + ef)(ac + bd − ef) − 4abcd cos²γ = 0` for convex input.

use nalgebra::{Matrix4, Matrix5};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    condition5_angles, degenerate_area, mutual_distances, triangle_areas, triangle_without,
    Configuration, DistanceSextuple,
};
use crate::tolerance::{AREA_IDENTITY, SVD_RANK};

/// The bordered 5×5 determinant of squared distances. Equals `288 V²` for the
/// tetrahedron spanned by the four points.
pub fn cayley_menger(dist: &DistanceSextuple) -> f64 {
    let s = |i, j| dist.r(i, j).powi(2);
    #[rustfmt::skip]
    let m = Matrix5::new(
        0.0, 1.0,      1.0,      1.0,      1.0,
        1.0, 0.0,      s(1, 2),  s(1, 3),  s(1, 4),
        1.0, s(1, 2),  0.0,      s(2, 3),  s(2, 4),
        1.0, s(1, 3),  s(2, 3),  0.0,      s(3, 4),
        1.0, s(1, 4),  s(2, 4),  s(3, 4),  0.0,
    );
    m.determinant()
}

/// A unit vector in the kernel of the 4×4 matrix with columns `(1, q_i)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AffineDependence {
    pub vector: [f64; 4],
    /// 1 for a genuinely two-dimensional configuration, 2 when collinear, 3 when all coincide.
    pub kernel_dim: usize,
}

impl AffineDependence {
    /// Dimension of the affine hull of the points.
    pub fn configuration_dim(&self) -> usize {
        3 - self.kernel_dim
    }
}

pub fn affine_dependence(config: &Configuration) -> Option<AffineDependence> {
    let center = config.positions().iter().sum::<crate::Vec3>() / 4.0;
    let scale = config.max_distance();
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let mut m = Matrix4::zeros();
    for (col, q) in config.positions().iter().enumerate() {
        let p = (q - center) / scale;
        m[(0, col)] = 1.0;
        m[(1, col)] = p.x;
        m[(2, col)] = p.y;
        m[(3, col)] = p.z;
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sigma = svd.singular_values;
    let sigma_max = sigma.max();
    let kernel_dim = sigma.iter().filter(|&&s| s < SVD_RANK * sigma_max).count();
    if kernel_dim == 0 {
        return None;
    }
    let smallest = sigma.imin();
    let mut vector = [0.0; 4];
    for (k, v) in vector.iter_mut().enumerate() {
        *v = v_t[(smallest, k)];
    }
    let norm = vector.iter().map(|x| x * x).sum::<f64>().sqrt();
    let lead = vector.iter().copied().find(|x| x.abs() > 1e-8).unwrap_or(1.0);
    let sign = lead.signum() / norm;
    Some(AffineDependence {
        vector: vector.map(|x| x * sign),
        kernel_dim,
    })
}

fn ensure_nondegenerate(dist: &DistanceSextuple, areas: &crate::AreaSet) -> Result<()> {
    for k in 1..=4 {
        if degenerate_area(areas.triangle(k), dist.max()) {
            return Err(Error::DegenerateTriangle(triangle_without(k)));
        }
    }
    Ok(())
}

/// Returns `k` when `A_k` equals the sum of the other three triangle areas,
/// i.e. the configuration is planar and concave with `P_k` inside the triangle
/// of the others. All four variants of the identity are tested.
pub fn check_condition3(dist: &DistanceSextuple) -> Result<Option<usize>> {
    let areas = triangle_areas(dist)?;
    ensure_nondegenerate(dist, &areas)?;
    let total: f64 = (1..=4).map(|k| areas.triangle(k)).sum();
    let tol = AREA_IDENTITY * dist.max().powi(2);
    Ok((1..=4).find(|&k| {
        let ak = areas.triangle(k);
        (ak - (total - ak)).abs() < tol
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Condition4Class {
    /// Both identities hold.
    StandardConvex,
    /// Exactly one identity holds; the interior point is one of `candidates`.
    Concave { candidates: [usize; 2] },
    /// Neither identity holds.
    NotStandardPlanar,
    /// Some triangle area vanishes, so the condition does not apply.
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Condition4 {
    /// `Δ = A1 + A3`
    pub holds_13: bool,
    /// `Δ = A2 + A4`
    pub holds_24: bool,
    pub residual_13: f64,
    pub residual_24: f64,
    pub class: Condition4Class,
}

pub fn check_condition4(dist: &DistanceSextuple) -> Result<Condition4> {
    let areas = triangle_areas(dist)?;
    let tol = AREA_IDENTITY * dist.max().powi(2);
    let residual_13 = areas.delta - areas.a1 - areas.a3;
    let residual_24 = areas.delta - areas.a2 - areas.a4;
    let holds_13 = residual_13.abs() < tol;
    let holds_24 = residual_24.abs() < tol;
    let class = if ensure_nondegenerate(dist, &areas).is_err() {
        Condition4Class::Degenerate
    } else {
        match (holds_13, holds_24) {
            (true, true) => Condition4Class::StandardConvex,
            // Δ = A1 + A3 rules out P1 and P3 inside.
            (true, false) => Condition4Class::Concave { candidates: [2, 4] },
            (false, true) => Condition4Class::Concave { candidates: [1, 3] },
            (false, false) => Condition4Class::NotStandardPlanar,
        }
    };
    Ok(Condition4 {
        holds_13,
        holds_24,
        residual_13,
        residual_24,
        class,
    })
}

/// `P = ac + bd − ef`.
pub fn ptolemy_defect(dist: &DistanceSextuple) -> f64 {
    dist.a * dist.c + dist.b * dist.d - dist.e * dist.f
}

/// `F = (ac + bd + ef)(ac + bd − ef) − 4abcd cos²γ`, for sequentially ordered input.
pub fn condition5_residual(dist: &DistanceSextuple) -> Result<f64> {
    let gamma = condition5_angles(dist)?.gamma;
    let s = dist.a * dist.c + dist.b * dist.d;
    let ef = dist.e * dist.f;
    let abcd = dist.a * dist.b * dist.c * dist.d;
    Ok((s + ef) * (s - ef) - 4.0 * abcd * gamma.cos().powi(2))
}

/// Every planarity diagnostic for one configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlanarityReport {
    pub cm_value: f64,
    pub affine_vector: Option<[f64; 4]>,
    pub affine_kernel_dim: usize,
    pub cond3_interior: Option<usize>,
    pub cond4: Option<Condition4>,
    pub cond5_f: Option<f64>,
    pub ptolemy_defect: f64,
}

pub fn planarity_report(config: &Configuration) -> Result<PlanarityReport> {
    let dist = mutual_distances(config)?;
    let mut report = planarity_report_from_distances(&dist)?;
    let affine = affine_dependence(config);
    report.affine_vector = affine.map(|a| a.vector);
    report.affine_kernel_dim = affine.map_or(0, |a| a.kernel_dim);
    Ok(report)
}

/// As [`planarity_report`], without Condition 2 (which needs positions).
pub fn planarity_report_from_distances(dist: &DistanceSextuple) -> Result<PlanarityReport> {
    Ok(PlanarityReport {
        cm_value: cayley_menger(dist),
        affine_vector: None,
        affine_kernel_dim: 0,
        cond3_interior: check_condition3(dist).ok().flatten(),
        cond4: Some(check_condition4(dist)?),
        cond5_f: condition5_residual(dist).ok(),
        ptolemy_defect: ptolemy_defect(dist),
    })
}
