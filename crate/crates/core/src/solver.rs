//! Central configuration solvers.
//!
//! Both solvers wrap [`crate::newton::solve`] and differ in unknowns:
//!
//! - position space: twelve coordinates and `λ_pos`, with gauge rows fixing
//!   the centre of mass, the orientation (`y1 = z1 = z2 = 0`) and `I = I₀`;
//! - distance space: six distances, the Dziobek `λ` and one or two constraint
//!   multipliers, with rows for the pair equations, `I = I₀` and the constraints.
//!
//! Rows and unknowns are made dimensionless with the reference length
//! `L_ref = sqrt(2 m′ I₀ / Σ m_i m_j)`, the RMS mutual distance at `I = I₀`.

use nalgebra::{DMatrix, DVector, Matrix3};
use serde::Serialize;

use crate::cc::{
    fit_multipliers, moment_i, moment_i_positions, multiplier_estimate, position_cc_residual, system_brackets,
    system_constraints, MultiplierEstimate, System,
};
use crate::error::{Error, Result};
use crate::geometry::{
    heron_area, mutual_distances, quad_area_delta, triangle_areas, Configuration, DistanceSextuple, Masses, Pair, Vec3,
};
use crate::newton::{self, fd_jacobian, NewtonOptions};
use crate::tolerance::{COINCIDENT, DEGENERATE_AREA};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub newton: NewtonOptions,
    /// Target moment of inertia.
    pub i0: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            newton: NewtonOptions::default(),
            i0: 1.0,
        }
    }
}

impl SolveOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.newton.tol = tol;
        self
    }

    pub fn with_i0(mut self, i0: f64) -> Self {
        self.i0 = i0;
        self
    }
}

/// Quantities held fixed while solving.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Gauge {
    pub center_of_mass: [f64; 3],
    /// Body pinned to the positive x-axis.
    pub axis_body: usize,
    /// Body pinned to the upper half of the xy-plane.
    pub plane_body: usize,
    pub i0: f64,
}

impl Gauge {
    fn standard(i0: f64) -> Self {
        Gauge {
            center_of_mass: [0.0; 3],
            axis_body: 1,
            plane_body: 2,
            i0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveResult {
    pub system: System,
    pub masses: Masses,
    pub distances: DistanceSextuple,
    /// Coordinates in the gauge frame; for distance-space solves, the planar embedding.
    pub positions: Option<[[f64; 3]; 4]>,
    /// Dziobek-normalized multipliers; `λ_pos = m′ λ`.
    pub multipliers: MultiplierEstimate,
    pub lambda_position: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Norm of the scaled residual vector at the returned point.
    pub final_residual: f64,
    pub gauge: Gauge,
}

impl SolveResult {
    pub fn configuration(&self) -> Option<Configuration> {
        self.positions.map(|p| Configuration::new_unchecked(p, self.masses))
    }
}

fn reference_length(masses: &Masses, i0: f64) -> f64 {
    let pair_sum: f64 = Pair::ALL.iter().map(|&p| masses.pair_product(p)).sum();
    (2.0 * masses.total() * i0 / pair_sum).sqrt()
}

fn min_distance(q: &[Vec3; 4]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..4 {
        for j in i + 1..4 {
            m = m.min((q[i] - q[j]).norm());
        }
    }
    m
}

fn any_perpendicular(v: &Vec3) -> Vec3 {
    let trial = if v.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    (trial - v * v.dot(&trial)).normalize()
}

/// Moves the centre of mass to the origin, body 1 onto the positive x-axis and
/// body 2 into the upper half of the xy-plane.
pub fn to_gauge_frame(config: &Configuration) -> Configuration {
    let cm = config.center_of_mass();
    let q = config.positions().map(|p| p - cm);
    let scale = config.max_distance().max(f64::MIN_POSITIVE);
    let e1 = if q[0].norm() > 1e-9 * scale {
        q[0].normalize()
    } else {
        Vec3::x()
    };
    let across = q[1] - e1 * e1.dot(&q[1]);
    let e2 = if across.norm() > 1e-9 * scale {
        across.normalize()
    } else {
        any_perpendicular(&e1)
    };
    let e3 = e1.cross(&e2);
    let frame = Matrix3::from_rows(&[e1.transpose(), e2.transpose(), e3.transpose()]);
    Configuration::from_vectors(q.map(|p| frame * p), *config.masses())
}

/// Newton on `∇U + λ∇I = 0` in coordinates, with the gauge fixed.
pub fn solve_position_space(masses: &Masses, initial: &Configuration, opts: &SolveOptions) -> Result<SolveResult> {
    let config = initial.with_masses(*masses);
    let scale = config.max_distance();
    let gap = min_distance(config.positions());
    if !(gap > COINCIDENT * scale) {
        return Err(Error::DegenerateCollapse { min_distance: gap });
    }
    let i0 = opts.i0;
    let l_ref = reference_length(masses, i0);
    let framed = to_gauge_frame(&config);
    let framed = framed.scaled((i0 / moment_i_positions(&framed)).sqrt());
    let lambda0 = crate::cc::lambda_from_config(&framed)?.lambda;

    let pair_sum: f64 = Pair::ALL.iter().map(|&p| masses.pair_product(p)).sum();
    let force_scale = pair_sum / (l_ref * l_ref);
    let lambda_scale = force_scale / (masses.total() * l_ref);
    let collapse = 1e-8 * l_ref;
    let m = masses.as_array();
    let total = masses.total();

    let unpack = |x: &DVector<f64>| {
        let q = [0, 1, 2, 3].map(|i| Vec3::new(x[3 * i], x[3 * i + 1], x[3 * i + 2]) * l_ref);
        (Configuration::from_vectors(q, *masses), x[12] * lambda_scale)
    };

    let residual = |x: &DVector<f64>| -> Result<DVector<f64>> {
        let (c, lambda) = unpack(x);
        let gap = min_distance(c.positions());
        if gap < collapse {
            return Err(Error::DegenerateCollapse { min_distance: gap });
        }
        let forces = position_cc_residual(&c, lambda)?;
        let cm = c.center_of_mass();
        let q = c.positions();
        let mut r = DVector::zeros(19);
        for k in 0..12 {
            r[k] = forces[k] / force_scale;
        }
        for k in 0..3 {
            r[12 + k] = cm[k] / l_ref;
        }
        r[15] = q[0].y / l_ref;
        r[16] = q[0].z / l_ref;
        r[17] = q[1].z / l_ref;
        r[18] = (moment_i_positions(&c) - i0) / i0;
        Ok(r)
    };

    let jacobian = |x: &DVector<f64>, _: &DVector<f64>| -> Result<DMatrix<f64>> {
        let (c, lambda) = unpack(x);
        let q = c.positions();
        let cm = c.center_of_mass();
        let mut j = DMatrix::zeros(19, 13);
        // Force rows, in physical units first.
        for i in 0..4 {
            for k in 0..4 {
                let coef = lambda * m[i] * (if i == k { 1.0 } else { 0.0 } - m[k] / total);
                for a in 0..3 {
                    j[(3 * i + a, 3 * k + a)] += coef;
                }
            }
            for jj in 0..4 {
                if jj == i {
                    continue;
                }
                let d = q[jj] - q[i];
                let r = d.norm();
                let h = (Matrix3::identity() / r.powi(3) - d * d.transpose() * (3.0 / r.powi(5))) * (m[i] * m[jj]);
                for a in 0..3 {
                    for b in 0..3 {
                        j[(3 * i + a, 3 * jj + b)] += h[(a, b)];
                        j[(3 * i + a, 3 * i + b)] -= h[(a, b)];
                    }
                }
            }
            let dl = (q[i] - cm) * m[i];
            for a in 0..3 {
                j[(3 * i + a, 12)] = dl[a];
            }
        }
        for row in 0..12 {
            for col in 0..12 {
                j[(row, col)] *= l_ref / force_scale;
            }
            j[(row, 12)] *= lambda_scale / force_scale;
        }
        for k in 0..4 {
            for a in 0..3 {
                j[(12 + a, 3 * k + a)] = m[k] / total;
            }
            let di = (q[k] - cm) * (m[k] * l_ref / i0);
            for a in 0..3 {
                j[(18, 3 * k + a)] = di[a];
            }
        }
        j[(15, 1)] = 1.0;
        j[(16, 2)] = 1.0;
        j[(17, 5)] = 1.0;
        Ok(j)
    };

    let mut x0 = DVector::zeros(13);
    for (i, p) in framed.positions().iter().enumerate() {
        for a in 0..3 {
            x0[3 * i + a] = p[a] / l_ref;
        }
    }
    x0[12] = lambda0 / lambda_scale;

    let out = newton::solve(x0, residual, jacobian, &opts.newton)?;
    let (solution, lambda_pos) = unpack(&out.x);
    let distances = mutual_distances(&solution).map_err(|_| Error::DegenerateCollapse {
        min_distance: min_distance(solution.positions()),
    })?;
    let raw: f64 = position_cc_residual(&solution, lambda_pos)?.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(SolveResult {
        system: System::Position,
        masses: *masses,
        distances,
        positions: Some(solution.to_arrays()),
        multipliers: multiplier_estimate(System::Position, lambda_pos / total, &[], raw),
        lambda_position: lambda_pos,
        converged: true,
        iterations: out.iterations,
        final_residual: out.residual_norm,
        gauge: Gauge::standard(i0),
    })
}

fn non_realizable(e: Error) -> Error {
    match e {
        Error::NonRealizable(_) => e,
        other => Error::NonRealizable(other.to_string()),
    }
}

fn check_realizable(dist: &DistanceSextuple) -> Result<()> {
    triangle_areas(dist).map_err(non_realizable)?;
    quad_area_delta(dist).map_err(non_realizable)?;
    Ok(())
}

/// Newton on the distance-space system `system` with `I = I₀`.
pub fn solve_distance_space(
    masses: &Masses,
    initial: &DistanceSextuple,
    system: System,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    if system == System::Position {
        return Err(Error::PreconditionViolated(
            "use solve_position_space for the position system".into(),
        ));
    }
    if masses.as_array().iter().any(|&m| m <= 0.0) {
        return Err(Error::InvalidMasses("distance-space equations need positive masses".into()));
    }
    check_realizable(initial)?;
    let i0 = opts.i0;
    let l_ref = reference_length(masses, i0);
    let start = initial.scaled((i0 / moment_i(masses, initial)).sqrt());
    let n_mult = match system {
        System::Both => 2,
        _ => 1,
    };

    let seed = match system {
        System::Both => fit_multipliers(masses, &start, System::F1).map(|f| (f.lambda, vec![f.eta.unwrap_or(0.0), 0.0])),
        _ => fit_multipliers(masses, &start, system).map(|f| (f.lambda, f.constraint_multipliers())),
    };
    let (lambda0, mult0) = seed.unwrap_or_else(|_| {
        let mean = start.as_array().iter().map(|r| r.powi(-3)).sum::<f64>() / 6.0;
        (mean, vec![0.0; n_mult])
    });
    let inv3 = l_ref.powi(3);

    let unpack = |x: &DVector<f64>| -> Result<(DistanceSextuple, f64, Vec<f64>)> {
        let r: [f64; 6] = std::array::from_fn(|k| x[k] * l_ref);
        if r.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::NonRealizable("non-positive distance".into()));
        }
        let dist = DistanceSextuple::from_array(r).map_err(non_realizable)?;
        Ok((dist, x[6] / inv3, (0..n_mult).map(|k| x[7 + k] / inv3).collect()))
    };

    let rows = 7 + n_mult;
    let residual = |x: &DVector<f64>| -> Result<DVector<f64>> {
        let (dist, lambda, mult) = unpack(x)?;
        check_realizable(&dist)?;
        let brackets = system_brackets(&dist, system).map_err(non_realizable)?;
        let constraints = system_constraints(&dist, system).map_err(non_realizable)?;
        let mut r = DVector::zeros(rows);
        for (k, p) in Pair::ALL.into_iter().enumerate() {
            let coupling: f64 = mult.iter().zip(&brackets).map(|(eta, b)| eta * b[p]).sum();
            r[k] = (dist.get(p).powi(-3) - lambda - coupling / masses.pair_product(p)) * inv3;
        }
        r[6] = (moment_i(masses, &dist) - i0) / i0;
        for (k, c) in constraints.iter().enumerate() {
            r[7 + k] = c / (l_ref * l_ref);
        }
        Ok(r)
    };
    let jacobian = |x: &DVector<f64>, _: &DVector<f64>| {
        let steps: Vec<f64> = x.iter().map(|v| 1e-7 * v.abs().max(1.0)).collect();
        fd_jacobian(x, rows, &steps, residual)
    };

    let mut x0 = DVector::zeros(7 + n_mult);
    for (k, r) in start.as_array().iter().enumerate() {
        x0[k] = r / l_ref;
    }
    x0[6] = lambda0 * inv3;
    for k in 0..n_mult {
        x0[7 + k] = mult0[k] * inv3;
    }

    let out = newton::solve(x0, residual, jacobian, &opts.newton)?;
    let (dist, lambda, mult) = unpack(&out.x)?;
    let pair_norm = residual(&out.x)?.rows(0, 6).norm() / inv3;
    let positions = trilaterate(&dist, *masses).ok().map(|c| to_gauge_frame(&c).to_arrays());
    Ok(SolveResult {
        system,
        masses: *masses,
        distances: dist,
        positions,
        multipliers: multiplier_estimate(system, lambda, &mult, pair_norm),
        lambda_position: masses.total() * lambda,
        converged: true,
        iterations: out.iterations,
        final_residual: out.residual_norm,
        gauge: Gauge::standard(i0),
    })
}

/// Planar coordinates realizing `dist`: `P1` at the origin, `P2` on the positive
/// x-axis, `P3` with positive y, `P4` fitted to its three distances.
pub fn trilaterate(dist: &DistanceSextuple, masses: Masses) -> Result<Configuration> {
    let DistanceSextuple { a, b, c, d, e, f } = *dist;
    let area = heron_area(a, b, e).map_err(non_realizable)?;
    if area < DEGENERATE_AREA * dist.max().powi(2) {
        return Err(Error::DegenerateTriangle([1, 2, 3]));
    }
    let x3 = (a * a + e * e - b * b) / (2.0 * a);
    let y3 = 2.0 * area / a;
    let anchors = [[0.0, 0.0], [a, 0.0], [x3, y3]];
    let targets = [d, f, c];
    let x4 = (d * d - f * f + a * a) / (2.0 * a);
    let y4 = (d * d - c * c + x3 * x3 + y3 * y3 - 2.0 * x3 * x4) / (2.0 * y3);
    let mut p = nalgebra::Vector2::new(x4, y4);
    for _ in 0..20 {
        let mut jac = nalgebra::Matrix3x2::zeros();
        let mut res = nalgebra::Vector3::zeros();
        for k in 0..3 {
            let diff = p - nalgebra::Vector2::new(anchors[k][0], anchors[k][1]);
            let n = diff.norm();
            res[k] = n - targets[k];
            if n > 0.0 {
                jac.set_row(k, &(diff / n).transpose());
            }
        }
        let Some(step) = jac.svd(true, true).solve(&-res, 1e-14).ok() else {
            break;
        };
        p += step;
        if step.norm() < 1e-15 * dist.max() {
            break;
        }
    }
    Configuration::planar([[0.0, 0.0], [a, 0.0], [x3, y3], [p.x, p.y]], masses)
}

/// Result of a continuation along a mass path.
#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub results: Vec<SolveResult>,
    /// Why the sweep stopped early, as [`Error::ContinuationBreak`].
    pub stopped: Option<Error>,
}

impl Sweep {
    pub fn into_result(self) -> Result<Vec<SolveResult>> {
        match self.stopped {
            Some(e) => Err(e),
            None => Ok(self.results),
        }
    }
}

/// Solves along `path`, warm-starting each entry from the previous solution.
pub fn mass_sweep(path: &[Masses], seed: &SolveResult, opts: &SolveOptions) -> Result<Sweep> {
    if !seed.converged {
        return Err(Error::PreconditionViolated("the sweep seed has not converged".into()));
    }
    let opts = SolveOptions { i0: seed.gauge.i0, ..*opts };
    let mut results: Vec<SolveResult> = Vec::with_capacity(path.len());
    for (k, masses) in path.iter().enumerate() {
        let previous = results.last().unwrap_or(seed);
        let attempt = match seed.system {
            System::Position => match previous.configuration() {
                Some(c) => solve_position_space(masses, &c, &opts),
                None => Err(Error::PreconditionViolated("position seed without coordinates".into())),
            },
            system => solve_distance_space(masses, &previous.distances, system, &opts),
        };
        match attempt {
            Ok(r) => results.push(r),
            Err(cause) => {
                return Ok(Sweep {
                    results,
                    stopped: Some(Error::ContinuationBreak {
                        last_good: k.checked_sub(1),
                        cause: Box::new(cause),
                    }),
                })
            }
        }
    }
    Ok(Sweep { results, stopped: None })
}

/// A square of unit side, labeled counter-clockwise.
pub fn square_template() -> DistanceSextuple {
    let s = std::f64::consts::SQRT_2;
    DistanceSextuple::new(1.0, 1.0, 1.0, 1.0, s, s).expect("square")
}

/// An isosceles trapezoid with bases `r12 = 1`, `r34 = ratio` and height 0.8.
pub fn trapezoid_template(ratio: f64) -> Configuration {
    let (h, t) = (0.8, ratio / 2.0);
    Configuration::planar([[-0.5, 0.0], [0.5, 0.0], [t, h], [-t, h]], Masses::equal()).expect("trapezoid")
}

/// A kite symmetric about the `P1P3` diagonal.
pub fn kite_template() -> Configuration {
    Configuration::planar([[0.0, -0.8], [0.6, 0.0], [0.0, 1.0], [-0.6, 0.0]], Masses::equal()).expect("kite")
}
