//! Named randomized property suites.
//!
//! Each suite draws its samples from a [`Sampler`] seeded by the caller and
//! reports, per check, the worst value seen and the number of violations.
//! Summaries only use maxima, minima and counts, so they do not depend on
//! the order samples are processed in.

use std::time::Instant;

use serde::Serialize;

use crate::cc::{
    area_partials, area_partials_trig, delta_partials, delta_partials_trig, distance_gradient_fd, dziobek_residuals,
    gradient_equality_check, System,
};
use crate::classify::{classify_configuration, order_sequentially, verify_propositions, Convexity, Shape};
use crate::error::{Error, Result};
use crate::geometry::{
    mutual_distances, quad_area_delta, triangle_area, vertex_angle, Configuration, DistanceSextuple, Masses, Pair,
};
use crate::planarity::{
    affine_dependence, cayley_menger, check_condition3, check_condition4, condition5_residual, ptolemy_defect,
    Condition4Class,
};
use crate::sampling::Sampler;
use crate::solver::{solve_distance_space, solve_position_space, square_template, trapezoid_template, SolveOptions, SolveResult};
use crate::tolerance::{CAYLEY_MENGER, CONDITION5};

pub const SUITES: [&str; 8] = [
    "ptolemy",
    "gradient-equality",
    "planarity",
    "derivatives",
    "cyclic-identities",
    "dziobek",
    "propositions",
    "square",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// Every value must be below the limit; the worst value is the maximum.
    Below,
    /// Every value must be at least the limit; the worst value is the minimum.
    AtLeast,
    /// Counts violations only.
    Count,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteCheck {
    pub name: String,
    pub bound: Bound,
    pub limit: f64,
    pub worst: Option<f64>,
    pub samples: usize,
    pub failures: usize,
}

impl SuiteCheck {
    fn new(name: &str, bound: Bound, limit: f64) -> Self {
        SuiteCheck {
            name: name.to_string(),
            bound,
            limit,
            worst: None,
            samples: 0,
            failures: 0,
        }
    }

    fn below(name: &str, limit: f64) -> Self {
        Self::new(name, Bound::Below, limit)
    }

    fn at_least(name: &str, limit: f64) -> Self {
        Self::new(name, Bound::AtLeast, limit)
    }

    fn count(name: &str) -> Self {
        Self::new(name, Bound::Count, 0.0)
    }

    fn record(&mut self, value: f64) {
        self.samples += 1;
        let (bad, better) = match self.bound {
            Bound::Below => (!(value < self.limit), self.worst.is_none_or(|w| value > w)),
            Bound::AtLeast => (!(value >= self.limit), self.worst.is_none_or(|w| value < w)),
            Bound::Count => unreachable!("count checks record booleans"),
        };
        if bad {
            self.failures += 1;
        }
        if better || value.is_nan() {
            self.worst = Some(value);
        }
    }

    fn record_ok(&mut self, ok: bool) {
        self.samples += 1;
        if !ok {
            self.failures += 1;
        }
        self.worst = Some(self.failures as f64);
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.samples > 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<SuiteCheck>,
    /// Wall time; left out of JSON so reports are reproducible.
    #[serde(skip)]
    pub seconds: f64,
}

impl SuiteSummary {
    fn finish(suite: &str, seed: u64, checks: Vec<SuiteCheck>, started: Instant) -> Self {
        SuiteSummary {
            suite: suite.to_string(),
            seed,
            passed: checks.iter().all(SuiteCheck::passed),
            checks,
            seconds: started.elapsed().as_secs_f64(),
        }
    }

    pub fn check(&self, name: &str) -> Option<&SuiteCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub fn run_suite(name: &str, seed: u64) -> Result<SuiteSummary> {
    let started = Instant::now();
    let mut s = Sampler::new(seed);
    let checks = match name {
        "ptolemy" => ptolemy(&mut s),
        "gradient-equality" => gradient_equality(&mut s),
        "planarity" => planarity(&mut s),
        "derivatives" => derivatives(&mut s),
        "cyclic-identities" => cyclic_identities(&mut s),
        "dziobek" => dziobek(&mut s),
        "propositions" => propositions(),
        "square" => square(&mut s),
        other => return Err(Error::UnknownSuite(other.to_string())),
    };
    Ok(SuiteSummary::finish(name, seed, checks, started))
}

fn distances(c: &Configuration) -> DistanceSextuple {
    mutual_distances(c).expect("sampled bodies are distinct")
}

fn ptolemy(s: &mut Sampler) -> Vec<SuiteCheck> {
    let mut convex = SuiteCheck::at_least("convex_defect_over_l2", -1e-12);
    let mut cyclic = SuiteCheck::below("cyclic_abs_defect_over_l2", 1e-10);
    for _ in 0..10_000 {
        let d = distances(&s.convex_planar());
        convex.record(ptolemy_defect(&d) / d.max().powi(2));
    }
    for _ in 0..1_000 {
        let d = distances(&s.cyclic());
        cyclic.record(ptolemy_defect(&d).abs() / d.max().powi(2));
    }
    vec![convex, cyclic]
}

fn gradient_equality(s: &mut Sampler) -> Vec<SuiteCheck> {
    let mut check = SuiteCheck::below("max_gradient_difference", 1e-6);
    for _ in 0..100 {
        let d = distances(&s.cyclic());
        check.record(gradient_equality_check(&d).unwrap_or(f64::INFINITY));
    }
    vec![check]
}

/// Signs of the affine vector interleave around a convex quadrilateral.
fn alternating_signs(v: [f64; 4]) -> bool {
    v[0] * v[1] < 0.0 && v[1] * v[2] < 0.0 && v[2] * v[3] < 0.0
}

fn planarity(s: &mut Sampler) -> Vec<SuiteCheck> {
    let mut planar_cm = SuiteCheck::below("planar_cayley_menger_over_l8", CAYLEY_MENGER);
    let mut nonplanar_cm = SuiteCheck::at_least("nonplanar_cayley_menger_over_l8", 1e-4);
    let mut kernel = SuiteCheck::count("planar_kernel_dimension_one");
    let mut cond4_convex = SuiteCheck::count("convex_condition4_standard");
    let mut cond4_concave = SuiteCheck::count("concave_condition4_candidates");
    let mut cond3 = SuiteCheck::count("condition3_interior_label");
    let mut cond5 = SuiteCheck::below("convex_condition5_over_l4", CONDITION5);
    let mut signs = SuiteCheck::count("affine_vector_sign_pattern");
    let mut nonplanar_fail = SuiteCheck::count("nonplanar_fails_all_certificates");

    for _ in 0..1_000 {
        let c = s.convex_planar();
        let d = distances(&c);
        let l = d.max();
        planar_cm.record(cayley_menger(&d).abs() / l.powi(8));
        let dep = affine_dependence(&c);
        kernel.record_ok(dep.is_some_and(|a| a.kernel_dim == 1));
        signs.record_ok(dep.is_some_and(|a| alternating_signs(a.vector)));
        cond4_convex.record_ok(check_condition4(&d).is_ok_and(|c4| c4.class == Condition4Class::StandardConvex));
        cond3.record_ok(matches!(check_condition3(&d), Ok(None)));
        cond5.record(condition5_residual(&d).map_or(f64::INFINITY, |f| f.abs() / l.powi(4)));
    }
    for _ in 0..1_000 {
        let (c, interior) = s.concave_planar();
        let d = distances(&c);
        planar_cm.record(cayley_menger(&d).abs() / d.max().powi(8));
        let dep = affine_dependence(&c);
        kernel.record_ok(dep.is_some_and(|a| a.kernel_dim == 1));
        signs.record_ok(dep.is_some_and(|a| {
            let k = interior - 1;
            (0..4).filter(|&j| j != k).all(|j| a.vector[j] * a.vector[k] < 0.0)
        }));
        cond4_concave.record_ok(check_condition4(&d).is_ok_and(|c4| match c4.class {
            Condition4Class::Concave { candidates } => candidates.contains(&interior),
            _ => false,
        }));
        cond3.record_ok(matches!(check_condition3(&d), Ok(Some(k)) if k == interior));
    }
    for _ in 0..1_000 {
        let c = s.nonplanar();
        let d = distances(&c);
        let l = d.max();
        let cm = cayley_menger(&d) / l.powi(8);
        nonplanar_cm.record(cm);
        let fails_cm = cm.abs() >= CAYLEY_MENGER;
        let fails_affine = affine_dependence(&c).is_none();
        let fails_cond3 = !matches!(check_condition3(&d), Ok(Some(_)));
        let fails_cond4 = check_condition4(&d).map_or(true, |c4| c4.class == Condition4Class::NotStandardPlanar);
        let fails_cond5 = condition5_residual(&d).map_or(true, |f| f.abs() >= CONDITION5 * l.powi(4));
        nonplanar_fail.record_ok(fails_cm && fails_affine && fails_cond3 && fails_cond4 && fails_cond5);
    }
    vec![
        planar_cm,
        nonplanar_cm,
        kernel,
        cond4_convex,
        cond4_concave,
        cond3,
        cond5,
        signs,
        nonplanar_fail,
    ]
}

/// `|a − b| / max(|a|, |b|, 1e-3 L)`.
fn relative_error(a: f64, b: f64, l: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-3 * l)
}

fn derivatives(s: &mut Sampler) -> Vec<SuiteCheck> {
    let mut delta = SuiteCheck::below("delta_partials_relative_error", 1e-5);
    let mut delta_trig = SuiteCheck::below("delta_partials_trig_relative_error", 1e-5);
    let mut area = SuiteCheck::below("area_partials_relative_error", 1e-5);
    let mut area_trig = SuiteCheck::below("area_partials_trig_relative_error", 1e-5);
    for n in 0..1_000 {
        let c = match n % 3 {
            0 => s.convex_planar(),
            1 => s.concave_planar().0,
            _ => s.nonplanar(),
        };
        let d = distances(&c);
        let l = d.max();
        let worst = |analytic: Result<crate::cc::PairValues>, fd: &Result<crate::cc::PairValues>| match (analytic, fd) {
            (Ok(a), Ok(f)) => Pair::ALL.iter().map(|&p| relative_error(a[p], f[p], l)).fold(0.0, f64::max),
            _ => f64::INFINITY,
        };
        let fd = distance_gradient_fd(&d, 1e-6, quad_area_delta);
        delta.record(worst(delta_partials(&d), &fd));
        delta_trig.record(worst(delta_partials_trig(&d), &fd));

        let mut err = 0.0f64;
        let mut err_trig = 0.0f64;
        match (area_partials(&d), area_partials_trig(&d)) {
            (Ok(alg), Ok(trig)) => {
                for k in 1..=4 {
                    let Ok(fd) = distance_gradient_fd(&d, 1e-6, |x| triangle_area(x, k)) else {
                        err = f64::INFINITY;
                        continue;
                    };
                    for p in alg[k - 1].pairs {
                        err = err.max(relative_error(alg[k - 1].get(p).unwrap(), fd[p], l));
                        err_trig = err_trig.max(relative_error(trig[k - 1].get(p).unwrap(), fd[p], l));
                    }
                    // Sides outside the triangle have zero partials.
                    for p in Pair::ALL.iter().filter(|p| !alg[k - 1].pairs.contains(p)) {
                        err = err.max(fd[*p].abs() / (1e-3 * l));
                    }
                }
            }
            _ => {
                err = f64::INFINITY;
                err_trig = f64::INFINITY;
            }
        }
        area.record(err);
        area_trig.record(err_trig);
    }
    vec![delta, delta_trig, area, area_trig]
}

fn cyclic_identities(s: &mut Sampler) -> Vec<SuiteCheck> {
    let mut second = SuiteCheck::below("second_theorem_error", 1e-10);
    let mut supplementary = SuiteCheck::below("supplementary_angle_error", 1e-10);
    let mut equidiagonal = SuiteCheck::count("equidiagonal_cyclic_is_isosceles_trapezoid");
    for _ in 0..1_000 {
        let d = distances(&s.cyclic());
        let DistanceSextuple { a, b, c, d: dd, e, f } = d;
        second.record((e / f - (a * dd + b * c) / (a * b + c * dd)).abs());
        let sum = vertex_angle(&d, 2, 3, 4).and_then(|x| Ok(x + vertex_angle(&d, 2, 1, 4)?));
        supplementary.record(sum.map_or(f64::INFINITY, |x| (x - std::f64::consts::PI).abs()));
    }
    for _ in 0..200 {
        // Mirror-symmetric points on a circle have equal diagonals.
        let t = s.uniform(0.2, 1.2);
        let u = s.uniform(t + 0.3, std::f64::consts::PI - 0.2);
        let pts = [-t, t, u, -u].map(|x: f64| [x.sin(), x.cos()]);
        let c = s.embed([pts[0], pts[1], pts[2], pts[3]]);
        let Ok(perm) = order_sequentially(&c) else {
            equidiagonal.record_ok(false);
            continue;
        };
        let shape = classify_configuration(&c.permuted(perm)).shape;
        equidiagonal.record_ok(matches!(shape, Shape::IsoscelesTrapezoid | Shape::Square));
    }
    vec![second, supplementary, equidiagonal]
}

/// Checks Dziobek's relation and the side/diagonal bound on `λ` at one solution.
pub fn check_solution(result: &SolveResult, dziobek: &mut SuiteCheck, sandwich: &mut SuiteCheck) {
    let d = result.distances;
    let lambda = result.multipliers.lambda;
    let l3 = d.max().powi(3);
    let (d1, d2) = dziobek_residuals(&d, lambda);
    dziobek.record(d1.abs().max(d2.abs()) * l3 * l3);
    let Some(config) = result.configuration() else {
        return;
    };
    let report = classify_configuration(&config);
    if report.convexity != Convexity::Convex {
        return;
    }
    let Some(perm) = report.permutation else {
        return;
    };
    let ordered = distances(&config.permuted(perm));
    let max_side = [ordered.a, ordered.b, ordered.c, ordered.d].into_iter().fold(0.0, f64::max);
    let min_diag = ordered.e.min(ordered.f);
    let margin = (max_side.powi(-3) - lambda).min(lambda - min_diag.powi(-3));
    sandwich.record(margin * l3);
}

/// Test set of planar central configurations: distance-space solves from the
/// square for random masses, and position-space solves from perturbed squares.
pub fn solution_set(s: &mut Sampler, count: usize) -> (Vec<SolveResult>, usize) {
    let opts = SolveOptions::default();
    let mut out = Vec::new();
    let mut failed = 0;
    for n in 0..count {
        let masses = s.masses();
        let attempt = if n % 2 == 0 {
            let system = [System::F1, System::F2, System::Both][(n / 2) % 3];
            solve_distance_space(&masses, &square_template(), system, &opts)
        } else {
            let pts = [[0.5, 0.5], [-0.5, 0.5], [-0.5, -0.5], [0.5, -0.5]]
                .map(|[x, y]| [x + 0.05 * s.uniform(-1.0, 1.0), y + 0.05 * s.uniform(-1.0, 1.0)]);
            Configuration::planar(pts, masses).and_then(|c| solve_position_space(&masses, &c, &opts))
        };
        match attempt {
            Ok(r) => out.push(r),
            Err(_) => failed += 1,
        }
    }
    (out, failed)
}

fn dziobek(s: &mut Sampler) -> Vec<SuiteCheck> {
    let mut dz = SuiteCheck::below("dziobek_residual", 1e-8);
    let mut sandwich = SuiteCheck::at_least("lambda_sandwich_margin", 0.0);
    let mut converged = SuiteCheck::count("converged");
    let (results, failed) = solution_set(s, 40);
    for r in &results {
        converged.record_ok(true);
        check_solution(r, &mut dz, &mut sandwich);
    }
    for _ in 0..failed {
        converged.record_ok(false);
    }
    vec![dz, sandwich, converged]
}

fn propositions() -> Vec<SuiteCheck> {
    let opts = SolveOptions::default();
    let mut diag = SuiteCheck::below("abs_r13_minus_r24", 1e-8);
    let mut legs = SuiteCheck::below("abs_r14_minus_r23", 1e-8);
    let mut confirmed = SuiteCheck::count("proposition_confirmed");
    let skew = [1.03, 0.98, 1.01, 0.96, 1.02, 0.99];
    let base = distances(&trapezoid_template(0.7)).as_array();
    let start = DistanceSextuple::from_array(std::array::from_fn(|k| base[k] * skew[k])).expect("start");
    for t in [0.2, 0.5, 0.8] {
        let m = Masses::new([1.0, 1.0, t, t]).expect("positive masses");
        match solve_distance_space(&m, &start, System::Cocircular, &opts) {
            Ok(r) => {
                diag.record((r.distances.e - r.distances.f).abs());
                legs.record((r.distances.d - r.distances.b).abs());
                confirmed.record_ok(verify_propositions(&m, &r).is_ok_and(|p| p.confirmed));
            }
            Err(_) => {
                diag.record(f64::INFINITY);
                legs.record(f64::INFINITY);
                confirmed.record_ok(false);
            }
        }
    }
    let m = Masses::equal();
    let square = solve_distance_space(&m, &start, System::Cocircular, &opts);
    confirmed.record_ok(square.is_ok_and(|r| verify_propositions(&m, &r).is_ok_and(|p| p.confirmed)));
    vec![diag, legs, confirmed]
}

fn square(s: &mut Sampler) -> Vec<SuiteCheck> {
    let mut shape = SuiteCheck::count("equal_masses_square");
    let mut residual = SuiteCheck::below("position_residual", 1e-10);
    for _ in 0..20 {
        let pts = [[0.5, 0.5], [-0.5, 0.5], [-0.5, -0.5], [0.5, -0.5]]
            .map(|[x, y]| [x + 0.01 * s.uniform(-1.0, 1.0), y + 0.01 * s.uniform(-1.0, 1.0), 0.01 * s.uniform(-1.0, 1.0)]);
        let solved = Configuration::new(pts, Masses::equal())
            .and_then(|c| solve_position_space(&Masses::equal(), &c, &SolveOptions::default()));
        match solved {
            Ok(r) => {
                residual.record(r.multipliers.residual_norm);
                shape.record_ok(verify_propositions(&Masses::equal(), &r).is_ok_and(|p| p.confirmed));
            }
            Err(_) => {
                residual.record(f64::INFINITY);
                shape.record_ok(false);
            }
        }
    }
    vec![shape, residual]
}
