//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use planar_cc::cc::{dziobek_residuals, f1_residuals, f2_residuals, fit_multipliers, position_cc_residual, System};
use planar_cc::classify::{classify_configuration, verify_propositions, Shape};
use planar_cc::geometry::mutual_distances;
use planar_cc::sampling::Sampler;
use planar_cc::solver::{
    mass_sweep, solve_distance_space, solve_position_space, square_template, trapezoid_template, SolveOptions,
};
use planar_cc::suites::{run_suite, SuiteSummary};
use planar_cc::{Configuration, DistanceSextuple, Masses};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn suite_outcome(summary: SuiteSummary) -> Outcome {
    let detail = summary
        .checks
        .iter()
        .map(|c| format!("{} worst={:.3e} fails={}/{}", c.name, c.worst.unwrap_or(f64::NAN), c.failures, c.samples))
        .collect::<Vec<_>>()
        .join("; ");
    outcome(summary.passed, detail)
}

fn square_fixed_point() -> Outcome {
    let t = 2f64.powf(-1.5);
    let (lambda, eta) = ((1.0 + t) / 2.0, (t - 1.0) / 2.0);
    let sq = square_template();
    let m = Masses::equal();
    let r1 = f1_residuals(&m, &sq, lambda, eta).expect("square residuals").pairs.max_abs();
    let r2 = f2_residuals(&m, &sq, lambda, eta).expect("square residuals").pairs.max_abs();
    let (d1, d2) = dziobek_residuals(&sq, lambda);
    let fitted = fit_multipliers(&m, &sq, System::F1).expect("fit at the square");
    let passed = r1 < 1e-12 && r2 < 1e-12 && d1.abs() < 1e-12 && d2.abs() < 1e-12 && eta < 0.0 && fitted.eta.unwrap() < 0.0;
    outcome(
        passed,
        format!(
            "F1 {r1:.1e}, F2 {r2:.1e}, Dziobek ({:.1e}, {:.1e}), eta {eta:.6}, fitted eta {:.6}",
            d1.abs(),
            d2.abs(),
            fitted.eta.unwrap()
        ),
    )
}

fn position_distance_agreement() -> Outcome {
    let started = Instant::now();
    let mut s = Sampler::new(2024);
    let pts = [[0.5, 0.5, 0.0], [-0.5, 0.5, 0.0], [-0.5, -0.5, 0.0], [0.5, -0.5, 0.0]]
        .map(|p| p.map(|x| x + 0.01 * s.uniform(-1.0, 1.0)));
    let m = Masses::equal();
    let initial = Configuration::new(pts, m).expect("distinct bodies");
    let opts = SolveOptions::default();
    let pos = match solve_position_space(&m, &initial, &opts) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("position solve failed: {e}")),
    };
    let dist = match solve_distance_space(&m, &square_template(), System::Both, &opts) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("distance solve failed: {e}")),
    };
    let elapsed = started.elapsed();
    let d = pos.distances.scaled(1.0 / pos.distances.a);
    let square_err = [d.b - 1.0, d.c - 1.0, d.d - 1.0, d.e - 2f64.sqrt(), d.f - 2f64.sqrt()]
        .into_iter()
        .fold(0.0f64, |m, x| m.max(x.abs()));
    let rel = (pos.lambda_position - m.total() * dist.multipliers.lambda).abs() / pos.lambda_position;
    let passed = square_err < 1e-8 && rel < 1e-7 && elapsed < Duration::from_secs(1);
    outcome(
        passed,
        format!(
            "square error {square_err:.1e}, lambda_pos {:.9}, m'*lambda {:.9}, rel {rel:.1e}, {:.3}s",
            pos.lambda_position,
            m.total() * dist.multipliers.lambda,
            elapsed.as_secs_f64()
        ),
    )
}

fn suite(name: &str, seed: u64) -> Outcome {
    match run_suite(name, seed) {
        Ok(summary) => suite_outcome(summary),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn propositions() -> Outcome {
    let started = Instant::now();
    let opts = SolveOptions::default();
    // Asymmetric start, so the symmetry of the answer is not inherited from the guess.
    let skew = [1.03, 0.98, 1.01, 0.96, 1.02, 0.99];
    let base = mutual_distances(&trapezoid_template(0.7)).expect("template").as_array();
    let start = DistanceSextuple::from_array(std::array::from_fn(|k| base[k] * skew[k])).expect("start");
    let mut worst = 0.0f64;
    let mut ok = true;
    let mut notes = Vec::new();
    for t in [0.2, 0.5, 0.8] {
        let m = Masses::new([1.0, 1.0, t, t]).expect("masses");
        match solve_distance_space(&m, &start, System::Cocircular, &opts) {
            Ok(r) => {
                let DistanceSextuple { b, d, e, f, .. } = r.distances;
                worst = worst.max((e - f).abs()).max((d - b).abs());
                ok &= (e - f).abs() < 1e-8 && (d - b).abs() < 1e-8;
            }
            Err(err) => {
                ok = false;
                notes.push(format!("t={t}: {err}"));
            }
        }
    }
    let m = Masses::equal();
    let square = solve_distance_space(&m, &start, System::Cocircular, &opts)
        .ok()
        .and_then(|r| r.configuration())
        .map(|c| classify_configuration(&c).shape);
    ok &= square == Some(Shape::Square);

    // Continuation from t = 1 down to t = 0.2.
    let seed = solve_distance_space(&m, &square_template(), System::Cocircular, &opts);
    let path: Vec<Masses> = (0..=16)
        .map(|k| 1.0 - 0.05 * k as f64)
        .map(|t| Masses::new([1.0, 1.0, t, t]).expect("masses"))
        .collect();
    let sweep_ok = seed
        .ok()
        .and_then(|s| mass_sweep(&path, &s, &opts).ok())
        .and_then(|sw| sw.into_result().ok())
        .is_some_and(|rs| {
            rs.iter().zip(&path).all(|(r, m)| verify_propositions(m, r).is_ok_and(|p| p.confirmed))
        });
    let elapsed = started.elapsed();
    ok &= sweep_ok && elapsed < Duration::from_secs(10);
    outcome(
        ok,
        format!(
            "max |r13-r24|,|r14-r23| {worst:.1e}, equal masses {:?}, sweep of {} confirmed {sweep_ok}, {:.3}s {}",
            square,
            path.len(),
            elapsed.as_secs_f64(),
            notes.join("; ")
        ),
    )
}

fn cross_space() -> Outcome {
    // Embedded distance-space solutions satisfy the position equations.
    let mut s = Sampler::new(99);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let m = s.masses();
        let Ok(r) = solve_distance_space(&m, &square_template(), System::F1, &SolveOptions::default()) else {
            return outcome(false, "distance solve failed".into());
        };
        let c = r.configuration().expect("planar embedding");
        let res = position_cc_residual(&c, r.lambda_position).expect("residual");
        worst = res.iter().fold(worst, |w, x| w.max(x.abs()));
    }
    outcome(worst < 1e-7, format!("max position residual {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("square fixed point", square_fixed_point),
        ("position/distance agreement", || {
            let a = position_distance_agreement();
            let b = cross_space();
            outcome(a.passed && b.passed, format!("{}; {}", a.detail, b.detail))
        }),
        ("planarity equivalence", || suite("planarity", 3)),
        ("ptolemy inequality", || suite("ptolemy", 4)),
        ("derivative conformance", || suite("derivatives", 5)),
        ("gradient lemma", || suite("gradient-equality", 6)),
        ("proposition reproduction", propositions),
        ("dziobek and ordering", || suite("dziobek", 8)),
    ];
    let mut failures = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let o = run();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {} {tag} {name} ({:.2}s): {}",
            n + 1,
            started.elapsed().as_secs_f64(),
            o.detail
        );
        if !o.passed {
            failures += 1;
        }
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
