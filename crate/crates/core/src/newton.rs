//! Damped Gauss–Newton for square or overdetermined nonlinear systems.
//!
//! Steps are least-squares solutions of `J dx = −r` through the SVD, so
//! rank-deficient Jacobians (redundant constraints) take the minimum-norm step.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonOptions {
    /// Stop when the residual norm drops below this.
    pub tol: f64,
    pub max_iterations: usize,
    /// Backtracking halvings per step before giving up.
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tol: 1e-12,
            max_iterations: 200,
            max_halvings: 30,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonOutcome {
    pub x: DVector<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
}

/// Relative singular-value cutoff for the least-squares step.
const STEP_RCOND: f64 = 1e-12;

/// Minimizes `‖r(x)‖` from `x0` until it falls below `opts.tol`.
///
/// A trial point whose residual cannot be evaluated is treated like an
/// increase and triggers another halving. If the line search exhausts its
/// halvings and the last failure was an evaluation error, that error is
/// returned; otherwise the result is [`Error::NoConvergence`].
pub fn solve<R, J>(x0: DVector<f64>, residual: R, jacobian: J, opts: &NewtonOptions) -> Result<NewtonOutcome>
where
    R: Fn(&DVector<f64>) -> Result<DVector<f64>>,
    J: Fn(&DVector<f64>, &DVector<f64>) -> Result<DMatrix<f64>>,
{
    let mut x = x0;
    let mut r = residual(&x)?;
    let mut norm = finite_norm(&r)?;
    for iteration in 0..opts.max_iterations {
        if norm < opts.tol {
            return Ok(NewtonOutcome {
                x,
                residual_norm: norm,
                iterations: iteration,
            });
        }
        let jac = jacobian(&x, &r)?;
        let svd = jac.svd(true, true);
        let cutoff = STEP_RCOND * svd.singular_values.max();
        let step = svd
            .solve(&(-&r), cutoff)
            .map_err(|e| Error::PreconditionViolated(e.to_string()))?;

        let mut t = 1.0;
        let mut last_error = None;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial = &x + &step * t;
            match residual(&trial).and_then(|rt| finite_norm(&rt).map(|n| (rt, n))) {
                Ok((rt, n)) if n < norm => {
                    accepted = Some((trial, rt, n));
                    break;
                }
                Ok(_) => {}
                Err(e) => last_error = Some(e),
            }
            t *= 0.5;
        }
        match accepted {
            Some((xt, rt, n)) => {
                x = xt;
                r = rt;
                norm = n;
            }
            None => {
                return Err(last_error.unwrap_or(Error::NoConvergence {
                    iterations: iteration + 1,
                    residual: norm,
                }))
            }
        }
    }
    if norm < opts.tol {
        return Ok(NewtonOutcome {
            x,
            residual_norm: norm,
            iterations: opts.max_iterations,
        });
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iterations,
        residual: norm,
    })
}

fn finite_norm(r: &DVector<f64>) -> Result<f64> {
    let n = r.norm();
    if n.is_finite() {
        Ok(n)
    } else {
        Err(Error::NoConvergence {
            iterations: 0,
            residual: n,
        })
    }
}

/// Central-difference Jacobian with per-variable steps `h_k`.
pub fn fd_jacobian<R>(x: &DVector<f64>, rows: usize, steps: &[f64], residual: R) -> Result<DMatrix<f64>>
where
    R: Fn(&DVector<f64>) -> Result<DVector<f64>>,
{
    let mut jac = DMatrix::zeros(rows, x.len());
    for (k, &h) in steps.iter().enumerate() {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[k] += h;
        xm[k] -= h;
        let col = (residual(&xp)? - residual(&xm)?) / (2.0 * h);
        jac.set_column(k, &col);
    }
    Ok(jac)
}
