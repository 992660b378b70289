//! Levenberg-Marquardt with a central-difference Jacobian.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::{evaluate, FitSpec, Forward};
use crate::error::Error;
use crate::problem::ValidatedProblem;

#[derive(Debug, Clone)]
pub struct FitResult {
    pub problem: ValidatedProblem,
    pub params: Vec<f64>,
    pub residuals: Vec<f64>,
    pub residual_norm: f64,
    pub initial_residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub status: String,
}

impl FitResult {
    /// `|recovered - truth|` per unknown.
    pub fn recovery_errors(&self, truth: &[f64]) -> Vec<f64> {
        self.params.iter().zip(truth).map(|(a, b)| (a - b).abs()).collect()
    }
}

/// A failed fit: the error and, when iterations ran, the best point found.
#[derive(Debug, Clone)]
pub struct FitFailure {
    pub error: Error,
    pub best: Option<Box<FitResult>>,
}

impl From<Error> for FitFailure {
    fn from(error: Error) -> Self {
        FitFailure { error, best: None }
    }
}

const FD_REL_STEP: f64 = 1e-6;
const MU_INIT: f64 = 1e-3;
const MU_MAX: f64 = 1e12;

fn norm(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Minimise the residual norm from `x0`, projecting onto the bounds.
pub fn fit(fs: &FitSpec, x0: &[f64]) -> Result<FitResult, FitFailure> {
    fs.validate()?;
    if !fs.in_bounds(x0) {
        return Err(Error::Domain("initial guess outside bounds".into()).into());
    }
    let (mut r, mut fwd) = evaluate(fs, x0, None);
    let Some(_) = fwd else {
        return Err(Error::ForwardSolve("forward solve failed at the initial guess".into()).into());
    };
    let mut x = x0.to_vec();
    let initial = norm(&r);
    let mut mu = MU_INIT;
    let mut status = String::from("maximum iterations reached");
    let mut converged = false;
    let mut iterations = 0;

    while iterations < fs.max_iter {
        iterations += 1;
        let jac = jacobian(fs, &x, fwd.as_ref());
        let j = DMatrix::from_fn(r.len(), x.len(), |i, k| jac[k][i]);
        let rv = DVector::from_column_slice(&r);
        let jtj = j.transpose() * &j;
        let grad = j.transpose() * rv;
        let floor = 1e-12 * jtj.diagonal().max().max(f64::MIN_POSITIVE);
        let current = norm(&r);
        let mut accepted = false;
        let mut step_norm = f64::INFINITY;
        while mu <= MU_MAX {
            let mut a = jtj.clone();
            for k in 0..x.len() {
                a[(k, k)] += mu * jtj[(k, k)].max(floor);
            }
            let Some(delta) = a.lu().solve(&(-&grad)) else {
                mu *= 4.0;
                continue;
            };
            let trial: Vec<f64> = x
                .iter()
                .zip(delta.iter())
                .zip(&fs.bounds)
                .map(|((&v, &d), &(lo, hi))| (v + d).clamp(lo, hi))
                .collect();
            step_norm = norm(&trial.iter().zip(&x).map(|(a, b)| a - b).collect::<Vec<_>>());
            if step_norm < fs.tol {
                break;
            }
            let (rt, ft) = evaluate(fs, &trial, None);
            if ft.is_some() && norm(&rt) < current {
                x = trial;
                r = rt;
                fwd = ft;
                mu = (mu / 3.0).max(1e-12);
                accepted = true;
                break;
            }
            mu *= 4.0;
        }
        if step_norm < fs.tol {
            converged = true;
            status = format!("step norm {step_norm:e} below tolerance");
            break;
        }
        if !accepted {
            status = "damping exhausted without reducing the residual".into();
            break;
        }
        if norm(&r) == 0.0 {
            converged = true;
            status = "zero residual".into();
            break;
        }
    }

    let residual_norm = norm(&r);
    let problem = fs.candidate(&x).map_err(FitFailure::from)?;
    let result = FitResult {
        problem,
        params: x,
        residuals: r,
        residual_norm,
        initial_residual_norm: initial,
        iterations,
        converged,
        status,
    };
    if converged {
        Ok(result)
    } else {
        Err(FitFailure {
            error: Error::Nonconvergence {
                iterations,
                residual_norm,
            },
            best: Some(Box::new(result)),
        })
    }
}

/// Columns of the residual Jacobian, one per unknown.
fn jacobian(fs: &FitSpec, x: &[f64], base: Option<&Forward>) -> Vec<Vec<f64>> {
    (0..x.len())
        .into_par_iter()
        .map(|k| {
            let (lo, hi) = fs.bounds[k];
            let h = FD_REL_STEP * x[k].abs().max(1.0);
            let up = (x[k] + h).min(hi);
            let down = (x[k] - h).max(lo);
            let at = |v: f64| {
                let mut y = x.to_vec();
                y[k] = v;
                evaluate(fs, &y, base).0
            };
            let (ru, rd) = (at(up), at(down));
            ru.iter().zip(&rd).map(|(a, b)| (a - b) / (up - down)).collect()
        })
        .collect()
}
