//! Boundary functionals and the extended inner product for
//! eigenparameter-dependent boundary conditions.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::problem::{LeftEnd, RightEnd, ValidatedProblem};
use crate::propagator::PiecewiseSolution;
use crate::spectrum::{weighted_norm_sq, SpectralData};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryFunctionals {
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    pub big_h1: f64,
    pub big_h2: f64,
    pub big_h3: f64,
    pub r1: f64,
    pub r2: f64,
}

impl BoundaryFunctionals {
    pub fn of(p: &ValidatedProblem) -> Result<Self> {
        match (p.left_end(), p.right_end()) {
            (LeftEnd::Eigen { h1, h2, h3 }, RightEnd::Eigen { big_h1, big_h2, big_h3 }) => Ok(BoundaryFunctionals {
                h1,
                h2,
                h3,
                big_h1,
                big_h2,
                big_h3,
                r1: h3 - h1 * h2,
                r2: big_h1 * big_h2 - big_h3,
            }),
            _ => Err(Error::Variant {
                expected: "eigenparameter",
            }),
        }
    }

    /// `y'(0) + h1 y(0)`.
    pub fn r_1(&self, y: &PiecewiseSolution<'_>) -> Result<Complex64> {
        let (v, vp) = y.eval(0.0)?;
        Ok(vp + self.h1 * v)
    }

    /// `h2 y'(0) + h3 y(0)`.
    pub fn r_1_prime(&self, y: &PiecewiseSolution<'_>) -> Result<Complex64> {
        let (v, vp) = y.eval(0.0)?;
        Ok(self.h2 * vp + self.h3 * v)
    }

    /// `y'(pi) + H1 y(pi)`.
    pub fn r_2(&self, y: &PiecewiseSolution<'_>) -> Result<Complex64> {
        let (v, vp) = y.eval_left(std::f64::consts::PI)?;
        Ok(vp + self.big_h1 * v)
    }

    /// `H2 y'(pi) + H3 y(pi)`.
    pub fn r_2_prime(&self, y: &PiecewiseSolution<'_>) -> Result<Complex64> {
        let (v, vp) = y.eval_left(std::f64::consts::PI)?;
        Ok(self.big_h2 * vp + self.big_h3 * v)
    }
}

/// Element `(f, f1, f2)` of `L_2((0, pi); w) + C^2`.
#[derive(Debug, Clone)]
pub struct VectorState<'p> {
    pub f: PiecewiseSolution<'p>,
    pub f1: Complex64,
    pub f2: Complex64,
}

impl<'p> VectorState<'p> {
    /// Lift a solution with `f1 = R_1(f)`, `f2 = R_2(f)`.
    pub fn lift(p: &ValidatedProblem, f: PiecewiseSolution<'p>) -> Result<Self> {
        let bf = BoundaryFunctionals::of(p)?;
        let f1 = bf.r_1(&f)?;
        let f2 = bf.r_2(&f)?;
        Ok(VectorState { f, f1, f2 })
    }
}

/// `int |f|^2 w + w(0)/r1 |f1|^2 + w(pi)/r2 |f2|^2`.
pub fn vector_norm_sq(p: &ValidatedProblem, vs: &VectorState<'_>) -> Result<f64> {
    let bf = BoundaryFunctionals::of(p)?;
    boundary_weighted(p, &bf, weighted_norm_sq(p, &vs.f)?, vs.f1, vs.f2)
}

fn boundary_weighted(p: &ValidatedProblem, bf: &BoundaryFunctionals, bulk: f64, f1: Complex64, f2: Complex64) -> Result<f64> {
    Ok(bulk + p.weights()[0] / bf.r1 * f1.norm_sqr() + p.weight_pi() / bf.r2 * f2.norm_sqr())
}

/// Partial sum of norming constants and its limit `1 / r1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaSum {
    pub partial: f64,
    pub target: f64,
}

pub fn gamma_sum_partial(p: &ValidatedProblem, sd: &SpectralData, count: usize) -> Result<GammaSum> {
    let bf = BoundaryFunctionals::of(p)?;
    if sd.variant != "eigenparameter" {
        return Err(Error::Variant {
            expected: "eigenparameter",
        });
    }
    if count > sd.len() {
        return Err(Error::Domain(format!("{count} exceeds {} records", sd.len())));
    }
    let mut partial = 0.0;
    for r in &sd.records[..count] {
        partial += r
            .gamma
            .ok_or_else(|| Error::Domain("norming constants have not been computed".into()))?;
    }
    Ok(GammaSum {
        partial,
        target: 1.0 / bf.r1,
    })
}
