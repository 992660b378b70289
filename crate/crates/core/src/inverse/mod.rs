//! Parameter recovery from spectral data by damped least squares over the
//! forward solver.

mod lm;
mod param;

pub use lm::{fit, FitFailure, FitResult};
pub use param::Param;

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{validate, BoundaryCondition, LeftEnd, Potential, ProblemSpec, ValidatedProblem};
use crate::spectrum::{eigenvalues_near, eigenvalues_with, norming_constant, SearchOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMode {
    /// Eigenvalues and norming constants.
    FullSpectral,
    /// Eigenvalues for the given problem and for Dirichlet data at `0`.
    TwoSpectra,
    /// One spectrum, with everything on `[0, pi/2)` known.
    HalfInverse,
}

/// Data to be matched, indexed from `n = 0`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Targets {
    pub lambdas: Vec<f64>,
    #[serde(default)]
    pub gammas: Option<Vec<f64>>,
    #[serde(default)]
    pub mus: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSpec {
    pub mode: FitMode,
    /// Known data; entries named in `unknowns` are overwritten by the fit.
    pub problem: ProblemSpec,
    pub unknowns: Vec<Param>,
    pub bounds: Vec<(f64, f64)>,
    pub targets: Targets,
    /// Weights for the eigenvalue block and the second block.
    #[serde(default = "default_weights")]
    pub weights: (f64, f64),
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_n_target")]
    pub n_target: usize,
    /// Allow `d[i]` among the unknowns (the landscape becomes multimodal).
    #[serde(default)]
    pub free_jump_positions: bool,
}

fn default_weights() -> (f64, f64) {
    (1.0, 1.0)
}
fn default_max_iter() -> usize {
    50
}
fn default_tol() -> f64 {
    1e-10
}
fn default_n_target() -> usize {
    30
}

impl FitSpec {
    pub fn new(mode: FitMode, problem: ProblemSpec, unknowns: Vec<Param>, bounds: Vec<(f64, f64)>, targets: Targets) -> Self {
        FitSpec {
            mode,
            problem,
            unknowns,
            bounds,
            targets,
            weights: default_weights(),
            max_iter: default_max_iter(),
            tol: default_tol(),
            n_target: default_n_target(),
            free_jump_positions: false,
        }
    }

    /// Check the mask against the mode's hypotheses and the bounds.
    pub fn validate(&self) -> Result<()> {
        let mask = |m: String| Err(Error::Mask(m));
        if self.unknowns.is_empty() {
            return mask("no unknowns".into());
        }
        if self.bounds.len() != self.unknowns.len() {
            return mask(format!("{} bounds for {} unknowns", self.bounds.len(), self.unknowns.len()));
        }
        for (i, u) in self.unknowns.iter().enumerate() {
            if self.unknowns[..i].contains(u) {
                return mask(format!("`{u}` listed twice"));
            }
            u.get(&self.problem)?;
            let (lo, hi) = self.bounds[i];
            if !(lo < hi) {
                return mask(format!("empty bounds for `{u}`"));
            }
            if let Param::Q { power, .. } = u {
                if *power > 6 {
                    return mask(format!("`{u}`: degree above 6"));
                }
            }
            if matches!(u, Param::JumpD(_)) && !self.free_jump_positions {
                return mask(format!("`{u}`: jump positions are known unless free_jump_positions is set"));
            }
        }
        let n = self.n_target;
        if n == 0 || self.targets.lambdas.len() < n {
            return mask(format!("need {n} target eigenvalues, have {}", self.targets.lambdas.len()));
        }
        match self.mode {
            FitMode::FullSpectral => {
                if self.targets.gammas.as_ref().is_none_or(|g| g.len() < n) {
                    return mask(format!("full_spectral mode needs {n} norming constants"));
                }
            }
            FitMode::TwoSpectra => {
                if self.targets.mus.as_ref().is_none_or(|m| m.len() < n) {
                    return mask(format!("two_spectra mode needs {n} secondary eigenvalues"));
                }
                if !matches!(self.problem.boundary, BoundaryCondition::Robin { .. }) {
                    return mask("two_spectra mode needs Robin conditions".into());
                }
            }
            FitMode::HalfInverse => self.validate_half()?,
        }
        self.validate_boundary_bounds()
    }

    fn validate_half(&self) -> Result<()> {
        let mask = |m: String| Err(Error::Mask(m));
        const EPS: f64 = 1e-12;
        for j in &self.problem.jumps {
            if (j.d - FRAC_PI_2).abs() < EPS {
                return mask("half_inverse mode excludes a jump at pi/2".into());
            }
        }
        let starts = piece_starts(&self.problem)?;
        for u in &self.unknowns {
            match *u {
                Param::LeftRobin | Param::LeftEigen(_) => {
                    return mask(format!("`{u}` is left-end data, known in half_inverse mode"));
                }
                Param::Q { piece, .. } => {
                    if starts[piece] < FRAC_PI_2 - EPS {
                        return mask(format!(
                            "`{u}`: piece starts at {} < pi/2; the potential must break at pi/2",
                            starts[piece]
                        ));
                    }
                }
                Param::JumpC(i) => {
                    if self.problem.jumps[i].d < FRAC_PI_2 {
                        return mask(format!("`{u}`: jump lies in the known half"));
                    }
                }
                Param::JumpD(_) => return mask(format!("`{u}`: jump positions are fixed in half_inverse mode")),
                Param::RightRobin | Param::RightEigen(_) => {}
            }
        }
        Ok(())
    }

    /// `r1, r2 > 0` over the whole bounds box.
    fn validate_boundary_bounds(&self) -> Result<()> {
        let BoundaryCondition::Eigenparameter { .. } = self.problem.boundary else {
            return Ok(());
        };
        let eigen: Vec<usize> = (0..self.unknowns.len())
            .filter(|&i| matches!(self.unknowns[i], Param::LeftEigen(_) | Param::RightEigen(_)))
            .collect();
        for corner in 0u32..1 << eigen.len() {
            let mut spec = self.problem.clone();
            for (bit, &i) in eigen.iter().enumerate() {
                let (lo, hi) = self.bounds[i];
                self.unknowns[i].set(&mut spec, if corner >> bit & 1 == 1 { hi } else { lo })?;
            }
            if let BoundaryCondition::Eigenparameter { h1, h2, h3, H1, H2, H3 } = spec.boundary {
                if !(h3 - h1 * h2 > 0.0 && H1 * H2 - H3 > 0.0) {
                    return Err(Error::Mask("bounds allow r1 <= 0 or r2 <= 0".into()));
                }
            }
        }
        Ok(())
    }

    /// Problem with the unknowns set to `x`.
    pub fn candidate(&self, x: &[f64]) -> Result<ValidatedProblem> {
        let mut spec = self.problem.clone();
        for (u, &v) in self.unknowns.iter().zip(x) {
            u.set(&mut spec, v)?;
        }
        validate(spec)
    }

    /// Current values of the unknowns in `problem`.
    pub fn initial_values(&self) -> Result<Vec<f64>> {
        self.unknowns.iter().map(|u| u.get(&self.problem)).collect()
    }

    pub fn residual_len(&self) -> usize {
        match self.mode {
            FitMode::HalfInverse => self.n_target,
            _ => 2 * self.n_target,
        }
    }

    pub fn in_bounds(&self, x: &[f64]) -> bool {
        x.len() == self.bounds.len() && x.iter().zip(&self.bounds).all(|(&v, &(lo, hi))| v >= lo && v <= hi)
    }
}

fn piece_starts(spec: &ProblemSpec) -> Result<Vec<f64>> {
    match &spec.potential {
        Potential::PiecewisePolynomial { coefficients, breaks } => {
            let mut s = vec![0.0];
            match breaks {
                Some(b) => s.extend(b),
                None if coefficients.len() > 1 => s.extend(spec.jumps.iter().map(|j| j.d)),
                None => {}
            }
            Ok(s)
        }
        _ => Ok(vec![0.0]),
    }
}

/// Forward data for one candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct Forward {
    pub lambdas: Vec<f64>,
    pub second: Vec<f64>,
}

/// Compute the quantities matched in `fs.mode`; `warm` seeds Newton from a
/// nearby candidate's data.
pub fn forward(fs: &FitSpec, p: &ValidatedProblem, warm: Option<&Forward>) -> Result<Forward> {
    let n = fs.n_target;
    let search = |q: &ValidatedProblem, guess: Option<&[f64]>| -> Result<Vec<f64>> {
        let sd = match guess {
            Some(g) => eigenvalues_near(q, g)?,
            None => eigenvalues_with(q, n, SearchOptions { verify: false, step: None })?,
        };
        Ok(sd.lambdas())
    };
    let lambdas = search(p, warm.map(|w| w.lambdas.as_slice()))?;
    let second = match fs.mode {
        FitMode::FullSpectral => {
            use rayon::prelude::*;
            lambdas
                .par_iter()
                .map(|&l| norming_constant(p, l).map(|g| g.0))
                .collect::<Result<Vec<f64>>>()?
        }
        FitMode::TwoSpectra => search(&p.with_left_end(LeftEnd::Dirichlet), warm.map(|w| w.second.as_slice()))?,
        FitMode::HalfInverse => Vec::new(),
    };
    Ok(Forward { lambdas, second })
}

/// Value substituted for every residual entry when the forward solve fails.
pub const FAILED_RESIDUAL: f64 = 1e3;

/// Scaled mismatches against the targets.
pub fn residual_vector(fs: &FitSpec, f: &Forward) -> Vec<f64> {
    let n = fs.n_target;
    let (w1, w2) = fs.weights;
    let mut r: Vec<f64> = (0..n)
        .map(|i| w1 * (f.lambdas[i] - fs.targets.lambdas[i]) / (1.0 + fs.targets.lambdas[i].abs()))
        .collect();
    match fs.mode {
        FitMode::FullSpectral => {
            let g = fs.targets.gammas.as_ref().expect("validated");
            r.extend((0..n).map(|i| w2 * (f.second[i] - g[i]) / g[i]));
        }
        FitMode::TwoSpectra => {
            let m = fs.targets.mus.as_ref().expect("validated");
            r.extend((0..n).map(|i| w2 * (f.second[i] - m[i]) / (1.0 + m[i].abs())));
        }
        FitMode::HalfInverse => {}
    }
    r
}

/// Residuals at `x`. A failed forward solve yields a large flagged vector.
pub fn residuals(fs: &FitSpec, x: &[f64]) -> Result<Vec<f64>> {
    if !fs.in_bounds(x) {
        return Err(Error::Domain("candidate outside bounds".into()));
    }
    Ok(evaluate(fs, x, None).0)
}

/// Residuals plus forward data (if the solve succeeded).
pub(crate) fn evaluate(fs: &FitSpec, x: &[f64], warm: Option<&Forward>) -> (Vec<f64>, Option<Forward>) {
    match fs.candidate(x).and_then(|p| forward(fs, &p, warm)) {
        Ok(f) => (residual_vector(fs, &f), Some(f)),
        Err(_) => (vec![FAILED_RESIDUAL; fs.residual_len()], None),
    }
}

/// Synthetic targets from a known problem.
pub fn synthetic_targets(p: &ValidatedProblem, mode: FitMode, n: usize) -> Result<Targets> {
    let fs = FitSpec {
        n_target: n,
        ..FitSpec::new(mode, p.spec().clone(), Vec::new(), Vec::new(), Targets::default())
    };
    let f = forward(&fs, p, None)?;
    Ok(Targets {
        lambdas: f.lambdas,
        gammas: (mode == FitMode::FullSpectral).then(|| f.second.clone()),
        mus: (mode == FitMode::TwoSpectra).then_some(f.second),
    })
}
