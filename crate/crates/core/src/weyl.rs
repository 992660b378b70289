//! Weyl function `m`, Weyl solution `theta` and the two-spectra product.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::ValidatedProblem;
use crate::propagator::{fundamental_solution, shoot_psi, PiecewiseSolution, SolutionKind, SpectralPoint};
use crate::spectrum::{char_delta_derivative, delta_scale, eigen_norm_sq, SpectralData};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylSample {
    pub lambda: Complex64,
    pub m: Complex64,
    pub delta: Complex64,
    /// `theta(0, lambda)`.
    pub theta0: Complex64,
    pub variant: String,
}

const POLE_REL: f64 = 1e-10;

/// `m(lambda) = W(chi, psi) / Delta` at `x = 0`.
///
/// This is `-psi(0) / Delta` for a Robin end and `-R_1(psi) / (r_1 Delta)`
/// for an eigenparameter end.
pub fn weyl_m(p: &ValidatedProblem, lambda: Complex64) -> Result<WeylSample> {
    let psi = shoot_psi(p, lambda);
    let (phi, _) = p.left_end().phi_data(lambda);
    let chi = p.left_end().chi_data();
    let delta = phi[0] * psi[1] - phi[1] * psi[0];
    check_pole(p, lambda, delta)?;
    let m = (chi[0] * psi[1] - chi[1] * psi[0]) / delta;
    Ok(WeylSample {
        lambda,
        m,
        delta,
        theta0: psi[0] / delta,
        variant: p.boundary().variant_name().to_string(),
    })
}

fn check_pole(p: &ValidatedProblem, lambda: Complex64, delta: Complex64) -> Result<()> {
    let scale = delta_scale(p, lambda);
    if delta.norm() > 1e-6 * scale {
        return Ok(());
    }
    // Distance to the nearest zero from one Newton step.
    let dist = (delta / char_delta_derivative(p, lambda)).norm();
    if delta == Complex64::new(0.0, 0.0) || dist < POLE_REL * lambda.norm().max(1.0) {
        return Err(Error::Pole {
            re: lambda.re,
            im: lambda.im,
        });
    }
    Ok(())
}

/// `theta` and `theta'` at one point, computed two ways.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaValue {
    /// `psi / Delta`.
    pub theta: Complex64,
    pub theta_prime: Complex64,
    /// Same pair from `chi - m phi`.
    pub alt: (Complex64, Complex64),
    /// Gap between the two, relative to their size.
    pub discrepancy: f64,
}

/// The Weyl solution `theta = psi / Delta` as a stored solution, with `m`.
pub fn weyl_solution(p: &ValidatedProblem, lambda: Complex64) -> Result<(PiecewiseSolution<'_>, WeylSample)> {
    let sample = weyl_m(p, lambda)?;
    let psi = fundamental_solution(p, SolutionKind::Psi, SpectralPoint::new(lambda))?;
    Ok((psi.scaled(1.0 / sample.delta, SolutionKind::Theta), sample))
}

pub fn weyl_theta(p: &ValidatedProblem, x: f64, lambda: Complex64) -> Result<ThetaValue> {
    let sp = SpectralPoint::new(lambda);
    let (theta, sample) = weyl_solution(p, lambda)?;
    let phi = fundamental_solution(p, SolutionKind::Phi, sp)?;
    let chi = fundamental_solution(p, SolutionKind::Chi, sp)?;
    let (t, tp) = theta.eval(x)?;
    let (f, fp) = phi.eval(x)?;
    let (c, cp) = chi.eval(x)?;
    let alt = (c - sample.m * f, cp - sample.m * fp);
    let size = t.norm().max(tp.norm()).max(f64::MIN_POSITIVE);
    let discrepancy = (t - alt.0).norm().max((tp - alt.1).norm()) / size;
    Ok(ThetaValue {
        theta: t,
        theta_prime: tp,
        alt,
        discrepancy,
    })
}

/// `Im m` and `Im lambda * ||theta||^2`, which coincide off the real axis.
pub fn energy_identity(p: &ValidatedProblem, lambda: Complex64) -> Result<(f64, f64)> {
    let (theta, sample) = weyl_solution(p, lambda)?;
    Ok((sample.m.im, lambda.im * eigen_norm_sq(p, &theta)?))
}

/// `sum_{n < N} gamma_n / (lambda_n - lambda)`.
pub fn partial_fraction_m(sd: &SpectralData, lambda: Complex64, truncation: usize) -> Result<Complex64> {
    if truncation > sd.len() {
        return Err(Error::Domain(format!("truncation {truncation} exceeds {} records", sd.len())));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for r in &sd.records[..truncation] {
        let gamma = r
            .gamma
            .ok_or_else(|| Error::Domain("norming constants have not been computed".into()))?;
        let gap = r.lambda - lambda;
        if gap.norm() < POLE_REL * r.lambda.abs().max(1.0) {
            return Err(Error::Pole {
                re: lambda.re,
                im: lambda.im,
            });
        }
        sum += gamma / gap;
    }
    Ok(sum)
}

/// Eigenvalues of the problem and of the problem with the condition at `0`
/// replaced (`k = None` stands for Dirichlet).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoSpectra {
    pub primary: Vec<f64>,
    pub secondary: Vec<f64>,
    pub k: Option<f64>,
}

impl TwoSpectra {
    pub fn new(primary: Vec<f64>, secondary: Vec<f64>, k: Option<f64>) -> Result<Self> {
        for (name, list) in [("primary", &primary), ("secondary", &secondary)] {
            if list.is_empty() {
                return Err(Error::Domain(format!("{name} spectrum is empty")));
            }
            if let Some(i) = list.windows(2).position(|w| !(w[1] > w[0])) {
                return Err(Error::Domain(format!("{name} spectrum not increasing at index {}", i + 1)));
            }
        }
        Ok(TwoSpectra { primary, secondary, k })
    }

    /// For Dirichlet secondary data: `lambda_n < mu_n < lambda_{n+1}`.
    pub fn check_interlacing(&self) -> Result<()> {
        let n = self.primary.len().min(self.secondary.len());
        for i in 0..n {
            if !(self.primary[i] < self.secondary[i]) {
                return Err(Error::Interlacing(i));
            }
            if i + 1 < self.primary.len() && !(self.secondary[i] < self.primary[i + 1]) {
                return Err(Error::Interlacing(i));
            }
        }
        Ok(())
    }
}

/// `m` from its zeros and poles, calibrated to `1 / sqrt(-lambda)` at
/// `lambda_cal = -(4N)^2`.
pub fn m_from_two_spectra(ts: &TwoSpectra, lambda: Complex64, truncation: usize) -> Result<Complex64> {
    let cal = -(4.0 * truncation as f64).powi(2);
    m_from_two_spectra_calibrated(ts, lambda, truncation, cal)
}

/// Number of model tail factors per retained factor.
const TAIL_FACTOR: usize = 200;

/// As [`m_from_two_spectra`] with an explicit (negative) calibration point.
///
/// Beyond the truncation both spectra are continued as `(n + sigma)^2`,
/// with `sigma` the mean offset of `sqrt(lambda_n) - n` over the upper half
/// of each list, and the infinite remainder is added to first order.
pub fn m_from_two_spectra_calibrated(
    ts: &TwoSpectra,
    lambda: Complex64,
    truncation: usize,
    lambda_cal: f64,
) -> Result<Complex64> {
    if ts.k.is_some() {
        return Err(Error::Calibration(
            "only a Dirichlet secondary spectrum is supported".into(),
        ));
    }
    ts.check_interlacing()?;
    if truncation == 0 || truncation > ts.primary.len() || truncation > ts.secondary.len() {
        return Err(Error::Calibration(format!(
            "truncation {truncation} outside available data ({}, {})",
            ts.primary.len(),
            ts.secondary.len()
        )));
    }
    if !(lambda_cal < 0.0) {
        return Err(Error::Calibration("calibration point must be negative".into()));
    }
    let lam = &ts.primary[..truncation];
    let mu = &ts.secondary[..truncation];
    let tail = TailModel {
        start: truncation,
        sigma_lambda: mean_offset(lam),
        sigma_mu: mean_offset(mu),
        end: truncation * TAIL_FACTOR,
    };
    let product = |z: Complex64| -> Result<Complex64> {
        let mut log = Complex64::new(0.0, 0.0);
        for (&l, &m) in lam.iter().zip(mu) {
            if (l - z).norm() < POLE_REL * l.abs().max(1.0) {
                return Err(Error::Pole { re: z.re, im: z.im });
            }
            log += ((m - z) / (l - z)).ln();
        }
        Ok((log + tail.log_factor(z)).exp())
    };
    let at_cal = product(Complex64::new(lambda_cal, 0.0))?;
    if !(at_cal.norm().is_finite() && at_cal.norm() > 0.0) {
        return Err(Error::Calibration(format!("product degenerate at {lambda_cal}")));
    }
    let constant = 1.0 / (-lambda_cal).sqrt() / at_cal;
    Ok(constant * product(lambda)?)
}

fn mean_offset(list: &[f64]) -> f64 {
    let half = list.len() / 2;
    let upper = &list[half..];
    let s: f64 = upper
        .iter()
        .enumerate()
        .map(|(i, &l)| l.max(0.0).sqrt() - (half + i) as f64)
        .sum();
    s / upper.len() as f64
}

struct TailModel {
    start: usize,
    end: usize,
    sigma_lambda: f64,
    sigma_mu: f64,
}

impl TailModel {
    /// `log prod_{n >= start} (1 - z / mu_n) / (1 - z / lambda_n)` for the model spectra.
    fn log_factor(&self, z: Complex64) -> Complex64 {
        let mut log = Complex64::new(0.0, 0.0);
        for n in self.start..self.end {
            let l = (n as f64 + self.sigma_lambda).powi(2);
            let m = (n as f64 + self.sigma_mu).powi(2);
            log += ((1.0 - z / m) / (1.0 - z / l)).ln();
        }
        // sum_{n >= end} z (1/lambda_n - 1/mu_n) ~ z (sigma_mu - sigma_lambda) / end^2
        log + z * (self.sigma_mu - self.sigma_lambda) / (self.end as f64).powi(2)
    }
}
