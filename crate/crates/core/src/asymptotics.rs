//! Leading-order high-energy behaviour of `phi`, `phi'` and `Delta`.
//!
//! Each jump splits an incoming wave `cos rho (x + s)` into a transmitted
//! part `alpha cos rho (x + s)` and a reflected part
//! `alpha' cos rho (x - 2d - s)`. Unrolling this over the jumps to the left
//! of `x` gives one term per subset `S` of those jumps: the coefficient is
//! the product of `alpha'_i` over `S` and `alpha_i` elsewhere, and the phase
//! alternates in sign, ending with `-2 d_max(S)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::problem::{LeftEnd, RightEnd, ValidatedProblem};

/// One term `coefficient * cos rho (x + phase)` of the leading expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionTerm {
    /// 1-based indices of the jumps taken with `alpha'`, ascending.
    pub subset: Vec<usize>,
    pub coefficient: f64,
    pub phase: f64,
}

/// Terms for a point lying to the right of the first `jumps_left` jumps.
///
/// Ordered by the subset read as a bitmask (bit `i - 1` for jump `i`).
pub fn reflection_terms(p: &ValidatedProblem, jumps_left: usize) -> Result<Vec<ReflectionTerm>> {
    if jumps_left >= p.num_segments() {
        return Err(Error::Domain(format!(
            "segment {jumps_left} does not exist ({} segments)",
            p.num_segments()
        )));
    }
    let jumps = &p.jumps()[..jumps_left];
    let alphas = &p.alphas()[..jumps_left];
    let primes = &p.alpha_primes()[..jumps_left];
    let terms = (0u64..1 << jumps_left)
        .map(|mask| {
            let subset: Vec<usize> = (0..jumps_left).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
            let coefficient = (0..jumps_left)
                .map(|i| if mask >> i & 1 == 1 { primes[i] } else { alphas[i] })
                .product();
            let phase = subset.iter().fold(0.0, |acc, &i| -2.0 * jumps[i - 1].d - acc);
            ReflectionTerm {
                subset,
                coefficient,
                phase,
            }
        })
        .collect();
    Ok(terms)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymptoticTarget {
    Phi,
    PhiPrime,
    Delta,
}

/// Leading-order value of `phi(x)`, `phi'(x)` or `Delta` (where `x` is ignored).
pub fn asymptotic_eval(p: &ValidatedProblem, target: AsymptoticTarget, x: f64, rho: Complex64) -> Result<Complex64> {
    if rho == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("rho = 0".into()));
    }
    let left_eigen = matches!(p.left_end(), LeftEnd::Eigen { .. });
    let right_eigen = matches!(p.right_end(), RightEnd::Eigen { .. });
    let lead = if left_eigen { rho * rho } else { Complex64::new(1.0, 0.0) };
    match target {
        AsymptoticTarget::Phi | AsymptoticTarget::PhiPrime => {
            if p.jumps().iter().any(|j| j.d == x) {
                return Err(Error::Domain(format!("x = {x} is a jump point")));
            }
            let k = p.segment_of(x)?;
            let terms = reflection_terms(p, k)?;
            if target == AsymptoticTarget::Phi {
                Ok(lead * cos_sum(&terms, x, rho))
            } else {
                Ok(-lead * rho * sin_sum(&terms, x, rho))
            }
        }
        AsymptoticTarget::Delta => {
            let terms = reflection_terms(p, p.num_segments() - 1)?;
            let s = sin_sum(&terms, std::f64::consts::PI, rho) * p.weight_pi();
            // Delta = W(phi, psi); the eigenparameter condition at pi
            // contributes -rho^2 psi(pi) ~ rho^2, flipping the sign.
            let right = if right_eigen { -rho * rho } else { Complex64::new(1.0, 0.0) };
            Ok(lead * right * rho * s)
        }
    }
}

fn cos_sum(terms: &[ReflectionTerm], x: f64, rho: Complex64) -> Complex64 {
    terms.iter().map(|t| t.coefficient * (rho * (x + t.phase)).cos()).sum()
}

fn sin_sum(terms: &[ReflectionTerm], x: f64, rho: Complex64) -> Complex64 {
    terms.iter().map(|t| t.coefficient * (rho * (x + t.phase)).sin()).sum()
}

/// Leading sine sum of `Delta` with all `rho` powers divided out.
pub fn delta_sine_sum(p: &ValidatedProblem, rho: f64) -> f64 {
    let terms = reflection_terms(p, p.num_segments() - 1).expect("last segment exists");
    terms
        .iter()
        .map(|t| t.coefficient * (rho * (std::f64::consts::PI + t.phase)).sin())
        .sum()
}

const GUESS_STEP: f64 = 0.05;

/// First `count` nonnegative real zeros of the leading sine sum of `Delta`.
pub fn eigenvalue_guesses(p: &ValidatedProblem, count: usize) -> Vec<f64> {
    let terms = reflection_terms(p, p.num_segments() - 1).expect("last segment exists");
    let f = |r: f64| -> f64 {
        terms
            .iter()
            .map(|t| t.coefficient * (r * (std::f64::consts::PI + t.phase)).sin())
            .sum()
    };
    let mut zeros = vec![0.0];
    let mut a = 0.0;
    // f vanishes at 0; start the sign scan just to the right of it.
    let mut fa = f(1e-9).signum();
    let mut i = 1usize;
    while zeros.len() < count {
        let b = GUESS_STEP * i as f64;
        let fb = f(b);
        if fb == 0.0 {
            zeros.push(b);
            fa = f(b + 1e-9).signum();
        } else if fb.signum() != fa {
            zeros.push(bisect(&f, a, b));
            fa = fb.signum();
        }
        a = b;
        i += 1;
        if i > 10_000_000 {
            break;
        }
    }
    zeros.truncate(count);
    zeros
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{validate, BoundaryCondition, JumpCondition, Potential, ProblemSpec};
    use std::f64::consts::PI;

    fn jumps(list: &[(f64, f64, f64)]) -> ValidatedProblem {
        validate(ProblemSpec::new(
            Potential::zero(),
            BoundaryCondition::robin(0.0, 0.0),
            list.iter().map(|&(d, a, b)| JumpCondition::new(d, a, b, 0.0)).collect(),
        ))
        .unwrap()
    }

    #[test]
    fn one_jump_terms() {
        let p = jumps(&[(1.0, 2.0, 1.0)]);
        let t = reflection_terms(&p, 1).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!((t[0].coefficient, t[0].phase), (1.5, 0.0));
        assert_eq!(t[1].subset, vec![1]);
        assert_eq!((t[1].coefficient, t[1].phase), (0.5, -2.0));
    }

    #[test]
    fn two_and_three_jump_phases() {
        let p = jumps(&[(0.5, 2.0, 1.0), (1.2, 3.0, 1.0), (2.0, 1.0, 2.0)]);
        let t = reflection_terms(&p, 2).unwrap();
        let both = t.iter().find(|t| t.subset == vec![1, 2]).unwrap();
        assert!((both.coefficient - 0.5 * 1.0).abs() < 1e-15);
        assert!((both.phase - (2.0 * 0.5 - 2.0 * 1.2)).abs() < 1e-15);
        let t = reflection_terms(&p, 3).unwrap();
        assert_eq!(t.len(), 8);
        let all = &t[7];
        assert_eq!(all.subset, vec![1, 2, 3]);
        assert!((all.phase - (-2.0 * 0.5 + 2.0 * 1.2 - 2.0 * 2.0)).abs() < 1e-15);
    }

    #[test]
    fn coefficients_sum_to_product_of_a() {
        let p = jumps(&[(0.5, 2.0, 1.0), (1.2, 3.0, 0.5), (2.0, 0.7, 2.0)]);
        let t = reflection_terms(&p, 3).unwrap();
        let s: f64 = t.iter().map(|t| t.coefficient).sum();
        assert!((s - 2.0 * 3.0 * 0.7).abs() < 1e-12);
    }

    #[test]
    fn closed_form_jump_delta() {
        let p = jumps(&[(PI / 2.0, 2.0, 0.5)]);
        for r in [0.3, 2.7, 11.1] {
            let rho = Complex64::new(r, 0.0);
            let d = asymptotic_eval(&p, AsymptoticTarget::Delta, PI, rho).unwrap();
            assert!((d - 1.25 * rho * (rho * PI).sin()).norm() < 1e-13);
        }
        let g = eigenvalue_guesses(&p, 10);
        for (n, r) in g.iter().enumerate() {
            assert!((r - n as f64).abs() < 1e-12, "{n}: {r}");
        }
    }

    #[test]
    fn free_problem_is_single_cosine() {
        let p = validate(ProblemSpec::free()).unwrap();
        let rho = Complex64::new(7.3, 0.2);
        let v = asymptotic_eval(&p, AsymptoticTarget::Phi, 1.1, rho).unwrap();
        assert!((v - (rho * 1.1).cos()).norm() < 1e-15);
        assert_eq!(
            asymptotic_eval(&p, AsymptoticTarget::Phi, 1.1, Complex64::new(0.0, 0.0))
                .unwrap_err()
                .name(),
            "DomainError"
        );
    }

    #[test]
    fn rejects_jump_point() {
        let p = jumps(&[(1.0, 2.0, 1.0)]);
        let err = asymptotic_eval(&p, AsymptoticTarget::Phi, 1.0, Complex64::new(5.0, 0.0)).unwrap_err();
        assert_eq!(err.name(), "DomainError");
    }
}
