//! Solutions of `-y'' + q y = lambda y` with the transmission conditions.
//!
//! Integration uses the Magnus cells prepared by [`ValidatedProblem`]; every
//! cell map has unit determinant, so the modified Wronskian of two computed
//! solutions is constant to rounding error, across jumps included.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::magnus::{self, Cell};
use crate::problem::{JumpCondition, ValidatedProblem};

/// `lambda` together with its principal square root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub lambda: Complex64,
    pub rho: Complex64,
}

impl SpectralPoint {
    pub fn new(lambda: Complex64) -> Self {
        let rho = if lambda.im == 0.0 && lambda.re < 0.0 {
            Complex64::new(0.0, (-lambda.re).sqrt())
        } else {
            lambda.sqrt()
        };
        SpectralPoint { lambda, rho }
    }

    pub fn real(lambda: f64) -> Self {
        SpectralPoint::new(Complex64::new(lambda, 0.0))
    }

    /// `Im rho`
    pub fn tau(&self) -> f64 {
        self.rho.im
    }
}

/// Cauchy data `(y, y')` at a position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector {
    pub x: f64,
    pub y: Complex64,
    pub yp: Complex64,
}

impl StateVector {
    pub fn new(x: f64, y: Complex64, yp: Complex64) -> Self {
        StateVector { x, y, yp }
    }

    pub fn real(x: f64, y: f64, yp: f64) -> Self {
        StateVector::new(x, Complex64::new(y, 0.0), Complex64::new(yp, 0.0))
    }

    fn pair(&self) -> [Complex64; 2] {
        [self.y, self.yp]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolutionKind {
    /// Initial data at `0` from the left boundary condition.
    Phi,
    /// Initial data at `pi` from the right boundary condition.
    Psi,
    /// Initial data at `0` with `W(phi, chi) = 1`.
    Chi,
    /// Weyl solution `psi / Delta`.
    Theta,
}

/// Transmission map across one jump.
pub fn apply_jump(j: &JumpCondition, left: StateVector) -> StateVector {
    let [y, yp] = jump_forward(j, left.pair());
    StateVector::new(left.x, y, yp)
}

/// Solve the transmission conditions for the left state given the right one.
pub fn apply_jump_inverse(j: &JumpCondition, right: StateVector) -> StateVector {
    let [y, yp] = jump_backward(j, right.pair());
    StateVector::new(right.x, y, yp)
}

pub(crate) fn jump_forward(j: &JumpCondition, v: [Complex64; 2]) -> [Complex64; 2] {
    [v[0] * j.a, v[1] * j.b + v[0] * j.c]
}

pub(crate) fn jump_backward(j: &JumpCondition, v: [Complex64; 2]) -> [Complex64; 2] {
    let y = v[0] / j.a;
    [y, (v[1] - y * j.c) / j.b]
}

const INTERVAL_TOL: f64 = 1e-12;
const INTERVAL_MIN_STEP: f64 = 1e-6;

/// Integrate from `x_from` to `x_to` (either direction) inside one segment.
///
/// Step count doubles until two successive results agree to `1e-12`
/// relative; cells are split at potential breakpoints.
pub fn propagate_interval(
    p: &ValidatedProblem,
    sp: SpectralPoint,
    state: StateVector,
    x_from: f64,
    x_to: f64,
) -> Result<StateVector> {
    let (lo, hi) = if x_from <= x_to { (x_from, x_to) } else { (x_to, x_from) };
    p.locate(lo, false)?;
    p.locate(hi, false)?;
    if let Some(j) = p.jumps().iter().find(|j| j.d > lo && j.d < hi) {
        return Err(Error::Domain(format!(
            "interval [{lo}, {hi}] straddles the jump at {}",
            j.d
        )));
    }
    if (state.x - x_from).abs() > 1e-14 * x_from.abs().max(1.0) {
        return Err(Error::Domain(format!(
            "state given at {} but integration starts at {x_from}",
            state.x
        )));
    }
    let mut pts = vec![lo];
    pts.extend(p.q_breakpoints().into_iter().filter(|&b| b > lo && b < hi));
    pts.push(hi);

    let run = |n: usize| -> [Complex64; 2] {
        let mut m = magnus::identity();
        for w in pts.windows(2) {
            let (u, v) = (w[0], w[1]);
            let h = (v - u) / n as f64;
            for i in 0..n {
                let cell = Cell::new(u + h * i as f64, h, |x| p.q(x));
                m = magnus::mul(&cell.transfer(sp.lambda), &m);
            }
        }
        let m = if x_from <= x_to { m } else { magnus::inverse_unimodular(&m) };
        magnus::apply(&m, state.pair())
    };

    let longest = pts.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    if longest == 0.0 {
        return Ok(StateVector::new(x_to, state.y, state.yp));
    }
    let scale = sp.rho.norm().max(1.0);
    let mut n = (longest / 0.05).ceil().max(1.0) as usize;
    let mut coarse = run(n);
    loop {
        let fine = run(2 * n);
        let diff = ((coarse[0] - fine[0]).norm_sqr() + ((coarse[1] - fine[1]) / scale).norm_sqr()).sqrt();
        let size = (fine[0].norm_sqr() + (fine[1] / scale).norm_sqr()).sqrt();
        if diff <= INTERVAL_TOL * size.max(f64::MIN_POSITIVE) {
            return Ok(StateVector::new(x_to, fine[0], fine[1]));
        }
        n *= 2;
        if longest / (n as f64) < INTERVAL_MIN_STEP {
            return Err(Error::Tolerance(format!(
                "step control failed between {x_from} and {x_to} at lambda = {}",
                sp.lambda
            )));
        }
        coarse = fine;
    }
}

/// A solution branch evaluable at any `x` in `[0, pi]`.
///
/// Stores the state at the left end of every mesh cell; evaluation inside a
/// cell takes one partial Magnus step from the node on the side the
/// solution was shot from.
#[derive(Debug, Clone)]
pub struct PiecewiseSolution<'p> {
    problem: &'p ValidatedProblem,
    kind: SolutionKind,
    sp: SpectralPoint,
    nodes: Vec<[Complex64; 2]>,
    /// Left-limit state at the right end of each segment.
    seg_end: Vec<[Complex64; 2]>,
    /// Built by backward shooting from `pi`.
    from_right: bool,
}

impl<'p> PiecewiseSolution<'p> {
    pub fn kind(&self) -> SolutionKind {
        self.kind
    }

    pub fn spectral_point(&self) -> SpectralPoint {
        self.sp
    }

    pub fn problem(&self) -> &'p ValidatedProblem {
        self.problem
    }

    /// `(y, y')` at `x`; right limit at jump points.
    pub fn eval(&self, x: f64) -> Result<(Complex64, Complex64)> {
        let k = self.problem.locate(x, false)?;
        let seg = self.problem.segment_cells[k].clone();
        let cells = &self.problem.cells[seg.clone()];
        if x >= self.problem.segment_bounds()[k + 1] {
            let s = self.seg_end[k];
            return Ok((s[0], s[1]));
        }
        let i = cells.partition_point(|c| c.x0 <= x).max(1) - 1;
        if self.from_right {
            let right = if i + 1 < cells.len() { self.nodes[seg.start + i + 1] } else { self.seg_end[k] };
            let cell = &cells[i];
            let dx = cell.x0 + cell.h - x;
            if dx == 0.0 {
                return Ok((right[0], right[1]));
            }
            let part = Cell::new(x, dx, |t| self.problem.q(t));
            let [y, yp] = magnus::apply(&magnus::inverse_unimodular(&part.transfer(self.sp.lambda)), right);
            return Ok((y, yp));
        }
        Ok(self.step_from(seg.start + i, x))
    }

    /// `(y, y')` at `x` using left limits at jump points.
    pub fn eval_left(&self, x: f64) -> Result<(Complex64, Complex64)> {
        let k = self.problem.locate(x, true)?;
        if x > 0.0 && x == self.problem.segment_bounds()[k + 1] {
            let s = self.seg_end[k];
            return Ok((s[0], s[1]));
        }
        self.eval(x)
    }

    /// Value at `x` (right limit).
    pub fn value(&self, x: f64) -> Result<Complex64> {
        Ok(self.eval(x)?.0)
    }

    pub(crate) fn step_from(&self, cell_index: usize, x: f64) -> (Complex64, Complex64) {
        let node = self.nodes[cell_index];
        let x0 = self.problem.cells[cell_index].x0;
        let dx = x - x0;
        if dx == 0.0 {
            return (node[0], node[1]);
        }
        let cell = Cell::new(x0, dx, |t| self.problem.q(t));
        let [y, yp] = magnus::apply(&cell.transfer(self.sp.lambda), node);
        (y, yp)
    }

    /// Same solution multiplied by a constant (used to form the Weyl solution).
    pub fn scaled(&self, factor: Complex64, kind: SolutionKind) -> PiecewiseSolution<'p> {
        let scale = |v: &[Complex64; 2]| [v[0] * factor, v[1] * factor];
        PiecewiseSolution {
            problem: self.problem,
            kind,
            sp: self.sp,
            nodes: self.nodes.iter().map(scale).collect(),
            seg_end: self.seg_end.iter().map(scale).collect(),
            from_right: self.from_right,
        }
    }

    /// `self - factor * other`, both at the same spectral point.
    pub fn combine(&self, factor: Complex64, other: &PiecewiseSolution<'p>, kind: SolutionKind) -> Result<Self> {
        if self.sp != other.sp {
            return Err(Error::Mismatch(format!("{} vs {}", self.sp.lambda, other.sp.lambda)));
        }
        let lin = |a: &[Complex64; 2], b: &[Complex64; 2]| [a[0] - factor * b[0], a[1] - factor * b[1]];
        Ok(PiecewiseSolution {
            problem: self.problem,
            kind,
            sp: self.sp,
            nodes: self.nodes.iter().zip(&other.nodes).map(|(a, b)| lin(a, b)).collect(),
            seg_end: self.seg_end.iter().zip(&other.seg_end).map(|(a, b)| lin(a, b)).collect(),
            from_right: self.from_right,
        })
    }

    /// Left-limit values at the end of segment `k` (diagnostics and tests).
    pub fn segment_end(&self, k: usize) -> (Complex64, Complex64) {
        let s = self.seg_end[k];
        (s[0], s[1])
    }

    /// Right-limit values at the start of segment `k`.
    pub fn segment_start(&self, k: usize) -> (Complex64, Complex64) {
        let s = self.nodes[self.problem.segment_cells[k].start];
        (s[0], s[1])
    }
}

/// Build `phi`, `psi` or `chi` at the given spectral point.
pub fn fundamental_solution(
    p: &ValidatedProblem,
    kind: SolutionKind,
    sp: SpectralPoint,
) -> Result<PiecewiseSolution<'_>> {
    match kind {
        SolutionKind::Phi => Ok(forward(p, p.left_end().phi_data(sp.lambda).0, kind, sp)),
        SolutionKind::Chi => Ok(forward(p, p.left_end().chi_data(), kind, sp)),
        SolutionKind::Psi => Ok(backward(p, p.right_end().psi_data(sp.lambda).0, sp)),
        SolutionKind::Theta => Err(Error::Domain(
            "theta is built from psi and Delta; use weyl::weyl_theta".into(),
        )),
    }
}

fn forward<'p>(p: &'p ValidatedProblem, init: [Complex64; 2], kind: SolutionKind, sp: SpectralPoint) -> PiecewiseSolution<'p> {
    let mut nodes = Vec::with_capacity(p.cells.len());
    let mut seg_end = Vec::with_capacity(p.num_segments());
    let mut state = init;
    for (k, range) in p.segment_cells.iter().enumerate() {
        for cell in &p.cells[range.clone()] {
            nodes.push(state);
            state = magnus::apply(&cell.transfer(sp.lambda), state);
        }
        seg_end.push(state);
        if let Some(j) = p.jumps().get(k) {
            state = jump_forward(j, state);
        }
    }
    PiecewiseSolution {
        problem: p,
        kind,
        sp,
        nodes,
        seg_end,
        from_right: false,
    }
}

fn backward(p: &ValidatedProblem, init: [Complex64; 2], sp: SpectralPoint) -> PiecewiseSolution<'_> {
    let zero = [Complex64::new(0.0, 0.0); 2];
    let mut nodes = vec![zero; p.cells.len()];
    let mut seg_end = vec![zero; p.num_segments()];
    let mut state = init;
    for k in (0..p.num_segments()).rev() {
        seg_end[k] = state;
        for i in p.segment_cells[k].clone().rev() {
            let m = magnus::inverse_unimodular(&p.cells[i].transfer(sp.lambda));
            state = magnus::apply(&m, state);
            nodes[i] = state;
        }
        if k > 0 {
            state = jump_backward(&p.jumps()[k - 1], state);
        }
    }
    PiecewiseSolution {
        problem: p,
        kind: SolutionKind::Psi,
        sp,
        nodes,
        seg_end,
        from_right: true,
    }
}

/// `(phi(pi), phi'(pi))` without storing the solution.
pub(crate) fn shoot_phi(p: &ValidatedProblem, lambda: Complex64) -> [Complex64; 2] {
    let mut state = p.left_end().phi_data(lambda).0;
    for (k, range) in p.segment_cells.iter().enumerate() {
        for cell in &p.cells[range.clone()] {
            state = magnus::apply(&cell.transfer(lambda), state);
        }
        if let Some(j) = p.jumps().get(k) {
            state = jump_forward(j, state);
        }
    }
    state
}

/// `phi` at `pi` together with its lambda-derivative (variational system).
pub(crate) fn shoot_phi_with_derivative(p: &ValidatedProblem, lambda: Complex64) -> ([Complex64; 2], [Complex64; 2]) {
    let (mut y, mut dy) = p.left_end().phi_data(lambda);
    for (k, range) in p.segment_cells.iter().enumerate() {
        for cell in &p.cells[range.clone()] {
            let (m, dm) = cell.transfer_with_derivative(lambda);
            let a = magnus::apply(&m, dy);
            let b = magnus::apply(&dm, y);
            dy = [a[0] + b[0], a[1] + b[1]];
            y = magnus::apply(&m, y);
        }
        if let Some(j) = p.jumps().get(k) {
            y = jump_forward(j, y);
            dy = jump_forward(j, dy);
        }
    }
    (y, dy)
}

/// `(psi(0), psi'(0))` without storing the solution.
pub(crate) fn shoot_psi(p: &ValidatedProblem, lambda: Complex64) -> [Complex64; 2] {
    let mut state = p.right_end().psi_data(lambda).0;
    for k in (0..p.num_segments()).rev() {
        for i in p.segment_cells[k].clone().rev() {
            let m = magnus::inverse_unimodular(&p.cells[i].transfer(lambda));
            state = magnus::apply(&m, state);
        }
        if k > 0 {
            state = jump_backward(&p.jumps()[k - 1], state);
        }
    }
    state
}

/// `w(x) (u v' - u' v)` with right limits at jump points.
pub fn modified_wronskian(p: &ValidatedProblem, u: &PiecewiseSolution<'_>, v: &PiecewiseSolution<'_>, x: f64) -> Result<Complex64> {
    if u.sp != v.sp {
        return Err(Error::Mismatch(format!("{} vs {}", u.sp.lambda, v.sp.lambda)));
    }
    let (uy, uyp) = u.eval(x)?;
    let (vy, vyp) = v.eval(x)?;
    Ok((uy * vyp - uyp * vy) * p.weight_at(x)?)
}

/// Left-limit counterpart of [`modified_wronskian`].
pub fn modified_wronskian_left(p: &ValidatedProblem, u: &PiecewiseSolution<'_>, v: &PiecewiseSolution<'_>, x: f64) -> Result<Complex64> {
    if u.sp != v.sp {
        return Err(Error::Mismatch(format!("{} vs {}", u.sp.lambda, v.sp.lambda)));
    }
    let (uy, uyp) = u.eval_left(x)?;
    let (vy, vyp) = v.eval_left(x)?;
    Ok((uy * vyp - uyp * vy) * p.weight_at_left(x)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{validate, BoundaryCondition, Potential, ProblemSpec};
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn free_interval_closed_forms() {
        let p = validate(ProblemSpec::free()).unwrap();
        let s = propagate_interval(&p, SpectralPoint::real(1.0), StateVector::real(0.0, 1.0, 0.0), 0.0, PI / 2.0).unwrap();
        assert!((s.y - 0.0).norm() < 1e-10 && (s.yp + 1.0).norm() < 1e-10);

        let s = propagate_interval(&p, SpectralPoint::real(0.0), StateVector::real(0.0, 1.0, 0.0), 0.0, 2.3).unwrap();
        assert!((s.y - 1.0).norm() < 1e-14 && s.yp.norm() < 1e-14);

        let s = propagate_interval(&p, SpectralPoint::real(-1.0), StateVector::real(0.0, 1.0, 0.0), 0.0, 1.0).unwrap();
        assert!((s.y - 1f64.cosh()).norm() < 1e-10);
        assert!((s.yp - 1f64.sinh()).norm() < 1e-10);
        assert!((s.y - 1.5430806).norm() < 1e-7 && (s.yp - 1.1752012).norm() < 1e-7);
    }

    #[test]
    fn interval_backward_and_non_constant_potential() {
        let p = validate(ProblemSpec::new(
            Potential::PiecewisePolynomial {
                coefficients: vec![vec![0.5, -1.0, 0.3]],
                breaks: None,
            },
            BoundaryCondition::robin(0.0, 0.0),
            vec![],
        ))
        .unwrap();
        let sp = SpectralPoint::new(Complex64::new(7.0, 2.0));
        let start = StateVector::real(0.2, 1.0, -0.5);
        let fwd = propagate_interval(&p, sp, start, 0.2, 2.9).unwrap();
        let back = propagate_interval(&p, sp, fwd, 2.9, 0.2).unwrap();
        assert!((back.y - start.y).norm() < 1e-10 && (back.yp - start.yp).norm() < 1e-10);
    }

    #[test]
    fn interval_rejects_straddling_jump() {
        let p = validate(ProblemSpec::new(
            Potential::zero(),
            BoundaryCondition::robin(0.0, 0.0),
            vec![JumpCondition::new(1.0, 2.0, 1.0, 0.0)],
        ))
        .unwrap();
        let err = propagate_interval(&p, SpectralPoint::real(1.0), StateVector::real(0.5, 1.0, 0.0), 0.5, 1.5).unwrap_err();
        assert_eq!(err.name(), "DomainError");
        // ending exactly at the jump is fine
        assert!(propagate_interval(&p, SpectralPoint::real(1.0), StateVector::real(0.5, 1.0, 0.0), 0.5, 1.0).is_ok());
    }

    #[test]
    fn jump_examples() {
        let j = JumpCondition::new(1.0, 2.0, 3.0, 5.0);
        let s = apply_jump(&j, StateVector::real(1.0, 1.0, 0.0));
        assert_eq!((s.y, s.yp), (c(2.0), c(5.0)));
        let id = JumpCondition::new(1.0, 1.0, 1.0, 0.0);
        let s0 = StateVector::real(1.0, 0.3, -0.7);
        assert_eq!(apply_jump(&id, s0), s0);
        let s = apply_jump(&j, StateVector::real(1.0, 0.0, 1.0));
        assert_eq!((s.y, s.yp), (c(0.0), c(3.0)));
        let back = apply_jump_inverse(&j, apply_jump(&j, s0));
        assert!((back.y - s0.y).norm() < 1e-15 && (back.yp - s0.yp).norm() < 1e-15);
    }

    #[test]
    fn free_fundamental_solutions() {
        let p = validate(ProblemSpec::free()).unwrap();
        let mut seed = 0x2545F4914F6CDD1Du64;
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..20 {
            let x = PI * next();
            let lam = Complex64::new(-5.0 + 60.0 * next(), -3.0 + 6.0 * next());
            let sp = SpectralPoint::new(lam);
            let r = sp.rho;
            let phi = fundamental_solution(&p, SolutionKind::Phi, sp).unwrap();
            let psi = fundamental_solution(&p, SolutionKind::Psi, sp).unwrap();
            let chi = fundamental_solution(&p, SolutionKind::Chi, sp).unwrap();
            let scale = (r.im.abs() * PI).exp();
            assert!((phi.value(x).unwrap() - (r * x).cos()).norm() < 1e-10 * scale);
            assert!((psi.value(x).unwrap() - (r * (PI - x)).cos()).norm() < 1e-10 * scale);
            assert!((chi.value(x).unwrap() - (r * x).sin() / r).norm() < 1e-10 * scale);
        }
        let chi0 = fundamental_solution(&p, SolutionKind::Chi, SpectralPoint::real(0.0)).unwrap();
        assert!((chi0.value(1.7).unwrap() - 1.7).norm() < 1e-14);
    }

    #[test]
    fn wronskian_examples() {
        let p = validate(ProblemSpec::free()).unwrap();
        let sp = SpectralPoint::new(Complex64::new(2.5, 1.0));
        let phi = fundamental_solution(&p, SolutionKind::Phi, sp).unwrap();
        let chi = fundamental_solution(&p, SolutionKind::Chi, sp).unwrap();
        for x in [0.0, 0.4, 1.9, PI] {
            assert!((modified_wronskian(&p, &phi, &chi, x).unwrap() - 1.0).norm() < 1e-12);
            assert!(modified_wronskian(&p, &phi, &phi, x).unwrap().norm() < 1e-12);
        }
        let other = fundamental_solution(&p, SolutionKind::Chi, SpectralPoint::real(1.0)).unwrap();
        assert_eq!(modified_wronskian(&p, &phi, &other, 1.0).unwrap_err().name(), "MismatchError");
    }

    #[test]
    fn wronskian_constant_across_jump() {
        let p = validate(ProblemSpec::new(
            Potential::PiecewisePolynomial {
                coefficients: vec![vec![1.0, 0.5], vec![-0.3, 0.0, 0.2]],
                breaks: None,
            },
            BoundaryCondition::robin(1.0, -1.0),
            vec![JumpCondition::new(PI / 3.0, 2.0, 1.0, 1.0)],
        ))
        .unwrap();
        let sp = SpectralPoint::new(Complex64::new(4.2, -1.3));
        let phi = fundamental_solution(&p, SolutionKind::Phi, sp).unwrap();
        let psi = fundamental_solution(&p, SolutionKind::Psi, sp).unwrap();
        let d = PI / 3.0;
        let left = modified_wronskian_left(&p, &phi, &psi, d).unwrap();
        let right = modified_wronskian(&p, &phi, &psi, d).unwrap();
        assert!((left - right).norm() < 1e-9 * left.norm().max(1.0));
        // jump conditions hold for both solutions
        for s in [&phi, &psi] {
            let (yl, ypl) = s.eval_left(d).unwrap();
            let (yr, ypr) = s.eval(d).unwrap();
            assert!((yr - 2.0 * yl).norm() < 1e-10 * yr.norm().max(1.0));
            assert!((ypr - ypl - yl).norm() < 1e-10 * ypr.norm().max(1.0));
        }
    }

    #[test]
    fn principal_branch() {
        let sp = SpectralPoint::real(-4.0);
        assert_eq!(sp.rho, Complex64::new(0.0, 2.0));
        let sp = SpectralPoint::new(Complex64::new(-4.0, -0.0));
        assert_eq!(sp.rho, Complex64::new(0.0, 2.0));
        let sp = SpectralPoint::new(Complex64::new(3.0, -4.0));
        assert!(sp.rho.re >= 0.0 && (sp.rho * sp.rho - sp.lambda).norm() < 1e-14 * 5.0);
    }
}
