//! Characteristic function, eigenvalue search and norming constants.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::eigenvalue_guesses;
use crate::error::{Error, Result};
use crate::problem::{LeftEnd, RightEnd, ValidatedProblem};
use crate::propagator::{fundamental_solution, shoot_phi, shoot_phi_with_derivative, PiecewiseSolution, SolutionKind, SpectralPoint};
use crate::quadrature;

/// `Delta(lambda) = W(phi, psi)` evaluated at `pi`.
pub fn char_delta(p: &ValidatedProblem, lambda: Complex64) -> Complex64 {
    let y = shoot_phi(p, lambda);
    let (psi, _) = p.right_end().psi_data(lambda);
    p.weight_pi() * (y[0] * psi[1] - y[1] * psi[0])
}

/// `d Delta / d lambda` from the variational system.
pub fn char_delta_derivative(p: &ValidatedProblem, lambda: Complex64) -> Complex64 {
    delta_and_derivative(p, lambda).1
}

pub(crate) fn delta_and_derivative(p: &ValidatedProblem, lambda: Complex64) -> (Complex64, Complex64) {
    let (y, dy) = shoot_phi_with_derivative(p, lambda);
    let (psi, dpsi) = p.right_end().psi_data(lambda);
    let w = p.weight_pi();
    let d = w * (y[0] * psi[1] - y[1] * psi[0]);
    let dd = w * (dy[0] * psi[1] + y[0] * dpsi[1] - dy[1] * psi[0] - y[1] * dpsi[0]);
    (d, dd)
}

/// `Delta` computed three ways.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaCheck {
    /// From the forward solution at `pi`.
    pub delta: Complex64,
    /// From the backward solution at `0` (`L_1(psi)` in the Robin case).
    pub at_left: Complex64,
    /// `W(phi, psi)` at the midpoint of the first segment.
    pub interior: Complex64,
    /// Largest pairwise gap relative to `max(|Delta|, scale)`.
    pub discrepancy: f64,
}

pub fn char_delta_checked(p: &ValidatedProblem, lambda: Complex64) -> Result<DeltaCheck> {
    let sp = SpectralPoint::new(lambda);
    let delta = char_delta(p, lambda);
    let phi = fundamental_solution(p, SolutionKind::Phi, sp)?;
    let psi = fundamental_solution(p, SolutionKind::Psi, sp)?;
    let (u, up) = p.left_end().phi_data(lambda).0.into();
    let (v, vp) = psi.eval(0.0)?;
    let at_left = u * vp - up * v;
    let mid = 0.5 * p.segment_bounds()[1];
    let interior = crate::propagator::modified_wronskian(p, &phi, &psi, mid)?;
    let norm = delta.norm().max(delta_scale(p, lambda) * 1e-3);
    let discrepancy = [(delta - at_left).norm(), (delta - interior).norm(), (at_left - interior).norm()]
        .into_iter()
        .fold(0.0, f64::max)
        / norm;
    Ok(DeltaCheck {
        delta,
        at_left,
        interior,
        discrepancy,
    })
}

/// Typical size of `|Delta|` near `lambda`, used to normalise residuals.
pub fn delta_scale(p: &ValidatedProblem, lambda: Complex64) -> f64 {
    let rho = SpectralPoint::new(lambda).rho;
    let mut k = 1i32;
    match p.left_end() {
        LeftEnd::Eigen { .. } => k += 2,
        LeftEnd::Dirichlet => k -= 1,
        LeftEnd::Robin { .. } => {}
    }
    if let RightEnd::Eigen { .. } = p.right_end() {
        k += 2;
    }
    p.weight_pi() * rho.norm().max(1.0).powi(k) * (rho.im.abs() * std::f64::consts::PI).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certification {
    Bracketed,
    ContourVerified,
}

impl Certification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Certification::Bracketed => "bracketed",
            Certification::ContourVerified => "contour-verified",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenRecord {
    pub n: usize,
    pub lambda: f64,
    pub rho: Complex64,
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    pub certification: Certification,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub fingerprint: String,
    pub variant: String,
    pub records: Vec<EigenRecord>,
}

impl SpectralData {
    pub fn lambdas(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.lambda).collect()
    }

    /// Norming constants; `None` if [`spectral_data`] has not been applied.
    pub fn gammas(&self) -> Option<Vec<f64>> {
        self.records.iter().map(|r| r.gamma).collect()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Confirm completeness with a contour count.
    pub verify: bool,
    /// Override for the scan step in `rho`.
    pub step: Option<f64>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { verify: true, step: None }
    }
}

/// The `count` lowest eigenvalues, contour-verified.
pub fn eigenvalues(p: &ValidatedProblem, count: usize) -> Result<SpectralData> {
    eigenvalues_with(p, count, SearchOptions::default())
}

const MAX_STEP: f64 = 0.125;
const MIN_STEP: f64 = 1e-3;
const NEG_STEP: f64 = 0.25;
/// `e^{t pi}` stays far from overflow below this.
const MAX_T: f64 = 200.0;
const REFINES: usize = 2;

pub fn eigenvalues_with(p: &ValidatedProblem, count: usize, opts: SearchOptions) -> Result<SpectralData> {
    if count == 0 {
        return Err(Error::Domain("eigenvalue count must be at least 1".into()));
    }
    let mut factor = 1.0;
    let mut last = None;
    for _ in 0..=REFINES {
        let grid = match opts.step {
            Some(s) => RhoGrid::uniform(s * factor),
            None => RhoGrid::new(p, count + 1, factor),
        };
        let (roots, lowest) = scan(p, count + 1, &grid)?;
        let lambdas = refine_all(p, &roots)?;
        check_increasing(&lambdas)?;
        let mut cert = Certification::Bracketed;
        if opts.verify {
            let top = 0.5 * (lambdas[count - 1] + lambdas[count]);
            let rect = Rect::new(lowest - 1.0, top, -1.0, 1.0);
            let counted = count_zeros_contour(p, rect)?;
            if counted != count as i64 {
                last = Some(Error::MissedEigenvalue { found: count, counted });
                factor *= 0.25;
                continue;
            }
            cert = Certification::ContourVerified;
        }
        return Ok(assemble(p, &lambdas[..count], cert));
    }
    Err(last.expect("loop ran"))
}

/// Eigenvalues close to known approximations (for example those of a
/// slightly perturbed problem), by Newton iteration from each guess.
///
/// Falls back to [`eigenvalues_with`] without verification if the
/// iterates fail to converge, collide, or lose the alternating sign of
/// `Delta'` that consecutive simple zeros must have.
pub fn eigenvalues_near(p: &ValidatedProblem, guesses: &[f64]) -> Result<SpectralData> {
    let attempt: Option<Vec<(f64, f64)>> = guesses.par_iter().map(|&g| newton_from(p, g)).collect();
    if let Some(found) = attempt {
        let alternating = found.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1.signum() != w[0].1.signum());
        if alternating {
            let lambdas: Vec<f64> = found.iter().map(|r| r.0).collect();
            return Ok(assemble(p, &lambdas, Certification::Bracketed));
        }
    }
    eigenvalues_with(p, guesses.len(), SearchOptions { verify: false, step: None })
}

/// Newton from `x`; returns the root and `Delta'` there.
fn newton_from(p: &ValidatedProblem, mut x: f64) -> Option<(f64, f64)> {
    let start = x;
    for _ in 0..30 {
        let (d, dd) = delta_and_derivative(p, Complex64::new(x, 0.0));
        if d.re == 0.0 {
            return Some((x, dd.re));
        }
        let step = d.re / dd.re;
        if !step.is_finite() {
            return None;
        }
        x -= step;
        // A warm start should only move a little.
        if (x - start).abs() > 0.25 * start.abs().max(1.0).sqrt() {
            return None;
        }
        if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            let (_, dd) = delta_and_derivative(p, Complex64::new(x, 0.0));
            return Some((x, dd.re));
        }
    }
    None
}

fn assemble(p: &ValidatedProblem, lambdas: &[f64], cert: Certification) -> SpectralData {
    SpectralData {
        fingerprint: p.fingerprint(),
        variant: p.boundary().variant_name().to_string(),
        records: lambdas
            .iter()
            .enumerate()
            .map(|(n, &lambda)| EigenRecord {
                n,
                lambda,
                rho: SpectralPoint::real(lambda).rho,
                gamma: None,
                beta: None,
                certification: cert,
            })
            .collect(),
    }
}

fn check_increasing(lambdas: &[f64]) -> Result<()> {
    for (i, w) in lambdas.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::MissedEigenvalue {
                found: i + 1,
                counted: -1,
            });
        }
    }
    Ok(())
}

/// Scan grid in `rho >= 0`: a uniform base step, shortened to a quarter of
/// the local gap wherever two asymptotic zeros sit close together.
struct RhoGrid {
    base: f64,
    zones: Vec<(f64, f64, f64)>,
}

impl RhoGrid {
    fn new(p: &ValidatedProblem, want: usize, factor: f64) -> Self {
        let g = eigenvalue_guesses(p, 2 * want + 16);
        let zones = g
            .windows(2)
            .filter(|w| w[1] - w[0] < 4.0 * MAX_STEP)
            .map(|w| (w[0] - MAX_STEP, w[1] + MAX_STEP, (0.25 * factor * (w[1] - w[0])).max(MIN_STEP)))
            .collect();
        RhoGrid {
            base: MAX_STEP * factor,
            zones,
        }
    }

    fn uniform(step: f64) -> Self {
        RhoGrid {
            base: step,
            zones: Vec::new(),
        }
    }

    fn step_at(&self, r: f64) -> f64 {
        self.zones
            .iter()
            .filter(|z| r >= z.0 && r < z.1)
            .map(|z| z.2)
            .fold(self.base, f64::min)
    }
}

/// Lower bound (heuristic) for the spectrum; the search scans down to four times it.
pub fn scan_floor(p: &ValidatedProblem) -> f64 {
    let bounds = p.segment_bounds();
    let gap = bounds.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let jumps: f64 = p.jumps().iter().map(|j| j.c.abs() / (j.a * j.b).abs().sqrt()).sum::<f64>() / gap.min(1.0);
    let ends = match p.left_end() {
        LeftEnd::Robin { h } => h.abs(),
        LeftEnd::Dirichlet => 0.0,
        LeftEnd::Eigen { h1, h2, h3 } => h1.abs() + h2.abs() + h3.abs(),
    } + match p.right_end() {
        RightEnd::Robin { big_h } => big_h.abs(),
        RightEnd::Eigen { big_h1, big_h2, big_h3 } => big_h1.abs() + big_h2.abs() + big_h3.abs(),
    };
    let t = 1.0 + p.q_max_abs().sqrt() + jumps + ends;
    -(t * t)
}

/// Sign of `Delta` at a real point, normalised; exact zeros are kept.
fn signed(p: &ValidatedProblem, lambda: f64) -> f64 {
    let l = Complex64::new(lambda, 0.0);
    char_delta(p, l).re / delta_scale(p, l)
}

/// Scan the real axis upward from below the floor until `want` sign
/// changes are found. Returns the brackets and the lowest grid point.
fn scan(p: &ValidatedProblem, want: usize, grid_rho: &RhoGrid) -> Result<(Vec<(f64, f64)>, f64)> {
    let t_max = (2.0 * (-scan_floor(p)).sqrt()).min(MAX_T);
    let mut grid: Vec<f64> = Vec::new();
    let n_neg = (t_max / NEG_STEP).ceil() as usize;
    for i in (1..=n_neg).rev() {
        let t = t_max * i as f64 / n_neg as f64;
        grid.push(-t * t);
    }
    grid.push(0.0);
    let lowest = grid[0];
    let values: Vec<f64> = grid.par_iter().map(|&l| signed(p, l)).collect();

    let mut roots = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    let mut push = |x: f64, v: f64, roots: &mut Vec<(f64, f64)>| {
        if v == 0.0 {
            roots.push((x, x));
            prev = None;
            return;
        }
        if let Some((px, pv)) = prev {
            if pv.signum() != v.signum() {
                roots.push((px, x));
            }
        }
        prev = Some((x, v));
    };
    for (&x, &v) in grid.iter().zip(&values) {
        push(x, v, &mut roots);
    }
    let guesses = eigenvalue_guesses(p, want + 8);
    let rho_limit = guesses.last().copied().unwrap_or(0.0) * 2.0 + 20.0;
    const CHUNK: usize = 64;
    let mut r = 0.0;
    while roots.len() < want {
        let mut chunk = Vec::with_capacity(CHUNK);
        for _ in 0..CHUNK {
            r += grid_rho.step_at(r);
            chunk.push(r * r);
        }
        if r > rho_limit {
            return Err(Error::MissedEigenvalue {
                found: roots.len(),
                counted: want as i64,
            });
        }
        let vals: Vec<f64> = chunk.par_iter().map(|&l| signed(p, l)).collect();
        for (&x, &v) in chunk.iter().zip(&vals) {
            push(x, v, &mut roots);
        }
    }
    roots.truncate(want);
    Ok((roots, lowest))
}

fn refine_all(p: &ValidatedProblem, brackets: &[(f64, f64)]) -> Result<Vec<f64>> {
    brackets.par_iter().map(|&(a, b)| refine(p, a, b)).collect()
}

/// Safeguarded Newton on a sign-change bracket.
fn refine(p: &ValidatedProblem, mut lo: f64, mut hi: f64) -> Result<f64> {
    if lo == hi {
        return Ok(lo);
    }
    let flo = signed(p, lo);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (d, dd) = delta_and_derivative(p, Complex64::new(x, 0.0));
        let (f, df) = (d.re, dd.re);
        if f == 0.0 {
            return Ok(x);
        }
        if f.signum() == flo.signum() {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = x - f / df;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let tol = 4.0 * f64::EPSILON * x.abs().max(1.0);
        if (next - x).abs() <= tol || hi - lo <= tol {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::Tolerance(format!("eigenvalue refinement stalled in [{lo}, {hi}]")))
}

/// Axis-aligned rectangle in the lambda-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Rect {
            re_min,
            re_max,
            im_min,
            im_max,
        }
    }
}

const CONTOUR_RHO_STEP: f64 = 0.2;
const CONTOUR_MAX_DEPTH: u32 = 30;
const CONTOUR_MIN_REL: f64 = 1e-10;

/// Number of zeros of `Delta` inside `rect`, by tracking `arg Delta`.
pub fn count_zeros_contour(p: &ValidatedProblem, rect: Rect) -> Result<i64> {
    if !(rect.re_max > rect.re_min && rect.im_max > rect.im_min) {
        return Err(Error::Domain("degenerate rectangle".into()));
    }
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let (a, b, lo, hi) = (rect.re_min, rect.re_max, rect.im_min, rect.im_max);
    // Delta is real on the real axis, so a rectangle symmetric about it
    // only needs its upper half.
    let symmetric = lo == -hi;
    let total = if symmetric {
        let up = edge(p, c(b, 0.0), c(b, hi))?
            + edge(p, c(b, hi), c(a, hi))?
            + edge(p, c(a, hi), c(a, 0.0))?;
        2.0 * up
    } else {
        edge(p, c(a, lo), c(b, lo))?
            + edge(p, c(b, lo), c(b, hi))?
            + edge(p, c(b, hi), c(a, hi))?
            + edge(p, c(a, hi), c(a, lo))?
    };
    let winding = total / (2.0 * std::f64::consts::PI);
    let n = winding.round();
    if (winding - n).abs() > 1e-3 {
        return Err(Error::ContourTooClose { re: a, im: hi });
    }
    Ok(n as i64)
}

/// Change of `arg Delta` along a straight edge.
fn edge(p: &ValidatedProblem, from: Complex64, to: Complex64) -> Result<f64> {
    let params = edge_samples(from, to);
    let points: Vec<Complex64> = params.iter().map(|&s| from + (to - from) * s).collect();
    let values: Vec<Complex64> = points.par_iter().map(|&l| contour_value(p, l)).collect::<Result<_>>()?;
    let mut total = 0.0;
    for i in 0..params.len() - 1 {
        total += arg_change(p, from, to, (params[i], values[i]), (params[i + 1], values[i + 1]), 0)?;
    }
    Ok(total)
}

fn contour_value(p: &ValidatedProblem, l: Complex64) -> Result<Complex64> {
    let d = char_delta(p, l);
    let scale = delta_scale(p, l);
    if !(d.norm() > CONTOUR_MIN_REL * scale) {
        return Err(Error::ContourTooClose { re: l.re, im: l.im });
    }
    Ok(d / scale)
}

fn arg_change(
    p: &ValidatedProblem,
    from: Complex64,
    to: Complex64,
    (s0, v0): (f64, Complex64),
    (s1, v1): (f64, Complex64),
    depth: u32,
) -> Result<f64> {
    let da = (v1 / v0).arg();
    if da.abs() < std::f64::consts::FRAC_PI_4 {
        return Ok(da);
    }
    let sm = 0.5 * (s0 + s1);
    let lm = from + (to - from) * sm;
    if depth >= CONTOUR_MAX_DEPTH {
        return Err(Error::ContourTooClose { re: lm.re, im: lm.im });
    }
    let vm = contour_value(p, lm)?;
    Ok(arg_change(p, from, to, (s0, v0), (sm, vm), depth + 1)? + arg_change(p, from, to, (sm, vm), (s1, v1), depth + 1)?)
}

/// Edge parameters in `[0, 1]`, spaced roughly uniformly in `rho`.
fn edge_samples(from: Complex64, to: Complex64) -> Vec<f64> {
    let mut s = vec![0.0, 1.0];
    let base = 16;
    for i in 1..base {
        s.push(i as f64 / base as f64);
    }
    if from.im == to.im && from.re != to.re {
        let (a, b) = (from.re, to.re);
        let (lo, hi) = (a.min(b), a.max(b));
        let mut add = |x: f64| {
            if x > lo && x < hi {
                s.push((x - a) / (b - a));
            }
        };
        let mut r = CONTOUR_RHO_STEP;
        while r * r < hi.max(0.0) {
            add(r * r);
            r += CONTOUR_RHO_STEP;
        }
        let mut t = CONTOUR_RHO_STEP;
        while -(t * t) > lo.min(0.0) {
            add(-(t * t));
            t += CONTOUR_RHO_STEP;
        }
    }
    s.sort_by(f64::total_cmp);
    s.dedup();
    s
}

/// Fill `gamma` and `beta` for every record.
pub fn spectral_data(p: &ValidatedProblem, eigs: &SpectralData) -> Result<SpectralData> {
    let filled: Vec<EigenRecord> = eigs
        .records
        .par_iter()
        .map(|r| {
            let (gamma, beta) = norming_constant(p, r.lambda)?;
            Ok(EigenRecord {
                gamma: Some(gamma),
                beta: Some(beta),
                ..r.clone()
            })
        })
        .collect::<Result<_>>()?;
    Ok(SpectralData {
        records: filled,
        ..eigs.clone()
    })
}

/// Eigenvalues together with norming constants.
pub fn full_spectral_data(p: &ValidatedProblem, count: usize) -> Result<SpectralData> {
    spectral_data(p, &eigenvalues(p, count)?)
}

/// `(gamma_n, beta_n)` at an eigenvalue.
pub fn norming_constant(p: &ValidatedProblem, lambda: f64) -> Result<(f64, f64)> {
    let sp = SpectralPoint::real(lambda);
    let phi = fundamental_solution(p, SolutionKind::Phi, sp)?;
    let psi = fundamental_solution(p, SolutionKind::Psi, sp)?;
    let norm = eigen_norm_sq(p, &phi)?;
    let (u, up) = p.left_end().phi_data(sp.lambda).0.into();
    let (v, vp) = psi.eval(0.0)?;
    let beta = match p.left_end() {
        LeftEnd::Robin { .. } => v / u,
        LeftEnd::Dirichlet => vp / up,
        LeftEnd::Eigen { h1, h2, h3 } => (vp + h1 * v) / (h3 - h1 * h2),
    };
    Ok((1.0 / norm, beta.re))
}

pub(crate) const NORM_REL_TOL: f64 = 1e-10;

/// `int |y|^2 w` over `[0, pi]`.
pub fn weighted_norm_sq(p: &ValidatedProblem, y: &PiecewiseSolution<'_>) -> Result<f64> {
    let mut breaks = p.segment_bounds().to_vec();
    breaks.extend(p.q_breakpoints());
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let rho = y.spectral_point().rho.norm();
    let panel = (std::f64::consts::PI / (1.0 + rho)).min(0.5);
    let f = |x: f64| -> f64 {
        let v = y.value(x).expect("x inside [0, pi]");
        v.norm_sqr() * p.weight_at(x).expect("x inside [0, pi]")
    };
    quadrature::integrate(&f, &breaks, panel, NORM_REL_TOL)
}

/// Squared norm in the space the operator acts on: plain weighted `L_2` for
/// Robin ends, plus boundary components for eigenparameter ends.
pub fn eigen_norm_sq(p: &ValidatedProblem, y: &PiecewiseSolution<'_>) -> Result<f64> {
    let mut total = weighted_norm_sq(p, y)?;
    if let LeftEnd::Eigen { h1, h2, h3 } = p.left_end() {
        let (v, vp) = y.eval(0.0)?;
        total += p.weights()[0] / (h3 - h1 * h2) * (vp + h1 * v).norm_sqr();
    }
    if let RightEnd::Eigen { big_h1, big_h2, big_h3 } = p.right_end() {
        let (v, vp) = y.eval_left(std::f64::consts::PI)?;
        total += p.weight_pi() / (big_h1 * big_h2 - big_h3) * (vp + big_h1 * v).norm_sqr();
    }
    Ok(total)
}
