//! Problem instances: potential, boundary data, transmission conditions.
//!
//! A [`ProblemSpec`] is the user-facing description (it is also the JSON
//! config schema). [`validate`] turns it into an immutable
//! [`ValidatedProblem`] carrying the derived weight, reflection
//! coefficients and the integration mesh shared by every solve.

use std::f64::consts::PI;
use std::ops::Range;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::magnus::{self, Cell, Mat2};

/// Maximum polynomial degree accepted per potential piece.
pub const MAX_POLY_DEGREE: usize = 6;

/// Transmission condition `y(d+) = a y(d-)`, `y'(d+) = b y'(d-) + c y(d-)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpCondition {
    pub d: f64,
    pub a: f64,
    pub b: f64,
    #[serde(default)]
    pub c: f64,
}

impl JumpCondition {
    pub fn new(d: f64, a: f64, b: f64, c: f64) -> Self {
        JumpCondition { d, a, b, c }
    }

    /// `(a + b) / 2`
    pub fn alpha(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// `(a - b) / 2`
    pub fn alpha_prime(&self) -> f64 {
        0.5 * (self.a - self.b)
    }
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BoundaryCondition {
    /// `y'(0) + h y(0) = 0`, `y'(pi) + H y(pi) = 0`.
    Robin {
        h: f64,
        #[serde(rename = "H")]
        H: f64,
    },
    /// `lambda (y'(0) + h1 y(0)) - h2 y'(0) - h3 y(0) = 0` and the analogous
    /// condition at `pi` with `H1, H2, H3`.
    Eigenparameter {
        h1: f64,
        h2: f64,
        h3: f64,
        #[serde(rename = "H1")]
        H1: f64,
        #[serde(rename = "H2")]
        H2: f64,
        #[serde(rename = "H3")]
        H3: f64,
    },
}

impl BoundaryCondition {
    pub fn robin(h: f64, big_h: f64) -> Self {
        BoundaryCondition::Robin { h, H: big_h }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            BoundaryCondition::Robin { .. } => "robin",
            BoundaryCondition::Eigenparameter { .. } => "eigenparameter",
        }
    }
}

/// Real potential `q` on `[0, pi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Potential {
    /// One coefficient list per piece, in powers of `(x - piece_start)`.
    ///
    /// Pieces are delimited by `breaks` when given. Otherwise a single list
    /// covers all of `[0, pi]`, and `m` lists (for `m - 1` jumps) follow the
    /// jump points.
    PiecewisePolynomial {
        coefficients: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        breaks: Option<Vec<f64>>,
    },
    /// Samples interpolated with order 0 (piecewise constant), 1 (linear) or
    /// 3 (natural cubic spline); constant extrapolation outside the samples.
    SampledGrid {
        abscissae: Vec<f64>,
        values: Vec<f64>,
        order: u8,
    },
}

impl Potential {
    pub fn zero() -> Self {
        Potential::constant(0.0)
    }

    pub fn constant(v: f64) -> Self {
        Potential::PiecewisePolynomial {
            coefficients: vec![vec![v]],
            breaks: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub potential: Potential,
    pub boundary: BoundaryCondition,
    #[serde(default)]
    pub jumps: Vec<JumpCondition>,
}

impl ProblemSpec {
    pub fn new(potential: Potential, boundary: BoundaryCondition, jumps: Vec<JumpCondition>) -> Self {
        ProblemSpec {
            potential,
            boundary,
            jumps,
        }
    }

    /// `q = 0`, Neumann at both ends, no jumps.
    pub fn free() -> Self {
        ProblemSpec::new(Potential::zero(), BoundaryCondition::robin(0.0, 0.0), Vec::new())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem spec serializes")
    }
}

/// Condition imposed at `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LeftEnd {
    Robin { h: f64 },
    Dirichlet,
    Eigen { h1: f64, h2: f64, h3: f64 },
}

/// Condition imposed at `x = pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RightEnd {
    Robin { big_h: f64 },
    Eigen { big_h1: f64, big_h2: f64, big_h3: f64 },
}

impl LeftEnd {
    /// Cauchy data of the solution `phi` at `0`, and its lambda-derivative.
    pub(crate) fn phi_data(&self, lambda: Complex64) -> ([Complex64; 2], [Complex64; 2]) {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        match *self {
            LeftEnd::Robin { h } => ([one, Complex64::new(-h, 0.0)], [zero, zero]),
            LeftEnd::Dirichlet => ([zero, one], [zero, zero]),
            LeftEnd::Eigen { h1, h2, h3 } => (
                [lambda - h2, h3 - lambda * h1],
                [one, Complex64::new(-h1, 0.0)],
            ),
        }
    }

    /// Cauchy data of `chi`, normalised so that `W(phi, chi) = 1`.
    pub(crate) fn chi_data(&self) -> [Complex64; 2] {
        match *self {
            LeftEnd::Robin { .. } => [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            LeftEnd::Dirichlet => [Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0)],
            LeftEnd::Eigen { h1, h2, h3 } => {
                let r1 = h3 - h1 * h2;
                [Complex64::new(-1.0 / r1, 0.0), Complex64::new(h1 / r1, 0.0)]
            }
        }
    }
}

impl RightEnd {
    /// Cauchy data of `psi` at `pi`, and its lambda-derivative.
    pub(crate) fn psi_data(&self, lambda: Complex64) -> ([Complex64; 2], [Complex64; 2]) {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        match *self {
            RightEnd::Robin { big_h } => ([one, Complex64::new(-big_h, 0.0)], [zero, zero]),
            RightEnd::Eigen {
                big_h1,
                big_h2,
                big_h3,
            } => (
                [big_h2 - lambda, lambda * big_h1 - big_h3],
                [-one, Complex64::new(big_h1, 0.0)],
            ),
        }
    }
}

/// Potential resolved into an evaluable form.
#[derive(Debug, Clone, PartialEq)]
enum QRep {
    Poly {
        starts: Vec<f64>,
        coeffs: Vec<Vec<f64>>,
    },
    Grid {
        x: Vec<f64>,
        y: Vec<f64>,
        order: u8,
        /// Second derivatives of the natural spline (order 3 only).
        m2: Vec<f64>,
    },
}

impl QRep {
    fn resolve(p: &Potential, jumps: &[JumpCondition]) -> Result<QRep> {
        match p {
            Potential::PiecewisePolynomial {
                coefficients,
                breaks,
            } => {
                if coefficients.is_empty() {
                    return Err(Error::Potential("no polynomial pieces".into()));
                }
                for (i, c) in coefficients.iter().enumerate() {
                    if c.len() > MAX_POLY_DEGREE + 1 {
                        return Err(Error::Potential(format!(
                            "piece {i} has degree {} > {MAX_POLY_DEGREE}",
                            c.len() - 1
                        )));
                    }
                    if c.iter().any(|v| !v.is_finite()) {
                        return Err(Error::Potential(format!("piece {i} has a non-finite coefficient")));
                    }
                }
                let interior: Vec<f64> = match breaks {
                    Some(b) => b.clone(),
                    None if coefficients.len() == 1 => Vec::new(),
                    None if coefficients.len() == jumps.len() + 1 => jumps.iter().map(|j| j.d).collect(),
                    None => {
                        return Err(Error::Potential(format!(
                            "{} pieces given without breaks for {} jumps",
                            coefficients.len(),
                            jumps.len()
                        )))
                    }
                };
                if interior.len() + 1 != coefficients.len() {
                    return Err(Error::Potential(format!(
                        "{} breaks need {} pieces, got {}",
                        interior.len(),
                        interior.len() + 1,
                        coefficients.len()
                    )));
                }
                let mut prev = 0.0;
                for &b in &interior {
                    if !(b.is_finite() && b > prev && b < PI) {
                        return Err(Error::Potential(format!("break {b} not strictly increasing in (0, pi)")));
                    }
                    prev = b;
                }
                let mut starts = vec![0.0];
                starts.extend(interior);
                Ok(QRep::Poly {
                    starts,
                    coeffs: coefficients.clone(),
                })
            }
            Potential::SampledGrid {
                abscissae,
                values,
                order,
            } => {
                if abscissae.len() != values.len() || abscissae.len() < 2 {
                    return Err(Error::Potential(
                        "sampled grid needs at least two abscissa/value pairs of equal length".into(),
                    ));
                }
                if !matches!(order, 0 | 1 | 3) {
                    return Err(Error::Potential(format!("interpolation order {order} not in {{0, 1, 3}}")));
                }
                if abscissae.iter().chain(values).any(|v| !v.is_finite()) {
                    return Err(Error::Potential("non-finite sample".into()));
                }
                if abscissae.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::Potential("abscissae must be strictly increasing".into()));
                }
                let m2 = if *order == 3 {
                    natural_spline_second_derivatives(abscissae, values)
                } else {
                    Vec::new()
                };
                Ok(QRep::Grid {
                    x: abscissae.clone(),
                    y: values.clone(),
                    order: *order,
                    m2,
                })
            }
        }
    }

    fn eval(&self, x: f64, left_limit: bool) -> f64 {
        match self {
            QRep::Poly { starts, coeffs } => {
                let idx = if left_limit {
                    starts.partition_point(|&s| s < x)
                } else {
                    starts.partition_point(|&s| s <= x)
                }
                .max(1)
                    - 1;
                let t = x - starts[idx];
                coeffs[idx].iter().rev().fold(0.0, |acc, &c| acc * t + c)
            }
            QRep::Grid { x: xs, y, order, m2 } => {
                let n = xs.len();
                if x <= xs[0] {
                    return y[0];
                }
                if x >= xs[n - 1] {
                    return y[n - 1];
                }
                let i = if left_limit {
                    xs.partition_point(|&s| s < x)
                } else {
                    xs.partition_point(|&s| s <= x)
                }
                .clamp(1, n - 1)
                    - 1;
                match order {
                    0 => y[i],
                    1 => {
                        let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
                        y[i] + t * (y[i + 1] - y[i])
                    }
                    _ => {
                        let h = xs[i + 1] - xs[i];
                        let a = (xs[i + 1] - x) / h;
                        let b = (x - xs[i]) / h;
                        a * y[i]
                            + b * y[i + 1]
                            + ((a * a * a - a) * m2[i] + (b * b * b - b) * m2[i + 1]) * h * h / 6.0
                    }
                }
            }
        }
    }

    /// Points in `(0, pi)` where `q` may lose smoothness.
    fn breakpoints(&self) -> Vec<f64> {
        match self {
            QRep::Poly { starts, .. } => starts[1..].to_vec(),
            QRep::Grid { x, .. } => x.iter().copied().filter(|&v| v > 0.0 && v < PI).collect(),
        }
    }

    /// True if `q` is constant on `(u, v)`, which lies between breakpoints.
    fn constant_between(&self, u: f64, v: f64) -> bool {
        let mid = 0.5 * (u + v);
        match self {
            QRep::Poly { starts, coeffs } => {
                let idx = starts.partition_point(|&s| s <= mid).max(1) - 1;
                coeffs[idx].iter().skip(1).all(|&c| c == 0.0)
            }
            QRep::Grid { x, order, .. } => *order == 0 || mid <= x[0] || mid >= x[x.len() - 1],
        }
    }

    fn max_abs(&self) -> f64 {
        let mut m: f64 = 0.0;
        for k in 0..=400 {
            let x = PI * k as f64 / 400.0;
            m = m.max(self.eval(x, false).abs()).max(self.eval(x, true).abs());
        }
        m
    }
}

fn natural_spline_second_derivatives(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    // Thomas algorithm on the interior equations.
    let mut c_prime = vec![0.0; n];
    let mut d_prime = vec![0.0; n];
    for i in 1..n - 1 {
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        let a = h0 / 6.0;
        let b = (h0 + h1) / 3.0;
        let c = h1 / 6.0;
        let d = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
        let denom = b - a * c_prime[i - 1];
        c_prime[i] = c / denom;
        d_prime[i] = (d - a * d_prime[i - 1]) / denom;
    }
    for i in (1..n - 1).rev() {
        m[i] = d_prime[i] - c_prime[i] * m[i + 1];
    }
    m
}

/// Validated, immutable problem with derived data.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedProblem {
    spec: ProblemSpec,
    weights: Vec<f64>,
    alphas: Vec<f64>,
    alpha_primes: Vec<f64>,
    /// Segment `k` spans `[bounds[k], bounds[k + 1]]`.
    bounds: Vec<f64>,
    q: QRep,
    left: LeftEnd,
    right: RightEnd,
    pub(crate) cells: Vec<Cell>,
    pub(crate) segment_cells: Vec<Range<usize>>,
}

/// Validate a spec and build the derived data.
pub fn validate(spec: ProblemSpec) -> Result<ValidatedProblem> {
    ValidatedProblem::new(spec)
}

/// Weight `w(x)`; at a jump point the right limit is returned.
pub fn weight_at(p: &ValidatedProblem, x: f64) -> Result<f64> {
    p.weight_at(x)
}

/// Rescale every jump to unit determinant without changing the spectrum.
pub fn gauge_transform(p: &ValidatedProblem) -> ValidatedProblem {
    p.gauge_transform()
}

impl ValidatedProblem {
    pub fn new(spec: ProblemSpec) -> Result<Self> {
        let mut prev = 0.0;
        for (i, j) in spec.jumps.iter().enumerate() {
            if !(j.d.is_finite() && j.d > prev && j.d < PI) {
                return Err(Error::JumpOrder(format!(
                    "jump {i} at d = {} (previous {prev})",
                    j.d
                )));
            }
            prev = j.d;
            let product = j.a * j.b;
            if !(product > 0.0) || !j.c.is_finite() {
                return Err(Error::JumpSign { index: i, product });
            }
        }
        let (left, right) = match spec.boundary {
            BoundaryCondition::Robin { h, H } => {
                if !(h.is_finite() && H.is_finite()) {
                    return Err(Error::BoundaryConstraint("non-finite Robin parameter".into()));
                }
                (LeftEnd::Robin { h }, RightEnd::Robin { big_h: H })
            }
            BoundaryCondition::Eigenparameter { h1, h2, h3, H1, H2, H3 } => {
                let r1 = h3 - h1 * h2;
                let r2 = H1 * H2 - H3;
                if !(r1 > 0.0) {
                    return Err(Error::BoundaryConstraint(format!("r1 = h3 - h1*h2 = {r1} must be > 0")));
                }
                if !(r2 > 0.0) {
                    return Err(Error::BoundaryConstraint(format!("r2 = H1*H2 - H3 = {r2} must be > 0")));
                }
                (
                    LeftEnd::Eigen { h1, h2, h3 },
                    RightEnd::Eigen {
                        big_h1: H1,
                        big_h2: H2,
                        big_h3: H3,
                    },
                )
            }
        };
        let q = QRep::resolve(&spec.potential, &spec.jumps)?;

        let mut weights = vec![1.0];
        let mut acc = 1.0;
        for j in &spec.jumps {
            acc *= j.a * j.b;
            weights.push(1.0 / acc);
        }
        let alphas = spec.jumps.iter().map(JumpCondition::alpha).collect();
        let alpha_primes = spec.jumps.iter().map(JumpCondition::alpha_prime).collect();
        let mut bounds = vec![0.0];
        bounds.extend(spec.jumps.iter().map(|j| j.d));
        bounds.push(PI);

        let (cells, segment_cells) = build_mesh(&q, &bounds)?;
        Ok(ValidatedProblem {
            spec,
            weights,
            alphas,
            alpha_primes,
            bounds,
            q,
            left,
            right,
            cells,
            segment_cells,
        })
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn jumps(&self) -> &[JumpCondition] {
        &self.spec.jumps
    }

    pub fn boundary(&self) -> &BoundaryCondition {
        &self.spec.boundary
    }

    pub fn is_eigenparameter(&self) -> bool {
        matches!(self.left, LeftEnd::Eigen { .. }) || matches!(self.right, RightEnd::Eigen { .. })
    }

    pub fn left_end(&self) -> LeftEnd {
        self.left
    }

    pub fn right_end(&self) -> RightEnd {
        self.right
    }

    /// Same problem with the condition at `0` replaced (used for second spectra).
    pub fn with_left_end(&self, left: LeftEnd) -> ValidatedProblem {
        let mut p = self.clone();
        p.left = left;
        p
    }

    pub fn num_segments(&self) -> usize {
        self.weights.len()
    }

    /// Per-segment weight values `w_0 = 1, w_k = 1 / (a_1 b_1 ... a_k b_k)`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn alpha_primes(&self) -> &[f64] {
        &self.alpha_primes
    }

    /// Segment boundaries `0 = d_0 < d_1 < ... < d_m = pi`.
    pub fn segment_bounds(&self) -> &[f64] {
        &self.bounds
    }

    /// Segment containing `x`; jump points belong to the segment on their right.
    pub fn segment_of(&self, x: f64) -> Result<usize> {
        self.locate(x, false)
    }

    pub(crate) fn locate(&self, x: f64, left_limit: bool) -> Result<usize> {
        if !(0.0..=PI).contains(&x) {
            return Err(Error::Domain(format!("x = {x} outside [0, pi]")));
        }
        let interior = &self.bounds[1..self.bounds.len() - 1];
        let k = if left_limit {
            interior.partition_point(|&d| d < x)
        } else {
            interior.partition_point(|&d| d <= x)
        };
        Ok(k)
    }

    pub fn weight_at(&self, x: f64) -> Result<f64> {
        Ok(self.weights[self.segment_of(x)?])
    }

    /// Left-limit variant of [`Self::weight_at`].
    pub fn weight_at_left(&self, x: f64) -> Result<f64> {
        Ok(self.weights[self.locate(x, true)?])
    }

    pub fn weight_pi(&self) -> f64 {
        *self.weights.last().expect("at least one segment")
    }

    /// `q(x)`, right limit at breakpoints.
    pub fn q(&self, x: f64) -> f64 {
        self.q.eval(x, false)
    }

    pub fn q_left(&self, x: f64) -> f64 {
        self.q.eval(x, true)
    }

    pub(crate) fn q_breakpoints(&self) -> Vec<f64> {
        self.q.breakpoints()
    }

    pub fn q_max_abs(&self) -> f64 {
        self.q.max_abs()
    }

    pub fn gauge_transform(&self) -> ValidatedProblem {
        let mut spec = self.spec.clone();
        for j in &mut spec.jumps {
            let ab = j.a * j.b;
            let (a, b) = ((j.a / j.b).sqrt(), (j.b / j.a).sqrt());
            // a/b > 0, but the sign of a carries over.
            let sign = j.a.signum();
            j.a = sign * a;
            j.b = sign * b;
            j.c /= ab.sqrt();
        }
        let mut p = ValidatedProblem::new(spec).expect("gauge transform preserves validity");
        p.left = self.left;
        p.right = self.right;
        p
    }

    /// Hex digest of the canonical JSON of the spec.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(serde_json::to_vec(&self.spec).expect("spec serializes"));
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Number of integration cells (diagnostic).
    pub fn mesh_len(&self) -> usize {
        self.cells.len()
    }
}

const INITIAL_CELL: f64 = 0.05;
const MIN_CELL: f64 = 1e-5;
const MESH_TOL: f64 = 1e-10;

/// Build the Magnus mesh: cells never straddle a jump or a potential
/// breakpoint, and each smooth sub-interval is refined until doubling the
/// cell count changes the sub-interval transfer matrix by less than
/// `MESH_TOL` (relative) at a fixed set of test points.
fn build_mesh(q: &QRep, bounds: &[f64]) -> Result<(Vec<Cell>, Vec<Range<usize>>)> {
    let qb = q.breakpoints();
    let mut cells = Vec::new();
    let mut segment_cells = Vec::with_capacity(bounds.len() - 1);
    let eval = |x: f64| q.eval(x, false);
    for seg in bounds.windows(2) {
        let (lo, hi) = (seg[0], seg[1]);
        let mut pts = vec![lo];
        pts.extend(qb.iter().copied().filter(|&b| b > lo && b < hi));
        pts.push(hi);
        let start = cells.len();
        for w in pts.windows(2) {
            let (u, v) = (w[0], w[1]);
            if q.constant_between(u, v) {
                cells.push(Cell::new(u, v - u, eval));
                continue;
            }
            let mut n = ((v - u) / INITIAL_CELL).ceil().max(1.0) as usize;
            let mut coarse = subinterval_cells(u, v, n, &eval);
            loop {
                let fine = subinterval_cells(u, v, 2 * n, &eval);
                if transfer_gap(&coarse, &fine) < MESH_TOL {
                    cells.extend(fine);
                    break;
                }
                n *= 2;
                if (v - u) / (n as f64) < MIN_CELL {
                    return Err(Error::Tolerance(format!(
                        "mesh on [{u}, {v}] did not converge at cell size {MIN_CELL}"
                    )));
                }
                coarse = fine;
            }
        }
        segment_cells.push(start..cells.len());
    }
    Ok((cells, segment_cells))
}

fn subinterval_cells(u: f64, v: f64, n: usize, q: &impl Fn(f64) -> f64) -> Vec<Cell> {
    let h = (v - u) / n as f64;
    (0..n)
        .map(|i| {
            let x0 = u + h * i as f64;
            let len = if i + 1 == n { v - x0 } else { h };
            Cell::new(x0, len, q)
        })
        .collect()
}

const MESH_PROBES: [(f64, f64); 5] = [(-16.0, 0.0), (0.0, 0.0), (50.0, 0.0), (1000.0, 0.0), (10000.0, 100.0)];

fn transfer_gap(coarse: &[Cell], fine: &[Cell]) -> f64 {
    let mut worst: f64 = 0.0;
    for &(re, im) in &MESH_PROBES {
        let lam = Complex64::new(re, im);
        let scale = lam.norm().sqrt().max(1.0);
        let a = normalised(&compose(coarse, lam), scale);
        let b = normalised(&compose(fine, lam), scale);
        let mut diff = 0.0;
        let mut norm = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                diff += (a[i][j] - b[i][j]).norm_sqr();
                norm += b[i][j].norm_sqr();
            }
        }
        worst = worst.max((diff / norm).sqrt());
    }
    worst
}

fn compose(cells: &[Cell], lam: Complex64) -> Mat2 {
    cells
        .iter()
        .fold(magnus::identity(), |acc, c| magnus::mul(&c.transfer(lam), &acc))
}

fn normalised(m: &Mat2, s: f64) -> Mat2 {
    [[m[0][0], m[0][1] * s], [m[1][0] / s, m[1][1]]]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_jump(a: f64, b: f64, c: f64) -> ProblemSpec {
        ProblemSpec::new(
            Potential::zero(),
            BoundaryCondition::robin(0.0, 0.0),
            vec![JumpCondition::new(PI / 2.0, a, b, c)],
        )
    }

    #[test]
    fn unit_determinant_jump_keeps_weight_one() {
        let p = validate(one_jump(2.0, 0.5, 0.0)).unwrap();
        assert_eq!(p.num_segments(), 2);
        assert_eq!(p.weights(), &[1.0, 1.0]);
    }

    #[test]
    fn jump_sign_rejected() {
        let err = validate(one_jump(1.0, -1.0, 0.0)).unwrap_err();
        assert_eq!(err.name(), "JumpSignError");
    }

    #[test]
    fn eigenparameter_r1_rejected() {
        let spec = ProblemSpec::new(
            Potential::zero(),
            BoundaryCondition::Eigenparameter {
                h1: 1.0,
                h2: 2.0,
                h3: 1.0,
                H1: 0.0,
                H2: 2.0,
                H3: -1.0,
            },
            vec![],
        );
        let err = validate(spec).unwrap_err();
        assert_eq!(err.name(), "BoundaryConstraintError");
        assert!(err.to_string().contains("-1"));
    }

    #[test]
    fn jump_order_rejected() {
        for ds in [[1.0, 1.0], [2.0, 1.0], [0.0, 1.0], [1.0, PI]] {
            let spec = ProblemSpec::new(
                Potential::zero(),
                BoundaryCondition::robin(0.0, 0.0),
                ds.iter().map(|&d| JumpCondition::new(d, 1.0, 1.0, 0.0)).collect(),
            );
            assert_eq!(validate(spec).unwrap_err().name(), "JumpOrderError", "{ds:?}");
        }
    }

    #[test]
    fn non_finite_samples_rejected() {
        let spec = ProblemSpec::new(
            Potential::SampledGrid {
                abscissae: vec![0.0, 1.0, PI],
                values: vec![0.0, f64::NAN, 1.0],
                order: 1,
            },
            BoundaryCondition::robin(0.0, 0.0),
            vec![],
        );
        assert_eq!(validate(spec).unwrap_err().name(), "PotentialError");
    }

    #[test]
    fn weight_values() {
        let p = validate(ProblemSpec::free()).unwrap();
        assert_eq!(p.weight_at(1.3).unwrap(), 1.0);

        let p = validate(ProblemSpec::new(
            Potential::zero(),
            BoundaryCondition::robin(0.0, 0.0),
            vec![JumpCondition::new(1.0, 2.0, 1.0, 0.0)],
        ))
        .unwrap();
        assert_eq!(p.weight_at(0.5).unwrap(), 1.0);
        assert_eq!(p.weight_at(2.0).unwrap(), 0.5);
        // right limit at the jump point itself
        assert_eq!(p.weight_at(1.0).unwrap(), 0.5);
        assert_eq!(p.weight_at_left(1.0).unwrap(), 1.0);
        assert_eq!(p.weight_at(-0.1).unwrap_err().name(), "DomainError");

        let p = validate(ProblemSpec::new(
            Potential::zero(),
            BoundaryCondition::robin(0.0, 0.0),
            vec![
                JumpCondition::new(1.0, 2.0, 1.0, 0.0),
                JumpCondition::new(2.0, 1.5, 2.0, 0.0),
            ],
        ))
        .unwrap();
        let w = p.weights();
        assert_eq!(w[0], 1.0);
        assert!((w[1] - 0.5).abs() < 1e-15);
        assert!((w[2] - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn gauge_example() {
        let p = validate(one_jump(4.0, 1.0, 6.0)).unwrap();
        let g = p.gauge_transform();
        let j = g.jumps()[0];
        assert!((j.a - 2.0).abs() < 1e-15);
        assert!((j.b - 0.5).abs() < 1e-15);
        assert!((j.c - 3.0).abs() < 1e-15);
        assert!(g.weights().iter().all(|&w| (w - 1.0).abs() < 1e-15));

        let p = validate(one_jump(2.0, 0.5, 0.0)).unwrap();
        let g = p.gauge_transform();
        assert_eq!(g.jumps()[0], p.jumps()[0]);
    }

    #[test]
    fn config_field_names() {
        let text = r#"{
            "potential": {"type": "piecewise_polynomial", "coefficients": [[1.0], [0.5, 1.0]]},
            "boundary": {"type": "robin", "h": 1.0, "H": -1.0},
            "jumps": [{"d": 1.0, "a": 2.0, "b": 1.0, "c": 1.0}]
        }"#;
        let spec = ProblemSpec::from_json(text).unwrap();
        assert_eq!(spec.boundary, BoundaryCondition::robin(1.0, -1.0));
        let p = validate(spec.clone()).unwrap();
        assert_eq!(p.q(0.5), 1.0);
        assert!((p.q(1.5) - 1.0).abs() < 1e-15);
        assert_eq!(p.q_left(1.0), 1.0);
        assert_eq!(p.q(1.0), 0.5);
        let back = ProblemSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back, spec);

        let eig = r#"{"potential": {"type": "piecewise_polynomial", "coefficients": [[0.0]]},
            "boundary": {"type": "eigenparameter", "h1": 0, "h2": 0, "h3": 1, "H1": 0, "H2": 2, "H3": -1}}"#;
        let spec = ProblemSpec::from_json(eig).unwrap();
        assert!(validate(spec).unwrap().is_eigenparameter());
        assert_eq!(ProblemSpec::from_json("{}").unwrap_err().name(), "ConfigParseError");
    }

    #[test]
    fn spline_reproduces_samples() {
        let xs: Vec<f64> = (0..=10).map(|i| PI * i as f64 / 10.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
        for order in [0u8, 1, 3] {
            let p = validate(ProblemSpec::new(
                Potential::SampledGrid {
                    abscissae: xs.clone(),
                    values: ys.clone(),
                    order,
                },
                BoundaryCondition::robin(0.0, 0.0),
                vec![],
            ))
            .unwrap();
            for (x, y) in xs.iter().zip(&ys) {
                assert!((p.q(*x) - y).abs() < 1e-12, "order {order} at {x}");
            }
        }
    }

    #[test]
    fn constant_potential_uses_one_cell_per_segment() {
        let p = validate(one_jump(2.0, 0.5, 0.0)).unwrap();
        assert_eq!(p.mesh_len(), 2);
    }
}
