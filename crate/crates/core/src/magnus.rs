//! Fourth-order Magnus step for `y'' = (q - lambda) y`.
//!
//! One step over `[x0, x0 + h]` freezes the generator at the two Gauss
//! points and exponentiates exactly. For this equation the commutator
//! correction does not depend on `lambda`, so the per-cell data (`h`, mean
//! of `q`, commutator weight) can be computed once per problem and reused
//! at every spectral point. The resulting transfer matrices have unit
//! determinant, which keeps Wronskians constant to rounding.

use num_complex::Complex64;

pub(crate) type Mat2 = [[Complex64; 2]; 2];

/// Offset of the two Gauss-Legendre nodes from the cell midpoint, in units of `h`.
pub(crate) const GAUSS_OFFSET: f64 = 0.288_675_134_594_812_9; // sqrt(3)/6

/// Frozen data for one Magnus step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Cell {
    pub x0: f64,
    pub h: f64,
    /// Mean of `q` over the two Gauss nodes.
    pub qbar: f64,
    /// `sqrt(3) h^2 / 12 * (q(g2) - q(g1))`.
    pub kappa: f64,
}

impl Cell {
    pub fn new(x0: f64, h: f64, q: impl Fn(f64) -> f64) -> Self {
        let mid = x0 + 0.5 * h;
        let q1 = q(mid - GAUSS_OFFSET * h);
        let q2 = q(mid + GAUSS_OFFSET * h);
        Cell {
            x0,
            h,
            qbar: 0.5 * (q1 + q2),
            kappa: 3f64.sqrt() * h * h / 12.0 * (q2 - q1),
        }
    }

    pub fn transfer(&self, lambda: Complex64) -> Mat2 {
        let (c, s) = cosh_sinhc(self.z(lambda));
        self.assemble(lambda, c, s)
    }

    /// Transfer matrix together with its derivative in `lambda`.
    pub fn transfer_with_derivative(&self, lambda: Complex64) -> (Mat2, Mat2) {
        let (c, s, d) = cosh_sinhc_diff(self.z(lambda));
        let m = self.assemble(lambda, c, s);
        // z' = -h^2, C' = S z'/2, S' = D z'/2, Omega' = [[0,0],[-h,0]].
        let hh = -0.5 * self.h * self.h;
        let dc = s * hh;
        let ds = d * hh;
        let om = self.omega(lambda);
        let mut dm = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                dm[i][j] = ds * om[i][j];
            }
            dm[i][i] += dc;
        }
        dm[1][0] -= s * self.h;
        (m, dm)
    }

    fn z(&self, lambda: Complex64) -> Complex64 {
        self.kappa * self.kappa + self.h * self.h * (self.qbar - lambda)
    }

    fn omega(&self, lambda: Complex64) -> Mat2 {
        let k = Complex64::new(self.kappa, 0.0);
        [
            [-k, Complex64::new(self.h, 0.0)],
            [(self.qbar - lambda) * self.h, k],
        ]
    }

    /// `exp(Omega) = C I + S Omega` for traceless `Omega`.
    fn assemble(&self, lambda: Complex64, c: Complex64, s: Complex64) -> Mat2 {
        let om = self.omega(lambda);
        [
            [c + s * om[0][0], s * om[0][1]],
            [s * om[1][0], c + s * om[1][1]],
        ]
    }
}

pub(crate) fn apply(m: &Mat2, v: [Complex64; 2]) -> [Complex64; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

/// Inverse of a unit-determinant 2x2 matrix.
pub(crate) fn inverse_unimodular(m: &Mat2) -> Mat2 {
    [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]
}

pub(crate) fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub(crate) fn identity() -> Mat2 {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    [[one, zero], [zero, one]]
}

const SERIES_RADIUS: f64 = 0.5;

/// `(cosh sqrt z, sinh sqrt z / sqrt z)`; both are entire in `z`.
pub(crate) fn cosh_sinhc(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() < SERIES_RADIUS {
        let mut c = Complex64::new(0.0, 0.0);
        let mut s = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0); // z^k / (2k)!
        for k in 0..16 {
            c += term;
            let next = term / (2.0 * k as f64 + 1.0);
            s += next;
            term = next * z / (2.0 * k as f64 + 2.0);
        }
        (c, s)
    } else {
        let r = z.sqrt();
        (r.cosh(), r.sinh() / r)
    }
}

/// As [`cosh_sinhc`] plus `D(z) = (C - S) / z`.
pub(crate) fn cosh_sinhc_diff(z: Complex64) -> (Complex64, Complex64, Complex64) {
    if z.norm() < SERIES_RADIUS {
        let (c, s) = cosh_sinhc(z);
        // D = sum_j z^j (2j+2) / (2j+3)!
        let mut d = Complex64::new(0.0, 0.0);
        let mut zp = Complex64::new(1.0, 0.0);
        let mut fact = 6.0; // (2j+3)!
        for j in 0..16 {
            d += zp * ((2 * j + 2) as f64 / fact);
            zp *= z;
            fact *= ((2 * j + 4) * (2 * j + 5)) as f64;
        }
        (c, s, d)
    } else {
        let r = z.sqrt();
        let c = r.cosh();
        let s = r.sinh() / r;
        (c, s, (c - s) / z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_matches_closed_form_near_radius() {
        for &z in &[
            Complex64::new(0.49, 0.0),
            Complex64::new(-0.3, 0.38),
            Complex64::new(0.0, -0.49),
        ] {
            let (c, s, d) = cosh_sinhc_diff(z);
            let r = z.sqrt();
            assert!((c - r.cosh()).norm() < 1e-15);
            assert!((s - r.sinh() / r).norm() < 1e-15);
            assert!((d - (r.cosh() - r.sinh() / r) / z).norm() < 1e-13);
        }
    }

    #[test]
    fn constant_potential_step_is_exact() {
        let cell = Cell::new(0.0, 1.0, |_| 0.0);
        let m = cell.transfer( Complex64::new(4.0, 0.0));
        // cos(2x), -2 sin(2x) at x = 1
        assert!((m[0][0] - 2f64.cos()).norm() < 1e-15);
        assert!((m[1][0] + 2.0 * 2f64.sin()).norm() < 1e-15);
        assert!((m[0][1] - 2f64.sin() / 2.0).norm() < 1e-15);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let cell = Cell::new(0.3, 0.07, |x| 1.0 + x * x);
        let lam = Complex64::new(3.7, 0.4);
        let (_, dm) = cell.transfer_with_derivative(lam);
        let eps = 1e-6;
        let mp = cell.transfer( lam + eps);
        let mm = cell.transfer( lam - eps);
        for i in 0..2 {
            for j in 0..2 {
                let fd = (mp[i][j] - mm[i][j]) / (2.0 * eps);
                assert!((fd - dm[i][j]).norm() < 1e-8, "{i}{j}: {fd} vs {}", dm[i][j]);
            }
        }
    }

    #[test]
    fn transfer_is_unimodular() {
        let cell = Cell::new(0.0, 0.2, |x| 3.0 * x - 1.0);
        let m = cell.transfer( Complex64::new(-2.0, 5.0));
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        assert!((det - 1.0).norm() < 1e-14);
    }
}
