mod common;

use common::*;
use jumpsl::asymptotics::eigenvalue_guesses;
use jumpsl::spectrum::{char_delta, eigenvalues, eigenvalues_near, full_spectral_data, scan_floor};
use jumpsl::weyl::{partial_fraction_m, weyl_m};
use jumpsl::Certification;
use num_complex::Complex64;

fn delta_rho(p: &jumpsl::ValidatedProblem, r: f64) -> f64 {
    char_delta(p, Complex64::new(r * r, 0.0)).re
}

/// Sign changes of Delta on a fine rho grid, refined by plain bisection.
fn brute_force_eigenvalues(p: &jumpsl::ValidatedProblem, rho_max: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let floor = scan_floor(p);
    let mut l = floor;
    let mut prev = char_delta(p, Complex64::new(l, 0.0)).re;
    while l < 0.0 {
        let next = (l + 1e-3).min(0.0);
        let val = char_delta(p, Complex64::new(next, 0.0)).re;
        if prev * val < 0.0 {
            out.push(bisect(|x| char_delta(p, Complex64::new(x, 0.0)).re, l, next));
        }
        prev = val;
        l = next;
    }
    let mut r = 0.0;
    while r < rho_max {
        let next = r + 1e-3;
        let val = delta_rho(p, next);
        if prev * val < 0.0 {
            let root = bisect(|x| delta_rho(p, x), r, next);
            out.push(root * root);
        }
        prev = val;
        r = next;
    }
    out
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        if f(m) * fa > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[test]
fn desk1_matches_brute_force_scan() {
    let p = v(desk1_spec());
    let brute = brute_force_eigenvalues(&p, 12.2);
    let sd = eigenvalues(&p, brute.len()).unwrap();
    assert_eq!(sd.len(), brute.len());
    for (r, b) in sd.records.iter().zip(&brute) {
        assert!((r.lambda - b).abs() < 1e-8 * b.abs().max(1.0), "{} vs {b}", r.lambda);
        assert_eq!(r.certification, Certification::ContourVerified);
    }
}

#[test]
fn asymptotic_guesses_track_eigenvalues() {
    for (name, p) in robin_desk() {
        let sd = eigenvalues(&p, 25).unwrap();
        let guesses = eigenvalue_guesses(&p, 25);
        for (r, g) in sd.records.iter().zip(&guesses).skip(10) {
            assert!((r.rho.re - g).abs() < 0.5, "{name} n={}: {} vs {g}", r.n, r.rho);
        }
    }
}

#[test]
fn warm_start_reproduces_scan() {
    let p = v(two_jump_spec());
    let sd = eigenvalues(&p, 15).unwrap();
    let shifted: Vec<f64> = sd.lambdas().iter().map(|l| l + 0.05 * l.abs().sqrt()).collect();
    let near = eigenvalues_near(&p, &shifted).unwrap();
    for (a, b) in sd.lambdas().iter().zip(near.lambdas()) {
        assert!((a - b).abs() < 1e-9 * a.abs().max(1.0));
    }
}

#[test]
fn gauge_keeps_spectrum() {
    for (name, p) in all_desk() {
        let a = eigenvalues(&p, 12).unwrap().lambdas();
        let b = eigenvalues(&p.gauge_transform(), 12).unwrap().lambdas();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-8 * x.abs().max(1.0), "{name}: {x} vs {y}");
        }
    }
}

#[test]
fn partial_fractions_approach_m() {
    let p = v(desk1_spec());
    let sd = full_spectral_data(&p, 400).unwrap();
    let l = Complex64::new(-3.0, 2.0);
    let exact = weyl_m(&p, l).unwrap().m;
    let coarse = (partial_fraction_m(&sd, l, 50).unwrap() - exact).norm();
    let fine = (partial_fraction_m(&sd, l, 400).unwrap() - exact).norm();
    assert!(fine < coarse);
    assert!(fine < 2e-3 * exact.norm(), "{fine}");
}

#[test]
fn norming_constants_are_positive() {
    for (name, p) in all_desk() {
        let sd = full_spectral_data(&p, 20).unwrap();
        for r in &sd.records {
            assert!(r.gamma.unwrap() > 0.0, "{name} n={}", r.n);
        }
    }
}
