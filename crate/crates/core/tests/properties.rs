use std::f64::consts::PI;

use jumpsl::asymptotics::{asymptotic_eval, reflection_terms, AsymptoticTarget};
use jumpsl::propagator::{apply_jump, apply_jump_inverse, fundamental_solution, modified_wronskian};
use jumpsl::spectrum::char_delta;
use jumpsl::weyl::weyl_m;
use jumpsl::{
    validate, BoundaryCondition, JumpCondition, Potential, ProblemSpec, SolutionKind, SpectralPoint, StateVector,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn jump_params() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.2f64..4.0, 0.2f64..4.0, -2.0f64..2.0, prop::bool::ANY).prop_map(|(a, b, c, neg)| {
        if neg {
            (-a, -b, c)
        } else {
            (a, b, c)
        }
    })
}

/// Problems with 0..=3 jumps at sorted, separated points.
fn problem() -> impl Strategy<Value = ProblemSpec> {
    (
        prop::collection::vec(jump_params(), 0..=3),
        prop::collection::vec(-2.0f64..2.0, 1..=3),
        -2.0f64..2.0,
        -2.0f64..2.0,
    )
        .prop_map(|(jumps, q, h, big_h)| {
            let n = jumps.len();
            let jumps = jumps
                .into_iter()
                .enumerate()
                .map(|(i, (a, b, c))| JumpCondition::new(PI * (i + 1) as f64 / (n + 1) as f64, a, b, c))
                .collect();
            ProblemSpec::new(
                Potential::PiecewisePolynomial {
                    coefficients: vec![q],
                    breaks: None,
                },
                BoundaryCondition::robin(h, big_h),
                jumps,
            )
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn alpha_identity((a, b, c) in jump_params()) {
        let j = JumpCondition::new(1.0, a, b, c);
        let lhs = j.alpha().powi(2) - j.alpha_prime().powi(2);
        prop_assert!((lhs - a * b).abs() <= 1e-12 * (a * b).abs().max(1.0));
    }

    #[test]
    fn jump_round_trip((a, b, c) in jump_params(), y in -5.0f64..5.0, yp in -5.0f64..5.0) {
        let j = JumpCondition::new(1.0, a, b, c);
        let s = StateVector::real(1.0, y, yp);
        let back = apply_jump_inverse(&j, apply_jump(&j, s));
        prop_assert!((back.y - s.y).norm() < 1e-12 * (1.0 + s.y.norm()));
        prop_assert!((back.yp - s.yp).norm() < 1e-11 * (1.0 + s.yp.norm()));
    }

    #[test]
    fn gauge_gives_unit_weight_and_is_idempotent(spec in problem()) {
        let p = validate(spec).unwrap();
        let g = p.gauge_transform();
        for w in g.weights() {
            prop_assert!((w - 1.0).abs() < 1e-14);
        }
        for j in g.jumps() {
            prop_assert!((j.a * j.b - 1.0).abs() < 1e-14);
        }
        let gg = g.gauge_transform();
        for (x, y) in g.jumps().iter().zip(gg.jumps()) {
            prop_assert!((x.a - y.a).abs() < 1e-14 && (x.b - y.b).abs() < 1e-14 && (x.c - y.c).abs() < 1e-14);
        }
    }

    #[test]
    fn reflection_coefficients_sum_to_product_of_a(spec in problem()) {
        let p = validate(spec).unwrap();
        for k in 0..p.num_segments() {
            let terms = reflection_terms(&p, k).unwrap();
            prop_assert_eq!(terms.len(), 1 << k);
            let sum: f64 = terms.iter().map(|t| t.coefficient).sum();
            let prod: f64 = p.jumps()[..k].iter().map(|j| j.a).product();
            prop_assert!((sum - prod).abs() < 1e-12 * prod.abs().max(1.0));
        }
    }

    #[test]
    fn equal_a_and_b_leave_a_single_wave(
        a in prop::collection::vec(0.3f64..3.0, 1..=3),
        x in 0.05f64..3.1,
        rho in 1.0f64..50.0,
    ) {
        let n = a.len();
        let jumps: Vec<_> = a
            .iter()
            .enumerate()
            .map(|(i, &a)| JumpCondition::new(PI * (i + 1) as f64 / (n + 1) as f64 + 0.01, a, a, 0.0))
            .collect();
        prop_assume!(jumps.iter().all(|j| (j.d - x).abs() > 1e-6));
        let p = validate(ProblemSpec::new(Potential::zero(), BoundaryCondition::robin(0.0, 0.0), jumps)).unwrap();
        let k = p.segment_of(x).unwrap();
        let prod: f64 = a[..k].iter().product();
        let got = asymptotic_eval(&p, AsymptoticTarget::Phi, x, Complex64::new(rho, 0.0)).unwrap();
        prop_assert!((got.re - prod * (rho * x).cos()).abs() < 1e-12 * prod.max(1.0));
    }

    #[test]
    fn delta_is_real_symmetric(spec in problem(), re in -20.0f64..200.0, im in -5.0f64..5.0) {
        let p = validate(spec).unwrap();
        let l = Complex64::new(re, im);
        let d = char_delta(&p, l);
        let dc = char_delta(&p, l.conj());
        prop_assert!((d.conj() - dc).norm() <= 1e-10 * d.norm().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn modified_wronskian_is_constant(spec in problem(), re in -10.0f64..100.0, im in -3.0f64..3.0) {
        let p = validate(spec).unwrap();
        let sp = SpectralPoint::new(Complex64::new(re, im));
        let phi = fundamental_solution(&p, SolutionKind::Phi, sp).unwrap();
        let psi = fundamental_solution(&p, SolutionKind::Psi, sp).unwrap();
        let w0 = modified_wronskian(&p, &phi, &psi, 0.0).unwrap();
        for i in 1..=12 {
            let x = PI * i as f64 / 12.5;
            let w = modified_wronskian(&p, &phi, &psi, x).unwrap();
            prop_assert!((w - w0).norm() <= 1e-9 * w0.norm().max(1.0), "x = {x}: {w} vs {w0}");
        }
    }

    #[test]
    fn gauge_rescales_delta_by_a_constant(spec in problem(), re in -10.0f64..100.0, im in -3.0f64..3.0) {
        let p = validate(spec).unwrap();
        let g = p.gauge_transform();
        let ratio = |l: Complex64| char_delta(&g, l) / char_delta(&p, l);
        let (r1, r2) = (ratio(Complex64::new(re, im)), ratio(Complex64::new(-re / 3.0 + 1.5, 1.0 - im)));
        prop_assert!((r1 - r2).norm() <= 1e-8 * r1.norm(), "{r1} vs {r2}");
        let m = weyl_m(&p, Complex64::new(re, im + 4.0)).unwrap().m;
        let mg = weyl_m(&g, Complex64::new(re, im + 4.0)).unwrap().m;
        prop_assert!((m - mg).norm() <= 1e-8 * m.norm().max(1.0), "{m} vs {mg}");
    }
}
