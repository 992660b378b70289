#![allow(dead_code)]

use std::f64::consts::PI;

use jumpsl::{validate, BoundaryCondition, JumpCondition, Potential, ProblemSpec, ValidatedProblem};

fn poly(coefficients: Vec<Vec<f64>>) -> Potential {
    Potential::PiecewisePolynomial {
        coefficients,
        breaks: None,
    }
}

/// q = 1, h = 1, H = -1, one jump at pi/3 with (a, b, c) = (2, 1, 1).
pub fn desk1_spec() -> ProblemSpec {
    ProblemSpec::new(
        Potential::constant(1.0),
        BoundaryCondition::robin(1.0, -1.0),
        vec![JumpCondition::new(PI / 3.0, 2.0, 1.0, 1.0)],
    )
}

/// `desk1` with a cubic potential on each side of the jump.
pub fn desk1_poly_spec() -> ProblemSpec {
    ProblemSpec::new(
        poly(vec![vec![1.0, 0.5, -0.3, 0.1], vec![0.8, -0.4, 0.2, -0.05]]),
        BoundaryCondition::robin(1.0, -1.0),
        vec![JumpCondition::new(PI / 3.0, 2.0, 1.0, 1.0)],
    )
}

pub fn two_jump_spec() -> ProblemSpec {
    ProblemSpec::new(
        poly(vec![vec![0.5, 0.2], vec![-0.3, 0.1, 0.05], vec![0.4, 0.0, -0.1, 0.02]]),
        BoundaryCondition::robin(0.5, 0.3),
        vec![JumpCondition::new(1.0, 1.5, 2.0, 0.5), JumpCondition::new(2.2, 0.8, 1.2, -0.4)],
    )
}

pub fn three_jump_spec() -> ProblemSpec {
    ProblemSpec::new(
        poly(vec![vec![0.3, 0.2, -0.1, 0.02]; 4]),
        BoundaryCondition::robin(0.4, -0.6),
        vec![
            JumpCondition::new(0.8, 2.0, 1.0, 0.5),
            JumpCondition::new(1.7, 1.0, 3.0, 0.0),
            JumpCondition::new(2.5, 1.5, 0.5, -0.3),
        ],
    )
}

pub fn four_jump_spec() -> ProblemSpec {
    ProblemSpec::new(
        poly(vec![vec![0.5, -0.2, 0.1]; 5]),
        BoundaryCondition::robin(-0.5, 1.0),
        vec![
            JumpCondition::new(0.5, 2.0, 1.0, 0.3),
            JumpCondition::new(1.2, 3.0, 0.5, -0.2),
            JumpCondition::new(2.0, 0.7, 2.0, 0.1),
            JumpCondition::new(2.7, 1.2, 0.9, 0.0),
        ],
    )
}

/// q = 0, lambda y(0) = -y'(0) (r1 = 1) and
/// lambda y'(pi) - 2 y'(pi) + y(pi) = 0 (r2 = 1).
pub fn eigen_spec() -> ProblemSpec {
    ProblemSpec::new(
        Potential::zero(),
        BoundaryCondition::Eigenparameter {
            h1: 0.0,
            h2: 0.0,
            h3: 1.0,
            H1: 0.0,
            H2: 2.0,
            H3: -1.0,
        },
        vec![],
    )
}

/// d = pi/2, (a, b, c) = (2, 1/2, 0), q = 0, Neumann ends.
pub fn closed_form_spec() -> ProblemSpec {
    ProblemSpec::new(
        Potential::zero(),
        BoundaryCondition::robin(0.0, 0.0),
        vec![JumpCondition::new(PI / 2.0, 2.0, 0.5, 0.0)],
    )
}

pub fn v(spec: ProblemSpec) -> ValidatedProblem {
    validate(spec).expect("desk problem is valid")
}

/// Named Robin desk problems used across suites.
pub fn robin_desk() -> Vec<(&'static str, ValidatedProblem)> {
    vec![
        ("desk1", v(desk1_spec())),
        ("desk1_poly", v(desk1_poly_spec())),
        ("two_jump", v(two_jump_spec())),
        ("three_jump", v(three_jump_spec())),
        ("four_jump", v(four_jump_spec())),
    ]
}

pub fn all_desk() -> Vec<(&'static str, ValidatedProblem)> {
    let mut out = robin_desk();
    out.push(("eigen", v(eigen_spec())));
    out
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
