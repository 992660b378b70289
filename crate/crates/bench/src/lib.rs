//! Fixed problems shared by the benchmarks.

use std::f64::consts::PI;

use jumpsl::{validate, BoundaryCondition, JumpCondition, Potential, ValidatedProblem};

/// Cubic potential on each side of one jump at `pi/3`.
pub fn one_jump() -> ValidatedProblem {
    validate(jumpsl::ProblemSpec::new(
        Potential::PiecewisePolynomial {
            coefficients: vec![vec![1.0, 0.5, -0.3, 0.1], vec![0.8, -0.4, 0.2, -0.05]],
            breaks: None,
        },
        BoundaryCondition::robin(1.0, -1.0),
        vec![JumpCondition::new(PI / 3.0, 2.0, 1.0, 1.0)],
    ))
    .expect("valid problem")
}

pub fn four_jumps() -> ValidatedProblem {
    validate(jumpsl::ProblemSpec::new(
        Potential::PiecewisePolynomial {
            coefficients: vec![vec![0.5, -0.2, 0.1]; 5],
            breaks: None,
        },
        BoundaryCondition::robin(-0.5, 1.0),
        vec![
            JumpCondition::new(0.5, 2.0, 1.0, 0.3),
            JumpCondition::new(1.2, 3.0, 0.5, -0.2),
            JumpCondition::new(2.0, 0.7, 2.0, 0.1),
            JumpCondition::new(2.7, 1.2, 0.9, 0.0),
        ],
    ))
    .expect("valid problem")
}
