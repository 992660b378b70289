use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{BoundaryCondition, Potential, ProblemSpec};

/// One scalar entry of a [`ProblemSpec`] that a fit may vary.
///
/// Text form: `q[piece][power]`, `h`, `H`, `h1`..`h3`, `H1`..`H3`,
/// `c[i]`, `d[i]` (indices 0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Param {
    Q { piece: usize, power: usize },
    LeftRobin,
    RightRobin,
    LeftEigen(u8),
    RightEigen(u8),
    JumpC(usize),
    JumpD(usize),
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Q { piece, power } => write!(f, "q[{piece}][{power}]"),
            Param::LeftRobin => write!(f, "h"),
            Param::RightRobin => write!(f, "H"),
            Param::LeftEigen(i) => write!(f, "h{i}"),
            Param::RightEigen(i) => write!(f, "H{i}"),
            Param::JumpC(i) => write!(f, "c[{i}]"),
            Param::JumpD(i) => write!(f, "d[{i}]"),
        }
    }
}

fn indices(s: &str) -> Option<Vec<usize>> {
    let mut out = Vec::new();
    let mut rest = s;
    while !rest.is_empty() {
        let inner = rest.strip_prefix('[')?;
        let end = inner.find(']')?;
        out.push(inner[..end].trim().parse().ok()?);
        rest = &inner[end + 1..];
    }
    Some(out)
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Mask(format!("unknown parameter name `{s}`"));
        let fixed = |what: &str| Error::Mask(format!("`{s}` cannot be an unknown: {what}"));
        match s {
            "h" => return Ok(Param::LeftRobin),
            "H" => return Ok(Param::RightRobin),
            "h1" | "h2" | "h3" => return Ok(Param::LeftEigen(s.as_bytes()[1] - b'0')),
            "H1" | "H2" | "H3" => return Ok(Param::RightEigen(s.as_bytes()[1] - b'0')),
            "w" => return Err(fixed("the weight function must be known")),
            _ => {}
        }
        let (head, tail) = s.split_at(s.find('[').ok_or_else(bad)?);
        let idx = indices(tail).ok_or_else(bad)?;
        match (head, idx.as_slice()) {
            ("q", &[piece, power]) => Ok(Param::Q { piece, power }),
            ("c", &[i]) => Ok(Param::JumpC(i)),
            ("d", &[i]) => Ok(Param::JumpD(i)),
            ("a" | "b", &[_]) => Err(fixed("a_i and b_i fix the weight function")),
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for Param {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Param> for String {
    fn from(p: Param) -> String {
        p.to_string()
    }
}

impl Param {
    pub fn get(&self, spec: &ProblemSpec) -> Result<f64> {
        let missing = || Error::Mask(format!("`{self}` does not exist in this problem"));
        match (*self, &spec.boundary) {
            (Param::Q { piece, power }, _) => match &spec.potential {
                Potential::PiecewisePolynomial { coefficients, .. } => {
                    let c = coefficients.get(piece).ok_or_else(missing)?;
                    Ok(c.get(power).copied().unwrap_or(0.0))
                }
                _ => Err(Error::Mask("polynomial coefficients need a piecewise-polynomial potential".into())),
            },
            (Param::LeftRobin, BoundaryCondition::Robin { h, .. }) => Ok(*h),
            (Param::RightRobin, BoundaryCondition::Robin { H, .. }) => Ok(*H),
            (Param::LeftEigen(i), BoundaryCondition::Eigenparameter { h1, h2, h3, .. }) => Ok([*h1, *h2, *h3][i as usize - 1]),
            (Param::RightEigen(i), BoundaryCondition::Eigenparameter { H1, H2, H3, .. }) => Ok([*H1, *H2, *H3][i as usize - 1]),
            (Param::JumpC(i), _) => spec.jumps.get(i).map(|j| j.c).ok_or_else(missing),
            (Param::JumpD(i), _) => spec.jumps.get(i).map(|j| j.d).ok_or_else(missing),
            _ => Err(Error::Mask(format!("`{self}` does not match the {} boundary variant", spec.boundary.variant_name()))),
        }
    }

    pub fn set(&self, spec: &mut ProblemSpec, v: f64) -> Result<()> {
        self.get(spec)?;
        match (*self, &mut spec.boundary) {
            (Param::Q { piece, power }, _) => {
                if let Potential::PiecewisePolynomial { coefficients, .. } = &mut spec.potential {
                    let c = &mut coefficients[piece];
                    if c.len() <= power {
                        c.resize(power + 1, 0.0);
                    }
                    c[power] = v;
                }
            }
            (Param::LeftRobin, BoundaryCondition::Robin { h, .. }) => *h = v,
            (Param::RightRobin, BoundaryCondition::Robin { H, .. }) => *H = v,
            (Param::LeftEigen(i), BoundaryCondition::Eigenparameter { h1, h2, h3, .. }) => {
                *[h1, h2, h3][i as usize - 1] = v
            }
            (Param::RightEigen(i), BoundaryCondition::Eigenparameter { H1, H2, H3, .. }) => {
                *[H1, H2, H3][i as usize - 1] = v
            }
            (Param::JumpC(i), _) => spec.jumps[i].c = v,
            (Param::JumpD(i), _) => spec.jumps[i].d = v,
            _ => unreachable!("checked by get"),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::JumpCondition;

    #[test]
    fn names_round_trip() {
        for s in ["q[1][3]", "h", "H", "h2", "H3", "c[0]", "d[2]"] {
            assert_eq!(s.parse::<Param>().unwrap().to_string(), s);
        }
        for s in ["w", "a[0]", "b[1]"] {
            assert_eq!(s.parse::<Param>().unwrap_err().name(), "MaskError");
        }
        assert!("q[1]".parse::<Param>().is_err());
    }

    #[test]
    fn get_and_set() {
        let mut spec = ProblemSpec::new(
            Potential::PiecewisePolynomial {
                coefficients: vec![vec![1.0], vec![2.0, 3.0]],
                breaks: None,
            },
            BoundaryCondition::robin(0.5, -0.5),
            vec![JumpCondition::new(1.0, 2.0, 1.0, 0.3)],
        );
        let p: Param = "q[0][2]".parse().unwrap();
        assert_eq!(p.get(&spec).unwrap(), 0.0);
        p.set(&mut spec, 4.0).unwrap();
        assert_eq!(p.get(&spec).unwrap(), 4.0);
        Param::RightRobin.set(&mut spec, 7.0).unwrap();
        assert_eq!(spec.boundary, BoundaryCondition::robin(0.5, 7.0));
        assert_eq!(Param::LeftEigen(1).get(&spec).unwrap_err().name(), "MaskError");
        assert_eq!(Param::JumpC(0).get(&spec).unwrap(), 0.3);
    }
}
