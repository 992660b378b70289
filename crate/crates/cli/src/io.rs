use std::io::Write;
use std::path::{Path, PathBuf};

use jumpsl::{validate, ProblemSpec, ValidatedProblem};
use num_complex::Complex64;
use tempfile::NamedTempFile;

use crate::fail::Failure;

pub fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

pub fn load_problem(path: &Path) -> Result<ValidatedProblem, Failure> {
    Ok(validate(ProblemSpec::from_json(&read(path)?)?)?)
}

/// Write `text` to `path` via a temporary file and rename, or to stdout.
pub fn emit(output: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    let Some(path) = output else {
        let mut out = std::io::stdout().lock();
        return out.write_all(text.as_bytes()).map_err(|e| Failure::io("<stdout>", e));
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| Failure::io(dir, e))?;
    tmp.write_all(text.as_bytes()).map_err(|e| Failure::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| Failure::io(path, e.error))?;
    Ok(())
}

/// `re,im` or a bare real number.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| format!("`{t}` is not a number"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected `re,im`, got `{s}`")),
    }
}

/// Evenly spaced values along one axis.
#[derive(Debug, Clone)]
pub struct Axis(pub Vec<f64>);

/// `min,max,n` as `n` evenly spaced values.
pub fn parse_range(s: &str) -> Result<Axis, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(format!("expected `min,max,n`, got `{s}`"));
    };
    let (lo, hi): (f64, f64) = (
        lo.parse().map_err(|_| format!("`{lo}` is not a number"))?,
        hi.parse().map_err(|_| format!("`{hi}` is not a number"))?,
    );
    let n: usize = n.parse().map_err(|_| format!("`{n}` is not a count"))?;
    match n {
        0 => Err("range needs at least one point".into()),
        1 => Ok(Axis(vec![lo])),
        _ => Ok(Axis((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())),
    }
}
