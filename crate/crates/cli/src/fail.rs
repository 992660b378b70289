use std::fmt;
use std::path::PathBuf;

/// Anything that ends a run with a nonzero exit status.
#[derive(Debug)]
pub enum Failure {
    Core(jumpsl::Error),
    Io { path: PathBuf, source: std::io::Error },
    Usage(String),
    Threads(String),
}

impl From<jumpsl::Error> for Failure {
    fn from(e: jumpsl::Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Failure::Io {
            path: path.into(),
            source,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Failure::Core(e) => e.name(),
            Failure::Io { .. } => "IoError",
            Failure::Usage(_) => "UsageError",
            Failure::Threads(_) => "ConfigParseError",
        }
    }

    /// 1 for bad input, 2 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Core(e) if !e.is_validation() => 2,
            _ => 1,
        }
    }

    pub fn hint(&self) -> &'static str {
        match self.name() {
            "JumpOrderError" => "list jumps by increasing d, each strictly inside (0, pi)",
            "JumpSignError" => "every jump needs a*b > 0",
            "BoundaryConstraintError" => "eigenparameter ends need h3 - h1*h2 > 0 and H1*H2 - H3 > 0",
            "PotentialError" => "check the number of polynomial pieces against breaks or jumps",
            "DomainError" => "check positions lie in [0, pi] and off jump points",
            "ToleranceError" => "split the potential into smoother pieces",
            "MismatchError" => "combine solutions built at the same lambda",
            "MissedEigenvalueError" => "rerun with a smaller --step",
            "ContourTooCloseError" => "move the contour edges away from eigenvalues",
            "QuadratureError" => "split the potential into smoother pieces",
            "PoleError" => "lambda is an eigenvalue; move it off the real spectrum",
            "InterlacingError" => "the secondary spectrum must interlace with the primary one",
            "CalibrationError" => "use a Dirichlet secondary spectrum and a calibration point below both spectra",
            "VariantError" => "this command needs eigenparameter boundary conditions",
            "ForwardSolveError" => "tighten the bounds so every candidate is a valid problem",
            "NonconvergenceError" => "start closer to the solution or raise max_iter",
            "MaskError" => "unknowns may not include w, a[i] or b[i]; half mode fixes everything on [0, pi/2)",
            "ConfigParseError" => "check the file against the documented schema",
            "IoError" => "check the path exists and is writable",
            _ => "run with --help for usage",
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io { path, source } => write!(f, "{}: {source}", path.display()),
            Failure::Usage(s) => write!(f, "{s}"),
            Failure::Threads(s) => write!(f, "JUMPSL_THREADS: {s}"),
        }
    }
}
