use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use jumpsl::asymptotics::{asymptotic_eval, AsymptoticTarget};
use jumpsl::export::{fmt_g17, m_csv, read_spectrum_csv, spectrum_csv, spectrum_json, M_HEADER};
use jumpsl::inverse::fit;
use jumpsl::spectrum::{char_delta, count_zeros_contour, delta_scale, eigenvalues_with, spectral_data, Rect, SearchOptions};
use jumpsl::weyl::{m_from_two_spectra, m_from_two_spectra_calibrated, weyl_m, TwoSpectra};
use jumpsl::{FitMode, FitSpec, Param, ProblemSpec, SpectralData, Targets};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fail::Failure;
use crate::io::{self, emit, load_problem, read};
use crate::{Command, Format};

pub fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Eigs {
            config,
            count,
            format,
            step,
            no_verify,
            output,
        } => {
            let p = load_problem(&config)?;
            let opts = SearchOptions { verify: !no_verify, step };
            let sd = eigenvalues_with(&p, count, opts)?;
            emit(output.as_ref(), &render(&sd, format))
        }
        Command::SpectralData {
            config,
            count,
            format,
            output,
        } => {
            let p = load_problem(&config)?;
            let sd = spectral_data(&p, &eigenvalues_with(&p, count, SearchOptions::default())?)?;
            emit(output.as_ref(), &render(&sd, format))
        }
        Command::Weyl {
            config,
            lambdas,
            re_grid,
            im_grid,
            output,
        } => {
            let p = load_problem(&config)?;
            let mut points = lambdas;
            match (re_grid, im_grid) {
                (Some(io::Axis(re)), Some(io::Axis(im))) => {
                    points.extend(im.iter().flat_map(|&y| re.iter().map(move |&x| Complex64::new(x, y))))
                }
                (None, None) => {}
                _ => return Err(Failure::Usage("--re-grid and --im-grid go together".into())),
            }
            if points.is_empty() {
                return Err(Failure::Usage("give --lambda or --re-grid/--im-grid".into()));
            }
            let samples = points.iter().map(|&l| weyl_m(&p, l)).collect::<Result<Vec<_>, _>>()?;
            emit(output.as_ref(), &m_csv(&samples))
        }
        Command::AsymCheck {
            config,
            rho,
            tau,
            output,
        } => {
            let p = load_problem(&config)?;
            emit(output.as_ref(), &asym_check(&p, &rho, tau)?)
        }
        Command::Gauge { config, output } => {
            let p = load_problem(&config)?;
            let g = p.gauge_transform();
            let mut text = g.spec().to_json();
            text.push('\n');
            emit(output.as_ref(), &text)?;
            eprintln!("note: every jump now has a*b = 1, so w = 1 on [0, pi]");
            Ok(())
        }
        Command::TwoSpectra {
            primary,
            secondary,
            lambdas,
            truncation,
            calibration,
            output,
        } => {
            let a = lambdas_from(&primary)?;
            let b = lambdas_from(&secondary)?;
            let n = truncation.unwrap_or(a.len().min(b.len()));
            let ts = TwoSpectra::new(a, b, None)?;
            ts.check_interlacing()?;
            let mut text = format!("{M_HEADER}\n");
            for &l in &lambdas {
                let m = match calibration {
                    Some(c) => m_from_two_spectra_calibrated(&ts, l, n, c)?,
                    None => m_from_two_spectra(&ts, l, n)?,
                };
                text.push_str(&format!("{},{},{},{}\n", fmt_g17(l.re), fmt_g17(l.im), fmt_g17(m.re), fmt_g17(m.im)));
            }
            emit(output.as_ref(), &text)
        }
        Command::Fit { spec, output } => run_fit(&spec, output.as_ref()),
        Command::ContourCount {
            config,
            re_min,
            re_max,
            im_min,
            im_max,
            output,
        } => {
            let p = load_problem(&config)?;
            let n = count_zeros_contour(&p, Rect::new(re_min, re_max, im_min, im_max))?;
            let text = format!(
                "re_min,re_max,im_min,im_max,count\n{},{},{},{},{n}\n",
                fmt_g17(re_min),
                fmt_g17(re_max),
                fmt_g17(im_min),
                fmt_g17(im_max)
            );
            emit(output.as_ref(), &text)
        }
    }
}

fn render(sd: &SpectralData, format: Format) -> String {
    match format {
        Format::Csv => spectrum_csv(sd),
        Format::Json => spectrum_json(sd),
    }
}

fn lambdas_from(path: &Path) -> Result<Vec<f64>, Failure> {
    Ok(read_spectrum_csv(&read(path)?)?.into_iter().map(|r| r.lambda).collect())
}

const BAND_STEPS: usize = 16;
const BAND_STEP: f64 = 0.25;

/// Table of exact and leading-order Delta. `scaled_error` divides the gap
/// by the size of the leading term; `band_error` is its maximum over
/// `[rho, rho + 4)` and `ratio` compares consecutive bands.
fn asym_check(p: &jumpsl::ValidatedProblem, rhos: &[f64], tau: f64) -> Result<String, Failure> {
    let scaled = |rho: Complex64| -> Result<(Complex64, Complex64, f64), Failure> {
        let exact = char_delta(p, rho * rho);
        let asym = asymptotic_eval(p, AsymptoticTarget::Delta, 0.0, rho)?;
        Ok((exact, asym, (exact - asym).norm() / delta_scale(p, rho * rho)))
    };
    let mut out = String::from("rho,tau,re_delta,im_delta,re_asym,im_asym,scaled_error,band_error,ratio\n");
    let mut prev: Option<f64> = None;
    for &r in rhos {
        let rho = Complex64::new(r, tau);
        let (exact, asym, err) = scaled(rho)?;
        let mut band = err;
        for j in 1..BAND_STEPS {
            band = band.max(scaled(Complex64::new(r + BAND_STEP * j as f64, tau))?.2);
        }
        let ratio = prev.map(|b| fmt_g17(band / b)).unwrap_or_default();
        prev = Some(band);
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{ratio}\n",
            fmt_g17(r),
            fmt_g17(tau),
            fmt_g17(exact.re),
            fmt_g17(exact.im),
            fmt_g17(asym.re),
            fmt_g17(asym.im),
            fmt_g17(err),
            fmt_g17(band)
        ));
    }
    Ok(out)
}

/// On-disk fit specification; data files are resolved against its directory.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FitFile {
    mode: FitMode,
    problem: ProblemSpec,
    unknowns: Vec<String>,
    bounds: Vec<(f64, f64)>,
    targets_file: PathBuf,
    /// Dirichlet-at-0 spectrum, two-spectra mode only.
    #[serde(default)]
    secondary_targets_file: Option<PathBuf>,
    /// Starting point (default: the values in `problem`).
    #[serde(default)]
    initial: Option<Vec<f64>>,
    #[serde(default)]
    weights: Option<(f64, f64)>,
    #[serde(default)]
    max_iter: Option<usize>,
    #[serde(default)]
    tol: Option<f64>,
    #[serde(default)]
    n_target: Option<usize>,
    #[serde(default)]
    free_jump_positions: bool,
}

#[derive(Debug, Serialize)]
struct FitReport {
    converged: bool,
    status: String,
    iterations: usize,
    initial_residual_norm: f64,
    residual_norm: f64,
    parameters: BTreeMap<String, f64>,
    problem: ProblemSpec,
}

fn run_fit(path: &Path, output: Option<&PathBuf>) -> Result<(), Failure> {
    let file: FitFile =
        serde_json::from_str(&read(path)?).map_err(|e| jumpsl::Error::ConfigParse(e.to_string()))?;
    let unknowns = file.unknowns.iter().map(|u| u.parse()).collect::<Result<Vec<Param>, _>>()?;
    let base = path.parent().unwrap_or(Path::new("."));
    let primary = read_spectrum_csv(&read(&base.join(&file.targets_file))?)?;
    let lambdas: Vec<f64> = primary.iter().map(|r| r.lambda).collect();
    let gammas: Option<Vec<f64>> = primary.iter().map(|r| r.gamma).collect();
    let mus = match &file.secondary_targets_file {
        Some(f) => Some(lambdas_from(&base.join(f))?),
        None => None,
    };
    let targets = Targets {
        lambdas,
        gammas: if file.mode == FitMode::FullSpectral { gammas } else { None },
        mus,
    };
    let mut fs = FitSpec::new(file.mode, file.problem, unknowns, file.bounds, targets);
    if let Some(w) = file.weights {
        fs.weights = w;
    }
    if let Some(m) = file.max_iter {
        fs.max_iter = m;
    }
    if let Some(t) = file.tol {
        fs.tol = t;
    }
    if let Some(n) = file.n_target {
        fs.n_target = n;
    }
    fs.free_jump_positions = file.free_jump_positions;
    fs.validate()?;
    let x0 = match file.initial {
        Some(x) => x,
        None => fs.initial_values()?,
    };
    let (result, failure) = match fit(&fs, &x0) {
        Ok(r) => (r, None),
        Err(f) => match f.best {
            Some(best) => (*best, Some(f.error)),
            None => return Err(f.error.into()),
        },
    };
    let report = FitReport {
        converged: result.converged,
        status: result.status.clone(),
        iterations: result.iterations,
        initial_residual_norm: result.initial_residual_norm,
        residual_norm: result.residual_norm,
        parameters: fs.unknowns.iter().map(|u| u.to_string()).zip(result.params.iter().copied()).collect(),
        problem: result.problem.spec().clone(),
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    emit(output, &text)?;
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}
