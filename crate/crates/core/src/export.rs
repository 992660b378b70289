//! Text formats: spectrum CSV/JSON and m-function samples.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::{Certification, SpectralData};
use crate::weyl::WeylSample;

/// Shortest-form rendering with 17 significant digits (`%.17g`).
pub fn fmt_g17(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        let m = trim_zeros(mantissa.to_string());
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// `rho` as a real number, or `<t>i` when purely imaginary.
pub fn fmt_rho(rho: Complex64) -> String {
    if rho.re == 0.0 && rho.im != 0.0 {
        format!("{}i", fmt_g17(rho.im))
    } else if rho.im == 0.0 {
        fmt_g17(rho.re)
    } else {
        format!("{}{}{}i", fmt_g17(rho.re), if rho.im < 0.0 { "" } else { "+" }, fmt_g17(rho.im))
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_g17).unwrap_or_default()
}

pub const SPECTRUM_HEADER: &str = "n,lambda,rho,gamma,beta,certification";

/// Spectrum CSV; eigenparameter data gets an extra `variant` column.
pub fn spectrum_csv(sd: &SpectralData) -> String {
    let variant = sd.variant == "eigenparameter";
    let mut out = String::from(SPECTRUM_HEADER);
    if variant {
        out.push_str(",variant");
    }
    out.push('\n');
    for r in &sd.records {
        out.push_str(&format!(
            "{},{},{},{},{},{}",
            r.n,
            fmt_g17(r.lambda),
            fmt_rho(r.rho),
            opt(r.gamma),
            opt(r.beta),
            r.certification.as_str()
        ));
        if variant {
            out.push(',');
            out.push_str(&sd.variant);
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub n: usize,
    pub lambda: f64,
    pub rho: String,
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    pub certification: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDocument {
    pub fingerprint: String,
    pub variant: String,
    pub records: Vec<SpectrumRow>,
}

/// JSON mirror of [`spectrum_csv`].
pub fn spectrum_json(sd: &SpectralData) -> String {
    let doc = SpectrumDocument {
        fingerprint: sd.fingerprint.clone(),
        variant: sd.variant.clone(),
        records: sd
            .records
            .iter()
            .map(|r| SpectrumRow {
                n: r.n,
                lambda: r.lambda,
                rho: fmt_rho(r.rho),
                gamma: r.gamma,
                beta: r.beta,
                certification: r.certification.as_str().to_string(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("document serializes");
    s.push('\n');
    s
}

/// Parse a spectrum CSV (as written by [`spectrum_csv`]).
pub fn read_spectrum_csv(text: &str) -> Result<Vec<SpectrumRow>> {
    let err = |line: usize, what: &str| Error::ConfigParse(format!("spectrum CSV line {line}: {what}"));
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| err(1, "empty file"))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let find = |name: &str| cols.iter().position(|c| *c == name);
    let (Some(ni), Some(li)) = (find("n"), find("lambda")) else {
        return Err(err(1, "header must contain n and lambda"));
    };
    let (ri, gi, bi, ci) = (find("rho"), find("gamma"), find("beta"), find("certification"));
    let mut rows = Vec::new();
    for (i, line) in lines {
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        let get = |k: Option<usize>| k.and_then(|k| f.get(k).copied()).unwrap_or("");
        let num = |k: Option<usize>| -> Result<Option<f64>> {
            let s = get(k);
            if s.is_empty() {
                return Ok(None);
            }
            s.parse().map(Some).map_err(|_| err(i + 1, &format!("bad number `{s}`")))
        };
        rows.push(SpectrumRow {
            n: get(Some(ni)).parse().map_err(|_| err(i + 1, "bad index"))?,
            lambda: num(Some(li))?.ok_or_else(|| err(i + 1, "missing lambda"))?,
            rho: get(ri).to_string(),
            gamma: num(gi)?,
            beta: num(bi)?,
            certification: get(ci).to_string(),
        });
    }
    for (k, r) in rows.iter().enumerate() {
        if r.n != k {
            return Err(err(k + 2, "indices must run 0, 1, 2, ..."));
        }
    }
    Ok(rows)
}

pub const M_HEADER: &str = "re_lambda,im_lambda,re_m,im_m";

pub fn m_csv(samples: &[WeylSample]) -> String {
    let mut out = format!("{M_HEADER}\n");
    for s in samples {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_g17(s.lambda.re),
            fmt_g17(s.lambda.im),
            fmt_g17(s.m.re),
            fmt_g17(s.m.im)
        ));
    }
    out
}

impl std::str::FromStr for Certification {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bracketed" => Ok(Certification::Bracketed),
            "contour-verified" => Ok(Certification::ContourVerified),
            _ => Err(Error::ConfigParse(format!("unknown certification `{s}`"))),
        }
    }
}
