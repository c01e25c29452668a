//! Teacher model persistence.
//!
//! Self-describing text format; floats are written with Rust's shortest
//! round-trip representation so save/load is bit-exact.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::basis::MonomialBasis;
use super::TeacherModel;
use crate::error::{Error, Result};
use crate::geometry::ModulusPsi;
use crate::linalg::{is_positive_definite, max_hermitian_defect};

pub fn save_teacher(path: &Path, model: &TeacherModel, extra_header: &[String]) -> Result<()> {
    let mut out = String::new();
    out.push_str("# teacher model v1\n");
    for line in extra_header {
        out.push_str(&format!("# {line}\n"));
    }
    out.push_str(&format!("k {}\n", model.basis.k));
    out.push_str(&format!("psi {}\n", model.psi.value()));
    out.push_str(&format!("n {}\n", model.basis.len()));
    match model.sigma {
        Some(s) => out.push_str(&format!("sigma {s}\n")),
        None => out.push_str("sigma none\n"),
    }
    out.push_str("history");
    for s in &model.sigma_history {
        out.push_str(&format!(" {s}"));
    }
    out.push('\n');
    out.push_str("begin exponents\n");
    for e in &model.basis.exponents {
        out.push_str(&format!("{} {} {} {} {}\n", e[0], e[1], e[2], e[3], e[4]));
    }
    out.push_str("end exponents\n");
    out.push_str("begin h\n");
    let n = model.basis.len();
    for r in 0..n {
        for c in 0..n {
            let v = model.h[(r, c)];
            out.push_str(&format!("{} {}\n", v.re, v.im));
        }
    }
    out.push_str("end h\n");
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn load_teacher(path: &Path) -> Result<TeacherModel> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let mut next_data = |what: &str| -> Result<String> {
        loop {
            match lines.next() {
                Some(Ok(l)) if l.starts_with('#') || l.is_empty() => continue,
                Some(Ok(l)) => return Ok(l),
                Some(Err(e)) => return Err(Error::io(path, e)),
                None => return Err(Error::parse(path, format!("missing {what}"))),
            }
        }
    };
    let field = |line: String, key: &str| -> Result<String> {
        line.strip_prefix(key)
            .and_then(|r| r.strip_prefix(' '))
            .map(str::to_owned)
            .ok_or_else(|| Error::parse(path, format!("expected '{key} ...', got '{line}'")))
    };
    let k: usize = field(next_data("k")?, "k")?
        .parse()
        .map_err(|_| Error::parse(path, "bad k"))?;
    let psi_val: f64 = field(next_data("psi")?, "psi")?
        .parse()
        .map_err(|_| Error::parse(path, "bad psi"))?;
    let n: usize = field(next_data("n")?, "n")?
        .parse()
        .map_err(|_| Error::parse(path, "bad n"))?;
    let sigma_raw = field(next_data("sigma")?, "sigma")?;
    let sigma = if sigma_raw == "none" {
        None
    } else {
        Some(
            sigma_raw
                .parse::<f64>()
                .map_err(|_| Error::parse(path, "bad sigma"))?,
        )
    };
    let hist_line = next_data("history")?;
    let hist_body = hist_line
        .strip_prefix("history")
        .ok_or_else(|| Error::parse(path, "expected history line"))?;
    let sigma_history: Vec<f64> = hist_body
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| Error::parse(path, "bad history value")))
        .collect::<Result<_>>()?;

    if next_data("begin exponents")? != "begin exponents" {
        return Err(Error::parse(path, "expected 'begin exponents'"));
    }
    let mut exponents = Vec::with_capacity(n);
    loop {
        let line = next_data("exponent row")?;
        if line == "end exponents" {
            break;
        }
        let vals: Vec<u8> = line
            .split_whitespace()
            .map(|t| t.parse::<u8>().map_err(|_| Error::parse(path, "bad exponent")))
            .collect::<Result<_>>()?;
        if vals.len() != 5 {
            return Err(Error::parse(path, "exponent rows need 5 entries"));
        }
        exponents.push([vals[0], vals[1], vals[2], vals[3], vals[4]]);
    }
    let expected = MonomialBasis::new(k);
    if exponents != expected.exponents || exponents.len() != n {
        return Err(Error::parse(
            path,
            format!("exponent table does not match the degree-{k} basis"),
        ));
    }

    if next_data("begin h")? != "begin h" {
        return Err(Error::parse(path, "expected 'begin h'"));
    }
    let mut h = DMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let line = next_data("h entry")?;
            let mut it = line.split_whitespace();
            let re: f64 = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::parse(path, "bad h entry"))?;
            let im: f64 = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::parse(path, "bad h entry"))?;
            h[(r, c)] = Complex64::new(re, im);
        }
    }
    if next_data("end h")? != "end h" {
        return Err(Error::parse(path, "expected 'end h'"));
    }

    if max_hermitian_defect(&h) > 1e-12 * h.norm().max(1.0) {
        return Err(Error::Numerical("loaded H is not Hermitian".into()));
    }
    if !is_positive_definite(&h) {
        return Err(Error::Numerical("loaded H is not positive definite".into()));
    }
    Ok(TeacherModel {
        basis: expected,
        h,
        psi: ModulusPsi::new(psi_val)?,
        sigma,
        sigma_history,
    })
}
