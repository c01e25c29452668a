//! The regression dataset: gauge-invariant features paired with the
//! log-determinant target y = log(det g_alg / det g_FS), plus deterministic
//! train/test splitting and a columnar text format.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::donaldson::{log_det_ratio, TeacherModel};
use crate::error::{Error, Result};
use crate::geometry::{features, QuinticPoint};
use crate::rng::derive_rng;

/// One observation: features, target, Monte Carlo weight. All downstream
/// fits are weighted least squares with these weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionRow {
    pub p2: f64,
    pub p3: f64,
    pub sigma3: f64,
    pub y: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub rows: Vec<RegressionRow>,
    pub psi: f64,
    pub teacher_k: usize,
    pub split_seed: u64,
    /// Points dropped for chart failures during construction.
    pub dropped: usize,
}

impl Dataset {
    /// Bare dataset from rows, for synthetic/planted data in tests and
    /// statistical experiments.
    pub fn from_rows(rows: Vec<RegressionRow>, psi: f64, teacher_k: usize) -> Self {
        Dataset {
            rows,
            psi,
            teacher_k,
            split_seed: 0,
            dropped: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn targets(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.y).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.weight).collect()
    }
}

/// Pair each point with its target under the given teacher. Points whose
/// chart degenerates are dropped; more than 0.1% drops is an error.
pub fn build_dataset(teacher: &TeacherModel, points: &[QuinticPoint]) -> Result<Dataset> {
    if points.is_empty() {
        return Err(Error::Validation("no points to build a dataset from".into()));
    }
    let evals: Vec<std::result::Result<RegressionRow, bool>> = points
        .par_iter()
        .map(|p| match log_det_ratio(p, teacher) {
            Ok(y) => {
                let f = features(p);
                Ok(RegressionRow {
                    p2: f.p2,
                    p3: f.p3,
                    sigma3: f.sigma3,
                    y,
                    weight: p.weight,
                })
            }
            Err(e) if e.is_chart_failure() => Err(true),
            Err(_) => Err(false),
        })
        .collect();
    let mut rows = Vec::with_capacity(points.len());
    let mut dropped = 0usize;
    for e in evals {
        match e {
            Ok(row) => rows.push(row),
            Err(true) => dropped += 1,
            Err(false) => {
                return Err(Error::Numerical(
                    "teacher evaluation failed while building dataset".into(),
                ))
            }
        }
    }
    if (dropped as f64) >= 0.001 * points.len() as f64 && dropped > 0 {
        return Err(Error::Numerical(format!(
            "{dropped} of {} points dropped to chart failures (limit 0.1%)",
            points.len()
        )));
    }
    Ok(Dataset {
        rows,
        psi: teacher.psi.value(),
        teacher_k: teacher.basis.k,
        split_seed: 0,
        dropped,
    })
}

/// Deterministic disjoint split: a seeded shuffle, then the first
/// floor(fraction * n) rows form the training set.
pub fn split(ds: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Validation(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let mut idx: Vec<usize> = (0..ds.rows.len()).collect();
    let mut rng = derive_rng(seed, "split", 0);
    idx.shuffle(&mut rng);
    let cut = (train_fraction * ds.rows.len() as f64).floor() as usize;
    let make = |indices: &[usize]| Dataset {
        rows: indices.iter().map(|&i| ds.rows[i]).collect(),
        psi: ds.psi,
        teacher_k: ds.teacher_k,
        split_seed: seed,
        dropped: 0,
    };
    Ok((make(&idx[..cut]), make(&idx[cut..])))
}

// ─── columnar text format ────────────────────────────────────────────────

pub fn write_dataset(
    path: &Path,
    ds: &Dataset,
    teacher_hash: &str,
    extra_header: &[String],
) -> Result<()> {
    let mut out = String::new();
    out.push_str("# regression dataset v1\n");
    out.push_str(&format!(
        "# psi: {}\n# teacher_k: {}\n# teacher_hash: {}\n# dropped: {}\n",
        ds.psi, ds.teacher_k, teacher_hash, ds.dropped
    ));
    for line in extra_header {
        out.push_str(&format!("# {line}\n"));
    }
    out.push_str("# columns: p2 p3 sigma3 y weight\n");
    for r in &ds.rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            r.p2, r.p3, r.sigma3, r.y, r.weight
        ));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rows = Vec::new();
    let mut psi = 0.0f64;
    let mut teacher_k = 0usize;
    let mut dropped = 0usize;
    for (ln, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if let Some(rest) = line.strip_prefix("# psi: ") {
            psi = rest
                .parse()
                .map_err(|_| Error::parse(path, "bad psi header"))?;
            continue;
        }
        if let Some(rest) = line.strip_prefix("# teacher_k: ") {
            teacher_k = rest
                .parse()
                .map_err(|_| Error::parse(path, "bad teacher_k header"))?;
            continue;
        }
        if let Some(rest) = line.strip_prefix("# dropped: ") {
            dropped = rest
                .parse()
                .map_err(|_| Error::parse(path, "bad dropped header"))?;
            continue;
        }
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 5 {
            return Err(Error::parse(path, format!("line {}: expected 5 columns", ln + 1)));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::parse(path, format!("line {}: bad float '{s}'", ln + 1)))
        };
        rows.push(RegressionRow {
            p2: num(f[0])?,
            p3: num(f[1])?,
            sigma3: num(f[2])?,
            y: num(f[3])?,
            weight: num(f[4])?,
        });
    }
    Ok(Dataset {
        rows,
        psi,
        teacher_k,
        split_seed: 0,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::donaldson::TeacherModel;
    use crate::geometry::{sample_quintic, ModulusPsi};

    #[test]
    fn identity_teacher_gives_zero_targets() {
        let model = TeacherModel::fubini_study(3, ModulusPsi::fermat()).unwrap();
        let pts = sample_quintic(ModulusPsi::fermat(), 120, 31).unwrap();
        let ds = build_dataset(&model, &pts).unwrap();
        assert_eq!(ds.len(), 120);
        for r in &ds.rows {
            assert!(r.y.abs() < 1e-8, "y = {}", r.y);
        }
    }

    #[test]
    fn row_features_match_recomputation_bit_exactly() {
        let model = TeacherModel::fubini_study(2, ModulusPsi::fermat()).unwrap();
        let pts = sample_quintic(ModulusPsi::fermat(), 50, 32).unwrap();
        let ds = build_dataset(&model, &pts).unwrap();
        for (r, p) in ds.rows.iter().zip(&pts) {
            let f = crate::geometry::features(p);
            assert_eq!(r.p2, f.p2);
            assert_eq!(r.p3, f.p3);
            assert_eq!(r.sigma3, f.sigma3);
            assert_eq!(r.weight, p.weight);
        }
    }

    fn toy_dataset(n: usize) -> Dataset {
        let rows = (0..n)
            .map(|i| RegressionRow {
                p2: 0.2 + 0.6 * (i as f64) / n as f64,
                p3: 0.04,
                sigma3: 0.04,
                y: i as f64,
                weight: 1.0,
            })
            .collect();
        Dataset::from_rows(rows, 0.0, 3)
    }

    #[test]
    fn split_sizes_and_determinism() {
        let ds = toy_dataset(100);
        let (tr, te) = split(&ds, 0.8, 9).unwrap();
        assert_eq!(tr.len(), 80);
        assert_eq!(te.len(), 20);
        let (tr2, te2) = split(&ds, 0.8, 9).unwrap();
        assert_eq!(tr.rows, tr2.rows);
        assert_eq!(te.rows, te2.rows);
    }

    #[test]
    fn split_union_restores_multiset() {
        let ds = toy_dataset(57);
        let (tr, te) = split(&ds, 0.8, 123).unwrap();
        let mut all: Vec<f64> = tr.rows.iter().chain(te.rows.iter()).map(|r| r.y).collect();
        all.sort_by(f64::total_cmp);
        let mut orig: Vec<f64> = ds.rows.iter().map(|r| r.y).collect();
        orig.sort_by(f64::total_cmp);
        assert_eq!(all, orig);
        // disjoint: y values are unique in the toy set
        for r in &tr.rows {
            assert!(!te.rows.iter().any(|s| s.y == r.y));
        }
    }

    #[test]
    fn bad_fraction_rejected() {
        let ds = toy_dataset(10);
        assert!(split(&ds, 0.0, 1).is_err());
        assert!(split(&ds, 1.0, 1).is_err());
    }

    #[test]
    fn dataset_file_roundtrip() {
        let ds = toy_dataset(23);
        let dir = std::env::temp_dir().join(format!("cydistill-ds-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ds.tsv");
        write_dataset(&path, &ds, "abc123", &[]).unwrap();
        let back = read_dataset(&path).unwrap();
        assert_eq!(ds.rows, back.rows);
        assert_eq!(ds.psi, back.psi);
        assert_eq!(ds.teacher_k, back.teacher_k);
        std::fs::remove_dir_all(&dir).ok();
    }
}
