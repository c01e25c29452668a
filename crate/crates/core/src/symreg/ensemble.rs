//! Multi-seed ensemble runs and motif detection.
//!
//! Each seed gets a fresh 80/20 split, its own evolution, and Pareto
//! selection; the report tallies how often structural motifs appear in the
//! selected trees. Motif detection is syntactic on the tree after computing
//! multiplicative p2-degrees (products flattened, powers of p2 collected in
//! denominators), so `x / (p2 * p2)` and `(x / p2) / p2` both count as a
//! 1/p2^n term.

use super::evolve::{evolve, SymregConfig};
use super::pareto::select_pareto;
use super::tree::{BinaryOp, ExpressionTree, Feature};
use crate::dataset::{split, Dataset};
use crate::error::{Error, Result};
use crate::formula::r_squared;
use crate::rng::derive_seed;
use crate::weighted;

#[derive(Debug, Clone)]
pub struct SeedRun {
    pub seed: u64,
    pub tree: ExpressionTree,
    pub train_loss: f64,
    pub complexity: usize,
    /// Held-out R^2 (None when the test targets are constant).
    pub r2: Option<f64>,
    pub rmse: f64,
}

/// Frequencies of the tracked motifs across the ensemble's selected trees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MotifCounts {
    pub p2: usize,
    pub inv_p2_pow: usize,
    pub sigma3: usize,
    pub sigma3_over_p2_cubed: usize,
    pub p2_squared: usize,
    pub constant: usize,
}

#[derive(Debug, Clone)]
pub struct EnsembleReport {
    pub runs: Vec<SeedRun>,
    pub motifs: MotifCounts,
    pub best_r2: f64,
    pub median_r2: f64,
    pub worst_r2: f64,
}

/// Run the ensemble: one evolution per seed on fresh 80/20 splits of `ds`.
pub fn ensemble_run(ds: &Dataset, seeds: &[u64], base: &SymregConfig) -> Result<EnsembleReport> {
    if seeds.len() < 2 {
        return Err(Error::Validation("ensemble needs at least 2 seeds".into()));
    }
    let mut runs = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let (train, test) = split(ds, 0.8, derive_seed(seed, "ensemble-split", 0))?;
        let cfg = SymregConfig { seed, ..base.clone() };
        let front = evolve(&train, &cfg)?;
        let sel = select_pareto(&front)?;
        let pred: Vec<f64> = test
            .rows
            .iter()
            .map(|r| sel.tree.evaluate(r.p2, r.sigma3))
            .collect();
        let truth = test.targets();
        let w = test.weights();
        runs.push(SeedRun {
            seed,
            tree: sel.tree.clone(),
            train_loss: sel.loss,
            complexity: sel.complexity,
            r2: r_squared(&pred, &truth, &w),
            rmse: weighted::rmse(&pred, &truth, &w),
        });
    }
    let mut motifs = MotifCounts::default();
    for run in &runs {
        let m = detect_motifs(&run.tree);
        motifs.p2 += m.p2;
        motifs.inv_p2_pow += m.inv_p2_pow;
        motifs.sigma3 += m.sigma3;
        motifs.sigma3_over_p2_cubed += m.sigma3_over_p2_cubed;
        motifs.p2_squared += m.p2_squared;
        motifs.constant += m.constant;
    }
    let mut r2s: Vec<f64> = runs.iter().map(|r| r.r2.unwrap_or(f64::NEG_INFINITY)).collect();
    r2s.sort_by(f64::total_cmp);
    let best_r2 = *r2s.last().unwrap();
    let worst_r2 = r2s[0];
    let median_r2 = if r2s.len() % 2 == 1 {
        r2s[r2s.len() / 2]
    } else {
        0.5 * (r2s[r2s.len() / 2 - 1] + r2s[r2s.len() / 2])
    };
    Ok(EnsembleReport {
        runs,
        motifs,
        best_r2,
        median_r2,
        worst_r2,
    })
}

/// Motif presence in a single tree, each counted 0-or-1.
pub fn detect_motifs(tree: &ExpressionTree) -> MotifCounts {
    MotifCounts {
        p2: tree.mentions(Feature::P2) as usize,
        inv_p2_pow: has_p2_denominator(tree) as usize,
        sigma3: tree.mentions(Feature::Sigma3) as usize,
        sigma3_over_p2_cubed: has_sigma3_over_p2_cubed(tree) as usize,
        p2_squared: has_pure_p2_square(tree) as usize,
        constant: tree.has_constant() as usize,
    }
}

/// Multiplicative degree of p2 in a subtree, when well defined: products add
/// degrees, quotients subtract, sqrt halves even degrees, and sums require
/// both branches to agree. `None` means "not a pure power structure".
pub fn p2_degree(tree: &ExpressionTree) -> Option<i64> {
    match tree {
        ExpressionTree::Const(_) => Some(0),
        ExpressionTree::Var(Feature::P2) => Some(1),
        ExpressionTree::Var(Feature::Sigma3) => Some(0),
        ExpressionTree::Binary(BinaryOp::Mul, a, b) => Some(p2_degree(a)? + p2_degree(b)?),
        ExpressionTree::Binary(BinaryOp::Div, a, b) => Some(p2_degree(a)? - p2_degree(b)?),
        ExpressionTree::Binary(BinaryOp::Add | BinaryOp::Sub, a, b) => {
            let (da, db) = (p2_degree(a)?, p2_degree(b)?);
            (da == db).then_some(da)
        }
        ExpressionTree::Unary(super::tree::UnaryOp::Sqrt, a) => {
            let d = p2_degree(a)?;
            (d % 2 == 0).then_some(d / 2)
        }
        ExpressionTree::Unary(super::tree::UnaryOp::Log, a) => {
            (p2_degree(a)? == 0).then_some(0)
        }
    }
}

/// Any division whose denominator carries p2 counts as a 1/p2^n structure.
fn has_p2_denominator(tree: &ExpressionTree) -> bool {
    match tree {
        ExpressionTree::Const(_) | ExpressionTree::Var(_) => false,
        ExpressionTree::Unary(_, a) => has_p2_denominator(a),
        ExpressionTree::Binary(op, a, b) => {
            (*op == BinaryOp::Div && b.mentions(Feature::P2))
                || has_p2_denominator(a)
                || has_p2_denominator(b)
        }
    }
}

/// The mixed term: a division with sigma3 in the numerator and denominator of
/// p2-degree exactly 3.
fn has_sigma3_over_p2_cubed(tree: &ExpressionTree) -> bool {
    match tree {
        ExpressionTree::Const(_) | ExpressionTree::Var(_) => false,
        ExpressionTree::Unary(_, a) => has_sigma3_over_p2_cubed(a),
        ExpressionTree::Binary(op, a, b) => {
            (*op == BinaryOp::Div
                && a.mentions(Feature::Sigma3)
                && p2_degree(b) == Some(3))
                || has_sigma3_over_p2_cubed(a)
                || has_sigma3_over_p2_cubed(b)
        }
    }
}

/// A product subtree that is exactly p2^2 (no sigma3 involvement).
fn has_pure_p2_square(tree: &ExpressionTree) -> bool {
    let here = matches!(tree, ExpressionTree::Binary(BinaryOp::Mul, _, _))
        && !tree.mentions(Feature::Sigma3)
        && p2_degree(tree) == Some(2);
    if here {
        return true;
    }
    match tree {
        ExpressionTree::Const(_) | ExpressionTree::Var(_) => false,
        ExpressionTree::Unary(_, a) => has_pure_p2_square(a),
        ExpressionTree::Binary(_, a, b) => has_pure_p2_square(a) || has_pure_p2_square(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> ExpressionTree {
        ExpressionTree::parse(s).unwrap()
    }

    #[test]
    fn motif_detection_on_hand_trees() {
        let m = detect_motifs(&t("(+ (/ 1.5 (* p2 p2)) (* 0.3 sigma3))"));
        assert_eq!(m.p2, 1);
        assert_eq!(m.inv_p2_pow, 1);
        assert_eq!(m.sigma3, 1);
        assert_eq!(m.constant, 1);
        assert_eq!(m.sigma3_over_p2_cubed, 0);

        let m = detect_motifs(&t("(/ sigma3 (* p2 (* p2 p2)))"));
        assert_eq!(m.sigma3_over_p2_cubed, 1);
        assert_eq!(m.inv_p2_pow, 1);

        // nested divisions collect denominators: (sigma3 / p2) / (p2 * p2)
        assert_eq!(p2_degree(&t("(/ (/ sigma3 p2) (* p2 p2))")), Some(-3));

        let m = detect_motifs(&t("(* p2 p2)"));
        assert_eq!(m.p2_squared, 1);
        let m = detect_motifs(&t("(* p2 sigma3)"));
        assert_eq!(m.p2_squared, 0);

        let m = detect_motifs(&t("p2"));
        assert_eq!(
            (m.p2, m.sigma3, m.constant, m.inv_p2_pow),
            (1, 0, 0, 0)
        );
    }

    #[test]
    fn degree_arithmetic() {
        assert_eq!(p2_degree(&t("(sqrt (* p2 p2))")), Some(1));
        assert_eq!(p2_degree(&t("(sqrt p2)")), None);
        assert_eq!(p2_degree(&t("(+ p2 (* 2 p2))")), Some(1));
        assert_eq!(p2_degree(&t("(+ p2 (* p2 p2))")), None);
        assert_eq!(p2_degree(&t("(log p2)")), None);
        assert_eq!(p2_degree(&t("(log sigma3)")), Some(0));
    }
}
