//! Pareto fronts over (loss, complexity) and the selection criterion
//! score = 0.7 L + 0.3 C / C_max with C_max = 30.

use super::tree::ExpressionTree;
use crate::error::{Error, Result};

pub const SELECT_LOSS_WEIGHT: f64 = 0.7;
pub const SELECT_COMPLEXITY_WEIGHT: f64 = 0.3;
pub const COMPLEXITY_CAP: f64 = 30.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ParetoEntry {
    pub tree: ExpressionTree,
    pub loss: f64,
    pub complexity: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParetoFront {
    /// Nondominated entries sorted by complexity ascending (loss strictly
    /// decreasing).
    pub entries: Vec<ParetoEntry>,
}

impl ParetoFront {
    /// Skyline-filter arbitrary entries into a nondominated, C-sorted front.
    pub fn from_entries(mut entries: Vec<ParetoEntry>) -> Self {
        entries.sort_by(|a, b| {
            a.complexity
                .cmp(&b.complexity)
                .then(a.loss.total_cmp(&b.loss))
        });
        let mut out: Vec<ParetoEntry> = Vec::new();
        for e in entries {
            match out.last() {
                Some(last) if last.complexity == e.complexity => continue,
                Some(last) if e.loss >= last.loss => continue,
                _ => out.push(e),
            }
        }
        ParetoFront { entries: out }
    }

    pub fn is_nondominated_and_sorted(&self) -> bool {
        self.entries.windows(2).all(|w| {
            w[0].complexity < w[1].complexity && w[0].loss > w[1].loss
        })
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn pareto_score(loss: f64, complexity: usize) -> f64 {
    SELECT_LOSS_WEIGHT * loss + SELECT_COMPLEXITY_WEIGHT * complexity as f64 / COMPLEXITY_CAP
}

/// The entry minimizing the Pareto criterion. Score ties (to a 1e-12 relative
/// margin) break toward smaller complexity, then lower loss.
pub fn select_pareto(front: &ParetoFront) -> Result<&ParetoEntry> {
    if front.is_empty() {
        return Err(Error::Validation("cannot select from an empty front".into()));
    }
    let mut best = &front.entries[0];
    let mut best_score = pareto_score(best.loss, best.complexity);
    for e in &front.entries[1..] {
        let score = e_score_cmp(e);
        let tol = 1e-12 * best_score.abs().max(score.abs()).max(1e-300);
        if score < best_score - tol {
            best = e;
            best_score = score;
        } else if (score - best_score).abs() <= tol {
            let better_tie = e.complexity < best.complexity
                || (e.complexity == best.complexity && e.loss < best.loss);
            if better_tie {
                best = e;
                best_score = score;
            }
        }
    }
    Ok(best)
}

fn e_score_cmp(e: &ParetoEntry) -> f64 {
    pareto_score(e.loss, e.complexity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symreg::tree::Feature;

    fn entry(loss: f64, complexity: usize) -> ParetoEntry {
        ParetoEntry {
            tree: ExpressionTree::Var(Feature::P2),
            loss,
            complexity,
        }
    }

    #[test]
    fn worked_selection_example() {
        let front = ParetoFront::from_entries(vec![
            entry(0.10, 3),
            entry(0.01, 15),
            entry(0.50, 1),
        ]);
        assert!(front.is_nondominated_and_sorted());
        assert_eq!(front.entries.len(), 3);
        let scores: Vec<f64> = front
            .entries
            .iter()
            .map(|e| pareto_score(e.loss, e.complexity))
            .collect();
        // sorted by complexity: C=1 -> 0.360, C=3 -> 0.100, C=15 -> 0.157
        assert!((scores[0] - 0.360).abs() < 1e-12);
        assert!((scores[1] - 0.100).abs() < 1e-12);
        assert!((scores[2] - 0.157).abs() < 1e-12);
        let sel = select_pareto(&front).unwrap();
        assert_eq!((sel.loss, sel.complexity), (0.10, 3));
    }

    #[test]
    fn single_entry_selected() {
        let front = ParetoFront::from_entries(vec![entry(0.4, 7)]);
        assert_eq!(select_pareto(&front).unwrap().complexity, 7);
    }

    #[test]
    fn score_tie_prefers_smaller_complexity() {
        // craft an exact tie: pick losses so both scores equal 0.3
        let l_small = (0.3 - SELECT_COMPLEXITY_WEIGHT * 5.0 / COMPLEXITY_CAP) / SELECT_LOSS_WEIGHT;
        let l_large = (0.3 - SELECT_COMPLEXITY_WEIGHT * 20.0 / COMPLEXITY_CAP) / SELECT_LOSS_WEIGHT;
        let front = ParetoFront::from_entries(vec![entry(l_small, 5), entry(l_large, 20)]);
        let s1 = pareto_score(l_small, 5);
        let s2 = pareto_score(l_large, 20);
        assert!((s1 - s2).abs() <= 1e-12 * s1.abs());
        assert_eq!(select_pareto(&front).unwrap().complexity, 5);
    }

    #[test]
    fn dominated_entries_pruned() {
        let front = ParetoFront::from_entries(vec![
            entry(0.5, 1),
            entry(0.6, 2), // dominated by C=1
            entry(0.4, 2),
            entry(0.4, 3), // dominated by C=2
            entry(0.1, 9),
        ]);
        assert!(front.is_nondominated_and_sorted());
        let cs: Vec<usize> = front.entries.iter().map(|e| e.complexity).collect();
        assert_eq!(cs, vec![1, 2, 9]);
    }
}
