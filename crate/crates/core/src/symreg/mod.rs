//! Genetic-programming symbolic regression over the gauge-invariant features
//! (p2, sigma3): protected expression trees, tournament evolution with a
//! complexity cap, Pareto-front archives, the selection criterion
//! 0.7 L + 0.3 C/30, and multi-seed ensemble analysis with motif counting.

mod ensemble;
mod evolve;
mod pareto;
mod tree;

pub use ensemble::{detect_motifs, ensemble_run, p2_degree, EnsembleReport, MotifCounts, SeedRun};
pub use evolve::{evolve, SymregConfig};
pub use pareto::{pareto_score, select_pareto, ParetoEntry, ParetoFront, COMPLEXITY_CAP};
pub use tree::{BinaryOp, ExpressionTree, Feature, UnaryOp};
