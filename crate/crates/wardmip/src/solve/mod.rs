//! Exact optimisation: LP relaxations via a bounded-variable primal
//! simplex, 0-1 optima via branch-and-bound, and a brute-force reference
//! enumerator for cross-checking on tiny instances.

mod branch_bound;
mod brute;
mod simplex;

pub use branch_bound::solve_ilp;
pub use brute::brute_force;
pub use simplex::{solve_lp, LpResult, LpStatus};


use crate::model::InstanceError;
use std::time::Duration;

/// Variable-selection rule for branching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchRule {
    /// Branch on the column whose fractional part is closest to one half;
    /// ties go to the lowest column index.
    #[default]
    MostFractional,
}

/// Which open node branch-and-bound explores next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NodeSelection {
    /// Pop the node with the best parent bound; ties go to the oldest
    /// (first-created) node.
    #[default]
    BestBound,
}

/// Solver knobs. `Default` gives the documented tolerances and no limits.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Row/bound satisfaction tolerance.
    pub feasibility_tol: f64,
    /// Distance from an integer below which a value counts as integral.
    pub integrality_tol: f64,
    /// Absolute optimality gap accepted on integer-valued objectives.
    pub optimality_abs_tol: f64,
    /// Relative optimality gap accepted on general objectives.
    pub optimality_rel_tol: f64,
    /// Stop after this many branch-and-bound nodes.
    pub node_limit: Option<u64>,
    /// Stop after roughly this much wall time.
    pub time_limit: Option<Duration>,
    pub branch_rule: BranchRule,
    pub node_selection: NodeSelection,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            feasibility_tol: 1e-7,
            integrality_tol: 1e-6,
            optimality_abs_tol: 1e-9,
            optimality_rel_tol: 1e-6,
            node_limit: None,
            time_limit: None,
            branch_rule: BranchRule::MostFractional,
            node_selection: NodeSelection::BestBound,
        }
    }
}

/// Outcome class of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Incumbent proved optimal (tree exhausted or gap closed).
    Optimal,
    /// No feasible 0-1 assignment exists (tree exhausted without one).
    Infeasible,
    /// Node or time limit hit first; `objective`/`bound` bracket the optimum.
    LimitReached,
}

/// Search effort counters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolveStats {
    /// Branch-and-bound nodes whose relaxation was solved (or candidates
    /// enumerated, for the brute-force solver).
    pub nodes: u64,
    pub simplex_iterations: u64,
    pub wall_time: Duration,
}

/// Result of an exact solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Best integer solution found: one value per model column
    /// (assignment block first, then penalty columns).
    pub incumbent: Option<Vec<f64>>,
    /// Objective of the incumbent, constant included.
    pub objective: Option<f64>,
    /// Best proved bound on the optimum. Equals `objective` when optimal.
    pub bound: Option<f64>,
    pub stats: SolveStats,
}

/// Hard failures. Numerical trouble is reported, never papered over.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("numerical failure in the simplex engine: {0}")]
    Numerical(String),
    #[error("instance fails structural validation: {0:?}")]
    InvalidInstance(Vec<InstanceError>),
    #[error(
        "brute force refused: {combinations:.3e} candidate assignments exceed the {limit:.0e} cap"
    )]
    SearchSpaceTooLarge { combinations: f64, limit: f64 },
}
