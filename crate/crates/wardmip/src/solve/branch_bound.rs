//! Exact 0-1 search: best-bound branch and bound over the LP relaxation.
//!
//! Each node fixes a subset of the integral columns to 0 or 1 and solves
//! the LP relaxation under those bounds with the shared
//! [`SimplexContext`]. Nodes are explored best-bound-first (ties go to
//! the older node), branching on the most fractional column (ties go to
//! the lowest column index), with the down branch enqueued before the up
//! branch. All of this is deterministic, so a given model always yields
//! the same search tree.
//!
//! Incumbent objectives are recomputed from the rounded assignment via
//! [`IlpModel::objective_value`] rather than trusted from the LP, so the
//! reported optimum is exact whenever the weights are exactly
//! representable. When every objective coefficient is an integer, bounds
//! are tightened to the nearest integer before pruning, which makes the
//! search provably exact rather than exact-up-to-tolerance.

use std::collections::BinaryHeap;
use std::time::Instant;

use super::simplex::{LpStatus, SimplexContext};
use super::{SolveError, SolveResult, SolveStats, SolveStatus, SolverConfig};
use crate::compile::{IlpModel, ObjectiveSense};

/// A subproblem: the root with `fixes` applied as hard bounds.
#[derive(Debug, Clone)]
struct Node {
    /// `(column, value)` pairs fixed on the path from the root.
    fixes: Vec<(usize, f64)>,
    /// Parent LP bound in the user's objective sense.
    bound: f64,
}

/// Heap key ordering nodes best-bound-first, then oldest-first.
#[derive(Debug, Clone, Copy)]
struct NodeKey {
    /// Bound normalised so that smaller is always better.
    score: f64,
    id: u64,
}

impl PartialEq for NodeKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}
impl Eq for NodeKey {}
impl PartialOrd for NodeKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for NodeKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // BinaryHeap pops the maximum; invert so the smallest score (and
        // on ties the smallest id) comes out first.
        other
            .score
            .total_cmp(&self.score)
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Solve a compiled 0-1 model to proven optimality.
pub fn solve_ilp(model: &IlpModel, config: &SolverConfig) -> Result<SolveResult, SolveError> {
    let start = Instant::now();
    let maximize = model.objective_sense == ObjectiveSense::Maximize;
    let ctx = SimplexContext::new(model);

    // Integer objective data admits exact bound tightening.
    let integral_objective = model
        .columns
        .iter()
        .map(|c| c.objective)
        .chain(std::iter::once(model.objective_constant))
        .all(|c| c.is_finite() && (c - c.round()).abs() <= 1e-9);

    let tighten = |bound: f64| -> f64 {
        if !integral_objective || !bound.is_finite() {
            return bound;
        }
        if maximize {
            (bound + 1e-6).floor()
        } else {
            (bound - 1e-6).ceil()
        }
    };
    // Strict-improvement margin used when pruning against the incumbent.
    let margin = |incumbent: f64| -> f64 {
        if integral_objective {
            config.optimality_abs_tol
        } else {
            config
                .optimality_abs_tol
                .max(config.optimality_rel_tol * incumbent.abs())
        }
    };
    let worth_exploring = |bound: f64, incumbent: Option<f64>| -> bool {
        let Some(inc) = incumbent else { return true };
        let b = tighten(bound);
        if maximize {
            b > inc + margin(inc)
        } else {
            b < inc - margin(inc)
        }
    };
    let to_score = |bound: f64| if maximize { -bound } else { bound };

    let mut nodes: Vec<Node> = Vec::new();
    let mut heap: BinaryHeap<NodeKey> = BinaryHeap::new();
    nodes.push(Node {
        fixes: Vec::new(),
        bound: if maximize { f64::INFINITY } else { f64::NEG_INFINITY },
    });
    heap.push(NodeKey { score: f64::NEG_INFINITY, id: 0 });

    let mut incumbent: Option<Vec<f64>> = None;
    let mut incumbent_obj: Option<f64> = None;
    let mut stats = SolveStats::default();
    let mut limit_hit = false;
    let mut overrides: Vec<(usize, f64, f64)> = Vec::new();

    while let Some(key) = heap.pop() {
        if config.node_limit.is_some_and(|cap| stats.nodes >= cap)
            || config.time_limit.is_some_and(|cap| start.elapsed() >= cap)
        {
            limit_hit = true;
            // Put the key back so the reported bound covers this node.
            heap.push(key);
            break;
        }
        let node = &nodes[key.id as usize];
        if !worth_exploring(node.bound, incumbent_obj) {
            continue;
        }

        overrides.clear();
        overrides.extend(node.fixes.iter().map(|&(c, v)| (c, v, v)));
        let node_bound = node.bound;

        stats.nodes += 1;
        let lp = ctx.solve(&overrides, config)?;
        stats.simplex_iterations += lp.iterations;
        match lp.status {
            LpStatus::Infeasible => {
                if key.id == 0 {
                    let tags: Vec<String> = lp
                        .violated_rows
                        .iter()
                        .map(|&i| model.rows[i].tag.to_string())
                        .collect();
                    log::debug!("root relaxation infeasible; stuck rows: {}", tags.join(", "));
                }
                continue;
            }
            LpStatus::Unbounded => {
                return Err(SolveError::Numerical(
                    "relaxation unbounded over a finite box".into(),
                ));
            }
            LpStatus::Optimal => {}
        }
        // The child bound can never beat the parent's; clamp out LP noise.
        let bound = if maximize {
            lp.objective.min(node_bound)
        } else {
            lp.objective.max(node_bound)
        };
        if !worth_exploring(bound, incumbent_obj) {
            continue;
        }

        // Most fractional integral column, ties to the lowest index.
        let mut branch: Option<(usize, f64)> = None; // (column, |frac − ½|)
        for (j, col) in model.columns.iter().enumerate() {
            if !col.integral {
                continue;
            }
            let v = lp.values[j];
            if (v - v.round()).abs() <= config.integrality_tol {
                continue;
            }
            let dist = (v - v.floor() - 0.5).abs();
            if branch.map_or(true, |(_, best)| dist < best - 1e-12) {
                branch = Some((j, dist));
            }
        }

        match branch {
            None => {
                // Integral: round, rebuild the penalty block exactly, and
                // score by a direct dot product.
                let mut assignment: Vec<f64> = lp.values[..model.n_assignment]
                    .iter()
                    .map(|v| v.round())
                    .collect();
                for v in assignment.iter_mut() {
                    *v = v.clamp(0.0, 1.0);
                }
                let full = model.extend_with_penalties(&assignment);
                let obj = model.objective_value(&full);
                let better = match incumbent_obj {
                    None => true,
                    Some(inc) => {
                        if maximize {
                            obj > inc + margin(inc)
                        } else {
                            obj < inc - margin(inc)
                        }
                    }
                };
                if better {
                    incumbent = Some(full);
                    incumbent_obj = Some(obj);
                }
            }
            Some((col, _)) => {
                let parent_fixes = nodes[key.id as usize].fixes.clone();
                for value in [0.0, 1.0] {
                    let mut fixes = parent_fixes.clone();
                    fixes.push((col, value));
                    let id = nodes.len() as u64;
                    nodes.push(Node { fixes, bound });
                    heap.push(NodeKey { score: to_score(bound), id });
                }
            }
        }
    }

    stats.wall_time = start.elapsed();

    // Global bound: best open-node bound merged with the incumbent.
    let open_bound = heap
        .iter()
        .map(|k| if maximize { -k.score } else { k.score })
        .fold(None::<f64>, |acc, b| {
            Some(match acc {
                None => b,
                Some(a) => {
                    if maximize {
                        a.max(b)
                    } else {
                        a.min(b)
                    }
                }
            })
        });

    if limit_hit {
        let bound = match (open_bound, incumbent_obj) {
            (Some(b), Some(inc)) => Some(if maximize { b.max(inc) } else { b.min(inc) }),
            (Some(b), None) => Some(b),
            (None, inc) => inc,
        };
        return Ok(SolveResult {
            status: SolveStatus::LimitReached,
            incumbent,
            objective: incumbent_obj,
            bound,
            stats,
        });
    }

    match incumbent {
        Some(values) => Ok(SolveResult {
            status: SolveStatus::Optimal,
            incumbent: Some(values),
            objective: incumbent_obj,
            // The tree is exhausted, so the incumbent is the exact bound.
            bound: incumbent_obj,
            stats,
        }),
        None => Ok(SolveResult {
            status: SolveStatus::Infeasible,
            incumbent: None,
            objective: None,
            bound: None,
            stats,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::{Column, ColumnKind, Family, Row, RowSense, RowTag};

    fn col(objective: f64) -> Column {
        Column {
            kind: ColumnKind::Assignment { nurse: 0, shift: 0, day: 0 },
            lower: 0.0,
            upper: 1.0,
            integral: true,
            objective,
        }
    }

    fn row(cols: Vec<u32>, coefs: Vec<f64>, sense: RowSense, rhs: f64) -> Row {
        Row {
            tag: RowTag { family: Family::C1, indices: vec![('n', cols.len())] },
            cols,
            coefs,
            sense,
            rhs,
        }
    }

    fn toy(columns: Vec<Column>, rows: Vec<Row>, sense: ObjectiveSense) -> IlpModel {
        IlpModel {
            name: "toy".into(),
            nurses: 1,
            shifts: 1,
            horizon: columns.len(),
            n_assignment: columns.len(),
            columns,
            rows,
            objective_sense: sense,
            objective_constant: 0.0,
        }
    }

    #[test]
    fn triangle_gap_closes_to_one() {
        // Pairwise caps give an LP optimum of 1.5; the integer optimum is 1.
        let model = toy(
            vec![col(1.0), col(1.0), col(1.0)],
            vec![
                row(vec![0, 1], vec![1.0, 1.0], RowSense::Le, 1.0),
                row(vec![0, 2], vec![1.0, 1.0], RowSense::Le, 1.0),
                row(vec![1, 2], vec![1.0, 1.0], RowSense::Le, 1.0),
            ],
            ObjectiveSense::Maximize,
        );
        let r = solve_ilp(&model, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.objective, Some(1.0));
        assert_eq!(r.bound, Some(1.0));
        let x = r.incumbent.unwrap();
        assert_eq!(x.iter().sum::<f64>(), 1.0);
        assert!(r.stats.nodes > 1, "root LP is fractional, so branching must occur");
    }

    #[test]
    fn knapsack_by_hand() {
        // max 5a + 4b + 3c subject to 2a + 3b + c ≤ 3 → a = c = 1, value 8.
        let model = toy(
            vec![col(5.0), col(4.0), col(3.0)],
            vec![row(vec![0, 1, 2], vec![2.0, 3.0, 1.0], RowSense::Le, 3.0)],
            ObjectiveSense::Maximize,
        );
        let r = solve_ilp(&model, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.objective, Some(8.0));
        assert_eq!(r.incumbent, Some(vec![1.0, 0.0, 1.0]));
    }

    #[test]
    fn infeasible_tree() {
        let model = toy(
            vec![col(1.0), col(1.0)],
            vec![row(vec![0, 1], vec![1.0, 1.0], RowSense::Ge, 3.0)],
            ObjectiveSense::Maximize,
        );
        let r = solve_ilp(&model, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
        assert_eq!(r.incumbent, None);
        assert_eq!(r.objective, None);
    }

    #[test]
    fn integral_root_is_one_node() {
        let model = toy(
            vec![col(2.0), col(1.0)],
            vec![row(vec![0, 1], vec![1.0, 1.0], RowSense::Le, 2.0)],
            ObjectiveSense::Maximize,
        );
        let r = solve_ilp(&model, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.objective, Some(3.0));
        assert_eq!(r.stats.nodes, 1);
    }

    #[test]
    fn node_limit_reports_limit_reached() {
        let model = toy(
            vec![col(1.0), col(1.0), col(1.0)],
            vec![
                row(vec![0, 1], vec![1.0, 1.0], RowSense::Le, 1.0),
                row(vec![0, 2], vec![1.0, 1.0], RowSense::Le, 1.0),
                row(vec![1, 2], vec![1.0, 1.0], RowSense::Le, 1.0),
            ],
            ObjectiveSense::Maximize,
        );
        let config = SolverConfig { node_limit: Some(1), ..SolverConfig::default() };
        let r = solve_ilp(&model, &config).unwrap();
        assert_eq!(r.status, SolveStatus::LimitReached);
        // The surviving bound still caps the true optimum of 1.
        assert!(r.bound.unwrap() >= 1.0);
    }

    #[test]
    fn minimization_with_equalities() {
        // min 2a + b + 3c subject to a + b + c = 2 → a = b = 1, value 3.
        let model = toy(
            vec![col(2.0), col(1.0), col(3.0)],
            vec![row(vec![0, 1, 2], vec![1.0, 1.0, 1.0], RowSense::Eq, 2.0)],
            ObjectiveSense::Minimize,
        );
        let r = solve_ilp(&model, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.objective, Some(3.0));
        assert_eq!(r.incumbent, Some(vec![1.0, 1.0, 0.0]));
    }

    #[test]
    fn deterministic_search() {
        let model = toy(
            vec![col(3.0), col(5.0), col(4.0), col(2.0)],
            vec![
                row(vec![0, 1, 2, 3], vec![2.0, 4.0, 3.0, 1.0], RowSense::Le, 6.0),
                row(vec![0, 1], vec![1.0, 1.0], RowSense::Le, 1.0),
            ],
            ObjectiveSense::Maximize,
        );
        let a = solve_ilp(&model, &SolverConfig::default()).unwrap();
        let b = solve_ilp(&model, &SolverConfig::default()).unwrap();
        assert_eq!(a.objective, b.objective);
        assert_eq!(a.incumbent, b.incumbent);
        assert_eq!(a.stats.nodes, b.stats.nodes);
    }
}
