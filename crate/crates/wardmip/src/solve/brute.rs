//! Exhaustive enumeration for tiny instances.
//!
//! Every candidate roster is scored through [`crate::roster::validate`],
//! so this path shares no constraint or objective code with the
//! row-generation/simplex path — which is exactly what makes it a
//! trustworthy cross-check for the branch-and-bound solver on instances
//! small enough to enumerate.
//!
//! Exact objective ties resolve to the lexicographically smallest 0/1
//! assignment vector in column order (nurse-major, then shift, then day)
//! — the same order the compiled model lays its columns out in, so the
//! winner is deterministic and directly comparable across solvers.

use std::time::Instant;

use super::{SolveError, SolveResult, SolveStats, SolveStatus};
use crate::model::{validate_instance, ObjectiveMode, ProblemInstance};
use crate::roster::{validate, Roster};

/// Hard cap on the number of candidate rosters.
const COMBINATION_LIMIT: f64 = 1e7;

/// Enumerate every roster of a (validated) instance and keep the best
/// feasible one.
///
/// The returned incumbent holds the assignment block only (no penalty
/// entries); `stats.nodes` counts enumerated candidates. Instances with
/// more than 10⁷ candidate rosters are refused.
pub fn brute_force(inst: &ProblemInstance) -> Result<SolveResult, SolveError> {
    let errs = validate_instance(inst);
    if !errs.is_empty() {
        return Err(SolveError::InvalidInstance(errs));
    }

    let nurses = inst.nurse_count();
    let shifts = inst.shift_count();
    let horizon = inst.horizon;
    let digits = nurses * horizon;
    let combinations = ((shifts + 1) as f64).powi(digits as i32);
    if !(combinations <= COMBINATION_LIMIT) {
        return Err(SolveError::SearchSpaceTooLarge {
            combinations,
            limit: COMBINATION_LIMIT,
        });
    }

    let start = Instant::now();
    let maximize = matches!(
        inst.objective_mode,
        ObjectiveMode::MaximizeUtility | ObjectiveMode::PenalizedUtility
    );

    // Odometer over the cells: 0 = off, v > 0 = shift v − 1.
    let mut digit = vec![0usize; digits];
    let mut roster = Roster::empty(nurses, shifts, horizon);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut examined: u64 = 0;

    loop {
        examined += 1;
        let report = validate(inst, &roster).expect("enumerated roster matches the instance");
        if report.is_feasible() {
            let replace = match &best {
                None => true,
                Some((incumbent, values)) => {
                    if report.objective == *incumbent {
                        // Exact tie: keep the smaller assignment vector.
                        roster.to_values() < *values
                    } else if maximize {
                        report.objective > *incumbent
                    } else {
                        report.objective < *incumbent
                    }
                }
            };
            if replace {
                best = Some((report.objective, roster.to_values()));
            }
        }

        // Increment, rightmost digit first; carrying past the leftmost
        // digit means the space is exhausted.
        let mut pos = digits;
        let done = loop {
            if pos == 0 {
                break true;
            }
            pos -= 1;
            let cell = (pos / horizon, pos % horizon);
            if digit[pos] < shifts {
                digit[pos] += 1;
                roster.set(cell.0, cell.1, Some(digit[pos] - 1));
                break false;
            }
            digit[pos] = 0;
            roster.set(cell.0, cell.1, None);
        };
        if done {
            break;
        }
    }

    let stats = SolveStats {
        nodes: examined,
        simplex_iterations: 0,
        wall_time: start.elapsed(),
    };
    Ok(match best {
        Some((objective, values)) => SolveResult {
            status: SolveStatus::Optimal,
            incumbent: Some(values),
            objective: Some(objective),
            bound: Some(objective),
            stats,
        },
        None => SolveResult {
            status: SolveStatus::Infeasible,
            incumbent: None,
            objective: None,
            bound: None,
            stats,
        },
    })
}
