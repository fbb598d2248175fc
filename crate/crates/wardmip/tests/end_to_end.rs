//! Full-pipeline runs of the two built-in wards.

use std::time::Instant;

use wardmip::compile::compile;
use wardmip::model::{builtin_general_ward, builtin_li2003, capacity_screen};
use wardmip::roster::{fairness, validate, Roster};
use wardmip::solve::{solve_ilp, SolveStatus, SolverConfig};

#[test]
fn general_ward_solves_to_optimality() {
    let inst = builtin_general_ward(42);
    let screen = capacity_screen(&inst);
    assert!(!screen.has_gap(), "built-in ward must pass the capacity screen");

    let model = compile(&inst).expect("compiles");
    let t = Instant::now();
    let result = solve_ilp(&model, &SolverConfig::default()).expect("solves");
    let elapsed = t.elapsed();
    println!(
        "general ward: status {:?}, objective {:?}, nodes {}, simplex iterations {}, {:.2?}",
        result.status, result.objective, result.stats.nodes, result.stats.simplex_iterations,
        elapsed
    );
    assert_eq!(result.status, SolveStatus::Optimal);

    let values = result.incumbent.expect("incumbent");
    let roster = Roster::from_values(&inst, &values).expect("decodes");
    let report = validate(&inst, &roster).expect("validates");
    assert!(report.is_feasible(), "violations: {:?}", report.violations);
    assert_eq!(Some(report.objective), result.objective);

    let stats = fairness(&inst, &roster);
    assert_eq!(stats.total_assignments as usize, stats.worked.iter().sum::<u32>() as usize);
}

#[test]
fn li_ward_solves_to_optimality() {
    let inst = builtin_li2003(7);
    let model = compile(&inst).expect("compiles");
    let t = Instant::now();
    let result = solve_ilp(&model, &SolverConfig::default()).expect("solves");
    let elapsed = t.elapsed();
    println!(
        "li ward: status {:?}, objective {:?}, nodes {}, simplex iterations {}, {:.2?}",
        result.status, result.objective, result.stats.nodes, result.stats.simplex_iterations,
        elapsed
    );
    assert_eq!(result.status, SolveStatus::Optimal);

    let values = result.incumbent.expect("incumbent");
    let roster = Roster::from_values(&inst, &values).expect("decodes");
    let report = validate(&inst, &roster).expect("validates");
    assert!(report.is_feasible(), "violations: {:?}", report.violations);
    assert_eq!(Some(report.objective), result.objective);

    // Exact coverage: every day staffs exactly 6 + 6 + 3 nurses.
    for d in 0..inst.horizon {
        let working = (0..inst.nurse_count()).filter(|&n| roster.get(n, d).is_some()).count();
        assert_eq!(working, 15, "day {d} staffs {working}");
    }
}
