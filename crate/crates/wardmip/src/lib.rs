//! Ward staffing as exact 0-1 optimisation.
//!
//! The pipeline runs in four stages, each its own module:
//!
//! 1. [`model`] — declarative staffing instances: shifts, nurses, demand,
//!    weights, and the policy switches, plus instance validation and a
//!    quick capacity screen.
//! 2. [`compile`] — deterministic translation of an instance into a
//!    sparse 0-1 program with tagged rows.
//! 3. [`solve`] — a bounded-variable primal simplex inside best-bound
//!    branch and bound, and an exhaustive solver for tiny instances that
//!    doubles as a cross-check.
//! 4. [`roster`] — decoded schedules, an independent rule checker that
//!    shares no code with the compiler, and fairness statistics.
//!
//! Around the pipeline, [`io`] reads and writes canonical instance
//! documents, exports compiled models as fixed-format MPS, and renders
//! rosters as grids or CSV.
//!
//! The intended flow: build or load a [`model::ProblemInstance`], turn it
//! into rows with [`compile::compile`], solve with [`solve::solve_ilp`],
//! decode via [`roster::Roster::from_values`], and re-check the result
//! with [`roster::validate`].

pub mod compile;
pub mod io;
pub mod model;
pub mod roster;
pub mod solve;
