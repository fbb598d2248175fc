//! Python bindings for the rostering engine.
//!
//! The module mirrors the Rust crate's main surface: load or generate an
//! [`Instance`](PyInstance), `solve()` it, `validate()` a
//! [`Roster`](PyRoster) independently, and move everything through the
//! same text formats the CLI speaks (canonical instance documents, CSV
//! rosters, fixed-format MPS).
//!
//! Build with `cargo build --release -p wardmip-py`; the produced
//! `libwardmip_py.so` imports as `wardmip_py` once named/linked
//! `wardmip_py.so` on `sys.path` (see `python/smoke_test.py`).

use std::time::Duration;

use pyo3::exceptions::{PyIndexError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use wardmip::compile::{compile, IlpModel};
use wardmip::io::{
    export_mps, parse_roster_csv, read_instance as io_read_instance, render_roster,
    write_instance, RosterFormat,
};
use wardmip::model::{
    builtin_general_ward, builtin_li2003, capacity_screen, random_instance, validate_instance,
    GenConfig, ProblemInstance,
};
use wardmip::roster::{fairness, validate, Roster};
use wardmip::solve::{brute_force, solve_ilp, SolveResult, SolveStatus, SolverConfig};

fn value_error(msg: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(msg.to_string())
}

fn compile_checked(inst: &ProblemInstance) -> PyResult<IlpModel> {
    compile(inst).map_err(value_error)
}

fn solver_config(time_limit: Option<f64>, node_limit: Option<u64>) -> PyResult<SolverConfig> {
    let mut config = SolverConfig::default();
    if let Some(secs) = time_limit {
        if !(secs > 0.0) {
            return Err(value_error("time_limit must be positive"));
        }
        config.time_limit = Some(Duration::from_secs_f64(secs));
    }
    if let Some(nodes) = node_limit {
        if nodes == 0 {
            return Err(value_error("node_limit must be positive"));
        }
        config.node_limit = Some(nodes);
    }
    Ok(config)
}

/// A complete rostering problem: staff, demand, weights and policy.
#[pyclass(name = "Instance", module = "wardmip_py", skip_from_py_object)]
#[derive(Clone)]
struct PyInstance {
    inner: ProblemInstance,
}

impl PyInstance {
    fn check_shape(&self, roster: &PyRoster) -> PyResult<()> {
        let r = &roster.inner;
        if r.nurses() != self.inner.nurse_count()
            || r.shifts() != self.inner.shift_count()
            || r.horizon() != self.inner.horizon
        {
            return Err(value_error(format!(
                "roster shape {}x{}x{} does not match instance {}x{}x{}",
                r.nurses(),
                r.shifts(),
                r.horizon(),
                self.inner.nurse_count(),
                self.inner.shift_count(),
                self.inner.horizon
            )));
        }
        Ok(())
    }
}

#[pymethods]
impl PyInstance {
    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }

    #[getter]
    fn horizon(&self) -> usize {
        self.inner.horizon
    }

    #[getter]
    fn nurse_count(&self) -> usize {
        self.inner.nurse_count()
    }

    #[getter]
    fn shift_labels(&self) -> Vec<String> {
        self.inner.shift_set.labels.clone()
    }

    #[getter]
    fn nurse_ids(&self) -> Vec<String> {
        self.inner.nurses.iter().map(|n| n.id.clone()).collect()
    }

    #[getter]
    fn ranks(&self) -> usize {
        self.inner.ranks
    }

    #[getter]
    fn wards(&self) -> usize {
        self.inner.wards
    }

    /// Canonical text document (byte-stable; see `read_instance`).
    fn write(&self) -> String {
        write_instance(&self.inner)
    }

    /// Compile and export the 0-1 program in fixed-format MPS.
    fn mps(&self) -> PyResult<String> {
        Ok(export_mps(&compile_checked(&self.inner)?))
    }

    /// Number of (rows, columns) in the compiled program.
    fn model_shape(&self) -> PyResult<(usize, usize)> {
        let model = compile_checked(&self.inner)?;
        Ok((model.num_rows(), model.num_columns()))
    }

    /// Solve exactly with branch-and-bound.
    #[pyo3(signature = (time_limit=None, node_limit=None))]
    fn solve(&self, time_limit: Option<f64>, node_limit: Option<u64>) -> PyResult<PyOutcome> {
        let config = solver_config(time_limit, node_limit)?;
        let model = compile_checked(&self.inner)?;
        let result = solve_ilp(&model, &config)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        PyOutcome::from_result(&self.inner, result)
    }

    /// Exhaustive reference solve (tiny instances only).
    fn brute_force(&self) -> PyResult<PyOutcome> {
        let result =
            brute_force(&self.inner).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        PyOutcome::from_result(&self.inner, result)
    }

    /// Check a roster against every hard rule and recompute the objective.
    fn validate(&self, roster: &PyRoster) -> PyResult<PyReport> {
        self.check_shape(roster)?;
        let report = validate(&self.inner, &roster.inner).map_err(value_error)?;
        Ok(PyReport {
            feasible: report.is_feasible(),
            objective: report.objective,
            soft_hits: report.soft_hits,
            violations: report.violations.iter().map(|v| v.to_string()).collect(),
        })
    }

    /// Workload statistics of a roster (reported, never optimized).
    fn fairness<'py>(&self, py: Python<'py>, roster: &PyRoster) -> PyResult<Bound<'py, PyDict>> {
        self.check_shape(roster)?;
        let f = fairness(&self.inner, &roster.inner);
        let out = PyDict::new(py);
        out.set_item("worked", f.worked)?;
        out.set_item("nights", f.nights)?;
        out.set_item("longest_run", f.longest_run)?;
        out.set_item("worked_spread", f.worked_spread)?;
        out.set_item("night_spread", f.night_spread)?;
        out.set_item("worked_mean", f.worked_mean)?;
        out.set_item("total_assignments", f.total_assignments)?;
        Ok(out)
    }

    /// Render a roster as a text grid or RFC-4180 CSV.
    #[pyo3(signature = (roster, format="grid"))]
    fn render(&self, roster: &PyRoster, format: &str) -> PyResult<String> {
        self.check_shape(roster)?;
        let fmt = match format {
            "grid" => RosterFormat::Grid,
            "csv" => RosterFormat::Csv,
            other => return Err(value_error(format!("unknown format {other:?}"))),
        };
        Ok(render_roster(&self.inner, &roster.inner, fmt))
    }

    /// Parse a CSV roster (as produced by `render(..., format="csv")`).
    fn parse_csv(&self, text: &str) -> PyResult<PyRoster> {
        let roster = parse_roster_csv(&self.inner, text).map_err(value_error)?;
        Ok(PyRoster { inner: roster })
    }

    /// All-off roster of this instance's shape.
    fn empty_roster(&self) -> PyRoster {
        PyRoster {
            inner: Roster::empty(
                self.inner.nurse_count(),
                self.inner.shift_count(),
                self.inner.horizon,
            ),
        }
    }

    /// Quick necessary-condition check: (total_demand, total_capacity,
    /// days whose demand exceeds available staff).
    fn capacity(&self) -> (u64, u64, Vec<usize>) {
        let screen = capacity_screen(&self.inner);
        (
            screen.total_demand,
            screen.total_capacity,
            screen.per_day_gap.iter().map(|g| g.day + 1).collect(),
        )
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(name={:?}, nurses={}, shifts={}, days={})",
            self.inner.name,
            self.inner.nurse_count(),
            self.inner.shift_count(),
            self.inner.horizon
        )
    }
}

/// One shift index per nurse per day, or `None` for a day off.
#[pyclass(name = "Roster", module = "wardmip_py", skip_from_py_object)]
#[derive(Clone)]
struct PyRoster {
    inner: Roster,
}

#[pymethods]
impl PyRoster {
    #[getter]
    fn nurses(&self) -> usize {
        self.inner.nurses()
    }

    #[getter]
    fn shifts(&self) -> usize {
        self.inner.shifts()
    }

    #[getter]
    fn horizon(&self) -> usize {
        self.inner.horizon()
    }

    /// Shift index worked by `nurse` on `day`, or `None`.
    fn get(&self, nurse: usize, day: usize) -> PyResult<Option<usize>> {
        self.check(nurse, day, None)?;
        Ok(self.inner.get(nurse, day))
    }

    /// Assign (or blank, with `None`) one cell.
    #[pyo3(signature = (nurse, day, shift))]
    fn set(&mut self, nurse: usize, day: usize, shift: Option<usize>) -> PyResult<()> {
        self.check(nurse, day, shift)?;
        self.inner.set(nurse, day, shift);
        Ok(())
    }

    /// Days worked by one nurse.
    fn worked_days(&self, nurse: usize) -> PyResult<u32> {
        self.check(nurse, 0, None)?;
        Ok(self.inner.worked_days(nurse))
    }

    /// Days one nurse works one particular shift.
    fn shift_days(&self, nurse: usize, shift: usize) -> PyResult<u32> {
        self.check(nurse, 0, Some(shift))?;
        Ok(self.inner.shift_days(nurse, shift))
    }

    fn __repr__(&self) -> String {
        format!(
            "Roster(nurses={}, shifts={}, days={})",
            self.inner.nurses(),
            self.inner.shifts(),
            self.inner.horizon()
        )
    }
}

impl PyRoster {
    fn check(&self, nurse: usize, day: usize, shift: Option<usize>) -> PyResult<()> {
        if nurse >= self.inner.nurses() {
            return Err(PyIndexError::new_err(format!(
                "nurse {nurse} out of range 0..{}",
                self.inner.nurses()
            )));
        }
        if day >= self.inner.horizon() {
            return Err(PyIndexError::new_err(format!(
                "day {day} out of range 0..{}",
                self.inner.horizon()
            )));
        }
        if let Some(s) = shift {
            if s >= self.inner.shifts() {
                return Err(PyIndexError::new_err(format!(
                    "shift {s} out of range 0..{}",
                    self.inner.shifts()
                )));
            }
        }
        Ok(())
    }
}

/// Outcome of an exact solve.
#[pyclass(name = "SolveOutcome", module = "wardmip_py")]
struct PyOutcome {
    #[pyo3(get)]
    status: String,
    #[pyo3(get)]
    objective: Option<f64>,
    #[pyo3(get)]
    bound: Option<f64>,
    #[pyo3(get)]
    nodes: u64,
    #[pyo3(get)]
    simplex_iterations: u64,
    #[pyo3(get)]
    wall_time: f64,
    roster: Option<PyRoster>,
}

impl PyOutcome {
    fn from_result(inst: &ProblemInstance, result: SolveResult) -> PyResult<PyOutcome> {
        let roster = match &result.incumbent {
            Some(values) => Some(PyRoster {
                inner: Roster::from_values(inst, values).map_err(value_error)?,
            }),
            None => None,
        };
        let status = match result.status {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::LimitReached => "limit-reached",
        };
        Ok(PyOutcome {
            status: status.to_string(),
            objective: result.objective,
            bound: result.bound,
            nodes: result.stats.nodes,
            simplex_iterations: result.stats.simplex_iterations,
            wall_time: result.stats.wall_time.as_secs_f64(),
            roster,
        })
    }
}

#[pymethods]
impl PyOutcome {
    /// Best roster found, or `None` when infeasible.
    #[getter]
    fn roster(&self) -> Option<PyRoster> {
        self.roster.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "SolveOutcome(status={:?}, objective={:?}, bound={:?}, nodes={})",
            self.status, self.objective, self.bound, self.nodes
        )
    }
}

/// Verdict of the independent roster validator.
#[pyclass(name = "ValidationReport", module = "wardmip_py")]
struct PyReport {
    #[pyo3(get)]
    feasible: bool,
    #[pyo3(get)]
    objective: f64,
    #[pyo3(get)]
    soft_hits: u32,
    #[pyo3(get)]
    violations: Vec<String>,
}

#[pymethods]
impl PyReport {
    fn __repr__(&self) -> String {
        format!(
            "ValidationReport(feasible={}, objective={}, violations={})",
            self.feasible,
            self.objective,
            self.violations.len()
        )
    }
}

/// Parse a canonical instance document.
#[pyfunction]
#[pyo3(name = "read_instance")]
fn py_read_instance(text: &str) -> PyResult<PyInstance> {
    let inner = io_read_instance(text).map_err(value_error)?;
    Ok(PyInstance { inner })
}

/// The 20-nurse, 14-day general ward (deterministic in the seed).
#[pyfunction]
#[pyo3(name = "builtin_general_ward")]
fn py_builtin_general_ward(seed: u64) -> PyInstance {
    PyInstance { inner: builtin_general_ward(seed) }
}

/// The 27-nurse, 7-day three-shift ward (deterministic in the seed).
#[pyfunction]
#[pyo3(name = "builtin_li2003")]
fn py_builtin_li2003(seed: u64) -> PyInstance {
    PyInstance { inner: builtin_li2003(seed) }
}

/// Random well-formed instance (deterministic in the seed).
#[pyfunction]
#[pyo3(signature = (nurses, days, seed=0, ranks=1, density=0.3, max_work_days=None))]
fn generate(
    nurses: usize,
    days: usize,
    seed: u64,
    ranks: usize,
    density: f64,
    max_work_days: Option<u32>,
) -> PyResult<PyInstance> {
    if nurses == 0 || days == 0 || ranks == 0 {
        return Err(value_error("nurses, days and ranks must be positive"));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(value_error("density must lie in [0, 1]"));
    }
    if let Some(cap) = max_work_days {
        if cap == 0 || cap as usize > days {
            return Err(value_error(format!(
                "max_work_days {cap} is impossible on a {days}-day horizon"
            )));
        }
    }
    let mut cfg = GenConfig::new(nurses, days, seed);
    cfg.ranks = ranks;
    cfg.demand_density = density;
    if max_work_days.is_some() {
        cfg.max_work_days = max_work_days;
    }
    let inner = random_instance(&cfg);
    let errors = validate_instance(&inner);
    if !errors.is_empty() {
        let joined: Vec<String> = errors.iter().map(|e| e.to_string()).collect();
        return Err(PyRuntimeError::new_err(joined.join("; ")));
    }
    Ok(PyInstance { inner })
}

/// Exact solver and validator for ward staff rostering.
#[pymodule]
fn wardmip_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_class::<PyRoster>()?;
    m.add_class::<PyOutcome>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(py_read_instance, m)?)?;
    m.add_function(wrap_pyfunction!(py_builtin_general_ward, m)?)?;
    m.add_function(wrap_pyfunction!(py_builtin_li2003, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
