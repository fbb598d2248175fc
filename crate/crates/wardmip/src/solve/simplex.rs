//! Bounded-variable primal simplex over an explicit dense basis inverse.
//!
//! Rows are turned into equalities by one slack per row (`≤` slacks in
//! `[0, ∞)`, `≥` slacks in `(−∞, 0]`, `=` slacks fixed at 0), giving an
//! all-slack identity starting basis. Phase 1 minimises the total bound
//! violation of the basic variables without artificial columns; phase 2
//! minimises the (internally sign-normalised) objective. Pricing is
//! Dantzig's rule with a Bland fallback after a degeneracy stall, so the
//! method terminates and every run on the same data takes the same pivots.
//!
//! Optimal bases are verified against the original row data before a
//! result is returned; on drift the basis inverse is refactorised and the
//! solve resumes. Failures surface as [`SolveError::Numerical`], never as
//! a silently wrong answer.

use super::{SolveError, SolverConfig};
use crate::compile::{IlpModel, ObjectiveSense, RowSense};

/// Reduced-cost significance threshold.
const DJ_TOL: f64 = 1e-9;
/// FTRAN entries at or below this are treated as structural zeros.
const W_TOL: f64 = 1e-10;
/// Ratio ties within this window are broken by pivot magnitude.
const RATIO_TIE: f64 = 1e-9;
/// Pivots after which Bland's rule replaces Dantzig pricing for the
/// remainder of a stalled phase.
const STALL_LIMIT: u32 = 300;

/// Status of one linear-programming relaxation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Public result of [`solve_lp`].
#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    /// Objective value in the model's own sense, constant included.
    pub objective: Option<f64>,
    /// One value per model column.
    pub values: Option<Vec<f64>>,
    pub iterations: u64,
    /// Rows still violated at the phase-1 optimum (infeasible case only);
    /// indices into the model's row list.
    pub violated_rows: Vec<usize>,
}

/// Internal result carrying the infeasibility attribution.
#[derive(Debug, Clone)]
pub(crate) struct LpOutcome {
    pub status: LpStatus,
    pub objective: f64,
    pub values: Vec<f64>,
    pub iterations: u64,
    /// Rows still violated at the phase-1 optimum (when infeasible).
    pub violated_rows: Vec<usize>,
}

/// Solve the LP relaxation of a compiled model.
///
/// `overrides` tightens column bounds as `(column, lower, upper)` triples
/// — the mechanism branch and bound uses to fix variables, exposed here
/// for the same purpose.
pub fn solve_lp(
    model: &IlpModel,
    overrides: &[(usize, f64, f64)],
    config: &SolverConfig,
) -> Result<LpResult, SolveError> {
    let ctx = SimplexContext::new(model);
    let out = ctx.solve(overrides, config)?;
    Ok(LpResult {
        status: out.status,
        objective: (out.status == LpStatus::Optimal).then_some(out.objective),
        values: (out.status == LpStatus::Optimal).then_some(out.values),
        iterations: out.iterations,
        violated_rows: out.violated_rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    AtLower,
    AtUpper,
    Basic(u32),
}

/// Immutable solve context shared by every branch-and-bound node.
pub(crate) struct SimplexContext {
    m: usize,
    n: usize,
    /// Structural matrix, compressed sparse columns.
    col_ptr: Vec<usize>,
    col_rows: Vec<u32>,
    col_vals: Vec<f64>,
    rhs: Vec<f64>,
    /// Internal minimisation costs for structural columns.
    cost: Vec<f64>,
    /// Base structural bounds.
    lower: Vec<f64>,
    upper: Vec<f64>,
    /// Slack bounds per row, from the row sense.
    slack_lo: Vec<f64>,
    slack_up: Vec<f64>,
    /// True when the model maximises (costs were negated internally).
    flip: bool,
    constant: f64,
}

impl SimplexContext {
    pub(crate) fn new(model: &IlpModel) -> Self {
        let n = model.columns.len();
        let m = model.rows.len();
        // Transpose the row-wise model into CSC.
        let mut counts = vec![0usize; n];
        for row in &model.rows {
            for &c in &row.cols {
                counts[c as usize] += 1;
            }
        }
        let mut col_ptr = vec![0usize; n + 1];
        for j in 0..n {
            col_ptr[j + 1] = col_ptr[j] + counts[j];
        }
        let nnz = col_ptr[n];
        let mut col_rows = vec![0u32; nnz];
        let mut col_vals = vec![0f64; nnz];
        let mut fill = col_ptr.clone();
        for (i, row) in model.rows.iter().enumerate() {
            for (&c, &a) in row.cols.iter().zip(&row.coefs) {
                let p = fill[c as usize];
                col_rows[p] = i as u32;
                col_vals[p] = a;
                fill[c as usize] = p + 1;
            }
        }

        let flip = model.objective_sense == ObjectiveSense::Maximize;
        let cost: Vec<f64> = model
            .columns
            .iter()
            .map(|c| if flip { -c.objective } else { c.objective })
            .collect();

        let mut slack_lo = vec![0f64; m];
        let mut slack_up = vec![0f64; m];
        let mut rhs = vec![0f64; m];
        for (i, row) in model.rows.iter().enumerate() {
            rhs[i] = row.rhs;
            match row.sense {
                RowSense::Le => {
                    slack_lo[i] = 0.0;
                    slack_up[i] = f64::INFINITY;
                }
                RowSense::Ge => {
                    slack_lo[i] = f64::NEG_INFINITY;
                    slack_up[i] = 0.0;
                }
                RowSense::Eq => {
                    slack_lo[i] = 0.0;
                    slack_up[i] = 0.0;
                }
            }
        }

        SimplexContext {
            m,
            n,
            col_ptr,
            col_rows,
            col_vals,
            rhs,
            cost,
            lower: model.columns.iter().map(|c| c.lower).collect(),
            upper: model.columns.iter().map(|c| c.upper).collect(),
            slack_lo,
            slack_up,
            flip,
            constant: model.objective_constant,
        }
    }

    #[inline]
    fn col(&self, j: usize) -> (&[u32], &[f64]) {
        let lo = self.col_ptr[j];
        let hi = self.col_ptr[j + 1];
        (&self.col_rows[lo..hi], &self.col_vals[lo..hi])
    }

    /// Solve with per-column bound overrides `(column, lower, upper)`.
    ///
    /// Every call starts from the all-slack basis, so results depend only
    /// on the context data and the overrides.
    pub(crate) fn solve(
        &self,
        overrides: &[(usize, f64, f64)],
        config: &SolverConfig,
    ) -> Result<LpOutcome, SolveError> {
        let m = self.m;
        let n = self.n;
        let total = n + m;
        let ftol = config.feasibility_tol;

        let var_lo = |lo: &[f64], j: usize| if j < n { lo[j] } else { self.slack_lo[j - n] };
        let var_up = |up: &[f64], j: usize| if j < n { up[j] } else { self.slack_up[j - n] };

        let mut lo = self.lower.clone();
        let mut up = self.upper.clone();
        for &(j, l, u) in overrides {
            debug_assert!(j < n, "override on a slack column");
            lo[j] = l;
            up[j] = u;
        }

        // All-slack identity basis; structurals sit at their lower bound.
        let mut state = vec![VarState::AtLower; total];
        let mut basis: Vec<u32> = (0..m as u32).map(|i| i + n as u32).collect();
        for (i, &b) in basis.iter().enumerate() {
            state[b as usize] = VarState::Basic(i as u32);
        }
        let mut binv = vec![0f64; m * m];
        for i in 0..m {
            binv[i * m + i] = 1.0;
        }
        // Basic values = rhs − N·x_N (only structurals can be non-zero).
        let mut xb = self.rhs.clone();
        for j in 0..n {
            let v = lo[j];
            if v != 0.0 {
                let (rows, vals) = self.col(j);
                for (&r, &a) in rows.iter().zip(vals) {
                    xb[r as usize] -= a * v;
                }
            }
        }

        let mut y = vec![0f64; m];
        let mut w = vec![0f64; m];
        let mut pivot_row = vec![0f64; m];
        let mut viol: Vec<(usize, f64)> = Vec::new();

        let mut iterations: u64 = 0;
        let iter_cap: u64 = 200_000u64.max(100 * (m as u64 + n as u64));
        let mut bland = false;
        let mut stall: u32 = 0;
        let mut last_obj = f64::INFINITY;
        let mut last_phase1 = true;
        let mut refactors = 0u32;

        loop {
            if iterations > iter_cap {
                return Err(SolveError::Numerical(format!(
                    "simplex iteration cap {iter_cap} exceeded"
                )));
            }

            // Classify basic bound violations; their signs are the phase-1
            // cost vector.
            viol.clear();
            for i in 0..m {
                let k = basis[i] as usize;
                let v = xb[i];
                if v < var_lo(&lo, k) - ftol {
                    viol.push((i, -1.0));
                } else if v > var_up(&up, k) + ftol {
                    viol.push((i, 1.0));
                }
            }
            let phase1 = !viol.is_empty();

            // Degeneracy stall detection on the phase objective.
            let phase_obj = if phase1 {
                viol.iter()
                    .map(|&(i, sign)| {
                        let k = basis[i] as usize;
                        if sign < 0.0 {
                            var_lo(&lo, k) - xb[i]
                        } else {
                            xb[i] - var_up(&up, k)
                        }
                    })
                    .sum::<f64>()
            } else {
                let mut obj = 0.0;
                for i in 0..m {
                    let k = basis[i] as usize;
                    if k < n {
                        obj += self.cost[k] * xb[i];
                    }
                }
                for j in 0..n {
                    if let VarState::Basic(_) = state[j] {
                        continue;
                    }
                    let v = match state[j] {
                        VarState::AtLower => lo[j],
                        VarState::AtUpper => up[j],
                        VarState::Basic(_) => unreachable!(),
                    };
                    if v != 0.0 {
                        obj += self.cost[j] * v;
                    }
                }
                obj
            };
            if phase1 != last_phase1 {
                bland = false;
                stall = 0;
            } else if phase_obj < last_obj - 1e-10 {
                bland = false;
                stall = 0;
            } else {
                stall += 1;
                if stall > STALL_LIMIT {
                    bland = true;
                }
            }
            last_obj = phase_obj;
            last_phase1 = phase1;

            // Pricing vector y = c_B' B⁻¹ for the current phase costs.
            y.fill(0.0);
            if phase1 {
                for &(i, sign) in &viol {
                    let row = &binv[i * m..(i + 1) * m];
                    if sign > 0.0 {
                        for (yj, &b) in y.iter_mut().zip(row) {
                            *yj += b;
                        }
                    } else {
                        for (yj, &b) in y.iter_mut().zip(row) {
                            *yj -= b;
                        }
                    }
                }
            } else {
                for i in 0..m {
                    let k = basis[i] as usize;
                    if k < n {
                        let c = self.cost[k];
                        if c != 0.0 {
                            let row = &binv[i * m..(i + 1) * m];
                            for (yj, &b) in y.iter_mut().zip(row) {
                                *yj += c * b;
                            }
                        }
                    }
                }
            }

            // Entering variable.
            let mut enter: Option<(usize, f64)> = None; // (var, reduced cost)
            let mut best_score = DJ_TOL;
            for j in 0..total {
                if let VarState::Basic(_) = state[j] {
                    continue;
                }
                let l = var_lo(&lo, j);
                let u = var_up(&up, j);
                if u - l <= 1e-12 {
                    continue; // fixed; can never move
                }
                let d = if j < n {
                    let base = if phase1 { 0.0 } else { self.cost[j] };
                    let (rows, vals) = self.col(j);
                    let mut dot = 0.0;
                    for (&r, &a) in rows.iter().zip(vals) {
                        dot += y[r as usize] * a;
                    }
                    base - dot
                } else {
                    -y[j - n]
                };
                let eligible = match state[j] {
                    VarState::AtLower => d < -DJ_TOL,
                    VarState::AtUpper => d > DJ_TOL,
                    VarState::Basic(_) => false,
                };
                if !eligible {
                    continue;
                }
                if bland {
                    enter = Some((j, d));
                    break;
                }
                if d.abs() > best_score {
                    best_score = d.abs();
                    enter = Some((j, d));
                }
            }

            let Some((q, _dq)) = enter else {
                if phase1 {
                    // Phase-1 optimum with violations left: infeasible.
                    let violated_rows: Vec<usize> = viol.iter().map(|&(i, _)| i).collect();
                    return Ok(LpOutcome {
                        status: LpStatus::Infeasible,
                        objective: 0.0,
                        values: Vec::new(),
                        iterations,
                        violated_rows,
                    });
                }
                // Phase-2 optimum: verify against the original data.
                let values = self.assemble(&state, &xb, &lo, &up, n, total);
                match self.verify(&values, &lo, &up, ftol) {
                    Ok(()) => {
                        let mut obj = 0.0;
                        for j in 0..n {
                            obj += self.cost[j] * values[j];
                        }
                        let user_obj =
                            if self.flip { -obj } else { obj } + self.constant;
                        let mut out_values = values;
                        out_values.truncate(n);
                        // Snap within-tolerance values onto their bounds so
                        // callers see clean integers where the LP hit one.
                        for (j, v) in out_values.iter_mut().enumerate() {
                            if (*v - lo[j]).abs() <= ftol {
                                *v = lo[j];
                            } else if (*v - up[j]).abs() <= ftol {
                                *v = up[j];
                            }
                        }
                        return Ok(LpOutcome {
                            status: LpStatus::Optimal,
                            objective: user_obj,
                            values: out_values,
                            iterations,
                            violated_rows: Vec::new(),
                        });
                    }
                    Err(worst) => {
                        refactors += 1;
                        if refactors > 3 {
                            return Err(SolveError::Numerical(format!(
                                "basis verification failed after {refactors} refactorisations \
                                 (residual {worst:.3e})"
                            )));
                        }
                        self.refactorize(&basis, &mut binv)?;
                        self.recompute_basics(&state, &basis, &binv, &lo, &up, &mut xb);
                        continue;
                    }
                }
            };

            iterations += 1;

            // FTRAN: w = B⁻¹ A_q, walked row-wise to keep B⁻¹ access
            // contiguous.
            if q < n {
                let (rows, vals) = self.col(q);
                for (i, wi) in w.iter_mut().enumerate() {
                    let row = &binv[i * m..(i + 1) * m];
                    let mut acc = 0.0;
                    for (&r, &a) in rows.iter().zip(vals) {
                        acc += a * row[r as usize];
                    }
                    *wi = acc;
                }
            } else {
                let rcol = q - n;
                for (i, wi) in w.iter_mut().enumerate() {
                    *wi = binv[i * m + rcol];
                }
            }

            let sigma = match state[q] {
                VarState::AtLower => 1.0,
                VarState::AtUpper => -1.0,
                VarState::Basic(_) => unreachable!("entering variable is basic"),
            };

            // Ratio test.
            let range = var_up(&up, q) - var_lo(&lo, q); // may be +inf
            let mut t_best = f64::INFINITY;
            let mut block: Option<(usize, bool)> = None; // (row, leaves_at_upper)
            let mut block_w = 0f64;
            for i in 0..m {
                let wi = w[i];
                if wi.abs() <= W_TOL {
                    continue;
                }
                let k = basis[i] as usize;
                let v = xb[i];
                let dv = -sigma * wi;
                let l = var_lo(&lo, k);
                let u = var_up(&up, k);
                let (t, at_upper) = if phase1 && v < l - ftol {
                    if dv > 0.0 {
                        ((l - v) / dv, false)
                    } else {
                        continue; // violation may worsen; net objective still falls
                    }
                } else if phase1 && v > u + ftol {
                    if dv < 0.0 {
                        ((u - v) / dv, true)
                    } else {
                        continue;
                    }
                } else if dv > 0.0 {
                    if u.is_infinite() {
                        continue;
                    }
                    ((u - v) / dv, true)
                } else {
                    if l.is_infinite() {
                        continue;
                    }
                    ((l - v) / dv, false)
                };
                let t = t.max(0.0);
                let better = if t < t_best - RATIO_TIE {
                    true
                } else if t <= t_best + RATIO_TIE {
                    // Tie: prefer the larger pivot, then the lower row.
                    if bland {
                        block.map_or(true, |(bi, _)| (basis[i] as usize) < basis[bi] as usize)
                    } else {
                        wi.abs() > block_w.abs() + 1e-12
                    }
                } else {
                    false
                };
                if better {
                    t_best = t.min(t_best);
                    block = Some((i, at_upper));
                    block_w = wi;
                }
            }

            if t_best >= range - RATIO_TIE {
                // The entering variable hits its opposite bound first.
                if range.is_infinite() && block.is_none() {
                    if phase1 {
                        return Err(SolveError::Numerical(
                            "phase-1 descent direction unblocked".into(),
                        ));
                    }
                    return Ok(LpOutcome {
                        status: LpStatus::Unbounded,
                        objective: 0.0,
                        values: Vec::new(),
                        iterations,
                        violated_rows: Vec::new(),
                    });
                }
                if range <= t_best {
                    // Bound flip: no basis change.
                    for i in 0..m {
                        let wi = w[i];
                        if wi.abs() > W_TOL {
                            xb[i] -= sigma * wi * range;
                        }
                    }
                    state[q] = match state[q] {
                        VarState::AtLower => VarState::AtUpper,
                        VarState::AtUpper => VarState::AtLower,
                        VarState::Basic(_) => unreachable!(),
                    };
                    continue;
                }
            }

            let Some((r, leaves_at_upper)) = block else {
                if phase1 {
                    return Err(SolveError::Numerical(
                        "phase-1 descent direction unblocked".into(),
                    ));
                }
                return Ok(LpOutcome {
                    status: LpStatus::Unbounded,
                    objective: 0.0,
                    values: Vec::new(),
                    iterations,
                    violated_rows: Vec::new(),
                });
            };

            // Move to the blocking point and pivot q into row r.
            let t = t_best;
            for i in 0..m {
                let wi = w[i];
                if wi.abs() > W_TOL {
                    xb[i] -= sigma * wi * t;
                }
            }
            let entering_value = match state[q] {
                VarState::AtLower => var_lo(&lo, q) + sigma * t,
                VarState::AtUpper => var_up(&up, q) + sigma * t,
                VarState::Basic(_) => unreachable!(),
            };
            let leaving = basis[r] as usize;
            state[leaving] =
                if leaves_at_upper { VarState::AtUpper } else { VarState::AtLower };
            basis[r] = q as u32;
            state[q] = VarState::Basic(r as u32);
            xb[r] = entering_value;

            // Product-form update of B⁻¹.
            let piv = w[r];
            debug_assert!(piv.abs() > W_TOL, "pivot too small");
            pivot_row.copy_from_slice(&binv[r * m..(r + 1) * m]);
            let inv_piv = 1.0 / piv;
            for x in pivot_row.iter_mut() {
                *x *= inv_piv;
            }
            for i in 0..m {
                if i == r {
                    continue;
                }
                let wi = w[i];
                if wi.abs() <= W_TOL {
                    continue;
                }
                let row = &mut binv[i * m..(i + 1) * m];
                for (b, &p) in row.iter_mut().zip(&pivot_row) {
                    *b -= wi * p;
                }
            }
            binv[r * m..(r + 1) * m].copy_from_slice(&pivot_row);
        }
    }

    /// Gather the full variable-value vector from the basis state.
    fn assemble(
        &self,
        state: &[VarState],
        xb: &[f64],
        lo: &[f64],
        up: &[f64],
        n: usize,
        total: usize,
    ) -> Vec<f64> {
        let mut z = vec![0f64; total];
        for j in 0..total {
            z[j] = match state[j] {
                VarState::AtLower => if j < n { lo[j] } else { self.slack_lo[j - n] },
                VarState::AtUpper => if j < n { up[j] } else { self.slack_up[j - n] },
                VarState::Basic(i) => xb[i as usize],
            };
        }
        z
    }

    /// Check `Az = rhs` and the bounds against the *original* data.
    fn verify(&self, z: &[f64], lo: &[f64], up: &[f64], ftol: f64) -> Result<(), f64> {
        let n = self.n;
        let m = self.m;
        let mut res = self.rhs.clone();
        for j in 0..n {
            let v = z[j];
            if v != 0.0 {
                let (rows, vals) = self.col(j);
                for (&r, &a) in rows.iter().zip(vals) {
                    res[r as usize] -= a * v;
                }
            }
        }
        for i in 0..m {
            res[i] -= z[n + i];
        }
        let scale = 1.0 + self.rhs.iter().fold(0f64, |acc, &b| acc.max(b.abs()));
        let mut worst = 0f64;
        for &r in &res {
            worst = worst.max(r.abs());
        }
        for j in 0..n + m {
            let (l, u) = if j < n {
                (lo[j], up[j])
            } else {
                (self.slack_lo[j - n], self.slack_up[j - n])
            };
            if z[j] < l - ftol * 10.0 {
                worst = worst.max(l - z[j]);
            }
            if z[j] > u + ftol * 10.0 {
                worst = worst.max(z[j] - u);
            }
        }
        if worst <= ftol * 10.0 * scale {
            Ok(())
        } else {
            Err(worst)
        }
    }

    /// Rebuild the dense basis inverse from scratch (Gauss-Jordan with
    /// partial pivoting).
    fn refactorize(&self, basis: &[u32], binv: &mut [f64]) -> Result<(), SolveError> {
        let m = self.m;
        let n = self.n;
        let mut bmat = vec![0f64; m * m];
        for (pos, &var) in basis.iter().enumerate() {
            let j = var as usize;
            if j < n {
                let (rows, vals) = self.col(j);
                for (&r, &a) in rows.iter().zip(vals) {
                    bmat[r as usize * m + pos] = a;
                }
            } else {
                bmat[(j - n) * m + pos] = 1.0;
            }
        }
        binv.fill(0.0);
        for i in 0..m {
            binv[i * m + i] = 1.0;
        }
        for k in 0..m {
            // Partial pivot.
            let mut p = k;
            let mut best = bmat[k * m + k].abs();
            for i in k + 1..m {
                let cand = bmat[i * m + k].abs();
                if cand > best {
                    best = cand;
                    p = i;
                }
            }
            if best < 1e-11 {
                return Err(SolveError::Numerical("singular basis during refactorisation".into()));
            }
            if p != k {
                for j in 0..m {
                    bmat.swap(k * m + j, p * m + j);
                    binv.swap(k * m + j, p * m + j);
                }
            }
            let piv = bmat[k * m + k];
            let inv = 1.0 / piv;
            for j in 0..m {
                bmat[k * m + j] *= inv;
                binv[k * m + j] *= inv;
            }
            for i in 0..m {
                if i == k {
                    continue;
                }
                let f = bmat[i * m + k];
                if f == 0.0 {
                    continue;
                }
                for j in 0..m {
                    bmat[i * m + j] -= f * bmat[k * m + j];
                    binv[i * m + j] -= f * binv[k * m + j];
                }
            }
        }
        Ok(())
    }

    /// Recompute basic values after a refactorisation.
    fn recompute_basics(
        &self,
        state: &[VarState],
        basis: &[u32],
        binv: &[f64],
        lo: &[f64],
        up: &[f64],
        xb: &mut [f64],
    ) {
        let m = self.m;
        let n = self.n;
        let mut t = self.rhs.clone();
        for j in 0..n + m {
            let v = match state[j] {
                VarState::AtLower => if j < n { lo[j] } else { self.slack_lo[j - n] },
                VarState::AtUpper => if j < n { up[j] } else { self.slack_up[j - n] },
                VarState::Basic(_) => continue,
            };
            if v == 0.0 || v.is_infinite() {
                continue;
            }
            if j < n {
                let (rows, vals) = self.col(j);
                for (&r, &a) in rows.iter().zip(vals) {
                    t[r as usize] -= a * v;
                }
            } else {
                t[j - n] -= v;
            }
        }
        for i in 0..m {
            let row = &binv[i * m..(i + 1) * m];
            let mut acc = 0.0;
            for (b, &ti) in row.iter().zip(&t) {
                acc += b * ti;
            }
            xb[i] = acc;
        }
        let _ = basis;
    }
}
