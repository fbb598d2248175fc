//! Lower a [`ProblemInstance`] to a sparse 0-1 integer linear program.
//!
//! Columns come first as one 0-1 assignment variable per (nurse, shift,
//! day) cell — `column = (nurse · |S| + shift) · D + day` — followed by a
//! block of continuous `[0, 1]` penalty columns for the soft rules. Rows
//! are emitted in family order `C1..C12`, then the objective-link rows,
//! with index tuples ascending inside each family, so compiling the same
//! instance twice yields bit-identical models.

use crate::model::{
    CascadeMode, CoverageMode, ObjectiveMode, ProblemInstance, RequiredShifts, validate_instance,
    InstanceError,
};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Constraint family of a row (or penalty-link row).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    /// At most one shift per nurse per day.
    C1,
    /// At most `max_work_days` worked days per nurse.
    C2,
    /// Sliding-window workload caps.
    C3,
    /// Rest days after a block of consecutive nights.
    C4,
    /// No work on leave days.
    C5,
    /// No morning right after a night.
    C6,
    /// Exact coverage.
    C7,
    /// Minimum coverage.
    C8,
    /// Rank-cascaded coverage.
    C9,
    /// Pinned per-nurse shift counts.
    C10,
    /// No morning right after an afternoon (hard form).
    C11,
    /// Night-count caps (windowed and horizon-wide).
    C12,
    /// Link row tying a PM→AM penalty column to its pattern.
    LinkPmAm,
    /// Link row tying a night-run penalty column to its pattern.
    LinkNightRun,
}

impl Family {
    /// Short label used in row tags and MPS row names.
    pub fn label(self) -> &'static str {
        match self {
            Family::C1 => "C1",
            Family::C2 => "C2",
            Family::C3 => "C3",
            Family::C4 => "C4",
            Family::C5 => "C5",
            Family::C6 => "C6",
            Family::C7 => "C7",
            Family::C8 => "C8",
            Family::C9 => "C9",
            Family::C10 => "C10",
            Family::C11 => "C11",
            Family::C12 => "C12",
            Family::LinkPmAm => "ZPM",
            Family::LinkNightRun => "ZNR",
        }
    }
}

/// Identifies one row: family plus its index tuple.
///
/// Indices are stored 0-based and rendered 1-based (`C6_n3_d7` is nurse 3,
/// day 7 when counting from one), matching the file formats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowTag {
    pub family: Family,
    pub indices: Vec<(char, usize)>,
}

impl RowTag {
    fn new(family: Family, indices: &[(char, usize)]) -> Self {
        RowTag { family, indices: indices.to_vec() }
    }
}

impl fmt::Display for RowTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family.label())?;
        for &(dim, value) in &self.indices {
            write!(f, "_{}{}", dim, value + 1)?;
        }
        Ok(())
    }
}

/// What a column stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    /// 0-1 decision: nurse works this shift on this day.
    Assignment { nurse: usize, shift: usize, day: usize },
    /// Continuous penalty for a PM shift followed by an AM shift.
    PmAmPenalty { nurse: usize, day: usize },
    /// Continuous penalty for a run of consecutive nights starting here.
    NightRunPenalty { nurse: usize, day: usize },
}

/// One variable of the compiled program.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub kind: ColumnKind,
    pub lower: f64,
    pub upper: f64,
    /// Whether branch-and-bound must drive this column to an integer.
    pub integral: bool,
    /// Objective coefficient (sense given by the model).
    pub objective: f64,
}

impl Column {
    /// Short unique name (1-based indices), used by the MPS writer.
    pub fn name(&self) -> String {
        match self.kind {
            ColumnKind::Assignment { nurse, shift, day } => {
                format!("X{}_{}_{}", nurse + 1, shift + 1, day + 1)
            }
            ColumnKind::PmAmPenalty { nurse, day } => format!("ZPM{}_{}", nurse + 1, day + 1),
            ColumnKind::NightRunPenalty { nurse, day } => format!("ZNR{}_{}", nurse + 1, day + 1),
        }
    }
}

/// Row comparison sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Ge,
    Eq,
}

/// One sparse constraint row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub tag: RowTag,
    /// Column indices with non-zero coefficients, ascending.
    pub cols: Vec<u32>,
    /// Matching coefficients.
    pub coefs: Vec<f64>,
    pub sense: RowSense,
    pub rhs: f64,
}

impl Row {
    /// Evaluate the left-hand side at a full column-value vector.
    pub fn lhs(&self, values: &[f64]) -> f64 {
        self.cols
            .iter()
            .zip(&self.coefs)
            .map(|(&c, &a)| a * values[c as usize])
            .sum()
    }

    /// True when `values` satisfies this row within `tol`.
    pub fn satisfied(&self, values: &[f64], tol: f64) -> bool {
        let lhs = self.lhs(values);
        match self.sense {
            RowSense::Le => lhs <= self.rhs + tol,
            RowSense::Ge => lhs >= self.rhs - tol,
            RowSense::Eq => (lhs - self.rhs).abs() <= tol,
        }
    }
}

/// Optimisation direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveSense {
    Maximize,
    Minimize,
}

/// A compiled 0-1 program with tagged rows.
#[derive(Debug, Clone, PartialEq)]
pub struct IlpModel {
    pub name: String,
    pub nurses: usize,
    pub shifts: usize,
    pub horizon: usize,
    /// Assignment block first, penalty block after.
    pub columns: Vec<Column>,
    /// Length of the assignment block (`nurses · shifts · horizon`).
    pub n_assignment: usize,
    pub rows: Vec<Row>,
    pub objective_sense: ObjectiveSense,
    /// Constant added to the objective value.
    pub objective_constant: f64,
}

/// Out-of-range cell coordinates passed to [`IlpModel::index_of`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum IndexError {
    #[error("nurse index {got} out of range ({limit} nurses)")]
    Nurse { got: usize, limit: usize },
    #[error("shift index {got} out of range ({limit} shifts)")]
    Shift { got: usize, limit: usize },
    #[error("day index {got} out of range ({limit} days)")]
    Day { got: usize, limit: usize },
}

/// Compilation failure.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompileError {
    #[error("instance fails structural validation: {}", format_errors(.0))]
    InvalidInstance(Vec<InstanceError>),
}

fn format_errors(errs: &[InstanceError]) -> String {
    errs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")
}

impl IlpModel {
    /// Column index of assignment cell (nurse, shift, day).
    ///
    /// The map is a bijection between valid cells and
    /// `0..nurses·shifts·horizon`; out-of-range coordinates are rejected.
    #[inline]
    pub fn index_of(&self, nurse: usize, shift: usize, day: usize) -> Result<usize, IndexError> {
        if nurse >= self.nurses {
            return Err(IndexError::Nurse { got: nurse, limit: self.nurses });
        }
        if shift >= self.shifts {
            return Err(IndexError::Shift { got: shift, limit: self.shifts });
        }
        if day >= self.horizon {
            return Err(IndexError::Day { got: day, limit: self.horizon });
        }
        Ok((nurse * self.shifts + shift) * self.horizon + day)
    }

    #[inline]
    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    #[inline]
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// How many rows carry the given family tag.
    pub fn family_row_count(&self, family: Family) -> usize {
        self.rows.iter().filter(|r| r.tag.family == family).count()
    }

    /// Indices of rows violated by a full column-value vector.
    pub fn violated_rows(&self, values: &[f64], tol: f64) -> Vec<usize> {
        assert_eq!(values.len(), self.columns.len(), "value vector length mismatch");
        (0..self.rows.len()).filter(|&i| !self.rows[i].satisfied(values, tol)).collect()
    }

    /// Extend an assignment-block vector with the penalty values the
    /// objective pressure would choose: each penalty column takes the
    /// smallest value its link row allows.
    pub fn extend_with_penalties(&self, assignment: &[f64]) -> Vec<f64> {
        assert_eq!(assignment.len(), self.n_assignment, "assignment block length mismatch");
        let mut values = assignment.to_vec();
        values.resize(self.columns.len(), 0.0);
        for row in &self.rows {
            let (z_col, pattern_sum, slack) = match row.tag.family {
                Family::LinkPmAm | Family::LinkNightRun => {
                    // Link rows read `Σ pattern − z ≤ rhs`; the penalty
                    // column is the single negative coefficient.
                    let mut z = None;
                    let mut sum = 0.0;
                    for (&c, &a) in row.cols.iter().zip(&row.coefs) {
                        if a < 0.0 {
                            z = Some(c as usize);
                        } else {
                            sum += a * values[c as usize];
                        }
                    }
                    (z.expect("link row without penalty column"), sum, row.rhs)
                }
                _ => continue,
            };
            let needed = (pattern_sum - slack).max(values[z_col]);
            values[z_col] = needed.clamp(0.0, 1.0);
        }
        values
    }

    /// Objective value of a full column-value vector, constant included.
    pub fn objective_value(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.columns.len(), "value vector length mismatch");
        let dot: f64 =
            self.columns.iter().zip(values).map(|(c, &v)| c.objective * v).sum();
        dot + self.objective_constant
    }
}

/// The families the compiler will emit at least one row (or penalty
/// column) for, given this instance's policy and dimensions.
pub fn expected_families(inst: &ProblemInstance) -> BTreeSet<Family> {
    let mut out = BTreeSet::new();
    let d = inst.horizon;
    out.insert(Family::C1);
    out.insert(Family::C2);
    if inst.policy.window_rules.iter().any(|r| (r.window as usize) <= d) {
        out.insert(Family::C3);
    }
    if let Some(nb) = &inst.policy.night_block {
        if (nb.nights + nb.off_after) as usize <= d {
            out.insert(Family::C4);
        }
    }
    if inst.nurses.iter().any(|n| n.leave_days.iter().any(|&x| x < d)) {
        out.insert(Family::C5);
    }
    if inst.policy.forbid_night_morning && d >= 2 {
        out.insert(Family::C6);
    }
    let top = inst.ranks - 1;
    let demand_positive = inst.demand.total() > 0;
    match inst.policy.cascade_mode {
        CascadeMode::Off => match inst.policy.coverage_mode {
            CoverageMode::Exact => {
                out.insert(Family::C7);
            }
            CoverageMode::AtLeast => {
                if demand_positive {
                    out.insert(Family::C8);
                }
            }
        },
        CascadeMode::Adjacent => {
            match inst.policy.coverage_mode {
                CoverageMode::Exact => {
                    out.insert(Family::C7);
                }
                CoverageMode::AtLeast => {
                    if inst.demand.iter().any(|(&(_, r, _, _), &m)| r == top && m > 0) {
                        out.insert(Family::C8);
                    }
                }
            }
            if inst.demand.iter().any(|(&(_, r, _, _), &m)| r < top && m > 0) {
                out.insert(Family::C9);
            }
        }
        CascadeMode::Cumulative => {
            if demand_positive {
                out.insert(Family::C9);
            }
        }
    }
    for nurse in &inst.nurses {
        match &nurse.required_shifts {
            Some(RequiredShifts::Total(_)) => {
                out.insert(Family::C10);
            }
            Some(RequiredShifts::PerShift(map)) if !map.is_empty() => {
                out.insert(Family::C10);
            }
            _ => {}
        }
    }
    if inst.policy.forbid_pm_am && d >= 2 {
        out.insert(Family::C11);
    }
    if let Some(m) = inst.policy.max_consecutive_nights {
        if (m as usize) + 1 <= d {
            out.insert(Family::C12);
        }
    }
    if inst.policy.max_total_nights.is_some() {
        out.insert(Family::C12);
    }
    if inst.policy.soft_pm_am_weight.is_some() && d >= 2 {
        out.insert(Family::LinkPmAm);
    }
    if let Some(snr) = &inst.policy.soft_night_run {
        if (snr.run_length as usize) <= d {
            out.insert(Family::LinkNightRun);
        }
    }
    out
}

/// Compile an instance into its 0-1 program.
///
/// Fails if [`validate_instance`] reports anything; otherwise the result
/// is a deterministic function of the instance.
pub fn compile(inst: &ProblemInstance) -> Result<IlpModel, CompileError> {
    let errs = validate_instance(inst);
    if !errs.is_empty() {
        return Err(CompileError::InvalidInstance(errs));
    }

    let nurses = inst.nurse_count();
    let shifts = inst.shift_count();
    let horizon = inst.horizon;
    let n_assignment = nurses * shifts * horizon;
    let night = inst.shift_set.night;
    let morning = inst.shift_set.morning;
    let idx = |n: usize, s: usize, d: usize| -> u32 { ((n * shifts + s) * horizon + d) as u32 };

    let maximize = matches!(
        inst.objective_mode,
        ObjectiveMode::MaximizeUtility | ObjectiveMode::PenalizedUtility
    );
    let (objective_sense, objective_constant) = if maximize {
        (ObjectiveSense::Maximize, 0.0)
    } else {
        (ObjectiveSense::Minimize, inst.cost.constant_total())
    };

    // ----- columns: assignment block -----
    let mut columns = Vec::with_capacity(n_assignment);
    for n in 0..nurses {
        for s in 0..shifts {
            for d in 0..horizon {
                let objective = if maximize {
                    inst.preference.get(n, s, d)
                } else {
                    -inst.cost.get(n, s, d)
                };
                columns.push(Column {
                    kind: ColumnKind::Assignment { nurse: n, shift: s, day: d },
                    lower: 0.0,
                    upper: 1.0,
                    integral: true,
                    objective,
                });
            }
        }
    }

    // ----- penalty columns (soft rules apply whenever configured) -----
    // Penalty weights oppose the optimisation direction.
    let penalty_sign = if maximize { -1.0 } else { 1.0 };
    let mut pm_penalty_col: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    if let Some(w) = inst.policy.soft_pm_am_weight {
        if horizon >= 2 {
            for n in 0..nurses {
                for d in 0..horizon - 1 {
                    pm_penalty_col.insert((n, d), columns.len() as u32);
                    columns.push(Column {
                        kind: ColumnKind::PmAmPenalty { nurse: n, day: d },
                        lower: 0.0,
                        upper: 1.0,
                        integral: false,
                        objective: penalty_sign * w,
                    });
                }
            }
        }
    }
    let mut nr_penalty_col: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    if let Some(snr) = &inst.policy.soft_night_run {
        let j = snr.run_length as usize;
        if j <= horizon {
            for n in 0..nurses {
                for d in 0..=horizon - j {
                    nr_penalty_col.insert((n, d), columns.len() as u32);
                    columns.push(Column {
                        kind: ColumnKind::NightRunPenalty { nurse: n, day: d },
                        lower: 0.0,
                        upper: 1.0,
                        integral: false,
                        objective: penalty_sign * snr.weight,
                    });
                }
            }
        }
    }

    // ----- rows, family order C1..C12 then link rows -----
    let mut rows = Vec::new();

    // C1: one shift per day.
    for n in 0..nurses {
        for d in 0..horizon {
            rows.push(Row {
                tag: RowTag::new(Family::C1, &[('n', n), ('d', d)]),
                cols: (0..shifts).map(|s| idx(n, s, d)).collect(),
                coefs: vec![1.0; shifts],
                sense: RowSense::Le,
                rhs: 1.0,
            });
        }
    }

    // C2: workload cap over the horizon.
    for n in 0..nurses {
        let cols: Vec<u32> =
            (0..shifts).flat_map(|s| (0..horizon).map(move |d| (s, d))).map(|(s, d)| idx(n, s, d)).collect();
        rows.push(Row {
            tag: RowTag::new(Family::C2, &[('n', n)]),
            coefs: vec![1.0; cols.len()],
            cols,
            sense: RowSense::Le,
            rhs: inst.policy.max_work_days as f64,
        });
    }

    // C3: sliding-window workload caps.
    for (k, rule) in inst.policy.window_rules.iter().enumerate() {
        let w = rule.window as usize;
        if w > horizon {
            continue;
        }
        for n in 0..nurses {
            for d0 in 0..=horizon - w {
                let cols: Vec<u32> = (d0..d0 + w)
                    .flat_map(|d| (0..shifts).map(move |s| (s, d)))
                    .map(|(s, d)| idx(n, s, d))
                    .collect();
                rows.push(Row {
                    tag: RowTag::new(Family::C3, &[('k', k), ('n', n), ('d', d0)]),
                    coefs: vec![1.0; cols.len()],
                    cols,
                    sense: RowSense::Le,
                    rhs: rule.max_worked as f64,
                });
            }
        }
    }

    // C4: after `i` consecutive nights, the next `b` days are off.
    // Window row: Σ nights over i days + Σ any-shift over b days ≤ i.
    if let Some(nb) = &inst.policy.night_block {
        let i = nb.nights as usize;
        let b = nb.off_after as usize;
        if i + b <= horizon {
            for n in 0..nurses {
                for j in 0..=horizon - i - b {
                    let mut cols: Vec<u32> = (j..j + i).map(|d| idx(n, night, d)).collect();
                    for d in j + i..j + i + b {
                        for s in 0..shifts {
                            cols.push(idx(n, s, d));
                        }
                    }
                    cols.sort_unstable();
                    rows.push(Row {
                        tag: RowTag::new(Family::C4, &[('n', n), ('d', j)]),
                        coefs: vec![1.0; cols.len()],
                        cols,
                        sense: RowSense::Le,
                        rhs: i as f64,
                    });
                }
            }
        }
    }

    // C5: leave days.
    for (n, nurse) in inst.nurses.iter().enumerate() {
        for &d in &nurse.leave_days {
            rows.push(Row {
                tag: RowTag::new(Family::C5, &[('n', n), ('d', d)]),
                cols: (0..shifts).map(|s| idx(n, s, d)).collect(),
                coefs: vec![1.0; shifts],
                sense: RowSense::Le,
                rhs: 0.0,
            });
        }
    }

    // C6: no morning after a night.
    if inst.policy.forbid_night_morning && horizon >= 2 {
        for n in 0..nurses {
            for d in 0..horizon - 1 {
                let mut cols = vec![idx(n, night, d), idx(n, morning, d + 1)];
                cols.sort_unstable();
                rows.push(Row {
                    tag: RowTag::new(Family::C6, &[('n', n), ('d', d)]),
                    cols,
                    coefs: vec![1.0, 1.0],
                    sense: RowSense::Le,
                    rhs: 1.0,
                });
            }
        }
    }

    // C7/C8/C9: coverage.
    let mut staff_at: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (n, nurse) in inst.nurses.iter().enumerate() {
        staff_at.entry((nurse.ward, nurse.rank)).or_default().push(n);
    }
    let staff = |w: usize, r: usize| -> &[usize] {
        staff_at.get(&(w, r)).map(|v| v.as_slice()).unwrap_or(&[])
    };
    let coverage_row = |family: Family,
                        w: usize,
                        r: usize,
                        s: usize,
                        d: usize,
                        ranks_in: &[usize],
                        sense: RowSense,
                        rhs: f64|
     -> Row {
        let mut cols: Vec<u32> = ranks_in
            .iter()
            .flat_map(|&rr| staff(w, rr).iter().map(|&n| idx(n, s, d)))
            .collect();
        cols.sort_unstable();
        Row {
            tag: RowTag::new(family, &[('w', w), ('r', r), ('s', s), ('d', d)]),
            coefs: vec![1.0; cols.len()],
            cols,
            sense,
            rhs,
        }
    };
    let top = inst.ranks - 1;
    match inst.policy.cascade_mode {
        CascadeMode::Off => {
            for w in 0..inst.wards {
                for r in 0..inst.ranks {
                    for s in 0..shifts {
                        for d in 0..horizon {
                            let m = inst.demand.get(w, r, s, d);
                            match inst.policy.coverage_mode {
                                CoverageMode::Exact => rows.push(coverage_row(
                                    Family::C7,
                                    w,
                                    r,
                                    s,
                                    d,
                                    &[r],
                                    RowSense::Eq,
                                    m as f64,
                                )),
                                CoverageMode::AtLeast => {
                                    if m > 0 {
                                        rows.push(coverage_row(
                                            Family::C8,
                                            w,
                                            r,
                                            s,
                                            d,
                                            &[r],
                                            RowSense::Ge,
                                            m as f64,
                                        ));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        CascadeMode::Adjacent => {
            // Plain coverage pins the top rank; every junior rank may draw
            // on the surplus of the rank directly above it.
            for w in 0..inst.wards {
                for s in 0..shifts {
                    for d in 0..horizon {
                        let m = inst.demand.get(w, top, s, d);
                        match inst.policy.coverage_mode {
                            CoverageMode::Exact => rows.push(coverage_row(
                                Family::C7,
                                w,
                                top,
                                s,
                                d,
                                &[top],
                                RowSense::Eq,
                                m as f64,
                            )),
                            CoverageMode::AtLeast => {
                                if m > 0 {
                                    rows.push(coverage_row(
                                        Family::C8,
                                        w,
                                        top,
                                        s,
                                        d,
                                        &[top],
                                        RowSense::Ge,
                                        m as f64,
                                    ));
                                }
                            }
                        }
                    }
                }
            }
            for w in 0..inst.wards {
                for r in 0..top {
                    for s in 0..shifts {
                        for d in 0..horizon {
                            let m_r = inst.demand.get(w, r, s, d);
                            if m_r == 0 {
                                continue;
                            }
                            let m_up = inst.demand.get(w, r + 1, s, d);
                            rows.push(coverage_row(
                                Family::C9,
                                w,
                                r,
                                s,
                                d,
                                &[r, r + 1],
                                RowSense::Ge,
                                (m_r + m_up) as f64,
                            ));
                        }
                    }
                }
            }
        }
        CascadeMode::Cumulative => {
            for w in 0..inst.wards {
                for r in 0..inst.ranks {
                    for s in 0..shifts {
                        for d in 0..horizon {
                            let suffix: u32 =
                                (r..inst.ranks).map(|rr| inst.demand.get(w, rr, s, d)).sum();
                            if suffix == 0 {
                                continue;
                            }
                            let ranks_in: Vec<usize> = (r..inst.ranks).collect();
                            rows.push(coverage_row(
                                Family::C9,
                                w,
                                r,
                                s,
                                d,
                                &ranks_in,
                                RowSense::Ge,
                                suffix as f64,
                            ));
                        }
                    }
                }
            }
        }
    }

    // C10: pinned shift counts.
    for (n, nurse) in inst.nurses.iter().enumerate() {
        match &nurse.required_shifts {
            Some(RequiredShifts::Total(e)) => {
                let cols: Vec<u32> = (0..shifts)
                    .flat_map(|s| (0..horizon).map(move |d| (s, d)))
                    .map(|(s, d)| idx(n, s, d))
                    .collect();
                rows.push(Row {
                    tag: RowTag::new(Family::C10, &[('n', n)]),
                    coefs: vec![1.0; cols.len()],
                    cols,
                    sense: RowSense::Eq,
                    rhs: *e as f64,
                });
            }
            Some(RequiredShifts::PerShift(map)) => {
                for (&s, &e) in map {
                    rows.push(Row {
                        tag: RowTag::new(Family::C10, &[('n', n), ('s', s)]),
                        cols: (0..horizon).map(|d| idx(n, s, d)).collect(),
                        coefs: vec![1.0; horizon],
                        sense: RowSense::Eq,
                        rhs: e as f64,
                    });
                }
            }
            None => {}
        }
    }

    // C11: hard PM → AM ban.
    if inst.policy.forbid_pm_am && horizon >= 2 {
        let pm = inst.shift_set.pm_index().expect("validated: pm rules need an afternoon shift");
        for n in 0..nurses {
            for d in 0..horizon - 1 {
                let mut cols = vec![idx(n, pm, d), idx(n, morning, d + 1)];
                cols.sort_unstable();
                rows.push(Row {
                    tag: RowTag::new(Family::C11, &[('n', n), ('d', d)]),
                    cols,
                    coefs: vec![1.0, 1.0],
                    sense: RowSense::Le,
                    rhs: 1.0,
                });
            }
        }
    }

    // C12, windowed form: at most m nights in any m+1 consecutive days.
    if let Some(m) = inst.policy.max_consecutive_nights {
        let len = m as usize + 1;
        if len <= horizon {
            for n in 0..nurses {
                for j in 0..=horizon - len {
                    rows.push(Row {
                        tag: RowTag::new(Family::C12, &[('n', n), ('d', j)]),
                        cols: (j..j + len).map(|d| idx(n, night, d)).collect(),
                        coefs: vec![1.0; len],
                        sense: RowSense::Le,
                        rhs: m as f64,
                    });
                }
            }
        }
    }
    // C12, horizon form: cap on total nights.
    if let Some(cap) = inst.policy.max_total_nights {
        for n in 0..nurses {
            rows.push(Row {
                tag: RowTag::new(Family::C12, &[('n', n)]),
                cols: (0..horizon).map(|d| idx(n, night, d)).collect(),
                coefs: vec![1.0; horizon],
                sense: RowSense::Le,
                rhs: cap as f64,
            });
        }
    }

    // Objective-link rows for the penalty columns.
    if inst.policy.soft_pm_am_weight.is_some() && horizon >= 2 {
        let pm = inst.shift_set.pm_index().expect("validated: pm rules need an afternoon shift");
        for (&(n, d), &z) in &pm_penalty_col {
            let mut cols = vec![idx(n, pm, d), idx(n, morning, d + 1)];
            cols.sort_unstable();
            cols.push(z);
            rows.push(Row {
                tag: RowTag::new(Family::LinkPmAm, &[('n', n), ('d', d)]),
                cols,
                coefs: vec![1.0, 1.0, -1.0],
                sense: RowSense::Le,
                rhs: 1.0,
            });
        }
    }
    if let Some(snr) = &inst.policy.soft_night_run {
        let j = snr.run_length as usize;
        if j <= horizon {
            for (&(n, d), &z) in &nr_penalty_col {
                let mut cols: Vec<u32> = (d..d + j).map(|t| idx(n, night, t)).collect();
                let mut coefs = vec![1.0; j];
                cols.push(z);
                coefs.push(-1.0);
                rows.push(Row {
                    tag: RowTag::new(Family::LinkNightRun, &[('n', n), ('d', d)]),
                    cols,
                    coefs,
                    sense: RowSense::Le,
                    rhs: (j - 1) as f64,
                });
            }
        }
    }

    Ok(IlpModel {
        name: inst.name.clone(),
        nurses,
        shifts,
        horizon,
        columns,
        n_assignment,
        rows,
        objective_sense,
        objective_constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        builtin_general_ward, builtin_li2003, random_instance, GenConfig, SoftNightRun,
    };
    use std::collections::BTreeSet;

    // ===== column indexing =====

    #[test]
    fn index_bijection_frozen_values() {
        let model = compile(&builtin_general_ward(0)).unwrap();
        // Column index formula: (n·|S| + s)·D + d.
        assert_eq!(model.index_of(0, 0, 0).unwrap(), 0);
        assert_eq!(model.index_of(0, 1, 0).unwrap(), 14);
        assert_eq!(model.index_of(19, 2, 13).unwrap(), 839);
        assert!(model.index_of(20, 0, 0).is_err());
        assert!(model.index_of(0, 3, 0).is_err());
        assert!(model.index_of(0, 0, 14).is_err());
    }

    #[test]
    fn index_round_trips_with_column_kind() {
        let model = compile(&builtin_li2003(0)).unwrap();
        for n in 0..27 {
            for s in 0..3 {
                for d in 0..7 {
                    let i = model.index_of(n, s, d).unwrap();
                    match model.columns[i].kind {
                        ColumnKind::Assignment { nurse, shift, day } => {
                            assert_eq!((nurse, shift, day), (n, s, d));
                        }
                        _ => panic!("assignment block holds a penalty column"),
                    }
                }
            }
        }
    }

    // ===== row counts =====

    #[test]
    fn general_ward_row_counts() {
        let model = compile(&builtin_general_ward(0)).unwrap();
        assert_eq!(model.n_assignment, 840);
        assert_eq!(model.columns.len(), 840);
        assert_eq!(model.family_row_count(Family::C1), 280); // N·D
        assert_eq!(model.family_row_count(Family::C2), 20); // N
        assert_eq!(model.family_row_count(Family::C3), 200); // N·(D−W+1)
        assert_eq!(model.family_row_count(Family::C4), 220); // N·(D−i−b+1)
        assert_eq!(model.family_row_count(Family::C6), 260); // N·(D−1)
        assert_eq!(model.family_row_count(Family::C10), 20);
        assert_eq!(model.family_row_count(Family::C7), 0);
        assert_eq!(model.family_row_count(Family::C11), 0);
        assert_eq!(model.family_row_count(Family::C12), 0);
    }

    #[test]
    fn li_row_counts() {
        let model = compile(&builtin_li2003(0)).unwrap();
        assert_eq!(model.n_assignment, 567);
        assert_eq!(model.family_row_count(Family::C1), 189); // 27·7
        assert_eq!(model.family_row_count(Family::C2), 27);
        assert_eq!(model.family_row_count(Family::C6), 162); // 27·6
        assert_eq!(model.family_row_count(Family::C7), 21); // exact: 1·1·3·7
        assert_eq!(model.family_row_count(Family::C12), 27); // horizon night cap
        assert_eq!(model.objective_sense, ObjectiveSense::Minimize);
        // Objective constant is the sum of the per-nurse cost constants.
        let inst = builtin_li2003(0);
        assert_eq!(model.objective_constant, inst.cost.constant_total());
    }

    // ===== ordering, tags, determinism =====

    #[test]
    fn rows_emitted_in_family_order_with_unique_tags() {
        for inst in [builtin_general_ward(0), builtin_li2003(0)] {
            let model = compile(&inst).unwrap();
            let mut seen = BTreeSet::new();
            let mut last_family = None;
            for row in &model.rows {
                let rendered = row.tag.to_string();
                assert!(seen.insert(rendered.clone()), "duplicate tag {rendered}");
                if let Some(last) = last_family {
                    assert!(row.tag.family >= last, "family order violated at {rendered}");
                }
                last_family = Some(row.tag.family);
            }
        }
    }

    #[test]
    fn compile_is_deterministic() {
        let inst = builtin_general_ward(5);
        assert_eq!(compile(&inst).unwrap(), compile(&inst).unwrap());
    }

    #[test]
    fn tag_renders_one_based() {
        let tag = RowTag::new(Family::C6, &[('n', 2), ('d', 6)]);
        assert_eq!(tag.to_string(), "C6_n3_d7");
    }

    #[test]
    fn emitted_families_match_expected() {
        let mut cfgs = Vec::new();
        for seed in 0..12u64 {
            let mut cfg = GenConfig::new(2 + (seed as usize % 2), 3, seed);
            cfg.ranks = 1 + (seed as usize % 2);
            cfg.window_rule = seed % 2 == 0;
            cfg.max_total_nights = if seed % 3 == 0 { Some(1) } else { None };
            cfg.soft_night_run =
                if seed % 4 == 0 { Some(SoftNightRun { run_length: 2, weight: 1.0 }) } else { None };
            cfg.soft_pm_am_weight = if seed % 4 == 1 { Some(2.0) } else { None };
            cfg.coverage_mode = if seed % 2 == 0 {
                crate::model::CoverageMode::AtLeast
            } else {
                crate::model::CoverageMode::Exact
            };
            cfg.cascade_mode = if cfg.ranks == 2 && seed % 3 == 1 {
                crate::model::CascadeMode::Adjacent
            } else if cfg.ranks == 2 && seed % 3 == 2 {
                crate::model::CascadeMode::Cumulative
            } else {
                crate::model::CascadeMode::Off
            };
            cfgs.push(cfg);
        }
        for cfg in cfgs {
            let inst = random_instance(&cfg);
            let model = compile(&inst).unwrap();
            let emitted: BTreeSet<Family> = model
                .rows
                .iter()
                .map(|r| r.tag.family)
                .collect();
            assert_eq!(emitted, expected_families(&inst), "cfg {cfg:?}");
        }
    }

    #[test]
    fn invalid_instance_rejected() {
        let mut inst = builtin_li2003(0);
        inst.horizon = 0;
        match compile(&inst) {
            Err(CompileError::InvalidInstance(errs)) => assert!(!errs.is_empty()),
            other => panic!("expected InvalidInstance, got {other:?}"),
        }
    }

    // ===== soft-rule compilation =====

    #[test]
    fn soft_rules_add_penalty_block() {
        let mut inst = builtin_li2003(0);
        inst.objective_mode = crate::model::ObjectiveMode::PenalizedCost;
        inst.policy.soft_pm_am_weight = Some(2.0);
        inst.policy.soft_night_run = Some(SoftNightRun { run_length: 3, weight: 4.0 });
        let model = compile(&inst).unwrap();
        assert_eq!(model.n_assignment, 567);
        // 27·6 PM→AM windows + 27·5 night-run windows.
        assert_eq!(model.columns.len(), 567 + 162 + 135);
        assert_eq!(model.family_row_count(Family::LinkPmAm), 162);
        assert_eq!(model.family_row_count(Family::LinkNightRun), 135);
        // Minimising: penalties enter with positive weight.
        let z_first = &model.columns[567];
        assert!(matches!(z_first.kind, ColumnKind::PmAmPenalty { nurse: 0, day: 0 }));
        assert_eq!(z_first.objective, 2.0);
        assert!(!z_first.integral);

        // Same rules under a maximising mode flip the penalty sign.
        let mut inst2 = builtin_general_ward(0);
        inst2.objective_mode = crate::model::ObjectiveMode::PenalizedUtility;
        inst2.policy.soft_pm_am_weight = Some(3.0);
        let model2 = compile(&inst2).unwrap();
        let z = model2
            .columns
            .iter()
            .find(|c| matches!(c.kind, ColumnKind::PmAmPenalty { .. }))
            .unwrap();
        assert_eq!(z.objective, -3.0);
    }

    #[test]
    fn extend_with_penalties_reads_patterns() {
        // One nurse, two days, PM on day 1 then AM on day 2 → penalty 1.
        let mut cfg = GenConfig::new(1, 2, 0);
        cfg.soft_pm_am_weight = Some(5.0);
        cfg.demand_density = 0.0;
        cfg.leave_prob = 0.0;
        let inst = random_instance(&cfg);
        let model = compile(&inst).unwrap();
        let mut assignment = vec![0.0; model.n_assignment];
        assignment[model.index_of(0, 1, 0).unwrap()] = 1.0; // PM day 1
        assignment[model.index_of(0, 0, 1).unwrap()] = 1.0; // AM day 2
        let full = model.extend_with_penalties(&assignment);
        let z = model
            .columns
            .iter()
            .position(|c| matches!(c.kind, ColumnKind::PmAmPenalty { nurse: 0, day: 0 }))
            .unwrap();
        assert_eq!(full[z], 1.0);

        // Breaking the pattern zeroes the penalty.
        assignment[model.index_of(0, 0, 1).unwrap()] = 0.0;
        let full = model.extend_with_penalties(&assignment);
        assert_eq!(full[z], 0.0);
    }
}
