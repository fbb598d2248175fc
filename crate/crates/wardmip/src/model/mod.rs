//! Problem data for ward staffing: shifts, nurses, demand, weights, policy.
//!
//! A [`ProblemInstance`] is a declarative description of a rostering
//! problem over a fixed horizon of days. Indices are 0-based everywhere in
//! memory; the file formats in [`crate::io`] are 1-based.

mod builtin;

pub use builtin::{builtin_general_ward, builtin_li2003, random_instance, GenConfig};

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// The shift catalogue for one instance.
///
/// `morning` and `night` identify the shifts referenced by the rest rules
/// (night → morning bans, night blocks, night caps). For three-shift sets
/// the remaining index is the afternoon ("PM") shift used by the PM → AM
/// rules; see [`ShiftSet::pm_index`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftSet {
    /// Display labels, one per shift (e.g. `["AM", "PM", "MN"]`).
    pub labels: Vec<String>,
    /// Index of the morning shift.
    pub morning: usize,
    /// Index of the night shift.
    pub night: usize,
}

impl ShiftSet {
    /// The conventional three-shift day: AM / PM / MN.
    pub fn standard() -> Self {
        ShiftSet {
            labels: vec!["AM".into(), "PM".into(), "MN".into()],
            morning: 0,
            night: 2,
        }
    }

    /// Number of shifts per day.
    #[inline]
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// True when the catalogue is empty (an invalid state).
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// The afternoon shift: the unique index that is neither morning nor
    /// night. Defined only for three-shift sets.
    pub fn pm_index(&self) -> Option<usize> {
        if self.len() != 3 || self.morning == self.night {
            return None;
        }
        (0..3).find(|&s| s != self.morning && s != self.night)
    }
}

/// How many shifts a nurse must work over the horizon (when pinned).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RequiredShifts {
    /// Total assignments over all shift types.
    Total(u32),
    /// Exact count per shift type (shift index → count).
    PerShift(BTreeMap<usize, u32>),
}

/// One member of staff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Nurse {
    /// Stable identifier, unique within the instance.
    pub id: String,
    /// Rank level, `0` = most junior.
    pub rank: usize,
    /// Home ward index.
    pub ward: usize,
    /// Days (0-based) on which this nurse must not work.
    pub leave_days: BTreeSet<usize>,
    /// Optional pinned workload.
    pub required_shifts: Option<RequiredShifts>,
}

/// Required head-count per (ward, rank, shift, day). Missing cells are 0.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DemandTable {
    entries: BTreeMap<(usize, usize, usize, usize), u32>,
}

impl DemandTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Demand for a cell; unlisted cells demand nobody.
    #[inline]
    pub fn get(&self, ward: usize, rank: usize, shift: usize, day: usize) -> u32 {
        self.entries.get(&(ward, rank, shift, day)).copied().unwrap_or(0)
    }

    /// Set a cell; a count of zero removes the entry.
    pub fn set(&mut self, ward: usize, rank: usize, shift: usize, day: usize, count: u32) {
        if count == 0 {
            self.entries.remove(&(ward, rank, shift, day));
        } else {
            self.entries.insert((ward, rank, shift, day), count);
        }
    }

    /// Iterate non-zero cells in key order.
    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize, usize, usize), &u32)> {
        self.entries.iter()
    }

    /// Sum of all demanded head-counts.
    pub fn total(&self) -> u64 {
        self.entries.values().map(|&c| c as u64).sum()
    }

    /// Sum of demand across all wards/ranks/shifts for one day.
    pub fn day_total(&self, day: usize) -> u64 {
        self.entries
            .iter()
            .filter(|((_, _, _, d), _)| *d == day)
            .map(|(_, &c)| c as u64)
            .sum()
    }
}

/// A sparse (nurse, shift, day) → weight table with a fill-in default and a
/// per-nurse constant term. Serves as both the preference table (utility
/// objectives) and the cost table (cost objectives).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightTable {
    /// Weight used for cells not listed in `values`.
    pub default: f64,
    /// Explicit cell weights keyed by (nurse, shift, day).
    pub values: BTreeMap<(usize, usize, usize), f64>,
    /// Per-nurse constant added to the objective (nurse → value).
    pub per_nurse_constant: BTreeMap<usize, f64>,
}

/// Table of per-cell utilities (alias of [`WeightTable`]).
pub type PreferenceTable = WeightTable;
/// Table of per-cell costs (alias of [`WeightTable`]).
pub type CostTable = WeightTable;

impl Default for WeightTable {
    fn default() -> Self {
        WeightTable { default: 0.0, values: BTreeMap::new(), per_nurse_constant: BTreeMap::new() }
    }
}

impl WeightTable {
    /// A table giving every cell the same weight.
    pub fn uniform(default: f64) -> Self {
        WeightTable { default, ..WeightTable::default() }
    }

    /// Weight of one cell, falling back to the default.
    #[inline]
    pub fn get(&self, nurse: usize, shift: usize, day: usize) -> f64 {
        self.values.get(&(nurse, shift, day)).copied().unwrap_or(self.default)
    }

    /// Constant term for one nurse (0 when unlisted).
    #[inline]
    pub fn constant(&self, nurse: usize) -> f64 {
        self.per_nurse_constant.get(&nurse).copied().unwrap_or(0.0)
    }

    /// Sum of all per-nurse constants.
    pub fn constant_total(&self) -> f64 {
        self.per_nurse_constant.values().sum()
    }
}

/// In any window of `window` consecutive days, at most `max_worked` days
/// may be worked.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowRule {
    pub window: u32,
    pub max_worked: u32,
}

/// After `nights` consecutive night shifts, the following `off_after` days
/// must be entirely off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NightBlock {
    pub nights: u32,
    pub off_after: u32,
}

/// Soft rule: penalise every run of `run_length` consecutive night shifts
/// by `weight`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoftNightRun {
    pub run_length: u32,
    pub weight: f64,
}

/// Whether coverage rows demand exact head-counts or minimums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverageMode {
    Exact,
    AtLeast,
}

/// How surplus staff of senior ranks may stand in for junior demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CascadeMode {
    /// Each rank covers only its own demand.
    Off,
    /// Surplus from rank r+1 may cover rank r.
    Adjacent,
    /// Every rank's demand may be covered by that rank or any senior one.
    Cumulative,
}

/// The ward's working rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyConfig {
    /// Maximum days worked per nurse over the horizon (`y`).
    pub max_work_days: u32,
    /// Sliding-window workload caps.
    pub window_rules: Vec<WindowRule>,
    /// Mandatory rest after a block of consecutive nights.
    pub night_block: Option<NightBlock>,
    /// At most this many nights in any window one day longer.
    pub max_consecutive_nights: Option<u32>,
    /// At most this many nights over the whole horizon.
    pub max_total_nights: Option<u32>,
    /// Hard ban on a night shift followed by a morning shift.
    pub forbid_night_morning: bool,
    /// Hard ban on an afternoon shift followed by a morning shift.
    pub forbid_pm_am: bool,
    /// Soft version of the PM → AM rule: penalty weight per occurrence.
    pub soft_pm_am_weight: Option<f64>,
    /// Soft night-run rule: penalty per run of the given length.
    pub soft_night_run: Option<SoftNightRun>,
    pub coverage_mode: CoverageMode,
    pub cascade_mode: CascadeMode,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        PolicyConfig {
            max_work_days: u32::MAX,
            window_rules: Vec::new(),
            night_block: None,
            max_consecutive_nights: None,
            max_total_nights: None,
            forbid_night_morning: false,
            forbid_pm_am: false,
            soft_pm_am_weight: None,
            soft_night_run: None,
            coverage_mode: CoverageMode::AtLeast,
            cascade_mode: CascadeMode::Off,
        }
    }
}

impl PolicyConfig {
    /// A policy with every optional rule off and the workload cap set to
    /// the whole horizon (the loosest cap that still validates).
    ///
    /// The bare [`Default`] leaves `max_work_days` at a sentinel that
    /// fails validation on purpose, so struct-update users must pick a
    /// real cap; this is the convenient way to pick the loosest one.
    pub fn unrestricted(horizon: usize) -> Self {
        PolicyConfig { max_work_days: horizon as u32, ..PolicyConfig::default() }
    }
}

/// Which objective the solver optimises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveMode {
    /// Maximise total preference weight of the assignment.
    MaximizeUtility,
    /// Minimise total cost: per-nurse constants minus cell cost reductions.
    MinimizeCost,
    /// `MaximizeUtility` with soft-rule penalties subtracted.
    PenalizedUtility,
    /// `MinimizeCost` with soft-rule penalties added.
    PenalizedCost,
}

/// A complete rostering problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    /// Human-readable instance name (used in exports and reports).
    pub name: String,
    /// Number of days `D` in the planning horizon.
    pub horizon: usize,
    pub shift_set: ShiftSet,
    /// Number of rank levels; ranks are `0..ranks`.
    pub ranks: usize,
    /// Number of wards; wards are `0..wards`.
    pub wards: usize,
    pub nurses: Vec<Nurse>,
    pub demand: DemandTable,
    pub preference: PreferenceTable,
    pub cost: CostTable,
    pub policy: PolicyConfig,
    pub objective_mode: ObjectiveMode,
}

impl ProblemInstance {
    /// Number of nurses.
    #[inline]
    pub fn nurse_count(&self) -> usize {
        self.nurses.len()
    }

    /// Number of shift types per day.
    #[inline]
    pub fn shift_count(&self) -> usize {
        self.shift_set.len()
    }

    /// Total number of 0-1 assignment variables (`N · |S| · D`).
    #[inline]
    pub fn cell_count(&self) -> usize {
        self.nurse_count() * self.shift_count() * self.horizon
    }
}

// ===== structural validation =====

/// One structural defect found by [`validate_instance`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InstanceError {
    #[error("horizon must be at least 1 day")]
    HorizonZero,
    #[error("shift set is empty")]
    EmptyShiftSet,
    #[error("{role} shift index {index} out of range (have {len} shifts)")]
    ShiftIndexOutOfRange { role: &'static str, index: usize, len: usize },
    #[error("morning and night point at the same shift but a rule distinguishing them is enabled")]
    MorningNightSameShift,
    #[error("{rule} requires a three-shift set with distinct morning/night (no afternoon shift identifiable)")]
    PmRuleNeedsAfternoon { rule: &'static str },
    #[error("instance declares {field} = 0")]
    ZeroDimension { field: &'static str },
    #[error("instance has no nurses")]
    NoNurses,
    #[error("nurse {index} reuses id {id:?}")]
    DuplicateNurseId { index: usize, id: String },
    #[error("nurse {nurse} has rank {value} but instance declares {limit} ranks")]
    NurseRankOutOfRange { nurse: usize, value: usize, limit: usize },
    #[error("nurse {nurse} has ward {value} but instance declares {limit} wards")]
    NurseWardOutOfRange { nurse: usize, value: usize, limit: usize },
    #[error("nurse {nurse} has leave day {day} outside horizon of {horizon} days")]
    LeaveDayOutOfRange { nurse: usize, day: usize, horizon: usize },
    #[error("nurse {nurse} requires {total} shifts in a {horizon}-day horizon")]
    RequiredTotalExceedsHorizon { nurse: usize, total: u32, horizon: usize },
    #[error("nurse {nurse} requires shifts of unknown type {shift}")]
    RequiredShiftOutOfRange { nurse: usize, shift: usize },
    #[error("demand cell ({ward}, {rank}, {shift}, {day}) has {dimension} out of range")]
    DemandIndexOutOfRange { ward: usize, rank: usize, shift: usize, day: usize, dimension: &'static str },
    #[error("{table} entry ({nurse}, {shift}, {day}) has {dimension} out of range")]
    WeightIndexOutOfRange { table: &'static str, nurse: usize, shift: usize, day: usize, dimension: &'static str },
    #[error("{table} {location} is not a finite number")]
    NonFiniteWeight { table: &'static str, location: String },
    #[error("policy {field}: {message}")]
    PolicyValue { field: &'static str, message: String },
}

/// Check an instance for structural problems.
///
/// Returns an empty list exactly when every index referenced by the
/// subordinate tables is valid, ids are unique, weights are finite and the
/// policy's numeric parameters are coherent. The listing order is
/// deterministic: instance-level fields first, then the shift set, the
/// policy, nurses in index order, demand cells in key order, and finally
/// the two weight tables.
pub fn validate_instance(inst: &ProblemInstance) -> Vec<InstanceError> {
    let mut errs = Vec::new();
    let horizon = inst.horizon;
    let shifts = inst.shift_set.len();

    if horizon == 0 {
        errs.push(InstanceError::HorizonZero);
    }
    if inst.ranks == 0 {
        errs.push(InstanceError::ZeroDimension { field: "ranks" });
    }
    if inst.wards == 0 {
        errs.push(InstanceError::ZeroDimension { field: "wards" });
    }
    if inst.nurses.is_empty() {
        errs.push(InstanceError::NoNurses);
    }

    // Shift set.
    if inst.shift_set.is_empty() {
        errs.push(InstanceError::EmptyShiftSet);
    } else {
        if inst.shift_set.morning >= shifts {
            errs.push(InstanceError::ShiftIndexOutOfRange {
                role: "morning",
                index: inst.shift_set.morning,
                len: shifts,
            });
        }
        if inst.shift_set.night >= shifts {
            errs.push(InstanceError::ShiftIndexOutOfRange {
                role: "night",
                index: inst.shift_set.night,
                len: shifts,
            });
        }
        let needs_both = inst.policy.forbid_night_morning;
        if needs_both && inst.shift_set.morning == inst.shift_set.night {
            errs.push(InstanceError::MorningNightSameShift);
        }
        if inst.policy.forbid_pm_am && inst.shift_set.pm_index().is_none() {
            errs.push(InstanceError::PmRuleNeedsAfternoon { rule: "forbid_pm_am" });
        }
        if inst.policy.soft_pm_am_weight.is_some() && inst.shift_set.pm_index().is_none() {
            errs.push(InstanceError::PmRuleNeedsAfternoon { rule: "soft_pm_am_weight" });
        }
    }

    // Policy numerics.
    if horizon > 0 && inst.policy.max_work_days as usize > horizon {
        errs.push(InstanceError::PolicyValue {
            field: "max_work_days",
            message: format!(
                "cap {} exceeds the {horizon}-day horizon",
                inst.policy.max_work_days
            ),
        });
    }
    for (k, rule) in inst.policy.window_rules.iter().enumerate() {
        if rule.window == 0 {
            errs.push(InstanceError::PolicyValue {
                field: "window_rules",
                message: format!("rule {k} has window length 0"),
            });
        } else if horizon > 0 && rule.window as usize > horizon {
            errs.push(InstanceError::PolicyValue {
                field: "window_rules",
                message: format!("rule {k} window {} exceeds horizon {horizon}", rule.window),
            });
        }
        if rule.max_worked >= rule.window && rule.window > 0 {
            errs.push(InstanceError::PolicyValue {
                field: "window_rules",
                message: format!(
                    "rule {k} allows {} worked days in a {}-day window (never binding)",
                    rule.max_worked, rule.window
                ),
            });
        }
    }
    if let Some(nb) = &inst.policy.night_block {
        if nb.nights == 0 {
            errs.push(InstanceError::PolicyValue {
                field: "night_block",
                message: "requires at least 1 night".into(),
            });
        }
        if nb.off_after == 0 {
            errs.push(InstanceError::PolicyValue {
                field: "night_block",
                message: "requires at least 1 off day after the block".into(),
            });
        }
    }
    if let Some(w) = inst.policy.soft_pm_am_weight {
        if !w.is_finite() || w < 0.0 {
            errs.push(InstanceError::PolicyValue {
                field: "soft_pm_am_weight",
                message: format!("weight {w} must be finite and non-negative"),
            });
        }
    }
    if let Some(snr) = &inst.policy.soft_night_run {
        if snr.run_length == 0 {
            errs.push(InstanceError::PolicyValue {
                field: "soft_night_run",
                message: "run length must be at least 1".into(),
            });
        }
        if !snr.weight.is_finite() || snr.weight < 0.0 {
            errs.push(InstanceError::PolicyValue {
                field: "soft_night_run",
                message: format!("weight {} must be finite and non-negative", snr.weight),
            });
        }
    }

    // Nurses.
    let mut seen_ids: BTreeSet<&str> = BTreeSet::new();
    for (i, nurse) in inst.nurses.iter().enumerate() {
        if !seen_ids.insert(nurse.id.as_str()) {
            errs.push(InstanceError::DuplicateNurseId { index: i, id: nurse.id.clone() });
        }
        if nurse.rank >= inst.ranks {
            errs.push(InstanceError::NurseRankOutOfRange {
                nurse: i,
                value: nurse.rank,
                limit: inst.ranks,
            });
        }
        if nurse.ward >= inst.wards {
            errs.push(InstanceError::NurseWardOutOfRange {
                nurse: i,
                value: nurse.ward,
                limit: inst.wards,
            });
        }
        for &day in &nurse.leave_days {
            if day >= horizon {
                errs.push(InstanceError::LeaveDayOutOfRange { nurse: i, day, horizon });
            }
        }
        match &nurse.required_shifts {
            Some(RequiredShifts::Total(total)) => {
                if *total as usize > horizon {
                    errs.push(InstanceError::RequiredTotalExceedsHorizon {
                        nurse: i,
                        total: *total,
                        horizon,
                    });
                }
            }
            Some(RequiredShifts::PerShift(map)) => {
                for (&shift, &count) in map {
                    if shift >= shifts {
                        errs.push(InstanceError::RequiredShiftOutOfRange { nurse: i, shift });
                    }
                    if count as usize > horizon {
                        errs.push(InstanceError::RequiredTotalExceedsHorizon {
                            nurse: i,
                            total: count,
                            horizon,
                        });
                    }
                }
            }
            None => {}
        }
    }

    // Demand.
    for (&(ward, rank, shift, day), _) in inst.demand.iter() {
        let dimension = if ward >= inst.wards {
            Some("ward")
        } else if rank >= inst.ranks {
            Some("rank")
        } else if shift >= shifts {
            Some("shift")
        } else if day >= horizon {
            Some("day")
        } else {
            None
        };
        if let Some(dimension) = dimension {
            errs.push(InstanceError::DemandIndexOutOfRange { ward, rank, shift, day, dimension });
        }
    }

    // Weight tables.
    for (table, t) in [("preference", &inst.preference), ("cost", &inst.cost)] {
        if !t.default.is_finite() {
            errs.push(InstanceError::NonFiniteWeight { table, location: "default".into() });
        }
        for (&(nurse, shift, day), &v) in &t.values {
            let dimension = if nurse >= inst.nurses.len() {
                Some("nurse")
            } else if shift >= shifts {
                Some("shift")
            } else if day >= horizon {
                Some("day")
            } else {
                None
            };
            if let Some(dimension) = dimension {
                errs.push(InstanceError::WeightIndexOutOfRange { table, nurse, shift, day, dimension });
            }
            if !v.is_finite() {
                errs.push(InstanceError::NonFiniteWeight {
                    table,
                    location: format!("entry ({nurse}, {shift}, {day})"),
                });
            }
        }
        for (&nurse, &v) in &t.per_nurse_constant {
            if nurse >= inst.nurses.len() {
                errs.push(InstanceError::WeightIndexOutOfRange {
                    table,
                    nurse,
                    shift: 0,
                    day: 0,
                    dimension: "nurse (constant)",
                });
            }
            if !v.is_finite() {
                errs.push(InstanceError::NonFiniteWeight {
                    table,
                    location: format!("constant for nurse {nurse}"),
                });
            }
        }
    }

    errs
}

// ===== capacity screen =====

/// A day whose demand cannot be met even if every available nurse works.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DayGap {
    /// 0-based day index.
    pub day: usize,
    /// Total head-count demanded that day (all wards/ranks/shifts).
    pub demand: u64,
    /// Nurses not on leave that day.
    pub available: u64,
}

impl fmt::Display for DayGap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "day {}: demand {} exceeds {} available nurses",
            self.day + 1,
            self.demand,
            self.available
        )
    }
}

/// Cheap necessary-condition feasibility report; see [`capacity_screen`].
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityReport {
    /// Sum of all demand cells.
    pub total_demand: u64,
    /// Upper bound on deliverable assignments:
    /// `Σ_n min(max_work_days, horizon − |leave_n|)`.
    pub total_capacity: u64,
    /// Days where demand exceeds the number of available nurses.
    pub per_day_gap: Vec<DayGap>,
}

impl CapacityReport {
    /// True when the screen already proves the instance infeasible.
    pub fn has_gap(&self) -> bool {
        !self.per_day_gap.is_empty() || self.total_capacity < self.total_demand
    }
}

/// Compare demanded head-counts against deliverable supply.
///
/// This is a sound necessary condition: every nurse works at most one
/// shift per day, never on leave and at most `max_work_days` days overall,
/// so a day whose demand exceeds its available nurses — or a total demand
/// exceeding total capacity — can never be covered, in any coverage or
/// cascade mode. The screen never flags an instance the solver can prove
/// feasible.
pub fn capacity_screen(inst: &ProblemInstance) -> CapacityReport {
    let horizon = inst.horizon;
    let total_demand = inst.demand.total();
    let total_capacity: u64 = inst
        .nurses
        .iter()
        .map(|n| {
            let leave = n.leave_days.iter().filter(|&&d| d < horizon).count();
            (horizon - leave).min(inst.policy.max_work_days as usize) as u64
        })
        .sum();

    let mut per_day_gap = Vec::new();
    for day in 0..horizon {
        let demand = inst.demand.day_total(day);
        let available =
            inst.nurses.iter().filter(|n| !n.leave_days.contains(&day)).count() as u64;
        if demand > available {
            per_day_gap.push(DayGap { day, demand, available });
        }
    }

    CapacityReport { total_demand, total_capacity, per_day_gap }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_instance() -> ProblemInstance {
        let mut demand = DemandTable::new();
        demand.set(0, 0, 0, 0, 1);
        ProblemInstance {
            name: "tiny".into(),
            horizon: 2,
            shift_set: ShiftSet::standard(),
            ranks: 1,
            wards: 1,
            nurses: vec![Nurse {
                id: "n01".into(),
                rank: 0,
                ward: 0,
                leave_days: BTreeSet::new(),
                required_shifts: None,
            }],
            demand,
            preference: WeightTable::default(),
            cost: WeightTable::default(),
            policy: PolicyConfig { max_work_days: 2, ..PolicyConfig::default() },
            objective_mode: ObjectiveMode::MaximizeUtility,
        }
    }

    #[test]
    fn standard_shift_set_identifies_pm() {
        let s = ShiftSet::standard();
        assert_eq!(s.len(), 3);
        assert_eq!(s.morning, 0);
        assert_eq!(s.night, 2);
        assert_eq!(s.pm_index(), Some(1));
    }

    #[test]
    fn pm_index_undefined_off_three_shifts() {
        let mut s = ShiftSet::standard();
        s.labels.push("EV".into());
        assert_eq!(s.pm_index(), None);
        let two = ShiftSet { labels: vec!["A".into(), "B".into()], morning: 0, night: 1 };
        assert_eq!(two.pm_index(), None);
    }

    #[test]
    fn valid_instance_passes() {
        assert_eq!(validate_instance(&tiny_instance()), Vec::new());
    }

    #[test]
    fn leave_day_at_horizon_is_one_error() {
        let mut inst = tiny_instance();
        inst.nurses[0].leave_days.insert(2); // horizon is 2, days are 0..2
        let errs = validate_instance(&inst);
        assert_eq!(errs, vec![InstanceError::LeaveDayOutOfRange { nurse: 0, day: 2, horizon: 2 }]);
    }

    #[test]
    fn duplicate_nurse_id_is_one_error() {
        let mut inst = tiny_instance();
        let mut clone = inst.nurses[0].clone();
        clone.rank = 0;
        inst.nurses.push(clone);
        let errs = validate_instance(&inst);
        assert_eq!(
            errs,
            vec![InstanceError::DuplicateNurseId { index: 1, id: "n01".into() }]
        );
    }

    #[test]
    fn horizon_zero_flagged() {
        let mut inst = tiny_instance();
        inst.horizon = 0;
        let errs = validate_instance(&inst);
        assert!(errs.contains(&InstanceError::HorizonZero));
    }

    #[test]
    fn out_of_range_demand_flagged() {
        let mut inst = tiny_instance();
        inst.demand.set(0, 0, 7, 0, 1);
        let errs = validate_instance(&inst);
        assert_eq!(
            errs,
            vec![InstanceError::DemandIndexOutOfRange {
                ward: 0,
                rank: 0,
                shift: 7,
                day: 0,
                dimension: "shift"
            }]
        );
    }

    #[test]
    fn window_rule_never_binding_flagged() {
        let mut inst = tiny_instance();
        inst.policy.window_rules.push(WindowRule { window: 2, max_worked: 2 });
        let errs = validate_instance(&inst);
        assert_eq!(errs.len(), 1);
        assert!(matches!(errs[0], InstanceError::PolicyValue { field: "window_rules", .. }));
    }

    #[test]
    fn capacity_screen_counts_leave() {
        let mut inst = tiny_instance();
        inst.nurses[0].leave_days.insert(0);
        // Demand 1 on day 0 but the only nurse is on leave.
        let report = capacity_screen(&inst);
        assert_eq!(report.total_demand, 1);
        assert_eq!(report.total_capacity, 1); // min(2, 2 - 1)
        assert_eq!(
            report.per_day_gap,
            vec![DayGap { day: 0, demand: 1, available: 0 }]
        );
        assert!(report.has_gap());
    }

    #[test]
    fn capacity_screen_clean_when_supply_suffices() {
        let report = capacity_screen(&tiny_instance());
        assert_eq!(report.total_demand, 1);
        assert_eq!(report.total_capacity, 2);
        assert!(report.per_day_gap.is_empty());
        assert!(!report.has_gap());
    }
}
