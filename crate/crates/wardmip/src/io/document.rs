//! The canonical instance document.
//!
//! Instances travel as JSON-syntax text with a `format` tag and a
//! `version` number. The document mirrors [`ProblemInstance`]
//! field-for-field but uses **1-based** day, shift, nurse, rank and ward
//! indices, because the files are meant to be read and edited by
//! planners counting from one.
//!
//! [`write_instance`] is canonical: object keys are sorted, entries are
//! emitted in a fixed order, scalar arrays are inlined, and the same
//! instance always produces byte-identical text. [`read_instance`]
//! accepts any JSON layout (it parses, not merely un-canonicalizes) and
//! finishes by running [`validate_instance`], so a document that parses
//! still fails loudly when it describes a broken instance.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::IoError;
use crate::model::{
    validate_instance, CascadeMode, CoverageMode, DemandTable, NightBlock, Nurse, ObjectiveMode,
    PolicyConfig, ProblemInstance, RequiredShifts, ShiftSet, SoftNightRun, WeightTable,
    WindowRule,
};

/// Value of the document's `format` field.
pub const FORMAT_TAG: &str = "wardmip-instance";
/// Newest document version this library reads and the one it writes.
pub const FORMAT_VERSION: u32 = 1;

// ===== document shape ======================================================
//
// Small serde mirrors rather than the model types themselves, so the file
// format is decoupled from in-memory layout and every struct can reject
// unknown fields by name.

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocRoot {
    format: String,
    version: u32,
    name: String,
    horizon: usize,
    shifts: DocShifts,
    ranks: usize,
    wards: usize,
    nurses: Vec<DocNurse>,
    demand: Vec<DocDemand>,
    preference: DocWeights,
    cost: DocWeights,
    policy: DocPolicy,
    objective: ObjectiveMode,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocShifts {
    labels: Vec<String>,
    /// 1-based index into `labels`.
    morning: usize,
    /// 1-based index into `labels`.
    night: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocNurse {
    id: String,
    /// 1-based rank (1 = most junior).
    rank: usize,
    /// 1-based ward.
    ward: usize,
    /// 1-based days, ascending.
    leave_days: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    required_shifts: Option<DocRequired>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum DocRequired {
    Total(u32),
    /// 1-based shift index (as a decimal string key) → exact count.
    PerShift(BTreeMap<String, u32>),
}

/// One demanded staffing line: head-counts per shift for a
/// (ward, rank, day) cell. `counts[s]` demands that many nurses on the
/// 1-based shift `s + 1`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocDemand {
    ward: usize,
    rank: usize,
    day: usize,
    counts: Vec<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocWeights {
    default: f64,
    /// 1-based nurse index (decimal string key) → constant term.
    per_nurse_constant: BTreeMap<String, f64>,
    overrides: Vec<DocOverride>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocOverride {
    nurse: usize,
    shift: usize,
    day: usize,
    value: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocWindowRule {
    window: u32,
    max_worked: u32,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocNightBlock {
    nights: u32,
    off_after: u32,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocSoftNightRun {
    run_length: u32,
    weight: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocPolicy {
    max_work_days: u32,
    window_rules: Vec<DocWindowRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    night_block: Option<DocNightBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_consecutive_nights: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_total_nights: Option<u32>,
    forbid_night_morning: bool,
    forbid_pm_am: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    soft_pm_am_weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    soft_night_run: Option<DocSoftNightRun>,
    coverage_mode: CoverageMode,
    cascade_mode: CascadeMode,
}

// ===== writing =============================================================

/// Serialize an instance to its canonical document.
///
/// Canonical means: keys sorted, demand/override/leave entries in a fixed
/// ascending order, scalar arrays inlined, LF line endings — the same
/// instance yields byte-identical text on every run.
///
/// Expects a structurally valid instance (in particular, finite weights);
/// feed untrusted data through [`validate_instance`] first.
pub fn write_instance(inst: &ProblemInstance) -> String {
    let doc = DocRoot::from_instance(inst);
    let value = serde_json::to_value(&doc).expect("valid instances have finite weights");
    let mut out = String::new();
    write_canonical(&mut out, &value, 0);
    out.push('\n');
    out
}

/// Render a JSON value with sorted keys (the `serde_json` map is already
/// ordered), two-space indentation and inline scalar arrays.
fn write_canonical(out: &mut String, value: &Value, indent: usize) {
    match value {
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            let inner = indent + 1;
            for (i, (key, val)) in map.iter().enumerate() {
                for _ in 0..inner * 2 {
                    out.push(' ');
                }
                out.push_str(&serde_json::to_string(key).expect("string serializes"));
                out.push_str(": ");
                write_canonical(out, val, inner);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            for _ in 0..indent * 2 {
                out.push(' ');
            }
            out.push('}');
        }
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(is_scalar) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&serde_json::to_string(item).expect("scalar serializes"));
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            let inner = indent + 1;
            for (i, item) in items.iter().enumerate() {
                for _ in 0..inner * 2 {
                    out.push(' ');
                }
                write_canonical(out, item, inner);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            for _ in 0..indent * 2 {
                out.push(' ');
            }
            out.push(']');
        }
        scalar => out.push_str(&serde_json::to_string(scalar).expect("scalar serializes")),
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Object(_) | Value::Array(_))
}

impl DocRoot {
    fn from_instance(inst: &ProblemInstance) -> Self {
        // Group the sparse (ward, rank, shift, day) cells into per-shift
        // count lines keyed by (ward, rank, day); the BTreeMap fixes the
        // emission order.
        let shifts = inst.shift_set.len();
        let mut demand_lines: BTreeMap<(usize, usize, usize), Vec<u32>> = BTreeMap::new();
        for (&(ward, rank, shift, day), &count) in inst.demand.iter() {
            demand_lines.entry((ward, rank, day)).or_insert_with(|| vec![0; shifts])[shift] =
                count;
        }

        DocRoot {
            format: FORMAT_TAG.to_string(),
            version: FORMAT_VERSION,
            name: inst.name.clone(),
            horizon: inst.horizon,
            shifts: DocShifts {
                labels: inst.shift_set.labels.clone(),
                morning: inst.shift_set.morning + 1,
                night: inst.shift_set.night + 1,
            },
            ranks: inst.ranks,
            wards: inst.wards,
            nurses: inst
                .nurses
                .iter()
                .map(|n| DocNurse {
                    id: n.id.clone(),
                    rank: n.rank + 1,
                    ward: n.ward + 1,
                    leave_days: n.leave_days.iter().map(|&d| d + 1).collect(),
                    required_shifts: n.required_shifts.as_ref().map(|r| match r {
                        RequiredShifts::Total(t) => DocRequired::Total(*t),
                        RequiredShifts::PerShift(map) => DocRequired::PerShift(
                            map.iter().map(|(&s, &c)| ((s + 1).to_string(), c)).collect(),
                        ),
                    }),
                })
                .collect(),
            demand: demand_lines
                .into_iter()
                .map(|((ward, rank, day), counts)| DocDemand {
                    ward: ward + 1,
                    rank: rank + 1,
                    day: day + 1,
                    counts,
                })
                .collect(),
            preference: DocWeights::from_table(&inst.preference),
            cost: DocWeights::from_table(&inst.cost),
            policy: DocPolicy::from_policy(&inst.policy),
            objective: inst.objective_mode,
        }
    }
}

impl DocWeights {
    fn from_table(table: &WeightTable) -> Self {
        DocWeights {
            default: table.default,
            per_nurse_constant: table
                .per_nurse_constant
                .iter()
                .map(|(&n, &v)| ((n + 1).to_string(), v))
                .collect(),
            overrides: table
                .values
                .iter()
                .map(|(&(nurse, shift, day), &value)| DocOverride {
                    nurse: nurse + 1,
                    shift: shift + 1,
                    day: day + 1,
                    value,
                })
                .collect(),
        }
    }
}

impl DocPolicy {
    fn from_policy(p: &PolicyConfig) -> Self {
        DocPolicy {
            max_work_days: p.max_work_days,
            window_rules: p
                .window_rules
                .iter()
                .map(|r| DocWindowRule { window: r.window, max_worked: r.max_worked })
                .collect(),
            night_block: p
                .night_block
                .map(|b| DocNightBlock { nights: b.nights, off_after: b.off_after }),
            max_consecutive_nights: p.max_consecutive_nights,
            max_total_nights: p.max_total_nights,
            forbid_night_morning: p.forbid_night_morning,
            forbid_pm_am: p.forbid_pm_am,
            soft_pm_am_weight: p.soft_pm_am_weight,
            soft_night_run: p
                .soft_night_run
                .map(|s| DocSoftNightRun { run_length: s.run_length, weight: s.weight }),
            coverage_mode: p.coverage_mode,
            cascade_mode: p.cascade_mode,
        }
    }
}

// ===== reading =============================================================

/// Parse an instance document and validate the result.
///
/// Syntax and shape problems report their position and the offending
/// field; a well-formed document describing a broken instance returns the
/// full list of structural errors from [`validate_instance`].
pub fn read_instance(text: &str) -> Result<ProblemInstance, IoError> {
    let doc: DocRoot =
        serde_json::from_str(text).map_err(|e| IoError::Parse(e.to_string()))?;
    if doc.format != FORMAT_TAG {
        return Err(IoError::Document(format!(
            "format is {:?}, expected {FORMAT_TAG:?}",
            doc.format
        )));
    }
    if doc.version != FORMAT_VERSION {
        return Err(IoError::Document(format!(
            "version {} is not supported (this build reads version {FORMAT_VERSION})",
            doc.version
        )));
    }
    let inst = doc.into_instance()?;
    let errs = validate_instance(&inst);
    if !errs.is_empty() {
        return Err(IoError::Semantic(errs));
    }
    Ok(inst)
}

/// Turn a 1-based document index into a 0-based one, rejecting zero with
/// a message naming the location.
fn based(value: usize, what: impl FnOnce() -> String) -> Result<usize, IoError> {
    if value == 0 {
        return Err(IoError::Document(format!("{} is 0; indices count from 1", what())));
    }
    Ok(value - 1)
}

impl DocRoot {
    fn into_instance(self) -> Result<ProblemInstance, IoError> {
        let shift_count = self.shifts.labels.len();

        let mut nurses = Vec::with_capacity(self.nurses.len());
        for (i, n) in self.nurses.into_iter().enumerate() {
            let pos = i + 1;
            let mut leave = std::collections::BTreeSet::new();
            for d in n.leave_days {
                leave.insert(based(d, || format!("nurse {pos} leave day"))?);
            }
            let required = match n.required_shifts {
                None => None,
                Some(DocRequired::Total(t)) => Some(RequiredShifts::Total(t)),
                Some(DocRequired::PerShift(map)) => {
                    let mut parsed = BTreeMap::new();
                    for (key, count) in map {
                        let raw: usize = key.parse().map_err(|_| {
                            IoError::Document(format!(
                                "nurse {pos} required_shifts key {key:?} is not a shift index"
                            ))
                        })?;
                        let shift = based(raw, || format!("nurse {pos} required shift"))?;
                        if parsed.insert(shift, count).is_some() {
                            return Err(IoError::Document(format!(
                                "nurse {pos} lists required shift {raw} twice"
                            )));
                        }
                    }
                    Some(RequiredShifts::PerShift(parsed))
                }
            };
            nurses.push(Nurse {
                id: n.id,
                rank: based(n.rank, || format!("nurse {pos} rank"))?,
                ward: based(n.ward, || format!("nurse {pos} ward"))?,
                leave_days: leave,
                required_shifts: required,
            });
        }

        let mut demand = DemandTable::new();
        let mut seen = std::collections::BTreeSet::new();
        for line in self.demand {
            let ward = based(line.ward, || "demand ward".to_string())?;
            let rank = based(line.rank, || "demand rank".to_string())?;
            let day = based(line.day, || "demand day".to_string())?;
            if !seen.insert((ward, rank, day)) {
                return Err(IoError::Document(format!(
                    "demand for ward {}, rank {}, day {} appears twice",
                    line.ward, line.rank, line.day
                )));
            }
            if line.counts.len() != shift_count {
                return Err(IoError::Document(format!(
                    "demand for ward {}, rank {}, day {} lists {} counts but there are {} shifts",
                    line.ward,
                    line.rank,
                    line.day,
                    line.counts.len(),
                    shift_count
                )));
            }
            for (shift, &count) in line.counts.iter().enumerate() {
                demand.set(ward, rank, shift, day, count);
            }
        }

        Ok(ProblemInstance {
            name: self.name,
            horizon: self.horizon,
            shift_set: ShiftSet {
                labels: self.shifts.labels,
                morning: based(self.shifts.morning, || "shifts.morning".to_string())?,
                night: based(self.shifts.night, || "shifts.night".to_string())?,
            },
            ranks: self.ranks,
            wards: self.wards,
            nurses,
            demand,
            preference: self.preference.into_table("preference")?,
            cost: self.cost.into_table("cost")?,
            policy: self.policy.into_policy(),
            objective_mode: self.objective,
        })
    }
}

impl DocWeights {
    fn into_table(self, what: &str) -> Result<WeightTable, IoError> {
        let mut values = BTreeMap::new();
        for o in self.overrides {
            let nurse = based(o.nurse, || format!("{what} override nurse"))?;
            let shift = based(o.shift, || format!("{what} override shift"))?;
            let day = based(o.day, || format!("{what} override day"))?;
            if values.insert((nurse, shift, day), o.value).is_some() {
                return Err(IoError::Document(format!(
                    "{what} override for nurse {}, shift {}, day {} appears twice",
                    o.nurse, o.shift, o.day
                )));
            }
        }
        let mut per_nurse = BTreeMap::new();
        for (key, value) in self.per_nurse_constant {
            let raw: usize = key.parse().map_err(|_| {
                IoError::Document(format!(
                    "{what} per_nurse_constant key {key:?} is not a nurse index"
                ))
            })?;
            let nurse = based(raw, || format!("{what} per_nurse_constant nurse"))?;
            if per_nurse.insert(nurse, value).is_some() {
                return Err(IoError::Document(format!(
                    "{what} per_nurse_constant lists nurse {raw} twice"
                )));
            }
        }
        Ok(WeightTable { default: self.default, values, per_nurse_constant: per_nurse })
    }
}

impl DocPolicy {
    fn into_policy(self) -> PolicyConfig {
        PolicyConfig {
            max_work_days: self.max_work_days,
            window_rules: self
                .window_rules
                .into_iter()
                .map(|r| WindowRule { window: r.window, max_worked: r.max_worked })
                .collect(),
            night_block: self
                .night_block
                .map(|b| NightBlock { nights: b.nights, off_after: b.off_after }),
            max_consecutive_nights: self.max_consecutive_nights,
            max_total_nights: self.max_total_nights,
            forbid_night_morning: self.forbid_night_morning,
            forbid_pm_am: self.forbid_pm_am,
            soft_pm_am_weight: self.soft_pm_am_weight,
            soft_night_run: self
                .soft_night_run
                .map(|s| SoftNightRun { run_length: s.run_length, weight: s.weight }),
            coverage_mode: self.coverage_mode,
            cascade_mode: self.cascade_mode,
        }
    }
}

// ===========================================================================
