//! Built-in demonstration instances and a seeded random-instance generator.
//!
//! All synthesis here is a pure function of the supplied seed: the same
//! seed always reproduces byte-identical instances, on any platform.

use super::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The 20-nurse, 14-day, two-rank surgical/general ward demonstration.
///
/// Twelve junior nurses (rank 0) and eight seniors (rank 1) staff a single
/// ward over a fortnight under the full house rule set: at most 11 worked
/// days, at most 4 worked days in any 5, a full day off after 3
/// consecutive nights, no morning after a night, leave, pinned per-nurse
/// totals and rank-cascaded minimum coverage.
///
/// Demand and the pinned totals are derived from a synthetic roster built
/// under the same rules, so the instance is feasible by construction for
/// every seed.
pub fn builtin_general_ward(seed: u64) -> ProblemInstance {
    let horizon = 14usize;
    let juniors = 12usize;
    let seniors = 8usize;
    let n_nurses = juniors + seniors;
    let shift_set = ShiftSet::standard();
    let n_shifts = shift_set.len();
    let policy = PolicyConfig {
        max_work_days: 11,
        window_rules: vec![WindowRule { window: 5, max_worked: 4 }],
        night_block: Some(NightBlock { nights: 3, off_after: 1 }),
        max_consecutive_nights: None,
        max_total_nights: None,
        forbid_night_morning: true,
        forbid_pm_am: false,
        soft_pm_am_weight: None,
        soft_night_run: None,
        coverage_mode: CoverageMode::AtLeast,
        cascade_mode: CascadeMode::Adjacent,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut nurses: Vec<Nurse> = (0..n_nurses)
        .map(|i| Nurse {
            id: format!("n{:02}", i + 1),
            rank: if i < juniors { 0 } else { 1 },
            ward: 0,
            leave_days: BTreeSet::new(),
            required_shifts: None,
        })
        .collect();

    // Leave: roughly half the staff take one day off.
    for nurse in nurses.iter_mut() {
        if rng.random_bool(0.4) {
            nurse.leave_days.insert(rng.random_range(0..horizon));
        }
    }

    // Build a witness roster honouring every hard rule, then read demand
    // and the pinned totals off it. Anything the witness satisfies, the
    // solver can also satisfy, so the instance is feasible.
    let night = shift_set.night;
    let morning = shift_set.morning;
    let mut demand = DemandTable::new();
    let mut witness_total = 0usize;
    for (n, nurse) in nurses.iter_mut().enumerate() {
        let mut row: Vec<Option<usize>> = vec![None; horizon];
        let mut worked = 0u32;
        for d in 0..horizon {
            if nurse.leave_days.contains(&d) || worked >= policy.max_work_days {
                continue;
            }
            // Window rule (5, 4): never a fifth consecutive worked day.
            if d >= 4 && (d - 4..d).all(|t| row[t].is_some()) {
                continue;
            }
            // Night block (3, 1): a day fully off after 3 straight nights.
            if d >= 3 && (d - 3..d).all(|t| row[t] == Some(night)) {
                continue;
            }
            if rng.random_bool(0.25) {
                continue; // chooses a rest day
            }
            let mut choices = vec![morning, 1, night];
            if d > 0 && row[d - 1] == Some(night) {
                choices.retain(|&s| s != morning); // no morning after a night
            }
            // Nights are the least popular pick.
            let pick = match rng.random_range(0..5u32) {
                0 if choices.contains(&night) => night,
                _ => {
                    let day_shifts: Vec<usize> =
                        choices.iter().copied().filter(|&s| s != night).collect();
                    day_shifts[rng.random_range(0..day_shifts.len())]
                }
            };
            row[d] = Some(pick);
            worked += 1;
        }
        for (d, cell) in row.iter().enumerate() {
            if let Some(s) = *cell {
                let prev = demand.get(0, nurse.rank, s, d);
                demand.set(0, nurse.rank, s, d, prev + 1);
                witness_total += 1;
            }
        }
        let _ = n;
        nurse.required_shifts = Some(RequiredShifts::Total(worked));
    }
    // Degenerate-seed guard: keep at least one demanded cell so the
    // instance stays interesting.
    if witness_total == 0 {
        demand.set(0, nurses[0].rank, morning, 0, 1);
        nurses[0].leave_days.remove(&0);
        nurses[0].required_shifts = Some(RequiredShifts::Total(1));
    }

    // Per-cell preferences on about a third of the grid.
    let mut preference = WeightTable::default();
    for n in 0..n_nurses {
        for s in 0..n_shifts {
            for d in 0..horizon {
                if rng.random_bool(0.3) {
                    preference.values.insert((n, s, d), rng.random_range(1..=9) as f64);
                }
            }
        }
    }

    ProblemInstance {
        name: "general_ward".into(),
        horizon,
        shift_set,
        ranks: 2,
        wards: 1,
        nurses,
        demand,
        preference,
        cost: WeightTable::default(),
        policy,
        objective_mode: ObjectiveMode::MaximizeUtility,
    }
}

/// The 27-nurse, one-week, single-rank cost-minimisation case study.
///
/// Daily coverage is pinned exactly at 6 mornings, 6 afternoons and 3
/// nights. Each nurse works at most 5 of the 7 days and at most one night
/// in the week, and never a morning right after a night. The objective
/// charges a per-nurse constant and credits per-cell cost reductions, both
/// synthesised from the seed.
pub fn builtin_li2003(seed: u64) -> ProblemInstance {
    let horizon = 7usize;
    let n_nurses = 27usize;
    let shift_set = ShiftSet::standard();
    let n_shifts = shift_set.len();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let nurses: Vec<Nurse> = (0..n_nurses)
        .map(|i| Nurse {
            id: format!("n{:02}", i + 1),
            rank: 0,
            ward: 0,
            leave_days: BTreeSet::new(),
            required_shifts: None,
        })
        .collect();

    let mut demand = DemandTable::new();
    for d in 0..horizon {
        demand.set(0, 0, 0, d, 6); // mornings
        demand.set(0, 0, 1, d, 6); // afternoons
        demand.set(0, 0, 2, d, 3); // nights
    }

    let mut cost = WeightTable::default();
    for n in 0..n_nurses {
        cost.per_nurse_constant.insert(n, rng.random_range(40..=80) as f64);
        for s in 0..n_shifts {
            for d in 0..horizon {
                cost.values.insert((n, s, d), rng.random_range(0..=9) as f64);
            }
        }
    }

    ProblemInstance {
        name: "li2003".into(),
        horizon,
        shift_set,
        ranks: 1,
        wards: 1,
        nurses,
        demand,
        preference: WeightTable::default(),
        cost,
        policy: PolicyConfig {
            max_work_days: 5,
            window_rules: Vec::new(),
            night_block: None,
            max_consecutive_nights: None,
            max_total_nights: Some(1),
            forbid_night_morning: true,
            forbid_pm_am: false,
            soft_pm_am_weight: None,
            soft_night_run: None,
            coverage_mode: CoverageMode::Exact,
            cascade_mode: CascadeMode::Off,
        },
        objective_mode: ObjectiveMode::MinimizeCost,
    }
}

/// Parameters for [`random_instance`]. Construction is deterministic in
/// the whole configuration, including the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub nurses: usize,
    pub horizon: usize,
    pub ranks: usize,
    pub seed: u64,
    /// Probability that a (rank, shift, day) cell demands one nurse.
    pub demand_density: f64,
    /// Probability that a nurse takes a single leave day.
    pub leave_prob: f64,
    /// Emit a (3, 2) window rule when the horizon allows it.
    pub window_rule: bool,
    /// Cap on worked days; defaults to the horizon length.
    pub max_work_days: Option<u32>,
    pub max_total_nights: Option<u32>,
    pub forbid_night_morning: bool,
    pub soft_pm_am_weight: Option<f64>,
    pub soft_night_run: Option<SoftNightRun>,
    pub objective_mode: ObjectiveMode,
    pub coverage_mode: CoverageMode,
    pub cascade_mode: CascadeMode,
}

impl GenConfig {
    pub fn new(nurses: usize, horizon: usize, seed: u64) -> Self {
        GenConfig {
            nurses,
            horizon,
            ranks: 1,
            seed,
            demand_density: 0.3,
            leave_prob: 0.25,
            window_rule: false,
            max_work_days: None,
            max_total_nights: None,
            forbid_night_morning: true,
            soft_pm_am_weight: None,
            soft_night_run: None,
            objective_mode: ObjectiveMode::MaximizeUtility,
            coverage_mode: CoverageMode::AtLeast,
            cascade_mode: CascadeMode::Off,
        }
    }
}

/// Synthesise a random single-ward instance from a [`GenConfig`].
///
/// The result always passes [`validate_instance`]; it is not guaranteed to
/// be feasible (random demand may simply exceed what the rules allow).
pub fn random_instance(cfg: &GenConfig) -> ProblemInstance {
    assert!(cfg.nurses > 0 && cfg.horizon > 0 && cfg.ranks > 0, "degenerate GenConfig");
    let shift_set = ShiftSet::standard();
    let n_shifts = shift_set.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut nurses: Vec<Nurse> = (0..cfg.nurses)
        .map(|i| Nurse {
            id: format!("n{:02}", i + 1),
            rank: i % cfg.ranks,
            ward: 0,
            leave_days: BTreeSet::new(),
            required_shifts: None,
        })
        .collect();
    for nurse in nurses.iter_mut() {
        if rng.random_bool(cfg.leave_prob) {
            nurse.leave_days.insert(rng.random_range(0..cfg.horizon));
        }
    }

    let mut demand = DemandTable::new();
    for r in 0..cfg.ranks {
        for s in 0..n_shifts {
            for d in 0..cfg.horizon {
                if rng.random_bool(cfg.demand_density) {
                    demand.set(0, r, s, d, 1);
                }
            }
        }
    }

    let mut preference = WeightTable::default();
    let mut cost = WeightTable::default();
    for n in 0..cfg.nurses {
        for s in 0..n_shifts {
            for d in 0..cfg.horizon {
                preference.values.insert((n, s, d), rng.random_range(0..=9) as f64);
            }
        }
    }
    let costly = matches!(
        cfg.objective_mode,
        ObjectiveMode::MinimizeCost | ObjectiveMode::PenalizedCost
    );
    if costly {
        for n in 0..cfg.nurses {
            cost.per_nurse_constant.insert(n, rng.random_range(5..=20) as f64);
            for s in 0..n_shifts {
                for d in 0..cfg.horizon {
                    cost.values.insert((n, s, d), rng.random_range(0..=9) as f64);
                }
            }
        }
    }

    let mut window_rules = Vec::new();
    if cfg.window_rule && cfg.horizon >= 3 {
        window_rules.push(WindowRule { window: 3, max_worked: 2 });
    }

    ProblemInstance {
        name: format!("gen_n{}_d{}_s{}", cfg.nurses, cfg.horizon, cfg.seed),
        horizon: cfg.horizon,
        shift_set,
        ranks: cfg.ranks,
        wards: 1,
        nurses,
        demand,
        preference,
        cost,
        policy: PolicyConfig {
            max_work_days: cfg.max_work_days.unwrap_or(cfg.horizon as u32),
            window_rules,
            night_block: None,
            max_consecutive_nights: None,
            max_total_nights: cfg.max_total_nights,
            forbid_night_morning: cfg.forbid_night_morning,
            forbid_pm_am: false,
            soft_pm_am_weight: cfg.soft_pm_am_weight,
            soft_night_run: cfg.soft_night_run,
            coverage_mode: cfg.coverage_mode,
            cascade_mode: cfg.cascade_mode,
        },
        objective_mode: cfg.objective_mode,
    }
}
