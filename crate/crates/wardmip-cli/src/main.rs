//! Command-line front end for the ward rostering engine.
//!
//! Subcommands mirror the library pipeline: `solve` an instance file,
//! `validate` a roster CSV against its instance, `export-mps` the
//! compiled program for external solvers, `demo` the built-in wards, and
//! `gen` random instance documents for testing.
//!
//! Exit codes classify the outcome: 0 = optimal / valid, 1 = usage or
//! input error, 2 = infeasible or rule violations, 3 = a node/time limit
//! stopped the search. Set `WARDMIP_LOG=debug` (or any `env_logger`
//! filter) for diagnostics on stderr.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wardmip::compile::{compile, IlpModel};
use wardmip::io::{
    export_mps, parse_roster_csv, read_instance, render_roster, write_instance, RosterFormat,
};
use wardmip::model::{
    builtin_general_ward, builtin_li2003, capacity_screen, random_instance, validate_instance,
    CascadeMode, CoverageMode, GenConfig, ProblemInstance, SoftNightRun,
};
use wardmip::roster::{fairness, validate, Roster, ValidationReport};
use wardmip::solve::{solve_ilp, solve_lp, SolveStatus, SolverConfig};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_LIMIT: u8 = 3;

// ===== argument grammar ====================================================

#[derive(Parser, Debug)]
#[command(name = "wardmip", version, about = "Ward staffing rosters as exact 0-1 optimisation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve an instance file and print the roster.
    Solve(SolveArgs),
    /// Check a roster CSV against an instance and report violations.
    Validate {
        /// Instance document.
        instance: PathBuf,
        /// Roster CSV (as written by `solve --csv`).
        roster: PathBuf,
    },
    /// Compile an instance and write it as fixed-format MPS.
    ExportMps {
        /// Instance document.
        instance: PathBuf,
        /// Output path for the MPS file.
        out: PathBuf,
    },
    /// Build, solve and report a built-in demonstration ward.
    Demo(DemoArgs),
    /// Generate a random instance document.
    Gen(GenArgs),
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Instance document.
    instance: PathBuf,
    /// Also write the roster as CSV to this path.
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
    #[command(flatten)]
    limits: LimitArgs,
    #[command(flatten)]
    overrides: PolicyOverrides,
}

#[derive(Args, Debug)]
struct DemoArgs {
    /// Which built-in ward to run.
    #[arg(value_enum)]
    name: DemoName,
    /// Seed for the preference/cost tables.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the roster as CSV to this path.
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
    #[command(flatten)]
    limits: LimitArgs,
    #[command(flatten)]
    overrides: PolicyOverrides,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Number of nurses.
    #[arg(long, short = 'n')]
    nurses: usize,
    /// Planning horizon in days.
    #[arg(long, short = 'd')]
    days: usize,
    /// Number of rank levels.
    #[arg(long, default_value_t = 1)]
    ranks: usize,
    /// Fraction of (shift, day) cells that demand staff, in [0, 1].
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    /// Generator seed; the output is a pure function of the parameters.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cap on worked days per nurse (defaults to the horizon).
    #[arg(long, value_name = "Y")]
    max_work_days: Option<u32>,
    /// Output path for the instance document.
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DemoName {
    GeneralWard,
    Li2003,
}

#[derive(Args, Debug)]
struct LimitArgs {
    /// Wall-clock limit in seconds (> 0).
    #[arg(long, value_name = "SECS")]
    time_limit: Option<f64>,
    /// Branch-and-bound node limit (> 0).
    #[arg(long, value_name = "N")]
    node_limit: Option<u64>,
}

impl LimitArgs {
    fn to_config(&self) -> Result<SolverConfig, String> {
        let mut config = SolverConfig::default();
        if let Some(secs) = self.time_limit {
            if !(secs > 0.0 && secs.is_finite()) {
                return Err("--time-limit must be a positive number of seconds".into());
            }
            config.time_limit = Some(Duration::from_secs_f64(secs));
        }
        if let Some(nodes) = self.node_limit {
            if nodes == 0 {
                return Err("--node-limit must be positive".into());
            }
            config.node_limit = Some(nodes);
        }
        Ok(config)
    }
}

/// Flags that override the instance's policy before solving.
#[derive(Args, Debug)]
struct PolicyOverrides {
    /// Replace the instance's coverage mode.
    #[arg(long, value_enum, value_name = "MODE")]
    coverage_mode: Option<CoverageArg>,
    /// Replace the instance's rank-cascade mode.
    #[arg(long, value_enum, value_name = "MODE")]
    cascade: Option<CascadeArg>,
    /// Penalise afternoon→morning sequences with this weight.
    #[arg(long, value_name = "WEIGHT")]
    soft_pm_am: Option<f64>,
    /// Penalise runs of consecutive nights: run length, then weight.
    #[arg(long, num_args = 2, value_names = ["LEN", "WEIGHT"])]
    soft_night_run: Option<Vec<f64>>,
}

impl PolicyOverrides {
    fn apply(&self, inst: &mut ProblemInstance) -> Result<(), String> {
        if let Some(mode) = self.coverage_mode {
            inst.policy.coverage_mode = mode.into();
        }
        if let Some(mode) = self.cascade {
            inst.policy.cascade_mode = mode.into();
        }
        if let Some(weight) = self.soft_pm_am {
            inst.policy.soft_pm_am_weight = Some(weight);
        }
        if let Some(pair) = &self.soft_night_run {
            let (len, weight) = (pair[0], pair[1]);
            if len.fract() != 0.0 || len < 1.0 {
                return Err("--soft-night-run length must be a positive integer".into());
            }
            inst.policy.soft_night_run =
                Some(SoftNightRun { run_length: len as u32, weight });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CoverageArg {
    Exact,
    AtLeast,
}

impl From<CoverageArg> for CoverageMode {
    fn from(v: CoverageArg) -> Self {
        match v {
            CoverageArg::Exact => CoverageMode::Exact,
            CoverageArg::AtLeast => CoverageMode::AtLeast,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CascadeArg {
    Off,
    Adjacent,
    Cumulative,
}

impl From<CascadeArg> for CascadeMode {
    fn from(v: CascadeArg) -> Self {
        match v {
            CascadeArg::Off => CascadeMode::Off,
            CascadeArg::Adjacent => CascadeMode::Adjacent,
            CascadeArg::Cumulative => CascadeMode::Cumulative,
        }
    }
}

// ===== entry point =========================================================

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("WARDMIP_LOG")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Validate { instance, roster } => cmd_validate(&instance, &roster),
        Command::ExportMps { instance, out } => cmd_export_mps(&instance, &out),
        Command::Demo(args) => cmd_demo(args),
        Command::Gen(args) => cmd_gen(args),
    })
}

/// Print a usage-class error and return its exit code.
fn usage(message: impl std::fmt::Display) -> u8 {
    eprintln!("error: {message}");
    EXIT_USAGE
}

fn load_instance(path: &Path) -> Result<ProblemInstance, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    read_instance(&text).map_err(|e| format!("{}: {e}", path.display()))
}

// ===== solve ===============================================================

fn cmd_solve(args: SolveArgs) -> u8 {
    let mut inst = match load_instance(&args.instance) {
        Ok(inst) => inst,
        Err(e) => return usage(e),
    };
    if let Err(e) = args.overrides.apply(&mut inst) {
        return usage(e);
    }
    let config = match args.limits.to_config() {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    solve_and_report(&inst, &config, args.csv.as_deref(), false)
}

/// Shared back half of `solve` and `demo`.
fn solve_and_report(
    inst: &ProblemInstance,
    config: &SolverConfig,
    csv: Option<&Path>,
    demo_report: bool,
) -> u8 {
    let model = match compile(inst) {
        Ok(m) => m,
        Err(e) => return usage(e),
    };
    let started = std::time::Instant::now();
    let result = match solve_ilp(&model, config) {
        Ok(r) => r,
        Err(e) => return usage(e),
    };

    println!("status     {}", status_word(result.status));
    println!("objective  {}", fmt_opt(result.objective));
    println!("bound      {}", fmt_opt(result.bound));
    println!("nodes      {}", result.stats.nodes);
    println!("simplex    {}", result.stats.simplex_iterations);
    if demo_report {
        // Wall time is hardware-dependent; stderr keeps stdout
        // byte-reproducible for a given (name, seed).
        eprintln!(
            "solved in {:.2} s (wall time; hardware-dependent)",
            started.elapsed().as_secs_f64()
        );
    } else {
        println!("time       {:.3} s", result.stats.wall_time.as_secs_f64());
    }

    match result.status {
        SolveStatus::Infeasible => {
            println!("infeasible");
            explain_infeasibility(inst, &model, config);
            EXIT_INFEASIBLE
        }
        SolveStatus::Optimal | SolveStatus::LimitReached => {
            if let Some(values) = &result.incumbent {
                let roster = match Roster::from_values(inst, values) {
                    Ok(r) => r,
                    Err(e) => return usage(format!("incumbent does not decode: {e}")),
                };
                let report = match validate(inst, &roster) {
                    Ok(r) => r,
                    Err(e) => return usage(format!("incumbent does not validate: {e}")),
                };
                println!();
                print!("{}", render_roster(inst, &roster, RosterFormat::Grid));
                if demo_report {
                    println!();
                    print_fairness(inst, &roster);
                    println!();
                    print_violations(&report);
                }
                if let Some(path) = csv {
                    let text = render_roster(inst, &roster, RosterFormat::Csv);
                    if let Err(e) = fs::write(path, text) {
                        return usage(format!("{}: {e}", path.display()));
                    }
                }
                if !report.is_feasible() {
                    // Cannot happen with a correct solver; fail loudly.
                    print_violations(&report);
                    return EXIT_INFEASIBLE;
                }
            }
            if result.status == SolveStatus::LimitReached {
                EXIT_LIMIT
            } else {
                EXIT_OK
            }
        }
    }
}

/// Say *why* the model is infeasible: the capacity screen when it already
/// proves a shortfall, and the rows still violated at the root
/// relaxation's phase-1 optimum.
fn explain_infeasibility(inst: &ProblemInstance, model: &IlpModel, config: &SolverConfig) {
    let screen = capacity_screen(inst);
    if screen.total_capacity < screen.total_demand {
        println!(
            "capacity: {} assignments demanded, at most {} deliverable",
            screen.total_demand, screen.total_capacity
        );
    }
    for gap in &screen.per_day_gap {
        println!(
            "capacity: day {} demands {} with only {} available",
            gap.day + 1,
            gap.demand,
            gap.available
        );
    }
    if let Ok(lp) = solve_lp(model, &[], config) {
        if !lp.violated_rows.is_empty() {
            let mut tags: Vec<String> = lp
                .violated_rows
                .iter()
                .take(8)
                .map(|&r| model.rows[r].tag.to_string())
                .collect();
            if lp.violated_rows.len() > 8 {
                tags.push(format!("(+{} more)", lp.violated_rows.len() - 8));
            }
            println!("conflicting rows: {}", tags.join(", "));
        }
    }
}

fn status_word(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Optimal => "optimal",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::LimitReached => "limit-reached",
    }
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map_or_else(|| "-".to_string(), |v| format!("{v}"))
}

// ===== validate ============================================================

fn cmd_validate(instance: &Path, roster_path: &Path) -> u8 {
    let inst = match load_instance(instance) {
        Ok(inst) => inst,
        Err(e) => return usage(e),
    };
    let text = match fs::read_to_string(roster_path) {
        Ok(t) => t,
        Err(e) => return usage(format!("{}: {e}", roster_path.display())),
    };
    let roster = match parse_roster_csv(&inst, &text) {
        Ok(r) => r,
        Err(e) => return usage(format!("{}: {e}", roster_path.display())),
    };
    let report = match validate(&inst, &roster) {
        Ok(r) => r,
        Err(e) => return usage(e),
    };
    println!("objective  {}", report.objective);
    println!("soft hits  {}", report.soft_hits);
    print_violations(&report);
    if report.is_feasible() {
        EXIT_OK
    } else {
        EXIT_INFEASIBLE
    }
}

fn print_violations(report: &ValidationReport) {
    println!("violations {}", report.violations.len());
    for v in &report.violations {
        println!("  {v}");
    }
}

// ===== export-mps ==========================================================

fn cmd_export_mps(instance: &Path, out: &Path) -> u8 {
    let inst = match load_instance(instance) {
        Ok(inst) => inst,
        Err(e) => return usage(e),
    };
    let model = match compile(&inst) {
        Ok(m) => m,
        Err(e) => return usage(e),
    };
    let text = export_mps(&model);
    if let Err(e) = fs::write(out, text) {
        return usage(format!("{}: {e}", out.display()));
    }
    println!(
        "wrote {} ({} rows, {} columns)",
        out.display(),
        model.num_rows(),
        model.num_columns()
    );
    EXIT_OK
}

// ===== demo ================================================================

fn cmd_demo(args: DemoArgs) -> u8 {
    let mut inst = match args.name {
        DemoName::GeneralWard => builtin_general_ward(args.seed),
        DemoName::Li2003 => builtin_li2003(args.seed),
    };
    if let Err(e) = args.overrides.apply(&mut inst) {
        return usage(e);
    }
    let config = match args.limits.to_config() {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    println!("instance   {}", inst.name);
    solve_and_report(&inst, &config, args.csv.as_deref(), true)
}

fn print_fairness(inst: &ProblemInstance, roster: &Roster) {
    let summary = fairness(inst, roster);
    println!("nurse   worked  nights  longest-run");
    for (i, nurse) in inst.nurses.iter().enumerate() {
        println!(
            "{:<7} {:<7} {:<7} {}",
            nurse.id, summary.worked[i], summary.nights[i], summary.longest_run[i]
        );
    }
    println!(
        "spread: worked {}, nights {}; mean worked {:.2}; total {}",
        summary.worked_spread,
        summary.night_spread,
        summary.worked_mean,
        summary.total_assignments
    );
}

// ===== gen =================================================================

fn cmd_gen(args: GenArgs) -> u8 {
    if args.nurses == 0 || args.days == 0 || args.ranks == 0 {
        return usage("--nurses, --days and --ranks must be positive");
    }
    if !(0.0..=1.0).contains(&args.density) {
        return usage("--density must lie in [0, 1]");
    }
    if let Some(y) = args.max_work_days {
        if y == 0 || y as usize > args.days {
            return usage(format!(
                "--max-work-days {y} is impossible on a {}-day horizon",
                args.days
            ));
        }
    }

    let mut cfg = GenConfig::new(args.nurses, args.days, args.seed);
    cfg.ranks = args.ranks;
    cfg.demand_density = args.density;
    cfg.max_work_days = args.max_work_days;
    let inst = random_instance(&cfg);
    let errs = validate_instance(&inst);
    if !errs.is_empty() {
        // Generation guarantees validity; reaching this is a bug.
        return usage(format!("generated instance is invalid: {errs:?}"));
    }
    if let Err(e) = fs::write(&args.out, write_instance(&inst)) {
        return usage(format!("{}: {e}", args.out.display()));
    }
    println!("wrote {}", args.out.display());
    EXIT_OK
}

// ===========================================================================

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limits_reject_zero() {
        let args = LimitArgs { time_limit: Some(0.0), node_limit: None };
        assert!(args.to_config().is_err());
        let args = LimitArgs { time_limit: None, node_limit: Some(0) };
        assert!(args.to_config().is_err());
        let args = LimitArgs { time_limit: Some(1.5), node_limit: Some(10) };
        let config = args.to_config().unwrap();
        assert_eq!(config.time_limit, Some(Duration::from_secs_f64(1.5)));
        assert_eq!(config.node_limit, Some(10));
    }

    #[test]
    fn night_run_override_requires_integer_length() {
        let mut inst = builtin_li2003(0);
        let bad = PolicyOverrides {
            coverage_mode: None,
            cascade: None,
            soft_pm_am: None,
            soft_night_run: Some(vec![1.5, 2.0]),
        };
        assert!(bad.apply(&mut inst).is_err());
        let good = PolicyOverrides {
            coverage_mode: None,
            cascade: None,
            soft_pm_am: None,
            soft_night_run: Some(vec![2.0, 3.0]),
        };
        good.apply(&mut inst).unwrap();
        assert_eq!(
            inst.policy.soft_night_run,
            Some(SoftNightRun { run_length: 2, weight: 3.0 })
        );
    }

    #[test]
    fn cli_grammar_is_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
