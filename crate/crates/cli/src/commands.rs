//! The `run`, `compare`, `steady-state` and `sweep` commands.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use hvdcsim_core::analysis::{
    brute_force_steady_state, closed_form_fcr, closed_form_inertia, ClosedFormInputs,
};
use hvdcsim_core::error::InitError;
use hvdcsim_core::{
    compute_metrics, init_steady_state, integrate, ControlMode, Metrics, Service, SolverError,
    Trajectory,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Resolved, RunConfig};
use crate::error::CliError;
use crate::output::{format_value, write_json, write_text, write_trajectory_csv, RunSummary};

pub const THREADS_ENV: &str = "HVDCSIM_THREADS";

fn solver_error(e: SolverError) -> CliError {
    match e {
        SolverError::InvalidScenario { .. } | SolverError::Param(_) | SolverError::Control(_) => {
            CliError::Config(e.to_string())
        }
        SolverError::Init(InitError::Param(_) | InitError::TransferCapability { .. }) => {
            CliError::Config(e.to_string())
        }
        _ => CliError::Simulation(e.to_string()),
    }
}

/// Integrates one resolved scenario and evaluates its metrics.
pub fn simulate(r: &Resolved) -> Result<(Trajectory, Metrics), CliError> {
    let traj = integrate(&r.scenario, &r.params, &r.gains).map_err(solver_error)?;
    let metrics = compute_metrics(&traj, &r.scenario).map_err(|e| CliError::Config(e.to_string()))?;
    Ok((traj, metrics))
}

/// Thread pool capped by `HVDCSIM_THREADS` when set.
pub fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n = v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|n| *n >= 1)
            .ok_or_else(|| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Simulation(format!("cannot start worker threads: {e}")))
}

fn create_dir(out: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))
}

fn report(w: &mut dyn Write, line: &str) -> Result<(), CliError> {
    writeln!(w, "{line}").map_err(|e| CliError::io("<stdout>", e))
}

/// Runs one scenario, writing `trajectory.csv`, `metrics.json` and the effective config.
pub fn cmd_run(cfg: &RunConfig, out: &Path, w: &mut dyn Write) -> Result<RunSummary, CliError> {
    let resolved = cfg.resolve()?;
    let (traj, metrics) = simulate(&resolved)?;
    create_dir(out)?;
    write_trajectory_csv(&out.join("trajectory.csv"), &traj)?;
    let summary = RunSummary::new(&resolved.scenario, metrics);
    write_json(&out.join("metrics.json"), &summary)?;
    write_text(&out.join("effective_config.toml"), &cfg.to_toml_string()?)?;
    report(w, &summary.one_line())?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingCheck {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub runs: BTreeMap<String, RunSummary>,
    pub orderings: Vec<OrderingCheck>,
}

fn run_key(mode: ControlMode, service: Service) -> String {
    format!("{}_{}", mode.name(), service.name())
}

/// Orderings between the four runs of the comparison matrix.
pub fn orderings(runs: &BTreeMap<String, RunSummary>) -> Vec<OrderingCheck> {
    let m = |mode, service| runs[&run_key(mode, service)].metrics;
    let (eb, hol) = (ControlMode::EnergyBalancing, ControlMode::Holistic);
    let (ebf, holf) = (m(eb, Service::Fcr), m(hol, Service::Fcr));
    let (ebi, holi) = (m(eb, Service::Inertia), m(hol, Service::Inertia));
    let check = |name: &str, holds: bool, detail: String| OrderingCheck {
        name: name.to_string(),
        holds,
        detail,
    };
    vec![
        check(
            "fcr steady sync error: holistic < energy_balancing",
            holf.steady_state_sync_error_pct < ebf.steady_state_sync_error_pct,
            format!("{} vs {}", holf.steady_state_sync_error_pct, ebf.steady_state_sync_error_pct),
        ),
        check(
            "fcr energy_balancing discrepancy > 0",
            ebf.max_freq_discrepancy_pct > 0.0,
            format!("{}", ebf.max_freq_discrepancy_pct),
        ),
        check(
            "fcr energy_balancing |df_off| < |df_on|",
            ebf.steady_df_off.abs() < ebf.steady_df_on.abs(),
            format!("{} vs {}", ebf.steady_df_off, ebf.steady_df_on),
        ),
        check(
            "fcr power tracking error: holistic < energy_balancing",
            holf.power_tracking_error_pct < ebf.power_tracking_error_pct,
            format!("{} vs {}", holf.power_tracking_error_pct, ebf.power_tracking_error_pct),
        ),
        check(
            "inertia discrepancy of both modes < energy_balancing fcr discrepancy",
            ebi.max_freq_discrepancy_pct < ebf.max_freq_discrepancy_pct
                && holi.max_freq_discrepancy_pct < ebf.max_freq_discrepancy_pct,
            format!(
                "{} and {} vs {}",
                ebi.max_freq_discrepancy_pct, holi.max_freq_discrepancy_pct, ebf.max_freq_discrepancy_pct
            ),
        ),
        check(
            "inertia oscillation envelope: holistic <= energy_balancing",
            holi.oscillation_envelope <= ebi.oscillation_envelope,
            format!("{} vs {}", holi.oscillation_envelope, ebi.oscillation_envelope),
        ),
    ]
}

/// Runs both control modes on both services. Orderings are reported, not enforced.
pub fn cmd_compare(cfg: &RunConfig, out: &Path, w: &mut dyn Write) -> Result<Comparison, CliError> {
    let cases: Vec<(ControlMode, Service)> = ControlMode::ALL
        .iter()
        .flat_map(|m| Service::ALL.iter().map(move |s| (*m, *s)))
        .collect();
    let resolved = cases
        .iter()
        .map(|(m, s)| cfg.with_selection(Some(*m), Some(*s)).resolve())
        .collect::<Result<Vec<_>, _>>()?;
    let pool = thread_pool()?;
    let results: Vec<Result<(Trajectory, Metrics), CliError>> =
        pool.install(|| resolved.par_iter().map(simulate).collect());

    create_dir(out)?;
    let mut runs = BTreeMap::new();
    for ((mode, service), (r, result)) in cases.iter().zip(resolved.iter().zip(results)) {
        let (traj, metrics) = result?;
        let key = run_key(*mode, *service);
        write_trajectory_csv(&out.join(format!("trajectory_{key}.csv")), &traj)?;
        let summary = RunSummary::new(&r.scenario, metrics);
        write_json(&out.join(format!("metrics_{key}.json")), &summary)?;
        report(w, &summary.one_line())?;
        runs.insert(key, summary);
    }
    let comparison = Comparison {
        orderings: orderings(&runs),
        runs,
    };
    write_json(&out.join("comparison.json"), &comparison)?;
    for o in &comparison.orderings {
        let verdict = if o.holds { "holds" } else { "VIOLATED" };
        report(w, &format!("ordering {verdict}: {} ({})", o.name, o.detail))?;
    }
    Ok(comparison)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateReport {
    pub df_on: f64,
    pub fcr_closed_form: f64,
    pub fcr_oracle: f64,
    pub inertia_closed_form: f64,
    pub inertia_oracle: f64,
}

/// Closed-form inputs for the configured control mode and the FCR droop.
pub fn closed_form_inputs(cfg: &RunConfig) -> Result<ClosedFormInputs, CliError> {
    let fcr = cfg.with_selection(None, Some(Service::Fcr));
    let scenario = fcr.scenario();
    let params = scenario.apply(&fcr.params());
    let gains = fcr.gains(scenario.control_mode);
    let (_, op) = init_steady_state(&params, &gains)
        .map_err(|e| solver_error(SolverError::Init(e)))?;
    Ok(ClosedFormInputs {
        k1: gains.k1(),
        k2: gains.k2(),
        r_dc: params.line.r_dc,
        d_owpp: scenario.d_owpp,
        op,
    })
}

/// Offshore steady-state deviation from both closed forms and the oracle.
pub fn cmd_steady_state(cfg: &RunConfig, df_on: f64, w: &mut dyn Write) -> Result<SteadyStateReport, CliError> {
    if !df_on.is_finite() {
        return Err(CliError::Config(format!("df_on must be finite, got {df_on}")));
    }
    let inputs = closed_form_inputs(cfg)?;
    let r = SteadyStateReport {
        df_on,
        fcr_closed_form: closed_form_fcr(df_on, &inputs)?,
        inertia_closed_form: closed_form_inertia(df_on, &inputs)?,
        fcr_oracle: brute_force_steady_state(df_on, &inputs, Service::Fcr)?,
        inertia_oracle: brute_force_steady_state(df_on, &inputs, Service::Inertia)?,
    };
    report(w, &format!("df_on = {df_on:e}"))?;
    report(
        w,
        &format!(
            "fcr      closed_form = {:e}  oracle = {:e}  difference = {:e}",
            r.fcr_closed_form,
            r.fcr_oracle,
            r.fcr_closed_form - r.fcr_oracle
        ),
    )?;
    report(
        w,
        &format!(
            "inertia  closed_form = {:e}  oracle = {:e}  difference = {:e}",
            r.inertia_closed_form,
            r.inertia_oracle,
            r.inertia_closed_form - r.inertia_oracle
        ),
    )?;
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParameter {
    RDc,
    DOwpp,
    HOwpp,
    P4,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::RDc => "R_dc",
            SweepParameter::DOwpp => "D_OWPP",
            SweepParameter::HOwpp => "H_OWPP",
            SweepParameter::P4 => "P_4",
        }
    }

    /// Resolved inputs with the parameter set to `value`.
    pub fn apply(self, base: &Resolved, value: f64) -> Result<Resolved, CliError> {
        let mut r = *base;
        match self {
            SweepParameter::RDc => r.params.line.r_dc = value,
            SweepParameter::DOwpp => r.scenario.d_owpp = value,
            SweepParameter::HOwpp => r.scenario.h_owpp = value,
            SweepParameter::P4 => r.gains.offshore.pd_udc.p = value,
        }
        r.scenario.validate().map_err(|e| CliError::Config(e.to_string()))?;
        r.params = r.scenario.apply(&r.params);
        r.params.validate().map_err(|e| CliError::Config(e.to_string()))?;
        r.gains.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(r)
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownParameter(pub String);

impl fmt::Display for UnknownParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown sweep parameter `{}` (expected R_dc, D_OWPP, H_OWPP or P_4)", self.0)
    }
}

impl std::error::Error for UnknownParameter {}

impl FromStr for SweepParameter {
    type Err = UnknownParameter;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "").as_str() {
            "rdc" => Ok(SweepParameter::RDc),
            "dowpp" => Ok(SweepParameter::DOwpp),
            "howpp" => Ok(SweepParameter::HOwpp),
            "p4" => Ok(SweepParameter::P4),
            _ => Err(UnknownParameter(s.to_string())),
        }
    }
}

pub const SWEEP_METRIC_COLUMNS: &str = "max_freq_discrepancy_pct,steady_state_sync_error_pct,power_tracking_error_pct,frequency_nadir,max_rocof,oscillation_envelope,steady_df_on,steady_df_off,steady_abs_discrepancy,sync_ratio";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub metrics: Metrics,
}

impl SweepPoint {
    pub fn abs_discrepancy(&self) -> f64 {
        (self.metrics.steady_df_on - self.metrics.steady_df_off).abs()
    }

    /// Δf_off/Δf_on at steady state; zero without an onshore deviation.
    pub fn sync_ratio(&self) -> f64 {
        if self.metrics.steady_df_on == 0.0 {
            0.0
        } else {
            self.metrics.steady_df_off / self.metrics.steady_df_on
        }
    }
}

/// Runs the configured scenario at every value, writing `sweep.csv`.
pub fn cmd_sweep(
    cfg: &RunConfig,
    parameter: SweepParameter,
    values: &[f64],
    out: &Path,
    w: &mut dyn Write,
) -> Result<Vec<SweepPoint>, CliError> {
    if values.is_empty() {
        return Err(CliError::Config("empty sweep range".to_string()));
    }
    let base = cfg.resolve()?;
    let points = values
        .iter()
        .map(|v| parameter.apply(&base, *v))
        .collect::<Result<Vec<_>, _>>()?;
    let pool = thread_pool()?;
    let results: Vec<Result<Metrics, CliError>> =
        pool.install(|| points.par_iter().map(|r| simulate(r).map(|(_, m)| m)).collect());
    let mut sweep = Vec::with_capacity(values.len());
    for (value, m) in values.iter().zip(results) {
        sweep.push(SweepPoint { value: *value, metrics: m? });
    }

    create_dir(out)?;
    let mut text = format!("{},{SWEEP_METRIC_COLUMNS}\n", parameter.name());
    for p in &sweep {
        let m = &p.metrics;
        let row = [
            p.value,
            m.max_freq_discrepancy_pct,
            m.steady_state_sync_error_pct,
            m.power_tracking_error_pct,
            m.frequency_nadir,
            m.max_rocof,
            m.oscillation_envelope,
            m.steady_df_on,
            m.steady_df_off,
            p.abs_discrepancy(),
            p.sync_ratio(),
        ];
        let cells: Vec<String> = row.iter().map(|v| format_value(*v)).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    write_text(&out.join("sweep.csv"), &text)?;
    for p in &sweep {
        report(
            w,
            &format!(
                "{} = {:e}: steady |df_on - df_off| = {:e}, ratio df_off/df_on = {:.6}",
                parameter.name(),
                p.value,
                p.abs_discrepancy(),
                p.sync_ratio()
            ),
        )?;
    }
    Ok(sweep)
}
