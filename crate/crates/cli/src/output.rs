//! Trajectory CSV and metrics JSON writers.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use hvdcsim_core::{ControlMode, Metrics, Scenario, Service, Trajectory};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const CSV_HEADER: &str = "t,f_sys,f_off_mmc,f_vsg,U_dc_on,U_dc_off,U_hat_dc_on,I_dc,W_on,W_off,P_ac_on,P_ac_off,P_owpp,P_m,U_sum0_on,U_sum0_off";

/// Row `i` of the trajectory in CSV column order.
pub fn csv_record(traj: &Trajectory, i: usize) -> [f64; 16] {
    let s = &traj.states[i];
    let d = &traj.signals[i];
    [
        traj.time[i],
        1.0 + s.df_sys,
        1.0 + d.df_star_off,
        1.0 + s.df_vsg,
        s.u_dc_on,
        s.u_dc_off,
        d.u_hat_dc_on,
        s.i_dc,
        s.w_on,
        s.w_off,
        d.p_ac_on,
        d.p_ac_off,
        d.p_owpp,
        s.dp_m,
        d.u_sum0_on,
        d.u_sum0_off,
    ]
}

/// Nine significant digits.
pub fn format_value(v: f64) -> String {
    format!("{v:.8e}")
}

pub fn write_csv_to(mut w: impl Write, traj: &Trajectory) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for i in 0..traj.len() {
        let row = csv_record(traj, i);
        let mut line = String::with_capacity(16 * 16);
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&format_value(*v));
        }
        writeln!(w, "{line}")?;
    }
    w.flush()
}

pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    write_csv_to(BufWriter::new(file), traj).map_err(|e| CliError::io(path, e))
}

/// Metrics plus the scenario data needed to recompute the requirement channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub control: ControlMode,
    pub scenario: Service,
    pub h_owpp: f64,
    pub d_owpp: f64,
    pub dp_dstb: f64,
    pub t_dstb: f64,
    pub t_end: f64,
    pub dt: f64,
    pub metrics: Metrics,
}

impl RunSummary {
    pub fn new(scenario: &Scenario, metrics: Metrics) -> Self {
        Self {
            control: scenario.control_mode,
            scenario: scenario.service,
            h_owpp: scenario.h_owpp,
            d_owpp: scenario.d_owpp,
            dp_dstb: scenario.dp_dstb,
            t_dstb: scenario.t_dstb,
            t_end: scenario.t_end,
            dt: scenario.dt,
            metrics,
        }
    }

    pub fn one_line(&self) -> String {
        let m = &self.metrics;
        format!(
            "{} {}: max discrepancy {:.4}%, steady sync error {:.4}%, power tracking error {:.4}%, nadir {:.6}, max RoCoF {:.6}/s, envelope {:.6}",
            self.control,
            self.scenario,
            m.max_freq_discrepancy_pct,
            m.steady_state_sync_error_pct,
            m.power_tracking_error_pct,
            m.frequency_nadir,
            m.max_rocof,
            m.oscillation_envelope
        )
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::io(path, std::io::Error::other(e)))?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}
