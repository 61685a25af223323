//! Figures of merit of a disturbance response.

use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;
use crate::solver::{Scenario, Trajectory};

/// Width of the centered difference used for frequency derivatives, s.
pub const RATE_WINDOW: f64 = 0.1;
/// Fraction of the horizon averaged for steady-state values.
pub const TAIL_FRACTION: f64 = 0.1;
/// Start of the oscillation-envelope window after the event, s.
pub const ENVELOPE_DELAY: f64 = 2.0;
/// Minimum horizon after the event, s.
pub const MIN_POST_EVENT: f64 = 10.0;
/// Magnitudes below this are numerical noise of an undisturbed run.
pub const QUIESCENT_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub max_freq_discrepancy_pct: f64,
    pub steady_state_sync_error_pct: f64,
    pub power_tracking_error_pct: f64,
    pub frequency_nadir: f64,
    pub max_rocof: f64,
    pub oscillation_envelope: f64,
    /// Tail-averaged onshore frequency deviation.
    pub steady_df_on: f64,
    /// Tail-averaged offshore MMC frequency deviation.
    pub steady_df_off: f64,
}

/// Centered difference over `window`, truncated to one side at the ends.
pub fn smoothed_derivative(time: &[f64], x: &[f64], window: f64) -> Vec<f64> {
    let n = time.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let ds = time[1] - time[0];
    let half = ((window / 2.0) / ds).round().max(1.0) as usize;
    (0..n)
        .map(|i| {
            let a = i.saturating_sub(half);
            let b = (i + half).min(n - 1);
            (x[b] - x[a]) / (time[b] - time[a])
        })
        .collect()
}

/// Mean of `x` over samples with `time >= t_from`.
pub fn tail_mean(time: &[f64], x: &[f64], t_from: f64) -> f64 {
    let (sum, count) = time
        .iter()
        .zip(x)
        .filter(|(t, _)| **t >= t_from - 1e-9)
        .fold((0.0, 0usize), |(s, c), (_, v)| (s + v, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Power the OWPP should deliver for the onshore frequency deviation and its rate.
pub fn requirement(df_on: f64, rate: f64, h_owpp: f64, d_owpp: f64) -> f64 {
    -d_owpp * df_on - 2.0 * h_owpp * rate
}

fn max_abs(x: impl Iterator<Item = f64>) -> f64 {
    x.fold(0.0, |m, v| m.max(v.abs()))
}

fn flush(v: f64) -> f64 {
    if v.abs() < QUIESCENT_FLOOR {
        0.0
    } else {
        v
    }
}

fn pct(num: f64, den: f64) -> f64 {
    if den < QUIESCENT_FLOOR {
        0.0
    } else {
        100.0 * num / den
    }
}

pub fn compute_metrics(traj: &Trajectory, scenario: &Scenario) -> Result<Metrics, AnalysisError> {
    let t_last = traj.time.last().copied().unwrap_or(0.0);
    let available = t_last - scenario.t_dstb;
    if traj.len() < 2 || available < MIN_POST_EVENT - 1e-9 {
        return Err(AnalysisError::HorizonTooShort {
            available,
            required: MIN_POST_EVENT,
        });
    }
    let time = &traj.time;
    let df_on = traj.channel(|s, _| s.df_sys);
    let df_off = traj.channel(|_, d| d.df_star_off);
    let p_owpp = traj.channel(|_, d| d.p_owpp);
    let rate = smoothed_derivative(time, &df_on, RATE_WINDOW);
    let req: Vec<f64> = df_on
        .iter()
        .zip(&rate)
        .map(|(f, r)| requirement(*f, *r, scenario.h_owpp, scenario.d_owpp))
        .collect();

    let f_scale = max_abs(df_on.iter().copied());
    let f_gap = max_abs(df_on.iter().zip(&df_off).map(|(a, b)| a - b));
    let p_scale = max_abs(req.iter().copied());
    let p_gap = max_abs(p_owpp.iter().zip(&req).map(|(p, r)| p - r));

    let t_tail = t_last * (1.0 - TAIL_FRACTION);
    let ss_on = tail_mean(time, &df_on, t_tail);
    let ss_off = tail_mean(time, &df_off, t_tail);

    let t_env = scenario.t_dstb + ENVELOPE_DELAY;
    let envelope = max_abs(
        time.iter()
            .zip(p_owpp.iter().zip(&req))
            .filter(|(t, _)| **t > t_env)
            .map(|(_, (p, r))| p - r),
    );
    let min_df = df_on.iter().copied().fold(f64::INFINITY, f64::min);

    Ok(Metrics {
        max_freq_discrepancy_pct: pct(f_gap, f_scale),
        steady_state_sync_error_pct: pct((ss_on - ss_off).abs(), ss_on.abs()),
        power_tracking_error_pct: pct(p_gap, p_scale),
        frequency_nadir: 1.0 + flush(min_df),
        max_rocof: flush(max_abs(rate.iter().copied())),
        oscillation_envelope: flush(envelope),
        steady_df_on: flush(ss_on),
        steady_df_off: flush(ss_off),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_ramp_is_exact() {
        let t: Vec<f64> = (0..1000).map(|i| i as f64 * 1e-3).collect();
        let x: Vec<f64> = t.iter().map(|t| 3.0 * t - 1.0).collect();
        for d in smoothed_derivative(&t, &x, 0.1) {
            assert!((d - 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn derivative_window_is_centered() {
        let t: Vec<f64> = (0..1001).map(|i| i as f64 * 1e-3).collect();
        let x: Vec<f64> = t.iter().map(|t| t * t).collect();
        let d = smoothed_derivative(&t, &x, 0.1);
        // Centered difference of t² is exact: 2t.
        assert!((d[500] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tail_mean_selects_window() {
        let t = [0.0, 1.0, 2.0, 3.0];
        let x = [10.0, 10.0, 1.0, 3.0];
        assert_eq!(tail_mean(&t, &x, 2.0), 2.0);
        assert_eq!(tail_mean(&t, &x, 5.0), 0.0);
    }

    #[test]
    fn requirement_channels() {
        assert_eq!(requirement(-0.01, 0.0, 0.0, 20.0), 0.2);
        assert_eq!(requirement(0.0, -0.01, 4.0, 0.0), 0.08);
    }
}
