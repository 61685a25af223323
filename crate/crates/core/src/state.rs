//! Flat ODE state of the closed-loop system.
//!
//! Angles are expressed in the frame rotating at `omega_b`, so every angle is
//! constant at the nominal-frequency equilibrium.

use crate::controllers::{ControllerState, SideControllerState};

pub const STATE_LEN: usize = 20;

/// Channel names in flat-vector order.
pub const STATE_CHANNELS: [&str; STATE_LEN] = [
    "theta_sys",
    "df_sys",
    "dp_m",
    "theta_mmc_on",
    "theta_mmc_off",
    "w_on",
    "w_off",
    "u_dc_on",
    "u_dc_off",
    "i_dc",
    "i_cir_on",
    "i_cir_off",
    "df_vsg",
    "theta_owpp",
    "ctrl.on.freq_filter",
    "ctrl.on.udc_filter",
    "ctrl.on.integral",
    "ctrl.off.freq_filter",
    "ctrl.off.udc_filter",
    "ctrl.off.integral",
];

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimState {
    pub theta_sys: f64,
    /// Onshore frequency deviation, p.u.
    pub df_sys: f64,
    /// Mechanical power deviation, p.u.
    pub dp_m: f64,
    pub theta_mmc_on: f64,
    pub theta_mmc_off: f64,
    pub w_on: f64,
    pub w_off: f64,
    pub u_dc_on: f64,
    pub u_dc_off: f64,
    /// Line current, positive offshore to onshore.
    pub i_dc: f64,
    pub i_cir_on: f64,
    pub i_cir_off: f64,
    /// VSG frequency deviation, p.u.
    pub df_vsg: f64,
    pub theta_owpp: f64,
    pub ctrl: ControllerState,
}

impl SimState {
    pub fn to_array(&self) -> [f64; STATE_LEN] {
        let c = &self.ctrl;
        [
            self.theta_sys,
            self.df_sys,
            self.dp_m,
            self.theta_mmc_on,
            self.theta_mmc_off,
            self.w_on,
            self.w_off,
            self.u_dc_on,
            self.u_dc_off,
            self.i_dc,
            self.i_cir_on,
            self.i_cir_off,
            self.df_vsg,
            self.theta_owpp,
            c.on.freq_filter,
            c.on.udc_filter,
            c.on.integral,
            c.off.freq_filter,
            c.off.udc_filter,
            c.off.integral,
        ]
    }

    pub fn from_array(x: &[f64; STATE_LEN]) -> Self {
        Self {
            theta_sys: x[0],
            df_sys: x[1],
            dp_m: x[2],
            theta_mmc_on: x[3],
            theta_mmc_off: x[4],
            w_on: x[5],
            w_off: x[6],
            u_dc_on: x[7],
            u_dc_off: x[8],
            i_dc: x[9],
            i_cir_on: x[10],
            i_cir_off: x[11],
            df_vsg: x[12],
            theta_owpp: x[13],
            ctrl: ControllerState {
                on: SideControllerState {
                    freq_filter: x[14],
                    udc_filter: x[15],
                    integral: x[16],
                },
                off: SideControllerState {
                    freq_filter: x[17],
                    udc_filter: x[18],
                    integral: x[19],
                },
            },
        }
    }

    /// First non-finite channel, if any.
    pub fn non_finite_channel(&self) -> Option<&'static str> {
        self.to_array()
            .iter()
            .position(|v| !v.is_finite())
            .map(|i| STATE_CHANNELS[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn array_round_trip() {
        let mut x = [0.0; STATE_LEN];
        for (i, v) in x.iter_mut().enumerate() {
            *v = i as f64 + 0.5;
        }
        assert_eq!(SimState::from_array(&x).to_array(), x);
    }

    #[test]
    fn reports_non_finite_channel() {
        let mut s = SimState::default();
        assert_eq!(s.non_finite_channel(), None);
        s.u_dc_off = f64::NAN;
        assert_eq!(s.non_finite_channel(), Some("u_dc_off"));
    }
}
