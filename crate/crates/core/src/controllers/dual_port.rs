//! Dual-port grid-forming control of both MMCs.
//!
//! Per side: PD(ΔW) forms the frequency deviation, a second PD(ΔW) shifts the
//! DC-voltage reference, and a PI on the voltage error commands the DC terminal
//! current. A circulating-current tracking law turns that command into U_sum0.

use super::gains::{ControlMode, ControllerGains};
use super::{ControllerState, SideControllerState};
use crate::error::ControlError;
use crate::model::{OperatingPoint, PlantCommands};
use crate::params::{MmcParams, Side, SystemParams};
use crate::state::SimState;

/// Onshore DC voltage seen from the offshore terminal through the line resistance.
pub fn estimate_onshore_dc_voltage(u_dc_off: f64, i_dc: f64, r_dc: f64) -> f64 {
    u_dc_off - r_dc * i_dc
}

/// Zero-sequence voltage driving `i_cir` toward `i_cir_ref` at the loop bandwidth.
pub fn circulating_current_tracking(
    side: Side,
    u_dc: f64,
    i_cir: f64,
    i_cir_ref: f64,
    mmc: &MmcParams,
    omega_b: f64,
) -> f64 {
    let drive = mmc.l_cir() / omega_b * mmc.current_loop_bandwidth * (i_cir_ref - i_cir);
    match side {
        Side::On => u_dc - mmc.r_cir() * i_cir - drive,
        Side::Off => u_dc + mmc.r_cir() * i_cir + drive,
    }
}

/// Outer-loop commands: formed frequency deviations and DC terminal current references.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OuterCommands {
    pub df_star_on: f64,
    pub df_star_off: f64,
    pub i_dc_ref_on: f64,
    pub i_dc_ref_off: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideCommand {
    /// Formed frequency, p.u. (nominal plus deviation).
    pub f_star: f64,
    pub i_dc_ref: f64,
    pub u_sum0: f64,
}

struct SideSignals {
    df: f64,
    u_ref: f64,
    error: f64,
    i_dc_ref: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualPortController {
    gains: ControllerGains,
    params: SystemParams,
    u_ref_on: f64,
    u_ref_off: f64,
}

impl DualPortController {
    /// References are taken from the operating point so the loop starts at rest.
    pub fn new(gains: ControllerGains, params: &SystemParams, op: &OperatingPoint) -> Self {
        let u_ref_off = match gains.mode {
            ControlMode::EnergyBalancing => op.u_dc_off_0,
            ControlMode::Holistic => op.u_dc_on_0,
        };
        Self {
            gains,
            params: *params,
            u_ref_on: op.u_dc_on_0,
            u_ref_off,
        }
    }

    pub fn gains(&self) -> &ControllerGains {
        &self.gains
    }

    /// DC-voltage reference of a side before the PD shift.
    pub fn base_reference(&self, side: Side) -> f64 {
        match side {
            Side::On => self.u_ref_on,
            Side::Off => self.u_ref_off,
        }
    }

    /// (ΔW, regulated voltage) for a side.
    fn measure(&self, state: &SimState, side: Side) -> (f64, f64) {
        match side {
            Side::On => (state.w_on - self.params.mmc_on.w_ref, state.u_dc_on),
            Side::Off => {
                let y = match self.gains.mode {
                    ControlMode::EnergyBalancing => state.u_dc_off,
                    ControlMode::Holistic => {
                        estimate_onshore_dc_voltage(state.u_dc_off, state.i_dc, self.params.line.r_dc)
                    }
                };
                (state.w_off - self.params.mmc_off.w_ref, y)
            }
        }
    }

    fn signals(&self, side: Side, c: &SideControllerState, dw: f64, y: f64) -> SideSignals {
        let g = self.gains.side(side);
        let df = g.pd_freq.output(dw, c.freq_filter);
        let u_ref = self.base_reference(side) + g.pd_udc.output(dw, c.udc_filter);
        // Onshore withdraws more current when its voltage is high, offshore injects
        // more when the regulated voltage is low.
        let error = match side {
            Side::On => y - u_ref,
            Side::Off => u_ref - y,
        };
        SideSignals {
            df,
            u_ref,
            error,
            i_dc_ref: g.pi_dc.output(error, c.integral),
        }
    }

    fn side_state(state: &SimState, side: Side) -> &SideControllerState {
        match side {
            Side::On => &state.ctrl.on,
            Side::Off => &state.ctrl.off,
        }
    }

    /// Regulation error and shifted reference of a side, for diagnostics.
    pub fn regulation(&self, state: &SimState, side: Side) -> (f64, f64) {
        let (dw, y) = self.measure(state, side);
        let s = self.signals(side, Self::side_state(state, side), dw, y);
        (s.error, s.u_ref)
    }

    /// Outputs of the continuous-time controller at `state`.
    pub fn outer_commands(&self, state: &SimState) -> OuterCommands {
        let (dw_on, y_on) = self.measure(state, Side::On);
        let (dw_off, y_off) = self.measure(state, Side::Off);
        let on = self.signals(Side::On, &state.ctrl.on, dw_on, y_on);
        let off = self.signals(Side::Off, &state.ctrl.off, dw_off, y_off);
        OuterCommands {
            df_star_on: on.df,
            df_star_off: off.df,
            i_dc_ref_on: on.i_dc_ref,
            i_dc_ref_off: off.i_dc_ref,
        }
    }

    /// Continuous-time controller state derivative.
    pub fn derivatives(&self, state: &SimState) -> ControllerState {
        let side = |side: Side| {
            let g = self.gains.side(side);
            let c = Self::side_state(state, side);
            let (dw, y) = self.measure(state, side);
            let s = self.signals(side, c, dw, y);
            SideControllerState {
                freq_filter: g.pd_freq.filter_derivative(dw, c.freq_filter),
                udc_filter: g.pd_udc.filter_derivative(dw, c.udc_filter),
                integral: g.pi_dc.integral_derivative(s.error),
            }
        };
        ControllerState {
            on: side(Side::On),
            off: side(Side::Off),
        }
    }

    /// Applies the circulating-current tracking law to outer commands.
    pub fn plant_commands(&self, state: &SimState, outer: &OuterCommands) -> PlantCommands {
        let wb = self.params.bases.omega_b();
        let (on, off) = (&self.params.mmc_on, &self.params.mmc_off);
        let i_ref_on = outer.i_dc_ref_on / on.k_cir;
        let i_ref_off = outer.i_dc_ref_off / off.k_cir;
        PlantCommands {
            df_star_on: outer.df_star_on,
            df_star_off: outer.df_star_off,
            u_sum0_on: circulating_current_tracking(Side::On, state.u_dc_on, state.i_cir_on, i_ref_on, on, wb),
            u_sum0_off: circulating_current_tracking(Side::Off, state.u_dc_off, state.i_cir_off, i_ref_off, off, wb),
            i_cir_ref_on: i_ref_on,
            i_cir_ref_off: i_ref_off,
        }
    }

    /// Backward-Euler controller update of one side over `dt`.
    pub fn side_step(&self, state: &SimState, side: Side, dt: f64) -> (SideControllerState, SideCommand) {
        let g = self.gains.side(side);
        let mut c = *Self::side_state(state, side);
        let (dw, y) = self.measure(state, side);
        let df = g.pd_freq.step(&mut c.freq_filter, dw, dt);
        let u_ref = self.base_reference(side) + g.pd_udc.step(&mut c.udc_filter, dw, dt);
        let error = match side {
            Side::On => y - u_ref,
            Side::Off => u_ref - y,
        };
        let i_dc_ref = g.pi_dc.step(&mut c.integral, error, dt);
        let mmc = self.params.mmc(side);
        let (u_dc, i_cir) = match side {
            Side::On => (state.u_dc_on, state.i_cir_on),
            Side::Off => (state.u_dc_off, state.i_cir_off),
        };
        let u_sum0 = circulating_current_tracking(
            side,
            u_dc,
            i_cir,
            i_dc_ref / mmc.k_cir,
            mmc,
            self.params.bases.omega_b(),
        );
        (
            c,
            SideCommand {
                f_star: 1.0 + df,
                i_dc_ref,
                u_sum0,
            },
        )
    }

    /// Backward-Euler update of both sides; returns the new state and held commands.
    pub fn sample(&self, state: &SimState, dt: f64) -> (ControllerState, OuterCommands) {
        let (on, cmd_on) = self.side_step(state, Side::On, dt);
        let (off, cmd_off) = self.side_step(state, Side::Off, dt);
        (
            ControllerState { on, off },
            OuterCommands {
                df_star_on: cmd_on.f_star - 1.0,
                df_star_off: cmd_off.f_star - 1.0,
                i_dc_ref_on: cmd_on.i_dc_ref,
                i_dc_ref_off: cmd_off.i_dc_ref,
            },
        )
    }

    fn require_mode(&self, expected: ControlMode) -> Result<(), ControlError> {
        if self.gains.mode == expected {
            Ok(())
        } else {
            Err(ControlError::ModeMismatch {
                expected: expected.name(),
                actual: self.gains.mode.name(),
            })
        }
    }

    /// Energy-balancing step: each side regulates its own terminal.
    pub fn energy_balancing_step(
        &self,
        state: &SimState,
        side: Side,
        dt: f64,
    ) -> Result<(SideControllerState, SideCommand), ControlError> {
        self.require_mode(ControlMode::EnergyBalancing)?;
        Ok(self.side_step(state, side, dt))
    }

    /// Holistic onshore step: regulates the onshore terminal against the shared reference.
    pub fn holistic_step_onshore(
        &self,
        state: &SimState,
        dt: f64,
    ) -> Result<(SideControllerState, SideCommand), ControlError> {
        self.require_mode(ControlMode::Holistic)?;
        Ok(self.side_step(state, Side::On, dt))
    }

    /// Holistic offshore step: regulates the estimated onshore voltage.
    pub fn holistic_step_offshore(
        &self,
        state: &SimState,
        dt: f64,
    ) -> Result<(SideControllerState, SideCommand), ControlError> {
        self.require_mode(ControlMode::Holistic)?;
        Ok(self.side_step(state, Side::Off, dt))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rest(mode: ControlMode) -> (DualPortController, SimState) {
        let params = SystemParams::default();
        let op = OperatingPoint::from_dc(1.0, 0.8, params.line.r_dc);
        let ctrl = DualPortController::new(ControllerGains::defaults(mode), &params, &op);
        let mut s = SimState {
            w_on: 1.0,
            w_off: 1.0,
            u_dc_on: op.u_dc_on_0,
            u_dc_off: op.u_dc_off_0,
            i_dc: op.i_dc_0,
            i_cir_on: op.i_dc_0 / 3.0,
            i_cir_off: op.i_dc_0 / 3.0,
            ..SimState::default()
        };
        s.ctrl.on.integral = op.i_dc_0;
        s.ctrl.off.integral = op.i_dc_0;
        (ctrl, s)
    }

    #[test]
    fn estimator_examples() {
        assert_eq!(estimate_onshore_dc_voltage(1.0, 0.0, 0.01), 1.0);
        assert!((estimate_onshore_dc_voltage(1.01, 1.0, 0.01) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rest_gives_zero_deviation() {
        for mode in ControlMode::ALL {
            let (ctrl, s) = rest(mode);
            let o = ctrl.outer_commands(&s);
            assert_eq!(o.df_star_on, 0.0);
            assert_eq!(o.df_star_off, 0.0);
            assert!((o.i_dc_ref_on - 0.8).abs() < 1e-15);
            assert!((o.i_dc_ref_off - 0.8).abs() < 1e-12);
            let d = ctrl.derivatives(&s);
            assert!(d.on.integral.abs() < 1e-9 && d.off.integral.abs() < 1e-9);
        }
    }

    #[test]
    fn held_energy_deviation_gives_pd_steady_gains() {
        let (ctrl, mut s) = rest(ControlMode::EnergyBalancing);
        let w = 0.01;
        s.w_on += w;
        let mut last = None;
        for _ in 0..1000 {
            let (c, cmd) = ctrl.energy_balancing_step(&s, Side::On, 1e-3).unwrap();
            s.ctrl.on = c;
            s.ctrl.on.integral = 0.8;
            last = Some(cmd);
        }
        let df = last.unwrap().f_star - 1.0;
        let (_, u_ref) = ctrl.regulation(&s, Side::On);
        assert!((df - w).abs() < 1e-12);
        assert!(((u_ref - 1.0) / df - ctrl.gains().k1()).abs() < 1e-9);
    }

    #[test]
    fn mode_mismatch_is_reported() {
        let (ctrl, s) = rest(ControlMode::Holistic);
        assert!(matches!(
            ctrl.energy_balancing_step(&s, Side::On, 1e-3),
            Err(ControlError::ModeMismatch { .. })
        ));
        ctrl.holistic_step_onshore(&s, 1e-3).unwrap();
        ctrl.holistic_step_offshore(&s, 1e-3).unwrap();
        let (eb, s) = rest(ControlMode::EnergyBalancing);
        assert!(eb.holistic_step_offshore(&s, 1e-3).is_err());
    }

    #[test]
    fn holistic_offshore_regulates_estimate() {
        let (ctrl, s) = rest(ControlMode::Holistic);
        let (e, u_ref) = ctrl.regulation(&s, Side::Off);
        assert_eq!(u_ref, 1.0);
        assert!(e.abs() < 1e-15);
    }

    #[test]
    fn tracking_law_holds_current_at_reference() {
        let m = MmcParams::default();
        let wb = 100.0 * std::f64::consts::PI;
        let u = circulating_current_tracking(Side::On, 1.0, 0.2, 0.2, &m, wb);
        assert!((u - (1.0 - m.r_cir() * 0.2)).abs() < 1e-15);
        let u = circulating_current_tracking(Side::Off, 1.0, 0.2, 0.2, &m, wb);
        assert!((u - (1.0 + m.r_cir() * 0.2)).abs() < 1e-15);
    }
}
