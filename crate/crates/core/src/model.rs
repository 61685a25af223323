//! Open-loop dynamics: onshore machine, AC links, MMC energy, DC network, OWPP.
//!
//! Positive power flows OWPP -> offshore MMC -> DC line -> onshore MMC -> grid.

use crate::controllers::{estimate_onshore_dc_voltage, vsg_step};
use crate::error::{ModelError, ParamError};
use crate::params::{Bases, CirculationModel, HvdcLineParams, MmcParams, OnshoreGridParams, Side, SystemParams};
use crate::state::{SimState, STATE_CHANNELS};

/// Pre-event operating point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OperatingPoint {
    pub u_dc_on_0: f64,
    pub u_dc_off_0: f64,
    pub i_dc_0: f64,
    /// Wind power export, equal to `P_ref`.
    pub p_0: f64,
    pub p_ac_on_0: f64,
    pub theta_mmc_on_0: f64,
    pub theta_owpp_0: f64,
}

impl OperatingPoint {
    /// DC-side operating point with the drop law imposed; AC angles left at zero.
    pub fn from_dc(u_dc_on_0: f64, i_dc_0: f64, r_dc: f64) -> Self {
        let u_dc_off_0 = u_dc_on_0 + r_dc * i_dc_0;
        Self {
            u_dc_on_0,
            u_dc_off_0,
            i_dc_0,
            p_0: u_dc_off_0 * i_dc_0,
            p_ac_on_0: u_dc_on_0 * i_dc_0,
            ..Self::default()
        }
    }
}

/// Commands applied to the plant for one derivative evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlantCommands {
    pub df_star_on: f64,
    pub df_star_off: f64,
    pub u_sum0_on: f64,
    pub u_sum0_off: f64,
    /// Circulation current references, used by the quasi-static branch.
    pub i_cir_ref_on: f64,
    pub i_cir_ref_off: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DerivedSignals {
    pub p_ac_on: f64,
    pub p_ac_off: f64,
    pub p_dc_on: f64,
    pub p_dc_off: f64,
    pub i_dc_on: f64,
    pub i_dc_off: f64,
    pub u_sum0_on: f64,
    pub u_sum0_off: f64,
    pub u_hat_dc_on: f64,
    /// OWPP output power deviation.
    pub p_owpp: f64,
    pub df_star_on: f64,
    pub df_star_off: f64,
}

/// Lossless AC link power `u1·u2·sin(th1 − th2)/x` from node 1 to node 2.
pub fn ac_power_transfer(u1: f64, u2: f64, x: f64, th1: f64, th2: f64) -> Result<f64, ParamError> {
    if !(x > 0.0) {
        return Err(ParamError::new("x", x, "> 0"));
    }
    Ok(u1 * u2 * (th1 - th2).sin() / x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwingDerivatives {
    pub d_theta_sys: f64,
    pub d_df_sys: f64,
    pub d_dp_m: f64,
}

/// Swing equation with a first-order governor. `dp_ac_on` is the incremental HVDC infeed.
pub fn swing_derivatives(
    state: &SimState,
    dp_ac_on: f64,
    dp_dstb: f64,
    grid: &OnshoreGridParams,
    bases: &Bases,
) -> SwingDerivatives {
    let dp_e = dp_dstb - dp_ac_on;
    SwingDerivatives {
        d_theta_sys: bases.omega_b() * state.df_sys,
        d_df_sys: (state.dp_m - dp_e - grid.d_sys * state.df_sys) / (2.0 * grid.h_sys),
        d_dp_m: (-state.df_sys / grid.r_droop - state.dp_m) / grid.t_gov,
    }
}

/// Rate of change of MMC internal energy.
pub fn mmc_energy_derivative(p_ac: f64, p_dc: f64, side: Side) -> f64 {
    match side {
        Side::On => p_dc - p_ac,
        Side::Off => p_ac - p_dc,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcDerivatives {
    pub d_u_dc_on: f64,
    pub d_u_dc_off: f64,
    pub d_i_dc: f64,
    pub d_i_cir_on: f64,
    pub d_i_cir_off: f64,
}

/// Circulation branches feeding a π-section line.
pub fn dc_network_derivatives(
    state: &SimState,
    u_sum0_on: f64,
    u_sum0_off: f64,
    mmc_on: &MmcParams,
    mmc_off: &MmcParams,
    line: &HvdcLineParams,
    bases: &Bases,
) -> DcDerivatives {
    let wb = bases.omega_b();
    let i_dc_on = mmc_on.k_cir * state.i_cir_on;
    let i_dc_off = mmc_off.k_cir * state.i_cir_off;
    let c_half = line.c_dc / 2.0;
    DcDerivatives {
        d_u_dc_on: wb / c_half * (state.i_dc - i_dc_on),
        d_u_dc_off: wb / c_half * (i_dc_off - state.i_dc),
        d_i_dc: wb / line.l_dc * (state.u_dc_off - state.u_dc_on - line.r_dc * state.i_dc),
        d_i_cir_on: wb / mmc_on.l_cir() * (state.u_dc_on - u_sum0_on - mmc_on.r_cir() * state.i_cir_on),
        d_i_cir_off: wb / mmc_off.l_cir()
            * (u_sum0_off - state.u_dc_off - mmc_off.r_cir() * state.i_cir_off),
    }
}

/// Plant derivative for given commands. Controller-state derivatives are left at zero.
pub fn assemble_derivative(
    state: &SimState,
    dp_dstb: f64,
    params: &SystemParams,
    op: &OperatingPoint,
    cmds: &PlantCommands,
) -> Result<(SimState, DerivedSignals), ModelError> {
    let wb = params.bases.omega_b();
    let grid = &params.grid;
    let (mmc_on, mmc_off) = (&params.mmc_on, &params.mmc_off);

    let p_ac_on = ac_power_transfer(
        mmc_on.u_ac,
        grid.e_sys,
        grid.x_eq,
        state.theta_mmc_on,
        state.theta_sys,
    )?;
    let p_ac_off = ac_power_transfer(
        params.owpp.u_owpp,
        mmc_off.u_ac,
        params.owpp.x_eq,
        state.theta_owpp,
        state.theta_mmc_off,
    )?;

    let mut plant = *state;
    let (u_sum0_on, u_sum0_off) = match params.circulation {
        CirculationModel::Dynamic => (cmds.u_sum0_on, cmds.u_sum0_off),
        CirculationModel::QuasiStatic => {
            plant.i_cir_on = cmds.i_cir_ref_on;
            plant.i_cir_off = cmds.i_cir_ref_off;
            (
                state.u_dc_on - mmc_on.r_cir() * cmds.i_cir_ref_on,
                state.u_dc_off + mmc_off.r_cir() * cmds.i_cir_ref_off,
            )
        }
    };
    let i_dc_on = mmc_on.k_cir * plant.i_cir_on;
    let i_dc_off = mmc_off.k_cir * plant.i_cir_off;
    let p_dc_on = u_sum0_on * i_dc_on;
    let p_dc_off = u_sum0_off * i_dc_off;

    let swing = swing_derivatives(state, p_ac_on - op.p_ac_on_0, dp_dstb, grid, &params.bases);
    let mut dc = dc_network_derivatives(&plant, u_sum0_on, u_sum0_off, mmc_on, mmc_off, &params.line, &params.bases);
    if params.circulation == CirculationModel::QuasiStatic {
        dc.d_i_cir_on = 0.0;
        dc.d_i_cir_off = 0.0;
    }
    let (d_df_vsg, d_theta_owpp) = vsg_step(state.df_vsg, p_ac_off, op.p_0, &params.owpp, &params.bases)?;

    let d = SimState {
        theta_sys: swing.d_theta_sys,
        df_sys: swing.d_df_sys,
        dp_m: swing.d_dp_m,
        theta_mmc_on: wb * cmds.df_star_on,
        theta_mmc_off: wb * cmds.df_star_off,
        w_on: mmc_energy_derivative(p_ac_on, p_dc_on, Side::On),
        w_off: mmc_energy_derivative(p_ac_off, p_dc_off, Side::Off),
        u_dc_on: dc.d_u_dc_on,
        u_dc_off: dc.d_u_dc_off,
        i_dc: dc.d_i_dc,
        i_cir_on: dc.d_i_cir_on,
        i_cir_off: dc.d_i_cir_off,
        df_vsg: d_df_vsg,
        theta_owpp: d_theta_owpp,
        ctrl: Default::default(),
    };
    if let Some(i) = d.to_array().iter().position(|v| !v.is_finite()) {
        return Err(ModelError::NonFinite {
            channel: STATE_CHANNELS[i],
        });
    }

    let signals = DerivedSignals {
        p_ac_on,
        p_ac_off,
        p_dc_on,
        p_dc_off,
        i_dc_on,
        i_dc_off,
        u_sum0_on,
        u_sum0_off,
        u_hat_dc_on: estimate_onshore_dc_voltage(state.u_dc_off, state.i_dc, params.line.r_dc),
        p_owpp: p_ac_off - op.p_0,
        df_star_on: cmds.df_star_on,
        df_star_off: cmds.df_star_off,
    };
    Ok((d, signals))
}
