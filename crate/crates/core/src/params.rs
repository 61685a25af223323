//! Physical parameters of the HVDC-OWPP model, all in per unit with time in seconds.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{require, ParamError};

/// Converter station side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    On,
    Off,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::On => "on",
            Side::Off => "off",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bases {
    /// Nominal frequency, Hz.
    pub f0: f64,
    /// Power base, MVA. Bookkeeping only.
    pub s_base: f64,
}

impl Bases {
    pub fn omega_b(&self) -> f64 {
        TAU * self.f0
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        require("bases.f0", self.f0, self.f0 > 0.0, "> 0")?;
        require("bases.s_base", self.s_base, self.s_base > 0.0, "> 0")
    }
}

impl Default for Bases {
    fn default() -> Self {
        Self {
            f0: 50.0,
            s_base: 1000.0,
        }
    }
}

/// Onshore equivalent machine with governor, behind a Thevenin reactance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnshoreGridParams {
    pub h_sys: f64,
    pub d_sys: f64,
    pub r_droop: f64,
    pub t_gov: f64,
    pub e_sys: f64,
    pub x_eq: f64,
}

impl Default for OnshoreGridParams {
    fn default() -> Self {
        Self {
            h_sys: 4.0,
            d_sys: 0.0,
            r_droop: 0.05,
            t_gov: 0.5,
            e_sys: 1.0,
            x_eq: 0.3,
        }
    }
}

impl OnshoreGridParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        require("grid.h_sys", self.h_sys, self.h_sys > 0.0, "> 0")?;
        require("grid.d_sys", self.d_sys, self.d_sys >= 0.0, ">= 0")?;
        require("grid.r_droop", self.r_droop, self.r_droop > 0.0, "> 0")?;
        require("grid.t_gov", self.t_gov, self.t_gov > 0.0, "> 0")?;
        require("grid.e_sys", self.e_sys, self.e_sys > 0.0, "> 0")?;
        require("grid.x_eq", self.x_eq, self.x_eq > 0.0, "> 0")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmcParams {
    pub r_arm: f64,
    pub l_arm: f64,
    /// Gain from circulation current to DC terminal current.
    pub k_cir: f64,
    /// Internal energy reference, p.u.·s.
    pub w_ref: f64,
    pub u_ac: f64,
    pub u_dc_ref: f64,
    /// Bandwidth of the circulating-current tracking law, rad/s.
    pub current_loop_bandwidth: f64,
}

impl Default for MmcParams {
    fn default() -> Self {
        Self {
            r_arm: 0.005,
            l_arm: 0.08,
            k_cir: 3.0,
            w_ref: 1.0,
            u_ac: 1.0,
            u_dc_ref: 1.0,
            current_loop_bandwidth: 1000.0,
        }
    }
}

impl MmcParams {
    pub fn r_cir(&self) -> f64 {
        2.0 * self.r_arm
    }

    pub fn l_cir(&self) -> f64 {
        2.0 * self.l_arm
    }

    pub fn validate(&self, side: Side) -> Result<(), ParamError> {
        let f = |name: &str| format!("mmc.{}.{name}", side.name());
        require(&f("r_arm"), self.r_arm, self.r_arm >= 0.0, ">= 0")?;
        require(&f("l_arm"), self.l_arm, self.l_arm > 0.0, "> 0")?;
        require(&f("k_cir"), self.k_cir, self.k_cir > 0.0, "> 0")?;
        require(&f("w_ref"), self.w_ref, self.w_ref > 0.0, "> 0")?;
        require(&f("u_ac"), self.u_ac, self.u_ac > 0.0, "> 0")?;
        require(&f("u_dc_ref"), self.u_dc_ref, self.u_dc_ref > 0.0, "> 0")?;
        require(
            &f("current_loop_bandwidth"),
            self.current_loop_bandwidth,
            self.current_loop_bandwidth > 0.0,
            "> 0",
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HvdcLineParams {
    pub r_dc: f64,
    pub l_dc: f64,
    /// Total line capacitance, split half per terminal.
    pub c_dc: f64,
}

impl Default for HvdcLineParams {
    fn default() -> Self {
        Self {
            r_dc: 0.01,
            l_dc: 0.05,
            c_dc: 7.5,
        }
    }
}

impl HvdcLineParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        require("line.r_dc", self.r_dc, self.r_dc >= 0.0, ">= 0")?;
        require("line.l_dc", self.l_dc, self.l_dc > 0.0, "> 0")?;
        require("line.c_dc", self.c_dc, self.c_dc > 0.0, "> 0")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OwppParams {
    pub h_owpp: f64,
    pub d_owpp: f64,
    pub u_owpp: f64,
    pub x_eq: f64,
    pub p_ref: f64,
    /// Inertia substituted when `h_owpp` is zero.
    pub h_floor: f64,
}

impl Default for OwppParams {
    fn default() -> Self {
        Self {
            h_owpp: 0.0,
            d_owpp: 20.0,
            u_owpp: 1.0,
            x_eq: 0.3,
            p_ref: 0.8,
            h_floor: 0.002,
        }
    }
}

impl OwppParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        require("owpp.h_owpp", self.h_owpp, self.h_owpp >= 0.0, ">= 0")?;
        require("owpp.d_owpp", self.d_owpp, self.d_owpp >= 0.0, ">= 0")?;
        require("owpp.u_owpp", self.u_owpp, self.u_owpp > 0.0, "> 0")?;
        require("owpp.x_eq", self.x_eq, self.x_eq > 0.0, "> 0")?;
        require(
            "owpp.p_ref",
            self.p_ref,
            (0.0..=1.0).contains(&self.p_ref),
            "in [0, 1]",
        )?;
        require("owpp.h_floor", self.h_floor, self.h_floor > 0.0, "> 0")
    }

    /// Inertia used by the VSG integrator.
    pub fn effective_inertia(&self) -> f64 {
        if self.h_owpp > 0.0 {
            self.h_owpp
        } else {
            self.h_floor
        }
    }
}

/// Treatment of the MMC circulation branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CirculationModel {
    #[default]
    Dynamic,
    /// L_cir -> 0: the circulation current follows its reference algebraically.
    QuasiStatic,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SystemParams {
    pub bases: Bases,
    pub grid: OnshoreGridParams,
    pub mmc_on: MmcParams,
    pub mmc_off: MmcParams,
    pub line: HvdcLineParams,
    pub owpp: OwppParams,
    pub circulation: CirculationModel,
}

impl SystemParams {
    pub fn mmc(&self, side: Side) -> &MmcParams {
        match side {
            Side::On => &self.mmc_on,
            Side::Off => &self.mmc_off,
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        self.bases.validate()?;
        self.grid.validate()?;
        self.mmc_on.validate(Side::On)?;
        self.mmc_off.validate(Side::Off)?;
        self.line.validate()?;
        self.owpp.validate()?;
        if self.mmc_off.u_dc_ref != self.mmc_on.u_dc_ref {
            return Err(ParamError::new(
                "mmc.off.u_dc_ref",
                self.mmc_off.u_dc_ref,
                "equal to mmc.on.u_dc_ref (shared nominal DC voltage)",
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_b_is_two_pi_f0() {
        let b = Bases::default();
        assert_eq!(b.omega_b(), 2.0 * std::f64::consts::PI * 50.0);
    }

    #[test]
    fn circulation_impedance_doubles_arm() {
        let m = MmcParams::default();
        assert_eq!(m.r_cir(), 2.0 * m.r_arm);
        assert_eq!(m.l_cir(), 2.0 * m.l_arm);
    }

    #[test]
    fn defaults_validate() {
        SystemParams::default().validate().unwrap();
    }

    #[test]
    fn negative_inertia_names_field() {
        let mut p = SystemParams::default();
        p.grid.h_sys = -1.0;
        let e = p.validate().unwrap_err();
        assert_eq!(e.field, "grid.h_sys");
    }

    #[test]
    fn nan_rejected() {
        let mut p = SystemParams::default();
        p.line.l_dc = f64::NAN;
        assert_eq!(p.validate().unwrap_err().field, "line.l_dc");
    }

    #[test]
    fn mismatched_dc_references_rejected() {
        let mut p = SystemParams::default();
        p.mmc_off.u_dc_ref = 1.05;
        assert_eq!(p.validate().unwrap_err().field, "mmc.off.u_dc_ref");
    }

    #[test]
    fn zero_inertia_uses_floor() {
        let o = OwppParams::default();
        assert_eq!(o.effective_inertia(), 0.002);
        let o = OwppParams { h_owpp: 4.0, ..o };
        assert_eq!(o.effective_inertia(), 4.0);
    }
}
