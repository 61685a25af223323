//! TOML run configuration with strict key checking.

use std::path::Path;

use hvdcsim_core::controllers::{PdGains, PiGains, SideGains};
use hvdcsim_core::params::{
    Bases, CirculationModel, HvdcLineParams, MmcParams, OnshoreGridParams, OwppParams,
};
use hvdcsim_core::{ControlMode, ControllerGains, Scenario, Service, SystemParams};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BasesConfig {
    pub f0: f64,
    pub s_base: f64,
}

impl Default for BasesConfig {
    fn default() -> Self {
        let b = Bases::default();
        Self { f0: b.f0, s_base: b.s_base }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub h_sys: f64,
    pub d_sys: f64,
    pub r_droop: f64,
    pub t_gov: f64,
    pub e_sys: f64,
    pub x_eq: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        let g = OnshoreGridParams::default();
        Self {
            h_sys: g.h_sys,
            d_sys: g.d_sys,
            r_droop: g.r_droop,
            t_gov: g.t_gov,
            e_sys: g.e_sys,
            x_eq: g.x_eq,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MmcConfig {
    pub r_arm: f64,
    pub l_arm: f64,
    pub k_cir: f64,
    pub w_ref: f64,
    pub u_ac: f64,
    pub u_dc_ref: f64,
    pub current_loop_bandwidth: f64,
}

impl Default for MmcConfig {
    fn default() -> Self {
        let m = MmcParams::default();
        Self {
            r_arm: m.r_arm,
            l_arm: m.l_arm,
            k_cir: m.k_cir,
            w_ref: m.w_ref,
            u_ac: m.u_ac,
            u_dc_ref: m.u_dc_ref,
            current_loop_bandwidth: m.current_loop_bandwidth,
        }
    }
}

impl MmcConfig {
    fn params(&self) -> MmcParams {
        MmcParams {
            r_arm: self.r_arm,
            l_arm: self.l_arm,
            k_cir: self.k_cir,
            w_ref: self.w_ref,
            u_ac: self.u_ac,
            u_dc_ref: self.u_dc_ref,
            current_loop_bandwidth: self.current_loop_bandwidth,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MmcSection {
    pub circulation: CirculationModel,
    pub on: MmcConfig,
    pub off: MmcConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LineConfig {
    pub r_dc: f64,
    pub l_dc: f64,
    pub c_dc: f64,
}

impl Default for LineConfig {
    fn default() -> Self {
        let l = HvdcLineParams::default();
        Self { r_dc: l.r_dc, l_dc: l.l_dc, c_dc: l.c_dc }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OwppConfig {
    /// Overrides the service preset when set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_owpp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_owpp: Option<f64>,
    pub u_owpp: f64,
    pub x_eq: f64,
    pub p_ref: f64,
    pub h_floor: f64,
}

impl Default for OwppConfig {
    fn default() -> Self {
        let o = OwppParams::default();
        Self {
            h_owpp: None,
            d_owpp: None,
            u_owpp: o.u_owpp,
            x_eq: o.x_eq,
            p_ref: o.p_ref,
            h_floor: o.h_floor,
        }
    }
}

/// Gains by their conventional names: `p1`..`p6`, `d1`..`d4`, `i1`, `i2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GainsConfig {
    pub p1: f64,
    pub d1: f64,
    pub p2: f64,
    pub d2: f64,
    pub p5: f64,
    pub i1: f64,
    pub p3: f64,
    pub d3: f64,
    pub p4: f64,
    pub d4: f64,
    pub p6: f64,
    pub i2: f64,
    pub tau_d: f64,
}

impl Default for GainsConfig {
    fn default() -> Self {
        let g = ControllerGains::defaults(ControlMode::Holistic);
        let (on, off) = (&g.onshore, &g.offshore);
        Self {
            p1: on.pd_freq.p,
            d1: on.pd_freq.d,
            p2: on.pd_udc.p,
            d2: on.pd_udc.d,
            p5: on.pi_dc.kp,
            i1: on.pi_dc.ki,
            p3: off.pd_freq.p,
            d3: off.pd_freq.d,
            p4: off.pd_udc.p,
            d4: off.pd_udc.d,
            p6: off.pi_dc.kp,
            i2: off.pi_dc.ki,
            tau_d: PdGains::DEFAULT_TAU_D,
        }
    }
}

impl GainsConfig {
    fn gains(&self, mode: ControlMode) -> ControllerGains {
        let pd = |p, d| PdGains { p, d, tau_d: self.tau_d };
        ControllerGains {
            mode,
            onshore: SideGains {
                pd_freq: pd(self.p1, self.d1),
                pd_udc: pd(self.p2, self.d2),
                pi_dc: PiGains { kp: self.p5, ki: self.i1 },
            },
            offshore: SideGains {
                pd_freq: pd(self.p3, self.d3),
                pd_udc: pd(self.p4, self.d4),
                pi_dc: PiGains { kp: self.p6, ki: self.i2 },
            },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControlSection {
    pub energy_balancing: GainsConfig,
    pub holistic: GainsConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub control: ControlMode,
    pub service: Service,
    pub dp_dstb: f64,
    pub t_dstb: f64,
    /// Defaults to the service horizon.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    pub dt: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_owpp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_owpp: Option<f64>,
    pub output_decimation: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub control_decimation: Option<usize>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let s = Scenario::preset(ControlMode::Holistic, Service::Fcr);
        Self {
            control: s.control_mode,
            service: s.service,
            dp_dstb: s.dp_dstb,
            t_dstb: s.t_dstb,
            t_end: None,
            dt: s.dt,
            h_owpp: None,
            d_owpp: None,
            output_decimation: s.output_decimation,
            control_decimation: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub bases: BasesConfig,
    pub grid: GridConfig,
    pub mmc: MmcSection,
    pub line: LineConfig,
    pub owpp: OwppConfig,
    pub control: ControlSection,
    pub scenario: ScenarioConfig,
}

/// Validated inputs of one simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolved {
    pub params: SystemParams,
    pub gains: ControllerGains,
    pub scenario: Scenario,
}

impl RunConfig {
    /// Parses a TOML document. Unknown keys are rejected.
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(format!("cannot serialize config: {e}")))
    }

    /// Copy with command-line selections written into the scenario section.
    pub fn with_selection(&self, control: Option<ControlMode>, service: Option<Service>) -> Self {
        let mut c = self.clone();
        if let Some(m) = control {
            c.scenario.control = m;
        }
        if let Some(s) = service {
            c.scenario.service = s;
        }
        c
    }

    pub fn gains(&self, mode: ControlMode) -> ControllerGains {
        match mode {
            ControlMode::EnergyBalancing => self.control.energy_balancing.gains(mode),
            ControlMode::Holistic => self.control.holistic.gains(mode),
        }
    }

    pub fn params(&self) -> SystemParams {
        let g = &self.grid;
        let o = &self.owpp;
        SystemParams {
            bases: Bases { f0: self.bases.f0, s_base: self.bases.s_base },
            grid: OnshoreGridParams {
                h_sys: g.h_sys,
                d_sys: g.d_sys,
                r_droop: g.r_droop,
                t_gov: g.t_gov,
                e_sys: g.e_sys,
                x_eq: g.x_eq,
            },
            mmc_on: self.mmc.on.params(),
            mmc_off: self.mmc.off.params(),
            line: HvdcLineParams {
                r_dc: self.line.r_dc,
                l_dc: self.line.l_dc,
                c_dc: self.line.c_dc,
            },
            owpp: OwppParams {
                h_owpp: o.h_owpp.unwrap_or(0.0),
                d_owpp: o.d_owpp.unwrap_or(OwppParams::default().d_owpp),
                u_owpp: o.u_owpp,
                x_eq: o.x_eq,
                p_ref: o.p_ref,
                h_floor: o.h_floor,
            },
            circulation: self.mmc.circulation,
        }
    }

    /// Scenario-section values over `[owpp]` values over the service preset.
    pub fn scenario(&self) -> Scenario {
        let s = &self.scenario;
        let (h_preset, d_preset) = s.service.owpp_response();
        Scenario {
            control_mode: s.control,
            service: s.service,
            dp_dstb: s.dp_dstb,
            t_dstb: s.t_dstb,
            t_end: s.t_end.unwrap_or(s.service.default_horizon()),
            dt: s.dt,
            h_owpp: s.h_owpp.or(self.owpp.h_owpp).unwrap_or(h_preset),
            d_owpp: s.d_owpp.or(self.owpp.d_owpp).unwrap_or(d_preset),
            output_decimation: s.output_decimation,
            control_decimation: s.control_decimation,
        }
    }

    /// Validated parameters, gains and scenario for the configured selection.
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let scenario = self.scenario();
        scenario.validate().map_err(|e| CliError::Config(e.to_string()))?;
        let params = scenario.apply(&self.params());
        params.validate().map_err(|e| CliError::Config(e.to_string()))?;
        let gains = self.gains(scenario.control_mode);
        gains.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(Resolved { params, gains, scenario })
    }
}
