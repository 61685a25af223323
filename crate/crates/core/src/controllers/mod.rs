//! Dual-port grid-forming control of the MMCs and VSG control of the OWPP.

mod blocks;
mod dual_port;
mod gains;
mod vsg;

pub use blocks::{PdGains, PiGains};
pub use dual_port::{
    circulating_current_tracking, estimate_onshore_dc_voltage, DualPortController, OuterCommands,
    SideCommand,
};
pub use gains::{ControlMode, ControllerGains, SideGains, UnknownMode};
pub use vsg::vsg_step;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SideControllerState {
    /// Low-passed ΔW of the frequency PD.
    pub freq_filter: f64,
    /// Low-passed ΔW of the DC-voltage PD.
    pub udc_filter: f64,
    /// PI integrator, in DC current units.
    pub integral: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControllerState {
    pub on: SideControllerState,
    pub off: SideControllerState,
}
