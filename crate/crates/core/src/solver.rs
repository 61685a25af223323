//! Operating-point initialization and fixed-step RK4 integration of the closed loop.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::controllers::{ControlMode, ControllerGains, DualPortController, OuterCommands};
use crate::error::{ControlError, InitError, ModelError, SolverError};
use crate::model::{assemble_derivative, DerivedSignals, OperatingPoint};
use crate::params::SystemParams;
use crate::state::{SimState, STATE_LEN};

/// Grid service requested from the OWPP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Service {
    /// Frequency containment reserve: droop only.
    Fcr,
    /// Inertial response: virtual inertia only.
    Inertia,
}

impl Service {
    pub const ALL: [Service; 2] = [Service::Fcr, Service::Inertia];

    pub fn name(self) -> &'static str {
        match self {
            Service::Fcr => "fcr",
            Service::Inertia => "inertia",
        }
    }

    /// (H_OWPP, D_OWPP) for the service.
    pub fn owpp_response(self) -> (f64, f64) {
        match self {
            Service::Fcr => (0.0, 20.0),
            Service::Inertia => (4.0, 0.0),
        }
    }

    pub fn default_horizon(self) -> f64 {
        match self {
            Service::Fcr => 30.0,
            Service::Inertia => 60.0,
        }
    }
}

impl fmt::Display for Service {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownService(pub String);

impl fmt::Display for UnknownService {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown scenario `{}` (expected fcr or inertia)", self.0)
    }
}

impl std::error::Error for UnknownService {}

impl FromStr for Service {
    type Err = UnknownService;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fcr" => Ok(Service::Fcr),
            "inertia" => Ok(Service::Inertia),
            _ => Err(UnknownService(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub control_mode: ControlMode,
    pub service: Service,
    /// Load step, positive = load increase.
    pub dp_dstb: f64,
    pub t_dstb: f64,
    pub t_end: f64,
    pub dt: f64,
    pub h_owpp: f64,
    pub d_owpp: f64,
    /// Keep every n-th computed step.
    pub output_decimation: usize,
    /// Sample the controllers every n steps (backward Euler, held outputs).
    /// `None` integrates them continuously inside RK4.
    pub control_decimation: Option<usize>,
}

impl Scenario {
    pub const DEFAULT_DT: f64 = 2e-4;

    pub fn preset(control_mode: ControlMode, service: Service) -> Self {
        let (h_owpp, d_owpp) = service.owpp_response();
        Self {
            control_mode,
            service,
            dp_dstb: 0.1,
            t_dstb: 1.0,
            t_end: service.default_horizon(),
            dt: Self::DEFAULT_DT,
            h_owpp,
            d_owpp,
            output_decimation: 10,
            control_decimation: None,
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let check = |field: &'static str, value: f64, ok: bool, requirement: &'static str| {
            if value.is_finite() && ok {
                Ok(())
            } else {
                Err(SolverError::InvalidScenario { field, value, requirement })
            }
        };
        check("scenario.dt", self.dt, self.dt > 0.0 && self.dt <= 1e-3, "in (0, 1e-3]")?;
        check("scenario.dp_dstb", self.dp_dstb, true, "finite")?;
        check("scenario.t_dstb", self.t_dstb, self.t_dstb >= 0.0, ">= 0")?;
        check("scenario.t_end", self.t_end, self.t_end > self.t_dstb, "> t_dstb")?;
        check("scenario.h_owpp", self.h_owpp, self.h_owpp >= 0.0, ">= 0")?;
        check("scenario.d_owpp", self.d_owpp, self.d_owpp >= 0.0, ">= 0")?;
        check(
            "scenario.output_decimation",
            self.output_decimation as f64,
            self.output_decimation >= 1,
            ">= 1",
        )?;
        if let Some(m) = self.control_decimation {
            check("scenario.control_decimation", m as f64, m >= 1, ">= 1")?;
        }
        if self.h_owpp == 0.0 && self.d_owpp == 0.0 {
            return Err(ControlError::NoVsgResponse.into());
        }
        Ok(())
    }

    /// Parameters with the scenario's OWPP response applied.
    pub fn apply(&self, params: &SystemParams) -> SystemParams {
        let mut p = *params;
        p.owpp.h_owpp = self.h_owpp;
        p.owpp.d_owpp = self.d_owpp;
        p
    }

    /// Index of the first grid point at or after `t_dstb`.
    pub fn event_step(&self) -> usize {
        ((self.t_dstb / self.dt) - 1e-9).ceil().max(0.0) as usize
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

const INIT_MAX_ITER: usize = 100;
const INIT_TOL: f64 = 1e-12;

/// Pre-event equilibrium with all controller deviations at rest.
pub fn init_steady_state(
    params: &SystemParams,
    gains: &ControllerGains,
) -> Result<(SimState, OperatingPoint), InitError> {
    params.validate()?;
    gains.validate()?;
    let (on, off) = (&params.mmc_on, &params.mmc_off);
    let p_ref = params.owpp.p_ref;
    let u_on = on.u_dc_ref;
    let r_dc = params.line.r_dc;

    // Offshore source power u_sum0·I_dc = (U_off + R_cir·I/K)·I must equal P_ref.
    let mut i_dc = p_ref / u_on;
    let mut converged = false;
    let mut last_update = f64::INFINITY;
    for _ in 0..INIT_MAX_ITER {
        let next = p_ref / (u_on + (r_dc + off.r_cir() / off.k_cir) * i_dc);
        last_update = (next - i_dc).abs();
        i_dc = next;
        if last_update <= INIT_TOL {
            converged = true;
            break;
        }
    }
    if !converged || !i_dc.is_finite() {
        return Err(InitError::NoConvergence {
            iterations: INIT_MAX_ITER,
            last_update,
        });
    }

    let u_off = u_on + r_dc * i_dc;
    let i_cir_on = i_dc / on.k_cir;
    let i_cir_off = i_dc / off.k_cir;
    let p_ac_on_0 = (u_on - on.r_cir() * i_cir_on) * i_dc;

    let angle = |link: &'static str, power: f64, u1: f64, u2: f64, x: f64| {
        let capability = u1 * u2 / x;
        let s = power / capability;
        if s.abs() > 1.0 {
            Err(InitError::TransferCapability { link, power, capability })
        } else {
            Ok(s.asin())
        }
    };
    let theta_mmc_on = angle("onshore", p_ac_on_0, on.u_ac, params.grid.e_sys, params.grid.x_eq)?;
    let theta_owpp = angle("offshore", p_ref, params.owpp.u_owpp, off.u_ac, params.owpp.x_eq)?;

    let op = OperatingPoint {
        u_dc_on_0: u_on,
        u_dc_off_0: u_off,
        i_dc_0: i_dc,
        p_0: p_ref,
        p_ac_on_0,
        theta_mmc_on_0: theta_mmc_on,
        theta_owpp_0: theta_owpp,
    };
    let mut state = SimState {
        theta_mmc_on,
        w_on: on.w_ref,
        w_off: off.w_ref,
        u_dc_on: u_on,
        u_dc_off: u_off,
        i_dc,
        i_cir_on,
        i_cir_off,
        theta_owpp,
        ..SimState::default()
    };
    state.ctrl.on.integral = i_dc;
    state.ctrl.off.integral = i_dc;
    Ok((state, op))
}

/// Closed-loop right-hand side: plant, controllers and VSG.
#[derive(Debug, Clone, Copy)]
pub struct ClosedLoop {
    pub params: SystemParams,
    pub op: OperatingPoint,
    pub controller: DualPortController,
}

impl ClosedLoop {
    pub fn new(params: SystemParams, gains: ControllerGains, op: OperatingPoint) -> Self {
        Self {
            controller: DualPortController::new(gains, &params, &op),
            params,
            op,
        }
    }

    /// State derivative. With `held` commands the controller states are frozen.
    pub fn derivative(
        &self,
        x: &SimState,
        dp_dstb: f64,
        held: Option<&OuterCommands>,
    ) -> Result<(SimState, DerivedSignals), ModelError> {
        let outer = match held {
            Some(h) => *h,
            None => self.controller.outer_commands(x),
        };
        let cmds = self.controller.plant_commands(x, &outer);
        let (mut d, signals) = assemble_derivative(x, dp_dstb, &self.params, &self.op, &cmds)?;
        if held.is_none() {
            d.ctrl = self.controller.derivatives(x);
        }
        Ok((d, signals))
    }
}

/// Uniformly sampled closed-loop response.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub time: Vec<f64>,
    pub states: Vec<SimState>,
    pub signals: Vec<DerivedSignals>,
    pub operating_point: OperatingPoint,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    /// One channel built from each (state, signals) sample.
    pub fn channel(&self, f: impl Fn(&SimState, &DerivedSignals) -> f64) -> Vec<f64> {
        self.states
            .iter()
            .zip(&self.signals)
            .map(|(s, d)| f(s, d))
            .collect()
    }
}

fn rk4_step<E>(
    x: &[f64; STATE_LEN],
    dt: f64,
    f: impl Fn(&[f64; STATE_LEN]) -> Result<[f64; STATE_LEN], E>,
) -> Result<[f64; STATE_LEN], E> {
    let axpy = |a: f64, k: &[f64; STATE_LEN]| {
        let mut y = *x;
        for (yi, ki) in y.iter_mut().zip(k) {
            *yi += a * ki;
        }
        y
    };
    let k1 = f(x)?;
    let k2 = f(&axpy(dt / 2.0, &k1))?;
    let k3 = f(&axpy(dt / 2.0, &k2))?;
    let k4 = f(&axpy(dt, &k3))?;
    let mut y = *x;
    for i in 0..STATE_LEN {
        y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(y)
}

fn check_state(x: &SimState, t: f64) -> Result<(), SolverError> {
    if let Some(channel) = x.non_finite_channel() {
        return Err(SolverError::NonFinite { channel, t });
    }
    for (channel, value) in [
        ("u_dc_on", x.u_dc_on),
        ("u_dc_off", x.u_dc_off),
        ("w_on", x.w_on),
        ("w_off", x.w_off),
    ] {
        if value <= 0.0 {
            return Err(SolverError::InvariantViolation { channel, value, t });
        }
    }
    Ok(())
}

/// Integrates the scenario from the pre-event equilibrium with classical RK4.
pub fn integrate(
    scenario: &Scenario,
    params: &SystemParams,
    gains: &ControllerGains,
) -> Result<Trajectory, SolverError> {
    scenario.validate()?;
    if scenario.control_mode != gains.mode {
        return Err(ControlError::ModeMismatch {
            expected: scenario.control_mode.name(),
            actual: gains.mode.name(),
        }
        .into());
    }
    let params = scenario.apply(params);
    let (x0, op) = init_steady_state(&params, gains)?;
    let sys = ClosedLoop::new(params, *gains, op);

    let n = scenario.steps();
    let k_event = scenario.event_step();
    let dt = scenario.dt;
    let dec = scenario.output_decimation;
    let samples = n / dec + 1;
    let mut traj = Trajectory {
        time: Vec::with_capacity(samples),
        states: Vec::with_capacity(samples),
        signals: Vec::with_capacity(samples),
        operating_point: op,
    };

    let mut x = x0;
    let mut held: Option<OuterCommands> = None;
    for k in 0..=n {
        let t = k as f64 * dt;
        let dp = if k >= k_event { scenario.dp_dstb } else { 0.0 };
        if let Some(m) = scenario.control_decimation {
            if k % m == 0 {
                let (ctrl, cmds) = sys.controller.sample(&x, m as f64 * dt);
                x.ctrl = ctrl;
                held = Some(cmds);
            }
        }
        if k % dec == 0 {
            let (_, signals) = sys
                .derivative(&x, dp, held.as_ref())
                .map_err(|source| SolverError::Model { t, source })?;
            traj.time.push(t);
            traj.states.push(x);
            traj.signals.push(signals);
        }
        if k == n {
            break;
        }
        let next = rk4_step(&x.to_array(), dt, |y| {
            sys.derivative(&SimState::from_array(y), dp, held.as_ref())
                .map(|(d, _)| d.to_array())
        })
        .map_err(|source| SolverError::Model { t, source })?;
        x = SimState::from_array(&next);
        check_state(&x, t + dt)?;
    }
    Ok(traj)
}
