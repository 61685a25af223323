//! Frequency-response simulator of an HVDC-connected offshore wind power plant.
//!
//! The onshore grid is a single equivalent machine with a governor. Two MMCs
//! joined by a π-section DC line run dual-port grid-forming control in either
//! energy-balancing or holistic mode, and the OWPP runs a virtual synchronous
//! generator. All quantities are per unit with time in seconds.

pub mod analysis;
pub mod controllers;
pub mod error;
pub mod model;
pub mod params;
pub mod solver;
pub mod state;

pub use analysis::{compute_metrics, Metrics};
pub use controllers::{ControlMode, ControllerGains};
pub use error::{AnalysisError, ControlError, InitError, ModelError, ParamError, SolverError};
pub use params::SystemParams;
pub use solver::{init_steady_state, integrate, Scenario, Service, Trajectory};
pub use state::SimState;
