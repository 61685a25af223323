//! Closed-form steady states, the bisection oracle, and response metrics.

mod closed_form;
mod metrics;

pub use crate::model::OperatingPoint;
pub use closed_form::{
    brute_force_steady_state, closed_form_fcr, closed_form_inertia, offshore_power_deviation,
    ClosedFormInputs, ORACLE_BRACKET,
};
pub use metrics::{
    compute_metrics, requirement, smoothed_derivative, tail_mean, Metrics, ENVELOPE_DELAY,
    MIN_POST_EVENT, QUIESCENT_FLOOR, RATE_WINDOW, TAIL_FRACTION,
};
