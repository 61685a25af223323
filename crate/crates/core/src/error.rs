use thiserror::Error;

/// A physical or controller parameter outside its admissible range.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid parameter {field} = {value}: must be {requirement}")]
pub struct ParamError {
    pub field: String,
    pub value: f64,
    pub requirement: &'static str,
}

impl ParamError {
    pub fn new(field: impl Into<String>, value: f64, requirement: &'static str) -> Self {
        Self {
            field: field.into(),
            value,
            requirement,
        }
    }
}

/// Checks `cond` for a finite `value`, naming `field` on failure.
pub(crate) fn require(
    field: &str,
    value: f64,
    cond: bool,
    requirement: &'static str,
) -> Result<(), ParamError> {
    if value.is_finite() && cond {
        Ok(())
    } else {
        Err(ParamError::new(field, value, requirement))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Control(#[from] ControlError),
    #[error("non-finite derivative in channel {channel}")]
    NonFinite { channel: &'static str },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ControlError {
    #[error("controller mode mismatch: gains are {actual}, operation requires {expected}")]
    ModeMismatch {
        expected: &'static str,
        actual: &'static str,
    },
    #[error("VSG has no response channel: H_OWPP and D_OWPP are both zero")]
    NoVsgResponse,
    #[error(transparent)]
    Param(#[from] ParamError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InitError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("operating point did not converge in {iterations} iterations (last update {last_update:e})")]
    NoConvergence { iterations: usize, last_update: f64 },
    #[error("P = {power} exceeds the transfer capability {capability} of the {link} AC link")]
    TransferCapability {
        link: &'static str,
        power: f64,
        capability: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid scenario: {field} = {value}: must be {requirement}")]
    InvalidScenario {
        field: &'static str,
        value: f64,
        requirement: &'static str,
    },
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Control(#[from] ControlError),
    #[error("initialization failed: {0}")]
    Init(#[from] InitError),
    #[error("simulation aborted at t = {t} s: {source}")]
    Model { t: f64, source: ModelError },
    #[error("simulation aborted at t = {t} s: channel {channel} is not finite")]
    NonFinite { channel: &'static str, t: f64 },
    #[error("simulation aborted at t = {t} s: {channel} = {value} must stay positive")]
    InvariantViolation {
        channel: &'static str,
        value: f64,
        t: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("closed form singular at R_dc = 0")]
    SingularResistance,
    #[error("closed form requires D_OWPP > 0 (got {0})")]
    NonPositiveDroop(f64),
    #[error("negative discriminant {discriminant:e} (df_on = {df_on}, beta = {beta}, K1 = {k1}, U_dc_off_0 = {u_off0})")]
    Domain {
        discriminant: f64,
        df_on: f64,
        beta: f64,
        k1: f64,
        u_off0: f64,
    },
    #[error("oracle found no sign change in [{lo}, {hi}] for df_on = {df_on}")]
    NoBracket { df_on: f64, lo: f64, hi: f64 },
    #[error("oracle residual {residual:e} above tolerance")]
    OracleResidual { residual: f64 },
    #[error("trajectory covers {available} s after the event, metrics need {required} s")]
    HorizonTooShort { available: f64, required: f64 },
}
