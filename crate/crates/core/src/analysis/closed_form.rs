//! Steady-state frequency relation between the onshore grid and the offshore MMC.

use crate::error::AnalysisError;
use crate::model::OperatingPoint;
use crate::solver::Service;

/// Bracket searched by the oracle, p.u.
pub const ORACLE_BRACKET: (f64, f64) = (-0.1, 0.1);
const ORACLE_RESIDUAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormInputs {
    pub k1: f64,
    pub k2: f64,
    pub r_dc: f64,
    pub d_owpp: f64,
    pub op: OperatingPoint,
}

impl ClosedFormInputs {
    pub fn beta1(&self, df_on: f64) -> f64 {
        -self.k1 * df_on + self.k2 * self.r_dc * self.d_owpp + 2.0 * self.op.u_dc_off_0
            - self.op.u_dc_on_0
    }

    pub fn beta2(&self, df_on: f64) -> f64 {
        -self.k1 * df_on + 2.0 * self.op.u_dc_off_0 - self.op.u_dc_on_0
    }

    /// Residual of the export balance for a candidate `df_off`, scaled by R_dc.
    ///
    /// `U'_off(U'_off − U'_on) − U_off,0(U_off,0 − U_on,0) + R_dc·D·Δf_off`, with
    /// `U'_on = U_on,0 + K_1·Δf_on` and `U'_off = U_off,0 + Δf_off/K_2`.
    pub fn balance_residual(&self, df_on: f64, df_off: f64, service: Service) -> f64 {
        let op = &self.op;
        let u_on = op.u_dc_on_0 + self.k1 * df_on;
        let u_off = op.u_dc_off_0 + df_off / self.k2;
        let d = match service {
            Service::Fcr => self.d_owpp,
            Service::Inertia => 0.0,
        };
        u_off * (u_off - u_on) - op.u_dc_off_0 * (op.u_dc_off_0 - op.u_dc_on_0)
            + self.r_dc * d * df_off
    }
}

/// Export deviation of the offshore link for new terminal voltages.
pub fn offshore_power_deviation(
    u_on_prime: f64,
    u_off_prime: f64,
    op: &OperatingPoint,
    r_dc: f64,
) -> Result<f64, AnalysisError> {
    if !(r_dc > 0.0) {
        return Err(AnalysisError::SingularResistance);
    }
    Ok(u_off_prime * (u_off_prime - u_on_prime) / r_dc
        - op.u_dc_off_0 * (op.u_dc_off_0 - op.u_dc_on_0) / r_dc)
}

/// Positive root of `x² + β·x − c`, times `k2`.
fn positive_root(df_on: f64, beta: f64, inputs: &ClosedFormInputs) -> Result<f64, AnalysisError> {
    let c = inputs.k1 * df_on * inputs.op.u_dc_off_0;
    let disc = beta * beta + 4.0 * c;
    if !(disc >= 0.0) {
        return Err(AnalysisError::Domain {
            discriminant: disc,
            df_on,
            beta,
            k1: inputs.k1,
            u_off0: inputs.op.u_dc_off_0,
        });
    }
    let sq = disc.sqrt();
    // Conjugate form avoids cancellation between −β and the root.
    let x = if beta > 0.0 {
        2.0 * c / (beta + sq)
    } else {
        (-beta + sq) / 2.0
    };
    Ok(inputs.k2 * x)
}

/// Offshore frequency deviation under droop (FCR) response.
pub fn closed_form_fcr(df_on: f64, inputs: &ClosedFormInputs) -> Result<f64, AnalysisError> {
    if !(inputs.r_dc > 0.0) {
        return Err(AnalysisError::SingularResistance);
    }
    if !(inputs.d_owpp > 0.0) {
        return Err(AnalysisError::NonPositiveDroop(inputs.d_owpp));
    }
    positive_root(df_on, inputs.beta1(df_on), inputs)
}

/// Offshore frequency deviation under pure inertial response, steady state.
pub fn closed_form_inertia(df_on: f64, inputs: &ClosedFormInputs) -> Result<f64, AnalysisError> {
    if !(inputs.r_dc > 0.0) {
        return Err(AnalysisError::SingularResistance);
    }
    positive_root(df_on, inputs.beta2(df_on), inputs)
}

/// Bisection on Δf_off of the export balance. Independent of the closed forms and
/// valid at R_dc = 0.
pub fn brute_force_steady_state(
    df_on: f64,
    inputs: &ClosedFormInputs,
    service: Service,
) -> Result<f64, AnalysisError> {
    let g = |x: f64| inputs.balance_residual(df_on, x, service);
    let (mut lo, mut hi) = ORACLE_BRACKET;
    let (mut g_lo, g_hi) = (g(lo), g(hi));
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    if !(g_lo.signum() != g_hi.signum()) {
        return Err(AnalysisError::NoBracket { df_on, lo, hi });
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return Ok(mid);
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    let root = if g(lo).abs() <= g(hi).abs() { lo } else { hi };
    let residual = g(root).abs();
    if residual > ORACLE_RESIDUAL_TOL {
        return Err(AnalysisError::OracleResidual { residual });
    }
    Ok(root)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn defaults() -> ClosedFormInputs {
        ClosedFormInputs {
            k1: 1.0,
            k2: 1.0,
            r_dc: 0.01,
            d_owpp: 20.0,
            op: OperatingPoint {
                u_dc_on_0: 1.0,
                u_dc_off_0: 1.008,
                i_dc_0: 0.8,
                ..OperatingPoint::default()
            },
        }
    }

    #[test]
    fn offshore_deviation_examples() {
        let op = OperatingPoint::from_dc(1.0, 1.0, 0.01);
        assert_eq!(offshore_power_deviation(1.0, op.u_dc_off_0, &op, 0.01).unwrap(), 0.0);
        let v = offshore_power_deviation(1.0, 1.02, &op, 0.01).unwrap();
        assert!((v - 1.03).abs() < 1e-12, "{v}");
        assert_eq!(
            offshore_power_deviation(1.0, 1.02, &op, 0.0),
            Err(AnalysisError::SingularResistance)
        );
    }

    #[test]
    fn zero_event_zero_response() {
        let c = defaults();
        assert_eq!(closed_form_fcr(0.0, &c).unwrap(), 0.0);
        assert_eq!(closed_form_inertia(0.0, &c).unwrap(), 0.0);
        assert_eq!(brute_force_steady_state(0.0, &c, Service::Fcr).unwrap(), 0.0);
    }

    #[test]
    fn defaults_match_high_precision_root() {
        // Roots of the export balance evaluated to 40 digits.
        let c = defaults();
        let fcr = -0.003_313_919_724_541_561_985_3;
        let inertia = -0.003_968_380_434_581_934_019_1;
        assert!((closed_form_fcr(-0.004, &c).unwrap() - fcr).abs() < 1e-15);
        assert!((closed_form_inertia(-0.004, &c).unwrap() - inertia).abs() < 1e-15);
        assert!((brute_force_steady_state(-0.004, &c, Service::Fcr).unwrap() - fcr).abs() < 1e-15);
        assert!(
            (brute_force_steady_state(-0.004, &c, Service::Inertia).unwrap() - inertia).abs() < 1e-15
        );
    }

    #[test]
    fn fcr_reduces_offshore_deviation() {
        let c = defaults();
        assert!(closed_form_fcr(-0.004, &c).unwrap().abs() < 0.004);
    }

    #[test]
    fn singular_at_zero_resistance() {
        let c = ClosedFormInputs { r_dc: 0.0, ..defaults() };
        let e = closed_form_fcr(-0.004, &c).unwrap_err();
        assert_eq!(e.to_string(), "closed form singular at R_dc = 0");
        assert!(closed_form_inertia(-0.004, &c).is_err());
        // The oracle is posed without the division.
        let x = brute_force_steady_state(-0.004, &ClosedFormInputs { op: OperatingPoint { u_dc_off_0: 1.0, ..c.op }, ..c }, Service::Inertia).unwrap();
        assert!((x + 0.004).abs() < 1e-15);
    }

    #[test]
    fn droop_required_for_fcr_form() {
        let c = ClosedFormInputs { d_owpp: 0.0, ..defaults() };
        assert_eq!(closed_form_fcr(-0.004, &c), Err(AnalysisError::NonPositiveDroop(0.0)));
    }

    #[test]
    fn negative_discriminant_reported() {
        let mut c = defaults();
        c.op.u_dc_on_0 = 1.5;
        c.op.u_dc_off_0 = 1.0;
        let e = closed_form_inertia(-1.5, &c).unwrap_err();
        assert!(matches!(e, AnalysisError::Domain { .. }));
    }

    #[test]
    fn oracle_grid_agreement_and_monotonicity() {
        let c = defaults();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..20 {
            let df_on = -0.01 + 0.02 * i as f64 / 19.0;
            let oracle = brute_force_steady_state(df_on, &c, Service::Fcr).unwrap();
            let closed = closed_form_fcr(df_on, &c).unwrap();
            assert!((oracle - closed).abs() < 1e-10);
            assert!(oracle > prev);
            prev = oracle;
        }
    }
}
