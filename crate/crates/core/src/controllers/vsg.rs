//! Virtual synchronous generator of the OWPP grid-side converter.

use crate::error::ControlError;
use crate::params::{Bases, OwppParams};

/// VSG swing: `2H·dΔf/dt = (P_ref − P_out) − D·Δf`, angle in the rotating frame.
///
/// Returns `(dΔf_vsg/dt, dθ_owpp/dt)`. A zero `H_OWPP` is replaced by `h_floor`.
pub fn vsg_step(
    df_vsg: f64,
    p_out: f64,
    p_ref: f64,
    owpp: &OwppParams,
    bases: &Bases,
) -> Result<(f64, f64), ControlError> {
    if owpp.h_owpp == 0.0 && owpp.d_owpp == 0.0 {
        return Err(ControlError::NoVsgResponse);
    }
    let h = owpp.effective_inertia();
    let d_df = ((p_ref - p_out) - owpp.d_owpp * df_vsg) / (2.0 * h);
    Ok((d_df, bases.omega_b() * df_vsg))
}
