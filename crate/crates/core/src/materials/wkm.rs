//! Generalized active-strain model with an explicit activation level.

use super::ehret::{uniaxial_invariants, EhretParams};
use super::ActivationResult;
use crate::activation::{f_xi, ActivationInput};
use crate::error::{Error, Result};
use crate::lambert::lambert_w0;
use crate::num;

/// Activation level from the principal Lambert W branch, chosen so that the
/// uniaxial nominal stress gains exactly the active stress.
pub(crate) fn activation(
    p: &EhretParams,
    lambda: f64,
    input: &ActivationInput,
) -> Result<ActivationResult> {
    let p_act = p.drive.drive(input) * f_xi(lambda, p.lambda_opt, p.lambda_min);
    if p_act == 0.0 {
        return Ok(ActivationResult {
            d_omega: None,
            ..ActivationResult::inactive()
        });
    }
    let u = uniaxial_invariants(lambda, p.omega0);
    let a = p.alpha;
    let half = 0.5 * a * lambda * u.di;
    let chi = p_act * 2.0 * a * lambda / p.gamma
        * num::exp(0.5 * a * (2.0 - 2.0 * u.i + lambda * u.di))
        + half * num::exp(half);
    let w = lambert_w0(chi).map_err(|_| Error::ActivationSolve {
        reason: "argument outside the Lambert W domain".into(),
        chi: Some(chi),
        residual: None,
    })?;
    let residual = num::abs(w * num::exp(w) - chi);
    let omega = w / (a * lambda * lambda) - u.di / (2.0 * lambda);
    Ok(ActivationResult {
        omega,
        p_act,
        d_omega: None,
        iterations: 0,
        residual,
    })
}
