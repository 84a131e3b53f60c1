//! Generalized active-strain model with an explicit activation level and
//! the stress contribution of its stretch dependence.

use super::ehret::{self, uniaxial_invariants, EhretParams};
use super::ActivationResult;
use crate::activation::{f_xi, integral_f_xi, ActivationInput};
use crate::error::{Error, Result};
use crate::kinematics::DeformationState;
use crate::num;
use crate::tensor::Mat3;

pub(crate) fn activation(
    p: &EhretParams,
    lambda: f64,
    input: &ActivationInput,
) -> Result<ActivationResult> {
    let drive = p.drive.drive(input);
    let integral = integral_f_xi(lambda, p.lambda_opt, p.lambda_min);
    if drive == 0.0 || integral == 0.0 {
        return Ok(ActivationResult::inactive());
    }
    let u = uniaxial_invariants(lambda, p.omega0);
    let a = p.alpha;
    let k = 4.0 * a / p.gamma * num::exp(a * (1.0 - u.i)) * drive;
    let excess = k * integral;
    if excess < 0.0 {
        return Err(Error::input("negative active stress gives phi < 1"));
    }
    let phi = 1.0 + excess;
    let ln_phi = num::ln_1p(excess);
    let fxi = f_xi(lambda, p.lambda_opt, p.lambda_min);
    let d_phi = k * (fxi - a * u.di * integral);
    let l2 = lambda * lambda;
    Ok(ActivationResult {
        omega: ln_phi / (a * l2),
        p_act: drive * fxi,
        d_omega: Some((d_phi / phi - 2.0 / lambda * ln_phi) / (a * l2)),
        iterations: 0,
        residual: 0.0,
    })
}

pub(crate) fn second_pk(p: &EhretParams, s: &DeformationState, act: &ActivationResult) -> Mat3 {
    let base = ehret::second_pk(p, s, act.omega);
    let d_omega = act.d_omega.unwrap_or(0.0);
    if d_omega == 0.0 {
        return base;
    }
    let weighting = p.weighting(&s.structural);
    let i = s.c.ddot(&weighting) + act.omega * s.lambda * s.lambda;
    base + s.structural * (0.25 * p.gamma * num::exp(p.alpha * (i - 1.0)) * s.lambda * d_omega)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn passive_and_subthreshold_levels_are_zero() {
        let p = EhretParams::published_tanh();
        assert_eq!(activation(&p, 1.1, &ActivationInput::passive()).unwrap().omega, 0.0);
        assert_eq!(activation(&p, 0.5, &ActivationInput::tetanic()).unwrap().omega, 0.0);
    }

    #[test]
    fn slope_matches_central_difference() {
        let p = EhretParams::published_tanh();
        let t = ActivationInput::tetanic();
        for &l in &[0.7, 0.95, 1.1806, 1.4] {
            let h = 1e-6 * l;
            let fd = (activation(&p, l + h, &t).unwrap().omega
                - activation(&p, l - h, &t).unwrap().omega)
                / (2.0 * h);
            let an = activation(&p, l, &t).unwrap().d_omega.unwrap();
            assert!((fd - an).abs() <= 1e-6 * an.abs().max(1e-3), "l = {l}: {fd} vs {an}");
        }
    }

    #[test]
    fn level_balances_uniaxial_energy() {
        // the activation adds exactly the integrated active stress to the
        // uniaxial energy potential
        let p = EhretParams::published_tanh();
        let l = 1.0;
        let r = activation(&p, l, &ActivationInput::tetanic()).unwrap();
        let u = uniaxial_invariants(l, p.omega0);
        let lhs = 0.25 * p.gamma / p.alpha
            * ((p.alpha * (u.i + r.omega * l * l - 1.0)).exp() - (p.alpha * (u.i - 1.0)).exp());
        let rhs = p.drive.p_opt() * integral_f_xi(l, p.lambda_opt, p.lambda_min);
        assert!((lhs - rhs).abs() < 1e-12 * rhs);
    }
}
