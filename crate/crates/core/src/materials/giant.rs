//! Active-strain model with a multiplicative split `F = F_e F_a`.

use super::ehret::{uniaxial_invariants, EhretParams};
use super::ActivationResult;
use crate::activation::{integral_f_xi, ActivationInput};
use crate::error::{Error, Result};
use crate::kinematics::DeformationState;
use crate::num;
use crate::tensor::{Mat3, Vec3};

const MAX_ITER: usize = 50;

/// Volume-preserving active deformation gradient
/// `(1-ω)·M + (1-ω)^{-1/2}·(I - M)` for fiber direction `m`.
pub fn active_deformation_gradient(omega: f64, m: &Vec3) -> Result<Mat3> {
    let structural = m.outer(m);
    let eta = check_level(omega)?;
    Ok(structural * eta + (Mat3::identity() - structural) * (1.0 / num::sqrt(eta)))
}

fn check_level(omega: f64) -> Result<f64> {
    if !(omega < 1.0) || !omega.is_finite() {
        return Err(Error::UnphysicalActivation { omega });
    }
    Ok(1.0 - omega)
}

/// Inverse of the active deformation gradient and its derivative with
/// respect to `ω`.
fn split(omega: f64, structural: &Mat3) -> Result<(Mat3, Mat3)> {
    let eta = check_level(omega)?;
    let transverse = Mat3::identity() - *structural;
    let inv = *structural * (1.0 / eta) + transverse * num::sqrt(eta);
    let d_fa = -*structural + transverse * (0.5 / (eta * num::sqrt(eta)));
    Ok((inv, d_fa))
}

/// Residual of the implicit activation equation at level `omega`, for the
/// active nominal stress `drive` at optimal stretch.
pub fn giant_residual(p: &EhretParams, lambda: f64, drive: f64, omega: f64) -> f64 {
    let target = p.uniaxial_potential(&uniaxial_invariants(lambda, p.omega0))
        + 4.0 / p.gamma * drive * integral_f_xi(lambda, p.lambda_opt, p.lambda_min);
    let r = lambda / (1.0 - omega);
    p.uniaxial_potential(&uniaxial_invariants(r, p.omega0)) - target
}

/// Solves the implicit activation equation on the physical branch
/// `ω ≥ max(0, 1 - λ)` by a bracketed Newton iteration.
fn solve_level(p: &EhretParams, lambda: f64, drive: f64) -> Result<(f64, usize, f64)> {
    let extra = 4.0 / p.gamma * drive * integral_f_xi(lambda, p.lambda_opt, p.lambda_min);
    if extra == 0.0 {
        return Ok((0.0, 0, 0.0));
    }
    if extra < 0.0 {
        return Err(Error::input("negative active stress"));
    }
    let target = p.uniaxial_potential(&uniaxial_invariants(lambda, p.omega0)) + extra;
    let scale = target.abs().max(1.0);
    let eval = |omega: f64| {
        let eta = 1.0 - omega;
        let u = uniaxial_invariants(lambda / eta, p.omega0);
        let res = p.uniaxial_potential(&u) - target;
        let slope = p.uniaxial_potential_slope(&u) * lambda / (eta * eta);
        (res, slope)
    };

    let mut lo = (1.0 - lambda).max(0.0);
    let mut hi = 0.5 * (1.0 + lo);
    let mut found = false;
    for _ in 0..60 {
        if eval(hi).0 > 0.0 {
            found = true;
            break;
        }
        lo = hi;
        hi = 0.5 * (1.0 + hi);
    }
    if !found {
        return Err(Error::ActivationSolve {
            reason: "no activation level below 1 balances the active stress".into(),
            chi: None,
            residual: None,
        });
    }

    let mut omega = lo;
    let (mut res, mut slope) = eval(omega);
    let mut iterations = 0;
    while iterations < MAX_ITER {
        iterations += 1;
        let newton = omega - res / slope;
        let next = if slope > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = next - omega;
        omega = next;
        (res, slope) = eval(omega);
        if res > 0.0 {
            hi = omega;
        } else {
            lo = omega;
        }
        if num::abs(step) <= 4.0 * f64::EPSILON * omega.max(1e-3) || res == 0.0 {
            break;
        }
    }
    let residual = num::abs(res);
    if residual > 1e-10 * scale {
        return Err(Error::ActivationSolve {
            reason: alloc::format!("Newton iteration stalled after {iterations} iterations"),
            chi: None,
            residual: Some(residual),
        });
    }
    if omega >= 1.0 {
        return Err(Error::UnphysicalActivation { omega });
    }
    Ok((omega, iterations, residual))
}

/// `∂ω/∂λ` by implicit differentiation of the activation equation. A
/// central difference of the level amplifies the round-off of the two
/// extra solves by `1/h`, which breaks frame indifference at 1e-8.
fn level_slope(p: &EhretParams, lambda: f64, drive: f64, fxi: f64, omega: f64) -> f64 {
    let eta = 1.0 - omega;
    let elastic = p.uniaxial_potential_slope(&uniaxial_invariants(lambda / eta, p.omega0));
    let passive = p.uniaxial_potential_slope(&uniaxial_invariants(lambda, p.omega0));
    let d_lambda = elastic / eta - passive - 4.0 / p.gamma * drive * fxi;
    let d_omega = elastic * lambda / (eta * eta);
    -d_lambda / d_omega
}

pub(crate) fn activation(
    p: &EhretParams,
    lambda: f64,
    input: &ActivationInput,
) -> Result<ActivationResult> {
    let drive = p.drive.drive(input);
    if drive == 0.0 || lambda <= p.lambda_min {
        return Ok(ActivationResult::inactive());
    }
    let (omega, iterations, residual) = solve_level(p, lambda, drive)?;
    let fxi = crate::activation::f_xi(lambda, p.lambda_opt, p.lambda_min);
    Ok(ActivationResult {
        omega,
        p_act: drive * fxi,
        d_omega: Some(level_slope(p, lambda, drive, fxi, omega)),
        iterations,
        residual,
    })
}

struct Elastic {
    fa_inv: Mat3,
    d_fa: Mat3,
    stress: Mat3,
    potential: f64,
}

fn elastic(p: &EhretParams, s: &DeformationState, omega: f64) -> Result<Elastic> {
    let (fa_inv, d_fa) = split(omega, &s.structural)?;
    let ce = (fa_inv * s.c * fa_inv).sym();
    let weighting = p.weighting(&s.structural);
    let ie = ce.ddot(&weighting);
    let je = ce.cofactor().ddot(&weighting);
    let det_ce = ce.det();
    let ce_inv = ce.inverse().ok_or(Error::SingularDeformation { det: det_ce })?;
    let ea = num::exp(p.alpha * (ie - 1.0));
    let eb = num::exp(p.beta * (je - 1.0));
    let stress = (weighting * ea - ce_inv * weighting * ce_inv * (eb * det_ce)
        + ce_inv * (je * eb))
        * (0.5 * p.gamma);
    let potential = 0.25
        * p.gamma
        * (libm::expm1(p.alpha * (ie - 1.0)) / p.alpha + libm::expm1(p.beta * (je - 1.0)) / p.beta);
    Ok(Elastic {
        fa_inv,
        d_fa,
        stress: stress.sym(),
        potential,
    })
}

pub(crate) fn second_pk(p: &EhretParams, s: &DeformationState, act: &ActivationResult) -> Result<Mat3> {
    let e = elastic(p, s, act.omega)?;
    let conventional = (e.fa_inv * e.stress * e.fa_inv).sym();
    let d_omega = act.d_omega.unwrap_or(0.0);
    let through_level = if d_omega == 0.0 {
        Mat3::zeros()
    } else {
        let work = conventional.ddot(&(s.c * e.fa_inv * e.d_fa));
        s.structural * (-work * d_omega / s.lambda)
    };
    let det_c = s.j * s.j;
    let vol = s.c_inv * (-0.5 * p.gamma * num::powf(det_c, -p.kappa));
    Ok(conventional + through_level + vol)
}

pub(crate) fn energy(p: &EhretParams, s: &DeformationState, omega: f64) -> Result<f64> {
    let e = elastic(p, s, omega)?;
    let det_c = s.j * s.j;
    Ok(e.potential + 0.25 * p.gamma * libm::expm1(-p.kappa * num::ln(det_c)) / p.kappa)
}
