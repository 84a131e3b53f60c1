use super::Material;
use crate::activation::ActivationInput;
use crate::error::Result;
use crate::kinematics::DeformationState;
use crate::tensor::{Mat3, Tensor4};

/// Material tangent `ℂ = 2 ∂S/∂C` by central differences of the stress
/// with respect to symmetric perturbations of `C`, minor symmetries
/// enforced.
pub fn tangent_fd(
    material: &Material,
    state: &DeformationState,
    input: &ActivationInput,
) -> Result<Tensor4> {
    let h = 1e-6 * state.c.norm().max(1.0);
    let mut out = Tensor4::zeros();
    for k in 0..3 {
        for l in k..3 {
            let perturbed = |sign: f64| -> Result<Mat3> {
                let mut c = state.c;
                c[(k, l)] += sign * h;
                if k != l {
                    c[(l, k)] += sign * h;
                }
                let s = DeformationState::from_right_cauchy_green(c, state.m)?;
                material.second_pk(&s, input)
            };
            let diff = (perturbed(1.0)? - perturbed(-1.0)?) * (1.0 / (2.0 * h));
            // a diagonal entry enters C once, an off-diagonal pair twice
            let factor = if k == l { 2.0 } else { 1.0 };
            for i in 0..3 {
                for j in 0..3 {
                    let v = factor * diff[(i, j)];
                    out.set(i, j, k, l, v);
                    out.set(i, j, l, k, v);
                }
            }
        }
    }
    Ok(out.minor_symmetrized())
}
