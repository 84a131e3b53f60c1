//! Deformation state and the invariants built on it.

use crate::error::{Error, Result};
use crate::linalg::spd_sqrt;
use crate::num;
use crate::tensor::{Mat3, Vec3};

/// Offset added to the `acosh` argument of the transverse shear invariant
/// before its derivative is formed; the derivative is singular at θ = 1.
pub const ACOSH_EPS: f64 = 1e-9;

/// Deformation gradient together with the kinematic quantities derived from
/// it for a fiber direction `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationState {
    pub f: Mat3,
    pub j: f64,
    pub c: Mat3,
    pub c_inv: Mat3,
    /// Isochoric right Cauchy-Green tensor `J^{-2/3} C`.
    pub c_bar: Mat3,
    pub m: Vec3,
    /// Structural tensor `m ⊗ m`.
    pub structural: Mat3,
    /// Fiber stretch `√(C : M)`.
    pub lambda: f64,
}

impl DeformationState {
    pub fn new(f: Mat3, m: Vec3) -> Result<Self> {
        check_direction(&m)?;
        let j = f.det();
        if !(j > 0.0) || !f.is_finite() {
            return Err(Error::SingularDeformation { det: j });
        }
        let c = (f.transpose() * f).sym();
        Self::assemble(f, j, c, m)
    }

    /// Builds a state from a symmetric positive definite `C`, taking the
    /// right stretch tensor `U = √C` as the deformation gradient.
    pub fn from_right_cauchy_green(c: Mat3, m: Vec3) -> Result<Self> {
        check_direction(&m)?;
        if !c.is_symmetric(1e-12 * c.max_abs().max(1.0)) {
            return Err(Error::input("right Cauchy-Green tensor is not symmetric"));
        }
        let det_c = c.det();
        if !(det_c > 0.0) {
            return Err(Error::SingularDeformation { det: det_c });
        }
        let u = spd_sqrt(&c).ok_or(Error::SingularDeformation { det: det_c })?;
        Self::assemble(u, num::sqrt(det_c), c.sym(), m)
    }

    fn assemble(f: Mat3, j: f64, c: Mat3, m: Vec3) -> Result<Self> {
        let c_inv = c
            .inverse()
            .ok_or(Error::SingularDeformation { det: j })?
            .sym();
        let c_bar = c * num::powf(j, -2.0 / 3.0);
        let structural = m.outer(&m);
        let lambda = num::sqrt(c.ddot(&structural));
        Ok(DeformationState {
            f,
            j,
            c,
            c_inv,
            c_bar,
            m,
            structural,
            lambda,
        })
    }

    /// Isochoric fiber stretch `λ̄ = J^{-1/3} λ`.
    pub fn lambda_bar(&self) -> f64 {
        self.lambda / num::cbrt(self.j)
    }
}

fn check_direction(m: &Vec3) -> Result<()> {
    if num::abs(m.norm() - 1.0) > 1e-12 {
        return Err(Error::input("fiber direction must be a unit vector"));
    }
    Ok(())
}

/// Modified invariants `(Ī₁, Ī₄, Ī₅)` of the isochoric deformation.
pub fn modified_invariants(state: &DeformationState) -> (f64, f64, f64) {
    let cb = &state.c_bar;
    let cm = cb.mul_vec(&state.m);
    (cb.trace(), state.m.dot(&cm), cm.dot(&cm))
}

/// Along-fiber (`B₁`) and transverse (`B₂`) shear invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearInvariants {
    pub b1: f64,
    pub b2: f64,
    /// `acosh` argument of `B₂`, clamped to at least 1.
    pub theta: f64,
}

pub fn strain_invariants(i1: f64, i4: f64, i5: f64) -> Result<ShearInvariants> {
    let ratio = i5 / (i4 * i4);
    if !(ratio >= 1.0 - 1e-6) {
        return Err(Error::InconsistentInvariant(alloc::format!(
            "I5/I4^2 = {ratio} below 1"
        )));
    }
    let theta = (i1 * i4 - i5) / (2.0 * num::sqrt(i4));
    if !(theta >= 1.0 - 1e-6) {
        return Err(Error::InconsistentInvariant(alloc::format!(
            "acosh argument {theta} below 1"
        )));
    }
    let theta = theta.max(1.0);
    Ok(ShearInvariants {
        b1: num::sqrt((ratio - 1.0).max(0.0)),
        b2: acosh(theta),
        theta,
    })
}

/// `acosh(θ)` for θ ≥ 1, accurate close to 1.
pub(crate) fn acosh(theta: f64) -> f64 {
    let s = theta - 1.0;
    num::ln_1p(s + num::sqrt(s * (s + 2.0)))
}

/// `acosh(θ) / √(θ² − 1)` with θ lifted to at least `1 + ACOSH_EPS`.
pub(crate) fn acosh_ratio(theta: f64) -> f64 {
    let t = theta.max(1.0 + ACOSH_EPS);
    let s = t - 1.0;
    acosh(t) / num::sqrt(s * (s + 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e3() -> Vec3 {
        Vec3::e(2)
    }

    fn utcaf(l: f64) -> Mat3 {
        let t = 1.0 / l.sqrt();
        Mat3::diag(t, t, l)
    }

    #[test]
    fn identity_state() {
        let s = DeformationState::new(Mat3::identity(), e3()).unwrap();
        assert_eq!(s.j, 1.0);
        assert_eq!(s.lambda, 1.0);
        assert_eq!(s.c, Mat3::identity());
    }

    #[test]
    fn uniaxial_fiber_stretch() {
        let s = DeformationState::new(utcaf(1.2), e3()).unwrap();
        assert!((s.lambda - 1.2).abs() < 1e-14);
        assert!((s.j - 1.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_gradient_is_rejected() {
        let f = Mat3::diag(1.0, 0.0, 1.0);
        assert!(matches!(
            DeformationState::new(f, e3()),
            Err(Error::SingularDeformation { .. })
        ));
    }

    #[test]
    fn non_unit_direction_is_rejected() {
        let r = DeformationState::new(Mat3::identity(), Vec3::new(0.0, 0.0, 1.1));
        assert!(matches!(r, Err(Error::Input(_))));
    }

    #[test]
    fn modified_invariants_identity() {
        let s = DeformationState::new(Mat3::identity(), e3()).unwrap();
        assert_eq!(modified_invariants(&s), (3.0, 1.0, 1.0));
    }

    #[test]
    fn modified_invariants_uniaxial() {
        let s = DeformationState::new(utcaf(1.2), e3()).unwrap();
        let (_, i4, i5) = modified_invariants(&s);
        assert!((i4 - 1.44).abs() < 1e-13);
        // direct evaluation: C̄² : M = (C̄ m)·(C̄ m) = 1.44²
        assert!((i5 - 2.0736).abs() < 1e-13);
    }

    #[test]
    fn shear_free_states_have_zero_shear_invariants() {
        for f in [Mat3::identity(), utcaf(1.2), utcaf(0.7)] {
            let s = DeformationState::new(f, e3()).unwrap();
            let (i1, i4, i5) = modified_invariants(&s);
            let b = strain_invariants(i1, i4, i5).unwrap();
            assert!(b.b1.abs() < 1e-7 && b.b2.abs() < 1e-7, "{b:?}");
        }
    }

    #[test]
    fn simple_shear_along_fiber_gives_b1_equal_to_shear() {
        let nu = 0.3;
        let f = Mat3::from_rows([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, nu, 1.0]]);
        let s = DeformationState::new(f, e3()).unwrap();
        let (i1, i4, i5) = modified_invariants(&s);
        let b = strain_invariants(i1, i4, i5).unwrap();
        assert!((b.b1 - nu).abs() < 1e-14);
        assert!(b.b2.abs() < 1e-7);
    }

    #[test]
    fn inconsistent_invariants_are_rejected() {
        assert!(strain_invariants(3.0, 1.0, 0.5).is_err());
        assert!(strain_invariants(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn acosh_ratio_limit() {
        assert!((acosh_ratio(1.0) - 1.0).abs() < 1e-9);
        let t: f64 = 1.7;
        let direct = (t + (t * t - 1.0).sqrt()).ln() / (t * t - 1.0).sqrt();
        assert!((acosh_ratio(t) - direct).abs() < 1e-15);
    }

    #[test]
    fn from_c_reproduces_state() {
        let f = Mat3::from_rows([[1.1, 0.2, 0.0], [0.0, 0.95, 0.1], [0.05, 0.0, 1.02]]);
        let a = DeformationState::new(f, e3()).unwrap();
        let b = DeformationState::from_right_cauchy_green(a.c, e3()).unwrap();
        assert!((a.c - b.c).max_abs() < 1e-14);
        assert!((a.j - b.j).abs() < 1e-14);
        assert!(((b.f.transpose() * b.f) - a.c).max_abs() < 1e-13);
    }
}
