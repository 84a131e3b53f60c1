//! Active-stress model with a Neo-Hookean matrix.

use crate::activation::{f_active, f_active_antiderivative, f_t_tanh, ActivationInput, PassiveCurve};
use crate::error::{Error, Result};
use crate::kinematics::{acosh_ratio, modified_invariants, strain_invariants, DeformationState};
use crate::num;
use crate::tensor::Mat3;

/// Parameters of the active-stress model. Moduli and stresses in kPa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BleParams {
    /// Along-fiber shear modulus.
    pub g1: f64,
    /// Cross-fiber shear modulus.
    pub g2: f64,
    pub p1: f64,
    pub p2: f64,
    /// Bulk modulus.
    pub kappa: f64,
    /// Maximal isometric fiber stress.
    pub sigma_max: f64,
    pub lambda_opt: f64,
    pub lambda_star: f64,
    /// Activation amplitude.
    pub alpha_a: f64,
    /// Frequency of the tanh time function.
    pub c: f64,
    /// Activation start (s).
    pub t0: f64,
    /// Neo-Hookean shear modulus.
    pub mu: f64,
}

/// Fiber stress split into its active and passive parts (kPa).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberStress {
    pub active: f64,
    pub passive: f64,
    pub total: f64,
}

impl BleParams {
    pub const NAMES: &'static [&'static str] = &[
        "g1", "g2", "p1", "p2", "kappa", "sigma_max", "lambda_opt", "lambda_star", "alpha_a", "c",
        "t0", "mu",
    ];

    pub fn published() -> Self {
        BleParams {
            g1: 0.1,
            g2: 0.05,
            p1: 3.6055,
            p2: 4.4883,
            kappa: 10_000.0,
            sigma_max: 1.145,
            lambda_opt: 1.2264,
            lambda_star: 1.4,
            alpha_a: 69.5471,
            c: 34.4017,
            t0: 0.0,
            mu: 10.0,
        }
    }

    pub fn passive_curve(&self) -> PassiveCurve {
        PassiveCurve {
            p1: self.p1,
            p2: self.p2,
            lambda_star: self.lambda_star,
        }
    }

    /// Activation factor multiplying `alpha_a`.
    pub fn level(&self, input: &ActivationInput) -> f64 {
        input.level(|t| f_t_tanh(t, self.c, self.t0))
    }

    /// Fiber stress at isochoric fiber stretch `lambda_bar` for activation
    /// factor `level` (1 when tetanic).
    pub fn fiber_stress(&self, lambda_bar: f64, level: f64) -> FiberStress {
        let active = if level == 0.0 {
            0.0
        } else {
            self.sigma_max * (lambda_bar / self.lambda_opt) * self.alpha_a * level
                * f_active(lambda_bar, self.lambda_opt)
        };
        let passive = self.sigma_max * lambda_bar * self.passive_curve().value(lambda_bar);
        FiberStress {
            active,
            passive,
            total: active + passive,
        }
    }

    /// `∫_1^{lambda_bar} σ_tot(s)/s ds`.
    pub fn fiber_energy(&self, lambda_bar: f64, level: f64) -> f64 {
        let passive = self.passive_curve().integral(lambda_bar);
        let active = if level == 0.0 {
            0.0
        } else {
            self.alpha_a
                * level
                * (f_active_antiderivative(lambda_bar / self.lambda_opt)
                    - f_active_antiderivative(1.0 / self.lambda_opt))
        };
        self.sigma_max * (passive + active)
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [
            self.g1, self.g2, self.p1, self.p2, self.kappa, self.sigma_max, self.lambda_opt,
            self.lambda_star, self.alpha_a, self.c, self.t0, self.mu,
        ];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("non-finite BLE parameter"));
        }
        let positive = [
            ("g1", self.g1),
            ("g2", self.g2),
            ("p1", self.p1),
            ("p2", self.p2),
            ("kappa", self.kappa),
            ("sigma_max", self.sigma_max),
            ("lambda_opt", self.lambda_opt),
            ("c", self.c),
        ];
        for (name, v) in positive {
            if v <= 0.0 {
                return Err(Error::input(alloc::format!("{name} must be positive")));
            }
        }
        if self.mu < 0.0 || self.alpha_a < 0.0 {
            return Err(Error::input("mu and alpha_a must be non-negative"));
        }
        if self.lambda_star <= 1.0 {
            return Err(Error::input("lambda_star must exceed 1"));
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        let mut copy = *self;
        copy.get_mut(name).map(|v| *v)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "g1" => &mut self.g1,
            "g2" => &mut self.g2,
            "p1" => &mut self.p1,
            "p2" => &mut self.p2,
            "kappa" => &mut self.kappa,
            "sigma_max" => &mut self.sigma_max,
            "lambda_opt" => &mut self.lambda_opt,
            "lambda_star" => &mut self.lambda_star,
            "alpha_a" => &mut self.alpha_a,
            "c" => &mut self.c,
            "t0" => &mut self.t0,
            "mu" => &mut self.mu,
            _ => return None,
        })
    }
}

pub(crate) fn second_pk(p: &BleParams, s: &DeformationState, level: f64) -> Result<Mat3> {
    let (i1, i4, i5) = modified_invariants(s);
    let shear = strain_invariants(i1, i4, i5)?;
    let a1 = (i1 * i4 - i5) / (2.0 * i4);
    let a2 = acosh_ratio(shear.theta) / num::sqrt(i4);
    let fiber = p.fiber_stress(num::sqrt(i4), level);

    let g_iso = 2.0 * p.g2 * a2 * i4 + p.mu;
    let g_fiber = fiber.active / i4 - 4.0 * p.g1 * i5 / (i4 * i4 * i4)
        + 2.0 * p.g2 * a2 * (i1 - a1)
        + fiber.passive / i4;
    let g_mixed = 2.0 * p.g1 / (i4 * i4) - 2.0 * p.g2 * a2;

    let m = &s.structural;
    let fict = Mat3::identity() * g_iso
        + *m * g_fiber
        + (*m * s.c_bar + s.c_bar * *m) * g_mixed;
    let iso = (fict - s.c_inv * (fict.ddot(&s.c) / 3.0)) * num::powf(s.j, -2.0 / 3.0);
    let vol = s.c_inv * (p.kappa * num::ln(s.j));
    Ok((iso + vol).sym())
}

pub(crate) fn energy(p: &BleParams, s: &DeformationState, level: f64) -> Result<f64> {
    let (i1, i4, i5) = modified_invariants(s);
    let shear = strain_invariants(i1, i4, i5)?;
    let ln_j = num::ln(s.j);
    Ok(p.g1 * shear.b1 * shear.b1
        + p.g2 * shear.b2 * shear.b2
        + p.fiber_energy(num::sqrt(i4), level)
        + 0.5 * p.mu * (i1 - 3.0)
        + 0.5 * p.kappa * ln_j * ln_j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Vec3;

    fn state(f: Mat3) -> DeformationState {
        DeformationState::new(f, Vec3::e(2)).unwrap()
    }

    #[test]
    fn passive_fiber_stress_at_1_2() {
        let p = BleParams::published();
        let fs = p.fiber_stress(1.2, 0.0);
        assert_eq!(fs.active, 0.0);
        let expected = 1.145 * 1.2 * 3.6055 * ((4.4883_f64 * 0.2).exp() - 1.0);
        assert!((fs.passive - expected).abs() < 1e-12);
        assert!((fs.passive - 7.203).abs() < 2e-3);
        assert_eq!(p.fiber_stress(1.0, 0.0).total, 0.0);
    }

    #[test]
    fn tetanic_fiber_stress_at_optimum() {
        let p = BleParams::published();
        let fs = p.fiber_stress(p.lambda_opt, 1.0);
        assert!((fs.active - p.sigma_max * p.alpha_a).abs() < 1e-12);
    }

    #[test]
    fn identity_is_stress_free() {
        let p = BleParams::published();
        let s = second_pk(&p, &state(Mat3::identity()), 0.0).unwrap();
        assert!(s.max_abs() < 1e-12);
    }

    #[test]
    fn rotation_is_stress_free() {
        let (c, s) = (0.3_f64.cos(), 0.3_f64.sin());
        let q = Mat3::from_rows([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]);
        let p = BleParams::published();
        assert!(second_pk(&p, &state(q), 0.0).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn contracted_fiber_without_matrix_is_stress_free() {
        // no shear, isochoric fiber stretch below 1, no Neo-Hookean part
        let mut p = BleParams::published();
        p.mu = 0.0;
        let l: f64 = 0.9;
        let f = Mat3::diag(1.0 / l.sqrt(), 1.0 / l.sqrt(), l);
        assert!(second_pk(&p, &state(f), 0.0).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn energy_vanishes_at_identity() {
        let p = BleParams::published();
        assert!(energy(&p, &state(Mat3::identity()), 1.0).unwrap().abs() < 1e-12);
    }
}
