//! Parameters and the generalized-invariant energy shared by WKM, GIANT and
//! COMBI.

use alloc::vec;

use crate::activation::{ActiveDrive, TwitchTrain, TwitchUnit};
use crate::error::{Error, Result};
use crate::kinematics::DeformationState;
use crate::num;
use crate::tensor::Mat3;

/// Parameters of the active-strain family. `gamma` in kPa, the rest
/// dimensionless.
#[derive(Debug, Clone, PartialEq)]
pub struct EhretParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Isotropic weighting; the fiber weighting is `1 - omega0`.
    pub omega0: f64,
    /// Incompressibility penalty exponent.
    pub kappa: f64,
    pub lambda_opt: f64,
    pub lambda_min: f64,
    pub drive: ActiveDrive,
}

const TANH_NAMES: &[&str] = &[
    "alpha", "beta", "gamma", "omega0", "kappa", "lambda_opt", "lambda_min", "p_opt", "c", "t0",
];
const TWITCH_NAMES: &[&str] = &[
    "alpha", "beta", "gamma", "omega0", "kappa", "lambda_opt", "lambda_min", "n_a", "t0",
];

impl EhretParams {
    fn published_passive(drive: ActiveDrive) -> Self {
        EhretParams {
            alpha: 2.3796,
            beta: 0.5161,
            gamma: 27.1072,
            omega0: 0.6388,
            kappa: 1000.0,
            lambda_opt: 1.1806,
            lambda_min: 0.5680,
            drive,
        }
    }

    /// Published set driven by the three-unit twitch train (WKM, GIANT).
    pub fn published_twitch() -> Self {
        let unit = |force, contraction_time, fraction| TwitchUnit {
            force,
            contraction_time,
            interval: 0.004,
            fraction,
        };
        Self::published_passive(ActiveDrive::Twitch(TwitchTrain {
            n_a: 0.4619,
            units: vec![unit(2.5, 0.02, 0.05), unit(4.4, 0.011, 0.29), unit(76.8, 0.011, 0.66)],
            t0: 0.0,
        }))
    }

    /// Published set with explicit peak stress and tanh time function (COMBI).
    pub fn published_tanh() -> Self {
        Self::published_passive(ActiveDrive::Tanh {
            p_opt: 64.6809,
            c: 34.4017,
            t0: 0.0,
        })
    }

    /// Weighting tensor `ω₀/3·I + (1-ω₀)·M`.
    pub fn weighting(&self, structural: &Mat3) -> Mat3 {
        Mat3::identity() * (self.omega0 / 3.0) + *structural * (1.0 - self.omega0)
    }

    /// Incompressible uniaxial fiber-direction nominal stress of the passive
    /// material (kPa).
    pub fn uniaxial_passive_stress(&self, lambda: f64) -> f64 {
        let u = uniaxial_invariants(lambda, self.omega0);
        0.25 * self.gamma
            * (num::exp(self.alpha * (u.i - 1.0)) * u.di + num::exp(self.beta * (u.j - 1.0)) * u.dj)
    }

    /// Uniaxial energy potential `e^{α(I-1)}/α + e^{β(J-1)}/β`.
    pub(crate) fn uniaxial_potential(&self, u: &UniaxialInvariants) -> f64 {
        num::exp(self.alpha * (u.i - 1.0)) / self.alpha + num::exp(self.beta * (u.j - 1.0)) / self.beta
    }

    pub(crate) fn uniaxial_potential_slope(&self, u: &UniaxialInvariants) -> f64 {
        num::exp(self.alpha * (u.i - 1.0)) * u.di + num::exp(self.beta * (u.j - 1.0)) * u.dj
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [
            self.alpha, self.beta, self.gamma, self.omega0, self.kappa, self.lambda_opt,
            self.lambda_min,
        ];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("non-finite model parameter"));
        }
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("kappa", self.kappa),
        ] {
            if v <= 0.0 {
                return Err(Error::input(alloc::format!("{name} must be positive")));
            }
        }
        if !(0.0..=1.0).contains(&self.omega0) {
            return Err(Error::input("omega0 must lie in [0, 1]"));
        }
        if !(self.lambda_min > 0.0 && self.lambda_min < self.lambda_opt) {
            return Err(Error::input("need 0 < lambda_min < lambda_opt"));
        }
        self.drive.validate()
    }

    pub fn names(&self) -> &'static [&'static str] {
        match self.drive {
            ActiveDrive::Tanh { .. } => TANH_NAMES,
            ActiveDrive::Twitch(_) => TWITCH_NAMES,
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        let mut copy = self.clone();
        copy.get_mut(name).map(|v| *v)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "alpha" => &mut self.alpha,
            "beta" => &mut self.beta,
            "gamma" => &mut self.gamma,
            "omega0" => &mut self.omega0,
            "kappa" => &mut self.kappa,
            "lambda_opt" => &mut self.lambda_opt,
            "lambda_min" => &mut self.lambda_min,
            _ => match (&mut self.drive, name) {
                (ActiveDrive::Tanh { p_opt, .. }, "p_opt") => p_opt,
                (ActiveDrive::Tanh { c, .. }, "c") => c,
                (ActiveDrive::Tanh { t0, .. }, "t0") => t0,
                (ActiveDrive::Twitch(train), "n_a") => &mut train.n_a,
                (ActiveDrive::Twitch(train), "t0") => &mut train.t0,
                _ => return None,
            },
        })
    }
}

/// Generalized invariants of an incompressible uniaxial stretch along the
/// fiber, with their stretch derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniaxialInvariants {
    pub i: f64,
    pub di: f64,
    pub j: f64,
    pub dj: f64,
}

pub fn uniaxial_invariants(lambda: f64, omega0: f64) -> UniaxialInvariants {
    let inv3 = 1.0 / (lambda * lambda * lambda);
    let l2 = lambda * lambda;
    UniaxialInvariants {
        i: l2 * (2.0 * omega0 / 3.0 * (inv3 - 1.0) + 1.0),
        di: 2.0 * lambda * (1.0 - omega0 / 3.0 * (inv3 + 2.0)),
        j: (2.0 * omega0 / 3.0 * (l2 * lambda - 1.0) + 1.0) / l2,
        dj: 2.0 * omega0 / 3.0 + (4.0 * omega0 / 3.0 - 2.0) * inv3,
    }
}

/// `Ĩ` and `J̃` of a state at activation level `omega`.
pub(crate) struct Generalized {
    pub i: f64,
    pub j: f64,
    pub weighting: Mat3,
}

pub(crate) fn generalized(p: &EhretParams, c: &Mat3, structural: &Mat3, omega: f64) -> Generalized {
    let weighting = p.weighting(structural);
    Generalized {
        i: c.ddot(&weighting) + omega * c.ddot(structural),
        j: c.cofactor().ddot(&weighting),
        weighting,
    }
}

/// Generalized-invariant second Piola-Kirchhoff stress at a fixed
/// activation level.
pub(crate) fn second_pk(p: &EhretParams, s: &DeformationState, omega: f64) -> Mat3 {
    let g = generalized(p, &s.c, &s.structural, omega);
    let ea = num::exp(p.alpha * (g.i - 1.0));
    let eb = num::exp(p.beta * (g.j - 1.0));
    let det_c = s.j * s.j;
    let vol = num::powf(det_c, -p.kappa);
    let sum = (g.weighting + s.structural * omega) * ea
        - s.c_inv * g.weighting * s.c_inv * (eb * det_c)
        + s.c_inv * (g.j * eb - vol);
    (sum * (0.5 * p.gamma)).sym()
}

pub(crate) fn energy(p: &EhretParams, s: &DeformationState, omega: f64) -> f64 {
    let g = generalized(p, &s.c, &s.structural, omega);
    let det_c = s.j * s.j;
    0.25 * p.gamma
        * (libm::expm1(p.alpha * (g.i - 1.0)) / p.alpha
            + libm::expm1(p.beta * (g.j - 1.0)) / p.beta
            + libm::expm1(-p.kappa * num::ln(det_c)) / p.kappa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Vec3;

    #[test]
    fn identity_is_stress_free() {
        let p = EhretParams::published_tanh();
        let s = DeformationState::new(Mat3::identity(), Vec3::e(2)).unwrap();
        assert!(second_pk(&p, &s, 0.0).max_abs() < 1e-13);
        assert!(energy(&p, &s, 0.0).abs() < 1e-15);
    }

    #[test]
    fn uniaxial_invariants_match_tensor_evaluation() {
        let p = EhretParams::published_tanh();
        for &l in &[0.7_f64, 1.0, 1.3] {
            let f = Mat3::diag(1.0 / l.sqrt(), 1.0 / l.sqrt(), l);
            let s = DeformationState::new(f, Vec3::e(2)).unwrap();
            let g = generalized(&p, &s.c, &s.structural, 0.0);
            let u = uniaxial_invariants(l, p.omega0);
            assert!((g.i - u.i).abs() < 1e-13);
            assert!((g.j - u.j).abs() < 1e-13);
            let h = 1e-6;
            let up = uniaxial_invariants(l + h, p.omega0);
            let um = uniaxial_invariants(l - h, p.omega0);
            assert!(((up.i - um.i) / (2.0 * h) - u.di).abs() < 1e-8);
            assert!(((up.j - um.j) / (2.0 * h) - u.dj).abs() < 1e-8);
        }
    }

    #[test]
    fn named_access_round_trips() {
        let mut p = EhretParams::published_tanh();
        *p.get_mut("p_opt").unwrap() = 10.0;
        assert_eq!(p.get("p_opt"), Some(10.0));
        assert_eq!(p.get("n_a"), None);
        assert_eq!(EhretParams::published_twitch().get("n_a"), Some(0.4619));
    }
}
