//! The six homogeneous experiments and their incompressible responses.

use core::fmt;
use core::str::FromStr;

use crate::activation::ActivationInput;
use crate::error::{Error, Result};
use crate::kinematics::{acosh, DeformationState};
use crate::materials::{uniaxial_invariants, BleParams, EhretParams, Material};
use crate::num;
use crate::tensor::{Mat3, Vec3};

/// Canonical load case. The fiber direction is always `e₃`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LoadCase {
    /// Uniaxial tension/compression along the fiber.
    Utcaf,
    /// Uniaxial tension/compression transverse to the fiber.
    Utctf,
    /// Simple shear along the fiber.
    Saf,
    /// Pure shear along the fiber.
    Psaf,
    /// Pure shear transverse to the fiber.
    Pstf,
    /// Pure shear transverse to the fiber, fiber length fixed.
    Pstif,
}

/// Whether the muscle is activated (tetanic) or passive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MuscleState {
    Active,
    Passive,
}

impl MuscleState {
    pub fn name(self) -> &'static str {
        match self {
            MuscleState::Active => "active",
            MuscleState::Passive => "passive",
        }
    }

    /// Activation used when fitting and sweeping: tetanic or none.
    pub fn input(self) -> ActivationInput {
        match self {
            MuscleState::Active => ActivationInput::tetanic(),
            MuscleState::Passive => ActivationInput::passive(),
        }
    }
}

impl FromStr for MuscleState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "active" => Ok(MuscleState::Active),
            "passive" => Ok(MuscleState::Passive),
            _ => Err(Error::input(alloc::format!("unknown muscle state '{s}'"))),
        }
    }
}

impl fmt::Display for MuscleState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl LoadCase {
    pub const ALL: [LoadCase; 6] = [
        LoadCase::Utcaf,
        LoadCase::Utctf,
        LoadCase::Saf,
        LoadCase::Psaf,
        LoadCase::Pstf,
        LoadCase::Pstif,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LoadCase::Utcaf => "UTCAF",
            LoadCase::Utctf => "UTCTF",
            LoadCase::Saf => "SAF",
            LoadCase::Psaf => "PSAF",
            LoadCase::Pstf => "PSTF",
            LoadCase::Pstif => "PSTIF",
        }
    }

    /// True for the shear-controlled case.
    pub fn is_shear(self) -> bool {
        self == LoadCase::Saf
    }

    /// `(row, col)` of the measured first Piola-Kirchhoff component.
    pub fn measured(self) -> (usize, usize) {
        match self {
            LoadCase::Utcaf | LoadCase::Psaf => (2, 2),
            LoadCase::Utctf | LoadCase::Pstf | LoadCase::Pstif => (0, 0),
            LoadCase::Saf => (2, 1),
        }
    }

    /// Traction-free normal direction that carries the pressure, if any.
    pub fn free_direction(self) -> Option<usize> {
        match self {
            LoadCase::Utcaf | LoadCase::Psaf => Some(0),
            LoadCase::Utctf | LoadCase::Pstif => Some(1),
            LoadCase::Pstf => Some(2),
            LoadCase::Saf => None,
        }
    }

    /// Isochoric deformation gradient for stretch (or shear) `value`.
    pub fn deformation_gradient(self, value: f64) -> Result<Mat3> {
        if !self.is_shear() && !(value > 0.0) {
            return Err(Error::input("stretch must be positive"));
        }
        if !value.is_finite() {
            return Err(Error::input("non-finite load value"));
        }
        let l = value;
        Ok(match self {
            LoadCase::Utcaf => {
                let t = 1.0 / num::sqrt(l);
                Mat3::diag(t, t, l)
            }
            LoadCase::Utctf => {
                let t = 1.0 / num::sqrt(l);
                Mat3::diag(l, t, t)
            }
            LoadCase::Saf => {
                let mut f = Mat3::identity();
                f[(2, 1)] = value;
                f
            }
            LoadCase::Psaf => Mat3::diag(1.0 / l, 1.0, l),
            LoadCase::Pstf => Mat3::diag(l, 1.0, 1.0 / l),
            LoadCase::Pstif => Mat3::diag(l, 1.0 / l, 1.0),
        })
    }
}

impl fmt::Display for LoadCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LoadCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LoadCase::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::input(alloc::format!("unknown load case '{s}'")))
    }
}

/// A load case in a given muscle state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LoadCaseSpec {
    pub case: LoadCase,
    pub state: MuscleState,
}

impl LoadCaseSpec {
    pub fn new(case: LoadCase, state: MuscleState) -> Result<Self> {
        if state == MuscleState::Active && case != LoadCase::Utcaf {
            return Err(Error::input(alloc::format!(
                "active data is only defined for UTCAF, not {case}"
            )));
        }
        Ok(LoadCaseSpec { case, state })
    }

    pub fn passive(case: LoadCase) -> Self {
        LoadCaseSpec {
            case,
            state: MuscleState::Passive,
        }
    }

    /// Closed-form incompressible response (kPa) with tetanic activation
    /// for the active state.
    pub fn response(&self, material: &Material, value: f64) -> Result<f64> {
        analytical_first_pk(self.case, material, value, &self.state.input())
    }
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Closed-form nominal stress (kPa) of the fully incompressible material
/// in the given load case. Activation is only accepted for UTCAF.
pub fn analytical_first_pk(
    case: LoadCase,
    material: &Material,
    value: f64,
    input: &ActivationInput,
) -> Result<f64> {
    case.deformation_gradient(value)?;
    if case != LoadCase::Utcaf && !input.is_passive() {
        return Err(Error::input(alloc::format!(
            "no active response is defined for {case}"
        )));
    }
    match material {
        Material::Ble(p) => Ok(ble_response(case, p, value, p.level(input))),
        Material::Wkm(p) | Material::Giant(p) | Material::Combi(p) => {
            if case == LoadCase::Utcaf && !input.is_passive() {
                active_utcaf(material, p, value, input)
            } else {
                Ok(ehret_passive_response(case, p, value))
            }
        }
    }
}

fn ble_response(case: LoadCase, p: &BleParams, l: f64, level: f64) -> f64 {
    let fiber = |s: f64| p.fiber_stress(s, level).total;
    let mu = p.mu;
    match case {
        LoadCase::Utcaf => fiber(l) / l + mu * (l - 1.0 / (l * l)),
        // the transverse directions share the load through the B₂ invariant
        LoadCase::Utctf => 6.0 * p.g2 * num::ln(l) / l + mu * l * (1.0 - 1.0 / (l * l * l)),
        LoadCase::Saf => 2.0 * l * p.g1 + l * mu,
        LoadCase::Psaf => {
            2.0 * p.g2 * num::ln(l) / l + fiber(l) / l + mu * l * (1.0 - 1.0 / (l * l * l * l))
        }
        LoadCase::Pstf => {
            2.0 * p.g2 * acosh(0.5 * (1.0 / l + l)) / l * sgn(l * l - 1.0) - fiber(1.0 / l) / l
                + mu * l * (1.0 - 1.0 / (l * l * l * l))
        }
        LoadCase::Pstif => {
            4.0 * p.g2 * acosh(0.5 * (1.0 / (l * l) + l * l)) / l * sgn(l * l * l * l - 1.0)
                + mu * l * (1.0 - 1.0 / (l * l * l * l))
        }
    }
}

fn ehret_passive_response(case: LoadCase, p: &EhretParams, l: f64) -> f64 {
    let w = p.omega0;
    let g6 = p.gamma / 6.0;
    let ea = |i: f64| num::exp(p.alpha * (i - 1.0));
    let eb = |j: f64| num::exp(p.beta * (j - 1.0));
    match case {
        LoadCase::Utcaf => p.uniaxial_passive_stress(l),
        LoadCase::Utctf => {
            let i = (w / 3.0 * (l * l * l - 1.0) + 1.0) / l;
            let j = l * (w / 3.0 * (1.0 / (l * l * l) - 1.0) + 1.0);
            g6 * w * (1.0 - 1.0 / (l * l * l)) * (l * ea(i) + eb(j))
        }
        LoadCase::Saf => {
            let nu = l;
            let i = w / 3.0 * nu * nu + 1.0;
            let j = (1.0 - 2.0 / 3.0 * w) * nu * nu + 1.0;
            g6 * nu * (w * ea(i) - (2.0 * w - 3.0) * eb(j))
        }
        LoadCase::Psaf => {
            let l2 = l * l;
            let l4 = l2 * l2;
            let i = l2 * (w / 3.0 * (1.0 / l4 + 1.0 / l2 - 2.0) + 1.0);
            let j = (w / 3.0 * (l4 + l2 - 2.0) + 1.0) / l2;
            -g6 * l
                * ((w * (2.0 + 1.0 / l4) - 3.0) * ea(i) - (w * (1.0 + 2.0 / l4) - 3.0 / l4) * eb(j))
        }
        LoadCase::Pstf => {
            let l2 = l * l;
            let l4 = l2 * l2;
            let i = (w / 3.0 * (l4 + l2 - 2.0) + 1.0) / l2;
            let j = l2 * (w / 3.0 * (1.0 / l4 + 1.0 / l2 - 2.0) + 1.0);
            g6 * l * ((w * (1.0 + 2.0 / l4) - 3.0 / l4) * ea(i) - (w * (2.0 + 1.0 / l4) - 3.0) * eb(j))
        }
        LoadCase::Pstif => {
            let l2 = l * l;
            // C = diag(λ², λ⁻², 1) is its own cofactor, so Ĩ = J̃
            let i = w / 3.0 * (l2 + 1.0 / l2 - 2.0) + 1.0;
            g6 * l * w * (1.0 - 1.0 / (l2 * l2)) * (ea(i) + eb(i))
        }
    }
}

fn active_utcaf(material: &Material, p: &EhretParams, l: f64, input: &ActivationInput) -> Result<f64> {
    let act = material.activation(l, input)?;
    let omega = act.omega;
    let g4 = 0.25 * p.gamma;
    match material {
        Material::Giant(_) => {
            let eta = 1.0 - omega;
            let u = uniaxial_invariants(l / eta, p.omega0);
            let slope = p.uniaxial_potential_slope(&u);
            Ok(g4 * slope * (eta + act.d_omega.unwrap_or(0.0) * l) / (eta * eta))
        }
        _ => {
            let u = uniaxial_invariants(l, p.omega0);
            let i = u.i + omega * l * l;
            let ea = num::exp(p.alpha * (i - 1.0));
            let eb = num::exp(p.beta * (u.j - 1.0));
            let wkm = g4 * (ea * (u.di + 2.0 * omega * l) + eb * u.dj);
            match material {
                Material::Combi(_) => Ok(wkm + g4 * l * l * ea * act.d_omega.unwrap_or(0.0)),
                _ => Ok(wkm),
            }
        }
    }
}

/// Incompressible response from the three-dimensional stress: the pressure
/// is fixed by the traction-free direction of the case and the measured
/// component read off the first Piola-Kirchhoff stress.
pub fn incompressible_first_pk(
    case: LoadCase,
    material: &Material,
    value: f64,
    input: &ActivationInput,
) -> Result<f64> {
    let f = case.deformation_gradient(value)?;
    let state = DeformationState::new(f, Vec3::e(2))?;
    let p = material.first_pk(&state, input)?;
    let (row, col) = case.measured();
    match case.free_direction() {
        // the pressure term adds -p·F⁻ᵀ, which has no (3, 2) entry here
        None => Ok(p[(row, col)]),
        Some(free) => {
            let sigma = p * f.transpose();
            Ok((sigma[(row, row)] - sigma[(free, free)]) / f[(row, row)])
        }
    }
}

/// Fiber stretch at which the tetanically activated material is stress free
/// in uniaxial loading along the fiber.
pub fn stress_free_active_stretch(material: &Material) -> Result<f64> {
    let (lo_bound, input) = match material {
        Material::Ble(p) => (0.4 * p.lambda_opt, ActivationInput::tetanic()),
        Material::Wkm(p) | Material::Giant(p) | Material::Combi(p) => {
            (p.lambda_min.max(0.4 * p.lambda_opt), ActivationInput::tetanic())
        }
    };
    let f = |l: f64| analytical_first_pk(LoadCase::Utcaf, material, l, &input);
    let mut lo = lo_bound + 1e-3;
    let mut hi = 1.0;
    let f_hi = f(hi)?;
    if f_hi == 0.0 {
        return Ok(hi);
    }
    let f_lo = f(lo)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if sgn(f_lo) == sgn(f_hi) {
        return Err(Error::RootNotFound { lo, hi });
    }
    let lo_negative = f_lo < 0.0;
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        let v = f(mid)?;
        if v == 0.0 {
            return Ok(mid);
        }
        if (v < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::ModelKind;

    #[test]
    fn gradients_match_the_case_table() {
        let f = LoadCase::Utcaf.deformation_gradient(1.2).unwrap();
        let t = 1.2_f64.powf(-0.5);
        assert!((f - Mat3::diag(t, t, 1.2)).max_abs() < 1e-15);
        assert_eq!(LoadCase::Saf.deformation_gradient(0.0).unwrap(), Mat3::identity());
        let f = LoadCase::Pstif.deformation_gradient(1.1).unwrap();
        assert!((f - Mat3::diag(1.1, 1.0 / 1.1, 1.0)).max_abs() < 1e-15);
        for case in LoadCase::ALL {
            let f = case.deformation_gradient(1.17).unwrap();
            assert!((f.det() - 1.0).abs() < 1e-14, "{case}");
        }
    }

    #[test]
    fn names_round_trip() {
        for case in LoadCase::ALL {
            assert_eq!(case.name().parse::<LoadCase>().unwrap(), case);
        }
        assert!("XYZ".parse::<LoadCase>().is_err());
    }

    #[test]
    fn active_spec_only_for_utcaf() {
        assert!(LoadCaseSpec::new(LoadCase::Utcaf, MuscleState::Active).is_ok());
        assert!(LoadCaseSpec::new(LoadCase::Saf, MuscleState::Active).is_err());
        let m = Material::published(ModelKind::Wkm);
        let r = analytical_first_pk(LoadCase::Pstf, &m, 1.1, &ActivationInput::tetanic());
        assert!(matches!(r, Err(Error::Input(_))));
    }

    #[test]
    fn hand_evaluated_values() {
        let wkm = Material::published(ModelKind::Wkm);
        let p = |c, m: &Material, v| analytical_first_pk(c, m, v, &ActivationInput::passive()).unwrap();
        assert!(p(LoadCase::Utcaf, &wkm, 1.0).abs() < 1e-14);
        let ble = Material::published(ModelKind::Ble);
        let sig = 1.145 * 1.2 * 3.6055 * ((4.4883_f64 * 0.2).exp() - 1.0);
        let expected = sig / 1.2 + 10.0 * (1.2 - 1.0 / 1.44);
        assert!((p(LoadCase::Utcaf, &ble, 1.2) - expected).abs() < 1e-12);
        assert!((expected - 11.06).abs() < 0.01);
        assert!((p(LoadCase::Saf, &ble, 0.1) - 1.02).abs() < 1e-12);
    }

    #[test]
    fn transverse_cases_vanish_at_unit_stretch() {
        for kind in ModelKind::ALL {
            let m = Material::published(kind);
            for case in [LoadCase::Utctf, LoadCase::Pstif] {
                let v = analytical_first_pk(case, &m, 1.0, &ActivationInput::passive()).unwrap();
                assert!(v.abs() < 1e-13, "{kind} {case}: {v}");
            }
        }
    }
}
