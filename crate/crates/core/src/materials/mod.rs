//! The four constitutive models behind a single `Material` type.

mod ble;
mod combi;
mod ehret;
mod giant;
mod tangent;
mod wkm;

use core::fmt;
use core::str::FromStr;

pub use ble::{BleParams, FiberStress};
pub use ehret::{uniaxial_invariants, EhretParams, UniaxialInvariants};
pub use giant::{active_deformation_gradient, giant_residual};
pub use tangent::tangent_fd;

use crate::activation::ActivationInput;
use crate::error::{Error, Result};
use crate::kinematics::DeformationState;
use crate::tensor::{Mat3, Tensor4};

/// Model identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Ble,
    Wkm,
    Giant,
    Combi,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Ble, ModelKind::Wkm, ModelKind::Giant, ModelKind::Combi];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Ble => "ble",
            ModelKind::Wkm => "wkm",
            ModelKind::Giant => "giant",
            ModelKind::Combi => "combi",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::input(alloc::format!("unknown model '{s}'")))
    }
}

/// Activation level and the active stress behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActivationResult {
    /// Activation level `ω_a` (0 for the active-stress model).
    pub omega: f64,
    /// Active stress: nominal (kPa) for the active-strain family, active
    /// fiber stress for the active-stress model.
    pub p_act: f64,
    /// `∂ω_a/∂λ` where the model needs it.
    pub d_omega: Option<f64>,
    pub iterations: usize,
    pub residual: f64,
}

impl ActivationResult {
    pub(crate) fn inactive() -> Self {
        ActivationResult {
            omega: 0.0,
            p_act: 0.0,
            d_omega: Some(0.0),
            iterations: 0,
            residual: 0.0,
        }
    }
}

/// A constitutive model with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Material {
    Ble(BleParams),
    Wkm(EhretParams),
    Giant(EhretParams),
    Combi(EhretParams),
}

impl Material {
    /// Published parameter set of the given model.
    pub fn published(kind: ModelKind) -> Material {
        match kind {
            ModelKind::Ble => Material::Ble(BleParams::published()),
            ModelKind::Wkm => Material::Wkm(EhretParams::published_twitch()),
            ModelKind::Giant => Material::Giant(EhretParams::published_twitch()),
            ModelKind::Combi => Material::Combi(EhretParams::published_tanh()),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Material::Ble(_) => ModelKind::Ble,
            Material::Wkm(_) => ModelKind::Wkm,
            Material::Giant(_) => ModelKind::Giant,
            Material::Combi(_) => ModelKind::Combi,
        }
    }

    /// Builds a material of `kind` from a parameter record of the matching
    /// family.
    pub fn from_ehret(kind: ModelKind, params: EhretParams) -> Result<Material> {
        match kind {
            ModelKind::Wkm => Ok(Material::Wkm(params)),
            ModelKind::Giant => Ok(Material::Giant(params)),
            ModelKind::Combi => Ok(Material::Combi(params)),
            ModelKind::Ble => Err(Error::input("BLE needs its own parameter set")),
        }
    }

    pub fn ehret(&self) -> Option<&EhretParams> {
        match self {
            Material::Ble(_) => None,
            Material::Wkm(p) | Material::Giant(p) | Material::Combi(p) => Some(p),
        }
    }

    /// Bulk modulus (kPa) for BLE, dimensionless penalty otherwise.
    pub fn kappa(&self) -> f64 {
        match self {
            Material::Ble(p) => p.kappa,
            Material::Wkm(p) | Material::Giant(p) | Material::Combi(p) => p.kappa,
        }
    }

    pub fn with_kappa(&self, kappa: f64) -> Material {
        let mut m = self.clone();
        match &mut m {
            Material::Ble(p) => p.kappa = kappa,
            Material::Wkm(p) | Material::Giant(p) | Material::Combi(p) => p.kappa = kappa,
        }
        m
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Material::Ble(p) => p.validate(),
            Material::Wkm(p) | Material::Giant(p) | Material::Combi(p) => p.validate(),
        }
    }

    /// Names accepted by [`Material::get`] and [`Material::set`].
    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            Material::Ble(_) => BleParams::NAMES,
            Material::Wkm(p) | Material::Giant(p) | Material::Combi(p) => p.names(),
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        match self {
            Material::Ble(p) => p.get(name),
            Material::Wkm(p) | Material::Giant(p) | Material::Combi(p) => p.get(name),
        }
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = match self {
            Material::Ble(p) => p.get_mut(name),
            Material::Wkm(p) | Material::Giant(p) | Material::Combi(p) => p.get_mut(name),
        };
        match slot {
            Some(v) => {
                *v = value;
                Ok(())
            }
            None => Err(Error::input(alloc::format!(
                "model {} has no parameter '{name}'",
                self.kind()
            ))),
        }
    }

    /// Activation level at fiber stretch `lambda`.
    pub fn activation(&self, lambda: f64, input: &ActivationInput) -> Result<ActivationResult> {
        if !(lambda > 0.0) {
            return Err(Error::input("fiber stretch must be positive"));
        }
        match self {
            Material::Ble(p) => {
                let level = p.level(input);
                Ok(ActivationResult {
                    p_act: p.fiber_stress(lambda, level).active,
                    d_omega: None,
                    ..ActivationResult::inactive()
                })
            }
            Material::Wkm(p) => wkm::activation(p, lambda, input),
            Material::Giant(p) => giant::activation(p, lambda, input),
            Material::Combi(p) => combi::activation(p, lambda, input),
        }
    }

    /// Second Piola-Kirchhoff stress (kPa).
    pub fn second_pk(&self, state: &DeformationState, input: &ActivationInput) -> Result<Mat3> {
        match self {
            Material::Ble(p) => ble::second_pk(p, state, p.level(input)),
            Material::Wkm(p) => {
                let act = wkm::activation(p, state.lambda, input)?;
                Ok(ehret::second_pk(p, state, act.omega))
            }
            Material::Giant(p) => {
                let act = giant::activation(p, state.lambda, input)?;
                giant::second_pk(p, state, &act)
            }
            Material::Combi(p) => {
                let act = combi::activation(p, state.lambda, input)?;
                Ok(combi::second_pk(p, state, &act))
            }
        }
    }

    /// Strain energy density (kPa). For WKM the activation level enters as
    /// a frozen parameter, so `S` is the derivative at fixed `ω_a`; for the
    /// other models `S = 2 ∂Ψ/∂C` including the stretch dependence of the
    /// activation.
    pub fn energy(&self, state: &DeformationState, input: &ActivationInput) -> Result<f64> {
        match self {
            Material::Ble(p) => ble::energy(p, state, p.level(input)),
            Material::Wkm(p) | Material::Combi(p) => {
                let act = self.activation(state.lambda, input)?;
                Ok(ehret::energy(p, state, act.omega))
            }
            Material::Giant(p) => {
                let act = giant::activation(p, state.lambda, input)?;
                giant::energy(p, state, act.omega)
            }
        }
    }

    /// Second Piola-Kirchhoff stress of the active-strain family at a given
    /// activation level, without any dependence of the level on the
    /// deformation.
    pub fn second_pk_at_level(&self, state: &DeformationState, omega: f64) -> Result<Mat3> {
        match self {
            Material::Ble(_) => Err(Error::input("BLE has no activation level")),
            Material::Wkm(p) | Material::Combi(p) => Ok(ehret::second_pk(p, state, omega)),
            Material::Giant(p) => giant::second_pk(
                p,
                state,
                &ActivationResult {
                    omega,
                    d_omega: Some(0.0),
                    ..ActivationResult::inactive()
                },
            ),
        }
    }

    /// Energy at a given activation level (see [`Material::second_pk_at_level`]).
    pub fn energy_at_level(&self, state: &DeformationState, omega: f64) -> Result<f64> {
        match self {
            Material::Ble(_) => Err(Error::input("BLE has no activation level")),
            Material::Wkm(p) | Material::Combi(p) => Ok(ehret::energy(p, state, omega)),
            Material::Giant(p) => giant::energy(p, state, omega),
        }
    }

    /// First Piola-Kirchhoff stress `P = F S` (kPa).
    pub fn first_pk(&self, state: &DeformationState, input: &ActivationInput) -> Result<Mat3> {
        Ok(state.f * self.second_pk(state, input)?)
    }

    /// Cauchy stress `σ = J⁻¹ P Fᵀ` (kPa).
    pub fn cauchy(&self, state: &DeformationState, input: &ActivationInput) -> Result<Mat3> {
        let p = self.first_pk(state, input)?;
        Ok((p * state.f.transpose() * (1.0 / state.j)).sym())
    }

    /// Material tangent `2 ∂S/∂C` by central differences.
    pub fn tangent(&self, state: &DeformationState, input: &ActivationInput) -> Result<Tensor4> {
        tangent_fd(self, state, input)
    }
}
