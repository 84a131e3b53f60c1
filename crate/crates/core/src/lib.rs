//! Constitutive models for active skeletal muscle tissue.
//!
//! Four nearly incompressible, transversely isotropic hyperelastic models are
//! provided: an active-stress model with a Neo-Hookean matrix (`Ble`), a
//! generalized active-strain model (`Wkm`), an active-strain model with a
//! multiplicative split of the deformation gradient (`Giant`) and a combined
//! model with an explicit activation level and the consistent activation
//! stress term (`Combi`).
//!
//! Around the models the crate carries the canonical homogeneous load cases
//! with their incompressible closed-form responses, a single trilinear
//! hexahedron solved quasi-statically by Newton's method, and a
//! bound-constrained Levenberg-Marquardt fit of model parameters to
//! stress-stretch data.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

mod num;

pub mod activation;
pub mod element;
pub mod error;
pub mod fitting;
pub mod kinematics;
pub mod lambert;
pub mod linalg;
pub mod loadcases;
pub mod materials;
pub mod tensor;

pub use activation::{ActivationInput, Stimulus};
pub use error::{Error, Result};
pub use kinematics::DeformationState;
pub use loadcases::{LoadCase, LoadCaseSpec, MuscleState};
pub use materials::{Material, ModelKind};
pub use tensor::{Mat3, Tensor4, Vec3};
