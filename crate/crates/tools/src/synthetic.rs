//! Synthetic datasets from the closed-form responses, with optional
//! Gaussian noise on the stress.

use muscle_core::fitting::Dataset;
use muscle_core::{LoadCaseSpec, Material};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Result, ToolError};

/// Standard deviation of the additive stress noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Noise {
    None,
    /// Absolute standard deviation (kPa).
    Absolute(f64),
    /// Fraction of the largest absolute stress of each dataset.
    RelativeToPeak(f64),
}

/// One dataset per spec, sampled at `values`. The same seed gives the same
/// numbers.
pub fn generate_synthetic(
    material: &Material,
    specs: &[LoadCaseSpec],
    values: &[f64],
    noise: Noise,
    seed: u64,
) -> Result<Vec<Dataset>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let source = format!("synthetic {} seed {seed}", material.kind());
    let mut out = Vec::with_capacity(specs.len());
    for spec in specs {
        let clean = values
            .iter()
            .map(|&v| spec.response(material, v))
            .collect::<muscle_core::Result<Vec<f64>>>()?;
        let sigma = match noise {
            Noise::None => 0.0,
            Noise::Absolute(s) => s,
            Noise::RelativeToPeak(f) => f * clean.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
        };
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(ToolError::invalid("noise level must be finite and non-negative"));
        }
        let points = if sigma == 0.0 {
            values.iter().copied().zip(clean).collect()
        } else {
            let normal = Normal::new(0.0, sigma).expect("valid standard deviation");
            values
                .iter()
                .zip(clean)
                .map(|(&v, y)| (v, y + normal.sample(&mut rng)))
                .collect()
        };
        out.push(Dataset::new(*spec, points, 1.0, source.clone())?);
    }
    Ok(out)
}
