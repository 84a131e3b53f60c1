//! Principal branch of the Lambert W function.

use crate::error::{Error, Result};
use crate::num;

const INV_E: f64 = 0.367_879_441_171_442_33;

/// `W₀(x)` for `x ≥ -1/e`, the solution `w ≥ -1` of `w·e^w = x`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() || x == f64::INFINITY {
        return Err(Error::LambertDomain { x });
    }
    if x < -INV_E {
        if x > -INV_E - 1e-15 {
            return Ok(-1.0);
        }
        return Err(Error::LambertDomain { x });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let mut w = initial_guess(x);
    for _ in 0..50 {
        let ew = num::exp(w);
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        if !step.is_finite() {
            break;
        }
        w -= step;
        if num::abs(step) <= 1e-15 * (1.0 + num::abs(w)) {
            break;
        }
    }
    Ok(w.max(-1.0))
}

fn initial_guess(x: f64) -> f64 {
    if x < -0.32 {
        // series about the branch point
        let p = num::sqrt(2.0 * (core::f64::consts::E * x + 1.0));
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x < 3.0 {
        num::ln_1p(x)
    } else {
        let l1 = num::ln(x);
        let l2 = num::ln(l1);
        l1 - l2 + l2 / l1
    }
}
