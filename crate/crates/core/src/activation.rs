//! Force-stretch and time-activation functions shared by the models.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::num;

const SQRT_E: f64 = 1.648_721_270_700_128_1;

/// How the muscle is stimulated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stimulus {
    /// No activation.
    Passive,
    /// Fully fused activation; the time function equals 1.
    Tetanic,
    /// Activation following the model's time function at time `t` (s).
    Time(f64),
}

/// Stimulus together with an amplitude factor that scales the peak active
/// stress (1 for full activation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActivationInput {
    pub stimulus: Stimulus,
    pub scale: f64,
}

impl ActivationInput {
    pub const fn passive() -> Self {
        ActivationInput {
            stimulus: Stimulus::Passive,
            scale: 1.0,
        }
    }

    pub const fn tetanic() -> Self {
        ActivationInput {
            stimulus: Stimulus::Tetanic,
            scale: 1.0,
        }
    }

    pub const fn at_time(t: f64) -> Self {
        ActivationInput {
            stimulus: Stimulus::Time(t),
            scale: 1.0,
        }
    }

    pub const fn scaled(self, scale: f64) -> Self {
        ActivationInput {
            stimulus: self.stimulus,
            scale,
        }
    }

    /// Product of the amplitude factor and the time function.
    pub fn level(&self, time_fn: impl Fn(f64) -> f64) -> f64 {
        match self.stimulus {
            Stimulus::Passive => 0.0,
            Stimulus::Tetanic => self.scale,
            Stimulus::Time(t) => self.scale * time_fn(t),
        }
    }

    pub fn is_passive(&self) -> bool {
        matches!(self.stimulus, Stimulus::Passive) || self.scale == 0.0
    }
}

/// Skewed bell-shaped force-stretch relation, zero up to `lambda_min` and
/// peaking at 1 for `lambda_opt`.
pub fn f_xi(lambda: f64, lambda_opt: f64, lambda_min: f64) -> f64 {
    if lambda <= lambda_min {
        return 0.0;
    }
    let d = lambda_opt - lambda_min;
    let u = (lambda - lambda_min) / d;
    u * SQRT_E * num::exp(-0.5 * u * u)
}

/// `∫_{lambda_min}^{lambda} f_xi(s) ds`, in closed form.
pub fn integral_f_xi(lambda: f64, lambda_opt: f64, lambda_min: f64) -> f64 {
    if lambda <= lambda_min {
        return 0.0;
    }
    let d = lambda_opt - lambda_min;
    let u = (lambda - lambda_min) / d;
    // 1 - exp(-u²/2) without cancellation for small u
    -d * SQRT_E * libm::expm1(-0.5 * u * u)
}

/// Piecewise parabolic active force-stretch relation, symmetric about
/// `lambda_opt`.
pub fn f_active(lambda_bar: f64, lambda_opt: f64) -> f64 {
    let x = lambda_bar / lambda_opt;
    if x <= 0.6 {
        9.0 * (x - 0.4) * (x - 0.4)
    } else if x < 1.4 {
        1.0 - 4.0 * (1.0 - x) * (1.0 - x)
    } else {
        9.0 * (x - 1.6) * (x - 1.6)
    }
}

/// Continuous antiderivative of `f_active` in the normalized stretch
/// `x = lambda_bar / lambda_opt`.
pub(crate) fn f_active_antiderivative(x: f64) -> f64 {
    if x <= 0.6 {
        3.0 * (x - 0.4) * (x - 0.4) * (x - 0.4) + 0.6 + 4.0 / 3.0 * 0.064 - 0.024
    } else if x < 1.4 {
        x + 4.0 / 3.0 * (1.0 - x) * (1.0 - x) * (1.0 - x)
    } else {
        3.0 * (x - 1.6) * (x - 1.6) * (x - 1.6) + 1.4 - 4.0 / 3.0 * 0.064 + 0.024
    }
}

/// Exponential-then-linear passive fiber relation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassiveCurve {
    pub p1: f64,
    pub p2: f64,
    pub lambda_star: f64,
}

impl PassiveCurve {
    /// Slope and intercept of the linear branch.
    pub fn linear_coefficients(&self) -> (f64, f64) {
        let e = num::exp(self.p2 * (self.lambda_star - 1.0));
        let p3 = self.p1 * self.p2 * e;
        let p4 = self.p1 * (e - 1.0) - self.lambda_star * p3;
        (p3, p4)
    }

    pub fn value(&self, lambda_bar: f64) -> f64 {
        if lambda_bar <= 1.0 {
            0.0
        } else if lambda_bar < self.lambda_star {
            self.p1 * libm::expm1(self.p2 * (lambda_bar - 1.0))
        } else {
            let (p3, p4) = self.linear_coefficients();
            p3 * lambda_bar + p4
        }
    }

    /// `∫_1^{lambda_bar} value(s) ds` (zero below 1).
    pub fn integral(&self, lambda_bar: f64) -> f64 {
        let exp_part = |l: f64| {
            self.p1 * (libm::expm1(self.p2 * (l - 1.0)) / self.p2 - (l - 1.0))
        };
        if lambda_bar <= 1.0 {
            0.0
        } else if lambda_bar < self.lambda_star {
            exp_part(lambda_bar)
        } else {
            let (p3, p4) = self.linear_coefficients();
            let ls = self.lambda_star;
            exp_part(ls)
                + 0.5 * p3 * (lambda_bar * lambda_bar - ls * ls)
                + p4 * (lambda_bar - ls)
        }
    }
}

/// Hyperbolic-tangent time function, exactly 0 before `t0`.
pub fn f_t_tanh(t: f64, c: f64, t0: f64) -> f64 {
    if t < t0 {
        0.0
    } else {
        num::tanh(c * (t - t0))
    }
}

/// One motor-unit type of a twitch train.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwitchUnit {
    /// Peak twitch force (mN).
    pub force: f64,
    /// Contraction time (s).
    pub contraction_time: f64,
    /// Interstimulus interval (s).
    pub interval: f64,
    /// Fraction of this unit type.
    pub fraction: f64,
}

impl TwitchUnit {
    fn ratio(&self) -> f64 {
        self.contraction_time / self.interval
    }

    /// Rate-dependent gain so that trains of different stimulation rates
    /// saturate smoothly.
    fn gain(&self) -> f64 {
        let r = self.ratio();
        -libm::expm1(-2.0 * r * r * r) / r
    }

    /// Mean force of the fused train (mN).
    pub fn plateau(&self) -> f64 {
        let r = self.ratio();
        core::f64::consts::E * self.force * -libm::expm1(-2.0 * r * r * r)
    }

    /// Force of the stimulus train started at time 0 (mN).
    pub fn force_at(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        // kernel terms beyond this many contraction times are below 1e-19
        const CUTOFF: f64 = 50.0;
        let last = num::floor(t / self.interval);
        let first = num::ceil((t - CUTOFF * self.contraction_time) / self.interval).max(0.0);
        let mut sum = 0.0;
        let mut j = first;
        while j <= last {
            let x = (t - j * self.interval) / self.contraction_time;
            sum += twitch_kernel(x);
            j += 1.0;
        }
        self.force * self.gain() * sum
    }
}

/// Normalized single twitch `x·e^{1-x}`, peaking at 1 for `x = 1`.
pub fn twitch_kernel(x: f64) -> f64 {
    if x < 0.0 {
        0.0
    } else {
        x * num::exp(1.0 - x)
    }
}

/// Superposition of twitch trains of several motor-unit types.
#[derive(Debug, Clone, PartialEq)]
pub struct TwitchTrain {
    /// Activated motor units per area (1/mm²).
    pub n_a: f64,
    pub units: Vec<TwitchUnit>,
    /// Stimulation start (s).
    pub t0: f64,
}

impl TwitchTrain {
    pub fn validate(&self) -> Result<()> {
        if self.units.is_empty() {
            return Err(Error::input("twitch train needs at least one unit type"));
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.n_a) {
            return Err(Error::input("N_a must be positive"));
        }
        for u in &self.units {
            if !(positive(u.force)
                && positive(u.contraction_time)
                && positive(u.interval)
                && positive(u.fraction))
            {
                return Err(Error::input("twitch parameters must be positive"));
            }
        }
        let total: f64 = self.units.iter().map(|u| u.fraction).sum();
        if num::abs(total - 1.0) > 1e-12 {
            return Err(Error::input("unit fractions must sum to 1"));
        }
        Ok(())
    }

    fn weighted_plateau(&self) -> f64 {
        self.units.iter().map(|u| u.fraction * u.plateau()).sum()
    }

    /// Peak active nominal stress of the fused train (kPa).
    pub fn p_opt(&self) -> f64 {
        self.n_a * self.weighted_plateau()
    }

    /// Time function normalized to a unit plateau.
    pub fn f_t(&self, t: f64) -> f64 {
        let s = t - self.t0;
        if s < 0.0 {
            return 0.0;
        }
        let raw: f64 = self.units.iter().map(|u| u.fraction * u.force_at(s)).sum();
        raw / self.weighted_plateau()
    }
}

/// Source of the active nominal stress for the WKM/GIANT/COMBI family.
#[derive(Debug, Clone, PartialEq)]
pub enum ActiveDrive {
    /// Peak stress `p_opt` (kPa) with a tanh time function.
    Tanh { p_opt: f64, c: f64, t0: f64 },
    /// Twitch superposition; the peak stress follows from the train.
    Twitch(TwitchTrain),
}

impl ActiveDrive {
    pub fn p_opt(&self) -> f64 {
        match self {
            ActiveDrive::Tanh { p_opt, .. } => *p_opt,
            ActiveDrive::Twitch(train) => train.p_opt(),
        }
    }

    pub fn f_t(&self, t: f64) -> f64 {
        match self {
            ActiveDrive::Tanh { c, t0, .. } => f_t_tanh(t, *c, *t0),
            ActiveDrive::Twitch(train) => train.f_t(t),
        }
    }

    /// Active nominal stress at optimal stretch for the given input (kPa).
    pub fn drive(&self, input: &ActivationInput) -> f64 {
        self.p_opt() * input.level(|t| self.f_t(t))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ActiveDrive::Tanh { p_opt, c, t0 } => {
                if !(p_opt.is_finite() && *p_opt >= 0.0) {
                    return Err(Error::input("P_opt must be non-negative"));
                }
                if !(c.is_finite() && *c > 0.0) || !t0.is_finite() {
                    return Err(Error::input("invalid tanh time function"));
                }
                Ok(())
            }
            ActiveDrive::Twitch(train) => train.validate(),
        }
    }
}
