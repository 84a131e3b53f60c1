use std::str::FromStr;

use crate::error::{Result, ToolError};

/// Evenly spaced sweep `start:stop:step`, inclusive of `stop` when it lies
/// on the grid within 1e-12.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

const MAX_POINTS: usize = 1_000_000;

impl Grid {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
            return Err(ToolError::invalid("grid bounds must be finite"));
        }
        if step <= 0.0 {
            return Err(ToolError::invalid("grid step must be positive"));
        }
        if stop < start {
            return Err(ToolError::invalid("grid stop lies below its start"));
        }
        if (stop - start) / step > MAX_POINTS as f64 {
            return Err(ToolError::invalid("grid has too many points"));
        }
        Ok(Grid { start, stop, step })
    }

    pub fn values(&self) -> Vec<f64> {
        let span = (self.stop - self.start) / self.step;
        let mut n = span.floor() as usize;
        if span - n as f64 > 1.0 - 1e-12 * span.max(1.0) {
            n += 1;
        }
        (0..=n)
            .map(|k| {
                let v = self.start + k as f64 * self.step;
                // strip the representation error of the accumulation
                let r = (v * 1e12).round() / 1e12;
                if (r - self.stop).abs() <= 1e-12 { self.stop } else { r }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = ToolError;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(ToolError::invalid(format!("grid '{s}' is not of the form start:stop:step")));
        }
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| ToolError::invalid(format!("grid '{s}': '{p}' is not a number")))
        };
        Grid::new(num(parts[0])?, num(parts[1])?, num(parts[2])?)
    }
}
