//! Uniform axes for scans and spectra.

use crate::error::{Error, Result};

/// A closed, uniformly sampled axis `[start, stop]` with `count` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::invalid("count", "axis must have at least one point"));
        }
        if !start.is_finite() || !stop.is_finite() {
            return Err(Error::invalid("start/stop", "axis bounds must be finite"));
        }
        if count == 1 && start != stop {
            return Err(Error::invalid("count", "a single-point axis needs start == stop"));
        }
        Ok(Axis { start, stop, count })
    }

    pub fn point(start: f64) -> Self {
        Axis { start, stop: start, count: 1 }
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.count)
    }

    pub fn step(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.stop - self.start) / (self.count - 1) as f64
        }
    }
}

/// `count` evenly spaced samples from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            (0..count)
                .map(|i| if i + 1 == count { stop } else { start + step * i as f64 })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_endpoints() {
        let v = linspace(-1.0, 1.0, 5);
        assert_eq!(v, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(linspace(3.0, 4.0, 1), vec![3.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }

    #[test]
    fn empty_axis_rejected() {
        assert!(Axis::new(0.0, 1.0, 0).is_err());
        assert!(Axis::new(0.0, f64::NAN, 3).is_err());
    }
}
