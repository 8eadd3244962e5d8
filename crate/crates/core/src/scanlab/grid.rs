use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Logarithmic,
}

/// One scan axis: `points` values from `min` to `max` inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    axis: String,
    min: f64,
    max: f64,
    points: usize,
    spacing: Spacing,
}

impl GridSpec {
    pub fn new(
        axis: impl Into<String>,
        min: f64,
        max: f64,
        points: usize,
        spacing: Spacing,
    ) -> Result<Self> {
        let axis = axis.into();
        let invalid = |reason| {
            Err(Error::InvalidGrid {
                axis: axis.clone(),
                reason,
            })
        };
        if !(min.is_finite() && max.is_finite()) {
            return invalid("bounds must be finite");
        }
        if min >= max {
            return invalid("min must be below max");
        }
        if points < 2 {
            return invalid("at least 2 points are required");
        }
        if spacing == Spacing::Logarithmic && min <= 0.0 {
            return invalid("logarithmic spacing needs min > 0");
        }
        Ok(Self {
            axis,
            min,
            max,
            points,
            spacing,
        })
    }

    pub fn axis(&self) -> &str {
        &self.axis
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    /// Grid values; the end points are exactly `min` and `max`.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == self.points - 1 {
                    return self.max;
                }
                let frac = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.min + frac * (self.max - self.min),
                    Spacing::Logarithmic => {
                        (self.min.ln() + frac * (self.max / self.min).ln()).exp()
                    }
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_and_log_values() {
        let lin = GridSpec::new("x", 0.0, 1.0, 5, Spacing::Linear).unwrap();
        assert_eq!(lin.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let log = GridSpec::new("x", 1e-4, 1e-1, 4, Spacing::Logarithmic)
            .unwrap()
            .values();
        for (v, e) in log.iter().zip([1e-4, 1e-3, 1e-2, 1e-1]) {
            assert!((v / e - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(GridSpec::new("x", 1.0, 1.0, 5, Spacing::Linear).is_err());
        assert!(GridSpec::new("x", 0.0, 1.0, 1, Spacing::Linear).is_err());
        assert!(GridSpec::new("x", 0.0, 1.0, 5, Spacing::Logarithmic).is_err());
        assert!(GridSpec::new("x", f64::NAN, 1.0, 5, Spacing::Linear).is_err());
    }
}
