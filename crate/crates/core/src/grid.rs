//! Time grids on which the "for all t" conditions are checked.

use thiserror::Error;

/// Default number of grid points.
pub const DEFAULT_POINTS: usize = 2048;
/// Default horizon.
pub const DEFAULT_T_END: f64 = 50.0;

/// Ratio between the last and the first step of the default geometric grid.
const STEP_GROWTH_SPAN: f64 = 1000.0;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("grid must start at t = 0, got {0}")]
    NonzeroStart(f64),
    #[error("grid times must be finite and strictly increasing, got {1} after {0}")]
    NotIncreasing(f64, f64),
    #[error("grid horizon must be positive and finite, got {0}")]
    BadHorizon(f64),
}

/// A finite, strictly increasing set of times starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    /// Wraps an explicit point set after validating it.
    pub fn from_points(points: Vec<f64>) -> Result<Self, GridError> {
        if points.len() < 2 {
            return Err(GridError::TooFewPoints(points.len()));
        }
        if points[0] != 0.0 {
            return Err(GridError::NonzeroStart(points[0]));
        }
        for pair in points.windows(2) {
            if !pair[1].is_finite() || !(pair[1] > pair[0]) {
                return Err(GridError::NotIncreasing(pair[0], pair[1]));
            }
        }
        Ok(Self { points })
    }

    /// Uniformly spaced grid on `[0, t_end]`.
    pub fn uniform(t_end: f64, n: usize) -> Result<Self, GridError> {
        if !(t_end > 0.0) || !t_end.is_finite() {
            return Err(GridError::BadHorizon(t_end));
        }
        if n < 2 {
            return Err(GridError::TooFewPoints(n));
        }
        let points = (0..n)
            .map(|i| t_end * i as f64 / (n - 1) as f64)
            .collect();
        Self::from_points(points)
    }

    /// Grid on `[0, t_end]` with steps growing geometrically, dense near 0
    /// where decay phenomena develop and sparse toward the horizon.
    pub fn geometric(t_end: f64, n: usize) -> Result<Self, GridError> {
        if !(t_end > 0.0) || !t_end.is_finite() {
            return Err(GridError::BadHorizon(t_end));
        }
        if n < 2 {
            return Err(GridError::TooFewPoints(n));
        }
        if n == 2 {
            return Self::from_points(vec![0.0, t_end]);
        }
        // step[i+1]/step[i] = r with r^(n-2) = STEP_GROWTH_SPAN, so the
        // cumulative position is t_end * (r^i - 1) / (r^(n-1) - 1).
        let r = STEP_GROWTH_SPAN.powf(1.0 / (n - 2) as f64);
        let denom = r.powi((n - 1) as i32) - 1.0;
        let mut points: Vec<f64> = (0..n)
            .map(|i| t_end * (r.powi(i as i32) - 1.0) / denom)
            .collect();
        // guard the endpoints against rounding
        points[0] = 0.0;
        *points.last_mut().unwrap() = t_end;
        Self::from_points(points)
    }

    /// Default grid: geometric spacing, 2048 points on `[0, 50]`.
    pub fn default_grid() -> Self {
        Self::geometric(DEFAULT_T_END, DEFAULT_POINTS).expect("default grid is valid")
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t_end(&self) -> f64 {
        *self.points.last().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_points() {
        assert!(TimeGrid::from_points(vec![]).is_err());
        assert!(TimeGrid::from_points(vec![0.0]).is_err());
        assert!(TimeGrid::from_points(vec![0.5, 1.0]).is_err());
        assert!(TimeGrid::from_points(vec![0.0, 1.0, 1.0]).is_err());
        assert!(TimeGrid::from_points(vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn geometric_grid_shape() {
        let g = TimeGrid::geometric(50.0, 2048).unwrap();
        assert_eq!(g.len(), 2048);
        assert_eq!(g.points()[0], 0.0);
        assert_eq!(g.t_end(), 50.0);
        let first_step = g.points()[1] - g.points()[0];
        let last_step = g.points()[2047] - g.points()[2046];
        assert!(
            last_step / first_step > 100.0,
            "grid should be much denser near zero"
        );
    }

    #[test]
    fn uniform_grid() {
        let g = TimeGrid::uniform(1.0, 5).unwrap();
        assert_eq!(g.points(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn two_point_grids() {
        assert_eq!(TimeGrid::geometric(3.0, 2).unwrap().points(), &[0.0, 3.0]);
    }

    #[test]
    fn rejects_bad_horizon() {
        assert!(TimeGrid::geometric(0.0, 16).is_err());
        assert!(TimeGrid::geometric(-1.0, 16).is_err());
        assert!(TimeGrid::uniform(f64::INFINITY, 16).is_err());
    }
}
