//! Normalized grid-intensity trajectories, EF(t) / EF(0).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Annual intensity reduction under business as usual.
pub const BAU_RATE: f64 = 0.007;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TablePoint {
    pub year_offset: u32,
    pub intensity: f64,
}

/// Tabulated trajectory: starts at (0, 1), strictly increasing offsets,
/// non-negative and nonincreasing intensities. Linearly interpolated between
/// points and held at the last value afterwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityTable {
    points: Vec<TablePoint>,
}

fn check_shape(points: &[TablePoint]) -> Result<()> {
    let Some(first) = points.first() else {
        return Err(Error::DegenerateTrajectory("table is empty".into()));
    };
    if first.year_offset != 0 || (first.intensity - 1.0).abs() > 1e-9 {
        return Err(Error::DegenerateTrajectory(format!(
            "table must start at (0, 1), found ({}, {})",
            first.year_offset, first.intensity
        )));
    }
    for pair in points.windows(2) {
        if pair[1].year_offset <= pair[0].year_offset {
            return Err(Error::DegenerateTrajectory(format!(
                "year offsets must increase strictly ({} then {})",
                pair[0].year_offset, pair[1].year_offset
            )));
        }
        if pair[1].intensity > pair[0].intensity {
            return Err(Error::DegenerateTrajectory(format!(
                "intensity rises from {} to {} at year offset {}",
                pair[0].intensity, pair[1].intensity, pair[1].year_offset
            )));
        }
    }
    if let Some(p) = points
        .iter()
        .find(|p| !(p.intensity.is_finite() && p.intensity >= 0.0))
    {
        return Err(Error::DegenerateTrajectory(format!(
            "negative intensity {} at year offset {}",
            p.intensity, p.year_offset
        )));
    }
    Ok(())
}

impl IntensityTable {
    pub fn new(points: Vec<TablePoint>) -> Result<Self> {
        check_shape(&points)?;
        Ok(Self { points })
    }

    pub fn points(&self) -> &[TablePoint] {
        &self.points
    }

    pub fn intensity(&self, t: u32) -> f64 {
        let idx = self.points.partition_point(|p| p.year_offset <= t);
        // idx >= 1 because the table starts at offset 0
        let lo = self.points[idx - 1];
        match self.points.get(idx) {
            None => lo.intensity,
            Some(hi) => {
                let frac =
                    f64::from(t - lo.year_offset) / f64::from(hi.year_offset - lo.year_offset);
                lo.intensity + frac * (hi.intensity - lo.intensity)
            }
        }
    }

    pub fn neutral_year(&self) -> Option<u32> {
        self.points
            .iter()
            .find(|p| p.intensity <= 0.0)
            .map(|p| p.year_offset)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioTrajectory {
    /// (1 - rate)^t; never reaches zero.
    Exponential {
        rate: f64,
    },
    /// max(0, 1 - theta t).
    Linear {
        theta: f64,
    },
    Table(IntensityTable),
}

/// Smallest integer t >= 1 with 1 - theta t <= 0.
pub fn linear_neutral_year(theta: f64) -> Option<u32> {
    if !(theta > 0.0 && theta.is_finite()) {
        return None;
    }
    let guess = (1.0 / theta).ceil();
    if guess > f64::from(u32::MAX - 1) {
        return None;
    }
    let mut t = (guess as u32).max(1);
    // ceil(1/theta) can be off by one when 1/theta rounds across an integer
    while 1.0 - theta * f64::from(t) > 0.0 {
        t += 1;
    }
    while t > 1 && 1.0 - theta * f64::from(t - 1) <= 0.0 {
        t -= 1;
    }
    Some(t)
}

impl ScenarioTrajectory {
    pub fn bau() -> Self {
        ScenarioTrajectory::Exponential { rate: BAU_RATE }
    }

    pub fn linear(theta: f64) -> Result<Self> {
        let t = ScenarioTrajectory::Linear { theta };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ScenarioTrajectory::Exponential { rate } => {
                if !(0.0..1.0).contains(rate) {
                    return Err(Error::param(
                        "rate",
                        "exponential decline rate must lie in [0, 1)",
                    ));
                }
            }
            ScenarioTrajectory::Linear { theta } => {
                if !(*theta > 0.0 && *theta <= 1.0) {
                    return Err(Error::param("theta", "must lie in (0, 1]"));
                }
            }
            ScenarioTrajectory::Table(table) => check_shape(table.points())?,
        }
        Ok(())
    }

    pub fn intensity(&self, t: u32) -> f64 {
        match self {
            ScenarioTrajectory::Exponential { rate } => (1.0 - rate).powi(t as i32),
            ScenarioTrajectory::Linear { theta } => match linear_neutral_year(*theta) {
                Some(neutral) if t >= neutral => 0.0,
                _ => (1.0 - theta * f64::from(t)).max(0.0),
            },
            ScenarioTrajectory::Table(table) => table.intensity(t),
        }
    }

    /// Year offset T from which intensity is zero; `None` if it never is.
    pub fn neutral_year(&self) -> Option<u32> {
        match self {
            ScenarioTrajectory::Exponential { .. } => None,
            ScenarioTrajectory::Linear { theta } => linear_neutral_year(*theta),
            ScenarioTrajectory::Table(table) => table.neutral_year(),
        }
    }

    pub fn theta(&self) -> Option<f64> {
        match self {
            ScenarioTrajectory::Linear { theta } => Some(*theta),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub theta: f64,
    pub neutral_year: Option<u32>,
}

/// Least-squares slope of intensity on t through (0, 1); theta is its
/// negation.
pub fn fit_linear_theta(points: &[TablePoint]) -> Result<LinearFit> {
    if points.len() < 3 {
        return Err(Error::DegenerateTrajectory(format!(
            "need at least 3 points to fit, got {}",
            points.len()
        )));
    }
    check_shape(points)?;
    let (num, den) = points.iter().fold((0.0, 0.0), |(num, den), p| {
        let t = f64::from(p.year_offset);
        (num + t * (1.0 - p.intensity), den + t * t)
    });
    if den == 0.0 {
        return Err(Error::DegenerateTrajectory(
            "all points at year offset 0".into(),
        ));
    }
    let theta = num / den;
    Ok(LinearFit {
        theta,
        neutral_year: linear_neutral_year(theta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pts(values: &[(u32, f64)]) -> Vec<TablePoint> {
        values
            .iter()
            .map(|&(year_offset, intensity)| TablePoint {
                year_offset,
                intensity,
            })
            .collect()
    }

    #[test]
    fn exact_linear_fit() {
        let table: Vec<_> = (0..=30).map(|t| (t, 1.0 - 0.03 * f64::from(t))).collect();
        let fit = fit_linear_theta(&pts(&table)).unwrap();
        assert!((fit.theta - 0.03).abs() < 1e-12);
        assert_eq!(fit.neutral_year, Some(34));
    }

    #[test]
    fn constant_table_fits_zero() {
        let fit = fit_linear_theta(&pts(&[(0, 1.0), (10, 1.0), (20, 1.0)])).unwrap();
        assert_eq!(fit.theta, 0.0);
        assert_eq!(fit.neutral_year, None);
    }

    #[test]
    fn bad_tables() {
        assert!(fit_linear_theta(&pts(&[(0, 1.0), (10, 0.5)])).is_err());
        assert!(fit_linear_theta(&pts(&[(0, 1.0), (10, 0.5), (20, 0.7)])).is_err());
        assert!(fit_linear_theta(&pts(&[(0, 0.9), (10, 0.5), (20, 0.1)])).is_err());
        assert!(fit_linear_theta(&pts(&[(0, 1.0), (10, 0.5), (10, 0.1)])).is_err());
        assert!(IntensityTable::new(pts(&[(0, 1.0), (5, -0.1)])).is_err());
    }

    #[test]
    fn linear_neutral_years() {
        assert_eq!(linear_neutral_year(0.03), Some(34));
        assert_eq!(linear_neutral_year(0.05), Some(20));
        assert_eq!(linear_neutral_year(0.01), Some(100));
        assert_eq!(linear_neutral_year(1.0), Some(1));
        assert_eq!(linear_neutral_year(0.0), None);
    }

    #[test]
    fn linear_intensity_clamps() {
        let tr = ScenarioTrajectory::linear(0.03).unwrap();
        assert_eq!(tr.intensity(0), 1.0);
        assert!((tr.intensity(33) - 0.01).abs() < 1e-12);
        assert_eq!(tr.intensity(34), 0.0);
        assert_eq!(tr.intensity(200), 0.0);
    }

    #[test]
    fn bau_never_neutral() {
        let tr = ScenarioTrajectory::bau();
        assert_eq!(tr.neutral_year(), None);
        assert!((tr.intensity(80) - 0.993f64.powi(80)).abs() < 1e-15);
    }

    #[test]
    fn table_interpolates_and_holds() {
        let table = IntensityTable::new(pts(&[(0, 1.0), (10, 0.5), (20, 0.0)])).unwrap();
        assert_eq!(table.intensity(0), 1.0);
        assert_eq!(table.intensity(5), 0.75);
        assert_eq!(table.intensity(10), 0.5);
        assert_eq!(table.intensity(15), 0.25);
        assert_eq!(table.intensity(20), 0.0);
        assert_eq!(table.intensity(90), 0.0);
        assert_eq!(table.neutral_year(), Some(20));

        let plateau = IntensityTable::new(pts(&[(0, 1.0), (10, 0.4)])).unwrap();
        assert_eq!(plateau.intensity(50), 0.4);
        assert_eq!(plateau.neutral_year(), None);
    }

    proptest! {
        #[test]
        fn linear_trajectory_invariants(theta in 0.001f64..1.0) {
            let tr = ScenarioTrajectory::linear(theta).unwrap();
            let neutral = tr.neutral_year().unwrap();
            prop_assert_eq!(tr.intensity(0), 1.0);
            prop_assert!(tr.intensity(neutral - 1) > 0.0 || neutral == 1);
            for t in 0..neutral + 5 {
                prop_assert!(tr.intensity(t + 1) <= tr.intensity(t));
                if t >= neutral {
                    prop_assert_eq!(tr.intensity(t), 0.0);
                }
            }
        }
    }
}
