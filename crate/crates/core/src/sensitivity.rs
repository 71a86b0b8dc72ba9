//! Log-derivatives of cumulative emissions with respect to alpha, gamma and
//! theta, a central-difference cross-check, and one-axis parameter sweeps.
//!
//! Cumulative emissions here are E^T: the annual sum from t = 1 through the
//! neutral year T of a linear trajectory. Both the analytic sums and the
//! finite differences use the same annual discretization as [`project`], and
//! V(0) is held fixed while parameters move.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::carbon::{project, ProjectionSeries, Scenario, ScenarioTrajectory};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    Alpha,
    Gamma,
    Theta,
    Beta,
    PEle,
}

impl Parameter {
    pub const ALL: [Parameter; 5] = [
        Parameter::Alpha,
        Parameter::Gamma,
        Parameter::Theta,
        Parameter::Beta,
        Parameter::PEle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Parameter::Alpha => "alpha",
            Parameter::Gamma => "gamma",
            Parameter::Theta => "theta",
            Parameter::Beta => "beta",
            Parameter::PEle => "p_ele",
        }
    }

    pub fn value(self, s: &Scenario) -> Option<f64> {
        match self {
            Parameter::Alpha => Some(s.cost.alpha),
            Parameter::Gamma => Some(s.market.gamma),
            Parameter::Theta => s.trajectory.theta(),
            Parameter::Beta => Some(s.market.beta),
            Parameter::PEle => Some(s.cost.p_ele),
        }
    }

    /// Copy of `s` with this parameter set to `value`. Setting theta replaces
    /// the trajectory with the linear one.
    pub fn apply(self, s: &Scenario, value: f64) -> Result<Scenario> {
        let mut out = s.clone();
        match self {
            Parameter::Alpha => out.cost.alpha = value,
            Parameter::Gamma => out.market.gamma = value,
            Parameter::Theta => out.trajectory = ScenarioTrajectory::Linear { theta: value },
            Parameter::Beta => out.market.beta = value,
            Parameter::PEle => out.cost.p_ele = value,
        }
        out.validate()?;
        Ok(out)
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Parameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Parameter::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::param("parameter", format!("unknown parameter `{s}`")))
    }
}

/// d log E / d alpha, d log E / d gamma and -d log E / d theta.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Derivatives {
    pub dlog_dalpha: f64,
    pub dlog_dgamma: f64,
    pub neg_dlog_dtheta: f64,
}

impl Derivatives {
    pub fn theta_dominates_gamma(&self) -> bool {
        self.neg_dlog_dtheta > self.dlog_dgamma
    }

    pub fn gamma_dominates_alpha(&self) -> bool {
        self.dlog_dgamma > self.dlog_dalpha
    }
}

/// The scenario re-horizoned to its neutral year, plus theta and T.
fn to_neutrality(s: &Scenario) -> Result<(Scenario, f64, u32)> {
    let ScenarioTrajectory::Linear { theta } = s.trajectory else {
        return Err(Error::NotLinear);
    };
    s.trajectory.validate()?;
    let neutral = s
        .trajectory
        .neutral_year()
        .ok_or_else(|| Error::param("theta", "must be positive"))?;
    Ok((s.with_horizon(neutral), theta, neutral))
}

fn cumulative_to_neutrality(s: &Scenario) -> Result<f64> {
    let (s, _, _) = to_neutrality(s)?;
    Ok(project(&s)?.cumulative_emissions)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analytic {
    pub derivatives: Derivatives,
    /// E^T, Mt CO2.
    pub cumulative: f64,
    pub neutral_year: u32,
}

pub fn analytic_derivatives(s: &Scenario) -> Result<Analytic> {
    let (s, _, neutral) = to_neutrality(s)?;
    let series = project(&s)?;
    let total = series.cumulative_emissions;
    if total <= 0.0 {
        return Err(Error::ZeroEmissions);
    }
    let growth = 1.0 + s.market.gamma;
    let mut dgamma = 0.0;
    let mut dtheta = 0.0;
    for r in &series.records[1..] {
        let t = f64::from(r.offset());
        // d/dgamma (1+gamma)^t = t (1+gamma)^(t-1)
        dgamma += r.emissions * t / growth;
        // d/dtheta of max(0, 1 - theta t) is -t while the clamp is inactive
        if r.offset() < neutral {
            dtheta += r.electricity * s.ef0 * t;
        }
    }
    Ok(Analytic {
        derivatives: Derivatives {
            dlog_dalpha: 1.0 / s.cost.alpha,
            dlog_dgamma: dgamma / total,
            neg_dlog_dtheta: dtheta / total,
        },
        cumulative: total,
        neutral_year: neutral,
    })
}

pub const MIN_FD_STEP: f64 = 1e-6;
pub const MAX_FD_STEP: f64 = 1e-2;

/// Central difference of log E^T with respect to `param`, using a relative
/// perturbation of `step`. Theta perturbations move the neutral year too.
pub fn finite_difference(s: &Scenario, param: Parameter, step: f64) -> Result<f64> {
    if !(MIN_FD_STEP..=MAX_FD_STEP).contains(&step) {
        return Err(Error::param(
            "fd_step",
            format!("must lie in [{MIN_FD_STEP}, {MAX_FD_STEP}]"),
        ));
    }
    to_neutrality(s)?;
    let x = param
        .value(s)
        .ok_or_else(|| Error::param(param.name(), "not defined for this scenario"))?;
    let h = if x == 0.0 { step } else { step * x.abs() };
    let up = param.apply(s, x + h)?;
    let down = param.apply(s, x - h)?;
    let e_up = cumulative_to_neutrality(&up)?;
    let e_down = cumulative_to_neutrality(&down)?;
    if e_up <= 0.0 || e_down <= 0.0 {
        return Err(Error::ZeroEmissions);
    }
    Ok((e_up.ln() - e_down.ln()) / (2.0 * h))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub analytic: Derivatives,
    pub finite_difference: Derivatives,
    pub fd_step: f64,
    /// E^T, Mt CO2.
    pub base_cumulative: f64,
    pub neutral_year: u32,
    pub alpha: f64,
    pub gamma: f64,
    pub theta: f64,
    pub beta: f64,
    pub p_ele: f64,
    pub v0: f64,
    pub ef0: f64,
}

impl SensitivityReport {
    /// Largest relative gap between an analytic value and its finite-difference
    /// counterpart.
    pub fn max_relative_gap(&self) -> f64 {
        let pairs = [
            (
                self.analytic.dlog_dalpha,
                self.finite_difference.dlog_dalpha,
            ),
            (
                self.analytic.dlog_dgamma,
                self.finite_difference.dlog_dgamma,
            ),
            (
                self.analytic.neg_dlog_dtheta,
                self.finite_difference.neg_dlog_dtheta,
            ),
        ];
        pairs
            .iter()
            .map(|(a, f)| ((a - f) / a).abs())
            .fold(0.0, f64::max)
    }
}

pub fn sensitivity_report(s: &Scenario, fd_step: f64) -> Result<SensitivityReport> {
    let analytic = analytic_derivatives(s)?;
    let fd = Derivatives {
        dlog_dalpha: finite_difference(s, Parameter::Alpha, fd_step)?,
        dlog_dgamma: finite_difference(s, Parameter::Gamma, fd_step)?,
        neg_dlog_dtheta: -finite_difference(s, Parameter::Theta, fd_step)?,
    };
    Ok(SensitivityReport {
        analytic: analytic.derivatives,
        finite_difference: fd,
        fd_step,
        base_cumulative: analytic.cumulative,
        neutral_year: analytic.neutral_year,
        alpha: s.cost.alpha,
        gamma: s.market.gamma,
        theta: s.trajectory.theta().unwrap_or_default(),
        beta: s.market.beta,
        p_ele: s.cost.p_ele,
        v0: s.market.v0,
        ef0: s.ef0,
    })
}

/// Evenly spaced grid over alpha, gamma and theta.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderingGrid {
    pub alpha: (f64, f64),
    pub gamma: (f64, f64),
    pub theta: (f64, f64),
    pub points_per_axis: usize,
}

impl Default for OrderingGrid {
    fn default() -> Self {
        Self {
            alpha: (0.3, 1.0),
            gamma: (0.01, 0.2),
            theta: (0.01, 0.05),
            points_per_axis: 5,
        }
    }
}

fn linspace((lo, hi): (f64, f64), n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderingPoint {
    pub alpha: f64,
    pub gamma: f64,
    pub theta: f64,
    pub derivatives: Derivatives,
}

impl OrderingPoint {
    pub fn holds(&self) -> bool {
        self.derivatives.theta_dominates_gamma() && self.derivatives.gamma_dominates_alpha()
    }
}

/// Analytic derivatives at every grid point, all other parameters taken from
/// `base`.
pub fn ordering_check(base: &Scenario, grid: &OrderingGrid) -> Result<Vec<OrderingPoint>> {
    let mut combos = Vec::new();
    for &alpha in &linspace(grid.alpha, grid.points_per_axis) {
        for &gamma in &linspace(grid.gamma, grid.points_per_axis) {
            for &theta in &linspace(grid.theta, grid.points_per_axis) {
                combos.push((alpha, gamma, theta));
            }
        }
    }
    combos
        .into_par_iter()
        .map(|(alpha, gamma, theta)| {
            let s = Parameter::Alpha.apply(base, alpha)?;
            let s = Parameter::Gamma.apply(&s, gamma)?;
            let s = Parameter::Theta.apply(&s, theta)?;
            Ok(OrderingPoint {
                alpha,
                gamma,
                theta,
                derivatives: analytic_derivatives(&s)?.derivatives,
            })
        })
        .collect()
}

#[derive(Debug)]
pub struct SweepPoint {
    pub value: f64,
    pub outcome: Result<ProjectionSeries>,
}

/// One projection per value with every other parameter held at `base`.
/// Results come back in input order; an invalid value yields an error entry.
pub fn sweep(base: &Scenario, axis: Parameter, values: &[f64]) -> Vec<SweepPoint> {
    values
        .par_iter()
        .map(|&value| SweepPoint {
            value,
            outcome: axis.apply(base, value).and_then(|s| project(&s)),
        })
        .collect()
}
