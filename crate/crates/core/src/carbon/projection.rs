//! Annual projection of revenue, electricity, grid intensity and emissions.
//!
//! Years are integer offsets from the base year. Cumulative emissions are the
//! left sum of E(t) over t = 1..=horizon; years at or past the neutral year
//! contribute nothing because EF is clamped at zero there.

use serde::{Deserialize, Serialize};

use super::trajectory::ScenarioTrajectory;
use crate::energy::{electricity_consumption, CostShareParams};
use crate::error::{Error, Result};
use crate::market::{revenue_with_supply, MarketParams};
use crate::supply::{IssuanceParams, SupplyTable};

/// Calendar year of t = 0.
pub const BASE_YEAR: i32 = 2020;

/// Everything needed to run one projection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub market: MarketParams,
    pub issuance: IssuanceParams,
    pub cost: CostShareParams,
    /// Hash-rate-weighted emission factor at t = 0, kg CO2 per kWh.
    pub ef0: f64,
    pub trajectory: ScenarioTrajectory,
    /// Last year offset to project.
    pub horizon: u32,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.market.validate()?;
        self.issuance.validate()?;
        self.cost.validate()?;
        self.trajectory.validate()?;
        if !(0.0..=2.0).contains(&self.ef0) {
            return Err(Error::param("ef0", "must lie in [0, 2] kg/kWh"));
        }
        if self.horizon < 1 {
            return Err(Error::param(
                "horizon",
                "must be at least one year past the base year",
            ));
        }
        Ok(())
    }

    pub fn with_horizon(&self, horizon: u32) -> Self {
        Self {
            horizon,
            ..self.clone()
        }
    }
}

/// One projected year.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YearRecord {
    pub year: i32,
    pub block_reward_revenue: f64,
    pub fee_revenue: f64,
    /// TWh.
    pub electricity: f64,
    /// kg CO2 per kWh.
    pub ef: f64,
    /// Mt CO2. TWh times kg/kWh is exactly Mt.
    pub emissions: f64,
    /// Mt CO2 summed from t = 1 through this year.
    pub cumulative: f64,
}

impl YearRecord {
    pub fn offset(&self) -> u32 {
        (self.year - BASE_YEAR) as u32
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionSeries {
    pub records: Vec<YearRecord>,
    /// Mt CO2 over t = 1..=horizon.
    pub cumulative_emissions: f64,
    pub neutral_year: Option<u32>,
}

impl ProjectionSeries {
    pub fn at(&self, t: u32) -> Option<&YearRecord> {
        self.records.get(t as usize)
    }

    pub fn at_year(&self, year: i32) -> Option<&YearRecord> {
        u32::try_from(year - BASE_YEAR)
            .ok()
            .and_then(|t| self.at(t))
    }

    /// Cumulative emissions through offset `t`, or `None` past the horizon.
    pub fn cumulative_through(&self, t: u32) -> Option<f64> {
        self.at(t).map(|r| r.cumulative)
    }

    /// Year with the highest annual emissions (earliest on ties).
    pub fn peak(&self) -> &YearRecord {
        self.records
            .iter()
            .reduce(|best, r| {
                if r.emissions > best.emissions {
                    r
                } else {
                    best
                }
            })
            .expect("a projection always has the base year")
    }
}

fn run(s: &Scenario, rewards_only: bool) -> Result<ProjectionSeries> {
    s.validate()?;
    let supply = SupplyTable::new(&s.issuance, s.horizon);
    let mut records = Vec::with_capacity(s.horizon as usize + 1);
    let mut cumulative = 0.0;
    for t in 0..=s.horizon {
        let mut revenue =
            revenue_with_supply(&s.market, supply.minted(t), supply.cumulative(t), t)?;
        if rewards_only {
            revenue = revenue.rewards_only();
        }
        let electricity = electricity_consumption(&revenue, &s.cost);
        let ef = s.ef0 * s.trajectory.intensity(t);
        let emissions = electricity * ef;
        if t >= 1 {
            cumulative += emissions;
        }
        records.push(YearRecord {
            year: BASE_YEAR + t as i32,
            block_reward_revenue: revenue.block_reward_revenue,
            fee_revenue: revenue.fee_revenue,
            electricity,
            ef,
            emissions,
            cumulative,
        });
    }
    if !cumulative.is_finite() {
        return Err(Error::Numeric("cumulative emissions overflowed".into()));
    }
    Ok(ProjectionSeries {
        records,
        cumulative_emissions: cumulative,
        neutral_year: s.trajectory.neutral_year(),
    })
}

pub fn project(s: &Scenario) -> Result<ProjectionSeries> {
    run(s, false)
}

/// Same pipeline with transaction-fee revenue forced to zero.
pub fn block_reward_only_series(s: &Scenario) -> Result<ProjectionSeries> {
    run(s, true)
}
