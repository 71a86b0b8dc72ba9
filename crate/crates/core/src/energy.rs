//! Electricity from the cost-share assumption, and the hardware-based estimate
//! of the electricity cost share.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::RevenueBreakdown;

pub const KWH_PER_TWH: f64 = 1e9;
pub const HOURS_PER_YEAR: f64 = 24.0 * 365.0;

/// Lifespan assumed for ASIC miners, years.
pub const ASIC_LIFESPAN_YEARS: f64 = 1.5;
/// Lifespan assumed for CPUs and GPUs, years.
pub const CPU_GPU_LIFESPAN_YEARS: f64 = 4.0;

/// Electricity share of mining cost (alpha) and the electricity price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostShareParams {
    pub alpha: f64,
    /// USD per kWh.
    pub p_ele: f64,
}

impl Default for CostShareParams {
    fn default() -> Self {
        Self {
            alpha: 0.6,
            p_ele: 0.05,
        }
    }
}

impl CostShareParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::param("alpha", "must lie in (0, 1]"));
        }
        if !(self.p_ele.is_finite() && self.p_ele > 0.0) {
            return Err(Error::param("p_ele", "must be positive"));
        }
        Ok(())
    }
}

/// ELE(t) = alpha R(t) / p_ele, in TWh per year.
pub fn electricity_consumption(revenue: &RevenueBreakdown, cost: &CostShareParams) -> f64 {
    cost.alpha * revenue.total / cost.p_ele / KWH_PER_TWH
}

/// One generation of mining hardware.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardwareSpec {
    pub name: String,
    pub release_year: i32,
    /// J per terahash.
    pub efficiency: f64,
    /// Terahash per second.
    pub hashrate: f64,
    /// USD.
    pub release_price: f64,
    /// USD per kWh, already deflated to the release year.
    pub electricity_price: f64,
    pub interest_rate: f64,
    /// Years.
    pub lifespan: f64,
}

impl HardwareSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("efficiency", self.efficiency),
            ("hashrate", self.hashrate),
            ("release_price", self.release_price),
            ("electricity_price", self.electricity_price),
            ("lifespan", self.lifespan),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::param(
                    name,
                    format!("must be positive for `{}`", self.name),
                ));
            }
        }
        if !(self.interest_rate.is_finite() && self.interest_rate >= 0.0) {
            return Err(Error::param(
                "interest_rate",
                format!("must be non-negative for `{}`", self.name),
            ));
        }
        Ok(())
    }

    /// USD per (TH/s) per year spent on electricity.
    pub fn annualized_electricity_cost(&self) -> f64 {
        self.efficiency * self.electricity_price / 1000.0 * HOURS_PER_YEAR
    }

    /// USD per (TH/s) per year of straight-line capital cost plus interest.
    pub fn annualized_capital_cost(&self) -> f64 {
        self.release_price / (self.hashrate * self.lifespan) * (1.0 + self.interest_rate)
    }

    /// Electricity share of the annualized cost of this hardware.
    pub fn electricity_share(&self) -> f64 {
        let ele = self.annualized_electricity_cost();
        ele / (ele + self.annualized_capital_cost())
    }
}

/// Unweighted mean of the electricity share over specs released in or after
/// `from_year`.
pub fn average_alpha(specs: &[HardwareSpec], from_year: i32) -> Result<f64> {
    let shares: Vec<f64> = specs
        .iter()
        .filter(|s| s.release_year >= from_year)
        .map(HardwareSpec::electricity_share)
        .collect();
    if shares.is_empty() {
        return Err(Error::EmptySelection(from_year));
    }
    Ok(shares.iter().sum::<f64>() / shares.len() as f64)
}
