//! Projection engine for Bitcoin mining electricity use and CO2 emissions,
//! 2020 through 2140.
//!
//! The pipeline runs issuance schedule -> miner revenue -> electricity ->
//! emissions:
//!
//! * [`supply`] gives the coins minted per year and the circulating supply.
//! * [`market`] turns market cap growth and a fee ratio into annual revenue.
//! * [`energy`] converts revenue into TWh through the electricity cost share.
//! * [`carbon`] builds EF(0) from pool geography, evolves it under a
//!   decarbonization trajectory and integrates emissions.
//! * [`sensitivity`] differentiates cumulative emissions analytically and by
//!   finite differences.
//! * [`dataset`] reads the CSV inputs.

pub mod carbon;
pub mod dataset;
pub mod energy;
pub mod error;
pub mod market;
pub mod sensitivity;
pub mod supply;

pub use carbon::{project, ProjectionSeries, Scenario, ScenarioTrajectory, YearRecord};
pub use energy::CostShareParams;
pub use error::{Error, ErrorClass, Result};
pub use market::MarketParams;
pub use supply::IssuanceParams;
