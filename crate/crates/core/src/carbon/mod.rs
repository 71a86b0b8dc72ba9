//! Emission factors, decarbonization trajectories and the emissions projection.

pub mod geography;
pub mod projection;
pub mod trajectory;

pub use geography::{
    china_province_ef, china_province_efs, estimate_ef0, generation_weighted_mean,
    impute_regional_hashrates, network_distribution, pool_weights, weighted_ef0, ChinaGridRecord,
    Ef0Estimate, HashRateDistribution, PoolReport, RegionCatalog, RegionEmissionFactor, RegionKind,
    CHINA_GRID_VINTAGE, EF_SCALE_RATE,
};
pub use projection::{
    block_reward_only_series, project, ProjectionSeries, Scenario, YearRecord, BASE_YEAR,
};
pub use trajectory::{
    fit_linear_theta, linear_neutral_year, IntensityTable, LinearFit, ScenarioTrajectory,
    TablePoint, BAU_RATE,
};
