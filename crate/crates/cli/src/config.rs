//! JSON scenario configuration and its resolution into a [`Scenario`].
//!
//! ```json
//! {
//!   "market":   { "calibration_target_twh": 49.0, "gamma": 0.06, "beta": 0.0018 },
//!   "energy":   { "alpha": 0.6, "p_ele": 0.05 },
//!   "issuance": { "height_at_t0": 610691, "blocks_per_year": 53290 },
//!   "carbon":   { "datasets": {}, "trajectory": "s550", "horizon": 2100 },
//!   "sensitivity": { "theta": 0.03, "fd_step": 1e-4,
//!                    "sweeps": [{ "parameter": "alpha", "values": [0.5, 0.6, 0.7] }] },
//!   "output":   { "directory": "out", "formats": ["csv", "json"] }
//! }
//! ```
//!
//! `market` takes exactly one of `v0` / `calibration_target_twh` and exactly
//! one of `beta` / `gold`; `carbon` takes exactly one of `ef0` / `datasets`.
//! Relative paths are resolved against the directory of the config file.

use std::path::{Path, PathBuf};

use minecast_core::carbon::{
    Ef0Estimate, Scenario, ScenarioTrajectory, BASE_YEAR, BAU_RATE, EF_SCALE_RATE,
};
use minecast_core::dataset::{self, read_trajectory, trajectory_file, EmissionInputs};
use minecast_core::energy::CostShareParams;
use minecast_core::market::{beta_from_gold, calibrate_v0, GoldOtcParams, MarketParams};
use minecast_core::sensitivity::Parameter;
use minecast_core::supply::IssuanceParams;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::output::Format;

/// The configuration reproducing the main case, compiled into the binary.
pub const BASE_CONFIG: &str = include_str!("../configs/base.json");

pub const DATA_ENV: &str = "MINECAST_DATA";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub market: MarketSection,
    pub energy: EnergySection,
    #[serde(default)]
    pub issuance: IssuanceSection,
    pub carbon: CarbonSection,
    #[serde(default)]
    pub sensitivity: SensitivitySection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketSection {
    pub v0: Option<f64>,
    pub calibration_target_twh: Option<f64>,
    pub gamma: f64,
    pub beta: Option<f64>,
    pub gold: Option<GoldOtcParams>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergySection {
    pub alpha: f64,
    pub p_ele: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IssuanceSection {
    pub height_at_t0: u64,
    pub blocks_per_year: u64,
    /// Derived from the schedule when absent.
    pub minted_at_t0: Option<f64>,
}

impl Default for IssuanceSection {
    fn default() -> Self {
        let p = IssuanceParams::default();
        Self {
            height_at_t0: p.height_at_t0,
            blocks_per_year: p.blocks_per_year,
            minted_at_t0: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarbonSection {
    pub ef0: Option<f64>,
    pub datasets: Option<DatasetsSection>,
    #[serde(default = "default_scale_rate")]
    pub ef_scale_rate: f64,
    pub trajectory: TrajectorySpec,
    /// Last calendar year to project.
    pub horizon: i32,
}

fn default_scale_rate() -> f64 {
    EF_SCALE_RATE
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetsSection {
    /// Directory with the carbon CSVs; falls back to `MINECAST_DATA`, then to
    /// the bundled data.
    pub dir: Option<PathBuf>,
}

/// `"bau"`, a table name such as `"s550"`, `{"linear": θ}`,
/// `{"exponential": rate}` or `{"file": path}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TrajectorySpec {
    Named(String),
    Linear { linear: f64 },
    Exponential { exponential: f64 },
    File { file: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivitySection {
    /// Linear decarbonization rate for the analysis; the configured
    /// trajectory must be linear when absent.
    pub theta: Option<f64>,
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
    #[serde(default)]
    pub sweeps: Vec<SweepSpec>,
}

impl Default for SensitivitySection {
    fn default() -> Self {
        Self {
            theta: None,
            fd_step: default_fd_step(),
            sweeps: Vec::new(),
        }
    }
}

fn default_fd_step() -> f64 {
    1e-4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: Parameter,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub directory: Option<PathBuf>,
    pub formats: Option<Vec<Format>>,
}

fn exactly_one(field: &str, a: (&str, bool), b: (&str, bool)) -> Result<(), CliError> {
    match (a.1, b.1) {
        (true, false) | (false, true) => Ok(()),
        (true, true) => Err(CliError::Config(format!(
            "{field}: give either `{}` or `{}`, not both",
            a.0, b.0
        ))),
        (false, false) => Err(CliError::Config(format!(
            "{field}: one of `{}` or `{}` is required",
            a.0, b.0
        ))),
    }
}

/// Horizon year as an offset from the base year.
pub fn horizon_offset(year: i32) -> Result<u32, CliError> {
    u32::try_from(year - BASE_YEAR)
        .ok()
        .filter(|t| *t >= 1)
        .ok_or_else(|| CliError::Config(format!("horizon: year {year} must be after {BASE_YEAR}")))
}

impl Config {
    pub fn parse(text: &str, source: &str) -> Result<Self, CliError> {
        let config: Config =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("{source}: {e}")))?;
        config.check()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn base() -> Self {
        Self::parse(BASE_CONFIG, "base.json").expect("bundled config is valid")
    }

    fn check(&self) -> Result<(), CliError> {
        let m = &self.market;
        exactly_one(
            "market",
            ("v0", m.v0.is_some()),
            ("calibration_target_twh", m.calibration_target_twh.is_some()),
        )?;
        exactly_one(
            "market",
            ("beta", m.beta.is_some()),
            ("gold", m.gold.is_some()),
        )?;
        let c = &self.carbon;
        exactly_one(
            "carbon",
            ("ef0", c.ef0.is_some()),
            ("datasets", c.datasets.is_some()),
        )?;
        horizon_offset(c.horizon)?;
        Ok(())
    }
}

/// Paths the config is interpreted against.
#[derive(Debug, Clone, Default)]
pub struct Context {
    /// Directory of the config file; `None` for the built-in config.
    pub config_dir: Option<PathBuf>,
    /// Value of `MINECAST_DATA`, if set.
    pub data_env: Option<PathBuf>,
}

impl Context {
    pub fn from_env(config_path: Option<&Path>) -> Self {
        Self {
            config_dir: config_path.map(|p| p.parent().map(Path::to_path_buf).unwrap_or_default()),
            data_env: std::env::var_os(DATA_ENV).map(PathBuf::from),
        }
    }

    fn relative(&self, p: &Path) -> PathBuf {
        match &self.config_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.to_path_buf(),
        }
    }

    pub fn data_dir(&self, config: &Config) -> PathBuf {
        let explicit = config
            .carbon
            .datasets
            .as_ref()
            .and_then(|d| d.dir.as_deref())
            .map(|d| self.relative(d));
        explicit
            .or_else(|| self.data_env.clone())
            .unwrap_or_else(|| dataset::data_dir(None))
    }
}

/// Where EF(0) came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Ef0Origin {
    Configured,
    Estimated(Ef0Estimate),
}

/// A fully resolved scenario plus what it was built from.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub scenario: Scenario,
    pub ef0_origin: Ef0Origin,
    pub data_dir: PathBuf,
    pub calibration_target_twh: Option<f64>,
}

pub fn issuance(section: &IssuanceSection) -> Result<IssuanceParams, CliError> {
    let mut p = IssuanceParams::at_height(section.height_at_t0, section.blocks_per_year);
    if let Some(minted) = section.minted_at_t0 {
        p.minted_at_t0 = minted;
    }
    p.validate()?;
    Ok(p)
}

pub fn trajectory(
    spec: &TrajectorySpec,
    ctx: &Context,
    data_dir: &Path,
) -> Result<ScenarioTrajectory, CliError> {
    let t = match spec {
        TrajectorySpec::Named(name) if name == "bau" => {
            ScenarioTrajectory::Exponential { rate: BAU_RATE }
        }
        TrajectorySpec::Named(name) => {
            if name.is_empty()
                || !name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
            {
                return Err(CliError::Config(format!(
                    "carbon.trajectory: invalid name `{name}`"
                )));
            }
            ScenarioTrajectory::Table(read_trajectory(&data_dir.join(trajectory_file(name)))?)
        }
        TrajectorySpec::Linear { linear } => ScenarioTrajectory::Linear { theta: *linear },
        TrajectorySpec::Exponential { exponential } => {
            ScenarioTrajectory::Exponential { rate: *exponential }
        }
        TrajectorySpec::File { file } => {
            ScenarioTrajectory::Table(read_trajectory(&ctx.relative(file))?)
        }
    };
    t.validate()?;
    Ok(t)
}

impl Config {
    pub fn beta(&self) -> Result<f64, CliError> {
        match (&self.market.beta, &self.market.gold) {
            (Some(beta), _) => Ok(*beta),
            (None, Some(gold)) => {
                gold.validate()?;
                Ok(beta_from_gold(gold))
            }
            (None, None) => unreachable!("checked when parsed"),
        }
    }

    pub fn resolve(
        &self,
        ctx: &Context,
        horizon_override: Option<i32>,
    ) -> Result<Resolved, CliError> {
        let data_dir = ctx.data_dir(self);
        let issuance = issuance(&self.issuance)?;
        let cost = CostShareParams {
            alpha: self.energy.alpha,
            p_ele: self.energy.p_ele,
        };
        cost.validate()?;
        let beta = self.beta()?;
        let v0 = match (self.market.v0, self.market.calibration_target_twh) {
            (Some(v0), _) => v0,
            (None, Some(target)) => calibrate_v0(target, cost.alpha, cost.p_ele, beta, &issuance)?,
            (None, None) => unreachable!("checked when parsed"),
        };
        let market = MarketParams {
            v0,
            gamma: self.market.gamma,
            beta,
        };
        market.validate()?;
        let (ef0, ef0_origin) = match self.carbon.ef0 {
            Some(ef0) => (ef0, Ef0Origin::Configured),
            None => {
                let estimate =
                    EmissionInputs::load(&data_dir)?.estimate(self.carbon.ef_scale_rate)?;
                (estimate.ef0, Ef0Origin::Estimated(estimate))
            }
        };
        let horizon = horizon_offset(horizon_override.unwrap_or(self.carbon.horizon))?;
        let scenario = Scenario {
            market,
            issuance,
            cost,
            ef0,
            trajectory: trajectory(&self.carbon.trajectory, ctx, &data_dir)?,
            horizon,
        };
        scenario.validate()?;
        Ok(Resolved {
            scenario,
            ef0_origin,
            data_dir,
            calibration_target_twh: self.market.calibration_target_twh,
        })
    }
}
