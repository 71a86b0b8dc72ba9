use std::path::{Path, PathBuf};

use minecast_core::carbon::{
    block_reward_only_series, linear_neutral_year, project, ProjectionSeries, Scenario,
    ScenarioTrajectory, BASE_YEAR,
};
use minecast_core::dataset::{read_hardware, EmissionInputs, HARDWARE_FILE};
use minecast_core::energy::average_alpha;
use minecast_core::market::revenue;
use minecast_core::sensitivity::{
    ordering_check, sensitivity_report, sweep, Derivatives, OrderingGrid, Parameter,
};
use serde::Serialize;

use crate::config::{trajectory, Config, Context, Ef0Origin, Resolved, TrajectorySpec};
use crate::error::CliError;
use crate::output::{fmt_num, Format, Outputs, Table, PROJECTION_HEADER, SWEEP_HEADER};
use crate::svg::{self, Chart, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ScenarioName {
    Bau,
    S450,
    S550,
    Custom,
}

impl ScenarioName {
    pub fn label(self) -> &'static str {
        match self {
            ScenarioName::Bau => "bau",
            ScenarioName::S450 => "s450",
            ScenarioName::S550 => "s550",
            ScenarioName::Custom => "custom",
        }
    }
}

/// Settings shared by every subcommand.
pub struct Session {
    pub config: Config,
    pub ctx: Context,
    pub out_dir: PathBuf,
    pub formats: Vec<Format>,
    pub horizon: Option<i32>,
}

impl Session {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    fn resolve(&self) -> Result<Resolved, CliError> {
        self.config.resolve(&self.ctx, self.horizon)
    }

    fn finish(&self, outputs: Outputs) -> Result<Vec<PathBuf>, CliError> {
        let written = outputs.commit(&self.out_dir)?;
        for p in &written {
            println!("wrote {}", p.display());
        }
        Ok(written)
    }
}

fn year_of(t: u32) -> i32 {
    BASE_YEAR + t as i32
}

fn projection_table(series: &ProjectionSeries) -> Table {
    let mut table = Table::new(&PROJECTION_HEADER);
    for r in &series.records {
        table.push(vec![
            r.year.to_string(),
            fmt_num(r.block_reward_revenue),
            fmt_num(r.fee_revenue),
            fmt_num(r.electricity),
            fmt_num(r.ef),
            fmt_num(r.emissions),
            fmt_num(r.cumulative),
        ]);
    }
    table
}

#[derive(Serialize)]
struct ProjectionSummary<'a> {
    scenario: &'a str,
    ef0_kg_kwh: f64,
    ef0_source: &'a str,
    v0_usd: f64,
    alpha: f64,
    gamma: f64,
    beta: f64,
    p_ele_usd_kwh: f64,
    horizon_year: i32,
    electricity_twh_2020: f64,
    emissions_mt_2020: f64,
    fee_share_2020: f64,
    cumulative_mt: f64,
    cumulative_mt_2100: Option<f64>,
    peak_year: i32,
    peak_emissions_mt: f64,
    neutral_year: Option<i32>,
}

fn scenario_for(
    session: &Session,
    resolved: &Resolved,
    name: ScenarioName,
) -> Result<Scenario, CliError> {
    let mut s = resolved.scenario.clone();
    let spec = match name {
        ScenarioName::Custom => return Ok(s),
        other => TrajectorySpec::Named(other.label().to_string()),
    };
    s.trajectory = trajectory(&spec, &session.ctx, &resolved.data_dir)?;
    Ok(s)
}

fn points(
    series: &ProjectionSeries,
    f: impl Fn(&minecast_core::YearRecord) -> f64,
) -> Vec<(f64, f64)> {
    series
        .records
        .iter()
        .map(|r| (f64::from(r.year), f(r)))
        .collect()
}

pub fn project_cmd(session: &Session, name: ScenarioName) -> Result<Vec<PathBuf>, CliError> {
    let resolved = session.resolve()?;
    let scenario = scenario_for(session, &resolved, name)?;
    let series = project(&scenario)?;
    let label = name.label();
    let first = &series.records[0];
    let peak = series.peak();
    let summary = ProjectionSummary {
        scenario: label,
        ef0_kg_kwh: scenario.ef0,
        ef0_source: match resolved.ef0_origin {
            Ef0Origin::Configured => "configured",
            Ef0Origin::Estimated(_) => "datasets",
        },
        v0_usd: scenario.market.v0,
        alpha: scenario.cost.alpha,
        gamma: scenario.market.gamma,
        beta: scenario.market.beta,
        p_ele_usd_kwh: scenario.cost.p_ele,
        horizon_year: year_of(scenario.horizon),
        electricity_twh_2020: first.electricity,
        emissions_mt_2020: first.emissions,
        fee_share_2020: revenue(&scenario.market, &scenario.issuance, 0)?.fee_share(),
        cumulative_mt: series.cumulative_emissions,
        cumulative_mt_2100: series.at_year(2100).map(|r| r.cumulative),
        peak_year: peak.year,
        peak_emissions_mt: peak.emissions,
        neutral_year: series.neutral_year.map(year_of),
    };

    let mut outputs = Outputs::default();
    if session.wants(Format::Csv) {
        outputs.add_csv(
            format!("projection_{label}.csv"),
            &projection_table(&series),
        )?;
    }
    if session.wants(Format::Json) {
        outputs.add_json(format!("summary_{label}.json"), &summary)?;
    }
    if session.wants(Format::Svg) {
        let mut emissions = Vec::new();
        for other in [ScenarioName::Bau, ScenarioName::S450, ScenarioName::S550] {
            let s = project(&scenario_for(session, &resolved, other)?)?;
            emissions.push(Series {
                label: other.label().to_uppercase(),
                points: points(&s, |r| r.emissions),
            });
        }
        let fig1 = [
            Chart {
                title: "Annual electricity consumption".into(),
                y_label: "TWh".into(),
                series: vec![Series {
                    label: "electricity".into(),
                    points: points(&series, |r| r.electricity),
                }],
            },
            Chart {
                title: "Annual CO2 emissions".into(),
                y_label: "Mt CO2".into(),
                series: emissions,
            },
        ];
        outputs.add("fig1.svg", svg::render(&fig1, 2).into_bytes());

        let rewards = block_reward_only_series(&scenario)?;
        let fig3 = [
            Chart {
                title: "Mining revenue".into(),
                y_label: "billion USD".into(),
                series: vec![
                    Series {
                        label: "rewards + fees".into(),
                        points: points(&series, |r| (r.block_reward_revenue + r.fee_revenue) / 1e9),
                    },
                    Series {
                        label: "rewards only".into(),
                        points: points(&rewards, |r| r.block_reward_revenue / 1e9),
                    },
                ],
            },
            Chart {
                title: "Electricity consumption".into(),
                y_label: "TWh".into(),
                series: vec![
                    Series {
                        label: "rewards + fees".into(),
                        points: points(&series, |r| r.electricity),
                    },
                    Series {
                        label: "rewards only".into(),
                        points: points(&rewards, |r| r.electricity),
                    },
                ],
            },
        ];
        outputs.add("fig3.svg", svg::render(&fig3, 2).into_bytes());
    }
    let written = session.finish(outputs)?;
    println!(
        "{label}: EF(0) {} kg/kWh, cumulative {} Mt through {}, peak {}",
        fmt_num(summary.ef0_kg_kwh),
        fmt_num(summary.cumulative_mt),
        summary.horizon_year,
        summary.peak_year
    );
    Ok(written)
}

#[derive(Serialize)]
struct Ef0Report {
    ef0_kg_kwh: f64,
    china_share: f64,
    china_mean_ef_kg_kwh: Option<f64>,
    scale_rate: f64,
    base_year: i32,
    pool_weights: std::collections::BTreeMap<String, f64>,
}

pub fn ef_cmd(session: &Session, data_dir: Option<&Path>) -> Result<Vec<PathBuf>, CliError> {
    let dir = data_dir
        .map(Path::to_path_buf)
        .unwrap_or_else(|| session.ctx.data_dir(&session.config));
    let inputs = EmissionInputs::load(&dir)?;
    let rate = session.config.carbon.ef_scale_rate;
    let estimate = inputs.estimate(rate)?;
    let china_mean = if inputs.generation.is_empty() {
        None
    } else {
        Some(inputs.china_mean_ef()?)
    };

    let mut outputs = Outputs::default();
    if session.wants(Format::Csv) {
        let mut table = Table::new(&["region", "share"]);
        for (region, share) in &estimate.distribution.shares {
            table.push(vec![region.clone(), fmt_num(*share)]);
        }
        outputs.add_csv("distribution.csv", &table)?;
    }
    if session.wants(Format::Json) {
        outputs.add_json(
            "ef0.json",
            &Ef0Report {
                ef0_kg_kwh: estimate.ef0,
                china_share: estimate.china_share,
                china_mean_ef_kg_kwh: china_mean,
                scale_rate: rate,
                base_year: BASE_YEAR,
                pool_weights: estimate.weights.clone(),
            },
        )?;
    }
    let written = session.finish(outputs)?;
    println!(
        "EF(0) {} kg/kWh, China share {}",
        fmt_num(estimate.ef0),
        fmt_num(estimate.china_share)
    );
    Ok(written)
}

#[derive(Serialize)]
struct SensitivityParams {
    alpha: f64,
    gamma: f64,
    theta: f64,
    beta: f64,
    p_ele_usd_kwh: f64,
    v0_usd: f64,
    ef0_kg_kwh: f64,
}

#[derive(Serialize)]
struct Orderings {
    neg_dlog_dtheta_gt_dlog_dgamma: bool,
    dlog_dgamma_gt_dlog_dalpha: bool,
    grid_points: usize,
    grid_counterexamples: usize,
}

#[derive(Serialize)]
struct SensitivityOutput {
    parameters: SensitivityParams,
    neutral_year: i32,
    base_cumulative_mt: f64,
    fd_step: f64,
    analytic: Derivatives,
    finite_difference: Derivatives,
    max_relative_gap: f64,
    orderings: Orderings,
}

pub fn sensitivity_cmd(session: &Session) -> Result<Vec<PathBuf>, CliError> {
    let resolved = session.resolve()?;
    let section = &session.config.sensitivity;
    let scenario = match section.theta {
        Some(theta) => Parameter::Theta.apply(&resolved.scenario, theta)?,
        None => resolved.scenario.clone(),
    };
    let report = sensitivity_report(&scenario, section.fd_step)?;
    let grid = ordering_check(&scenario, &OrderingGrid::default())?;
    let output = SensitivityOutput {
        parameters: SensitivityParams {
            alpha: report.alpha,
            gamma: report.gamma,
            theta: report.theta,
            beta: report.beta,
            p_ele_usd_kwh: report.p_ele,
            v0_usd: report.v0,
            ef0_kg_kwh: report.ef0,
        },
        neutral_year: year_of(report.neutral_year),
        base_cumulative_mt: report.base_cumulative,
        fd_step: report.fd_step,
        analytic: report.analytic,
        finite_difference: report.finite_difference,
        max_relative_gap: report.max_relative_gap(),
        orderings: Orderings {
            neg_dlog_dtheta_gt_dlog_dgamma: report.analytic.theta_dominates_gamma(),
            dlog_dgamma_gt_dlog_dalpha: report.analytic.gamma_dominates_alpha(),
            grid_points: grid.len(),
            grid_counterexamples: grid.iter().filter(|p| !p.holds()).count(),
        },
    };

    let mut outputs = Outputs::default();
    if session.wants(Format::Json) {
        outputs.add_json("sensitivity.json", &output)?;
    }
    let mut charts = Vec::new();
    for spec in &section.sweeps {
        // run every point until its own neutral year at least
        let mut horizon = scenario.horizon.max(report.neutral_year);
        if spec.parameter == Parameter::Theta {
            for v in &spec.values {
                horizon = horizon.max(linear_neutral_year(*v).unwrap_or(0));
            }
        }
        let base = scenario.with_horizon(horizon);
        let results = sweep(&base, spec.parameter, &spec.values);
        let mut table = Table::new(&SWEEP_HEADER);
        let mut trajectories = Vec::new();
        let mut totals = Vec::new();
        for point in results {
            let series = point.outcome.map_err(|e| match e.class() {
                minecast_core::ErrorClass::Config => CliError::Config(format!(
                    "sensitivity.sweeps: {} = {}: {e}",
                    spec.parameter, point.value
                )),
                _ => CliError::Core(e),
            })?;
            for r in &series.records {
                table.push(vec![
                    fmt_num(point.value),
                    r.year.to_string(),
                    fmt_num(r.electricity),
                    fmt_num(r.emissions),
                    fmt_num(r.cumulative),
                ]);
            }
            let label = format!("{} = {}", spec.parameter, fmt_num(point.value));
            trajectories.push(Series {
                label,
                points: points(&series, |r| r.emissions),
            });
            totals.push((point.value, series.cumulative_emissions));
        }
        if session.wants(Format::Csv) {
            outputs.add_csv(format!("sweep_{}.csv", spec.parameter), &table)?;
        }
        charts.push(Chart {
            title: format!("Emissions, varying {}", spec.parameter),
            y_label: "Mt CO2".into(),
            series: trajectories,
        });
        charts.push(Chart {
            title: format!("Cumulative emissions vs {}", spec.parameter),
            y_label: "Mt CO2".into(),
            series: vec![Series {
                label: "cumulative".into(),
                points: totals,
            }],
        });
    }
    if session.wants(Format::Svg) && !charts.is_empty() {
        outputs.add("fig5.svg", svg::render(&charts, 2).into_bytes());
    }
    let written = session.finish(outputs)?;
    let a = &report.analytic;
    println!(
        "dlogE/dalpha {}, dlogE/dgamma {}, -dlogE/dtheta {} (E = {} Mt through {})",
        fmt_num(a.dlog_dalpha),
        fmt_num(a.dlog_dgamma),
        fmt_num(a.neg_dlog_dtheta),
        fmt_num(report.base_cumulative),
        year_of(report.neutral_year)
    );
    Ok(written)
}

#[derive(Serialize)]
struct AlphaSummary {
    from_year: i32,
    mean_alpha: f64,
    specs_used: usize,
    adopted_alpha: f64,
}

pub fn alpha_cmd(
    session: &Session,
    hardware: Option<&Path>,
    from_year: i32,
) -> Result<Vec<PathBuf>, CliError> {
    let path = hardware
        .map(Path::to_path_buf)
        .unwrap_or_else(|| session.ctx.data_dir(&session.config).join(HARDWARE_FILE));
    let specs = read_hardware(&path)?;
    let mean = average_alpha(&specs, from_year)?;
    let adopted = session.config.energy.alpha;

    let mut outputs = Outputs::default();
    if session.wants(Format::Csv) {
        let mut table = Table::new(&["name", "release_year", "alpha", "included"]);
        for s in &specs {
            table.push(vec![
                s.name.clone(),
                s.release_year.to_string(),
                fmt_num(s.electricity_share()),
                (s.release_year >= from_year).to_string(),
            ]);
        }
        outputs.add_csv("alpha.csv", &table)?;
    }
    if session.wants(Format::Json) {
        outputs.add_json(
            "alpha.json",
            &AlphaSummary {
                from_year,
                mean_alpha: mean,
                specs_used: specs.iter().filter(|s| s.release_year >= from_year).count(),
                adopted_alpha: adopted,
            },
        )?;
    }
    let written = session.finish(outputs)?;
    println!(
        "mean alpha from {from_year}: {} (adopted: {})",
        fmt_num(mean),
        fmt_num(adopted)
    );
    Ok(written)
}

#[derive(Serialize)]
struct Calibration {
    target_twh: Option<f64>,
    alpha: f64,
    p_ele_usd_kwh: f64,
    beta: f64,
    v0_usd: f64,
    coins_minted_2020_btc: f64,
    supply_start_2020_btc: f64,
    electricity_twh_2020: f64,
    fee_share_2020: f64,
}

pub fn calibrate_cmd(session: &Session) -> Result<Vec<PathBuf>, CliError> {
    let resolved = session.resolve()?;
    let s = resolved.scenario.with_horizon(1);
    let s = Scenario {
        trajectory: ScenarioTrajectory::bau(),
        ..s
    };
    let series = project(&s)?;
    let calibration = Calibration {
        target_twh: resolved.calibration_target_twh,
        alpha: s.cost.alpha,
        p_ele_usd_kwh: s.cost.p_ele,
        beta: s.market.beta,
        v0_usd: s.market.v0,
        coins_minted_2020_btc: s.issuance.coins_minted_in_year(0),
        supply_start_2020_btc: s.issuance.minted_at_t0,
        electricity_twh_2020: series.records[0].electricity,
        fee_share_2020: revenue(&s.market, &s.issuance, 0)?.fee_share(),
    };
    let mut outputs = Outputs::default();
    if session.wants(Format::Json) {
        outputs.add_json("calibration.json", &calibration)?;
    }
    let written = session.finish(outputs)?;
    println!("V(0) = {} USD", fmt_num(calibration.v0_usd));
    Ok(written)
}
