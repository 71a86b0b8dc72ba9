use minecast_core::carbon::{project, Scenario, ScenarioTrajectory};
use minecast_core::market::{calibrate_v0, MarketParams};
use minecast_core::sensitivity::{sweep, Parameter};
use minecast_core::{CostShareParams, IssuanceParams};

fn base(alpha: f64, gamma: f64, theta: f64) -> Scenario {
    let issuance = IssuanceParams::default();
    let v0 = calibrate_v0(49.0, 0.6, 0.05, 0.0018, &issuance).unwrap();
    Scenario {
        market: MarketParams {
            v0,
            gamma,
            beta: 0.0018,
        },
        issuance,
        cost: CostShareParams { alpha, p_ele: 0.05 },
        ef0: 0.46,
        trajectory: ScenarioTrajectory::Linear { theta },
        horizon: 100,
    }
}

fn totals(s: &Scenario, axis: Parameter, values: &[f64]) -> Vec<f64> {
    sweep(s, axis, values)
        .into_iter()
        .map(|p| p.outcome.unwrap().cumulative_emissions)
        .collect()
}

#[test]
fn cumulative_emissions_move_with_each_parameter() {
    for alpha in [0.4, 0.7] {
        for gamma in [0.02, 0.1] {
            for theta in [0.02, 0.04] {
                let s = base(alpha, gamma, theta);
                let up = |v: Vec<f64>| v.windows(2).all(|w| w[1] >= w[0]);
                let down = |v: Vec<f64>| v.windows(2).all(|w| w[1] <= w[0]);
                assert!(up(totals(&s, Parameter::Alpha, &[0.3, 0.5, 0.7, 0.9])));
                assert!(up(totals(&s, Parameter::Gamma, &[0.01, 0.05, 0.1, 0.2])));
                assert!(down(totals(
                    &s,
                    Parameter::Theta,
                    &[0.01, 0.02, 0.03, 0.05]
                )));
                let ef: Vec<f64> = [0.1, 0.3, 0.6]
                    .iter()
                    .map(|&ef0| {
                        project(&Scenario { ef0, ..s.clone() })
                            .unwrap()
                            .cumulative_emissions
                    })
                    .collect();
                assert!(up(ef));
            }
        }
    }
}

#[test]
fn linear_550_peaks_early() {
    let series = project(&base(0.6, 0.06, 0.03)).unwrap();
    assert!(series.peak().offset() <= 15);
    assert!(series.records[34..].iter().all(|r| r.emissions == 0.0));
}
