//! Emitted CSVs parse back through the crate's own readers to the rounded
//! values of the in-memory results.

use std::path::Path;

use minecast::config::{Config, Context};
use minecast::output::{parse_csv, sig6, ProjectionRow};
use minecast_core::carbon::project;
use minecast_core::dataset::{parse_trajectory, BUNDLED_DATA_DIR};
use minecast_core::IssuanceParams;
use proptest::prelude::*;
use tempfile::TempDir;

#[test]
fn projection_csv_round_trips() {
    let tmp = TempDir::new().unwrap();
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_minecast"))
        .args([
            "--out",
            tmp.path().to_str().unwrap(),
            "project",
            "bau",
            "--format",
            "csv",
        ])
        .env("MINECAST_DATA", BUNDLED_DATA_DIR)
        .status()
        .unwrap();
    assert!(status.success());

    let path = tmp.path().join("projection_bau.csv");
    let rows: Vec<ProjectionRow> =
        parse_csv(std::fs::File::open(&path).unwrap(), "projection_bau.csv").unwrap();

    let mut resolved = Config::base().resolve(&Context::default(), None).unwrap();
    resolved.scenario.trajectory = minecast_core::ScenarioTrajectory::bau();
    let series = project(&resolved.scenario).unwrap();
    assert_eq!(rows.len(), series.records.len());
    for (row, r) in rows.iter().zip(&series.records) {
        assert_eq!(row.year, r.year);
        assert_eq!(row.reward_revenue_usd, sig6(r.block_reward_revenue));
        assert_eq!(row.fee_revenue_usd, sig6(r.fee_revenue));
        assert_eq!(row.electricity_twh, sig6(r.electricity));
        assert_eq!(row.ef_kg_kwh, sig6(r.ef));
        assert_eq!(row.emissions_mt, sig6(r.emissions));
        assert_eq!(row.cumulative_mt, sig6(r.cumulative));
    }
}

#[test]
fn bundled_trajectory_round_trips_through_core_parser() {
    let path = Path::new(BUNDLED_DATA_DIR).join("trajectory_s550.csv");
    let text = std::fs::read_to_string(path).unwrap();
    let table = parse_trajectory(text.as_bytes(), "trajectory_s550.csv").unwrap();
    let mut rendered = String::from("year_offset,normalized_intensity\n");
    for p in table.points() {
        rendered.push_str(&format!(
            "{},{}\n",
            p.year_offset,
            minecast::output::fmt_num(p.intensity)
        ));
    }
    assert_eq!(
        parse_trajectory(rendered.as_bytes(), "again").unwrap(),
        table
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn issuance_section_round_trips(height in 1u64..6_000_000, bpy in 1_000u64..100_000) {
        let section = minecast::config::IssuanceSection { height_at_t0: height, blocks_per_year: bpy, minted_at_t0: None };
        let json = serde_json::to_string(&section).unwrap();
        let back: minecast::config::IssuanceSection = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, section);
        let p = minecast::config::issuance(&back).unwrap();
        prop_assert_eq!(p, IssuanceParams::at_height(height, bpy));
    }
}
