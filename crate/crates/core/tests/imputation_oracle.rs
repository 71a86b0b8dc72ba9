use std::collections::BTreeMap;

use minecast_core::carbon::{
    impute_regional_hashrates, network_distribution, pool_weights, PoolReport,
};

fn map(entries: &[(&str, f64)]) -> BTreeMap<String, f64> {
    entries.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn donor(id: &str, blocks: u64, provinces: &[(&str, f64)], world: &[(&str, f64)]) -> PoolReport {
    let provinces = map(provinces);
    let world = map(world);
    let mut r = PoolReport::new(id, blocks, provinces.values().sum(), world.values().sum());
    r.provinces = Some(provinces);
    r.world_regions = Some(world);
    r
}

#[test]
fn three_heterogeneous_donors() {
    let reports = vec![
        donor(
            "A",
            30,
            &[("Sichuan", 600.0), ("Xinjiang", 100.0)],
            &[("US", 50.0)],
        ),
        donor(
            "B",
            20,
            &[("Xinjiang", 300.0), ("Yunnan", 50.0)],
            &[("RU", 80.0), ("US", 20.0)],
        ),
        donor(
            "C",
            10,
            &[("Neimenggu", 40.0), ("Sichuan", 10.0)],
            &[("KZ", 10.0)],
        ),
        PoolReport::new("D", 40, 500.0, 120.0),
    ];

    // pooled donor oracle: sum of donor province hash rates over sum of donor
    // China hash rates
    let donors = &reports[..3];
    let donor_china: f64 = donors.iter().map(|r| r.china_hashrate).sum();
    let mut pooled: BTreeMap<String, f64> = BTreeMap::new();
    for r in donors {
        for (k, v) in r.provinces.as_ref().unwrap() {
            *pooled.entry(k.clone()).or_default() += v;
        }
    }

    let imputed = impute_regional_hashrates(&reports).unwrap();
    let d = &imputed[3];
    let provinces = d.provinces.as_ref().unwrap();
    assert_eq!(provinces.len(), pooled.len());
    for (k, v) in &pooled {
        let expected = 500.0 * v / donor_china;
        assert!((provinces[k] - expected).abs() < 1e-9 * expected, "{k}");
    }
    let total: f64 = provinces.values().sum();
    assert!((total - 500.0).abs() < 1e-9 * 500.0);

    let world: f64 = d.world_regions.as_ref().unwrap().values().sum();
    assert!((world - 120.0).abs() < 1e-9 * 120.0);

    // donors are untouched
    assert_eq!(&imputed[..3], donors);

    let dist = network_distribution(&imputed, &pool_weights(&reports).unwrap()).unwrap();
    assert!((dist.total() - 1.0).abs() < 1e-12);
}
