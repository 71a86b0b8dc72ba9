//! Hash-rate geography and the hash-rate-weighted emission factor EF(0).
//!
//! Pools report aggregate hash rate for China and the rest of the world; some
//! of them also break those aggregates down by Chinese province or by world
//! region. Missing breakdowns are imputed from the pooled profile of the pools
//! that do report one, pool shares are weighted by blocks mined, and the
//! resulting network distribution weights regional grid intensities.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Side};

/// Relative slack allowed when a breakdown is checked against its aggregate.
const AGGREGATE_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    ChineseProvince,
    WorldRegion,
}

/// Grid emission intensity of one region, kg CO2 per kWh at `vintage_year`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionEmissionFactor {
    pub region_id: String,
    pub kind: RegionKind,
    pub ef: f64,
    pub vintage_year: i32,
}

impl RegionEmissionFactor {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=2.0).contains(&self.ef) {
            return Err(Error::param(
                "ef",
                format!(
                    "{} kg/kWh for `{}` is outside [0, 2]",
                    self.ef, self.region_id
                ),
            ));
        }
        if !(2000..=2030).contains(&self.vintage_year) {
            return Err(Error::param(
                "vintage_year",
                format!(
                    "{} for `{}` is outside [2000, 2030]",
                    self.vintage_year, self.region_id
                ),
            ));
        }
        Ok(())
    }
}

/// A Chinese regional grid: its operating-margin factor, coal share and the
/// provinces it serves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChinaGridRecord {
    pub grid_id: String,
    /// kg CO2 per kWh.
    pub om_factor: f64,
    pub coal_share: f64,
    pub member_provinces: Vec<String>,
}

impl ChinaGridRecord {
    pub fn validate(&self) -> Result<()> {
        if !(self.om_factor.is_finite() && self.om_factor > 0.0) {
            return Err(Error::param(
                "om_factor",
                format!("must be positive for grid `{}`", self.grid_id),
            ));
        }
        if !(0.0..=1.0).contains(&self.coal_share) {
            return Err(Error::param(
                "coal_share",
                format!("must lie in [0, 1] for grid `{}`", self.grid_id),
            ));
        }
        if self.member_provinces.is_empty() {
            return Err(Error::param(
                "provinces",
                format!("grid `{}` lists no provinces", self.grid_id),
            ));
        }
        Ok(())
    }
}

/// Vintage of the provincial operating-margin data.
pub const CHINA_GRID_VINTAGE: i32 = 2017;

/// Every member province receives `om_factor * coal_share`.
pub fn china_province_ef(grid: &ChinaGridRecord, vintage_year: i32) -> Vec<RegionEmissionFactor> {
    let ef = grid.om_factor * grid.coal_share;
    grid.member_provinces
        .iter()
        .map(|p| RegionEmissionFactor {
            region_id: p.clone(),
            kind: RegionKind::ChineseProvince,
            ef,
            vintage_year,
        })
        .collect()
}

/// Province emission factors for a whole grid partition. Each province must
/// belong to exactly one grid.
pub fn china_province_efs(
    grids: &[ChinaGridRecord],
    vintage_year: i32,
) -> Result<Vec<RegionEmissionFactor>> {
    let mut seen = BTreeMap::new();
    let mut out = Vec::new();
    for grid in grids {
        grid.validate()?;
        for province in &grid.member_provinces {
            if let Some(other) = seen.insert(province.clone(), grid.grid_id.clone()) {
                return Err(Error::dataset(
                    "ef_china_grids",
                    format!(
                        "province `{province}` belongs to both `{other}` and `{}`",
                        grid.grid_id
                    ),
                ));
            }
        }
        out.extend(china_province_ef(grid, vintage_year));
    }
    Ok(out)
}

/// Generation-weighted mean of provincial emission factors.
pub fn generation_weighted_mean(
    provinces: &[RegionEmissionFactor],
    generation_twh: &BTreeMap<String, f64>,
) -> Result<f64> {
    let mut weighted = 0.0;
    let mut total = 0.0;
    for p in provinces {
        let gen = generation_twh.get(&p.region_id).ok_or_else(|| {
            Error::dataset(
                "china_generation",
                format!("no generation figure for province `{}`", p.region_id),
            )
        })?;
        weighted += p.ef * gen;
        total += gen;
    }
    if total <= 0.0 {
        return Err(Error::dataset(
            "china_generation",
            "total generation is zero",
        ));
    }
    Ok(weighted / total)
}

/// Known region labels and which side of the China/rest-of-world split they
/// sit on.
#[derive(Debug, Clone, Default)]
pub struct RegionCatalog {
    kinds: BTreeMap<String, RegionKind>,
}

impl RegionCatalog {
    pub fn from_factors<'a>(
        factors: impl IntoIterator<Item = &'a RegionEmissionFactor>,
    ) -> Result<Self> {
        let mut kinds = BTreeMap::new();
        for f in factors {
            match kinds.insert(f.region_id.clone(), f.kind) {
                Some(kind) if kind != f.kind => {
                    return Err(Error::dataset(
                        "emission factors",
                        format!(
                            "region `{}` is both a Chinese province and a world region",
                            f.region_id
                        ),
                    ))
                }
                _ => {}
            }
        }
        Ok(Self { kinds })
    }

    pub fn kind(&self, region: &str) -> Result<RegionKind> {
        self.kinds
            .get(region)
            .copied()
            .ok_or_else(|| Error::UnknownRegion(region.to_string()))
    }
}

/// One mining pool's hash-rate report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolReport {
    pub pool_id: String,
    pub blocks_mined: u64,
    pub china_hashrate: f64,
    pub row_hashrate: f64,
    /// Breakdown of `china_hashrate` by province, when reported.
    pub provinces: Option<BTreeMap<String, f64>>,
    /// Breakdown of `row_hashrate` by world region, when reported.
    pub world_regions: Option<BTreeMap<String, f64>>,
}

impl PoolReport {
    pub fn new(
        pool_id: impl Into<String>,
        blocks_mined: u64,
        china_hashrate: f64,
        row_hashrate: f64,
    ) -> Self {
        Self {
            pool_id: pool_id.into(),
            blocks_mined,
            china_hashrate,
            row_hashrate,
            provinces: None,
            world_regions: None,
        }
    }

    fn invalid(&self, message: impl Into<String>) -> Error {
        Error::InvalidPool {
            pool: self.pool_id.clone(),
            message: message.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("china_hashrate", self.china_hashrate),
            ("row_hashrate", self.row_hashrate),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(self.invalid(format!("{name} must be non-negative")));
            }
        }
        if self.china_hashrate + self.row_hashrate <= 0.0 {
            return Err(self.invalid("total hash rate must be positive"));
        }
        for (side, map, aggregate) in [
            (Side::China, &self.provinces, self.china_hashrate),
            (Side::RestOfWorld, &self.world_regions, self.row_hashrate),
        ] {
            let Some(map) = map else { continue };
            let mut sum = 0.0;
            for (region, v) in map {
                if !(v.is_finite() && *v >= 0.0) {
                    return Err(
                        self.invalid(format!("hash rate for `{region}` must be non-negative"))
                    );
                }
                sum += v;
            }
            if sum > aggregate * (1.0 + AGGREGATE_SLACK) {
                return Err(self.invalid(format!(
                    "{side} breakdown sums to {sum}, above the aggregate {aggregate}"
                )));
            }
        }
        Ok(())
    }

    pub fn is_disaggregated(&self) -> bool {
        self.provinces.is_some() && self.world_regions.is_some()
    }
}

/// w_i: each pool's share of the blocks mined by all reporting pools.
pub fn pool_weights(reports: &[PoolReport]) -> Result<BTreeMap<String, f64>> {
    if reports.is_empty() {
        return Err(Error::dataset("pools", "no pool reports"));
    }
    let total: u64 = reports.iter().map(|r| r.blocks_mined).sum();
    if total == 0 {
        return Err(Error::dataset("pools", "no pool has mined any blocks"));
    }
    let mut weights = BTreeMap::new();
    for r in reports {
        if weights
            .insert(r.pool_id.clone(), r.blocks_mined as f64 / total as f64)
            .is_some()
        {
            return Err(Error::dataset(
                "pools",
                format!("duplicate pool `{}`", r.pool_id),
            ));
        }
    }
    Ok(weights)
}

fn side_map(report: &PoolReport, side: Side) -> (&Option<BTreeMap<String, f64>>, f64) {
    match side {
        Side::China => (&report.provinces, report.china_hashrate),
        Side::RestOfWorld => (&report.world_regions, report.row_hashrate),
    }
}

/// Pooled regional profile of all donors on one side, normalized to sum to 1.
fn donor_profile(reports: &[PoolReport], side: Side) -> Option<BTreeMap<String, f64>> {
    let mut pooled: BTreeMap<String, f64> = BTreeMap::new();
    for r in reports {
        if let (Some(map), _) = side_map(r, side) {
            for (region, v) in map {
                *pooled.entry(region.clone()).or_default() += v;
            }
        }
    }
    let total: f64 = pooled.values().sum();
    if total <= 0.0 {
        return None;
    }
    for v in pooled.values_mut() {
        *v /= total;
    }
    Some(pooled)
}

/// Fills in every missing breakdown from the pooled donor profile, so that the
/// imputed regions of pool i sum to its aggregate for that side. Reports that
/// already carry a breakdown keep it unchanged.
pub fn impute_regional_hashrates(reports: &[PoolReport]) -> Result<Vec<PoolReport>> {
    for r in reports {
        r.validate()?;
    }
    let mut out = reports.to_vec();
    for side in [Side::China, Side::RestOfWorld] {
        let needs_donor = reports.iter().any(|r| {
            let (map, aggregate) = side_map(r, side);
            map.is_none() && aggregate > 0.0
        });
        let profile = if needs_donor {
            Some(donor_profile(reports, side).ok_or(Error::NoDonors(side))?)
        } else {
            None
        };
        for r in &mut out {
            let (map, aggregate) = side_map(r, side);
            if map.is_some() {
                continue;
            }
            let imputed: BTreeMap<String, f64> = match &profile {
                Some(profile) if aggregate > 0.0 => profile
                    .iter()
                    .map(|(region, share)| (region.clone(), aggregate * share))
                    .collect(),
                _ => BTreeMap::new(),
            };
            match side {
                Side::China => r.provinces = Some(imputed),
                Side::RestOfWorld => r.world_regions = Some(imputed),
            }
        }
    }
    Ok(out)
}

/// Network-wide share of hash rate per region.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HashRateDistribution {
    pub shares: BTreeMap<String, f64>,
    /// Regions that are Chinese provinces.
    pub china_regions: BTreeSet<String>,
}

impl HashRateDistribution {
    pub fn total(&self) -> f64 {
        self.shares.values().sum()
    }

    /// Aggregate share of all Chinese provinces.
    pub fn china_share(&self) -> f64 {
        self.shares
            .iter()
            .filter(|(region, _)| self.china_regions.contains(*region))
            .map(|(_, s)| s)
            .sum()
    }
}

/// s_j = sum_i w_i s_ij, with s_ij = HR_ij / sum_j HR_ij.
pub fn network_distribution(
    reports: &[PoolReport],
    weights: &BTreeMap<String, f64>,
) -> Result<HashRateDistribution> {
    let mut dist = HashRateDistribution::default();
    let mut world = BTreeSet::new();
    for r in reports {
        let (Some(provinces), Some(regions)) = (&r.provinces, &r.world_regions) else {
            return Err(r.invalid("regional breakdown is incomplete; impute it first"));
        };
        let weight = *weights
            .get(&r.pool_id)
            .ok_or_else(|| r.invalid("no pool weight"))?;
        let total: f64 = provinces.values().chain(regions.values()).sum();
        if total <= 0.0 {
            return Err(r.invalid("regional hash rates sum to zero"));
        }
        for (region, hr) in provinces {
            dist.china_regions.insert(region.clone());
            *dist.shares.entry(region.clone()).or_default() += weight * hr / total;
        }
        for (region, hr) in regions {
            world.insert(region.clone());
            *dist.shares.entry(region.clone()).or_default() += weight * hr / total;
        }
    }
    if let Some(region) = dist.china_regions.intersection(&world).next() {
        return Err(Error::dataset(
            "pool_regions",
            format!("region `{region}` appears both as a province and as a world region"),
        ));
    }
    Ok(dist)
}

/// Scales every factor from its vintage to `to_year` at a constant annual
/// reduction rate and averages them with the hash-rate shares.
pub fn weighted_ef0(
    dist: &HashRateDistribution,
    factors: &[RegionEmissionFactor],
    scale_rate: f64,
    to_year: i32,
) -> Result<f64> {
    if !(0.0..1.0).contains(&scale_rate) {
        return Err(Error::param("ef_scale_rate", "must lie in [0, 1)"));
    }
    let mut by_region = BTreeMap::new();
    for f in factors {
        f.validate()?;
        if by_region.insert(f.region_id.as_str(), f).is_some() {
            return Err(Error::dataset(
                "emission factors",
                format!("duplicate emission factor for `{}`", f.region_id),
            ));
        }
    }
    let mut ef0 = 0.0;
    for (region, share) in &dist.shares {
        if *share <= 0.0 {
            continue;
        }
        let f = by_region
            .get(region.as_str())
            .ok_or_else(|| Error::MissingEmissionFactor(region.clone()))?;
        let scaled = f.ef * (1.0 - scale_rate).powi(to_year - f.vintage_year);
        ef0 += scaled * share;
    }
    Ok(ef0)
}

/// Annual intensity reduction used to bring every emission factor to the base
/// year.
pub const EF_SCALE_RATE: f64 = 0.007;

/// EF(0) together with the distribution it was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ef0Estimate {
    pub ef0: f64,
    pub china_share: f64,
    pub distribution: HashRateDistribution,
    pub weights: BTreeMap<String, f64>,
}

/// Weights, imputation, distribution and the weighted factor in one pass.
pub fn estimate_ef0(
    reports: &[PoolReport],
    factors: &[RegionEmissionFactor],
    scale_rate: f64,
    to_year: i32,
) -> Result<Ef0Estimate> {
    let weights = pool_weights(reports)?;
    let imputed = impute_regional_hashrates(reports)?;
    let distribution = network_distribution(&imputed, &weights)?;
    let ef0 = weighted_ef0(&distribution, factors, scale_rate, to_year)?;
    Ok(Ef0Estimate {
        ef0,
        china_share: distribution.china_share(),
        distribution,
        weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(entries: &[(&str, f64)]) -> BTreeMap<String, f64> {
        entries.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn world_ef(region: &str, ef: f64, vintage: i32) -> RegionEmissionFactor {
        RegionEmissionFactor {
            region_id: region.into(),
            kind: RegionKind::WorldRegion,
            ef,
            vintage_year: vintage,
        }
    }

    #[test]
    fn weights_are_block_proportions() {
        let single = [PoolReport::new("a", 10, 1.0, 1.0)];
        assert_eq!(pool_weights(&single).unwrap()["a"], 1.0);

        let two = [
            PoolReport::new("a", 300, 1.0, 1.0),
            PoolReport::new("b", 100, 1.0, 1.0),
        ];
        let w = pool_weights(&two).unwrap();
        assert_eq!(w["a"], 0.75);
        assert_eq!(w["b"], 0.25);

        let none = [PoolReport::new("a", 0, 1.0, 1.0)];
        assert!(pool_weights(&none).is_err());
    }

    #[test]
    fn proportional_province_split() {
        let mut donor = PoolReport::new("donor", 1, 50.0, 0.0);
        donor.provinces = Some(map(&[("Sichuan", 30.0), ("Xinjiang", 20.0)]));
        let target = PoolReport::new("target", 1, 100.0, 0.0);
        let out = impute_regional_hashrates(&[donor.clone(), target]).unwrap();
        let imputed = out[1].provinces.as_ref().unwrap();
        assert!((imputed["Sichuan"] - 60.0).abs() < 1e-12);
        assert!((imputed["Xinjiang"] - 40.0).abs() < 1e-12);
        assert_eq!(out[0].provinces, donor.provinces);
        assert_eq!(out[1].world_regions, Some(BTreeMap::new()));
    }

    #[test]
    fn missing_donor_side_is_reported() {
        let mut a = PoolReport::new("a", 1, 10.0, 5.0);
        a.provinces = Some(map(&[("Sichuan", 10.0)]));
        let err = impute_regional_hashrates(&[a]).unwrap_err();
        assert!(matches!(err, Error::NoDonors(Side::RestOfWorld)));
    }

    #[test]
    fn breakdown_above_aggregate_is_rejected() {
        let mut a = PoolReport::new("a", 1, 10.0, 0.0);
        a.provinces = Some(map(&[("Sichuan", 11.0)]));
        assert!(a.validate().is_err());
    }

    #[test]
    fn distribution_examples() {
        let mut one = PoolReport::new("a", 5, 0.0, 10.0);
        one.provinces = Some(BTreeMap::new());
        one.world_regions = Some(map(&[("US", 10.0)]));
        let w = pool_weights(std::slice::from_ref(&one)).unwrap();
        let d = network_distribution(&[one], &w).unwrap();
        assert_eq!(d.shares, map(&[("US", 1.0)]));

        let mut a = PoolReport::new("a", 5, 0.0, 10.0);
        a.provinces = Some(BTreeMap::new());
        a.world_regions = Some(map(&[("A", 10.0)]));
        let mut b = PoolReport::new("b", 5, 0.0, 3.0);
        b.provinces = Some(BTreeMap::new());
        b.world_regions = Some(map(&[("B", 3.0)]));
        let reports = [a, b];
        let d = network_distribution(&reports, &pool_weights(&reports).unwrap()).unwrap();
        assert_eq!(d.shares, map(&[("A", 0.5), ("B", 0.5)]));
        assert_eq!(d.china_share(), 0.0);
    }

    #[test]
    fn undisaggregated_pool_is_rejected() {
        let a = PoolReport::new("a", 5, 1.0, 1.0);
        let w = pool_weights(std::slice::from_ref(&a)).unwrap();
        assert!(network_distribution(&[a], &w).is_err());
    }

    #[test]
    fn province_factor_is_om_times_coal() {
        let grid = ChinaGridRecord {
            grid_id: "G".into(),
            om_factor: 1.0,
            coal_share: 0.7,
            member_provinces: vec!["P1".into(), "P2".into()],
        };
        let efs = china_province_ef(&grid, CHINA_GRID_VINTAGE);
        assert_eq!(efs.len(), 2);
        assert!(efs.iter().all(|e| e.ef == 0.7 && e.vintage_year == 2017));

        let hydro = ChinaGridRecord {
            coal_share: 0.0,
            ..grid.clone()
        };
        assert_eq!(china_province_ef(&hydro, 2017)[0].ef, 0.0);
    }

    #[test]
    fn province_in_two_grids_is_rejected() {
        let g1 = ChinaGridRecord {
            grid_id: "G1".into(),
            om_factor: 1.0,
            coal_share: 0.5,
            member_provinces: vec!["P".into()],
        };
        let g2 = ChinaGridRecord {
            grid_id: "G2".into(),
            ..g1.clone()
        };
        assert!(china_province_efs(&[g1, g2], 2017).is_err());
    }

    #[test]
    fn ef0_examples() {
        let dist = HashRateDistribution {
            shares: map(&[("X", 1.0)]),
            china_regions: BTreeSet::new(),
        };
        let ef = weighted_ef0(&dist, &[world_ef("X", 0.5, 2020)], 0.007, 2020).unwrap();
        assert_eq!(ef, 0.5);
        let ef = weighted_ef0(&dist, &[world_ef("X", 0.5, 2017)], 0.007, 2020).unwrap();
        assert!((ef - 0.5 * 0.993f64.powi(3)).abs() < 1e-15);

        let err = weighted_ef0(&dist, &[world_ef("Y", 0.5, 2017)], 0.007, 2020).unwrap_err();
        assert!(matches!(err, Error::MissingEmissionFactor(r) if r == "X"));
    }

    #[test]
    fn catalog_knows_kinds() {
        let factors = [
            world_ef("US", 0.4, 2017),
            RegionEmissionFactor {
                region_id: "Sichuan".into(),
                kind: RegionKind::ChineseProvince,
                ef: 0.4,
                vintage_year: 2017,
            },
        ];
        let cat = RegionCatalog::from_factors(&factors).unwrap();
        assert_eq!(cat.kind("Sichuan").unwrap(), RegionKind::ChineseProvince);
        assert!(matches!(cat.kind("Atlantis"), Err(Error::UnknownRegion(_))));
    }

    #[test]
    fn generation_weighting() {
        let efs = [
            RegionEmissionFactor {
                region_id: "A".into(),
                kind: RegionKind::ChineseProvince,
                ef: 1.0,
                vintage_year: 2017,
            },
            RegionEmissionFactor {
                region_id: "B".into(),
                kind: RegionKind::ChineseProvince,
                ef: 0.0,
                vintage_year: 2017,
            },
        ];
        let m = generation_weighted_mean(&efs, &map(&[("A", 3.0), ("B", 1.0)])).unwrap();
        assert_eq!(m, 0.75);
        assert!(generation_weighted_mean(&efs, &map(&[("A", 3.0)])).is_err());
    }
}
