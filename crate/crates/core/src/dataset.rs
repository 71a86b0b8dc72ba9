//! CSV readers for the model inputs. Every error names the file it came from.
//!
//! Formats (header row required, UTF-8, '.' decimal separator):
//!
//! | file | columns |
//! |------|---------|
//! | hardware | `name,release_year,efficiency_j_per_th,hashrate_ths,price_usd,electricity_price_usd_kwh,interest_rate,lifespan_years` |
//! | `pools.csv` | `pool_id,blocks_mined,china_hashrate,row_hashrate` |
//! | `pool_regions.csv` (optional) | `pool_id,region_id,hashrate` |
//! | `ef_world.csv` | `region_id,ef_kg_per_kwh,vintage_year` |
//! | `ef_china_grids.csv` | `grid_id,om_factor,coal_share,provinces` (';'-separated) |
//! | `china_generation.csv` | `province,generation_twh` |
//! | `trajectory_<name>.csv` | `year_offset,normalized_intensity` |

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::carbon::{
    china_province_efs, estimate_ef0, generation_weighted_mean, ChinaGridRecord, Ef0Estimate,
    IntensityTable, PoolReport, RegionCatalog, RegionEmissionFactor, RegionKind, TablePoint,
    BASE_YEAR, CHINA_GRID_VINTAGE,
};
use crate::energy::HardwareSpec;
use crate::error::{Error, Result};

/// Data shipped with the crate.
pub const BUNDLED_DATA_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data");

pub const HARDWARE_FILE: &str = "hardware_asic.csv";
pub const POOLS_FILE: &str = "pools.csv";
pub const POOL_REGIONS_FILE: &str = "pool_regions.csv";
pub const EF_WORLD_FILE: &str = "ef_world.csv";
pub const EF_CHINA_GRIDS_FILE: &str = "ef_china_grids.csv";
pub const CHINA_GENERATION_FILE: &str = "china_generation.csv";

pub fn trajectory_file(name: &str) -> String {
    format!("trajectory_{name}.csv")
}

fn source_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::dataset(path.display().to_string(), e.to_string()))
}

fn read_rows<T: DeserializeOwned, R: Read>(reader: R, source: &str) -> Result<Vec<T>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    rdr.deserialize()
        .map(|row| row.map_err(|e| Error::dataset(source, e.to_string())))
        .collect()
}

#[derive(Deserialize)]
struct HardwareRow {
    name: String,
    release_year: i32,
    efficiency_j_per_th: f64,
    hashrate_ths: f64,
    price_usd: f64,
    electricity_price_usd_kwh: f64,
    interest_rate: f64,
    lifespan_years: f64,
}

pub fn parse_hardware<R: Read>(reader: R, source: &str) -> Result<Vec<HardwareSpec>> {
    let rows: Vec<HardwareRow> = read_rows(reader, source)?;
    rows.into_iter()
        .map(|r| {
            let spec = HardwareSpec {
                name: r.name,
                release_year: r.release_year,
                efficiency: r.efficiency_j_per_th,
                hashrate: r.hashrate_ths,
                release_price: r.price_usd,
                electricity_price: r.electricity_price_usd_kwh,
                interest_rate: r.interest_rate,
                lifespan: r.lifespan_years,
            };
            spec.validate()
                .map_err(|e| Error::dataset(source, format!("spec `{}`: {e}", spec.name)))?;
            Ok(spec)
        })
        .collect()
}

pub fn read_hardware(path: &Path) -> Result<Vec<HardwareSpec>> {
    parse_hardware(open(path)?, &source_name(path))
}

#[derive(Deserialize)]
struct PoolRow {
    pool_id: String,
    blocks_mined: u64,
    china_hashrate: f64,
    row_hashrate: f64,
}

#[derive(Deserialize)]
struct PoolRegionRow {
    pool_id: String,
    region_id: String,
    hashrate: f64,
}

pub fn parse_pools<R: Read>(reader: R, source: &str) -> Result<Vec<PoolReport>> {
    let rows: Vec<PoolRow> = read_rows(reader, source)?;
    let mut seen = BTreeMap::new();
    let mut out = Vec::with_capacity(rows.len());
    for r in rows {
        if seen.insert(r.pool_id.clone(), ()).is_some() {
            return Err(Error::dataset(
                source,
                format!("duplicate pool `{}`", r.pool_id),
            ));
        }
        out.push(PoolReport::new(
            r.pool_id,
            r.blocks_mined,
            r.china_hashrate,
            r.row_hashrate,
        ));
    }
    Ok(out)
}

/// Attaches per-region rows to their pools. A pool gets a province (or world
/// region) breakdown only if at least one of its rows names a province (or
/// world region); `catalog` decides which is which.
pub fn attach_pool_regions<R: Read>(
    pools: &mut [PoolReport],
    reader: R,
    source: &str,
    catalog: &RegionCatalog,
) -> Result<()> {
    let rows: Vec<PoolRegionRow> = read_rows(reader, source)?;
    for row in rows {
        let pool = pools
            .iter_mut()
            .find(|p| p.pool_id == row.pool_id)
            .ok_or_else(|| Error::dataset(source, format!("unknown pool `{}`", row.pool_id)))?;
        let kind = catalog
            .kind(&row.region_id)
            .map_err(|e| Error::dataset(source, e.to_string()))?;
        let map = match kind {
            RegionKind::ChineseProvince => pool.provinces.get_or_insert_with(BTreeMap::new),
            RegionKind::WorldRegion => pool.world_regions.get_or_insert_with(BTreeMap::new),
        };
        if map.insert(row.region_id.clone(), row.hashrate).is_some() {
            return Err(Error::dataset(
                source,
                format!("pool `{}` lists `{}` twice", row.pool_id, row.region_id),
            ));
        }
    }
    for p in pools.iter() {
        p.validate()
            .map_err(|e| Error::dataset(source, e.to_string()))?;
    }
    Ok(())
}

#[derive(Deserialize)]
struct WorldEfRow {
    region_id: String,
    ef_kg_per_kwh: f64,
    vintage_year: i32,
}

pub fn parse_world_efs<R: Read>(reader: R, source: &str) -> Result<Vec<RegionEmissionFactor>> {
    let rows: Vec<WorldEfRow> = read_rows(reader, source)?;
    rows.into_iter()
        .map(|r| {
            let f = RegionEmissionFactor {
                region_id: r.region_id,
                kind: RegionKind::WorldRegion,
                ef: r.ef_kg_per_kwh,
                vintage_year: r.vintage_year,
            };
            f.validate()
                .map_err(|e| Error::dataset(source, e.to_string()))?;
            Ok(f)
        })
        .collect()
}

#[derive(Deserialize)]
struct GridRow {
    grid_id: String,
    om_factor: f64,
    coal_share: f64,
    provinces: String,
}

pub fn parse_china_grids<R: Read>(reader: R, source: &str) -> Result<Vec<ChinaGridRecord>> {
    let rows: Vec<GridRow> = read_rows(reader, source)?;
    rows.into_iter()
        .map(|r| {
            let grid = ChinaGridRecord {
                grid_id: r.grid_id,
                om_factor: r.om_factor,
                coal_share: r.coal_share,
                member_provinces: r
                    .provinces
                    .split(';')
                    .map(str::trim)
                    .filter(|p| !p.is_empty())
                    .map(String::from)
                    .collect(),
            };
            grid.validate()
                .map_err(|e| Error::dataset(source, e.to_string()))?;
            Ok(grid)
        })
        .collect()
}

#[derive(Deserialize)]
struct GenerationRow {
    province: String,
    generation_twh: f64,
}

pub fn parse_china_generation<R: Read>(reader: R, source: &str) -> Result<BTreeMap<String, f64>> {
    let rows: Vec<GenerationRow> = read_rows(reader, source)?;
    let mut out = BTreeMap::new();
    for r in rows {
        if !(r.generation_twh.is_finite() && r.generation_twh >= 0.0) {
            return Err(Error::dataset(
                source,
                format!("generation for `{}` must be non-negative", r.province),
            ));
        }
        if out.insert(r.province.clone(), r.generation_twh).is_some() {
            return Err(Error::dataset(
                source,
                format!("duplicate province `{}`", r.province),
            ));
        }
    }
    Ok(out)
}

#[derive(Deserialize)]
struct TrajectoryRow {
    year_offset: u32,
    normalized_intensity: f64,
}

pub fn parse_trajectory<R: Read>(reader: R, source: &str) -> Result<IntensityTable> {
    let rows: Vec<TrajectoryRow> = read_rows(reader, source)?;
    let points = rows
        .into_iter()
        .map(|r| TablePoint {
            year_offset: r.year_offset,
            intensity: r.normalized_intensity,
        })
        .collect();
    IntensityTable::new(points).map_err(|e| Error::dataset(source, e.to_string()))
}

pub fn read_trajectory(path: &Path) -> Result<IntensityTable> {
    parse_trajectory(open(path)?, &source_name(path))
}

/// Everything needed to build EF(0), read from one directory.
#[derive(Debug, Clone, PartialEq)]
pub struct EmissionInputs {
    pub pools: Vec<PoolReport>,
    pub world: Vec<RegionEmissionFactor>,
    pub grids: Vec<ChinaGridRecord>,
    pub generation: BTreeMap<String, f64>,
}

impl EmissionInputs {
    /// `pools.csv` and `ef_world.csv` are required; the other files are read
    /// when present.
    pub fn load(dir: &Path) -> Result<Self> {
        let path = |f: &str| dir.join(f);
        let world = parse_world_efs(open(&path(EF_WORLD_FILE))?, EF_WORLD_FILE)?;
        let grids = match path(EF_CHINA_GRIDS_FILE) {
            p if p.exists() => parse_china_grids(open(&p)?, EF_CHINA_GRIDS_FILE)?,
            _ => Vec::new(),
        };
        let generation = match path(CHINA_GENERATION_FILE) {
            p if p.exists() => parse_china_generation(open(&p)?, CHINA_GENERATION_FILE)?,
            _ => BTreeMap::new(),
        };
        let mut inputs = Self {
            pools: parse_pools(open(&path(POOLS_FILE))?, POOLS_FILE)?,
            world,
            grids,
            generation,
        };
        let regions = path(POOL_REGIONS_FILE);
        if regions.exists() {
            let catalog = RegionCatalog::from_factors(&inputs.factors()?)?;
            attach_pool_regions(
                &mut inputs.pools,
                open(&regions)?,
                POOL_REGIONS_FILE,
                &catalog,
            )?;
        }
        Ok(inputs)
    }

    pub fn province_factors(&self) -> Result<Vec<RegionEmissionFactor>> {
        china_province_efs(&self.grids, CHINA_GRID_VINTAGE)
    }

    /// Provincial factors followed by world factors.
    pub fn factors(&self) -> Result<Vec<RegionEmissionFactor>> {
        let mut out = self.province_factors()?;
        out.extend(self.world.iter().cloned());
        Ok(out)
    }

    /// Generation-weighted mean of the provincial factors.
    pub fn china_mean_ef(&self) -> Result<f64> {
        generation_weighted_mean(&self.province_factors()?, &self.generation)
    }

    pub fn estimate(&self, scale_rate: f64) -> Result<Ef0Estimate> {
        estimate_ef0(&self.pools, &self.factors()?, scale_rate, BASE_YEAR)
    }
}

/// Directory holding the bundled datasets unless overridden.
pub fn data_dir(override_dir: Option<&Path>) -> PathBuf {
    override_dir
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(BUNDLED_DATA_DIR))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hardware_row_parses() {
        let csv = "name,release_year,efficiency_j_per_th,hashrate_ths,price_usd,electricity_price_usd_kwh,interest_rate,lifespan_years\n\
                   X,2019,40,50,1000,0.05,0.04,1.5\n";
        let specs = parse_hardware(csv.as_bytes(), "hw.csv").unwrap();
        assert_eq!(specs.len(), 1);
        assert_eq!(specs[0].efficiency, 40.0);
        assert_eq!(specs[0].release_price, 1000.0);
    }

    #[test]
    fn errors_name_the_file() {
        let csv = "name,release_year\nX,abc\n";
        let err = parse_hardware(csv.as_bytes(), "broken.csv").unwrap_err();
        assert!(err.to_string().starts_with("broken.csv"), "{err}");
        let csv = "year_offset,normalized_intensity\n0,1\n10,1.2\n";
        let err = parse_trajectory(csv.as_bytes(), "trajectory_x.csv").unwrap_err();
        assert!(err.to_string().contains("trajectory_x.csv"), "{err}");
    }

    #[test]
    fn grid_provinces_split_on_semicolons() {
        let csv = "grid_id,om_factor,coal_share,provinces\nG,0.9,0.5,A; B;C\n";
        let grids = parse_china_grids(csv.as_bytes(), "g.csv").unwrap();
        assert_eq!(grids[0].member_provinces, vec!["A", "B", "C"]);
    }

    #[test]
    fn regions_are_routed_by_kind() {
        let factors = vec![
            RegionEmissionFactor {
                region_id: "Sichuan".into(),
                kind: RegionKind::ChineseProvince,
                ef: 0.4,
                vintage_year: 2017,
            },
            RegionEmissionFactor {
                region_id: "US".into(),
                kind: RegionKind::WorldRegion,
                ef: 0.45,
                vintage_year: 2017,
            },
        ];
        let catalog = RegionCatalog::from_factors(&factors).unwrap();
        let mut pools = parse_pools(
            "pool_id,blocks_mined,china_hashrate,row_hashrate\nP,10,5,5\n".as_bytes(),
            "p",
        )
        .unwrap();
        attach_pool_regions(
            &mut pools,
            "pool_id,region_id,hashrate\nP,Sichuan,5\nP,US,5\n".as_bytes(),
            "r",
            &catalog,
        )
        .unwrap();
        assert_eq!(pools[0].provinces.as_ref().unwrap()["Sichuan"], 5.0);
        assert_eq!(pools[0].world_regions.as_ref().unwrap()["US"], 5.0);

        let err = attach_pool_regions(
            &mut pools,
            "pool_id,region_id,hashrate\nP,Atlantis,1\n".as_bytes(),
            "r",
            &catalog,
        )
        .unwrap_err();
        assert!(err.to_string().contains("Atlantis"));
    }
}
