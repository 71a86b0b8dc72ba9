//! Deterministic coin issuance.
//!
//! The block reward starts at `initial_reward` and halves every
//! `halving_interval` blocks. Blocks are mapped onto calendar years at a fixed
//! rate of `blocks_per_year`, starting from `height_at_t0` on January 1 of the
//! base year (t = 0).
//!
//! All sums are carried out exactly in integer units of
//! `initial_reward * 2^-64`; every non-clamped reward is a power of two in
//! those units, so yearly and cumulative issuance do not depend on summation
//! order. Conversion to BTC happens once, at the end.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One satoshi. Rewards below this are treated as zero.
pub const SATOSHI: f64 = 1e-8;

/// Hard cap on the number of coins ever issued.
pub const MAX_SUPPLY_BTC: f64 = 21_000_000.0;

const UNIT_SHIFT: u32 = 64;

/// Issuance schedule and its anchoring to the calendar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IssuanceParams {
    /// Reward of the first epoch, BTC per block.
    pub initial_reward: f64,
    /// Blocks per halving epoch.
    pub halving_interval: u64,
    /// Blocks mapped onto each calendar year.
    pub blocks_per_year: u64,
    /// Height of the first block of year t = 0.
    pub height_at_t0: u64,
    /// Coins in circulation at the start of year t = 0, i.e. Q(0).
    pub minted_at_t0: f64,
}

impl Default for IssuanceParams {
    /// Observed-rate calendar: 146 blocks per day, first block of 2020 at
    /// height 610,691, and the supply at that height derived from the schedule.
    fn default() -> Self {
        Self::at_height(610_691, 146 * 365)
    }
}

impl IssuanceParams {
    pub const INITIAL_REWARD: f64 = 50.0;
    pub const HALVING_INTERVAL: u64 = 210_000;

    /// Bitcoin's schedule anchored at `height_at_t0`, with `minted_at_t0` set
    /// to exactly what the schedule has issued below that height.
    pub fn at_height(height_at_t0: u64, blocks_per_year: u64) -> Self {
        let mut params = Self {
            initial_reward: Self::INITIAL_REWARD,
            halving_interval: Self::HALVING_INTERVAL,
            blocks_per_year,
            height_at_t0,
            minted_at_t0: 0.0,
        };
        params.minted_at_t0 = params.units_to_btc(params.units_in_range(0, height_at_t0));
        params
    }

    /// Protocol design rate of 144 blocks per day (52,560 per year) anchored
    /// at height 610,000.
    pub fn nominal_calendar() -> Self {
        Self::at_height(610_000, 144 * 365)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.initial_reward.is_finite() && self.initial_reward > 0.0) {
            return Err(Error::param("initial_reward", "must be positive"));
        }
        if self.halving_interval == 0 {
            return Err(Error::param("halving_interval", "must be positive"));
        }
        if self.blocks_per_year == 0 {
            return Err(Error::param("blocks_per_year", "must be positive"));
        }
        if self.height_at_t0 == 0 {
            return Err(Error::param("height_at_t0", "must be positive"));
        }
        if !(self.minted_at_t0.is_finite() && self.minted_at_t0 > 0.0) {
            return Err(Error::param("minted_at_t0", "must be positive"));
        }
        if self.minted_at_t0 >= MAX_SUPPLY_BTC {
            return Err(Error::param("minted_at_t0", "must be below 21,000,000 BTC"));
        }
        let remaining = self.units_to_btc(self.units_in_range(self.height_at_t0, u64::MAX));
        if self.minted_at_t0 + remaining > MAX_SUPPLY_BTC * (1.0 + 1e-12) {
            return Err(Error::param(
                "minted_at_t0",
                format!(
                    "{} BTC plus the {remaining} BTC still to be issued after height {} exceeds the 21,000,000 BTC cap",
                    self.minted_at_t0, self.height_at_t0
                ),
            ));
        }
        Ok(())
    }

    fn epoch_units(&self, epoch: u64) -> u128 {
        if epoch >= u64::from(UNIT_SHIFT) {
            return 0;
        }
        let reward = self.initial_reward * 0.5f64.powi(epoch as i32);
        if reward < SATOSHI {
            0
        } else {
            1u128 << (UNIT_SHIFT - epoch as u32)
        }
    }

    /// Issuance over heights `[start, end)` in exact units.
    fn units_in_range(&self, start: u64, end: u64) -> u128 {
        if end <= start {
            return 0;
        }
        let mut total = 0u128;
        let mut epoch = start / self.halving_interval;
        while let Some(epoch_start) = epoch.checked_mul(self.halving_interval) {
            if epoch_start >= end {
                break;
            }
            let units = self.epoch_units(epoch);
            if units == 0 {
                // rewards never come back once clamped
                break;
            }
            let lo = start.max(epoch_start);
            let hi = end.min(epoch_start.saturating_add(self.halving_interval));
            total += u128::from(hi - lo) * units;
            epoch += 1;
        }
        total
    }

    fn units_to_btc(&self, units: u128) -> f64 {
        units as f64 * 0.5f64.powi(UNIT_SHIFT as i32) * self.initial_reward
    }

    fn year_window(&self, t: u32) -> (u64, u64) {
        let start = self.height_at_t0 + u64::from(t) * self.blocks_per_year;
        (start, start + self.blocks_per_year)
    }

    /// Block reward in BTC at `height`.
    pub fn reward_at_height(&self, height: u64) -> f64 {
        self.units_to_btc(self.epoch_units(height / self.halving_interval))
    }

    /// q(t): coins minted during year `t`.
    pub fn coins_minted_in_year(&self, t: u32) -> f64 {
        let (start, end) = self.year_window(t);
        self.units_to_btc(self.units_in_range(start, end))
    }

    /// Q(t) = Q(0) + sum of q(u) for u in 1..=t.
    pub fn cumulative_supply(&self, t: u32) -> f64 {
        if t == 0 {
            return self.minted_at_t0;
        }
        let (start, _) = self.year_window(1);
        let (_, end) = self.year_window(t);
        self.minted_at_t0 + self.units_to_btc(self.units_in_range(start, end))
    }

    /// First year offset from which q(t) is zero for good.
    pub fn last_issuance_year(&self) -> Option<u32> {
        let mut epoch = 0u64;
        while self.epoch_units(epoch) != 0 {
            epoch += 1;
        }
        let end_height = epoch * self.halving_interval;
        if end_height <= self.height_at_t0 {
            return Some(0);
        }
        let years = (end_height - self.height_at_t0).div_ceil(self.blocks_per_year);
        u32::try_from(years).ok()
    }
}

/// q(t) and Q(t) tabulated for t in `0..=last`.
#[derive(Debug, Clone)]
pub struct SupplyTable {
    minted: Vec<f64>,
    cumulative: Vec<f64>,
}

impl SupplyTable {
    pub fn new(params: &IssuanceParams, last: u32) -> Self {
        let mut minted = Vec::with_capacity(last as usize + 1);
        let mut cumulative = Vec::with_capacity(last as usize + 1);
        let mut since_t0 = 0u128;
        for t in 0..=last {
            let (start, end) = params.year_window(t);
            let units = params.units_in_range(start, end);
            minted.push(params.units_to_btc(units));
            if t == 0 {
                cumulative.push(params.minted_at_t0);
            } else {
                since_t0 += units;
                cumulative.push(params.minted_at_t0 + params.units_to_btc(since_t0));
            }
        }
        Self { minted, cumulative }
    }

    pub fn last_year(&self) -> u32 {
        (self.minted.len() - 1) as u32
    }

    pub fn minted(&self, t: u32) -> f64 {
        self.minted[t as usize]
    }

    pub fn cumulative(&self, t: u32) -> f64 {
        self.cumulative[t as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reward_examples() {
        let p = IssuanceParams::default();
        assert_eq!(p.reward_at_height(0), 50.0);
        assert_eq!(p.reward_at_height(630_000), 6.25);
        assert_eq!(p.reward_at_height(629_999), 12.5);
        assert_eq!(p.reward_at_height(210_000 * 33), 0.0);
        // 50 / 2^32 is still one satoshi
        assert!(p.reward_at_height(210_000 * 32) > 0.0);
    }

    #[test]
    fn full_year_in_one_epoch() {
        // nominal calendar, t = 1 covers heights [662_560, 715_120) inside epoch 3
        let p = IssuanceParams::nominal_calendar();
        assert_eq!(p.coins_minted_in_year(1), 328_500.0);
    }

    #[test]
    fn far_future_years_are_empty() {
        let p = IssuanceParams::default();
        assert_eq!(p.coins_minted_in_year(200), 0.0);
        let last = p.last_issuance_year().unwrap();
        assert_eq!(p.coins_minted_in_year(last), 0.0);
        assert!(p.coins_minted_in_year(last - 1) > 0.0);
    }

    #[test]
    fn straddling_year_splits_at_the_boundary() {
        // default calendar: 19,309 blocks at 12.5 then 33,981 at 6.25
        let p = IssuanceParams::default();
        assert_eq!(p.coins_minted_in_year(0), 19_309.0 * 12.5 + 33_981.0 * 6.25);
    }

    #[test]
    fn cumulative_starts_at_t0_supply() {
        let p = IssuanceParams::default();
        assert_eq!(p.cumulative_supply(0), p.minted_at_t0);
        assert_eq!(p.minted_at_t0, 15_750_000.0 + 190_691.0 * 12.5);
    }

    #[test]
    fn validation_rejects_inconsistent_supply() {
        let mut p = IssuanceParams::nominal_calendar();
        p.minted_at_t0 = 18_150_000.0;
        assert!(p.validate().is_err());
        p.minted_at_t0 = 18_125_000.0;
        assert!(p.validate().is_ok());
        p.blocks_per_year = 0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn table_matches_direct_queries() {
        let p = IssuanceParams::default();
        let table = SupplyTable::new(&p, 150);
        for t in 0..=150 {
            assert_eq!(table.minted(t), p.coins_minted_in_year(t));
            assert_eq!(table.cumulative(t), p.cumulative_supply(t));
        }
    }

    proptest! {
        #[test]
        fn reward_is_nonincreasing(a in 0u64..20_000_000, b in 0u64..20_000_000) {
            let p = IssuanceParams::default();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(p.reward_at_height(lo) >= p.reward_at_height(hi));
        }

        #[test]
        fn reward_constant_within_epoch(h in 0u64..10_000_000) {
            let p = IssuanceParams::default();
            let epoch_start = h / 210_000 * 210_000;
            prop_assert_eq!(p.reward_at_height(h), p.reward_at_height(epoch_start));
        }

        #[test]
        fn telescoping(t in 0u32..140) {
            let p = IssuanceParams::default();
            let step = p.cumulative_supply(t + 1) - p.cumulative_supply(t);
            let q = p.coins_minted_in_year(t + 1);
            // one rounding of Q dominates
            prop_assert!((step - q).abs() <= 4.0 * f64::EPSILON * p.cumulative_supply(t + 1));
            prop_assert!(p.cumulative_supply(t + 1) >= p.cumulative_supply(t));
            prop_assert!(p.cumulative_supply(t) <= MAX_SUPPLY_BTC);
        }
    }
}
