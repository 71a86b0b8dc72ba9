//! Market capitalization path, fee ratio and mining revenue.

use serde::{Deserialize, Serialize};

use crate::energy::KWH_PER_TWH;
use crate::error::{Error, Result};
use crate::supply::{IssuanceParams, SupplyTable};

/// V(0), gamma and beta.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketParams {
    /// Market capitalization at t = 0, USD.
    pub v0: f64,
    /// Constant annual growth rate of the market capitalization.
    pub gamma: f64,
    /// On-chain fees per year as a fraction of market capitalization.
    pub beta: f64,
}

impl MarketParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.v0.is_finite() && self.v0 > 0.0) {
            return Err(Error::param("v0", "must be positive"));
        }
        if !(-0.5..=0.5).contains(&self.gamma) {
            return Err(Error::param("gamma", "must lie in [-0.5, 0.5]"));
        }
        if !(0.0..=0.1).contains(&self.beta) {
            return Err(Error::param("beta", "must lie in [0, 0.1]"));
        }
        Ok(())
    }

    /// V(t) = V(0) (1 + gamma)^t
    pub fn market_cap(&self, t: u32) -> f64 {
        self.v0 * (1.0 + self.gamma).powi(t as i32)
    }
}

/// Gold over-the-counter trading statistics used as a proxy for the fee ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoldOtcParams {
    /// Trading volume over market capitalization.
    pub rho: f64,
    /// OTC share of the trading volume.
    pub theta_share: f64,
    /// OTC transaction fee rate.
    pub phi: f64,
}

impl GoldOtcParams {
    /// Gold market figures that give beta = 0.00175914.
    pub const REFERENCE: GoldOtcParams = GoldOtcParams {
        rho: 3.37,
        theta_share: 0.58,
        phi: 0.0009,
    };

    pub fn validate(&self) -> Result<()> {
        if !(self.rho.is_finite() && self.rho > 0.0) {
            return Err(Error::param("rho", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.theta_share) {
            return Err(Error::param("theta_share", "must lie in [0, 1]"));
        }
        if !(0.0..=0.01).contains(&self.phi) {
            return Err(Error::param("phi", "must lie in [0, 0.01]"));
        }
        Ok(())
    }
}

pub fn beta_from_gold(g: &GoldOtcParams) -> f64 {
    g.rho * g.theta_share * g.phi
}

/// Annual mining revenue split by stream, USD per year.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RevenueBreakdown {
    pub block_reward_revenue: f64,
    pub fee_revenue: f64,
    pub total: f64,
}

impl RevenueBreakdown {
    pub fn new(block_reward_revenue: f64, fee_revenue: f64) -> Self {
        Self {
            block_reward_revenue,
            fee_revenue,
            total: block_reward_revenue + fee_revenue,
        }
    }

    pub fn fee_share(&self) -> f64 {
        if self.total == 0.0 {
            0.0
        } else {
            self.fee_revenue / self.total
        }
    }

    /// Same breakdown with the fee stream dropped.
    pub fn rewards_only(&self) -> Self {
        Self::new(self.block_reward_revenue, 0.0)
    }
}

/// R(t) given the year's minted coins q(t) and circulating supply Q(t).
pub(crate) fn revenue_with_supply(
    p: &MarketParams,
    minted: f64,
    cumulative: f64,
    t: u32,
) -> Result<RevenueBreakdown> {
    if cumulative <= 0.0 {
        return Err(Error::Numeric(format!(
            "circulating supply Q({t}) is zero; issuance config is malformed"
        )));
    }
    let cap = p.market_cap(t);
    Ok(RevenueBreakdown::new(
        cap / cumulative * minted,
        cap * p.beta,
    ))
}

/// R(t) = V(t) q(t) / Q(t) + V(t) beta
pub fn revenue(p: &MarketParams, issuance: &IssuanceParams, t: u32) -> Result<RevenueBreakdown> {
    let supply = SupplyTable::new(issuance, t);
    revenue_with_supply(p, supply.minted(t), supply.cumulative(t), t)
}

/// V(0) such that alpha R(0) / p_ele equals `target_twh`.
///
/// R(0) is linear in V(0), so the inversion is closed form.
pub fn calibrate_v0(
    target_twh: f64,
    alpha: f64,
    p_ele: f64,
    beta: f64,
    issuance: &IssuanceParams,
) -> Result<f64> {
    if !(target_twh.is_finite() && target_twh > 0.0) {
        return Err(Error::param("calibration_target_twh", "must be positive"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param("alpha", "must lie in (0, 1]"));
    }
    if !(p_ele.is_finite() && p_ele > 0.0) {
        return Err(Error::param("p_ele", "must be positive"));
    }
    let ratio = issuance.coins_minted_in_year(0) / issuance.minted_at_t0 + beta;
    if ratio <= 0.0 {
        return Err(Error::Numeric(
            "revenue per unit of market capitalization is zero at t = 0".into(),
        ));
    }
    let revenue_t0 = target_twh * KWH_PER_TWH * p_ele / alpha;
    Ok(revenue_t0 / ratio)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn market(beta: f64) -> MarketParams {
        MarketParams {
            v0: 1.5e11,
            gamma: 0.06,
            beta,
        }
    }

    #[test]
    fn beta_examples() {
        let b = beta_from_gold(&GoldOtcParams::REFERENCE);
        assert!((b - 0.00175914).abs() < 1e-15);
        assert_eq!((b * 1e4).round() / 1e4, 0.0018);
        let no_otc = GoldOtcParams {
            theta_share: 0.0,
            ..GoldOtcParams::REFERENCE
        };
        assert_eq!(beta_from_gold(&no_otc), 0.0);
        let unit = GoldOtcParams {
            rho: 1.0,
            theta_share: 1.0,
            phi: 0.005,
        };
        assert_eq!(beta_from_gold(&unit), 0.005);
    }

    #[test]
    fn beta_is_multiplicative() {
        let base = beta_from_gold(&GoldOtcParams::REFERENCE);
        let scaled = GoldOtcParams {
            rho: 3.37 * 2.5,
            ..GoldOtcParams::REFERENCE
        };
        assert!((beta_from_gold(&scaled) / base - 2.5).abs() < 1e-12);
    }

    #[test]
    fn market_cap_growth() {
        let p = market(0.0018);
        assert_eq!(p.market_cap(0), p.v0);
        let doubled = p.market_cap(12) / p.v0;
        assert!((doubled - 1.06f64.powi(12)).abs() < 1e-12);
        assert!((doubled - 2.0122).abs() < 1e-4);
        for t in 0..100 {
            let ratio = p.market_cap(t + 1) / p.market_cap(t);
            assert!((ratio - 1.06).abs() < 1e-12);
        }
        let flat = MarketParams { gamma: 0.0, ..p };
        assert_eq!(flat.market_cap(57), flat.v0);
    }

    #[test]
    fn fee_share_2020() {
        let issuance = IssuanceParams::default();
        let r = revenue(&market(0.0018), &issuance, 0).unwrap();
        assert!((r.fee_share() - 0.068).abs() <= 0.005, "{}", r.fee_share());
        assert_eq!(r.total, r.block_reward_revenue + r.fee_revenue);
    }

    #[test]
    fn post_issuance_revenue_is_fees_only() {
        let issuance = IssuanceParams::default();
        let p = market(0.0018);
        let r = revenue(&p, &issuance, 130).unwrap();
        assert_eq!(r.block_reward_revenue, 0.0);
        assert_eq!(r.total, p.market_cap(130) * 0.0018);
    }

    #[test]
    fn both_streams_vanish() {
        let issuance = IssuanceParams::default();
        let r = revenue(&market(0.0), &issuance, 150).unwrap();
        assert_eq!(r.total, 0.0);
    }

    #[test]
    fn zero_supply_is_an_error() {
        let issuance = IssuanceParams {
            minted_at_t0: 0.0,
            ..IssuanceParams::default()
        };
        assert!(revenue(&market(0.0018), &issuance, 0).is_err());
    }

    #[test]
    fn revenue_increases_in_v0_and_beta() {
        let issuance = IssuanceParams::default();
        let base = revenue(&market(0.0018), &issuance, 10).unwrap().total;
        let richer = MarketParams {
            v0: 2e11,
            ..market(0.0018)
        };
        assert!(revenue(&richer, &issuance, 10).unwrap().total > base);
        assert!(revenue(&market(0.002), &issuance, 10).unwrap().total > base);
    }

    #[test]
    fn calibration_inverts_electricity() {
        let issuance = IssuanceParams::default();
        let v0 = calibrate_v0(49.0, 0.6, 0.05, 0.0018, &issuance).unwrap();
        let r0: f64 = 49e9 * 0.05 / 0.6;
        assert!((r0 - 4.083e9).abs() / r0 < 1e-3);
        let ratio = issuance.coins_minted_in_year(0) / issuance.minted_at_t0 + 0.0018;
        assert!((v0 - r0 / ratio).abs() / v0 < 1e-12);
        assert!((1.5e11..=2.5e11).contains(&v0), "{v0}");

        let doubled = calibrate_v0(98.0, 0.6, 0.05, 0.0018, &issuance).unwrap();
        assert!((doubled / v0 - 2.0).abs() < 1e-12);

        assert!(calibrate_v0(0.0, 0.6, 0.05, 0.0018, &issuance).is_err());
    }

    #[test]
    fn fee_share_tends_to_one() {
        let issuance = IssuanceParams::default();
        let p = market(0.0018);
        let late = revenue(&p, &issuance, 200).unwrap();
        assert_eq!(late.fee_share(), 1.0);
        let mid = revenue(&p, &issuance, 40).unwrap();
        assert!(mid.fee_share() > revenue(&p, &issuance, 0).unwrap().fee_share());
    }
}
