//! Liquidation cost of linear unwinds.
//!
//! A position `N` unwound in equal daily slices over `T` days pays
//! `|N| * max(dp(|N|/T), spread/2 * P0)` in direct cost, where `dp` is the
//! one-day impact from [`ImpactParams::impact_at_volume`], and carries a PnL
//! variance that grows with `T`. The risk penalty is `gamma` standard
//! deviations of that PnL.
//!
//! Prices are in units where par is 1. Volatilities are daily return
//! volatilities, so `P0 * N * sigma` is the one-day currency standard
//! deviation of a position.

use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::correlation::CorrelationMatrix;
use crate::error::{Error, Result};
use crate::impact::{daily_volatility, ImpactParams, DEFAULT_DAY_COUNT};
use crate::scalar::Scalar;

/// One tradable asset.
#[derive(Debug, Clone, PartialEq)]
pub struct BondSpec<T> {
    id: String,
    price: T,
    position: T,
    adv: T,
    vol_annual: T,
    min_spread: T,
    day_count: T,
}

impl<T: Scalar> BondSpec<T> {
    /// Validates and builds a bond using a 252 business day year.
    ///
    /// Assets with a nonzero position need a positive volatility, since both
    /// the width and the depth of the latent book are tied to it.
    pub fn new(
        id: impl Into<String>,
        price: T,
        position: T,
        adv: T,
        vol_annual: T,
        min_spread: T,
    ) -> Result<Self> {
        let bond = Self {
            id: id.into(),
            price,
            position,
            adv,
            vol_annual,
            min_spread,
            day_count: T::lit(DEFAULT_DAY_COUNT),
        };
        bond.validate()?;
        Ok(bond)
    }

    pub fn with_day_count(mut self, day_count: T) -> Result<Self> {
        if !(day_count > T::zero()) || !day_count.is_finite() {
            return Err(Error::domain("day_count", "positive", day_count.as_f64()));
        }
        self.day_count = day_count;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let finite_positive = |x: T| x > T::zero() && x.is_finite();
        if !finite_positive(self.price) {
            return Err(Error::domain("price", "positive", self.price.as_f64()));
        }
        if !self.position.is_finite() {
            return Err(Error::domain("position", "finite", self.position.as_f64()));
        }
        if !finite_positive(self.adv) {
            return Err(Error::domain("adv", "positive", self.adv.as_f64()));
        }
        if !(self.vol_annual >= T::zero()) || !self.vol_annual.is_finite() {
            return Err(Error::domain(
                "vol_annual",
                "non-negative",
                self.vol_annual.as_f64(),
            ));
        }
        if self.position != T::zero() && self.vol_annual == T::zero() {
            return Err(Error::domain(
                "vol_annual",
                "positive for a nonzero position",
                0.0,
            ));
        }
        if !(self.min_spread >= T::zero()) || !self.min_spread.is_finite() {
            return Err(Error::domain(
                "min_spread",
                "non-negative",
                self.min_spread.as_f64(),
            ));
        }
        Ok(())
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn price(&self) -> T {
        self.price
    }

    pub fn position(&self) -> T {
        self.position
    }

    pub fn adv(&self) -> T {
        self.adv
    }

    pub fn vol_annual(&self) -> T {
        self.vol_annual
    }

    pub fn min_spread(&self) -> T {
        self.min_spread
    }

    pub fn day_count(&self) -> T {
        self.day_count
    }

    pub fn sigma_daily(&self) -> T {
        daily_volatility(self.vol_annual, self.day_count)
    }

    /// Signed currency exposure `P0 * N0`.
    pub fn exposure(&self) -> T {
        self.price * self.position
    }

    pub fn is_flat(&self) -> bool {
        self.position == T::zero()
    }

    pub fn impact_params(&self, alpha_inf: T) -> Result<ImpactParams<T>> {
        ImpactParams::new(self.adv, self.sigma_daily(), alpha_inf)
    }
}

/// Bonds, their return correlations and the risk settings.
#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioSpec<T> {
    bonds: Vec<BondSpec<T>>,
    correlation: CorrelationMatrix<T>,
    gamma: T,
    alpha_inf: T,
    impacts: Vec<Option<ImpactParams<T>>>,
}

impl<T: Scalar> PortfolioSpec<T> {
    pub fn new(
        bonds: Vec<BondSpec<T>>,
        correlation: CorrelationMatrix<T>,
        gamma: T,
        alpha_inf: T,
    ) -> Result<Self> {
        if bonds.is_empty() {
            return Err(Error::domain("bonds", "non-empty", 0.0));
        }
        if correlation.dim() != bonds.len() {
            return Err(Error::Misaligned {
                expected: bonds.len(),
                got: correlation.dim(),
            });
        }
        if !(gamma > T::zero()) || !gamma.is_finite() {
            return Err(Error::domain("gamma", "positive", gamma.as_f64()));
        }
        if !(alpha_inf > T::zero()) || !alpha_inf.is_finite() {
            return Err(Error::domain("alpha_inf", "positive", alpha_inf.as_f64()));
        }
        let mut seen = HashSet::new();
        for bond in &bonds {
            if !seen.insert(bond.id()) {
                return Err(Error::domain("bond id", "unique", f64::NAN));
            }
        }
        let impacts = bonds
            .iter()
            .map(|b| {
                if b.is_flat() {
                    Ok(None)
                } else {
                    b.impact_params(alpha_inf).map(Some)
                }
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            bonds,
            correlation,
            gamma,
            alpha_inf,
            impacts,
        })
    }

    pub fn bonds(&self) -> &[BondSpec<T>] {
        &self.bonds
    }

    pub fn correlation(&self) -> &CorrelationMatrix<T> {
        &self.correlation
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn alpha_inf(&self) -> T {
        self.alpha_inf
    }

    pub fn len(&self) -> usize {
        self.bonds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bonds.is_empty()
    }

    /// Impact law of asset `i`, `None` for a zero position.
    pub fn impact(&self, i: usize) -> Option<&ImpactParams<T>> {
        self.impacts[i].as_ref()
    }

    pub fn with_correlation(self, correlation: CorrelationMatrix<T>) -> Result<Self> {
        Self::new(self.bonds, correlation, self.gamma, self.alpha_inf)
    }

    pub fn with_risk(self, gamma: T, alpha_inf: T) -> Result<Self> {
        Self::new(self.bonds, self.correlation, gamma, alpha_inf)
    }

    /// Same portfolio with assets reordered by `order`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let bonds = order.iter().map(|&i| self.bonds[i].clone()).collect();
        Self::new(
            bonds,
            self.correlation.permuted(order),
            self.gamma,
            self.alpha_inf,
        )
    }
}

/// Terminal times `T^i` in days, one per bond. Zero for flat positions.
#[derive(Debug, Clone, PartialEq)]
pub struct LiquidationSchedule<T> {
    times: Vec<T>,
}

impl<T: Scalar> LiquidationSchedule<T> {
    pub fn new(times: Vec<T>) -> Self {
        Self { times }
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn into_times(self) -> Vec<T> {
        self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Checks alignment with `spec` and positivity for every held asset.
    pub fn validate_for(&self, spec: &PortfolioSpec<T>) -> Result<()> {
        if self.times.len() != spec.len() {
            return Err(Error::Misaligned {
                expected: spec.len(),
                got: self.times.len(),
            });
        }
        for (bond, &t) in spec.bonds().iter().zip(&self.times) {
            if !bond.is_flat() && !(t > T::zero() && t.is_finite()) {
                return Err(Error::domain("liquidation time", "positive", t.as_f64()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostBreakdown<T> {
    pub direct: T,
    pub penalty: T,
    pub total: T,
    pub per_asset_direct: Vec<T>,
}

impl<T: Scalar> CostBreakdown<T> {
    pub fn zero(d: usize) -> Self {
        Self {
            direct: T::zero(),
            penalty: T::zero(),
            total: T::zero(),
            per_asset_direct: vec![T::zero(); d],
        }
    }
}

/// Direct cost of unwinding `bond` linearly over `t` days.
pub fn direct_cost_single<T: Scalar>(
    bond: &BondSpec<T>,
    impact: &ImpactParams<T>,
    t: T,
) -> Result<T> {
    if bond.is_flat() {
        return Ok(T::zero());
    }
    if !(t > T::zero()) || t.is_nan() {
        return Err(Error::domain("liquidation time", "positive", t.as_f64()));
    }
    let size = bond.position().abs();
    let impact_per_unit = impact.impact_at_volume(size / t)?;
    let floor = T::lit(0.5) * bond.min_spread() * bond.price();
    Ok(size * impact_per_unit.max(floor))
}

/// `gamma` standard deviations of the PnL of a linear unwind over `t` days:
/// `gamma / sqrt(3) * P0 |N| sigma sqrt(t)`.
pub fn penalty_single<T: Scalar>(bond: &BondSpec<T>, gamma: T, t: T) -> Result<T> {
    if !(t >= T::zero()) {
        return Err(Error::domain(
            "liquidation time",
            "non-negative",
            t.as_f64(),
        ));
    }
    Ok(gamma / T::lit(3.0).sqrt() * bond.exposure().abs() * bond.sigma_daily() * t.sqrt())
}

pub fn total_cost_single<T: Scalar>(
    bond: &BondSpec<T>,
    impact: &ImpactParams<T>,
    gamma: T,
    t: T,
) -> Result<T> {
    Ok(direct_cost_single(bond, impact, t)? + penalty_single(bond, gamma, t)?)
}

fn held_size<T: Scalar>(bond: &BondSpec<T>) -> Result<T> {
    if bond.is_flat() {
        Err(Error::domain("position", "nonzero", 0.0))
    } else {
        Ok(bond.position().abs())
    }
}

/// Minimizer of the total cost under the square-root law:
/// `T* = sqrt(3 N) / (gamma P0 sigma) * sqrt(2 u* / rho_inf)`.
pub fn optimal_time_small_size<T: Scalar>(
    bond: &BondSpec<T>,
    impact: &ImpactParams<T>,
    gamma: T,
) -> Result<T> {
    let n = held_size(bond)?;
    let two = T::lit(2.0);
    Ok(
        (T::lit(3.0) * n).sqrt() / (gamma * bond.price() * bond.sigma_daily())
            * (two * impact.u_star() / impact.rho_inf()).sqrt(),
    )
}

/// Cost per unit at the square-root-law optimum:
/// `2 (2 u*/rho_inf)^(1/4) sqrt(gamma P0 sigma) N^(1/4) / 3^(1/4)`.
pub fn optimal_cost_small_size<T: Scalar>(
    bond: &BondSpec<T>,
    impact: &ImpactParams<T>,
    gamma: T,
) -> Result<T> {
    let n = held_size(bond)?;
    let two = T::lit(2.0);
    let quarter = T::lit(0.25);
    Ok(two
        * (two * impact.u_star() / impact.rho_inf()).powf(quarter)
        * (gamma * bond.price() * bond.sigma_daily()).sqrt()
        * n.powf(quarter)
        / T::lit(3.0).powf(quarter))
}

/// Cost per unit at the optimum when the linear part of the impact law
/// dominates, `dp(v) ~ v / rho_inf + u*`.
///
/// Minimizing `N / (rho_inf T) + u* + gamma P0 sigma sqrt(T / 3)` gives
///
/// ```text
/// 3^(2/3) 2^(-2/3) (gamma P0)^(2/3) sigma (N / (alpha_inf ADV))^(1/3) + u*
/// ```
///
/// once `rho_inf = alpha_inf ADV / sigma` is substituted. The constant equals
/// `3^(-1/3) (2^(-2/3) + 2^(1/3))`.
pub fn limit_cost_large_size<T: Scalar>(
    bond: &BondSpec<T>,
    impact: &ImpactParams<T>,
    gamma: T,
) -> Result<T> {
    let n = held_size(bond)?;
    let third = T::lit(1.0 / 3.0);
    let slope = gamma * bond.price() * bond.sigma_daily() / T::lit(3.0).sqrt();
    let depth = n / impact.rho_inf();
    let leading = T::lit(1.5) * slope.powf(T::lit(2.0) * third) * (T::lit(2.0) * depth).powf(third);
    Ok(leading + impact.u_star())
}

/// `∫ (1 - t/a)+ (1 - t/b)+ dt = m/2 (1 - m / 3M)` with `m = min(a, b)`,
/// `M = max(a, b)`.
#[inline]
pub(crate) fn overlap_kernel<T: Scalar>(a: T, b: T) -> T {
    let (m, big) = if a <= b { (a, b) } else { (b, a) };
    if m <= T::zero() {
        return T::zero();
    }
    T::lit(0.5) * m * (T::one() - m / (T::lit(3.0) * big))
}

/// Variance of the liquidation PnL under linear schedules:
///
/// ```text
/// sum_ij sigma_i sigma_j rho_ij X_i X_j / 2 * m_ij (1 - m_ij / (3 M_ij))
/// ```
///
/// with `X_i = P0_i N0_i` and `m_ij`, `M_ij` the smaller and larger of the two
/// terminal times.
pub fn portfolio_variance<T: Scalar>(
    spec: &PortfolioSpec<T>,
    schedule: &LiquidationSchedule<T>,
) -> Result<T> {
    schedule.validate_for(spec)?;
    Ok(CostEvaluator::new(spec).variance(schedule.times()))
}

/// Sum of the per-asset direct costs plus `gamma * sqrt(variance)`.
pub fn portfolio_total_cost<T: Scalar>(
    spec: &PortfolioSpec<T>,
    schedule: &LiquidationSchedule<T>,
) -> Result<CostBreakdown<T>> {
    CostEvaluator::new(spec).evaluate(schedule)
}

/// Portfolio cost function with the per-asset volatility scalings cached.
///
/// Counts the covariance terms it evaluates so the cost of one evaluation can
/// be measured.
#[derive(Debug)]
pub struct CostEvaluator<'a, T> {
    spec: &'a PortfolioSpec<T>,
    /// `sigma_i * X_i`, zero for flat positions.
    scaled: Vec<T>,
    active: Vec<usize>,
    pair_terms: AtomicU64,
    evaluations: AtomicU64,
}

impl<'a, T: Scalar> CostEvaluator<'a, T> {
    pub fn new(spec: &'a PortfolioSpec<T>) -> Self {
        let scaled = spec
            .bonds()
            .iter()
            .map(|b| b.sigma_daily() * b.exposure())
            .collect();
        let active = spec
            .bonds()
            .iter()
            .enumerate()
            .filter(|(_, b)| !b.is_flat())
            .map(|(i, _)| i)
            .collect();
        Self {
            spec,
            scaled,
            active,
            pair_terms: AtomicU64::new(0),
            evaluations: AtomicU64::new(0),
        }
    }

    pub fn spec(&self) -> &PortfolioSpec<T> {
        self.spec
    }

    /// Indices of assets with a nonzero position.
    pub fn active(&self) -> &[usize] {
        &self.active
    }

    /// Covariance terms evaluated so far.
    pub fn pair_terms(&self) -> u64 {
        self.pair_terms.load(Ordering::Relaxed)
    }

    /// Full cost evaluations so far.
    pub fn evaluations(&self) -> u64 {
        self.evaluations.load(Ordering::Relaxed)
    }

    #[inline]
    pub(crate) fn weight(&self, i: usize, j: usize) -> T {
        self.scaled[i] * self.scaled[j] * self.spec.correlation().get(i, j)
    }

    /// Variance for raw times; assumes they are valid for the portfolio.
    pub fn variance(&self, times: &[T]) -> T {
        let mut total = T::zero();
        let mut terms = 0u64;
        for (a, &i) in self.active.iter().enumerate() {
            total += self.weight(i, i) * overlap_kernel(times[i], times[i]);
            let mut off = T::zero();
            for &j in &self.active[a + 1..] {
                off += self.weight(i, j) * overlap_kernel(times[i], times[j]);
            }
            total += T::lit(2.0) * off;
            terms += (self.active.len() - a) as u64;
        }
        self.pair_terms.fetch_add(terms, Ordering::Relaxed);
        total
    }

    /// `sum_{j != i} w_ij k(t, T_j)`: the part of the variance coupling
    /// asset `i` at time `t` to the others.
    pub(crate) fn cross_row(&self, i: usize, t: T, times: &[T]) -> T {
        let mut sum = T::zero();
        for &j in &self.active {
            if j != i {
                sum += self.weight(i, j) * overlap_kernel(t, times[j]);
            }
        }
        self.pair_terms
            .fetch_add(self.active.len() as u64, Ordering::Relaxed);
        sum
    }

    /// Direct cost of asset `i` over `t` days.
    pub fn direct(&self, i: usize, t: T) -> Result<T> {
        match self.spec.impact(i) {
            None => Ok(T::zero()),
            Some(impact) => direct_cost_single(&self.spec.bonds()[i], impact, t),
        }
    }

    pub fn evaluate(&self, schedule: &LiquidationSchedule<T>) -> Result<CostBreakdown<T>> {
        schedule.validate_for(self.spec)?;
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        let times = schedule.times();
        let per_asset_direct = (0..self.spec.len())
            .map(|i| self.direct(i, times[i]))
            .collect::<Result<Vec<T>>>()?;
        let direct = per_asset_direct.iter().fold(T::zero(), |acc, &x| acc + x);
        let penalty = self.spec.gamma() * self.variance(times).max(T::zero()).sqrt();
        Ok(CostBreakdown {
            direct,
            penalty,
            total: direct + penalty,
            per_asset_direct,
        })
    }
}
