//! Optimal liquidation horizons for portfolios of OTC assets.
//!
//! Market impact follows the stationary locally linear order book: latent
//! volume density grows linearly near the mid price and saturates far from
//! it, giving square-root impact for small daily volumes and linear impact for
//! large ones. Each asset is unwound linearly over its own horizon; the
//! optimizer trades direct impact cost against `gamma` standard deviations of
//! the liquidation PnL, including cross-asset correlations.
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`). The
//! aliases below fix the scalar for the common case; file formats work in
//! `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod correlation;
pub mod costmodel;
pub mod error;
pub mod impact;
pub mod optimizer;
pub mod portfolio_io;
pub mod scalar;
pub mod search;

pub use correlation::{CorrelationError, CorrelationMatrix};
pub use costmodel::{
    direct_cost_single, limit_cost_large_size, optimal_cost_small_size, optimal_time_small_size,
    penalty_single, portfolio_total_cost, portfolio_variance, total_cost_single, BondSpec,
    CostBreakdown, CostEvaluator, LiquidationSchedule, PortfolioSpec,
};
pub use error::{Error, Result};
pub use impact::{
    calibrated_alpha_inf, daily_volatility, stationary_residual, verify_stationary_pde,
    ImpactParams, PdeParams, DEFAULT_DAY_COUNT,
};
pub use optimizer::{
    evaluate_strategies, horizon_summary, individual_schedule, naive_schedule, optimize_portfolio,
    OptimizerConfig, Strategy, StrategyResult,
};
pub use portfolio_io::{
    load_portfolio, write_results, LoadError, PortfolioDocument, ResultsFile, WriteError,
};
pub use scalar::Scalar;

pub type ImpactParamsF64 = ImpactParams<f64>;
pub type ImpactParamsF32 = ImpactParams<f32>;
pub type PdeParamsF64 = PdeParams<f64>;
pub type BondSpecF64 = BondSpec<f64>;
pub type BondSpecF32 = BondSpec<f32>;
pub type PortfolioSpecF64 = PortfolioSpec<f64>;
pub type PortfolioSpecF32 = PortfolioSpec<f32>;
pub type CorrelationMatrixF64 = CorrelationMatrix<f64>;
pub type LiquidationScheduleF64 = LiquidationSchedule<f64>;
pub type CostBreakdownF64 = CostBreakdown<f64>;
pub type OptimizerConfigF64 = OptimizerConfig<f64>;
pub type StrategyResultF64 = StrategyResult<f64>;
