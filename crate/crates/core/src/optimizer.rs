//! Choice of liquidation horizons.
//!
//! Three strategies are compared under the same portfolio cost function:
//!
//! * naive: every asset is unwound in `|N| / ADV` days;
//! * individual: every asset minimizes its own standalone cost, ignoring
//!   correlations;
//! * portfolio: all horizons are chosen jointly by cyclic coordinate descent,
//!   each coordinate minimized by golden-section search with the others held
//!   fixed, restarted from the naive and individual schedules.

use std::fmt;

use crate::costmodel::{
    overlap_kernel, total_cost_single, CostBreakdown, CostEvaluator, LiquidationSchedule,
    PortfolioSpec,
};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::search::{golden_section_log, LineMinimum};

const LINE_SEARCH_MAX_ITERS: usize = 200;

/// Relative size of the perturbation used by the stationarity certificate.
pub const CERTIFICATE_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig<T> {
    /// Upper bound on every horizon, in days.
    pub deadline: Option<T>,
    /// Lower bound on every horizon, in days.
    pub t_floor: T,
    /// Relative cost improvement below which the outer loop stops.
    pub rel_tol: T,
    pub max_outer_iters: usize,
    /// Number of seeds: 1 uses the naive schedule, 2 adds the individual one.
    pub multistart: usize,
    /// Upper bound used when there is no deadline.
    pub horizon_cap: T,
}

impl<T: Scalar> Default for OptimizerConfig<T> {
    fn default() -> Self {
        Self {
            deadline: None,
            t_floor: T::lit(1e-3),
            rel_tol: T::lit(1e-8),
            max_outer_iters: 200,
            multistart: 2,
            horizon_cap: T::lit(1e4),
        }
    }
}

impl<T: Scalar> OptimizerConfig<T> {
    pub fn with_deadline(mut self, deadline: T) -> Self {
        self.deadline = Some(deadline);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_floor > T::zero()) || !self.t_floor.is_finite() {
            return Err(Error::Config("t_floor must be positive"));
        }
        if let Some(deadline) = self.deadline {
            if !(deadline > self.t_floor) || !deadline.is_finite() {
                return Err(Error::Config("deadline must exceed t_floor"));
            }
        }
        if !(self.horizon_cap > self.t_floor) || !self.horizon_cap.is_finite() {
            return Err(Error::Config("horizon_cap must exceed t_floor"));
        }
        if !(self.rel_tol > T::zero()) {
            return Err(Error::Config("rel_tol must be positive"));
        }
        if self.max_outer_iters == 0 {
            return Err(Error::Config("max_outer_iters must be at least 1"));
        }
        if !(1..=2).contains(&self.multistart) {
            return Err(Error::Config("multistart must be 1 or 2"));
        }
        Ok(())
    }

    /// Largest admissible horizon.
    pub fn upper(&self) -> T {
        self.deadline.unwrap_or(self.horizon_cap)
    }

    fn clip(&self, t: T) -> T {
        t.max(self.t_floor).min(self.upper())
    }

    fn line_tol(&self) -> T {
        self.rel_tol.max(T::epsilon().sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Naive,
    Individual,
    Portfolio,
}

impl Strategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::Naive => "naive",
            Strategy::Individual => "individual",
            Strategy::Portfolio => "portfolio",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "naive" => Ok(Strategy::Naive),
            "individual" => Ok(Strategy::Individual),
            "portfolio" => Ok(Strategy::Portfolio),
            other => Err(format!("unknown strategy {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyResult<T> {
    pub strategy: Strategy,
    pub schedule: LiquidationSchedule<T>,
    /// Evaluated with the portfolio cost function.
    pub cost: CostBreakdown<T>,
    pub t_median: T,
    pub t_max: T,
    pub converged: bool,
    /// No single horizon moved by ±0.1% lowers the cost by more than
    /// `rel_tol` of the total.
    pub stationary: bool,
    pub iterations: usize,
}

/// Median and maximum horizon over the held assets; zero when none are held.
pub fn horizon_summary<T: Scalar>(
    spec: &PortfolioSpec<T>,
    schedule: &LiquidationSchedule<T>,
) -> (T, T) {
    let mut held: Vec<T> = spec
        .bonds()
        .iter()
        .zip(schedule.times())
        .filter(|(b, _)| !b.is_flat())
        .map(|(_, &t)| t)
        .collect();
    if held.is_empty() {
        return (T::zero(), T::zero());
    }
    held.sort_by(|a, b| a.partial_cmp(b).expect("finite horizons"));
    let n = held.len();
    let median = if n % 2 == 1 {
        held[n / 2]
    } else {
        T::lit(0.5) * (held[n / 2 - 1] + held[n / 2])
    };
    (median, held[n - 1])
}

/// `|N| / ADV` days per held asset, clipped to the admissible range.
pub fn naive_schedule<T: Scalar>(
    spec: &PortfolioSpec<T>,
    config: &OptimizerConfig<T>,
) -> LiquidationSchedule<T> {
    let times = spec
        .bonds()
        .iter()
        .map(|b| {
            if b.is_flat() {
                T::zero()
            } else {
                config.clip(b.position().abs() / b.adv())
            }
        })
        .collect();
    LiquidationSchedule::new(times)
}

/// Per-asset minimizer of the standalone cost over `[t_floor, upper]`.
pub fn individual_schedule<T: Scalar>(
    spec: &PortfolioSpec<T>,
    config: &OptimizerConfig<T>,
) -> Result<LiquidationSchedule<T>> {
    config.validate()?;
    Ok(individual_search(spec, config)?.0)
}

fn individual_search<T: Scalar>(
    spec: &PortfolioSpec<T>,
    config: &OptimizerConfig<T>,
) -> Result<(LiquidationSchedule<T>, usize, bool)> {
    let mut iterations = 0;
    let mut converged = true;
    let mut times = vec![T::zero(); spec.len()];
    for (i, bond) in spec.bonds().iter().enumerate() {
        let Some(impact) = spec.impact(i) else {
            continue;
        };
        let found = minimize_coordinate(i, config, |t| {
            total_cost_single(bond, impact, spec.gamma(), t)
        })?;
        iterations += found.iterations;
        converged &= found.converged;
        times[i] = found.x;
    }
    Ok((LiquidationSchedule::new(times), iterations, converged))
}

fn minimize_coordinate<T, F>(
    asset: usize,
    config: &OptimizerConfig<T>,
    mut f: F,
) -> Result<LineMinimum<T>>
where
    T: Scalar,
    F: FnMut(T) -> Result<T>,
{
    golden_section_log(
        |t| {
            let value = f(t)?;
            if value.is_finite() {
                Ok(value)
            } else {
                Err(Error::NonFinite {
                    asset,
                    time: t.as_f64(),
                })
            }
        },
        config.t_floor,
        config.upper(),
        config.line_tol(),
        LINE_SEARCH_MAX_ITERS,
    )
}

/// Running state of a coordinate descent: current horizons, the per-asset
/// direct costs and the PnL variance they imply.
struct DescentState<T> {
    times: Vec<T>,
    direct: Vec<T>,
    variance: T,
}

impl<T: Scalar> DescentState<T> {
    fn new(eval: &CostEvaluator<'_, T>, schedule: &LiquidationSchedule<T>) -> Result<Self> {
        let times = schedule.times().to_vec();
        let direct = (0..times.len())
            .map(|i| eval.direct(i, times[i]))
            .collect::<Result<Vec<_>>>()?;
        let variance = eval.variance(&times);
        Ok(Self {
            times,
            direct,
            variance,
        })
    }

    fn total(&self, gamma: T) -> T {
        let direct = self.direct.iter().fold(T::zero(), |acc, &x| acc + x);
        direct + gamma * self.variance.max(T::zero()).sqrt()
    }

    /// Variance with asset `i` removed entirely.
    fn variance_without(&self, eval: &CostEvaluator<'_, T>, i: usize) -> T {
        let t = self.times[i];
        self.variance
            - T::lit(2.0) * eval.cross_row(i, t, &self.times)
            - eval.weight(i, i) * overlap_kernel(t, t)
    }
}

/// The cost as a function of asset `i`'s horizon, everything else fixed,
/// minus the direct costs of the other assets.
fn coordinate_cost<T: Scalar>(
    eval: &CostEvaluator<'_, T>,
    state: &DescentState<T>,
    rest: T,
    i: usize,
    t: T,
) -> Result<(T, T, T)> {
    let direct = eval.direct(i, t)?;
    let variance = rest
        + T::lit(2.0) * eval.cross_row(i, t, &state.times)
        + eval.weight(i, i) * overlap_kernel(t, t);
    let value = direct + eval.spec().gamma() * variance.max(T::zero()).sqrt();
    if !value.is_finite() {
        return Err(Error::NonFinite {
            asset: i,
            time: t.as_f64(),
        });
    }
    Ok((value, direct, variance))
}

struct Descent<T> {
    schedule: LiquidationSchedule<T>,
    cost: T,
    iterations: usize,
    converged: bool,
}

fn descend<T: Scalar>(
    eval: &CostEvaluator<'_, T>,
    seed: &LiquidationSchedule<T>,
    config: &OptimizerConfig<T>,
) -> Result<Descent<T>> {
    let gamma = eval.spec().gamma();
    let mut state = DescentState::new(eval, seed)?;
    let mut cost = state.total(gamma);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < config.max_outer_iters {
        iterations += 1;
        for &i in eval.active() {
            let rest = state.variance_without(eval, i);
            let (current, _, _) = coordinate_cost(eval, &state, rest, i, state.times[i])?;
            let found = minimize_coordinate(i, config, |t| {
                coordinate_cost(eval, &state, rest, i, t).map(|(value, _, _)| value)
            })?;
            if found.value < current {
                let (_, direct, variance) = coordinate_cost(eval, &state, rest, i, found.x)?;
                state.times[i] = found.x;
                state.direct[i] = direct;
                state.variance = variance;
            }
        }
        // resynchronize the incrementally updated variance
        state.variance = eval.variance(&state.times);
        let next = state.total(gamma);
        let improvement = (cost - next) / next.abs().max(T::min_positive_value());
        cost = next;
        if improvement <= config.rel_tol {
            converged = true;
            break;
        }
    }

    Ok(Descent {
        schedule: LiquidationSchedule::new(state.times),
        cost,
        iterations,
        converged,
    })
}

/// Whether moving any single horizon by ±0.1% (within bounds) fails to lower
/// the total cost by more than `rel_tol` of it.
fn is_stationary<T: Scalar>(
    eval: &CostEvaluator<'_, T>,
    schedule: &LiquidationSchedule<T>,
    config: &OptimizerConfig<T>,
) -> Result<bool> {
    let state = DescentState::new(eval, schedule)?;
    let total = state.total(eval.spec().gamma());
    let slack = config.rel_tol * total.abs();
    let step = T::lit(CERTIFICATE_STEP);
    for &i in eval.active() {
        let t = state.times[i];
        let rest = state.variance_without(eval, i);
        let (here, _, _) = coordinate_cost(eval, &state, rest, i, t)?;
        for factor in [T::one() - step, T::one() + step] {
            let moved = config.clip(t * factor);
            if moved == t {
                continue;
            }
            let (there, _, _) = coordinate_cost(eval, &state, rest, i, moved)?;
            if there < here - slack {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn summarize<T: Scalar>(
    eval: &CostEvaluator<'_, T>,
    strategy: Strategy,
    schedule: LiquidationSchedule<T>,
    config: &OptimizerConfig<T>,
    converged: bool,
    iterations: usize,
) -> Result<StrategyResult<T>> {
    let cost = eval.evaluate(&schedule)?;
    let stationary = is_stationary(eval, &schedule, config)?;
    let (t_median, t_max) = horizon_summary(eval.spec(), &schedule);
    Ok(StrategyResult {
        strategy,
        schedule,
        cost,
        t_median,
        t_max,
        converged,
        stationary,
        iterations,
    })
}

fn optimize_from_seeds<T: Scalar>(
    eval: &CostEvaluator<'_, T>,
    seeds: &[&LiquidationSchedule<T>],
    config: &OptimizerConfig<T>,
) -> Result<StrategyResult<T>> {
    let mut best: Option<Descent<T>> = None;
    let mut iterations = 0;
    for seed in seeds {
        let run = descend(eval, seed, config)?;
        iterations += run.iterations;
        if best.as_ref().is_none_or(|b| run.cost < b.cost) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one seed");
    summarize(
        eval,
        Strategy::Portfolio,
        best.schedule,
        config,
        best.converged,
        iterations,
    )
}

fn seeds<'s, T>(
    naive: &'s LiquidationSchedule<T>,
    individual: &'s LiquidationSchedule<T>,
    config: &OptimizerConfig<T>,
) -> Vec<&'s LiquidationSchedule<T>> {
    [naive, individual]
        .into_iter()
        .take(config.multistart)
        .collect()
}

/// Jointly optimal horizons for the whole portfolio.
pub fn optimize_portfolio<T: Scalar>(
    spec: &PortfolioSpec<T>,
    config: &OptimizerConfig<T>,
) -> Result<StrategyResult<T>> {
    config.validate()?;
    let eval = CostEvaluator::new(spec);
    let naive = naive_schedule(spec, config);
    let individual = if config.multistart > 1 {
        individual_search(spec, config)?.0
    } else {
        naive.clone()
    };
    optimize_from_seeds(&eval, &seeds(&naive, &individual, config), config)
}

/// Naive, individual and portfolio strategies, in that order, all evaluated
/// with the portfolio cost function.
pub fn evaluate_strategies<T: Scalar>(
    spec: &PortfolioSpec<T>,
    config: &OptimizerConfig<T>,
) -> Result<Vec<StrategyResult<T>>> {
    config.validate()?;
    let eval = CostEvaluator::new(spec);
    let naive = naive_schedule(spec, config);
    let (individual, line_iters, line_converged) = individual_search(spec, config)?;
    let portfolio = optimize_from_seeds(&eval, &seeds(&naive, &individual, config), config)?;
    Ok(vec![
        summarize(&eval, Strategy::Naive, naive, config, true, 0)?,
        summarize(
            &eval,
            Strategy::Individual,
            individual,
            config,
            line_converged,
            line_iters,
        )?,
        portfolio,
    ])
}
