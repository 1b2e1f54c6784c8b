use llob_core::{
    evaluate_strategies, individual_schedule, optimal_time_small_size, optimize_portfolio,
    portfolio_total_cost, portfolio_variance, BondSpec, CorrelationMatrix, CostEvaluator,
    ImpactParams, LiquidationSchedule, OptimizerConfig, PortfolioSpec,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn factor_correlation(rng: &mut ChaCha8Rng, d: usize, factors: usize) -> CorrelationMatrix<f64> {
    let g: Vec<Vec<f64>> = (0..d)
        .map(|_| (0..factors).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let norm: Vec<f64> = g
        .iter()
        .map(|r| r.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    let rows: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    if i == j {
                        1.0
                    } else {
                        g[i].iter().zip(&g[j]).map(|(a, b)| a * b).sum::<f64>()
                            / (norm[i] * norm[j])
                    }
                })
                .collect()
        })
        .collect();
    CorrelationMatrix::from_rows(&rows).unwrap()
}

fn random_spec(seed: u64, d: usize, long_only: bool) -> PortfolioSpec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bonds = (0..d)
        .map(|i| {
            let sign = if long_only || rng.gen_bool(0.5) {
                1.0
            } else {
                -1.0
            };
            BondSpec::new(
                format!("b{i}"),
                rng.gen_range(0.6..1.4),
                sign * (rng.gen_range(-1.0f64..3.5)).exp(),
                (rng.gen_range(0.0f64..3.0)).exp(),
                rng.gen_range(0.03..0.5),
                if rng.gen_bool(0.5) { 0.002 } else { 0.0 },
            )
            .unwrap()
        })
        .collect();
    let corr = factor_correlation(&mut rng, d, 2 + d / 2);
    PortfolioSpec::new(bonds, corr, 0.5, 24.0).unwrap()
}

fn random_times(seed: u64, d: usize) -> LiquidationSchedule<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    LiquidationSchedule::new(
        (0..d)
            .map(|_| (rng.gen_range(-3.0f64..4.0)).exp())
            .collect(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn variance_is_permutation_invariant_and_nonnegative(seed in any::<u64>(), d in 1usize..8) {
        let spec = random_spec(seed, d, false);
        let times = random_times(seed, d);
        let var = portfolio_variance(&spec, &times).unwrap();
        prop_assert!(var >= 0.0);

        let order: Vec<usize> = (0..d).rev().collect();
        let shuffled = spec.permuted(&order).unwrap();
        let shuffled_times = LiquidationSchedule::new(order.iter().map(|&k| times.times()[k]).collect());
        let var2 = portfolio_variance(&shuffled, &shuffled_times).unwrap();
        prop_assert!((var - var2).abs() <= 1e-12 * var.abs().max(1e-300));
    }

    #[test]
    fn evaluator_matches_free_functions(seed in any::<u64>(), d in 1usize..8) {
        let spec = random_spec(seed, d, false);
        let times = random_times(seed, d);
        let eval = CostEvaluator::new(&spec);
        let a = eval.evaluate(&times).unwrap();
        let b = portfolio_total_cost(&spec, &times).unwrap();
        prop_assert!((a.total - b.total).abs() <= 1e-12 * b.total);
        prop_assert_eq!(a.per_asset_direct.len(), d);
    }

    #[test]
    fn direct_cost_nonincreasing_in_own_time(seed in any::<u64>(), t in -4.0f64..4.0) {
        let spec = random_spec(seed, 1, false);
        let t0 = t.exp();
        let c0 = portfolio_total_cost(&spec, &LiquidationSchedule::new(vec![t0])).unwrap();
        let c1 = portfolio_total_cost(&spec, &LiquidationSchedule::new(vec![t0 * 1.1])).unwrap();
        prop_assert!(c1.direct <= c0.direct * (1.0 + 1e-12));
    }

    #[test]
    fn impact_inverse_round_trip(adv in 0.1f64..100.0, sigma in 1e-3f64..0.1, alpha in 0.1f64..50.0, k in -6.0f64..6.0) {
        let imp = ImpactParams::new(adv, sigma, alpha).unwrap();
        let v = imp.rho_inf() * imp.u_star() * 10f64.powf(k);
        let dp = imp.impact_at_volume(v).unwrap();
        prop_assert!((imp.volume_at_impact(dp).unwrap() - v).abs() <= 1e-10 * v);
        let dp2 = imp.impact_at_volume(v * 1.01).unwrap();
        prop_assert!(dp2 > dp);
    }

    #[test]
    fn single_asset_time_nonincreasing_in_gamma(seed in any::<u64>(), g in 0.1f64..3.0) {
        let spec = random_spec(seed, 1, true);
        let config = OptimizerConfig::default();
        let lo = spec.clone().with_risk(g, 24.0).unwrap();
        let hi = spec.with_risk(g * 1.5, 24.0).unwrap();
        let t_lo = individual_schedule(&lo, &config).unwrap().times()[0];
        let t_hi = individual_schedule(&hi, &config).unwrap().times()[0];
        prop_assert!(t_hi <= t_lo * (1.0 + 1e-6));
    }
}

#[test]
fn hedge_penalty_vanishes_monotonically() {
    let bond = |id: &str, n: f64| BondSpec::new(id, 1.2, n, 5.0, 0.1, 0.0).unwrap();
    let times = LiquidationSchedule::new(vec![3.0, 3.0]);
    let mut last = f64::INFINITY;
    for k in 0..=20 {
        let rho = k as f64 / 20.0;
        let spec = PortfolioSpec::new(
            vec![bond("a", 10.0), bond("b", -10.0)],
            CorrelationMatrix::uniform(2, rho).unwrap(),
            0.5,
            1.0,
        )
        .unwrap();
        let cost = portfolio_total_cost(&spec, &times).unwrap();
        assert!(cost.penalty <= last);
        last = cost.penalty;
    }
    assert!(last.abs() < 1e-12);
}

#[test]
fn feasible_seed_dominance_on_random_books() {
    let config = OptimizerConfig::default().with_deadline(100.0);
    for seed in 0..100 {
        let d = 2 + (seed as usize % 7);
        let spec = random_spec(seed, d, false);
        let r = evaluate_strategies(&spec, &config).unwrap();
        let (naive, individual, portfolio) = (&r[0], &r[1], &r[2]);
        let slack = config.rel_tol * naive.cost.total;
        assert!(
            portfolio.cost.total <= naive.cost.total + slack,
            "seed {seed}"
        );
        assert!(
            portfolio.cost.total <= individual.cost.total + slack,
            "seed {seed}"
        );
        assert!(portfolio.converged || portfolio.stationary, "seed {seed}");
        for &t in portfolio.schedule.times() {
            assert!((1e-3..=100.0).contains(&t), "seed {seed}: {t}");
        }
    }
}

#[test]
fn total_time_falls_with_gamma_on_long_only_books() {
    let config = OptimizerConfig::default().with_deadline(100.0);
    for seed in 0..20 {
        let spec = random_spec(1000 + seed, 5, true);
        let total = |g: f64| -> f64 {
            let s = spec.clone().with_risk(g, 24.0).unwrap();
            optimize_portfolio(&s, &config)
                .unwrap()
                .schedule
                .times()
                .iter()
                .sum()
        };
        assert!(total(1.0) < total(0.5), "seed {seed}");
    }
}

#[test]
fn quadrupling_size_doubles_small_size_horizon() {
    let make = |n: f64| BondSpec::new("x", 1.0, n, 50.0, 0.2, 0.0).unwrap();
    let n = 1e-10;
    let horizon = |n: f64| {
        let spec =
            PortfolioSpec::new(vec![make(n)], CorrelationMatrix::identity(1), 0.5, 1.0).unwrap();
        let closed =
            optimal_time_small_size(&spec.bonds()[0], spec.impact(0).unwrap(), 0.5).unwrap();
        let config = OptimizerConfig {
            t_floor: closed * 1e-3,
            horizon_cap: closed * 1e3,
            ..OptimizerConfig::default()
        };
        individual_schedule(&spec, &config).unwrap().times()[0]
    };
    let ratio = horizon(4.0 * n) / horizon(n);
    assert!((ratio - 2.0).abs() < 2e-3, "ratio {ratio}");
}

#[test]
fn deadline_binds_below_unconstrained_maximum() {
    let spec = random_spec(7, 6, false);
    let free = optimize_portfolio(&spec, &OptimizerConfig::default().with_deadline(100.0)).unwrap();
    for frac in [0.9, 0.5, 0.2] {
        let deadline = free.t_max * frac;
        let r =
            optimize_portfolio(&spec, &OptimizerConfig::default().with_deadline(deadline)).unwrap();
        assert_eq!(r.t_max, deadline);
    }
}

#[test]
fn optimization_is_deterministic() {
    let spec = random_spec(11, 8, false);
    let config = OptimizerConfig::default().with_deadline(50.0);
    let a = evaluate_strategies(&spec, &config).unwrap();
    let b = evaluate_strategies(&spec, &config).unwrap();
    assert_eq!(a, b);
}

#[test]
fn evaluation_operation_count_is_quadratic() {
    for d in [10usize, 100, 1000] {
        let spec = random_spec(3, d, false);
        let eval = CostEvaluator::new(&spec);
        eval.evaluate(&random_times(3, d)).unwrap();
        let per = eval.pair_terms() as f64 / (d * d) as f64;
        assert!((0.5..=0.6).contains(&per), "d = {d}: {per}");
    }
}

#[test]
fn single_precision_tracks_double_precision() {
    let b64 = BondSpec::<f64>::new("x", 1.1, 12.0, 3.0, 0.15, 0.002).unwrap();
    let b32 = BondSpec::<f32>::new("x", 1.1, 12.0, 3.0, 0.15, 0.002).unwrap();
    let s64 = PortfolioSpec::new(vec![b64], CorrelationMatrix::identity(1), 0.5, 24.0).unwrap();
    let s32 = PortfolioSpec::new(vec![b32], CorrelationMatrix::identity(1), 0.5f32, 24.0).unwrap();
    let r64 = optimize_portfolio(&s64, &OptimizerConfig::default()).unwrap();
    let r32 = optimize_portfolio(&s32, &OptimizerConfig::default()).unwrap();
    let rel = (r32.cost.total as f64 - r64.cost.total).abs() / r64.cost.total;
    assert!(rel < 1e-4, "{rel}");
    let rel_t =
        (r32.schedule.times()[0] as f64 - r64.schedule.times()[0]).abs() / r64.schedule.times()[0];
    assert!(rel_t < 1e-2, "{rel_t}");
}
