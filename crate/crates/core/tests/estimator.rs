mod common;

use grp_core::{
    ce_maximize, evaluate, fit_mle, generate, BoxDomain, CeConfig, Event, EventHistory, FitSpace,
    GenerationConfig, RestorationFactors, WeibullParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn truth() -> (WeibullParams, RestorationFactors) {
    (
        WeibullParams::from_theta(1.0, 2.2).unwrap(),
        RestorationFactors::new(0.8, 0.3).unwrap(),
    )
}

#[test]
fn pinned_zero_factors_reproduce_ordinary_weibull_mle() {
    // i.i.d. failures from Weibull(theta = 2, b = 1.5).
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let times: Vec<f64> = (0..200)
        .map(|_| {
            let u: f64 = rng.random();
            2.0 * (-(1.0 - u).ln()).powf(1.0 / 1.5)
        })
        .collect();
    let history = EventHistory::single(times.iter().map(|&t| Event::cm(t).unwrap()).collect());
    let space = FitSpace {
        fixed_q_pm: Some(0.0),
        fixed_q_cm: Some(0.0),
        starts: 2,
        ..FitSpace::default()
    };
    let fit = fit_mle(&history, &space, &CeConfig::default()).unwrap();
    let (a, b) = common::weibull_mle(&times, (0.1, 10.0));
    assert!((fit.params.b() - b).abs() <= 1e-3, "b {} vs {b}", fit.params.b());
    assert!((fit.params.a() - a).abs() <= 1e-3, "a {} vs {a}", fit.params.a());
}

#[test]
fn fit_dominates_the_generating_parameters() {
    let (p, f) = truth();
    for seed in [3_u64, 4] {
        let history = generate(&GenerationConfig {
            params: p,
            factors: f,
            k_cm: 1.0,
            events_per_item: 100,
            n_items: 1,
            seed,
        })
        .unwrap();
        let ce = CeConfig {
            seed: seed * 7,
            ..CeConfig::default()
        };
        let fit = fit_mle(&history, &FitSpace::default(), &ce).unwrap();
        let at_truth = evaluate(&history, &p, &f).unwrap();
        assert!(fit.log_likelihood >= at_truth - 1e-3, "{} < {at_truth}", fit.log_likelihood);

        let recomputed = evaluate(&history, &fit.params, &fit.factors).unwrap();
        assert!((recomputed - fit.log_likelihood).abs() <= 1e-9);
        let best = fit
            .per_start
            .iter()
            .map(|s| s.log_likelihood)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((best - fit.log_likelihood).abs() <= 1e-9);
        assert!(fit.per_start.iter().all(|s| s.log_likelihood <= fit.log_likelihood + 1e-9));
        assert_eq!(fit.per_start.len(), 5);
    }
}

#[test]
fn evaluate_is_parameterization_invariant() {
    let (p, f) = truth();
    let history = generate(&GenerationConfig {
        params: p,
        factors: f,
        k_cm: 1.0,
        events_per_item: 50,
        n_items: 2,
        seed: 12,
    })
    .unwrap();
    let by_a = evaluate(&history, &WeibullParams::new(0.37, 1.9).unwrap(), &f).unwrap();
    let theta = WeibullParams::new(0.37, 1.9).unwrap().theta();
    let by_theta = evaluate(&history, &WeibullParams::from_theta(theta, 1.9).unwrap(), &f).unwrap();
    assert!((by_a - by_theta).abs() <= 1e-9);
    assert_eq!(evaluate(&EventHistory::default(), &p, &f).unwrap(), 0.0);
}

#[test]
fn ce_matches_a_two_dimensional_grid() {
    // Profile over (ln a, b) with factors pinned; cheap enough for a dense grid.
    let (p, f) = truth();
    let history = generate(&GenerationConfig {
        params: p,
        factors: f,
        k_cm: 1.0,
        events_per_item: 30,
        n_items: 1,
        seed: 8,
    })
    .unwrap();
    let objective = |x: &[f64]| {
        let p = WeibullParams::new(x[0].exp(), x[1]).unwrap();
        evaluate(&history, &p, &f).unwrap_or(f64::NAN)
    };
    let (lo, hi) = ([-3.0, 0.5], [3.0, 6.0]);
    let domain = BoxDomain::new(lo.to_vec(), hi.to_vec()).unwrap();
    let out = ce_maximize(objective, &domain, &CeConfig::default()).unwrap();
    let (_, grid) = common::grid_maximum(&objective, &lo, &hi, 200, 6, 21);
    assert!((out.best_value - grid).abs() <= 1e-3, "ce {} grid {grid}", out.best_value);
}

#[test]
fn deterministic_given_seeds() {
    let (p, f) = truth();
    let history = generate(&GenerationConfig {
        params: p,
        factors: f,
        k_cm: 1.0,
        events_per_item: 40,
        n_items: 1,
        seed: 2,
    })
    .unwrap();
    let space = FitSpace {
        starts: 2,
        ..FitSpace::default()
    };
    let ce = CeConfig {
        population: 300,
        seed: 9,
        ..CeConfig::default()
    };
    assert_eq!(fit_mle(&history, &space, &ce).unwrap(), fit_mle(&history, &space, &ce).unwrap());
}
