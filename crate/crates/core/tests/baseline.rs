use mindgames_core::fixtures::worked_example;
use mindgames_core::generator::{sample_critical, GeneratorParams};
use mindgames_core::metrics::{exact_baseline_probability, monte_carlo_baseline};
use mindgames_core::persuaders::DrawSchedule;
use mindgames_core::stats::analytic_win_probability;
use num_rational::BigRational;

const TRIALS: u64 = 50_000;

fn within_three_sigma(observed: f64, p: f64, trials: u64) -> bool {
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    (observed - p).abs() <= 3.0 * sigma + 1e-12
}

#[test]
fn monte_carlo_converges_per_instance() {
    let instances = sample_critical(&GeneratorParams { sample_count: 5, seed: 23, ..Default::default() }).unwrap();
    for (i, inst) in instances.iter().enumerate() {
        for schedule in [DrawSchedule::SingleMessage, DrawSchedule::RoundRobin] {
            let exact = exact_baseline_probability::<f64>(inst, 6, schedule, 8);
            let est = monte_carlo_baseline(std::slice::from_ref(inst), 6, TRIALS, 1000 * i as u64, schedule);
            assert!(
                within_three_sigma(est.rate.mean, exact, TRIALS),
                "{} {schedule:?}: observed {} exact {exact}",
                inst.id,
                est.rate.mean
            );
        }
    }
}

#[test]
fn single_draw_matches_exact_on_the_worked_example() {
    // Extra winning supersets make the example easier than the formula event.
    let inst = worked_example();
    let exact = exact_baseline_probability::<BigRational>(&inst, 1, DrawSchedule::SingleMessage, 8);
    assert_eq!(exact, analytic_win_probability::<BigRational>(1).total);
    for n in 3..=6 {
        let e = exact_baseline_probability::<f64>(&inst, n, DrawSchedule::SingleMessage, 8);
        assert!(e > analytic_win_probability::<f64>(n as u32).total, "n={n}");
    }
    let est = monte_carlo_baseline(std::slice::from_ref(&inst), 4, TRIALS, 5, DrawSchedule::SingleMessage);
    let exact = exact_baseline_probability::<f64>(&inst, 4, DrawSchedule::SingleMessage, 8);
    assert!(within_three_sigma(est.rate.mean, exact, TRIALS), "{} vs {exact}", est.rate.mean);
}

#[test]
fn zero_draws_never_win() {
    let instances = sample_critical(&GeneratorParams { sample_count: 3, seed: 1, ..Default::default() }).unwrap();
    let est = monte_carlo_baseline(&instances, 0, 300, 0, DrawSchedule::SingleMessage);
    assert_eq!(est.successes, 0);
    assert_eq!(est.rate.mean, 0.0);
}

#[test]
fn monte_carlo_is_reproducible() {
    let inst = worked_example();
    let a = monte_carlo_baseline(std::slice::from_ref(&inst), 6, 2_000, 42, DrawSchedule::RoundRobin);
    let b = monte_carlo_baseline(&[inst], 6, 2_000, 42, DrawSchedule::RoundRobin);
    assert_eq!(a, b);
}
