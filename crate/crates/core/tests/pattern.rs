use padic_rds::analysis::{invariant_decomposition, RdsSpec};
use padic_rds::pattern::{generate_pattern, seed_independence_check, strip_centers, PatternConfig};
use padic_rds::{PadicInt, Rational};

fn config(p: u64, ex: &[u64], u0: i64, n: u64, seed: u64) -> PatternConfig {
    let spec = RdsSpec::uniform(p, ex).unwrap().with_seed(seed);
    let u0 = PadicInt::from_integer(u0, p, spec.precision()).unwrap();
    PatternConfig::new(spec, u0, n).unwrap()
}

/// 99% quantile of chi-square with 9 degrees of freedom.
const CHI2_9_99: f64 = 21.666;

#[test]
fn y_marginal_is_uniform() {
    let mut cfg = config(29, &[29, 2, 3], 2, 20_280, 4);
    cfg.y_bins = 10;
    cfg.y_range = (-2.0, 3.0);
    let r = generate_pattern(&cfg).unwrap();
    let marginal = r.histogram.y_marginal();
    let n: u64 = marginal.iter().sum();
    assert_eq!(n, 20_000);
    let e = n as f64 / 10.0;
    let chi2: f64 = marginal.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
    assert!(chi2 < CHI2_9_99, "chi2 = {chi2}");
    assert!(r.samples.iter().all(|&(_, y)| (-2.0..3.0).contains(&y)));
}

#[test]
fn x_samples_sit_on_strips() {
    let r = generate_pattern(&config(47, &[14, 47], 2, 4000, 9)).unwrap();
    let tol = 47f64.powi(-8);
    for &(x, _) in &r.samples {
        assert!(r.strip_centers.iter().any(|c| (c.x - x).abs() <= tol + 1e-15));
    }
    let comps = invariant_decomposition(47, &[14, 47]);
    assert_eq!(r.strip_centers, strip_centers(&RdsSpec::uniform(47, &[14, 47]).unwrap(), &comps[r.reached_component]).unwrap());
    assert!(r.max_center_gap <= Rational::new(1.into(), 47u64.pow(8).into()));
}

#[test]
fn occupancy_uniform_in_the_long_run() {
    let r = generate_pattern(&config(29, &[29, 2, 3], 2, 60_280, 21)).unwrap();
    let n: u64 = r.occupancy.iter().sum();
    let k = r.occupancy.len() as f64;
    for &c in &r.occupancy {
        // correlated samples: compare frequencies with a loose band
        assert!((c as f64 / n as f64 - 1.0 / k).abs() < 0.02, "{:?}", r.occupancy);
    }
}

#[test]
fn seeds_agree_on_strips() {
    let cfg = config(29, &[29, 2, 3], 2, 10_000, 0);
    let report = seed_independence_check(&cfg, &[3, 4, 5]).unwrap();
    assert_eq!(report.strip_centers.len(), 6);
    assert!(report.occupancies_differ);
    assert_eq!(report.strip_centers[0].exact.denom(), &num_bigint::BigInt::from(29).pow(16));
}
