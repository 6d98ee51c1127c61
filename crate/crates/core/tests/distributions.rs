use snep_validation::{adaptive_simpson, gauss, tn_cdf_quadrature};
use proptest::prelude::*;
use snep_core::*;

fn r_factor() -> RandomFactor<f64> {
    RandomFactor64::truncated_normal(0.0, 0.25, -0.5, 0.5).unwrap()
}

fn s_factor() -> RandomFactor<f64> {
    RandomFactor64::truncated_normal(5000.0, 10.0, 4950.0, 5050.0).unwrap()
}

#[test]
fn cdf_examples() {
    let u = RandomFactor64::uniform(0.0, 1.0).unwrap();
    assert!((u.cdf(0.3) - 0.3).abs() < 1e-15);
    assert!((r_factor().cdf(0.0) - 0.5).abs() < 1e-15);
    let want = tn_cdf_quadrature(5000.0, 10.0, 4950.0, 5050.0, 5010.0);
    assert!((s_factor().cdf(5010.0) - want).abs() < 1e-8);
}

#[test]
fn cdf_matches_quadrature_across_support() {
    for (f, mu, sigma, lo, hi) in [(r_factor(), 0.0, 0.25, -0.5, 0.5), (s_factor(), 5000.0, 10.0, 4950.0, 5050.0)] {
        for k in 0..=40 {
            let x = lo + (hi - lo) * k as f64 / 40.0;
            let want = tn_cdf_quadrature(mu, sigma, lo, hi, x);
            assert!((f.cdf(x) - want).abs() < 1e-10, "x={x}");
        }
    }
}

#[test]
fn cdf_boundaries() {
    for f in [r_factor(), s_factor(), RandomFactor64::uniform(-2.0, 3.0).unwrap()] {
        let (lo, hi) = f.support();
        assert_eq!(f.cdf(lo), 0.0);
        assert_eq!(f.cdf(lo - 1.0), 0.0);
        assert_eq!(f.cdf(hi), 1.0);
        assert_eq!(f.cdf(hi + 1.0), 1.0);
    }
    let c = RandomFactor64::constant(7.0).unwrap();
    assert_eq!(c.cdf(6.999), 0.0);
    assert_eq!(c.cdf(7.0), 1.0);
}

#[test]
fn cell_probability_examples() {
    let u = RandomFactor64::uniform(0.0, 1.0).unwrap();
    assert!((u.cell_probability(0.2, 0.5) - 0.3).abs() < 1e-15);
    assert!((r_factor().cell_probability(-0.5, 0.0) - 0.5).abs() < 1e-15);
    let total = adaptive_simpson(|t| gauss(t, 0.0, 0.25), -0.5, 0.5, 1e-15);
    let want = adaptive_simpson(|t| gauss(t, 0.0, 0.25), 0.0, 0.25, 1e-15) / total;
    assert!((r_factor().cell_probability(0.0, 0.25) - want).abs() < 1e-9);
}

#[test]
fn conditional_mean_examples() {
    let u = RandomFactor64::uniform(0.0, 1.0).unwrap();
    assert!((u.cell_conditional_mean(0.2, 0.6) - 0.4).abs() < 1e-15);
    let c = RandomFactor64::constant(7.0).unwrap();
    assert_eq!(c.cell_conditional_mean(6.0, 8.0), 7.0);
    let num = adaptive_simpson(|t| t * gauss(t, 0.0, 0.25), 0.0, 0.5, 1e-15);
    let den = adaptive_simpson(|t| gauss(t, 0.0, 0.25), 0.0, 0.5, 1e-15);
    assert!((r_factor().cell_conditional_mean(0.0, 0.5) - num / den).abs() < 1e-8);
}

#[test]
fn conditional_mean_matches_quadrature_on_many_cells() {
    let p = make_partition(&s_factor(), 25, RepresentativeRule::ConditionalMean).unwrap();
    for k in 0..p.cells() {
        let (a, b) = p.cell_bounds(k);
        let num = adaptive_simpson(|t| t * gauss(t, 5000.0, 10.0), a, b, 1e-12);
        let den = adaptive_simpson(|t| gauss(t, 5000.0, 10.0), a, b, 1e-12);
        assert!((p.representatives()[k] - num / den).abs() < 1e-8, "cell {k}");
    }
}

#[test]
fn partition_examples() {
    let u = RandomFactor64::uniform(0.0, 1.0).unwrap();
    let p = make_partition(&u, 4, RepresentativeRule::LowerEndpoint).unwrap();
    assert_eq!(p.breakpoints(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
    assert_eq!(p.representatives(), &[0.0, 0.25, 0.5, 0.75]);
    for &w in p.probabilities() {
        assert!((w - 0.25).abs() < 1e-15);
    }
    let c = RandomFactor64::constant(5000.0).unwrap();
    for n in [1, 7, 20_000] {
        let p = make_partition(&c, n, RepresentativeRule::LowerEndpoint).unwrap();
        assert_eq!(p.cells(), 1);
        assert_eq!(p.representatives(), &[5000.0]);
        assert_eq!(p.probabilities(), &[1.0]);
    }
    assert!(make_partition(&u, 0, RepresentativeRule::LowerEndpoint).is_err());

    let p = make_partition(&r_factor(), 200, RepresentativeRule::LowerEndpoint).unwrap();
    let total: f64 = compensated_sum(p.probabilities().iter().copied());
    assert!((total - 1.0).abs() < 1e-12);
    for k in 0..100 {
        let a = p.probabilities()[k];
        let b = p.probabilities()[199 - k];
        assert!((a - b).abs() < 1e-15, "cell {k}");
    }
    let total = adaptive_simpson(|t| gauss(t, 0.0, 0.25), -0.5, 0.5, 1e-15);
    for k in [0, 57, 100, 199] {
        let (a, b) = p.cell_bounds(k);
        let want = adaptive_simpson(|t| gauss(t, 0.0, 0.25), a, b, 1e-15) / total;
        assert!((p.probabilities()[k] - want).abs() < 1e-12);
    }
}

#[test]
fn refinement_splits_probabilities() {
    for f in [r_factor(), s_factor()] {
        let coarse = make_partition(&f, 50, RepresentativeRule::LowerEndpoint).unwrap();
        let fine = make_partition(&f, 100, RepresentativeRule::LowerEndpoint).unwrap();
        for k in 0..50 {
            let children = fine.probabilities()[2 * k] + fine.probabilities()[2 * k + 1];
            assert!((coarse.probabilities()[k] - children).abs() < 1e-12);
        }
    }
}

#[test]
fn step_approximation_error_decreases() {
    for f in [r_factor(), s_factor(), RandomFactor64::uniform(0.0, 1.0).unwrap()] {
        let errs: Vec<f64> = [10, 100, 1000]
            .iter()
            .map(|&n| {
                let p = make_partition(&f, n, RepresentativeRule::LowerEndpoint).unwrap();
                step_approximation_error(&p).unwrap()
            })
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    }
    // Lower endpoints on a uniform factor miss by half a cell on average.
    let p = make_partition(&RandomFactor64::uniform(0.0, 1.0).unwrap(), 10, RepresentativeRule::LowerEndpoint).unwrap();
    assert!((step_approximation_error(&p).unwrap() - 0.05).abs() < 1e-12);
}

#[test]
fn single_precision_factors() {
    let f = RandomFactor::<f32>::truncated_normal(0.0, 0.25, -0.5, 0.5).unwrap();
    assert!((f.cdf(0.0) - 0.5).abs() < 1e-6);
    let p = make_partition(&f, 100, RepresentativeRule::LowerEndpoint).unwrap();
    let total: f32 = p.probabilities().iter().sum();
    assert!((total - 1.0).abs() < 1e-5);
}

proptest! {
    #[test]
    fn cdf_is_monotone(x in -1.0f64..1.0, dx in 0.0f64..0.5) {
        let f = r_factor();
        prop_assert!(f.cdf(x) <= f.cdf(x + dx));
        prop_assert!((0.0..=1.0).contains(&f.cdf(x)));
    }

    #[test]
    fn conditional_mean_stays_in_cell(a in 4940.0f64..5060.0, w in 1e-6f64..50.0) {
        let f = s_factor();
        let m = f.cell_conditional_mean(a, a + w);
        prop_assert!(m >= a && m <= a + w);
    }

    #[test]
    fn partitions_are_valid(n in 1usize..500, rule in 0u8..3) {
        let rule = [RepresentativeRule::LowerEndpoint, RepresentativeRule::ConditionalMean, RepresentativeRule::Midpoint][rule as usize];
        let p = make_partition(&s_factor(), n, rule).unwrap();
        prop_assert_eq!(p.cells(), n);
        prop_assert!(p.breakpoints().windows(2).all(|w| w[0] < w[1]));
        let total = compensated_sum(p.probabilities().iter().copied());
        prop_assert!((total - 1.0).abs() < 1e-12);
        for k in 0..n {
            let (a, b) = p.cell_bounds(k);
            prop_assert!(p.representatives()[k] >= a && p.representatives()[k] <= b);
            prop_assert!(p.probabilities()[k] >= 0.0);
        }
    }

    #[test]
    fn quantile_inverts_cdf(u in 0.0f64..1.0) {
        for f in [r_factor(), s_factor()] {
            let x = f.quantile(u);
            prop_assert!((f.cdf(x) - u).abs() < 1e-10);
        }
    }
}
