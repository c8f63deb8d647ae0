use proptest::prelude::*;
use retainer_core::erlang::*;

/// Loss by direct summation of `rho^k / k!`, in log space to keep large `c` finite.
fn loss_by_sum(rho: f64, c: u64) -> f64 {
    let terms: Vec<f64> = (0..=c)
        .scan(0.0f64, |acc, k| {
            if k > 0 {
                *acc += rho.ln() - (k as f64).ln();
            }
            Some(*acc)
        })
        .collect();
    let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let denom: f64 = terms.iter().map(|t| (t - top).exp()).sum();
    (terms[c as usize] - top).exp() / denom
}

proptest! {
    #[test]
    fn loss_is_a_probability(rho in 0.0f64..500.0, c in 0u64..600) {
        let p = erlang_loss(rho, c).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn loss_matches_direct_sum(rho in 0.01f64..80.0, c in 1u64..120) {
        let p = erlang_loss(rho, c).unwrap();
        let q = loss_by_sum(rho, c);
        prop_assert!((p - q).abs() <= 1e-11 * q.max(1e-300), "{p} vs {q}");
    }

    #[test]
    fn loss_decreases_in_c_and_increases_in_rho(rho in 0.1f64..50.0, c in 1u64..100) {
        let p = erlang_loss(rho, c).unwrap();
        prop_assert!(erlang_loss(rho, c + 1).unwrap() < p);
        prop_assert!(erlang_loss(rho * 1.1, c).unwrap() > p);
    }

    #[test]
    fn log_loss_agrees(rho in 0.1f64..200.0, c in 0u64..400) {
        let p = erlang_loss(rho, c).unwrap();
        let lp = ln_erlang_loss(rho, c).unwrap();
        if p > 1e-280 {
            prop_assert!((lp.exp() - p).abs() <= 1e-10 * p);
        }
    }

    #[test]
    fn busy_distribution_is_consistent(rho in 0.0f64..60.0, c in 0u64..80) {
        let dist = busy_distribution(rho, c).unwrap();
        prop_assert_eq!(dist.len() as u64, c + 1);
        let total: f64 = dist.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let loss = erlang_loss(rho, c).unwrap();
        prop_assert!((dist[c as usize] - loss).abs() <= 1e-12 * loss.max(1e-300) + 1e-300);
        let mean: f64 = dist.iter().enumerate().map(|(i, p)| i as f64 * p).sum();
        let busy = expected_busy(rho, c).unwrap();
        prop_assert!((mean - busy).abs() <= 1e-9 * busy.max(1.0));
        let idle = expected_idle(rho, c).unwrap();
        prop_assert!(idle >= 0.0 && idle <= c as f64);
        prop_assert!((idle + busy - c as f64).abs() <= 1e-9 * (c as f64).max(1.0));
    }

    #[test]
    fn merged_pool_never_loses_more(rho in 0.1f64..20.0, c in 1u64..30, k in 2u64..10) {
        let single = erlang_loss(rho, c).unwrap();
        let merged = combined_pool_loss(rho, c, k).unwrap().exact;
        prop_assert!(merged <= single);
    }

    #[test]
    fn abandonment_bound_is_capped(a in 0.0f64..1.0, rho in 0.0f64..20.0, c in 0u64..30) {
        let b = abandonment_adjusted_loss(a, rho, c).unwrap();
        prop_assert!(b <= 1.0 && b >= a);
    }
}

#[test]
fn wait_scales_loss_by_mean_recruitment_time() {
    let w = expected_wait(1.0, 0.5, 4).unwrap();
    assert!((w - 2.0 * erlang_loss(2.0, 4).unwrap()).abs() < 1e-15);
}
