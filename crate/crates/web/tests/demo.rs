use retainer_web::demo::*;

#[test]
fn curves_start_with_an_empty_pool() {
    let curves = pool_curves(1.0, 0.5, 0.005, 10).unwrap();
    assert_eq!(curves.rho, 2.0);
    assert_eq!(curves.points.len(), 11);
    let first = &curves.points[0];
    assert_eq!((first.loss, first.idle, first.cost_rate), (1.0, 0.0, 0.0));
    assert!(curves.points.windows(2).all(|w| w[1].loss < w[0].loss && w[1].idle > w[0].idle));
}

#[test]
fn total_cost_minimum_is_on_the_curve() {
    let curve = total_cost_curve(1.0, 1.0, 60.0, 10.0, 12).unwrap();
    let lowest = curve.total_cost.iter().cloned().fold(f64::INFINITY, f64::min);
    assert_eq!(curve.min_cost, lowest);
    assert_eq!(curve.total_cost[curve.c_star as usize], lowest);
}

#[test]
fn simulation_tracks_closed_forms() {
    let s = simulate_pool(1.0, 0.5, 4, 100_000, 3).unwrap();
    for e in [s.empty_pool_fraction, s.mean_wait, s.mean_idle_workers] {
        assert!((e.simulated - e.analytic).abs() < 4.0 * e.se, "{e:?}");
    }
    assert_eq!(simulate_pool(1.0, 0.5, 4, 100_000, 3).unwrap().served, s.served);
}

#[test]
fn oversized_requests_are_rejected() {
    assert!(pool_curves(1.0, 1.0, 0.1, MAX_POOL + 1).is_err());
    assert!(simulate_pool(1.0, 1.0, 2, MAX_TASKS + 1, 0).is_err());
    assert!(pool_curves(-1.0, 1.0, 0.1, 5).is_err());
}
