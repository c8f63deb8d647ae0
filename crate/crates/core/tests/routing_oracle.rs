use proptest::prelude::*;
use retainer_core::router::*;

/// Optimal worst-case intensity by Hall's condition: the demand of every task
/// subset must fit into the supply of the groups that can serve it.
fn hall_optimum(lambdas: &[f64], mus: &[f64], caps: &[Vec<usize>]) -> f64 {
    let n = lambdas.len();
    let mut best = 0.0f64;
    for mask in 1u32..(1 << n) {
        let demand: f64 = (0..n).filter(|j| mask & (1 << j) != 0).map(|j| lambdas[j]).sum();
        let supply: f64 = caps
            .iter()
            .zip(mus)
            .filter(|(c, _)| c.iter().any(|&j| mask & (1 << j) != 0))
            .map(|(_, m)| m)
            .sum();
        best = best.max(demand / supply);
    }
    best
}

/// Per-task intensities of the lexicographically best plan: peel off the
/// tightest Hall set (the union of all subsets attaining the worst ratio)
/// together with its neighbours, then repeat on what is left.
fn peeled_levels(lambdas: &[f64], mus: &[f64], caps: &[Vec<usize>]) -> Vec<f64> {
    let n = lambdas.len();
    let mut level = vec![f64::NAN; n];
    let mut tasks: u32 = (1 << n) - 1;
    let mut groups: Vec<bool> = vec![true; mus.len()];
    while tasks != 0 {
        let ratio = |mask: u32| {
            let demand: f64 = (0..n).filter(|j| mask & (1 << j) != 0).map(|j| lambdas[j]).sum();
            let supply: f64 = (0..mus.len())
                .filter(|&i| groups[i] && caps[i].iter().any(|&j| mask & (1 << j) != 0))
                .map(|i| mus[i])
                .sum();
            demand / supply
        };
        let subsets = (1u32..=tasks).filter(|m| m & !tasks == 0 && *m != 0);
        let best = subsets.clone().map(ratio).fold(0.0, f64::max);
        let tight = subsets.filter(|&m| ratio(m) >= best * (1.0 - 1e-12)).fold(0, |a, m| a | m);
        for j in 0..n {
            if tight & (1 << j) != 0 {
                level[j] = best;
            }
        }
        for (i, c) in caps.iter().enumerate() {
            if c.iter().any(|&j| tight & (1 << j) != 0) {
                groups[i] = false;
            }
        }
        tasks &= !tight;
    }
    level
}

fn instance(lambdas: &[f64], mus: &[f64], caps: &[Vec<usize>]) -> RoutingInstance {
    RoutingInstance::new(
        lambdas
            .iter()
            .enumerate()
            .map(|(j, &lambda)| TaskType { id: format!("t{j}"), lambda })
            .collect(),
        mus.iter()
            .zip(caps)
            .enumerate()
            .map(|(i, (&mu, c))| WorkerGroup {
                id: format!("g{i}"),
                mu,
                capabilities: c.iter().map(|j| format!("t{j}")).collect(),
            })
            .collect(),
    )
}

fn random_instance() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<Vec<usize>>)> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec(0.05f64..5.0, n),
            prop::collection::vec(0.05f64..5.0, m),
            prop::collection::vec(1u32..(1 << n), m),
        )
            .prop_filter_map("every task needs a group", move |(l, mu, masks)| {
                let covered = masks.iter().fold(0, |a, m| a | m);
                (covered == (1 << n) - 1).then(|| {
                    let caps = masks
                        .iter()
                        .map(|m| (0..n).filter(|j| m & (1 << j) != 0).collect())
                        .collect();
                    (l, mu, caps)
                })
            })
    })
}

proptest! {
    #[test]
    fn optimum_matches_hall_bound((l, mu, caps) in random_instance()) {
        let inst = instance(&l, &mu, &caps);
        let plan = min_max_intensity(&inst).unwrap();
        let oracle = hall_optimum(&l, &mu, &caps);
        prop_assert!((plan.worst_rho - oracle).abs() <= 1e-9 * oracle, "{} vs {oracle}", plan.worst_rho);

        for (i, g) in inst.groups.iter().enumerate() {
            let used: f64 = plan.assignments.iter().filter(|a| a.group == g.id).map(|a| a.rate).sum();
            prop_assert!(used <= mu[i] + 1e-9);
        }
        for a in &plan.assignments {
            prop_assert!(a.rate >= 0.0);
            let g = inst.groups.iter().find(|g| g.id == a.group).unwrap();
            prop_assert!(a.rate == 0.0 || g.capabilities.contains(&a.task));
        }
        let max_task = plan.per_task_rho.iter().map(|t| t.rho).fold(0.0, f64::max);
        prop_assert!((plan.worst_rho - max_task).abs() <= 1e-9);

        let levels = peeled_levels(&l, &mu, &caps);
        for (t, want) in plan.per_task_rho.iter().zip(&levels) {
            prop_assert!((t.rho - want).abs() <= 1e-7 * want, "{}: {} vs {want}", t.task, t.rho);
        }

        let random = random_assignment(&inst).unwrap();
        prop_assert!(random.worst_rho >= plan.worst_rho * (1.0 - 1e-9));

        prop_assert!(feasible_assignment(&inst, oracle * 1.001).unwrap().is_some());
        prop_assert!(feasible_assignment(&inst, oracle * 0.999).unwrap().is_none());
    }
}

#[test]
fn spare_capacity_goes_to_non_bottleneck_tasks() {
    // t0 is starved by its single slow group; t1 and t2 share the rest
    let inst = instance(&[1.0, 1.0, 1.0], &[0.5, 0.5, 2.0], &[vec![0], vec![1, 2], vec![1, 2]]);
    let plan = min_max_intensity(&inst).unwrap();
    assert!((plan.worst_rho - 2.0).abs() < 1e-12);
    assert!((plan.task_rho("t0").unwrap() - 2.0).abs() < 1e-12);
    assert!((plan.task_rho("t1").unwrap() - 0.8).abs() < 1e-9);
    assert!((plan.task_rho("t2").unwrap() - 0.8).abs() < 1e-9);
}

#[test]
fn uncovered_task_is_named() {
    let inst = instance(&[1.0, 1.0], &[1.0], &[vec![0]]);
    let err = min_max_intensity(&inst).unwrap_err();
    assert!(err.to_string().contains("t1"), "{err}");
}

#[test]
fn fully_connected_pools_all_supply() {
    let inst = instance(&[1.0, 2.0, 0.5], &[1.0, 3.0], &[vec![0, 1, 2], vec![0, 1, 2]]);
    let plan = min_max_intensity(&inst).unwrap();
    assert!((plan.worst_rho - 3.5 / 4.0).abs() < 1e-9);
}
