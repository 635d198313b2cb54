use cbkit::oracle::{
    char_by_pruning, geometry_check, geometry_check_forest, prune, prune_forest,
    prune_forest_steps, prune_steps, restriction_check, survives, verify_forest, VerifyOptions,
};
use cbkit::realize::{
    embed_ordinal, materialize, realize_cluster, realize_multi, RadiusSchedule, SideRule,
};
use cbkit::{CbChar, ClusterTree, ClusterTreeF64, Ordinal, Rational, RealizationConfig, Scalar};
use num_rational::Ratio;

fn o(s: &str) -> Ordinal {
    s.parse().unwrap()
}

fn int(n: i64) -> Rational {
    Rational::from_int(n)
}

fn cfg(m: usize, depth: usize) -> RealizationConfig {
    RealizationConfig::default()
        .with_children(m)
        .with_depth(depth)
}

fn nodes_with_ranks(t: &ClusterTree, out: &mut Vec<(Rational, Ordinal)>) {
    out.push((t.center.clone(), t.rank.clone()));
    for c in &t.children {
        nodes_with_ranks(c, out);
    }
}

#[test]
fn pruning_agrees_with_symbolic_characteristics() {
    for n in 0..=5u64 {
        for p in 1..=3usize {
            let forest: Vec<ClusterTree> = realize_multi(&Ordinal::from(n), p, &cfg(3, 6)).unwrap();
            let symbolic = CbChar::new(Ordinal::from(n), p as u64).unwrap();
            assert_eq!(
                char_by_pruning(&forest, 32).unwrap(),
                symbolic,
                "n = {n}, p = {p}"
            );
        }
    }
}

#[test]
fn derivative_examples_by_pruning() {
    // (1, 2) -> (0, 2)
    let pair: Vec<ClusterTree> = realize_multi(&Ordinal::one(), 2, &cfg(4, 6)).unwrap();
    let derived = prune_forest(&pair);
    assert_eq!(char_by_pruning(&derived, 8).unwrap(), CbChar::finite(2));
    assert_eq!(
        CbChar::new(Ordinal::one(), 2).unwrap().derivative(),
        CbChar::finite(2)
    );

    // (ω, 1) -> (ω, 1): the root and every materialized child of rank ≥ 1
    // survive, and the root still accumulates children.
    let omega: ClusterTree = embed_ordinal(&Ordinal::omega(), &cfg(4, 3)).unwrap();
    let derived = prune(&omega);
    assert_eq!(derived.len(), 1);
    assert_eq!(derived[0].children.len(), 4);
    assert!(survives(&derived[0], 1));
}

#[test]
fn omega_cluster_stays_infinite_at_every_finite_stage() {
    let omega: ClusterTree = embed_ordinal(&Ordinal::omega(), &cfg(3, 3)).unwrap();
    for k in 0..=10 {
        let derived = prune_steps(&omega, k);
        assert_eq!(derived.len(), 1, "stage {k}");
        assert!(survives(&derived[0], 1), "stage {k}");
    }
    let s = CbChar::new(Ordinal::omega(), 1).unwrap();
    assert_eq!(s.derivative_steps(&Ordinal::omega()), CbChar::finite(1));
    for k in 0..=10u64 {
        assert_eq!(s.derivative_steps(&Ordinal::from(k)), s);
    }
}

#[test]
fn single_step_survivors_match_derivative_prediction() {
    for rank in ["1", "2", "4", "w", "w+1", "w*2", "w^(2)", "w^(w)"] {
        let tree: ClusterTree = realize_cluster(int(0), int(1), &o(rank), &cfg(3, 4)).unwrap();
        let mut all = Vec::new();
        nodes_with_ranks(&tree, &mut all);
        for k in 1..=3u32 {
            let survivors: Vec<Rational> = prune_steps(&tree, k)
                .iter()
                .flat_map(|t| t.centers())
                .collect();
            for (center, node_rank) in &all {
                let predicted = CbChar::new(node_rank.clone(), 1)
                    .unwrap()
                    .derivative_steps(&Ordinal::from(u64::from(k)));
                assert_eq!(
                    survivors.contains(center),
                    !predicted.is_empty(),
                    "rank {rank}, node rank {node_rank}, stage {k}"
                );
            }
        }
    }
}

#[test]
fn union_cross_check_on_disjoint_forests() {
    let samples = [(0, 0), (1, 1), (2, 1), (3, 2), (0, 4), (2, 3)];
    for (i, &(a, b)) in samples.iter().enumerate() {
        let config = cfg(3, 5);
        let left: ClusterTree =
            realize_cluster(int(0), int(1), &Ordinal::from(a), &config).unwrap();
        let right: ClusterTree =
            realize_cluster(int(10), int(1), &Ordinal::from(b), &config).unwrap();
        let forest = vec![left, right];
        let ca = CbChar::new(Ordinal::from(a), 1).unwrap();
        let cb = CbChar::new(Ordinal::from(b), 1).unwrap();
        assert_eq!(
            char_by_pruning(&forest, 32).unwrap(),
            ca.union(&cb),
            "sample {i}"
        );
        assert!(geometry_check_forest(&forest).ok());
    }
}

#[test]
fn pruning_steps_compose() {
    let tree: ClusterTree = realize_cluster(int(0), int(1), &o("5"), &cfg(3, 6)).unwrap();
    for a in 0..4 {
        for b in 0..4 {
            assert_eq!(
                prune_steps(&tree, a + b),
                prune_forest_steps(&prune_steps(&tree, a), b)
            );
        }
    }
}

#[test]
fn geometry_holds_for_every_config() {
    let configs = [
        cfg(4, 6),
        RealizationConfig {
            side_rule: SideRule::Alternate,
            ..cfg(3, 5)
        },
        RealizationConfig {
            side_rule: SideRule::Left,
            radius_schedule: RadiusSchedule::Geometric(3),
            ..cfg(3, 5)
        },
    ];
    let mut checked_nodes = 0;
    for config in &configs {
        for rank in ["0", "1", "3", "w", "w+1", "w^(2)", "w^(w)"] {
            let forest: Vec<ClusterTree> = realize_multi(&o(rank), 2, config).unwrap();
            let report = geometry_check_forest(&forest);
            assert!(
                report.ok(),
                "rank {rank}: {:?}",
                report.first_counterexample()
            );
            checked_nodes += forest.iter().map(ClusterTree::node_count).sum::<usize>();
        }
    }
    assert!(checked_nodes >= 1000, "{checked_nodes}");
}

#[test]
fn restriction_identity_on_realized_trees() {
    for rank in ["1", "2", "3", "w", "w+1"] {
        let tree: ClusterTree = realize_cluster(int(0), int(1), &o(rank), &cfg(4, 4)).unwrap();
        for n in 0..4 {
            for beta in 0..=3 {
                assert_eq!(
                    restriction_check(&tree, n, beta),
                    Ok(true),
                    "{rank} n={n} beta={beta}"
                );
            }
        }
    }
}

#[test]
fn realization_is_deterministic() {
    let a: Vec<ClusterTree> = realize_multi(&o("w^(2)+1"), 3, &cfg(4, 4)).unwrap();
    let b: Vec<ClusterTree> = realize_multi(&o("w^(2)+1"), 3, &cfg(4, 4)).unwrap();
    assert_eq!(a, b);
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}

#[test]
fn scalar_backends_agree() {
    let rank = o("w+2");
    let config = cfg(3, 4);
    let exact: ClusterTree = realize_cluster(int(0), int(1), &rank, &config).unwrap();
    let float: ClusterTreeF64 = realize_cluster(0.0, 1.0, &rank, &config).unwrap();
    let wide: cbkit::realize::ClusterTree<Ratio<i128>> = realize_cluster(
        Ratio::from_integer(0),
        Ratio::from_integer(1),
        &rank,
        &config,
    )
    .unwrap();
    let exact_json = serde_json::to_string(&exact).unwrap();
    assert_eq!(serde_json::to_string(&float).unwrap(), exact_json);
    assert_eq!(serde_json::to_string(&wide).unwrap(), exact_json);
    assert!(geometry_check(&float).ok());
    assert_eq!(
        materialize(&float, 3, 3).to_csv(),
        materialize(&exact, 3, 3).to_csv()
    );
}

#[test]
fn verify_report_for_limit_ranks() {
    let forest: Vec<ClusterTree> = realize_multi(&o("w*2"), 2, &cfg(3, 3)).unwrap();
    let report = verify_forest(&forest, &VerifyOptions::default());
    assert!(report.ok);
    assert_eq!(
        report.char_expected,
        Some(CbChar::new(o("w*2"), 2).unwrap())
    );
    assert_eq!(report.char_pruned, None);
}
