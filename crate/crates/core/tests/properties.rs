mod common;

use std::collections::BTreeSet;

use comconceal::graph::{intra_edges, Graph, Partition};
use comconceal::metrics::{self, EcsParams, ModularityContext};
use comconceal::perturb::{self, PerturbSpec};
use comconceal::seeding;
use common::*;
use proptest::prelude::*;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(proptest::bool::weighted(0.35), n * (n - 1) / 2).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut i = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[i] {
                        edges.push((u, v));
                    }
                    i += 1;
                }
            }
            Graph::new(n, &edges).unwrap()
        })
    })
}

fn graph_and_partition(max_n: usize, max_k: usize) -> impl Strategy<Value = (Graph, Partition)> {
    graph_strategy(max_n).prop_flat_map(move |g| {
        let n = g.n();
        (Just(g), proptest::collection::vec(0..max_k, n).prop_map(Partition::new))
    })
}

proptest! {
    #[test]
    fn handshake(g in graph_strategy(20)) {
        prop_assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.m());
    }

    #[test]
    fn modularity_forms_and_null_rows((g, p) in graph_and_partition(20, 5)) {
        prop_assume!(g.m() > 0);
        let q = metrics::modularity(&g, &p).unwrap();
        prop_assert!((q - metrics::spectral_modularity(&g, &p.membership_matrix()).unwrap()).abs() <= 1e-10);
        prop_assert!((q - oracle_modularity(&g, &p)).abs() <= 1e-10);
        let ctx = ModularityContext::new(&g).unwrap();
        for (i, row) in ctx.b.rows().into_iter().enumerate() {
            prop_assert!(row.sum().abs() <= 1e-10);
            for j in 0..g.n() {
                prop_assert_eq!(ctx.b[[i, j]], ctx.b[[j, i]]);
            }
        }
    }

    #[test]
    fn ecs_symmetry_and_relabeling(
        a in proptest::collection::vec(0usize..4, 1..15),
        shift in 1usize..10,
        seed in any::<u64>(),
    ) {
        let n = a.len();
        let pa = Partition::new(a.clone());
        let mut rng = seeding::rng(seed);
        let pb = random_partition(&mut rng, n, 4);
        let params = EcsParams::default();
        let ab = metrics::element_centric_similarity(&pa, &pb, params).unwrap();
        let ba = metrics::element_centric_similarity(&pb, &pa, params).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&ab));
        let relabeled = Partition::new(a.iter().map(|&l| (l + shift) * 7).collect());
        prop_assert!((metrics::element_centric_similarity(&pa, &relabeled, params).unwrap() - 1.0).abs() <= 1e-12);
        let identical = (0..n).all(|u| (0..n).all(|v| (pa.label(u) == pa.label(v)) == (pb.label(u) == pb.label(v))));
        prop_assert_eq!(identical, (ab - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn concealment_ranges((g, truth) in graph_and_partition(15, 4), detected in proptest::collection::vec(0usize..6, 15)) {
        let n = g.n();
        let detected = Partition::new(detected[..n].to_vec());
        let target = truth.members(0);
        let m1 = metrics::m1(&target, &detected).unwrap();
        let m2 = metrics::m2(&target, &detected, n).unwrap();
        prop_assert!((0.0..=1.0).contains(&m1));
        prop_assert!((0.0..=1.0).contains(&m2));
    }

    #[test]
    fn dice_accounting_and_locality(
        (g, p) in graph_and_partition(14, 3),
        beta_b in 0.0f64..=1.0,
        del in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let target = p.members(0);
        let spec = PerturbSpec::new(target.clone(), beta_b, del).unwrap();
        let r = perturb::dice(&g, &spec, &mut seeding::rng(seed)).unwrap();
        prop_assert_eq!(r.graph.m(), g.m() - r.deleted.len() + r.added.len());
        prop_assert!(r.deleted.len() + r.added.len() <= r.budget.total);
        let intra: BTreeSet<_> = intra_edges(&g, &target).unwrap().into_iter().collect();
        let inside: BTreeSet<usize> = target.iter().copied().collect();
        for e in &r.deleted {
            prop_assert!(intra.contains(e));
        }
        for &(u, v) in &r.added {
            prop_assert!(inside.contains(&u) != inside.contains(&v));
            prop_assert!(!g.has_edge(u, v));
        }
        // edges with no endpoint in the target are untouched
        let outside = |e: &(usize, usize)| !inside.contains(&e.0) && !inside.contains(&e.1);
        let before: Vec<_> = g.edges().iter().filter(|e| outside(e)).collect();
        let after: Vec<_> = r.graph.edges().iter().filter(|e| outside(e)).collect();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn fcom_dice_edits_stay_on_target(
        (g, p) in graph_and_partition(14, 3),
        beta_b in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        prop_assume!(p.k() >= 2);
        let mut rng = seeding::rng(seed);
        let x = random_features(&mut rng, g.n(), 3);
        let target = p.members(0);
        let spec = PerturbSpec::new(target.clone(), beta_b, 0.5).unwrap();
        let index = perturb::community_centroids(&x, &p).unwrap();
        let r = perturb::fcom_dice(&g, &x, &p, &index, &spec, &mut rng).unwrap();
        let x2 = r.features.as_ref().unwrap();
        prop_assert_eq!(r.graph.m(), g.m() - r.deleted.len() + r.added.len());
        prop_assert!(r.deleted.len() + r.added.len() <= r.budget.total);
        let edited: BTreeSet<usize> = r.feature_edits.iter().map(|e| e.node).collect();
        for u in 0..g.n() {
            if edited.contains(&u) {
                prop_assert!(target.contains(&u));
            } else {
                prop_assert_eq!(x.row(u), x2.row(u));
            }
        }
        // a node may be drawn repeatedly; its final row is the last edit
        let mut last = std::collections::BTreeMap::new();
        for e in &r.feature_edits {
            last.insert(e.node, e.community);
        }
        for (&u, &c) in &last {
            prop_assert_eq!(x2.row(u), index.centroids.row(c));
        }
        for &(u, v) in &r.added {
            let (t, o) = if target.contains(&u) { (u, v) } else { (v, u) };
            prop_assert!(target.contains(&t) && !target.contains(&o));
        }
    }

    #[test]
    fn louvain_never_worse_than_singletons(g in graph_strategy(16), seed in any::<u64>()) {
        prop_assume!(g.m() > 0);
        let p = metrics::louvain(&g, &mut seeding::rng(seed)).unwrap();
        let q = metrics::modularity(&g, &p).unwrap();
        prop_assert!(q >= metrics::modularity(&g, &Partition::singletons(g.n())).unwrap() - 1e-12);
    }
}
