mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use remixgraph::metrics::median_thresholds;
use remixgraph::{
    classify_quadrants, independence_of, independence_score, score_table, Design, DesignId, DesignScore,
    LineageGraph, Orientation, TagSet, Thresholds,
};

use common::{enumerated_independence, tag_set};

fn pool() -> Vec<String> {
    (b'a'..=b't').map(|c| (c as char).to_string()).collect()
}

fn family() -> impl Strategy<Value = Vec<BTreeSet<String>>> {
    prop::collection::vec(prop::collection::btree_set(0usize..20, 0..8), 2..=5).prop_map(|sets| {
        let pool = pool();
        sets.into_iter().map(|s| s.into_iter().map(|i| pool[i].clone()).collect()).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn independence_matches_enumeration(sets in family()) {
        let tagged: Vec<TagSet> = sets.iter().map(tag_set).collect();
        let got = independence_of(&tagged);
        let want = enumerated_independence(&pool(), &sets);
        match (got, want) {
            (Some(g), Some(w)) => prop_assert!((g - w).abs() < 1e-12),
            (g, w) => prop_assert_eq!(g, w),
        }
    }

    #[test]
    fn independence_bounds_and_extremes(sets in family()) {
        let tagged: Vec<TagSet> = sets.iter().map(tag_set).collect();
        if let Some(v) = independence_of(&tagged) {
            prop_assert!((0.0..=1.0).contains(&v));
            let all_same = sets.windows(2).all(|w| w[0] == w[1]) && !sets[0].is_empty();
            prop_assert_eq!(v == 0.0, all_same);
            let shared = sets[0].iter().any(|t| sets.iter().all(|s| s.contains(t)));
            prop_assert_eq!(v == 1.0, !shared);
        } else {
            prop_assert!(sets.iter().all(BTreeSet::is_empty));
        }
    }

    #[test]
    fn independence_ignores_parent_order(sets in family(), seed in any::<u64>()) {
        let mut g = LineageGraph::new();
        let id = |s: String| DesignId::new(s).unwrap();
        for (i, s) in sets.iter().enumerate() {
            g.add_design(Design::new(id(format!("p{i}"))).with_tags(tag_set(s))).unwrap();
        }
        let mut order: Vec<usize> = (0..sets.len()).collect();
        // cheap deterministic shuffle
        order.sort_by_key(|i| (*i as u64).wrapping_mul(seed | 1).rotate_left(17));
        g.add_design(Design::new(id("fwd".into())).with_parents((0..sets.len()).map(|i| id(format!("p{i}"))))).unwrap();
        g.add_design(Design::new(id("perm".into())).with_parents(order.iter().map(|i| id(format!("p{i}"))))).unwrap();
        prop_assert_eq!(
            independence_score(&g, &id("fwd".into())).unwrap(),
            independence_score(&g, &id("perm".into())).unwrap()
        );
    }
}

fn rows() -> impl Strategy<Value = Vec<DesignScore>> {
    prop::collection::vec((0.0f64..1.0, prop::option::weighted(0.9, 0.0f64..1.0)), 1..30).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (b, ind))| DesignScore {
                id: DesignId::new(format!("r{i:03}")).unwrap(),
                betweenness: b,
                independence: ind,
                quadrant: None,
            })
            .collect()
    })
}

fn high_b(r: &DesignScore) -> bool {
    use remixgraph::Quadrant::*;
    matches!(r.quadrant, Some(Q2) | Some(Q4))
}

fn high_i(r: &DesignScore) -> bool {
    use remixgraph::Quadrant::*;
    matches!(r.quadrant, Some(Q3) | Some(Q4))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn raising_a_threshold_never_promotes(table in rows(), tb in 0.0f64..1.0, ti in 0.0f64..1.0, bump in 0.0f64..0.5) {
        let base = classify_quadrants(&table, Some(Thresholds::new(tb, ti))).unwrap();
        let up_b = classify_quadrants(&table, Some(Thresholds::new(tb + bump, ti))).unwrap();
        let up_i = classify_quadrants(&table, Some(Thresholds::new(tb, ti + bump))).unwrap();
        for ((r, b), i) in base.iter().zip(&up_b).zip(&up_i) {
            prop_assert!(!(!high_b(r) && high_b(b)));
            prop_assert!(!(!high_i(r) && high_i(i)));
            prop_assert_eq!(high_i(r), high_i(b));
            prop_assert_eq!(high_b(r), high_b(i));
        }
    }

    #[test]
    fn increasing_transform_preserves_labels(table in rows(), scale in 0.1f64..10.0, shift in -3.0f64..3.0) {
        let Some(t) = median_thresholds(&table) else { return Ok(()) };
        let f = |x: f64| (scale * x).exp() + shift;
        let moved: Vec<DesignScore> = table
            .iter()
            .map(|r| DesignScore { betweenness: f(r.betweenness), ..r.clone() })
            .collect();
        let before = classify_quadrants(&table, Some(t)).unwrap();
        let after = classify_quadrants(&moved, Some(Thresholds::new(f(t.betweenness), t.independence))).unwrap();
        for (a, b) in before.iter().zip(&after) {
            prop_assert_eq!(a.quadrant, b.quadrant);
        }
    }
}

#[test]
fn five_design_fixture_scores() {
    // a,b roots; c has parents a and b; d child of c; e child of d.
    let id = |s: &str| DesignId::new(s).unwrap();
    let tags = |l: &[&str]| l.iter().collect::<TagSet>();
    let mut g = LineageGraph::new();
    g.add_design(Design::new(id("a")).with_tags(tags(&["gear", "bolt", "nut"]))).unwrap();
    g.add_design(Design::new(id("b")).with_tags(tags(&["bolt", "nut", "washer"]))).unwrap();
    g.add_design(Design::new(id("c")).with_parents([id("a"), id("b")])).unwrap();
    g.add_design(Design::new(id("d")).with_parents([id("c")])).unwrap();
    g.add_design(Design::new(id("e")).with_parents([id("d")])).unwrap();

    let table = score_table(&g, Orientation::Undirected);
    assert_eq!(table.len(), 1);
    // Undirected: c lies on a-b, a-d, a-e, b-d, b-e = 5 of C(4,2)=6 pairs.
    assert!((table[0].betweenness - 5.0 / 6.0).abs() < 1e-12);
    assert_eq!(table[0].independence, Some(0.5));
}
