//! Property-based invariants: metric axioms, pruning-safety lemmas, region
//! monotonicity, and accounting contracts.

use proptest::prelude::*;

use gridactive::{
    ball, dis_region, distance, enumerate_line_trees, enumerate_stumps, enumerate_trees,
    make_grid, make_label_source, make_sorted1d_range, radius, stump_active, theta_of,
    weighted_theta, Budget, Hypothesis, HypothesisClass, Labeling, RunConfig, Stump,
    WeightedDataset,
};

fn labeling_strategy(n: usize) -> impl Strategy<Value = Labeling> {
    prop::collection::vec(any::<bool>(), n).prop_map(move |bits| {
        Labeling::from_fn(n, |i| bits[i])
    })
}

fn dist(a: &Labeling, b: &Labeling) -> f64 {
    a.xor_count(b) as f64 / a.len() as f64
}

proptest! {
    #[test]
    fn distance_is_a_pseudometric(
        (a, b, c) in (8usize..64).prop_flat_map(|n| {
            (labeling_strategy(n), labeling_strategy(n), labeling_strategy(n))
        })
    ) {
        prop_assert_eq!(dist(&a, &a), 0.0);
        prop_assert_eq!(dist(&a, &b), dist(&b, &a));
        prop_assert!(dist(&a, &c) <= dist(&a, &b) + dist(&b, &c) + 1e-12);
    }

    // error-order preservation: any subset containing every disagreement
    // point of (a, b) preserves the sign of err(a) - err(b)
    #[test]
    fn subsets_covering_disagreements_preserve_error_order(
        (a, b, y, extra) in (8usize..48).prop_flat_map(|n| {
            (
                labeling_strategy(n),
                labeling_strategy(n),
                labeling_strategy(n),
                prop::collection::vec(any::<bool>(), n),
            )
        })
    ) {
        let n = a.len();
        let subset: Vec<usize> = (0..n)
            .filter(|&i| a.get(i) != b.get(i) || extra[i])
            .collect();
        prop_assume!(!subset.is_empty());
        let err_on = |h: &Labeling, s: &[usize]| {
            s.iter().filter(|&&i| h.get(i) != y.get(i)).count() as f64 / s.len() as f64
        };
        let full: Vec<usize> = (0..n).collect();
        let full_gap = err_on(&a, &full) - err_on(&b, &full);
        let sub_gap = err_on(&a, &subset) - err_on(&b, &subset);
        // the gaps are proportional: n * full_gap == |subset| * sub_gap
        prop_assert!(
            (n as f64 * full_gap - subset.len() as f64 * sub_gap).abs() < 1e-9
        );
    }

    // stump error lower bound on an interval population: distance to the
    // optimum bounds the error from below. L >= 1 because index 0 aliases
    // index 1 (no data point witnesses the 0 -> 1 step), which would
    // overstate |h - h*| by one.
    #[test]
    fn stump_interval_error_lower_bound(
        (_n, y, lr) in (6usize..24).prop_flat_map(|n| {
            (
                Just(n),
                labeling_strategy(n),
                (1..=n, 1..=n).prop_map(|(a, b)| (a.min(b), a.max(b))),
            )
        })
    ) {
        let (l, r) = lr;
        prop_assume!(l < r);
        let pop: Vec<usize> = (l.max(1)..=r).map(|p| p - 1).collect();
        let err_on = |h: usize| {
            pop.iter().filter(|&&i| (i + 1 >= h) != y.get(i)).count() as f64
                / pop.len() as f64
        };
        for h in l..=r {
            for h_star in l..=r {
                let gap = (h as f64 - h_star as f64).abs() / (r - l + 1) as f64;
                prop_assert!(
                    err_on(h) >= gap - err_on(h_star) - 1e-12,
                    "h={} h*={} [{}, {}]", h, h_star, l, r
                );
            }
        }
    }

    // single-reference DIS equals the pairwise-definition DIS for every V
    #[test]
    fn dis_region_single_reference_equals_pairwise(
        (n, picks) in (4usize..32).prop_flat_map(|n| {
            (Just(n), prop::collection::vec(any::<bool>(), n + 1))
        })
    ) {
        let class = enumerate_stumps(n).unwrap();
        let v: Vec<usize> = (0..=n).filter(|&i| picks[i]).collect();
        prop_assume!(!v.is_empty());
        let s: Vec<usize> = (0..n).collect();
        let fast = dis_region(&class, &v, &s).unwrap();
        let mut pairwise: Vec<usize> = s
            .iter()
            .copied()
            .filter(|&x| {
                v.iter().any(|&h1| {
                    v.iter().any(|&h2| {
                        class.labeling(h1).get(x) != class.labeling(h2).get(x)
                    })
                })
            })
            .collect();
        pairwise.sort_unstable();
        prop_assert_eq!(fast, pairwise);
    }

    // monotonicity of the region operators
    #[test]
    fn dis_and_ball_are_monotone(
        (n, picks, grow, r, dr) in (4usize..24).prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec(any::<bool>(), n + 1),
                prop::collection::vec(any::<bool>(), n + 1),
                0.0f64..1.0,
                0.0f64..0.5,
            )
        })
    ) {
        let class = enumerate_stumps(n).unwrap();
        let v: Vec<usize> = (0..=n).filter(|&i| picks[i]).collect();
        prop_assume!(!v.is_empty());
        let v_big: Vec<usize> = (0..=n).filter(|&i| picks[i] || grow[i]).collect();
        let s: Vec<usize> = (0..n).collect();
        let small = dis_region(&class, &v, &s).unwrap();
        let big = dis_region(&class, &v_big, &s).unwrap();
        prop_assert!(small.iter().all(|x| big.contains(x)));

        let center = class.labeling(0);
        let inner = ball(&class, center, r);
        let outer = ball(&class, center, r + dr);
        prop_assert!(inner.iter().all(|h| outer.contains(h)));
    }

    // every member of a set sits within twice its enclosing radius of any
    // other member
    #[test]
    fn members_within_twice_the_radius(
        (n, picks) in (4usize..24).prop_flat_map(|n| {
            (Just(n), prop::collection::vec(any::<bool>(), n + 1))
        })
    ) {
        let class = enumerate_stumps(n).unwrap();
        let hset: Vec<usize> = (0..=n).filter(|&i| picks[i]).collect();
        prop_assume!(!hset.is_empty());
        let r = radius(&class, &hset).unwrap();
        for &a in &hset {
            for &b in &hset {
                prop_assert!(
                    dist(class.labeling(a), class.labeling(b)) <= 2.0 * r + 1e-12
                );
            }
        }
    }

    // weighted coefficient is at most lambda^2 times the unweighted one
    #[test]
    fn weighted_theta_bounded_by_lambda_squared(
        (n, raw, lambda) in (4usize..20).prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec(0.0f64..1.0, n),
                1.0f64..2.0,
            )
        })
    ) {
        let ds = make_sorted1d_range(n).unwrap();
        let class = enumerate_stumps(n).unwrap();
        let weights: Vec<f64> = raw.iter().map(|u| 1.0 + u * (lambda - 1.0)).collect();
        let wds = WeightedDataset::new(&ds, weights, lambda).unwrap();
        let budget = Budget::default();
        for center in 0..class.len() {
            let plain = theta_of(&class, center, &budget).unwrap().theta_h;
            let weighted = weighted_theta(&class, center, &wds, &budget).unwrap();
            prop_assert!(
                weighted <= lambda * lambda * plain + 1e-9,
                "center {}: weighted {} > {}^2 * {}", center, weighted, lambda, plain
            );
        }
    }

    // label-query accounting is exact across random engine runs
    #[test]
    fn engine_query_accounting(seed in 0u64..500, h_star in 0usize..=256) {
        let n = 256;
        let ds = make_sorted1d_range(n).unwrap();
        let src = make_label_source(
            &ds,
            &Hypothesis::Stump(Stump { index: h_star }),
            0.15,
            seed,
        )
        .unwrap();
        let cfg = RunConfig::new(0.2, 0.1, (3.0, 3.0, 3.0, 3.0), seed);
        let run = stump_active(&ds, &src, &cfg).unwrap();
        prop_assert_eq!(run.stats.queries, src.query_count());
    }
}

/// Leaf-region distance contraction: for trees h, h' and leaves i, j with
/// differing labels, the line trees at those leaves are no farther apart on
/// leaf i's region than the original trees.
#[test]
fn line_tree_leaf_region_distance_contraction() {
    use gridactive::line_trees_of;

    let ds = make_grid(3, 2).unwrap();
    let class = enumerate_trees(&ds, 1, true, 200_000).unwrap();
    let trees: Vec<_> = class
        .members()
        .iter()
        .filter_map(|m| match m {
            Hypothesis::Tree(t) => Some(t.clone()),
            _ => None,
        })
        .collect();
    let mut checked = 0usize;
    for h in &trees {
        for hp in &trees {
            let lts_h = line_trees_of(h);
            let lts_hp = line_trees_of(hp);
            for (i, lt_i) in lts_h.iter().enumerate() {
                // points routed to leaf i of h
                let region: Vec<usize> = (0..ds.n())
                    .filter(|&x| h.root.route(ds.point(x)).0 == i)
                    .collect();
                if region.is_empty() {
                    continue;
                }
                for lt_j in &lts_hp {
                    if lt_i.label == lt_j.label {
                        continue;
                    }
                    let d_line = distance(
                        &Hypothesis::LineTree(lt_i.clone()),
                        &Hypothesis::LineTree(lt_j.clone()),
                        &ds,
                        &region,
                    )
                    .unwrap();
                    let d_tree = distance(
                        &Hypothesis::Tree(h.clone()),
                        &Hypothesis::Tree(hp.clone()),
                        &ds,
                        &region,
                    )
                    .unwrap();
                    assert!(
                        d_line <= d_tree + 1e-12,
                        "leaf {i}: {d_line} > {d_tree}"
                    );
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 100, "only {checked} pairs exercised");
}

/// Coefficient of the all-same-label hypothesis within a line-tree class
/// stays below a fitted polylog envelope.
#[test]
fn line_tree_constant_hypothesis_theta_stays_polylog() {
    for w in [3usize, 4, 5] {
        let ds = make_grid(w, 2).unwrap();
        let class = enumerate_line_trees(&ds, 2, true, 200_000).unwrap();
        let Some(center) = class.all_zero_member() else {
            panic!("line-tree class must contain the all-zero labeling");
        };
        let theta = theta_of(&class, center, &Budget::default())
            .unwrap()
            .theta_h;
        let envelope = 10.0 * (3.0 * (w as f64).ln()).powi(2);
        assert!(
            theta <= envelope,
            "w = {w}: theta {theta} above envelope {envelope}"
        );
    }
}

/// Version-space trace monotonicity for the stump engine under census
/// sampling: intervals are nested and contain the noiseless target.
#[test]
fn census_intervals_nest_and_keep_target() {
    let n = 1024;
    let ds = make_sorted1d_range(n).unwrap();
    for seed in 0..10u64 {
        let target = (seed as usize * 97) % (n + 1);
        let src = make_label_source(
            &ds,
            &Hypothesis::Stump(Stump { index: target }),
            0.0,
            seed,
        )
        .unwrap();
        let mut cfg = RunConfig::new(0.1, 0.1, (0.0, 5_000_000.0, 25.0, 3.0), seed);
        cfg.seed = seed;
        let run = stump_active(&ds, &src, &cfg).unwrap();
        let mut prev = (0usize, n);
        for t in &run.trace {
            if let Some((lo, hi)) = t.interval {
                assert!(lo >= prev.0 && hi <= prev.1);
                prev = (lo, hi);
            }
        }
        // under noiseless census bounds the target index is never pruned
        // (index 1 aliases index 0: both label everything 1)
        let (lo, hi) = prev;
        let kept = (lo..=hi).contains(&target)
            || (target == 0 && lo <= 1 && 1 <= hi)
            || (target == 1 && lo == 0);
        assert!(kept, "target {target} pruned to [{lo}, {hi}]");
    }
}

/// DIS of the full stump class excludes exactly the last point.
#[test]
fn full_stump_class_dis_excludes_last_point() {
    for n in [4usize, 9, 17] {
        let class = enumerate_stumps(n).unwrap();
        let v: Vec<usize> = (0..class.len()).collect();
        let s: Vec<usize> = (0..n).collect();
        let dis = dis_region(&class, &v, &s).unwrap();
        let expect: Vec<usize> = (0..n - 1).collect();
        assert_eq!(dis, expect);
    }
}

/// Radius of a class restricted to a ball never exceeds the ball's radius
/// when the center is a member.
#[test]
fn ball_radius_is_tight_for_member_centers() {
    let class = enumerate_stumps(32).unwrap();
    for center in [0usize, 7, 16, 32] {
        for r in [0.1f64, 0.25, 0.5, 1.0] {
            let b = ball(&class, class.labeling(center), r);
            assert!(b.contains(&center));
            let enclosing = radius(&class, &b).unwrap();
            assert!(enclosing <= r + 1e-12);
        }
    }
}

#[allow(dead_code)]
fn type_checks(_: &HypothesisClass) {}
