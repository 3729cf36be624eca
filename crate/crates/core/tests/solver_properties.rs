use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use wtdist_core::gen::{for_each_permutation, random_path, random_permutation, random_ytree};
use wtdist_core::solver::{normalize_sorting, NormalizeError};
use wtdist_core::{
    decompose, decompose_merged, exact_distance, exact_distance_pair, lower_bound,
    verify_transform, DistanceTable, Method, Permutation, SearchBudget, Transposition, TreeMetric,
    Weight,
};

fn random_tree(rng: &mut StdRng, n: usize, w: u64) -> TreeMetric {
    if n >= 4 && rng.gen_bool(0.8) {
        random_ytree(rng, n, w)
    } else {
        random_path(rng, n, w)
    }
}

fn random_transpositions(rng: &mut StdRng, n: usize, k: usize) -> Vec<Transposition> {
    (0..k)
        .map(|_| {
            let a = rng.gen_range(1..=n);
            let mut b = rng.gen_range(1..=n);
            while b == a {
                b = rng.gen_range(1..=n);
            }
            Transposition::new(a, b).unwrap()
        })
        .collect()
}

/// A random decomposition of `p`: a random sorting, reversed, with a few
/// cancelling pairs spliced in.
fn random_decomposition(rng: &mut StdRng, p: &Permutation) -> Vec<Transposition> {
    let n = p.n();
    let mut current = p.clone();
    let mut sorting = Vec::new();
    while !current.is_identity() {
        let moved: Vec<usize> = (1..=n).filter(|&i| current.apply(i) != i).collect();
        let i = *moved.choose(rng).unwrap();
        let j = current.inverse().apply(i);
        let tau = Transposition::new(i, j).unwrap();
        current.swap_positions(i, j);
        sorting.push(tau);
    }
    let mut out: Vec<_> = sorting.into_iter().rev().collect();
    if n >= 2 {
        let extras = rng.gen_range(0..3);
        for extra in random_transpositions(rng, n, extras) {
            let at = rng.gen_range(0..=out.len());
            out.insert(at, extra);
            out.insert(at, extra);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn permutation_algebra(seed in any::<u64>(), n in 1usize..30) {
        let mut rng = StdRng::seed_from_u64(seed);
        let p = random_permutation(&mut rng, n);
        let q = random_permutation(&mut rng, n);
        let r = random_permutation(&mut rng, n);
        let e = Permutation::identity(n);
        prop_assert_eq!(p.compose(&p.inverse()).unwrap(), e.clone());
        prop_assert_eq!(p.inverse().compose(&p).unwrap(), e);
        prop_assert_eq!(
            p.compose(&q).unwrap().compose(&r).unwrap(),
            p.compose(&q.compose(&r).unwrap()).unwrap()
        );
        prop_assert_eq!(Permutation::parse(&p.cycle_notation(), n).unwrap(), p.clone());
        prop_assert_eq!(Permutation::parse(&p.to_string(), n).unwrap(), p.clone());
        prop_assert_eq!(Permutation::from_cycles(n, &p.cycles()).unwrap(), p.clone());
        let fixed = (1..=n).filter(|&i| p.apply(i) == i).count();
        prop_assert_eq!(p.cycle_count_with_fixed_points(), p.cycles().len() + fixed);
        if n >= 2 {
            let tau = random_transpositions(&mut rng, n, 1)[0];
            let mut swapped = p.clone();
            swapped.swap_positions(tau.a(), tau.b());
            prop_assert_eq!(swapped.clone(), p.times(tau).unwrap());
            prop_assert_eq!(swapped, p.compose(&tau.to_permutation(n).unwrap()).unwrap());
        }
    }

    #[test]
    fn tree_metric_axioms(seed in any::<u64>(), n in 2usize..40, w in 1u64..9) {
        let mut rng = StdRng::seed_from_u64(seed);
        let tree = random_tree(&mut rng, n, w);
        for _ in 0..20 {
            let (a, b, c) = (rng.gen_range(1..=n), rng.gen_range(1..=n), rng.gen_range(1..=n));
            prop_assert_eq!(tree.dist(a, b), tree.dist(b, a));
            prop_assert_eq!(tree.dist(a, b) == 0, a == b);
            prop_assert!(tree.dist(a, c) <= tree.dist(a, b) + tree.dist(b, c));
            prop_assert!(tree.on_path(a, a, b).unwrap());
        }
    }

    #[test]
    fn efficiency_is_zero_inefficiency(seed in any::<u64>(), n in 2usize..25, w in 1u64..9) {
        let mut rng = StdRng::seed_from_u64(seed);
        let tree = random_tree(&mut rng, n, w);
        let p = random_permutation(&mut rng, n);
        for tau in random_transpositions(&mut rng, n, 20) {
            let ineff = tree.inefficiency(&p, tau).unwrap();
            prop_assert_eq!(tree.is_efficient(&p, tau).unwrap(), ineff == Weight::ZERO);
            let before = tree.displacement(&p).unwrap().get() as i64;
            let after = tree.displacement(&p.times(tau).unwrap()).unwrap().get() as i64;
            let phi = tree.phi(tau.a(), tau.b()).unwrap().get() as i64;
            prop_assert_eq!(before - after, 2 * phi - ineff.get() as i64);
        }
    }

    #[test]
    fn verification_identity_holds_for_any_decomposition(seed in any::<u64>(), n in 1usize..20, w in 1u64..9) {
        let mut rng = StdRng::seed_from_u64(seed);
        let tree = random_tree(&mut rng, n.max(2), w);
        let n = tree.n();
        let p = random_permutation(&mut rng, n);
        let taus = random_decomposition(&mut rng, &p);
        let v = verify_transform(&tree, &p, &taus).unwrap();
        prop_assert!(v.product_matches);
        prop_assert!(v.identity_holds);
        prop_assert_eq!(2 * v.gap, v.inefficiency_sum.get() as i64);
        prop_assert!(v.gap >= 0);
    }

    #[test]
    fn multi_cycle_bounds(seed in any::<u64>(), n in 2usize..60, w in 1u64..9) {
        let mut rng = StdRng::seed_from_u64(seed);
        let tree = random_tree(&mut rng, n, w);
        let p = random_permutation(&mut rng, n);
        let r = decompose(&tree, &p).unwrap();
        let m = decompose_merged(&tree, &p).unwrap();
        let d = r.displacement.get();
        prop_assert_eq!(r.transform.product(n).unwrap(), p.clone());
        prop_assert_eq!(m.transform.product(n).unwrap(), p.clone());
        prop_assert_eq!(r.distance_upper, r.transform.total_weight());
        prop_assert_eq!(r.distance_upper, r.per_cycle.iter().map(|c| c.weight).sum::<Weight>());
        prop_assert_eq!(r.method, Method::PerCycle);
        prop_assert_eq!(m.distance_upper, m.transform.total_weight());
        prop_assert!(m.distance_upper <= r.distance_upper);
        prop_assert!(3 * r.distance_upper.get() <= 2 * d);
        prop_assert!(3 * r.distance_upper.get() <= 4 * (d / 2));
        prop_assert!(r.lower_bound <= m.distance_upper);
        prop_assert!(2 * m.distance_upper.get() >= d);
        prop_assert_eq!(r.lower_bound, lower_bound(&tree, &p).unwrap());
    }

    #[test]
    fn oracle_brackets(seed in any::<u64>(), n in 2usize..7, w in 1u64..6) {
        let mut rng = StdRng::seed_from_u64(seed);
        let tree = random_tree(&mut rng, n, w);
        let p = random_permutation(&mut rng, n);
        let budget = SearchBudget::default();
        let (exact, tf) = exact_distance(&tree, &p, &budget).unwrap();
        let r = decompose_merged(&tree, &p).unwrap();
        prop_assert!(2 * exact.get() >= tree.displacement(&p).unwrap().get());
        prop_assert!(exact <= r.distance_upper);
        prop_assert!(3 * r.distance_upper.get() <= 4 * exact.get());
        let v = verify_transform(&tree, &p, tf.taus()).unwrap();
        prop_assert!(v.product_matches && v.identity_holds);
        prop_assert_eq!(v.total_weight, exact);

        let q = random_permutation(&mut rng, n);
        let dpq = exact_distance_pair(&tree, &p, &q, &budget).unwrap();
        prop_assert_eq!(dpq, exact_distance_pair(&tree, &q, &p, &budget).unwrap());
        prop_assert_eq!(exact_distance_pair(&tree, &p, &p, &budget).unwrap(), Weight::ZERO);
        prop_assert_eq!(exact_distance_pair(&tree, &p, &Permutation::identity(n), &budget).unwrap(), exact);
    }

    #[test]
    fn normalization_preserves_min_cost_sortings(seed in any::<u64>(), n in 2usize..7, w in 1u64..6) {
        let mut rng = StdRng::seed_from_u64(seed);
        let tree = random_tree(&mut rng, n, w);
        let p = random_permutation(&mut rng, n);
        let (_, tf) = exact_distance(&tree, &p, &SearchBudget::default()).unwrap();
        let sorting: Vec<_> = tf.taus().iter().rev().copied().collect();
        let fixed = normalize_sorting(&tree, &p, &sorting).unwrap();
        check_normalized(&tree, &p, &sorting, &fixed);
    }
}

fn check_normalized(
    tree: &TreeMetric,
    p: &Permutation,
    before: &[Transposition],
    after: &[Transposition],
) {
    let mut a = before.to_vec();
    let mut b = after.to_vec();
    a.sort();
    b.sort();
    assert_eq!(a, b, "multiset changed");
    let mut q = p.clone();
    for t in after {
        q.swap_positions(t.a(), t.b());
    }
    assert!(q.is_identity(), "no longer a sorting");
    let cost = |ts: &[Transposition]| ts.iter().map(|t| tree.dist(t.a(), t.b())).sum::<u64>();
    assert_eq!(cost(before), cost(after));
    for i in 0..after.len() {
        let suffix = Permutation::from_transpositions(p.n(), &after[i..]).unwrap();
        let t = after[i];
        assert!(
            suffix.apply(t.a()) != t.a() || suffix.apply(t.b()) != t.b(),
            "position {} is still bad",
            i + 1
        );
    }
}

/// `(3 4)` touches nothing that `(1 2)` moves, so it is bad in first
/// position; the rest of the sequence commutes with it.
#[test]
fn normalization_moves_a_bad_prefix() {
    let tree = TreeMetric::build(5, &[(1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 5, 1)]).unwrap();
    let p = Permutation::parse_cycles("(1 2)", 5).unwrap();
    let t = |a, b| Transposition::new(a, b).unwrap();
    let sorting = [t(3, 4), t(1, 3), t(1, 4), t(1, 3), t(1, 2)];
    let fixed = normalize_sorting(&tree, &p, &sorting).unwrap();
    assert_eq!(fixed, vec![t(1, 3), t(1, 4), t(1, 3), t(1, 2), t(3, 4)]);
    check_normalized(&tree, &p, &sorting, &fixed);
}

#[test]
fn normalization_gives_up_on_wasteful_sortings() {
    let tree = TreeMetric::build(4, &[(1, 2, 1), (2, 3, 1), (3, 4, 1)]).unwrap();
    let p = Permutation::parse_cycles("(1 2)", 4).unwrap();
    let t = |a, b| Transposition::new(a, b).unwrap();
    let err = normalize_sorting(&tree, &p, &[t(3, 4), t(1, 2), t(3, 4)]).unwrap_err();
    assert!(
        matches!(err, NormalizeError::NoProgress { index: 2, .. }),
        "{err:?}"
    );
}

/// Exhaustive over S_5 on three trees: every random decomposition satisfies
/// the gap identity, and on path trees the exact distance is `D/2`.
#[test]
fn exhaustive_small_identities() {
    let mut rng = StdRng::seed_from_u64(5);
    let trees = [
        random_ytree(&mut rng, 5, 4),
        random_ytree(&mut rng, 5, 1),
        random_path(&mut rng, 5, 4),
    ];
    for tree in &trees {
        let table = DistanceTable::build(tree, &SearchBudget::default()).unwrap();
        let is_path = tree.center().is_none();
        for_each_permutation(5, |p| {
            let taus = random_decomposition(&mut rng, p);
            let v = verify_transform(tree, p, &taus).unwrap();
            assert!(v.product_matches && v.identity_holds, "{p}");
            let half = tree.displacement(p).unwrap().halved();
            if is_path {
                assert_eq!(table.get(p), Some(half), "{p}");
            }
        });
    }
}

/// The strengthened lower bound is stated for whole permutations whose
/// branch crossings are unbalanced in aggregate. Checked against the exact
/// distance on all of S_7 for a few trees; violations are reported, not
/// treated as failures.
#[test]
fn aggregate_lower_bound_survey() {
    let mut rng = StdRng::seed_from_u64(9);
    let budget = SearchBudget::default();
    let mut checked = 0usize;
    let mut strengthened = 0usize;
    let mut violations = Vec::new();
    for _ in 0..4 {
        let tree = random_ytree(&mut rng, 7, 4);
        let table = DistanceTable::build(&tree, &budget).unwrap();
        for_each_permutation(7, |p| {
            checked += 1;
            let lb = lower_bound(&tree, p).unwrap();
            let exact = table.get(p).unwrap();
            if lb > tree.displacement(p).unwrap().halved() {
                strengthened += 1;
            }
            if lb > exact {
                violations.push(format!(
                    "{} on {:?}: bound {lb} > exact {exact}",
                    p.cycle_notation(),
                    tree.edges()
                ));
            }
        });
    }
    eprintln!(
        "aggregate lower bound: {checked} permutations, {strengthened} strengthened, {} above the exact distance",
        violations.len()
    );
    for v in violations.iter().take(5) {
        eprintln!("  {v}");
    }
}
