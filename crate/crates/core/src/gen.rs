//! Random and exhaustive instance generators for tests and benchmarks.

use std::collections::HashSet;

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::perm::{Cycle, Permutation};
use crate::tree::TreeMetric;

/// A Y-tree on `n >= 4` vertices: three arms of random positive lengths off
/// a random center, random labels, edge weights uniform in `1..=max_weight`.
pub fn random_ytree<R: Rng + ?Sized>(rng: &mut R, n: usize, max_weight: u64) -> TreeMetric {
    assert!(n >= 4, "a Y-tree needs at least 4 vertices");
    let mut labels: Vec<usize> = (1..=n).collect();
    labels.shuffle(rng);
    // two distinct cut points in 2..n split labels[1..n] into three arms
    let cuts = index::sample(rng, n - 2, 2).into_vec();
    let (c1, c2) = (cuts[0].min(cuts[1]) + 2, cuts[0].max(cuts[1]) + 2);
    let arms = [1..c1, c1..c2, c2..n];
    let mut edges = Vec::with_capacity(n - 1);
    for arm in arms {
        let mut prev = labels[0];
        for i in arm {
            edges.push((prev, labels[i], rng.gen_range(1..=max_weight)));
            prev = labels[i];
        }
    }
    TreeMetric::build(n, &edges).expect("generated a valid Y-tree")
}

/// A path through all `n >= 2` vertices in random order.
pub fn random_path<R: Rng + ?Sized>(rng: &mut R, n: usize, max_weight: u64) -> TreeMetric {
    let mut labels: Vec<usize> = (1..=n).collect();
    labels.shuffle(rng);
    let edges: Vec<_> = labels
        .windows(2)
        .map(|w| (w[0], w[1], rng.gen_range(1..=max_weight)))
        .collect();
    TreeMetric::build(n, &edges).expect("generated a valid path")
}

/// A uniformly random cycle of length `len` on `[n]`.
pub fn random_cycle<R: Rng + ?Sized>(rng: &mut R, n: usize, len: usize) -> Cycle {
    assert!((2..=n).contains(&len), "cycle length must lie in [2, n]");
    let mut elements: Vec<usize> = index::sample(rng, n, len)
        .into_iter()
        .map(|i| i + 1)
        .collect();
    elements.shuffle(rng);
    Cycle::new(elements).expect("distinct elements")
}

pub fn random_permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Permutation {
    let mut images: Vec<usize> = (1..=n).collect();
    images.shuffle(rng);
    Permutation::from_one_line(&images).expect("shuffled identity")
}

/// Calls `f` on every permutation of `[n]` in lexicographic order.
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&Permutation)) {
    let mut images: Vec<usize> = (1..=n).collect();
    loop {
        f(&Permutation::from_one_line(&images).expect("valid"));
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| images[i - 1] < images[i]) else {
            return;
        };
        let j = (i..n)
            .rev()
            .find(|&j| images[j] > images[i - 1])
            .expect("exists");
        images.swap(i - 1, j);
        images[i..].reverse();
    }
}

/// Every cycle (length >= 2) whose support lies in `[n]`, once each.
pub fn all_cycles(n: usize) -> Vec<Cycle> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        if mask.count_ones() < 2 {
            continue;
        }
        let support: Vec<usize> = (0..n)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| i + 1)
            .collect();
        let (head, rest) = (support[0], &support[1..]);
        for_each_arrangement(rest, &mut |order| {
            let mut elements = vec![head];
            elements.extend_from_slice(order);
            out.push(Cycle::new(elements).expect("distinct"));
        });
    }
    out
}

fn for_each_arrangement(items: &[usize], f: &mut dyn FnMut(&[usize])) {
    fn rec(items: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
        if k == items.len() {
            f(items);
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            rec(items, k + 1, f);
            items.swap(k, i);
        }
    }
    rec(&mut items.to_vec(), 0, f);
}

/// Every labelled unit-weight path and Y-tree on `[n]`, each exactly once.
pub fn all_unit_trees(n: usize) -> Vec<TreeMetric> {
    let mut seen: HashSet<Vec<(usize, usize)>> = HashSet::new();
    let mut out = Vec::new();
    let mut push = |edges: Vec<(usize, usize)>| {
        let mut key: Vec<_> = edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        key.sort_unstable();
        if seen.insert(key) {
            let weighted: Vec<_> = edges.iter().map(|&(u, v)| (u, v, 1)).collect();
            out.push(TreeMetric::build(n, &weighted).expect("valid tree"));
        }
    };
    let labels: Vec<usize> = (1..=n).collect();
    for_each_arrangement(&labels, &mut |order| {
        if order[0] < order[n - 1] {
            push(order.windows(2).map(|w| (w[0], w[1])).collect());
        }
    });
    if n >= 4 {
        for center in 1..=n {
            let others: Vec<usize> = labels.iter().copied().filter(|&v| v != center).collect();
            let m = others.len();
            for_each_arrangement(&others, &mut |order| {
                for c1 in 1..m - 1 {
                    for c2 in c1 + 1..m {
                        let mut edges = Vec::with_capacity(n - 1);
                        for arm in [0..c1, c1..c2, c2..m] {
                            let mut prev = center;
                            for i in arm {
                                edges.push((prev, order[i]));
                                prev = order[i];
                            }
                        }
                        push(edges);
                    }
                }
            });
        }
    }
    out
}
