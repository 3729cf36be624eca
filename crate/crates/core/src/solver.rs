//! Whole-permutation decompositions, bounds, verification and sorting
//! normalization.

use thiserror::Error;

use crate::cycle::{
    center_gap, decompose_seq, BalanceCounts, CycleClass, CycleKind, Emitter, SolveError, Transform,
};
use crate::perm::{Cycle, PermError, Permutation, Transposition};
use crate::tree::{Shape, TreeMetric, Weight};

/// Merge searches compare every pair of elements across unbalanced cycles,
/// so they are skipped when those cycles are large.
const PAIR_SEARCH_LIMIT: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    PerCycle,
    Merged,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleReport {
    pub cycle: Cycle,
    pub class: CycleClass,
    pub weight: Weight,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceReport {
    pub distance_upper: Weight,
    pub lower_bound: Weight,
    pub transform: Transform,
    /// Cycles of the input, each with its own optimal cost.
    pub per_cycle: Vec<CycleReport>,
    pub displacement: Weight,
    pub method: Method,
}

impl DistanceReport {
    /// The upper bound is provably optimal.
    pub fn is_exact(&self) -> bool {
        self.distance_upper == self.lower_bound || self.per_cycle.len() <= 1
    }
}

fn per_cycle_transform(tree: &TreeMetric, p: &Permutation) -> (Transform, Vec<CycleReport>) {
    let mut em = Emitter::new(tree, p.support_size() + 1);
    let mut reports = Vec::new();
    for cycle in p.cycles() {
        let class = crate::cycle::classify_cycle(tree, &cycle).expect("sizes checked");
        let before = em.weight();
        decompose_seq(&mut em, cycle.elements(), class.kind);
        let weight = Weight(em.weight() - before);
        reports.push(CycleReport {
            cycle,
            class,
            weight,
        });
    }
    (em.finish().0, reports)
}

fn check(tree: &TreeMetric, p: &Permutation) -> Result<(), SolveError> {
    tree.check_size(p)?;
    Ok(())
}

/// Each cycle decomposed on its own, cycles in order of their smallest
/// element. At most 4/3 of the optimum.
pub fn decompose(tree: &TreeMetric, p: &Permutation) -> Result<DistanceReport, SolveError> {
    check(tree, p)?;
    let (transform, per_cycle) = per_cycle_transform(tree, p);
    Ok(DistanceReport {
        distance_upper: transform.total_weight(),
        lower_bound: lower_bound_unchecked(tree, p),
        transform,
        per_cycle,
        displacement: Weight(tree.displacement_unchecked(p)),
        method: Method::PerCycle,
    })
}

fn aggregate_counts(tree: &TreeMetric, p: &Permutation) -> BalanceCounts {
    let mut counts = BalanceCounts::default();
    for i in 1..=tree.n() {
        counts.record(tree.branch_raw(i), tree.branch_raw(p.apply(i)));
    }
    counts
}

fn lower_bound_unchecked(tree: &TreeMetric, p: &Permutation) -> Weight {
    let half = Weight(tree.displacement_unchecked(p)).halved();
    let Shape::YTree { center } = tree.shape() else {
        return half;
    };
    let support = p.support();
    if support.is_empty() || p.apply(center) != center {
        return half;
    }
    if aggregate_counts(tree, p).is_balanced() {
        half
    } else {
        half + Weight(center_gap(tree, &support))
    }
}

/// `D(p)/2`, plus the smallest center distance over the support when the
/// center is fixed and the branch-crossing arcs of all cycles together are
/// unbalanced.
pub fn lower_bound(tree: &TreeMetric, p: &Permutation) -> Result<Weight, SolveError> {
    check(tree, p)?;
    Ok(lower_bound_unchecked(tree, p))
}

/// Per-cycle decomposition of `p m_1 ... m_r`, followed by `m_r ... m_1`.
fn after_merges(tree: &TreeMetric, p: &Permutation, merges: &[Transposition]) -> Transform {
    let mut q = p.clone();
    for m in merges {
        q.swap_positions(m.a(), m.b());
    }
    let (mut transform, _) = per_cycle_transform(tree, &q);
    for m in merges.iter().rev() {
        transform.push(tree, *m);
    }
    transform
}

struct UnbalancedCycle {
    elements: Vec<usize>,
    winding: i64,
}

fn unbalanced_cycles(tree: &TreeMetric, p: &Permutation) -> Vec<UnbalancedCycle> {
    p.cycles()
        .into_iter()
        .filter_map(|c| {
            let class = crate::cycle::classify_cycle(tree, &c).expect("sizes checked");
            (class.kind == CycleKind::Unbalanced).then(|| UnbalancedCycle {
                winding: class.counts.winding(),
                elements: c.elements().to_vec(),
            })
        })
        .collect()
}

/// Center merges: the center joins the longest unbalanced cycle at its
/// element nearest the center, then every other unbalanced cycle (longest
/// first, ties by smallest element) joins through its own nearest element.
fn center_merges(tree: &TreeMetric, p: &Permutation, center: usize) -> Vec<Transposition> {
    let mut cycles = unbalanced_cycles(tree, p);
    cycles.sort_by_key(|c| (std::cmp::Reverse(c.elements.len()), c.elements[0]));
    cycles
        .iter()
        .map(|c| {
            let nearest = *c
                .elements
                .iter()
                .min_by_key(|&&v| (tree.depth(v), v))
                .expect("non-empty");
            Transposition::ordered(nearest, center)
        })
        .collect()
}

/// Greedily joins unbalanced cycles of opposite winding through a
/// transposition that is efficient for the current permutation, which
/// removes its own cost from the displacement twice over.
fn pairwise_merges(tree: &TreeMetric, p: &Permutation) -> Vec<Transposition> {
    let mut q = p.clone();
    let mut merges = Vec::new();
    loop {
        let cycles = unbalanced_cycles(tree, &q);
        let total: usize = cycles.iter().map(|c| c.elements.len()).sum();
        if cycles.len() < 2 || total > PAIR_SEARCH_LIMIT {
            return merges;
        }
        let mut found = None;
        'search: for (i, x) in cycles.iter().enumerate() {
            for y in &cycles[i + 1..] {
                if x.winding.signum() == y.winding.signum() {
                    continue;
                }
                for &a in &x.elements {
                    for &b in &y.elements {
                        if tree.inefficiency_unchecked(&q, a, b) == 0 {
                            found = Some(Transposition::ordered(a, b));
                            break 'search;
                        }
                    }
                }
            }
        }
        match found {
            Some(tau) => {
                q.swap_positions(tau.a(), tau.b());
                merges.push(tau);
            }
            None => return merges,
        }
    }
}

/// The cheapest of several strategies: plain per-cycle decomposition,
/// merging unbalanced cycles through the center, merging pairs of
/// unbalanced cycles with efficient transpositions, and pairs then center.
/// Never worse than [`decompose`].
pub fn decompose_merged(tree: &TreeMetric, p: &Permutation) -> Result<DistanceReport, SolveError> {
    let mut report = decompose(tree, p)?;
    let Shape::YTree { center } = tree.shape() else {
        return Ok(report);
    };
    if unbalanced_cycles(tree, p).is_empty() {
        return Ok(report);
    }

    let mut plans: Vec<Vec<Transposition>> = Vec::new();
    if p.apply(center) == center {
        plans.push(center_merges(tree, p, center));
    }
    let pairs = pairwise_merges(tree, p);
    if !pairs.is_empty() {
        let mut q = p.clone();
        for m in &pairs {
            q.swap_positions(m.a(), m.b());
        }
        plans.push(pairs.clone());
        if q.apply(center) == center {
            let rest = center_merges(tree, &q, center);
            if !rest.is_empty() {
                plans.push(pairs.iter().copied().chain(rest).collect());
            }
        }
    }

    let best = plans
        .iter()
        .map(|plan| after_merges(tree, p, plan))
        .min_by_key(|t| t.total_weight());
    if let Some(best) = best {
        if best.total_weight() < report.distance_upper {
            report.distance_upper = best.total_weight();
            report.transform = best;
            report.method = Method::Merged;
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub product_matches: bool,
    pub total_weight: Weight,
    pub displacement: Weight,
    /// `total_weight - D(p)/2`.
    pub gap: i64,
    pub inefficiency_sum: Weight,
    /// Inefficiency of each transposition, in decomposition order, measured
    /// against the permutation it acts on when the sequence is undone from
    /// the right.
    pub inefficiencies: Vec<Weight>,
    /// `2 * gap == inefficiency_sum`.
    pub identity_holds: bool,
}

impl VerificationReport {
    pub fn is_valid(&self) -> bool {
        self.product_matches && self.identity_holds
    }
}

/// Checks a proposed decomposition `tau_1 ... tau_k = p` and accounts for
/// its excess cost transposition by transposition.
///
/// Undoing the decomposition from the right, `pi_0 = p` and
/// `pi_j = pi_{j-1} tau_{k-j+1}`; the inefficiencies are taken along that
/// walk, and their sum is twice the excess over `D(p)/2` whenever the walk
/// ends at the identity.
pub fn verify_transform(
    tree: &TreeMetric,
    p: &Permutation,
    taus: &[Transposition],
) -> Result<VerificationReport, SolveError> {
    check(tree, p)?;
    if let Some(t) = taus.iter().find(|t| t.b() > tree.n()) {
        return Err(SolveError::ElementOutOfRange {
            value: t.b(),
            n: tree.n(),
        });
    }
    let mut current = p.clone();
    let mut inefficiencies = vec![Weight::ZERO; taus.len()];
    let mut total = 0u64;
    for (j, tau) in taus.iter().enumerate().rev() {
        inefficiencies[j] = Weight(tree.inefficiency_unchecked(&current, tau.a(), tau.b()));
        total += tree.dist(tau.a(), tau.b());
        current.swap_positions(tau.a(), tau.b());
    }
    let product_matches = current.is_identity();
    let displacement = tree.displacement_unchecked(p);
    let gap = total as i64 - (displacement / 2) as i64;
    let inefficiency_sum: u64 = inefficiencies.iter().map(|w| w.get()).sum();
    Ok(VerificationReport {
        product_matches,
        total_weight: Weight(total),
        displacement: Weight(displacement),
        gap,
        inefficiency_sum: Weight(inefficiency_sum),
        inefficiencies,
        identity_holds: 2 * gap == inefficiency_sum as i64,
    })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("the transpositions do not sort the permutation")]
    NonSortingInput,
    #[error(
        "position {index} stayed bad after {rounds} moves; the input is not a minimum-cost sorting"
    )]
    NoProgress { index: usize, rounds: usize },
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// Index of the leftmost `tau_i` whose support misses the support of
/// `tau_i tau_{i+1} ... tau_k`, if any.
fn leftmost_bad(n: usize, taus: &[Transposition]) -> Option<usize> {
    // suffix product, updated by left multiplication
    let mut images: Vec<usize> = (0..=n).collect();
    let mut preimages: Vec<usize> = (0..=n).collect();
    let mut bad = None;
    for (i, tau) in taus.iter().enumerate().rev() {
        let (a, b) = (tau.a(), tau.b());
        let (ia, ib) = (preimages[a], preimages[b]);
        images[ia] = b;
        images[ib] = a;
        preimages[a] = ib;
        preimages[b] = ia;
        if images[a] == a && images[b] == b {
            bad = Some(i);
        }
    }
    bad
}

/// Reorders a minimum-cost sorting `p tau_1 ... tau_k = e` so that no
/// transposition is bad, by repeatedly moving the leftmost bad one to the end.
/// Product, cost and the multiset of transpositions are preserved.
pub fn normalize_sorting(
    tree: &TreeMetric,
    p: &Permutation,
    taus: &[Transposition],
) -> Result<Vec<Transposition>, NormalizeError> {
    check(tree, p)?;
    let n = tree.n();
    if let Some(t) = taus.iter().find(|t| t.b() > n) {
        return Err(SolveError::ElementOutOfRange { value: t.b(), n }.into());
    }
    let mut sorted = p.clone();
    for t in taus {
        sorted.swap_positions(t.a(), t.b());
    }
    if !sorted.is_identity() {
        return Err(NormalizeError::NonSortingInput);
    }

    let k = taus.len();
    let mut out = taus.to_vec();
    let mut last = None;
    let mut rounds = 0;
    while let Some(b) = leftmost_bad(n, &out) {
        if last == Some(b) {
            rounds += 1;
            if rounds > k {
                return Err(NormalizeError::NoProgress {
                    index: b + 1,
                    rounds,
                });
            }
        } else {
            last = Some(b);
            rounds = 1;
        }
        let moved = out.remove(b);
        out.push(moved);
    }
    Ok(out)
}
