//! Exact distances by uniform-cost search over the Cayley graph of `S_n`.
//!
//! Only meant for small `n`; it is the ground truth the fast solvers are
//! checked against.

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::cycle::Transform;
use crate::perm::{Permutation, Transposition};
use crate::tree::{TreeMetric, Weight};

/// Largest `n` whose one-line form packs into a `u64` key.
const KEY_LIMIT: usize = 16;
const WARN_ABOVE: usize = 8;

/// Cost of swapping two elements.
pub trait SwapCost {
    fn n(&self) -> usize;
    fn cost(&self, a: usize, b: usize) -> u64;
}

impl SwapCost for TreeMetric {
    fn n(&self) -> usize {
        TreeMetric::n(self)
    }

    fn cost(&self, a: usize, b: usize) -> u64 {
        self.dist(a, b)
    }
}

/// Explicit symmetric cost table, for cost structures that are not trees.
#[derive(Debug, Clone)]
pub struct CostTable {
    n: usize,
    costs: Vec<u64>,
}

impl CostTable {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> u64) -> Self {
        let mut costs = vec![0; n * n];
        for a in 1..=n {
            for b in a + 1..=n {
                let c = f(a, b);
                costs[(a - 1) * n + (b - 1)] = c;
                costs[(b - 1) * n + (a - 1)] = c;
            }
        }
        CostTable { n, costs }
    }

    /// Every swap costs 1.
    pub fn unit_complete(n: usize) -> Self {
        CostTable::from_fn(n, |_, _| 1)
    }
}

impl SwapCost for CostTable {
    fn n(&self) -> usize {
        self.n
    }

    fn cost(&self, a: usize, b: usize) -> u64 {
        self.costs[(a - 1) * self.n + (b - 1)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_n: usize,
    pub max_states: usize,
    pub max_weight: Option<Weight>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_n: 8,
            max_states: 10_000_000,
            max_weight: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetLimit {
    MaxN { n: usize, max_n: usize },
    MaxStates(usize),
    MaxWeight(Weight),
}

impl fmt::Display for BudgetLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BudgetLimit::MaxN { n, max_n } => write!(f, "n = {n} is above max_n = {max_n}"),
            BudgetLimit::MaxStates(s) => write!(f, "more than {s} states visited"),
            BudgetLimit::MaxWeight(w) => write!(f, "distance exceeds {w}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("search budget exceeded: {0}")]
    BudgetExceeded(BudgetLimit),
    #[error("permutation has size {perm} but the cost structure has {costs} elements")]
    SizeMismatch { costs: usize, perm: usize },
}

fn encode(images: &[usize]) -> u64 {
    images.iter().fold(0u64, |key, &v| (key << 4) | v as u64)
}

fn decode(key: u64, n: usize, out: &mut [usize]) {
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = ((key >> (4 * (n - 1 - i))) & 0xF) as usize;
    }
}

fn zero_based(p: &Permutation) -> Vec<usize> {
    p.one_line().iter().map(|v| v - 1).collect()
}

fn admit(n: usize, budget: &SearchBudget) -> Result<(), OracleError> {
    if n > budget.max_n || n > KEY_LIMIT {
        return Err(OracleError::BudgetExceeded(BudgetLimit::MaxN {
            n,
            max_n: budget.max_n.min(KEY_LIMIT),
        }));
    }
    if n > WARN_ABOVE {
        log::warn!("exact search over S_{n} may be slow");
    }
    Ok(())
}

struct Settled {
    dist: u64,
    parent: u64,
    swap: (u8, u8),
}

/// Dijkstra from `start`. Moves right-multiply by a transposition, i.e. swap
/// two positions. Stops early once `target` is settled.
fn search<C: SwapCost + ?Sized>(
    costs: &C,
    start: &[usize],
    target: Option<u64>,
    budget: &SearchBudget,
) -> Result<HashMap<u64, Settled>, OracleError> {
    let n = start.len();
    let start_key = encode(start);
    let mut best: HashMap<u64, u64> = HashMap::new();
    let mut settled: HashMap<u64, Settled> = HashMap::new();
    let mut parents: HashMap<u64, (u64, (u8, u8))> = HashMap::new();
    let mut heap = BinaryHeap::new();
    best.insert(start_key, 0);
    parents.insert(start_key, (start_key, (0, 0)));
    heap.push(Reverse((0u64, start_key)));
    let mut images = vec![0usize; n];

    while let Some(Reverse((dist, key))) = heap.pop() {
        if settled.contains_key(&key) {
            continue;
        }
        if let Some(limit) = budget.max_weight {
            if dist > limit.get() {
                return Err(OracleError::BudgetExceeded(BudgetLimit::MaxWeight(limit)));
            }
        }
        let (parent, swap) = parents[&key];
        settled.insert(key, Settled { dist, parent, swap });
        if Some(key) == target {
            break;
        }
        decode(key, n, &mut images);
        for a in 0..n {
            for b in a + 1..n {
                images.swap(a, b);
                let next = encode(&images);
                images.swap(a, b);
                if settled.contains_key(&next) {
                    continue;
                }
                let nd = dist + costs.cost(a + 1, b + 1);
                let improve = match best.entry(next) {
                    Entry::Occupied(mut e) if nd < *e.get() => {
                        e.insert(nd);
                        true
                    }
                    Entry::Occupied(_) => false,
                    Entry::Vacant(e) => {
                        e.insert(nd);
                        true
                    }
                };
                if improve {
                    if best.len() > budget.max_states {
                        return Err(OracleError::BudgetExceeded(BudgetLimit::MaxStates(
                            budget.max_states,
                        )));
                    }
                    parents.insert(next, (key, (a as u8 + 1, b as u8 + 1)));
                    heap.push(Reverse((nd, next)));
                }
            }
        }
    }
    Ok(settled)
}

/// Exact minimum decomposition cost of `p` with one optimal decomposition
/// `tau_1 ... tau_k = p`.
pub fn exact_distance<C: SwapCost + ?Sized>(
    costs: &C,
    p: &Permutation,
    budget: &SearchBudget,
) -> Result<(Weight, Transform), OracleError> {
    let n = costs.n();
    if p.n() != n {
        return Err(OracleError::SizeMismatch {
            costs: n,
            perm: p.n(),
        });
    }
    admit(n, budget)?;
    let start = zero_based(p);
    let target = encode(&(0..n).collect::<Vec<_>>());
    let settled = search(costs, &start, Some(target), budget)?;
    let start_key = encode(&start);

    // Walking parents back from the identity lists the sorting in reverse,
    // which is exactly the decomposition order.
    let mut taus = Vec::new();
    let mut key = target;
    while key != start_key {
        let s = &settled[&key];
        taus.push(Transposition::ordered(s.swap.0 as usize, s.swap.1 as usize));
        key = s.parent;
    }
    let dist = settled[&target].dist;
    Ok((Weight(dist), Transform::from_parts(taus, Weight(dist))))
}

/// `d(p, q)`: the exact distance of the `r` with `q r = p`.
pub fn exact_distance_pair<C: SwapCost + ?Sized>(
    costs: &C,
    p: &Permutation,
    q: &Permutation,
    budget: &SearchBudget,
) -> Result<Weight, OracleError> {
    if p.n() != q.n() {
        return Err(OracleError::SizeMismatch {
            costs: p.n(),
            perm: q.n(),
        });
    }
    let r = q.inverse().compose(p).expect("sizes checked above");
    Ok(exact_distance(costs, &r, budget)?.0)
}

/// Exact distances from the identity to every permutation of `[n]`.
/// Swap moves are symmetric, so this is also the distance to the identity.
pub struct DistanceTable {
    n: usize,
    dist: HashMap<u64, u64>,
}

impl DistanceTable {
    pub fn build<C: SwapCost + ?Sized>(
        costs: &C,
        budget: &SearchBudget,
    ) -> Result<Self, OracleError> {
        let n = costs.n();
        admit(n, budget)?;
        let start: Vec<usize> = (0..n).collect();
        let settled = search(costs, &start, None, budget)?;
        Ok(DistanceTable {
            n,
            dist: settled.into_iter().map(|(k, s)| (k, s.dist)).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn get(&self, p: &Permutation) -> Option<Weight> {
        if p.n() != self.n {
            return None;
        }
        self.dist.get(&encode(&zero_based(p))).map(|&d| Weight(d))
    }
}
