//! Minimum-cost transposition decompositions of a single cycle on a Y-tree.
//!
//! A cycle falls in one of four classes: its support lies on a path of the
//! tree, it contains the central vertex, it is balanced (every pair of
//! branches is crossed equally often in both directions), or it is
//! unbalanced. The first three cost exactly `D/2`; an unbalanced cycle costs
//! `D/2 + min_v phi(center, v)`.
//!
//! Every routine works on the cycle as a sequence of labels and runs in time
//! linear in the cycle length. Recursion is replaced by explicit stacks so
//! cycles with millions of elements are fine.

use std::fmt;

use thiserror::Error;

use crate::perm::{Cycle, PermError, Permutation, Transposition};
use crate::tree::{Shape, TreeError, TreeMetric, Weight};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("cycle {0} does not lie on a path of the tree")]
    NotOnPath(String),
    #[error("cycle {0} does not contain the central vertex")]
    CenterNotInCycle(String),
    #[error("cycle {0} is not balanced (or is handled by another case)")]
    NotBalanced(String),
    #[error("cycle {0} is not unbalanced (or is handled by another case)")]
    NotUnbalanced(String),
    #[error("element {value} outside the tree's vertex set [1, {n}]")]
    ElementOutOfRange { value: usize, n: usize },
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CycleKind {
    OnPath,
    ContainsCenter,
    Balanced,
    Unbalanced,
}

impl fmt::Display for CycleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CycleKind::OnPath => "on_path",
            CycleKind::ContainsCenter => "contains_center",
            CycleKind::Balanced => "balanced",
            CycleKind::Unbalanced => "unbalanced",
        })
    }
}

/// Arc counts between branches: `get(i, j)` is the number of arcs
/// `v -> pi(v)` with `v` on branch `i` and `pi(v)` on branch `j`.
/// Arcs touching the center are not counted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BalanceCounts {
    arcs: [[u32; 3]; 3],
}

impl BalanceCounts {
    /// Branch indices are 1-based.
    pub fn get(&self, from: u8, to: u8) -> u32 {
        self.arcs[from as usize - 1][to as usize - 1]
    }

    pub(crate) fn record(&mut self, from: u8, to: u8) {
        if from != 0 && to != 0 && from != to {
            self.arcs[from as usize - 1][to as usize - 1] += 1;
        }
    }

    pub fn is_balanced(&self) -> bool {
        (0..3).all(|i| (0..3).all(|j| self.arcs[i][j] == self.arcs[j][i]))
    }

    pub fn crossing_arcs(&self) -> u32 {
        self.arcs.iter().flatten().sum()
    }

    /// Net number of turns around the center, `l12 - l21`. For a single
    /// cycle that avoids the center this equals `l23 - l32` and `l31 - l13`,
    /// and it is zero exactly when the cycle is balanced.
    pub fn winding(&self) -> i64 {
        self.arcs[0][1] as i64 - self.arcs[1][0] as i64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleClass {
    pub kind: CycleKind,
    pub counts: BalanceCounts,
}

/// An ordered transposition sequence `tau_1, ..., tau_k` read as the product
/// `tau_1 tau_2 ... tau_k`, with its exact total weight.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transform {
    taus: Vec<Transposition>,
    total_weight: Weight,
}

impl Transform {
    pub fn new(tree: &TreeMetric, taus: Vec<Transposition>) -> Result<Self, SolveError> {
        let mut total = 0;
        for tau in &taus {
            total += tree.phi(tau.a(), tau.b())?.get();
        }
        Ok(Transform {
            taus,
            total_weight: Weight(total),
        })
    }

    pub fn empty() -> Self {
        Transform::default()
    }

    pub(crate) fn from_parts(taus: Vec<Transposition>, total_weight: Weight) -> Self {
        Transform { taus, total_weight }
    }

    pub fn taus(&self) -> &[Transposition] {
        &self.taus
    }

    pub fn into_taus(self) -> Vec<Transposition> {
        self.taus
    }

    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    pub fn total_weight(&self) -> Weight {
        self.total_weight
    }

    pub fn push(&mut self, tree: &TreeMetric, tau: Transposition) {
        self.total_weight += Weight(tree.dist(tau.a(), tau.b()));
        self.taus.push(tau);
    }

    pub fn append(&mut self, other: Transform) {
        self.total_weight += other.total_weight;
        self.taus.extend(other.taus);
    }

    /// The permutation `tau_1 ... tau_k` on `[n]`.
    pub fn product(&self, n: usize) -> Result<Permutation, PermError> {
        Permutation::from_transpositions(n, &self.taus)
    }
}

/// Collects emitted transpositions together with their running weight and an
/// operation counter.
pub(crate) struct Emitter<'t> {
    tree: &'t TreeMetric,
    taus: Vec<Transposition>,
    weight: u64,
    pub(crate) ops: u64,
}

impl<'t> Emitter<'t> {
    pub(crate) fn new(tree: &'t TreeMetric, capacity: usize) -> Self {
        Emitter {
            tree,
            taus: Vec::with_capacity(capacity),
            weight: 0,
            ops: 0,
        }
    }

    #[inline]
    fn emit(&mut self, a: usize, b: usize) {
        self.weight += self.tree.dist(a, b);
        self.taus.push(Transposition::ordered(a, b));
        self.ops += 1;
    }

    pub(crate) fn weight(&self) -> u64 {
        self.weight
    }

    pub(crate) fn finish(self) -> (Transform, u64) {
        (
            Transform::from_parts(self.taus, Weight(self.weight)),
            self.ops,
        )
    }
}

const NONE: usize = usize::MAX;

/// Which branches a label sequence touches (slot 0 is the center) and its
/// branch-crossing arc counts, reading the sequence cyclically.
fn scan(tree: &TreeMetric, seq: &[usize]) -> ([bool; 4], BalanceCounts) {
    let mut present = [false; 4];
    let mut counts = BalanceCounts::default();
    let k = seq.len();
    for i in 0..k {
        let from = tree.branch_raw(seq[i]);
        present[from as usize] = true;
        counts.record(from, tree.branch_raw(seq[(i + 1) % k]));
    }
    (present, counts)
}

fn classify_seq(tree: &TreeMetric, seq: &[usize]) -> CycleClass {
    let (present, counts) = scan(tree, seq);
    let kind = match tree.shape() {
        Shape::Path => CycleKind::OnPath,
        Shape::YTree { .. } => {
            let branches = present[1..].iter().filter(|&&b| b).count();
            if branches <= 2 {
                CycleKind::OnPath
            } else if present[0] {
                CycleKind::ContainsCenter
            } else if counts.is_balanced() {
                CycleKind::Balanced
            } else {
                CycleKind::Unbalanced
            }
        }
    };
    CycleClass { kind, counts }
}

pub(crate) fn check_cycle(tree: &TreeMetric, c: &Cycle) -> Result<(), SolveError> {
    let n = tree.n();
    match c.elements().iter().find(|&&v| v > n) {
        Some(&value) => Err(SolveError::ElementOutOfRange { value, n }),
        None => Ok(()),
    }
}

pub fn classify_cycle(tree: &TreeMetric, c: &Cycle) -> Result<CycleClass, SolveError> {
    check_cycle(tree, c)?;
    Ok(classify_seq(tree, c.elements()))
}

/// Signed coordinate along the path that carries `seq`: distance from the
/// center, negated on the lowest-numbered branch present. On a path-shaped
/// tree it is the distance from the first endpoint.
fn path_coordinates<'t>(tree: &'t TreeMetric, seq: &[usize]) -> impl Fn(usize) -> i64 + 't {
    let negative = seq
        .iter()
        .map(|&v| tree.branch_raw(v))
        .filter(|&b| b != 0)
        .min()
        .unwrap_or(0);
    move |v| {
        let d = tree.depth(v) as i64;
        if negative != 0 && tree.branch_raw(v) == negative {
            -d
        } else {
            d
        }
    }
}

/// Path decomposition of a cycle whose support lies on a path.
///
/// Written from the leftmost element `v1`, the cycle splits at the second
/// leftmost element `vt` into `(v1 .. vt)(vt .. vk)`, or when `vt` is last
/// peels off as `(v2 .. vk)(v1 vk)`. Unrolled, every element of
/// `v2 .. vk` is emitted exactly once, paired with its parent in the
/// min-Cartesian tree of that sequence (`v1` for the root), in in-order.
fn path_td_seq(em: &mut Emitter<'_>, seq: &[usize]) {
    let k = seq.len();
    if k < 2 {
        return;
    }
    let coord = path_coordinates(em.tree, seq);
    let start = (0..k).min_by_key(|&i| coord(seq[i])).expect("non-empty");
    let head = seq[start];
    let rest: Vec<usize> = (1..k).map(|o| seq[(start + o) % k]).collect();
    let keys: Vec<i64> = rest.iter().map(|&v| coord(v)).collect();
    let m = rest.len();
    em.ops += k as u64;

    let mut left = vec![NONE; m];
    let mut right = vec![NONE; m];
    let mut parent = vec![NONE; m];
    let mut spine: Vec<usize> = Vec::with_capacity(m);
    for i in 0..m {
        let mut last = NONE;
        while let Some(&top) = spine.last() {
            if keys[top] > keys[i] {
                last = top;
                spine.pop();
            } else {
                break;
            }
        }
        if last != NONE {
            left[i] = last;
            parent[last] = i;
        }
        if let Some(&top) = spine.last() {
            right[top] = i;
            parent[i] = top;
        }
        spine.push(i);
    }

    let mut pending: Vec<usize> = Vec::new();
    let mut cur = spine[0];
    loop {
        while cur != NONE {
            pending.push(cur);
            cur = left[cur];
        }
        let Some(node) = pending.pop() else { break };
        let h = match parent[node] {
            NONE => head,
            p => rest[p],
        };
        em.emit(h, rest[node]);
        cur = right[node];
    }
}

/// Center decomposition. Rotated to `(cv v1 .. v_{m-1})`, the leading run
/// `v1 .. vt` on `Br(v1)` splits off as `(cv v1 .. vt)`, leaving
/// `(cv v_{t+1} ..)`; this repeats until the rest lies on a path.
/// The product is `rest * piece_last * ... * piece_first`.
fn central_td_seq(em: &mut Emitter<'_>, seq: &[usize], center: usize) {
    let tree = em.tree;
    let k = seq.len();
    let at = seq
        .iter()
        .position(|&v| v == center)
        .expect("center in cycle");
    let v: Vec<usize> = (1..k).map(|o| seq[(at + o) % k]).collect();
    let br = |x: usize| tree.branch_raw(x) as usize;
    let mut counts = [0usize; 4];
    for &x in &v {
        counts[br(x)] += 1;
    }
    em.ops += k as u64;

    let spans_all = |c: &[usize; 4]| c[1] > 0 && c[2] > 0 && c[3] > 0;
    let mut pieces: Vec<(usize, usize)> = Vec::new();
    let mut pos = 0;
    while spans_all(&counts) {
        let b = br(v[pos]);
        let mut t = pos;
        while br(v[t + 1]) == b {
            t += 1;
        }
        counts[b] -= t + 1 - pos;
        em.ops += (t + 1 - pos) as u64;
        pieces.push((pos, t));
        pos = t + 1;
    }

    let mut buf = Vec::with_capacity(k);
    buf.push(center);
    buf.extend_from_slice(&v[pos..]);
    path_td_seq(em, &buf);
    for &(s, e) in pieces.iter().rev() {
        buf.clear();
        buf.push(center);
        buf.extend_from_slice(&v[s..=e]);
        path_td_seq(em, &buf);
    }
}

/// Adjacent-cycle decomposition of a balanced cycle into path-supported
/// factors: `left[0] * left[1] * ... * remainder * ... * right[1] * right[0]`.
struct BalancedPieces {
    left: Vec<Vec<usize>>,
    remainder: Vec<usize>,
    right: Vec<Vec<usize>>,
}

/// Walks the cycle from `seq[0]`, pushing branch-changing arcs on a stack.
/// An arc that returns to the source branch of the stack top is paired with
/// it and the stretch between them is split off:
/// with `(b1 -> b2)` on top and the new arc `(c1 -> c2)`, if `b1` is at most
/// as far from the center as `c2` the factor `(b1 .. c1)` goes to the right
/// of the remaining cycle, otherwise `(b2 .. c2)` goes to its left. In both
/// cases the remaining cycle continues `b1 -> c2`.
fn balanced_pieces(
    tree: &TreeMetric,
    seq: &[usize],
    center: usize,
    first_only: bool,
    ops: &mut u64,
) -> BalancedPieces {
    let m = seq.len();
    let br = |i: usize| tree.branch_raw(seq[i]) as usize;
    let mut next: Vec<usize> = (1..=m).map(|i| i % m).collect();
    let mut counts = [0usize; 4];
    for i in 0..m {
        counts[br(i)] += 1;
    }
    let mut stack: Vec<(usize, usize)> = Vec::new();
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut a = 0usize;
    let mut steps = 0usize;

    let collect = |next: &[usize], from: usize, to: usize| -> Vec<usize> {
        let mut out = vec![seq[from]];
        let mut x = from;
        while x != to {
            x = next[x];
            out.push(seq[x]);
        }
        out
    };

    while counts[1] > 0 && counts[2] > 0 && counts[3] > 0 {
        let mut c1 = a;
        while br(next[c1]) == br(c1) {
            c1 = next[c1];
            steps += 1;
        }
        let c2 = next[c1];
        a = c2;
        steps += 1;
        assert!(
            steps <= 2 * m + 2,
            "branch walk did not terminate; input cycle is not balanced"
        );
        match stack.last() {
            Some(&(b1, b2)) if br(c2) == br(b1) => {
                stack.pop();
                if tree.dist(center, seq[b1]) <= tree.dist(center, seq[c2]) {
                    right.push(collect(&next, b1, c1));
                } else {
                    left.push(collect(&next, b2, c2));
                }
                let mut x = b2;
                loop {
                    counts[br(x)] -= 1;
                    if x == c1 {
                        break;
                    }
                    x = next[x];
                }
                next[b1] = c2;
                if first_only {
                    break;
                }
            }
            _ => stack.push((c1, c2)),
        }
    }
    *ops += (m + steps) as u64;
    let mut remainder = vec![seq[a]];
    let mut x = next[a];
    while x != a {
        remainder.push(seq[x]);
        x = next[x];
    }
    BalancedPieces {
        left,
        remainder,
        right,
    }
}

fn balanced_td_seq(em: &mut Emitter<'_>, seq: &[usize], center: usize) {
    let mut ops = 0;
    let pieces = balanced_pieces(em.tree, seq, center, false, &mut ops);
    em.ops += ops;
    for piece in &pieces.left {
        path_td_seq(em, piece);
    }
    path_td_seq(em, &pieces.remainder);
    for piece in pieces.right.iter().rev() {
        path_td_seq(em, piece);
    }
}

/// Pieces of the unbalanced construction: the cycle rotated to start at
/// `vj` (closest to the center, ties to the smaller label), the same-branch
/// run `vj .. vk` that follows it, and the rest `(vj v_{k+1} ..)` with the
/// center inserted after `vj`.
struct UnbalancedParts {
    vj: usize,
    run: Vec<usize>,
    merged: Vec<usize>,
}

fn unbalanced_parts(tree: &TreeMetric, seq: &[usize], center: usize) -> UnbalancedParts {
    let k = seq.len();
    let j = (0..k)
        .min_by_key(|&i| (tree.depth(seq[i]), seq[i]))
        .expect("non-empty");
    let r: Vec<usize> = (0..k).map(|o| seq[(j + o) % k]).collect();
    let b = tree.branch_raw(r[0]);
    let mut end = 0;
    while tree.branch_raw(r[end + 1]) == b {
        end += 1;
    }
    let mut merged = Vec::with_capacity(k + 1 - end);
    merged.push(r[0]);
    merged.push(center);
    merged.extend_from_slice(&r[end + 1..]);
    UnbalancedParts {
        vj: r[0],
        run: r[..=end].to_vec(),
        merged,
    }
}

/// `(.. vj vk+1 ..)(vj .. vk)` with `(.. vj vk+1 ..) = (.. vj cv vk+1 ..)(vj cv)`.
fn unbalanced_td_seq(em: &mut Emitter<'_>, seq: &[usize], center: usize) {
    let parts = unbalanced_parts(em.tree, seq, center);
    em.ops += seq.len() as u64;
    central_td_seq(em, &parts.merged, center);
    em.emit(parts.vj, center);
    if parts.run.len() >= 2 {
        path_td_seq(em, &parts.run);
    }
}

fn run_with<F>(tree: &TreeMetric, c: &Cycle, body: F) -> (Transform, u64)
where
    F: FnOnce(&mut Emitter<'_>, &[usize]),
{
    let mut em = Emitter::new(tree, c.len() + 1);
    body(&mut em, c.elements());
    em.finish()
}

pub fn path_td(tree: &TreeMetric, c: &Cycle) -> Result<Transform, SolveError> {
    if classify_cycle(tree, c)?.kind != CycleKind::OnPath {
        return Err(SolveError::NotOnPath(c.to_string()));
    }
    Ok(run_with(tree, c, path_td_seq).0)
}

pub fn central_td(tree: &TreeMetric, c: &Cycle) -> Result<Transform, SolveError> {
    check_cycle(tree, c)?;
    let center = match tree.center() {
        Some(cv) if c.elements().contains(&cv) => cv,
        _ => return Err(SolveError::CenterNotInCycle(c.to_string())),
    };
    Ok(run_with(tree, c, |em, seq| central_td_seq(em, seq, center)).0)
}

pub fn balanced_td(tree: &TreeMetric, c: &Cycle) -> Result<Transform, SolveError> {
    let class = classify_cycle(tree, c)?;
    let center = tree.center();
    match (class.kind, center) {
        (CycleKind::Balanced, Some(cv)) => {
            Ok(run_with(tree, c, |em, seq| balanced_td_seq(em, seq, cv)).0)
        }
        _ => Err(SolveError::NotBalanced(c.to_string())),
    }
}

pub fn unbalanced_td(tree: &TreeMetric, c: &Cycle) -> Result<Transform, SolveError> {
    let class = classify_cycle(tree, c)?;
    match (class.kind, tree.center()) {
        (CycleKind::Unbalanced, Some(cv)) => {
            Ok(run_with(tree, c, |em, seq| unbalanced_td_seq(em, seq, cv)).0)
        }
        _ => Err(SolveError::NotUnbalanced(c.to_string())),
    }
}

/// Closed-form minimum decomposition cost of a single cycle.
pub fn delta_cycle(tree: &TreeMetric, c: &Cycle) -> Result<Weight, SolveError> {
    let class = classify_cycle(tree, c)?;
    Ok(delta_with_class(tree, c.elements(), class.kind))
}

pub(crate) fn cycle_displacement(tree: &TreeMetric, seq: &[usize]) -> u64 {
    let k = seq.len();
    (0..k).map(|i| tree.dist(seq[i], seq[(i + 1) % k])).sum()
}

pub(crate) fn center_gap(tree: &TreeMetric, seq: &[usize]) -> u64 {
    seq.iter().map(|&v| tree.depth(v)).min().unwrap_or(0)
}

fn delta_with_class(tree: &TreeMetric, seq: &[usize], kind: CycleKind) -> Weight {
    let half = Weight(cycle_displacement(tree, seq)).halved();
    if kind == CycleKind::Unbalanced {
        half + Weight(center_gap(tree, seq))
    } else {
        half
    }
}

/// Minimum-cost decomposition of any cycle; dispatches on its class.
pub fn decompose_cycle(tree: &TreeMetric, c: &Cycle) -> Result<Transform, SolveError> {
    Ok(decompose_cycle_with_ops(tree, c)?.0)
}

/// As [`decompose_cycle`], also returning an elementary-step count.
pub fn decompose_cycle_with_ops(
    tree: &TreeMetric,
    c: &Cycle,
) -> Result<(Transform, u64), SolveError> {
    let class = classify_cycle(tree, c)?;
    let mut em = Emitter::new(tree, c.len() + 1);
    em.ops += c.len() as u64;
    decompose_seq(&mut em, c.elements(), class.kind);
    Ok(em.finish())
}

pub(crate) fn decompose_seq(em: &mut Emitter<'_>, seq: &[usize], kind: CycleKind) {
    let center = em.tree.center();
    match (kind, center) {
        (CycleKind::OnPath, _) | (_, None) => path_td_seq(em, seq),
        (CycleKind::ContainsCenter, Some(cv)) => central_td_seq(em, seq, cv),
        (CycleKind::Balanced, Some(cv)) => balanced_td_seq(em, seq, cv),
        (CycleKind::Unbalanced, Some(cv)) => unbalanced_td_seq(em, seq, cv),
    }
}

/// Single reduction steps of the four procedures, exposed so the adjacent
/// cycle factorizations can be inspected one step at a time.
pub mod steps {
    use super::*;

    #[derive(Debug, Clone, PartialEq, Eq)]
    pub enum PathStep {
        /// A 2-cycle is its own decomposition.
        Base(Transposition),
        /// `c = first * second`.
        Split { first: Cycle, second: Cycle },
        /// `c = rest * tau`.
        Peel { rest: Cycle, tau: Transposition },
    }

    pub fn path_step(tree: &TreeMetric, c: &Cycle) -> Result<PathStep, SolveError> {
        if classify_cycle(tree, c)?.kind != CycleKind::OnPath {
            return Err(SolveError::NotOnPath(c.to_string()));
        }
        let seq = c.elements();
        let k = seq.len();
        if k == 2 {
            return Ok(PathStep::Base(Transposition::ordered(seq[0], seq[1])));
        }
        let coord = path_coordinates(tree, seq);
        let start = (0..k).min_by_key(|&i| coord(seq[i])).unwrap();
        let v: Vec<usize> = (0..k).map(|o| seq[(start + o) % k]).collect();
        let t = (1..k).min_by_key(|&i| coord(v[i])).unwrap();
        if t != k - 1 {
            Ok(PathStep::Split {
                first: Cycle::from_rotation(v[..=t].to_vec()),
                second: Cycle::from_rotation(v[t..].to_vec()),
            })
        } else {
            Ok(PathStep::Peel {
                rest: Cycle::from_rotation(v[1..].to_vec()),
                tau: Transposition::ordered(v[0], v[k - 1]),
            })
        }
    }

    #[derive(Debug, Clone, PartialEq, Eq)]
    pub enum CentralStep {
        /// Support already on a path; handled by the path procedure.
        OnPath,
        /// `c = rest * piece`, with `piece` on a path and `rest` still
        /// containing the center.
        Split { rest: Cycle, piece: Cycle },
    }

    pub fn central_step(tree: &TreeMetric, c: &Cycle) -> Result<CentralStep, SolveError> {
        check_cycle(tree, c)?;
        let center = match tree.center() {
            Some(cv) if c.elements().contains(&cv) => cv,
            _ => return Err(SolveError::CenterNotInCycle(c.to_string())),
        };
        if classify_cycle(tree, c)?.kind == CycleKind::OnPath {
            return Ok(CentralStep::OnPath);
        }
        let seq = c.elements();
        let k = seq.len();
        let at = seq.iter().position(|&v| v == center).unwrap();
        let v: Vec<usize> = (1..k).map(|o| seq[(at + o) % k]).collect();
        let b = tree.branch_raw(v[0]);
        let mut t = 0;
        while tree.branch_raw(v[t + 1]) == b {
            t += 1;
        }
        let mut piece = vec![center];
        piece.extend_from_slice(&v[..=t]);
        let mut rest = vec![center];
        rest.extend_from_slice(&v[t + 1..]);
        Ok(CentralStep::Split {
            rest: Cycle::from_rotation(rest),
            piece: Cycle::from_rotation(piece),
        })
    }

    #[derive(Debug, Clone, PartialEq, Eq)]
    pub enum BalancedStep {
        OnPath,
        /// `c = rest * piece`.
        Right {
            rest: Cycle,
            piece: Cycle,
        },
        /// `c = piece * rest`.
        Left {
            piece: Cycle,
            rest: Cycle,
        },
    }

    /// The first pairing made by the stack walk.
    pub fn balanced_step(tree: &TreeMetric, c: &Cycle) -> Result<BalancedStep, SolveError> {
        let class = classify_cycle(tree, c)?;
        match (class.kind, tree.center()) {
            (CycleKind::OnPath, _) => Ok(BalancedStep::OnPath),
            (CycleKind::Balanced, Some(cv)) => {
                let mut ops = 0;
                let mut p = balanced_pieces(tree, c.elements(), cv, true, &mut ops);
                let rest = Cycle::from_rotation(p.remainder);
                if let Some(piece) = p.left.pop() {
                    Ok(BalancedStep::Left {
                        piece: Cycle::from_rotation(piece),
                        rest,
                    })
                } else if let Some(piece) = p.right.pop() {
                    Ok(BalancedStep::Right {
                        rest,
                        piece: Cycle::from_rotation(piece),
                    })
                } else {
                    unreachable!("a balanced cycle on three branches has a pairing")
                }
            }
            _ => Err(SolveError::NotBalanced(c.to_string())),
        }
    }

    #[derive(Debug, Clone, PartialEq, Eq)]
    pub enum UnbalancedStep {
        /// `c = merged * tau` where `merged` has the center inserted.
        MergeCenter { merged: Cycle, tau: Transposition },
        /// `c = rest * run`, `run` being a same-branch stretch.
        Peel { rest: Cycle, run: Cycle },
    }

    pub fn unbalanced_step(tree: &TreeMetric, c: &Cycle) -> Result<UnbalancedStep, SolveError> {
        let class = classify_cycle(tree, c)?;
        let cv = match (class.kind, tree.center()) {
            (CycleKind::Unbalanced, Some(cv)) => cv,
            _ => return Err(SolveError::NotUnbalanced(c.to_string())),
        };
        let parts = unbalanced_parts(tree, c.elements(), cv);
        if parts.run.len() >= 2 {
            let mut rest = vec![parts.vj];
            rest.extend(parts.merged[2..].iter().copied());
            Ok(UnbalancedStep::Peel {
                rest: Cycle::from_rotation(rest),
                run: Cycle::from_rotation(parts.run),
            })
        } else {
            Ok(UnbalancedStep::MergeCenter {
                merged: Cycle::from_rotation(parts.merged),
                tau: Transposition::ordered(parts.vj, cv),
            })
        }
    }
}
