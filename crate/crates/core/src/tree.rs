//! Tree-structured defining graphs and the metric they induce.
//!
//! Only two shapes are accepted: simple paths, and Y-trees (exactly one
//! vertex of degree three, none higher). Both admit O(1) distance queries
//! after a linear pass: every vertex gets a branch index (0 for the center,
//! and for every vertex of a path) and its weighted depth from the root, so
//! `phi(a, b)` is `|depth(a) - depth(b)|` when `a` and `b` share a branch and
//! `depth(a) + depth(b)` otherwise.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign};

use thiserror::Error;

use crate::perm::{Permutation, Transposition};

/// Exact non-negative weight.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight(pub u64);

impl Weight {
    pub const ZERO: Weight = Weight(0);

    pub fn get(self) -> u64 {
        self.0
    }

    /// Exact half. Displacements on a tree are always even, so callers only
    /// halve values known to be even.
    pub fn halved(self) -> Weight {
        debug_assert!(self.0.is_multiple_of(2), "halving odd weight {}", self.0);
        Weight(self.0 / 2)
    }
}

impl Add for Weight {
    type Output = Weight;
    fn add(self, rhs: Weight) -> Weight {
        Weight(self.0 + rhs.0)
    }
}

impl AddAssign for Weight {
    fn add_assign(&mut self, rhs: Weight) {
        self.0 += rhs.0;
    }
}

impl Sum for Weight {
    fn sum<I: Iterator<Item = Weight>>(iter: I) -> Weight {
        Weight(iter.map(|w| w.0).sum())
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("tree must have at least one vertex")]
    Empty,
    #[error("vertex {vertex} out of range [1, {n}]")]
    OutOfRange { vertex: usize, n: usize },
    #[error("edge ({u}, {v}) has non-positive weight")]
    NonPositiveWeight { u: usize, v: usize },
    #[error("graph contains a cycle (edge ({u}, {v}) closes it)")]
    HasCycle { u: usize, v: usize },
    #[error("graph is not connected ({components} components)")]
    NotConnected { components: usize },
    #[error("neither a path nor a Y-tree: {0}")]
    DegreeTooHigh(String),
    #[error("tree is not a Y-tree")]
    NotAYTree,
    #[error("the central vertex belongs to no branch")]
    CenterHasNoBranch,
    #[error("tree has {tree} vertices but permutation has {perm}")]
    SizeMismatch { tree: usize, perm: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Path,
    YTree { center: usize },
}

/// Index of a Y-tree branch, 1, 2 or 3. Branches are numbered by their
/// smallest vertex label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BranchId(u8);

impl BranchId {
    pub fn index(self) -> u8 {
        self.0
    }
}

impl fmt::Display for BranchId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: Weight,
}

/// A validated path or Y-tree on `[n]` with positive integer edge weights.
#[derive(Debug, Clone)]
pub struct TreeMetric {
    n: usize,
    edges: Vec<Edge>,
    degree: Vec<u32>,
    shape: Shape,
    // Indexed by vertex label; slot 0 is unused.
    depth: Vec<u64>,
    branch: Vec<u8>,
}

impl TreeMetric {
    pub fn build(n: usize, edges: &[(usize, usize, u64)]) -> Result<Self, TreeError> {
        if n == 0 {
            return Err(TreeError::Empty);
        }
        for &(u, v, w) in edges {
            for x in [u, v] {
                if x == 0 || x > n {
                    return Err(TreeError::OutOfRange { vertex: x, n });
                }
            }
            if w == 0 {
                return Err(TreeError::NonPositiveWeight { u, v });
            }
        }

        let mut dsu = Dsu::new(n + 1);
        for &(u, v, _) in edges {
            if !dsu.union(u, v) {
                return Err(TreeError::HasCycle { u, v });
            }
        }
        let components = (1..=n).filter(|&x| dsu.find(x) == x).count();
        if components != 1 {
            return Err(TreeError::NotConnected { components });
        }

        let mut degree = vec![0u32; n + 1];
        let mut adj: Vec<Vec<(usize, u64)>> = vec![Vec::new(); n + 1];
        for &(u, v, w) in edges {
            degree[u] += 1;
            degree[v] += 1;
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        if let Some(v) = (1..=n).find(|&v| degree[v] >= 4) {
            return Err(TreeError::DegreeTooHigh(format!(
                "vertex {v} has degree {}",
                degree[v]
            )));
        }
        let hubs: Vec<usize> = (1..=n).filter(|&v| degree[v] == 3).collect();
        if hubs.len() > 1 {
            return Err(TreeError::DegreeTooHigh(format!(
                "vertices {} and {} both have degree 3",
                hubs[0], hubs[1]
            )));
        }

        let mut depth = vec![0u64; n + 1];
        let mut branch = vec![0u8; n + 1];
        let shape = match hubs.first() {
            None => {
                let root = (1..=n)
                    .find(|&v| degree[v] <= 1)
                    .expect("paths have endpoints");
                walk_from(&adj, root, &mut depth, |_, _| {});
                Shape::Path
            }
            Some(&center) => {
                // Label each vertex with the neighbour of the center it hangs from.
                let mut arm = vec![0usize; n + 1];
                walk_from(&adj, center, &mut depth, |child, parent| {
                    arm[child] = if parent == center { child } else { arm[parent] };
                });
                let mut arm_min: Vec<(usize, usize)> = adj[center]
                    .iter()
                    .map(|&(first, _)| {
                        let smallest = (1..=n).filter(|&v| arm[v] == first).min().unwrap();
                        (smallest, first)
                    })
                    .collect();
                arm_min.sort_unstable();
                for v in 1..=n {
                    if v != center {
                        let rank = arm_min.iter().position(|&(_, f)| f == arm[v]).unwrap();
                        branch[v] = rank as u8 + 1;
                    }
                }
                Shape::YTree { center }
            }
        };

        Ok(TreeMetric {
            n,
            edges: edges
                .iter()
                .map(|&(u, v, w)| Edge {
                    u,
                    v,
                    weight: Weight(w),
                })
                .collect(),
            degree,
            shape,
            depth,
            branch,
        })
    }

    /// Parses the tree file format: a line with `n`, then `n - 1` lines
    /// `u v w`. Text after `#` is ignored.
    pub fn parse(text: &str) -> Result<Self, TreeError> {
        let mut n: Option<usize> = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            let num = |s: &str| -> Result<u64, TreeError> {
                s.parse::<u64>().map_err(|_| TreeError::Parse {
                    line,
                    message: format!("expected a non-negative integer, found {s:?}"),
                })
            };
            match n {
                None => {
                    if fields.len() != 1 {
                        return Err(TreeError::Parse {
                            line,
                            message: "first line must contain only the vertex count".into(),
                        });
                    }
                    n = Some(num(fields[0])? as usize);
                }
                Some(_) => {
                    if fields.len() != 3 {
                        return Err(TreeError::Parse {
                            line,
                            message: format!("expected \"u v w\", found {content:?}"),
                        });
                    }
                    edges.push((
                        num(fields[0])? as usize,
                        num(fields[1])? as usize,
                        num(fields[2])?,
                    ));
                }
            }
        }
        let n = n.ok_or(TreeError::Parse {
            line: 0,
            message: "missing vertex count".into(),
        })?;
        if edges.len() + 1 != n && n > 0 {
            return Err(TreeError::Parse {
                line: 0,
                message: format!(
                    "expected {} edges for n = {n}, found {}",
                    n - 1,
                    edges.len()
                ),
            });
        }
        Self::build(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn center(&self) -> Option<usize> {
        match self.shape {
            Shape::YTree { center } => Some(center),
            Shape::Path => None,
        }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degree[v] as usize
    }

    pub fn total_weight(&self) -> Weight {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Unchecked distance; panics on labels outside `[1, n]`.
    #[inline]
    pub fn dist(&self, a: usize, b: usize) -> u64 {
        let (da, db) = (self.depth[a], self.depth[b]);
        if self.branch[a] == self.branch[b] {
            da.abs_diff(db)
        } else {
            da + db
        }
    }

    pub fn phi(&self, a: usize, b: usize) -> Result<Weight, TreeError> {
        self.check(a)?;
        self.check(b)?;
        Ok(Weight(self.dist(a, b)))
    }

    /// Whether `c` lies on the unique `a`-`b` path, endpoints included.
    pub fn on_path(&self, c: usize, a: usize, b: usize) -> Result<bool, TreeError> {
        self.check(a)?;
        self.check(b)?;
        self.check(c)?;
        Ok(self.on_path_unchecked(c, a, b))
    }

    #[inline]
    pub(crate) fn on_path_unchecked(&self, c: usize, a: usize, b: usize) -> bool {
        self.dist(a, c) + self.dist(c, b) == self.dist(a, b)
    }

    pub fn branch_of(&self, v: usize) -> Result<BranchId, TreeError> {
        self.check(v)?;
        match self.shape {
            Shape::Path => Err(TreeError::NotAYTree),
            Shape::YTree { center } if center == v => Err(TreeError::CenterHasNoBranch),
            Shape::YTree { .. } => Ok(BranchId(self.branch[v])),
        }
    }

    /// Branch index in `1..=3`, or 0 for the center and for path vertices.
    #[inline]
    pub(crate) fn branch_raw(&self, v: usize) -> u8 {
        self.branch[v]
    }

    /// Weighted distance from the center (Y-tree) or from the path's first
    /// endpoint.
    #[inline]
    pub fn depth(&self, v: usize) -> u64 {
        self.depth[v]
    }

    pub fn displacement(&self, p: &Permutation) -> Result<Weight, TreeError> {
        self.check_size(p)?;
        Ok(Weight(self.displacement_unchecked(p)))
    }

    pub(crate) fn displacement_unchecked(&self, p: &Permutation) -> u64 {
        (1..=self.n).map(|i| self.dist(i, p.apply(i))).sum()
    }

    /// `2 phi(a, b) - (D(p) - D(p (a b)))`.
    pub fn inefficiency(&self, p: &Permutation, tau: Transposition) -> Result<Weight, TreeError> {
        self.check_size(p)?;
        self.check(tau.b())?;
        Ok(Weight(self.inefficiency_unchecked(p, tau.a(), tau.b())))
    }

    pub(crate) fn inefficiency_unchecked(&self, p: &Permutation, a: usize, b: usize) -> u64 {
        let (pa, pb) = (p.apply(a), p.apply(b));
        let gain = 2 * self.dist(a, b) + self.dist(a, pb) + self.dist(b, pa);
        let loss = self.dist(a, pa) + self.dist(b, pb);
        gain.checked_sub(loss)
            .expect("inefficiency is non-negative on a tree")
    }

    /// `a` lies on the `b`-`p(b)` path and `b` lies on the `a`-`p(a)` path.
    pub fn is_efficient(&self, p: &Permutation, tau: Transposition) -> Result<bool, TreeError> {
        self.check_size(p)?;
        self.check(tau.b())?;
        let (a, b) = (tau.a(), tau.b());
        Ok(self.on_path_unchecked(a, b, p.apply(b)) && self.on_path_unchecked(b, a, p.apply(a)))
    }

    fn check(&self, v: usize) -> Result<(), TreeError> {
        if v == 0 || v > self.n {
            return Err(TreeError::OutOfRange {
                vertex: v,
                n: self.n,
            });
        }
        Ok(())
    }

    pub(crate) fn check_size(&self, p: &Permutation) -> Result<(), TreeError> {
        if p.n() != self.n {
            return Err(TreeError::SizeMismatch {
                tree: self.n,
                perm: p.n(),
            });
        }
        Ok(())
    }
}

/// Iterative DFS filling weighted depths and reporting each (child, parent).
fn walk_from(
    adj: &[Vec<(usize, u64)>],
    root: usize,
    depth: &mut [u64],
    mut visit: impl FnMut(usize, usize),
) {
    let mut parent = vec![usize::MAX; adj.len()];
    parent[root] = root;
    depth[root] = 0;
    let mut stack = vec![root];
    while let Some(u) = stack.pop() {
        for &(v, w) in &adj[u] {
            if parent[v] == usize::MAX {
                parent[v] = u;
                depth[v] = depth[u] + w;
                visit(v, u);
                stack.push(v);
            }
        }
    }
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(size: usize) -> Self {
        Dsu {
            parent: (0..size).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}
