//! Permutations of the ground set `[n] = {1, ..., n}`.
//!
//! A [`Permutation`] is stored in one-line form. Products follow the
//! convention `(p * q)(i) = p(q(i))`, so in a written product such as
//! `(2 1 6)(3 6)` the rightmost factor acts first. Right-multiplying by a
//! transposition `(a b)` swaps the entries in positions `a` and `b`.
//!
//! Every public interface speaks 1-indexed labels; the 0-indexed storage is
//! an implementation detail.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("not a bijection on [{n}]: {reason}")]
    NotABijection { n: usize, reason: String },
    #[error("malformed cycle notation: {0}")]
    MalformedCycle(String),
    #[error("element {value} out of range [1, {n}]")]
    ElementOutOfRange { value: usize, n: usize },
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("invalid integer {0:?}")]
    InvalidInteger(String),
    #[error("ground set must have n >= 1")]
    EmptyGroundSet,
    #[error("a transposition needs two distinct elements, got ({0} {0})")]
    DegenerateTransposition(usize),
}

/// A bijection on `[n]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    // images[i] = π(i + 1) - 1
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// Builds a permutation from its one-line form `(π(1), ..., π(n))`.
    pub fn from_one_line(values: &[usize]) -> Result<Self, PermError> {
        let n = values.len();
        if n == 0 {
            return Err(PermError::EmptyGroundSet);
        }
        let mut seen = vec![false; n];
        let mut images = Vec::with_capacity(n);
        for &v in values {
            if v == 0 || v > n {
                return Err(PermError::NotABijection {
                    n,
                    reason: format!("value {v} is outside [1, {n}]"),
                });
            }
            if std::mem::replace(&mut seen[v - 1], true) {
                return Err(PermError::NotABijection {
                    n,
                    reason: format!("value {v} appears more than once"),
                });
            }
            images.push(v - 1);
        }
        Ok(Permutation { images })
    }

    /// Parses `n` integers separated by whitespace and/or commas.
    pub fn parse_one_line(text: &str, n: usize) -> Result<Self, PermError> {
        let values = text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|tok| !tok.is_empty())
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| PermError::InvalidInteger(tok.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if values.len() != n {
            return Err(PermError::LengthMismatch {
                expected: n,
                found: values.len(),
            });
        }
        Self::from_one_line(&values)
    }

    /// Parses a product of parenthesized cycles such as `(1 6 3 2)(4 5)`.
    ///
    /// Cycles need not be disjoint; the written product is evaluated with
    /// the rightmost cycle acting first. Singleton and empty groups are
    /// accepted and act as the identity.
    pub fn parse_cycles(text: &str, n: usize) -> Result<Self, PermError> {
        if n == 0 {
            return Err(PermError::EmptyGroundSet);
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let Some(after_open) = rest.strip_prefix('(') else {
                return Err(PermError::MalformedCycle(format!(
                    "expected '(' at {rest:?}"
                )));
            };
            let Some(close) = after_open.find(')') else {
                return Err(PermError::MalformedCycle("missing ')'".to_string()));
            };
            let body = &after_open[..close];
            if body.contains('(') {
                return Err(PermError::MalformedCycle("nested '('".to_string()));
            }
            let mut group = Vec::new();
            for tok in body.split(|c: char| c.is_whitespace() || c == ',') {
                if tok.is_empty() {
                    continue;
                }
                let v: usize = tok
                    .parse()
                    .map_err(|_| PermError::InvalidInteger(tok.to_string()))?;
                if v == 0 || v > n {
                    return Err(PermError::ElementOutOfRange { value: v, n });
                }
                if group.contains(&v) {
                    return Err(PermError::MalformedCycle(format!(
                        "element {v} repeated inside one cycle"
                    )));
                }
                group.push(v);
            }
            groups.push(group);
            rest = after_open[close + 1..].trim_start();
        }
        let mut product = Permutation::identity(n);
        for group in groups.iter().rev() {
            if group.len() < 2 {
                continue;
            }
            product = cycle_images(n, group).compose_unchecked(&product);
        }
        Ok(product)
    }

    /// Accepts either notation: text starting with `(` is cycle notation
    /// unless it is a single comma-separated group such as
    /// `(6, 1, 2, 5, 4, 3)`, which is read as one-line form.
    pub fn parse(text: &str, n: usize) -> Result<Self, PermError> {
        let trimmed = text.trim();
        if let Some(inner) = trimmed.strip_prefix('(') {
            if trimmed.contains(',') && trimmed.ends_with(')') && trimmed.matches('(').count() == 1
            {
                return Self::parse_one_line(&inner[..inner.len() - 1], n);
            }
            return Self::parse_cycles(trimmed, n);
        }
        Self::parse_one_line(trimmed, n)
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    /// `π(i)` for `i` in `[n]`. Panics when `i` is out of range.
    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1] + 1
    }

    pub fn one_line(&self) -> Vec<usize> {
        self.images.iter().map(|&v| v + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// `self * other`, i.e. `i -> self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.n() != other.n() {
            return Err(PermError::SizeMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        Ok(self.compose_unchecked(other))
    }

    fn compose_unchecked(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: other.images.iter().map(|&j| self.images[j]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.n()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v] = i;
        }
        Permutation { images }
    }

    /// Right-multiplies in place by the transposition `(a b)`.
    #[inline]
    pub fn swap_positions(&mut self, a: usize, b: usize) {
        self.images.swap(a - 1, b - 1);
    }

    /// `self * tau`.
    pub fn times(&self, tau: Transposition) -> Result<Permutation, PermError> {
        self.check_element(tau.b())?;
        let mut out = self.clone();
        out.swap_positions(tau.a(), tau.b());
        Ok(out)
    }

    /// Product `tau_1 * tau_2 * ... * tau_k` on `[n]`.
    pub fn from_transpositions(n: usize, taus: &[Transposition]) -> Result<Self, PermError> {
        let mut p = Permutation::identity(n);
        // Applying right multiplications in order builds the left-to-right product.
        for tau in taus {
            p.check_element(tau.b())?;
            p.swap_positions(tau.a(), tau.b());
        }
        Ok(p)
    }

    pub fn from_cycles(n: usize, cycles: &[Cycle]) -> Result<Self, PermError> {
        let mut p = Permutation::identity(n);
        for c in cycles.iter().rev() {
            p = c.to_permutation(n)?.compose_unchecked(&p);
        }
        Ok(p)
    }

    fn check_element(&self, v: usize) -> Result<(), PermError> {
        if v == 0 || v > self.n() {
            return Err(PermError::ElementOutOfRange {
                value: v,
                n: self.n(),
            });
        }
        Ok(())
    }

    /// Disjoint cycles of length at least two, ordered by minimum element.
    pub fn cycles(&self) -> Vec<Cycle> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut elems = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                elems.push(i + 1);
                i = self.images[i];
            }
            // start is the smallest unvisited index, so the list is already canonical
            out.push(Cycle { elements: elems });
        }
        out
    }

    /// Number of cycles counting fixed points.
    pub fn cycle_count_with_fixed_points(&self) -> usize {
        let fixed = self
            .images
            .iter()
            .enumerate()
            .filter(|(i, v)| i == *v)
            .count();
        fixed + self.cycles().len()
    }

    /// Sorted list of non-fixed elements.
    pub fn support(&self) -> Vec<usize> {
        self.images
            .iter()
            .enumerate()
            .filter(|(i, v)| i != *v)
            .map(|(i, _)| i + 1)
            .collect()
    }

    pub fn support_size(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|(i, v)| i != *v)
            .count()
    }

    /// Cycle notation, e.g. `(1 6 3 2)(4 5)`; the identity prints as `()`.
    pub fn cycle_notation(&self) -> String {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return "()".to_string();
        }
        cycles.iter().map(|c| c.to_string()).collect()
    }
}

fn cycle_images(n: usize, elements: &[usize]) -> Permutation {
    let mut p = Permutation::identity(n);
    for (k, &v) in elements.iter().enumerate() {
        let next = elements[(k + 1) % elements.len()];
        p.images[v - 1] = next - 1;
    }
    p
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.images.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", v + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{self}]")
    }
}

/// A cycle `(v1 v2 ... vk)` with `k >= 2`, rotated so `v1` is its minimum.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cycle {
    elements: Vec<usize>,
}

impl Cycle {
    /// Accepts any rotation; the stored form starts at the minimum element.
    pub fn new(elements: Vec<usize>) -> Result<Self, PermError> {
        if elements.len() < 2 {
            return Err(PermError::MalformedCycle(format!(
                "a cycle needs at least two elements, got {}",
                elements.len()
            )));
        }
        if elements.contains(&0) {
            return Err(PermError::ElementOutOfRange {
                value: 0,
                n: elements.len(),
            });
        }
        let mut seen = HashSet::with_capacity(elements.len());
        for &v in &elements {
            if !seen.insert(v) {
                return Err(PermError::MalformedCycle(format!("element {v} repeated")));
            }
        }
        Ok(Self::from_rotation(elements))
    }

    /// Canonicalizes a list already known to be distinct with length >= 2.
    pub(crate) fn from_rotation(mut elements: Vec<usize>) -> Self {
        debug_assert!(elements.len() >= 2);
        let (pos, _) = elements
            .iter()
            .enumerate()
            .min_by_key(|(_, &v)| v)
            .expect("non-empty");
        elements.rotate_left(pos);
        Cycle { elements }
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min_element(&self) -> usize {
        self.elements[0]
    }

    pub fn max_element(&self) -> usize {
        self.elements.iter().copied().max().expect("non-empty")
    }

    pub fn to_permutation(&self, n: usize) -> Result<Permutation, PermError> {
        if let Some(&v) = self.elements.iter().find(|&&v| v > n) {
            return Err(PermError::ElementOutOfRange { value: v, n });
        }
        Ok(cycle_images(n, &self.elements))
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, v) in self.elements.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The transposition `(a b)`, stored with `a < b`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transposition {
    a: usize,
    b: usize,
}

impl Transposition {
    pub fn new(a: usize, b: usize) -> Result<Self, PermError> {
        if a == b {
            return Err(PermError::DegenerateTransposition(a));
        }
        if a == 0 || b == 0 {
            return Err(PermError::ElementOutOfRange {
                value: 0,
                n: a.max(b),
            });
        }
        Ok(Self::ordered(a, b))
    }

    #[inline]
    pub(crate) fn ordered(a: usize, b: usize) -> Self {
        debug_assert!(a != b);
        if a < b {
            Transposition { a, b }
        } else {
            Transposition { a: b, b: a }
        }
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn contains(&self, v: usize) -> bool {
        self.a == v || self.b == v
    }

    pub fn to_permutation(&self, n: usize) -> Result<Permutation, PermError> {
        Permutation::from_transpositions(n, &[*self])
    }
}

impl fmt::Display for Transposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {})", self.a, self.b)
    }
}

impl fmt::Debug for Transposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
