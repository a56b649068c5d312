//! Coherent weighted graphs over the positive and negative forms of the
//! variables.
//!
//! Node `2k` stands for `+x_k` and node `2k + 1` for `-x_k`. A weight
//! `w(i, j) = d` encodes the potential constraint `node_i - node_j <= d`.
//! Arcs `(i, j)` and `(bar j, bar i)` encode the same constraint, so they
//! share one storage cell and coherence cannot be violated.

use std::fmt;

use crate::bound::Bound;
use crate::error::{Error, Result};
use crate::scalar::{IntegerScalar, Scalar};

/// A node of the graph: one signed form of a variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl NodeId {
    /// The node standing for `+x_var`.
    pub fn positive(var: usize) -> Self {
        NodeId(2 * var)
    }

    /// The node standing for `-x_var`.
    pub fn negative(var: usize) -> Self {
        NodeId(2 * var + 1)
    }

    /// The opposite form of the same variable.
    #[inline]
    pub fn bar(self) -> Self {
        NodeId(self.0 ^ 1)
    }

    pub fn var(self) -> usize {
        self.0 / 2
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.is_positive() { '+' } else { '-' };
        write!(f, "{}x{}", sign, self.var())
    }
}

/// Position of the stored cell for the arc `(i, j)`.
///
/// Row `i` keeps the columns `0..=(i | 1)`; any other arc is read through
/// its coherent mirror `(bar j, bar i)`, which always lands in that range.
/// The diagonal pair `(i, i)`/`(bar i, bar i)` lives in the even row, so
/// the slot `(i, i)` of an odd row is never used.
#[inline]
fn cell_index(i: usize, j: usize) -> usize {
    if i == j {
        let e = i & !1;
        e + ((e + 1) * (e + 1)) / 2
    } else if j <= (i | 1) {
        j + ((i + 1) * (i + 1)) / 2
    } else {
        (i ^ 1) + (((j ^ 1) + 1) * ((j ^ 1) + 1)) / 2
    }
}

#[inline]
fn row_offset(i: usize) -> usize {
    ((i + 1) * (i + 1)) / 2
}

#[inline]
fn stored_len(i: usize) -> usize {
    if i & 1 == 0 {
        i + 2
    } else {
        i
    }
}

/// A coherent integer or rational weighted graph on `2n` nodes.
///
/// Equality compares every weight. The empty constraint system is
/// [`OctGraph::new`]: zero diagonal and `+∞` everywhere else.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OctGraph<T> {
    vars: usize,
    cells: Vec<Bound<T>>,
}

impl<T: Scalar> OctGraph<T> {
    /// The unconstrained graph over `vars` variables.
    pub fn new(vars: usize) -> Self {
        let mut cells = vec![Bound::Infinite; 2 * vars * (vars + 1)];
        for i in 0..2 * vars {
            cells[cell_index(i, i)] = Bound::zero();
        }
        OctGraph { vars, cells }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn nodes(&self) -> usize {
        2 * self.vars
    }

    #[inline]
    fn check(&self, i: NodeId, j: NodeId) {
        assert!(
            i.0 < self.nodes() && j.0 < self.nodes(),
            "arc ({}, {}) outside a graph with {} nodes",
            i.0,
            j.0,
            self.nodes()
        );
    }

    #[inline]
    pub fn get(&self, i: NodeId, j: NodeId) -> &Bound<T> {
        self.check(i, j);
        &self.cells[cell_index(i.0, j.0)]
    }

    /// Sets `w(i, j)`, and therefore `w(bar j, bar i)`, to `weight`.
    pub fn set(&mut self, i: NodeId, j: NodeId, weight: Bound<T>) {
        self.check(i, j);
        self.cells[cell_index(i.0, j.0)] = weight;
    }

    /// Lowers `w(i, j)` to `weight` if that is tighter; reports a change.
    pub fn meet_arc(&mut self, i: NodeId, j: NodeId, weight: Bound<T>) -> bool {
        self.check(i, j);
        self.cells[cell_index(i.0, j.0)].relax(weight)
    }

    #[inline]
    pub(crate) fn at(&self, i: usize, j: usize) -> &Bound<T> {
        &self.cells[cell_index(i, j)]
    }

    #[inline]
    pub(crate) fn at_mut(&mut self, i: usize, j: usize) -> &mut Bound<T> {
        &mut self.cells[cell_index(i, j)]
    }

    /// The stored cells of row `i`: columns `0..=(i | 1)`, minus the unused
    /// diagonal slot of odd rows.
    #[inline]
    pub(crate) fn stored_row_mut(&mut self, i: usize) -> &mut [Bound<T>] {
        let start = row_offset(i);
        &mut self.cells[start..start + stored_len(i)]
    }

    /// A copy of the full row `w(i, ·)` over all `2n` columns.
    pub(crate) fn row_snapshot(&self, i: usize) -> Vec<Bound<T>> {
        (0..self.nodes()).map(|j| self.at(i, j).clone()).collect()
    }

    /// Every stored `(i, j)` pair, one per coherent class.
    pub fn canonical_arcs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.nodes()).flat_map(|i| (0..stored_len(i)).map(move |j| (NodeId(i), NodeId(j))))
    }

    /// Zero diagonal and the triangle inequality on every node triple.
    pub fn is_closed(&self) -> bool {
        let n = self.nodes();
        (0..n).all(|i| *self.at(i, i) == Bound::zero())
            && (0..n).all(|k| {
                (0..n).all(|i| (0..n).all(|j| le_sum(self.at(i, j), None, self.at(i, k), self.at(k, j))))
            })
    }

    /// Closed and `2 w(i, j) <= w(i, bar i) + w(bar j, j)` for all `i, j`.
    pub fn is_strongly_closed(&self) -> bool {
        let n = self.nodes();
        self.is_closed()
            && (0..n).all(|i| {
                (0..n).all(|j| {
                    let w = self.at(i, j);
                    le_sum(w, Some(w), self.at(i, i ^ 1), self.at(j ^ 1, j))
                })
            })
    }

    /// Pointwise `self <= other` on every arc.
    pub fn leq(&self, other: &Self) -> Result<bool> {
        if self.vars != other.vars {
            return Err(Error::DimensionMismatch {
                left: self.vars,
                right: other.vars,
            });
        }
        Ok(self.cells.iter().zip(&other.cells).all(|(a, b)| a <= b))
    }
}

impl<T: IntegerScalar> OctGraph<T> {
    /// Strongly closed with every finite unary weight `w(i, bar i)` even.
    pub fn is_tightly_closed(&self) -> bool {
        (0..self.nodes()).all(|i| match self.at(i, i ^ 1) {
            Bound::Finite(v) => v.is_even(),
            Bound::Infinite => true,
        }) && self.is_strongly_closed()
    }
}

/// Finite value or the side on which a checked sum overflowed.
#[derive(PartialEq, Eq, PartialOrd, Ord)]
enum Extended<T> {
    Below,
    Value(T),
    Above,
}

fn extended_sum<T: Scalar>(a: &T, b: &T) -> Extended<T> {
    match a.checked_add(b) {
        Some(v) => Extended::Value(v),
        None if *a < T::zero() => Extended::Below,
        None => Extended::Above,
    }
}

/// `l1 (+ l2) <= r1 + r2` in extended arithmetic, immune to overflow.
fn le_sum<T: Scalar>(l1: &Bound<T>, l2: Option<&Bound<T>>, r1: &Bound<T>, r2: &Bound<T>) -> bool {
    let (Bound::Finite(r1), Bound::Finite(r2)) = (r1, r2) else {
        return true;
    };
    let rhs = extended_sum(r1, r2);
    let lhs = match (l1, l2) {
        (Bound::Finite(a), None) => Extended::Value(a.clone()),
        (Bound::Finite(a), Some(Bound::Finite(b))) => extended_sum(a, b),
        _ => return false,
    };
    lhs <= rhs
}
