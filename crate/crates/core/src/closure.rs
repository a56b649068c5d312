//! Shortest-path, strong and tight closure of coherent graphs.
//!
//! The tight closure of an integer graph is computed with one shortest-path
//! closure followed by a single tightening step and a single local
//! propagation step, so the whole pipeline stays `O(n³)`:
//!
//! 1. zero the diagonal and run Floyd-Warshall;
//! 2. a negative diagonal cell means no rational solution;
//! 3. round every unary weight `w(i, bar i)` down to an even number;
//! 4. `w(i, bar i) + w(bar i, i) < 0` for some `i` means no integer solution;
//! 5. `w(i, j) := min(w(i, j), w(i, bar i)/2 + w(bar j, j)/2)` once.
//!
//! Over the rationals step 3 and 4 are skipped and step 5 yields the strong
//! closure.

use std::fmt;

use crate::bound::Bound;
use crate::constraint::OctConstraint;
use crate::error::{Error, Result};
use crate::graph::OctGraph;
use crate::scalar::{IntegerScalar, RationalScalar, Scalar};

/// Why a system has no solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Inconsistency {
    /// A negative cycle: no rational solution either.
    Rational,
    /// Rationally satisfiable, but no integer solution.
    Integral,
}

impl fmt::Display for Inconsistency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Inconsistency::Rational => "Q",
            Inconsistency::Integral => "Z",
        })
    }
}

/// A closed graph, or bottom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosureOutcome<T> {
    Closed(OctGraph<T>),
    Bottom(Inconsistency),
}

impl<T: Scalar> ClosureOutcome<T> {
    pub fn is_bottom(&self) -> bool {
        matches!(self, ClosureOutcome::Bottom(_))
    }

    pub fn graph(&self) -> Option<&OctGraph<T>> {
        match self {
            ClosureOutcome::Closed(g) => Some(g),
            ClosureOutcome::Bottom(_) => None,
        }
    }

    pub fn into_graph(self) -> Option<OctGraph<T>> {
        match self {
            ClosureOutcome::Closed(g) => Some(g),
            ClosureOutcome::Bottom(_) => None,
        }
    }

    /// Lattice order with bottom below every graph.
    pub fn leq(&self, other: &Self) -> Result<bool> {
        match (self, other) {
            (ClosureOutcome::Bottom(_), _) => Ok(true),
            (ClosureOutcome::Closed(_), ClosureOutcome::Bottom(_)) => Ok(false),
            (ClosureOutcome::Closed(a), ClosureOutcome::Closed(b)) => a.leq(b),
        }
    }
}

/// All-pairs shortest paths, in place.
///
/// Diagonal cells are first lowered to 0 (a negative input diagonal is kept
/// so the consistency check still sees it). Each variable's two nodes are
/// relaxed together: rows `k` and `bar k` are snapshotted, and every other
/// row and column is reached through them by coherence, so only stored
/// cells are written.
pub fn floyd_warshall<T: Scalar>(graph: &mut OctGraph<T>) -> Result<()> {
    let nodes = graph.nodes();
    for i in 0..nodes {
        graph.at_mut(i, i).relax(Bound::zero());
    }

    for var in 0..graph.vars() {
        let (k, kb) = (2 * var, 2 * var + 1);
        let row_k = graph.row_snapshot(k);
        let row_kb = graph.row_snapshot(kb);
        let k_to_kb = row_k[kb].clone();
        let kb_to_k = row_kb[k].clone();

        // Row k once both k and bar k are intermediates, and row bar k
        // once k is.
        let mut row_k_full = row_k.clone();
        let mut row_kb_via_k = row_kb.clone();
        for j in 0..nodes {
            row_k_full[j].relax(k_to_kb.add(&row_kb[j])?);
            row_kb_via_k[j].relax(kb_to_k.add(&row_k[j])?);
        }

        for i in 0..nodes {
            // w(i, k) = w(bar k, bar i) and w(i, bar k) = w(k, bar i).
            let to_k = &row_kb[i ^ 1];
            let to_kb = &row_k_full[i ^ 1];
            let row = graph.stored_row_mut(i);
            if let Bound::Finite(_) = to_k {
                for (cell, via) in row.iter_mut().zip(&row_k) {
                    if via.is_finite() {
                        cell.relax(to_k.add(via)?);
                    }
                }
            }
            if let Bound::Finite(_) = to_kb {
                for (cell, via) in row.iter_mut().zip(&row_kb_via_k) {
                    if via.is_finite() {
                        cell.relax(to_kb.add(via)?);
                    }
                }
            }
        }
    }
    Ok(())
}

/// After [`floyd_warshall`]: `false` iff some diagonal cell is negative.
///
/// Coherence shares `w(i, i)` with `w(bar i, bar i)`, so even nodes suffice.
pub fn is_q_consistent<T: Scalar>(graph: &OctGraph<T>) -> bool {
    (0..graph.nodes())
        .step_by(2)
        .all(|i| !graph.at(i, i).is_negative())
}

/// Rounds every unary weight `w(i, bar i)` down to the nearest even integer.
pub fn tighten<T: IntegerScalar>(graph: &mut OctGraph<T>) {
    let two = T::two();
    for i in 0..graph.nodes() {
        if let Bound::Finite(w) = graph.at_mut(i, i ^ 1) {
            let rem = w.mod_floor(&two);
            *w = w.clone() - rem;
        }
    }
}

/// After [`tighten`]: `false` iff `w(i, bar i) + w(bar i, i) < 0` for some `i`.
pub fn is_z_consistent<T: IntegerScalar>(graph: &OctGraph<T>) -> Result<bool> {
    for i in (0..graph.nodes()).step_by(2) {
        if graph.at(i, i ^ 1).add(graph.at(i ^ 1, i))?.is_negative() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One pass of `w(i, j) := min(w(i, j), ⌊w(i, bar i)/2⌋ + ⌊w(bar j, j)/2⌋)`.
///
/// Halves are read from a snapshot, so the result does not depend on the
/// visiting order. On a tightened integer graph, or over the rationals, the
/// halving is exact.
pub fn strong_coherence_pass<T: Scalar>(graph: &mut OctGraph<T>) -> Result<()> {
    let halves = (0..graph.nodes())
        .map(|i| graph.at(i, i ^ 1).floor_half())
        .collect::<Result<Vec<_>>>()?;
    for i in 0..graph.nodes() {
        let from = &halves[i];
        if !from.is_finite() {
            continue;
        }
        let row = graph.stored_row_mut(i);
        for (j, cell) in row.iter_mut().enumerate() {
            // w(bar j, j) is the unary weight of node bar j.
            let to = &halves[j ^ 1];
            if to.is_finite() {
                cell.relax(from.add(to)?);
            }
        }
    }
    Ok(())
}

/// Tight closure of an integer graph, or the reason it has no integer
/// solution.
pub fn tight_closure<T: IntegerScalar>(mut graph: OctGraph<T>) -> Result<ClosureOutcome<T>> {
    floyd_warshall(&mut graph)?;
    if !is_q_consistent(&graph) {
        return Ok(ClosureOutcome::Bottom(Inconsistency::Rational));
    }
    finish_tight(graph)
}

fn finish_tight<T: IntegerScalar>(mut graph: OctGraph<T>) -> Result<ClosureOutcome<T>> {
    tighten(&mut graph);
    if !is_z_consistent(&graph)? {
        return Ok(ClosureOutcome::Bottom(Inconsistency::Integral));
    }
    strong_coherence_pass(&mut graph)?;
    Ok(ClosureOutcome::Closed(graph))
}

/// Shortest-path closure plus one floor-halving propagation pass, without
/// any consistency check.
///
/// Equals [`tight_closure`] on integer-consistent input; on other input the
/// result is meaningless.
pub fn tight_closure_unchecked<T: IntegerScalar>(mut graph: OctGraph<T>) -> Result<OctGraph<T>> {
    floyd_warshall(&mut graph)?;
    strong_coherence_pass(&mut graph)?;
    Ok(graph)
}

/// Strong closure of a rational graph.
pub fn strong_closure<T: RationalScalar>(mut graph: OctGraph<T>) -> Result<ClosureOutcome<T>> {
    floyd_warshall(&mut graph)?;
    if !is_q_consistent(&graph) {
        return Ok(ClosureOutcome::Bottom(Inconsistency::Rational));
    }
    strong_coherence_pass(&mut graph)?;
    Ok(ClosureOutcome::Closed(graph))
}

/// Adds one constraint to a tightly closed graph in `O(n²)`.
///
/// The new arc `(a, b)` and its mirror `(bar b, bar a)` are each used at
/// most once by a shortest simple path, so relaxing every pair through
/// them restores the shortest-path closure; tightening and the
/// propagation pass then give the tight closure of the enlarged system.
///
/// A negative cycle formed with the already tightened bounds is reported as
/// [`Inconsistency::Rational`], even when the original system plus `c` only
/// lacks integer solutions.
pub fn incremental_add<T: IntegerScalar>(
    mut graph: OctGraph<T>,
    c: &OctConstraint<T>,
) -> Result<ClosureOutcome<T>> {
    if c.max_var() >= graph.vars() {
        return Err(Error::VariableOutOfRange {
            var: c.max_var(),
            vars: graph.vars(),
        });
    }
    let (a, b, d) = c.arc()?;
    let (a, b, d) = (a.index(), b.index(), Bound::Finite(d));
    if d >= *graph.at(a, b) {
        return Ok(ClosureOutcome::Closed(graph));
    }

    let nodes = graph.nodes();
    // w(i, a) = row_ab[bar i], w(i, bar b) = row_b[bar i].
    let row_ab = graph.row_snapshot(a ^ 1);
    let row_b = graph.row_snapshot(b);
    let b_to_bb = &row_b[b ^ 1];
    let ab_to_a = &row_ab[a];

    // Cheapest way from i to b ending with the new arc, and from i to bar a
    // ending with its mirror, possibly using the other copy first.
    let mut reach_b = Vec::with_capacity(nodes);
    let mut reach_ab = Vec::with_capacity(nodes);
    for i in 0..nodes {
        let to_a = &row_ab[i ^ 1];
        let to_bb = &row_b[i ^ 1];
        let direct_b = to_a.add(&d)?;
        let direct_ab = to_bb.add(&d)?;
        let mut via_b = direct_b.clone();
        via_b.relax(direct_ab.add(ab_to_a)?.add(&d)?);
        let mut via_ab = direct_ab;
        via_ab.relax(direct_b.add(b_to_bb)?.add(&d)?);
        reach_b.push(via_b);
        reach_ab.push(via_ab);
    }

    for i in 0..nodes {
        let (p, q) = (&reach_b[i], &reach_ab[i]);
        let row = graph.stored_row_mut(i);
        for (j, cell) in row.iter_mut().enumerate() {
            cell.relax(p.add(&row_b[j])?);
            cell.relax(q.add(&row_ab[j])?);
        }
    }

    if !is_q_consistent(&graph) {
        return Ok(ClosureOutcome::Bottom(Inconsistency::Rational));
    }
    finish_tight(graph)
}

impl<T: IntegerScalar> ClosureOutcome<T> {
    /// [`incremental_add`] lifted to outcomes; bottom absorbs.
    pub fn add_constraint(self, c: &OctConstraint<T>) -> Result<Self> {
        match self {
            ClosureOutcome::Closed(g) => incremental_add(g, c),
            bottom => Ok(bottom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::{encode_all, Sign};
    use crate::graph::NodeId;
    use num_rational::Rational64;
    use Sign::{Minus, Plus};

    fn n(i: usize) -> NodeId {
        NodeId(i)
    }

    fn fin(v: i64) -> Bound<i64> {
        Bound::Finite(v)
    }

    fn bin(a: Sign, i: usize, b: Sign, j: usize, d: i64) -> OctConstraint<i64> {
        OctConstraint::binary(a, i, b, j, d).unwrap()
    }

    fn half_integral_system() -> Vec<OctConstraint<i64>> {
        vec![
            bin(Plus, 0, Plus, 1, 1),
            bin(Plus, 0, Minus, 1, 0),
            bin(Minus, 0, Plus, 1, 0),
            bin(Minus, 0, Minus, 1, -1),
        ]
    }

    #[test]
    fn one_relaxation() {
        let mut g = OctGraph::new(3);
        g.set(n(0), n(2), fin(1));
        g.set(n(2), n(4), fin(2));
        floyd_warshall(&mut g).unwrap();
        assert_eq!(*g.get(n(0), n(4)), fin(3));
        assert!(g.is_closed());
    }

    #[test]
    fn no_arcs_no_change() {
        let mut g = OctGraph::<i64>::new(3);
        floyd_warshall(&mut g).unwrap();
        assert_eq!(g, OctGraph::new(3));
    }

    #[test]
    fn diagonal_is_reset_but_negative_survives() {
        let mut g = OctGraph::<i64>::new(1);
        g.set(n(0), n(0), fin(7));
        floyd_warshall(&mut g).unwrap();
        assert_eq!(*g.get(n(0), n(0)), fin(0));
        g.set(n(1), n(1), fin(-1));
        assert_eq!(
            tight_closure(g).unwrap(),
            ClosureOutcome::Bottom(Inconsistency::Rational)
        );
    }

    #[test]
    fn q_consistency_detects_negative_cycles() {
        let mut g = encode_all(2, &[bin(Plus, 0, Minus, 1, -1), bin(Minus, 0, Plus, 1, 0)]).unwrap();
        floyd_warshall(&mut g).unwrap();
        assert!(!is_q_consistent(&g));

        let mut g = encode_all(2, &[bin(Plus, 0, Minus, 1, 1), bin(Minus, 0, Plus, 1, -1)]).unwrap();
        floyd_warshall(&mut g).unwrap();
        assert!(is_q_consistent(&g));
    }

    #[test]
    fn tightening_rounds_down_to_even() {
        for (before, after) in [(5, 4), (-3, -4), (6, 6), (0, 0), (-1, -2)] {
            let mut g = OctGraph::<i64>::new(2);
            g.set(n(0), n(1), fin(before));
            g.set(n(0), n(2), fin(before));
            tighten(&mut g);
            assert_eq!(*g.get(n(0), n(1)), fin(after));
            assert_eq!(*g.get(n(0), n(2)), fin(before), "binary arcs untouched");
        }
    }

    #[test]
    fn z_consistency_on_half_integral_system() {
        let mut g = encode_all(2, &half_integral_system()).unwrap();
        floyd_warshall(&mut g).unwrap();
        assert!(is_q_consistent(&g));
        tighten(&mut g);
        assert!(!is_z_consistent(&g).unwrap());

        let mut empty = OctGraph::<i64>::new(2);
        tighten(&mut empty);
        assert!(is_z_consistent(&empty).unwrap());
    }

    #[test]
    fn coherence_pass_instance() {
        let mut g = OctGraph::<i64>::new(2);
        g.set(n(0), n(1), fin(2));
        g.set(n(3), n(2), fin(2));
        strong_coherence_pass(&mut g).unwrap();
        assert_eq!(*g.get(n(0), n(2)), fin(2));
        // Unary cells are fixed points of the pass.
        assert_eq!(*g.get(n(0), n(1)), fin(2));
        assert_eq!(*g.get(n(3), n(2)), fin(2));
    }

    #[test]
    fn tight_closure_bounds_x0() {
        let g = encode_all(2, &[bin(Plus, 0, Plus, 1, 3), bin(Plus, 0, Minus, 1, 0)]).unwrap();
        let closed = tight_closure(g).unwrap().into_graph().unwrap();
        assert_eq!(*closed.get(n(0), n(1)), fin(2));
        assert!(closed.is_tightly_closed());
    }

    #[test]
    fn tight_closure_verdicts() {
        let g = encode_all(2, &[bin(Plus, 0, Minus, 1, -1), bin(Minus, 0, Plus, 1, 0)]).unwrap();
        assert_eq!(tight_closure(g).unwrap(), ClosureOutcome::Bottom(Inconsistency::Rational));
        let g = encode_all(2, &half_integral_system()).unwrap();
        assert_eq!(tight_closure(g).unwrap(), ClosureOutcome::Bottom(Inconsistency::Integral));
        let empty = tight_closure(OctGraph::<i64>::new(0)).unwrap();
        assert_eq!(empty, ClosureOutcome::Closed(OctGraph::new(0)));
    }

    #[test]
    fn strong_closure_halves_exactly() {
        let r = |p, q| Bound::Finite(Rational64::new(p, q));
        let mut g = OctGraph::<Rational64>::new(2);
        g.set(n(0), n(1), r(3, 1));
        g.set(n(3), n(2), r(2, 1));
        let closed = strong_closure(g).unwrap().into_graph().unwrap();
        assert_eq!(*closed.get(n(0), n(2)), r(5, 2));
        assert!(closed.is_strongly_closed());
        let again = strong_closure(closed.clone()).unwrap().into_graph().unwrap();
        assert_eq!(again, closed);
    }

    #[test]
    fn overflow_is_an_error() {
        let mut g = OctGraph::<i64>::new(3);
        g.set(n(0), n(2), fin(i64::MAX));
        g.set(n(2), n(4), fin(1));
        assert_eq!(tight_closure(g), Err(Error::Overflow));
    }

    #[test]
    fn incremental_no_op_on_entailed_constraint() {
        let g = encode_all(2, &[bin(Plus, 0, Plus, 1, 3), bin(Plus, 0, Minus, 1, 0)]).unwrap();
        let closed = tight_closure(g).unwrap().into_graph().unwrap();
        let again = incremental_add(closed.clone(), &OctConstraint::unary(Plus, 0, 5)).unwrap();
        assert_eq!(again, ClosureOutcome::Closed(closed));
    }

    #[test]
    fn incremental_contradiction() {
        let g = encode_all(2, &[bin(Plus, 0, Plus, 1, 1)]).unwrap();
        let closed = tight_closure(g).unwrap().into_graph().unwrap();
        let out = incremental_add(closed, &bin(Minus, 0, Minus, 1, -2)).unwrap();
        assert_eq!(out, ClosureOutcome::Bottom(Inconsistency::Rational));
    }

    #[test]
    fn incremental_matches_batch_on_a_chain() {
        let cs = [
            bin(Plus, 0, Minus, 1, 1),
            bin(Plus, 1, Plus, 2, 3),
            OctConstraint::unary(Minus, 2, 4),
            bin(Minus, 0, Minus, 1, 1),
        ];
        let mut acc = ClosureOutcome::Closed(OctGraph::new(3));
        for c in &cs {
            acc = acc.add_constraint(c).unwrap();
        }
        let batch = tight_closure(encode_all(3, &cs).unwrap()).unwrap();
        assert_eq!(acc, batch);
    }

    #[test]
    fn unchecked_pipeline_agrees_on_consistent_input() {
        let cs = [bin(Plus, 0, Plus, 1, 3), bin(Plus, 0, Minus, 1, 0), OctConstraint::unary(Minus, 1, 5)];
        let g = encode_all(2, &cs).unwrap();
        let checked = tight_closure(g.clone()).unwrap().into_graph().unwrap();
        assert_eq!(tight_closure_unchecked(g).unwrap(), checked);
    }
}
