//! User-level octagonal constraints `±x_i (± x_j) <= d` and their
//! translation to and from graph arcs.

use std::cmp::Ordering;
use std::fmt;

use crate::bound::Bound;
use crate::closure::{self, ClosureOutcome};
use crate::error::{Error, Result};
use crate::graph::{NodeId, OctGraph};
use crate::scalar::{IntegerScalar, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn negate(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn coefficient(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    fn rank(self) -> u8 {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }
}

/// `±x_var`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub sign: Sign,
    pub var: usize,
}

impl Term {
    pub fn new(sign: Sign, var: usize) -> Self {
        Term { sign, var }
    }

    /// The graph node carrying this signed form.
    pub fn node(self) -> NodeId {
        match self.sign {
            Sign::Plus => NodeId::positive(self.var),
            Sign::Minus => NodeId::negative(self.var),
        }
    }

    pub fn from_node(node: NodeId) -> Self {
        let sign = if node.is_positive() { Sign::Plus } else { Sign::Minus };
        Term::new(sign, node.var())
    }

    fn negate(self) -> Self {
        Term::new(self.sign.negate(), self.var)
    }
}

/// An octagonal constraint `first (+ second) <= bound`.
///
/// Always canonical: a binary constraint mentions two distinct variables
/// with the smaller index first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OctConstraint<T> {
    first: Term,
    second: Option<Term>,
    bound: T,
}

impl<T: Scalar> OctConstraint<T> {
    /// `sign · x_var <= bound`.
    pub fn unary(sign: Sign, var: usize, bound: T) -> Self {
        OctConstraint {
            first: Term::new(sign, var),
            second: None,
            bound,
        }
    }

    /// `a · x_i + b · x_j <= bound`, reordered so the smaller variable
    /// comes first.
    pub fn binary(a: Sign, i: usize, b: Sign, j: usize, bound: T) -> Result<Self> {
        if i == j {
            return Err(Error::RepeatedVariable(i));
        }
        let (first, second) = if i < j {
            (Term::new(a, i), Term::new(b, j))
        } else {
            (Term::new(b, j), Term::new(a, i))
        };
        Ok(OctConstraint {
            first,
            second: Some(second),
            bound,
        })
    }

    pub fn first(&self) -> Term {
        self.first
    }

    pub fn second(&self) -> Option<Term> {
        self.second
    }

    pub fn bound(&self) -> &T {
        &self.bound
    }

    pub fn is_unary(&self) -> bool {
        self.second.is_none()
    }

    /// Largest variable index mentioned.
    pub fn max_var(&self) -> usize {
        self.second.map_or(self.first.var, |t| t.var.max(self.first.var))
    }

    /// The arc `(i, j)` and weight that encode this constraint.
    ///
    /// `a x + b y <= d` becomes `node(a x) - node(-b y) <= d`; a unary
    /// `a x <= d` becomes `node(a x) - node(-a x) <= 2d`.
    pub fn arc(&self) -> Result<(NodeId, NodeId, T)> {
        match self.second {
            Some(second) => Ok((self.first.node(), second.negate().node(), self.bound.clone())),
            None => {
                let doubled = self.bound.checked_add(&self.bound).ok_or(Error::Overflow)?;
                Ok((self.first.node(), self.first.negate().node(), doubled))
            }
        }
    }

    /// Reads an arc back as a constraint. Unary arcs with a weight that
    /// cannot be halved exactly are returned as [`Decoded::HalfIntegral`].
    pub fn from_arc(i: NodeId, j: NodeId, weight: T) -> Decoded<T> {
        let first = Term::from_node(i);
        let second = Term::from_node(j).negate();
        if i.var() == j.var() {
            debug_assert_eq!(i.bar(), j, "diagonal arcs carry no constraint");
            match weight.exact_half() {
                Some(half) => Decoded::Exact(OctConstraint::unary(first.sign, first.var, half)),
                None => Decoded::HalfIntegral {
                    term: first,
                    doubled: weight,
                },
            }
        } else {
            let c = OctConstraint::binary(first.sign, first.var, second.sign, second.var, weight)
                .expect("distinct variables");
            Decoded::Exact(c)
        }
    }

    /// Converts the bound to another scalar type.
    pub fn map_bound<U: Scalar>(&self, f: impl FnOnce(&T) -> Option<U>) -> Option<OctConstraint<U>> {
        Some(OctConstraint {
            first: self.first,
            second: self.second,
            bound: f(&self.bound)?,
        })
    }

    /// Ordering key: unary first, then variables, then signs.
    fn sort_key(&self) -> (u8, usize, usize, u8, u8) {
        match self.second {
            None => (0, self.first.var, 0, self.first.sign.rank(), 0),
            Some(s) => (1, self.first.var, s.var, self.first.sign.rank(), s.sign.rank()),
        }
    }
}

impl<T: Scalar> PartialOrd for OctConstraint<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for OctConstraint<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key()
            .cmp(&other.sort_key())
            .then_with(|| self.bound.cmp(&other.bound))
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, term: Term, leading: bool) -> fmt::Result {
    match (term.sign, leading) {
        (Sign::Plus, true) => write!(f, "x{}", term.var),
        (Sign::Minus, true) => write!(f, "-x{}", term.var),
        (Sign::Plus, false) => write!(f, " + x{}", term.var),
        (Sign::Minus, false) => write!(f, " - x{}", term.var),
    }
}

impl<T: fmt::Display> fmt::Display for OctConstraint<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self.first, true)?;
        if let Some(second) = self.second {
            write_term(f, second, false)?;
        }
        write!(f, " <= {}", self.bound)
    }
}

/// A constraint read back from a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decoded<T> {
    Exact(OctConstraint<T>),
    /// `2 · term <= doubled` where `doubled` is odd: the bound on `term`
    /// itself would be half-integral.
    HalfIntegral { term: Term, doubled: T },
}

impl<T: fmt::Display> fmt::Display for Decoded<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decoded::Exact(c) => c.fmt(f),
            Decoded::HalfIntegral { term, doubled } => {
                write_term(f, *term, true)?;
                write!(f, " <= {}/2", doubled)
            }
        }
    }
}

/// Adds `c` to `graph`, keeping the tighter of the old and new weights.
pub fn encode<T: Scalar>(c: &OctConstraint<T>, graph: &mut OctGraph<T>) -> Result<()> {
    if c.max_var() >= graph.vars() {
        return Err(Error::VariableOutOfRange {
            var: c.max_var(),
            vars: graph.vars(),
        });
    }
    let (i, j, w) = c.arc()?;
    graph.meet_arc(i, j, Bound::Finite(w));
    Ok(())
}

/// Builds the graph of a constraint system over `vars` variables.
pub fn encode_all<'a, T: Scalar>(
    vars: usize,
    constraints: impl IntoIterator<Item = &'a OctConstraint<T>>,
) -> Result<OctGraph<T>> {
    let mut graph = OctGraph::new(vars);
    for c in constraints {
        encode(c, &mut graph)?;
    }
    Ok(graph)
}

/// One constraint per finite off-diagonal stored cell, in canonical order.
pub fn decode<T: Scalar>(graph: &OctGraph<T>) -> Vec<Decoded<T>> {
    let mut out: Vec<Decoded<T>> = graph
        .canonical_arcs()
        .filter(|(i, j)| i != j)
        .filter_map(|(i, j)| match graph.get(i, j) {
            Bound::Finite(w) => Some(OctConstraint::from_arc(i, j, w.clone())),
            Bound::Infinite => None,
        })
        .collect();
    out.sort_by(|a, b| match (a, b) {
        (Decoded::Exact(x), Decoded::Exact(y)) => x.cmp(y),
        (Decoded::Exact(_), _) => Ordering::Less,
        (_, Decoded::Exact(_)) => Ordering::Greater,
        (Decoded::HalfIntegral { term: s, .. }, Decoded::HalfIntegral { term: t, .. }) => {
            (s.var, s.sign.rank()).cmp(&(t.var, t.sign.rank()))
        }
    });
    out
}

/// Whether a closed system implies `c`. `Bottom` implies everything.
///
/// Only meaningful when `outcome` is a tight (integer) or strong
/// (rational) closure: the answer is a single bound comparison.
pub fn entails<T: Scalar>(outcome: &ClosureOutcome<T>, c: &OctConstraint<T>) -> Result<bool> {
    let graph = match outcome {
        ClosureOutcome::Bottom(_) => return Ok(true),
        ClosureOutcome::Closed(g) => g,
    };
    if c.max_var() >= graph.vars() {
        return Err(Error::VariableOutOfRange {
            var: c.max_var(),
            vars: graph.vars(),
        });
    }
    let (i, j, w) = c.arc()?;
    Ok(*graph.get(i, j) <= Bound::Finite(w))
}

/// An integer assignment to the variables `x0 .. x{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Valuation<T>(pub Vec<T>);

impl<T: Scalar> Valuation<T> {
    pub fn get(&self, var: usize) -> &T {
        &self.0[var]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Direct substitution; variables outside the valuation fail.
    pub fn satisfies(&self, c: &OctConstraint<T>) -> bool {
        let value = |t: Term| -> Option<T> {
            let v = self.0.get(t.var)?.clone();
            Some(match t.sign {
                Sign::Plus => v,
                Sign::Minus => -v,
            })
        };
        let Some(mut lhs) = value(c.first) else {
            return false;
        };
        if let Some(second) = c.second {
            let Some(rhs) = value(second).and_then(|v| lhs.checked_add(&v)) else {
                return false;
            };
            lhs = rhs;
        }
        lhs <= c.bound
    }

    pub fn satisfies_all<'a>(&self, cs: impl IntoIterator<Item = &'a OctConstraint<T>>) -> bool {
        cs.into_iter().all(|c| self.satisfies(c))
    }
}

/// Picks an integer model of a tightly closed graph.
///
/// Variables are fixed in ascending order: each one takes its upper bound
/// if finite, else its lower bound, else 0, and the choice is propagated
/// with an incremental closure before moving on.
pub fn extract_model<T: IntegerScalar>(graph: &OctGraph<T>) -> Result<Valuation<T>> {
    let mut current = graph.clone();
    let mut values = Vec::with_capacity(graph.vars());
    for k in 0..graph.vars() {
        let upper = current.get(NodeId::positive(k), NodeId::negative(k));
        let lower = current.get(NodeId::negative(k), NodeId::positive(k));
        let value = match (upper, lower) {
            (Bound::Finite(u), _) => u.exact_half(),
            (_, Bound::Finite(l)) => l.exact_half().map(|h| -h),
            _ => Some(T::zero()),
        }
        .ok_or(Error::Internal("unary bound of a tight closure is odd"))?;

        for c in [
            OctConstraint::unary(Sign::Plus, k, value.clone()),
            OctConstraint::unary(Sign::Minus, k, -value.clone()),
        ] {
            current = match closure::incremental_add(current, &c)? {
                ClosureOutcome::Closed(g) => g,
                ClosureOutcome::Bottom(_) => {
                    return Err(Error::Internal("fixing a variable inside its bounds was inconsistent"))
                }
            };
        }
        values.push(value);
    }
    Ok(Valuation(values))
}
