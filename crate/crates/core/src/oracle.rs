//! Slow reference procedures for differential testing.
//!
//! Nothing here shares code with [`crate::closure`]: saturation works on a
//! plain full `2n × 2n` matrix, and satisfiability is decided by
//! enumerating integer points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bound::Bound;
use crate::closure::{ClosureOutcome, Inconsistency};
use crate::constraint::{OctConstraint, Sign, Valuation};
use crate::graph::{NodeId, OctGraph};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("saturation did not converge within {0} rule applications")]
    IterationCap(usize),
    #[error("instance too large for the oracle: {0}")]
    TooLarge(String),
    #[error("arithmetic overflow in the oracle")]
    Overflow,
    #[error("saturation fixpoint is not coherent")]
    Incoherent,
}

/// Inference rules the saturation may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rules {
    /// `i - k <= d1`, `k - j <= d2` ⊢ `i - j <= d1 + d2`.
    pub transitivity: bool,
    /// `i - bar i <= d1`, `bar j - j <= d2` ⊢ `i - j <= (d1 + d2) / 2`,
    /// with the half rounded down over the integers.
    pub strong_coherence: bool,
    /// `i - bar i <= d` ⊢ `i - bar i <= 2⌊d/2⌋`.
    pub tightening: bool,
}

impl Rules {
    pub const TRANSITIVITY: Rules = Rules {
        transitivity: true,
        strong_coherence: false,
        tightening: false,
    };
    pub const STRONG: Rules = Rules {
        transitivity: true,
        strong_coherence: true,
        tightening: false,
    };
    pub const ALL: Rules = Rules {
        transitivity: true,
        strong_coherence: true,
        tightening: true,
    };
}

type Matrix<T> = Vec<Vec<Bound<T>>>;

enum Saturated<T> {
    Fixpoint(Matrix<T>),
    Negative,
}

fn add<T: Scalar>(a: &Bound<T>, b: &Bound<T>) -> Result<Bound<T>, OracleError> {
    a.add(b).map_err(|_| OracleError::Overflow)
}

fn lower<T: Scalar>(cell: &mut Bound<T>, candidate: Bound<T>, applied: &mut usize) -> bool {
    if candidate < *cell {
        *cell = candidate;
        *applied += 1;
        true
    } else {
        false
    }
}

/// Round-robin application of `rules` until nothing changes.
fn run<T: Scalar>(mut m: Matrix<T>, rules: Rules) -> Result<Saturated<T>, OracleError> {
    let nodes = m.len();
    let cap = (10 * nodes * nodes * nodes).max(1);
    let mut applied = 0usize;
    for (i, row) in m.iter_mut().enumerate() {
        lower(&mut row[i], Bound::zero(), &mut applied);
    }
    loop {
        let mut changed = false;
        if rules.transitivity {
            for k in 0..nodes {
                for i in 0..nodes {
                    for j in 0..nodes {
                        let cand = add(&m[i][k], &m[k][j])?;
                        changed |= lower(&mut m[i][j], cand, &mut applied);
                    }
                }
            }
        }
        if rules.strong_coherence {
            for i in 0..nodes {
                for j in 0..nodes {
                    let sum = add(&m[i][i ^ 1], &m[j ^ 1][j])?;
                    let cand = sum.floor_half().map_err(|_| OracleError::Overflow)?;
                    changed |= lower(&mut m[i][j], cand, &mut applied);
                }
            }
        }
        if rules.tightening {
            for i in 0..nodes {
                let half = m[i][i ^ 1].floor_half().map_err(|_| OracleError::Overflow)?;
                let cand = add(&half, &half)?;
                changed |= lower(&mut m[i][i ^ 1], cand, &mut applied);
            }
        }
        if (0..nodes).any(|i| m[i][i].is_negative()) {
            return Ok(Saturated::Negative);
        }
        if !changed {
            break;
        }
        if applied > cap {
            return Err(OracleError::IterationCap(cap));
        }
    }
    if rules.tightening {
        for i in 0..nodes {
            if add(&m[i][i ^ 1], &m[i ^ 1][i])?.is_negative() {
                return Ok(Saturated::Negative);
            }
        }
    }
    Ok(Saturated::Fixpoint(m))
}

/// Saturates `graph` under `rules` (plus a zero diagonal).
///
/// Bottom is tagged [`Inconsistency::Rational`] when transitivity alone
/// already produces a negative cycle, and [`Inconsistency::Integral`]
/// otherwise.
pub fn saturate<T: Scalar>(graph: &OctGraph<T>, rules: Rules) -> Result<ClosureOutcome<T>, OracleError> {
    let nodes = graph.nodes();
    let matrix: Matrix<T> = (0..nodes)
        .map(|i| (0..nodes).map(|j| graph.get(NodeId(i), NodeId(j)).clone()).collect())
        .collect();

    if let Saturated::Negative = run(matrix.clone(), Rules::TRANSITIVITY)? {
        return Ok(ClosureOutcome::Bottom(Inconsistency::Rational));
    }
    let m = match run(matrix, rules)? {
        Saturated::Negative => return Ok(ClosureOutcome::Bottom(Inconsistency::Integral)),
        Saturated::Fixpoint(m) => m,
    };

    let mut out = OctGraph::new(graph.vars());
    for i in 0..nodes {
        for j in 0..nodes {
            if m[i][j] != m[j ^ 1][i ^ 1] {
                return Err(OracleError::Incoherent);
            }
            out.set(NodeId(i), NodeId(j), m[i][j].clone());
        }
    }
    Ok(ClosureOutcome::Closed(out))
}

fn term_value(sign: Sign, v: i64) -> i64 {
    match sign {
        Sign::Plus => v,
        Sign::Minus => -v,
    }
}

/// Searches `|x_i| <= (2n + 1)·D` for an integer model, where `D` is the
/// largest absolute bound.
///
/// Variables are assigned in index order; each candidate range is cut
/// down by the constraints whose other variable is already fixed, which
/// prunes without skipping any point of the box.
pub fn brute_force_z_sat(
    vars: usize,
    constraints: &[OctConstraint<i64>],
) -> Result<Option<Valuation<i64>>, OracleError> {
    if vars > 4 {
        return Err(OracleError::TooLarge(format!("{vars} variables (limit 4)")));
    }
    if let Some(c) = constraints.iter().find(|c| c.max_var() >= vars) {
        return Err(OracleError::TooLarge(format!("constraint {c} exceeds {vars} variables")));
    }
    let max_abs = constraints.iter().map(|c| c.bound().unsigned_abs()).max().unwrap_or(0);
    if max_abs > 1_000 {
        return Err(OracleError::TooLarge(format!("bound magnitude {max_abs} (limit 1000)")));
    }
    let radius = (2 * vars as i64 + 1) * max_abs as i64;

    // Constraints grouped by the last variable they mention.
    let mut by_last: Vec<Vec<&OctConstraint<i64>>> = vec![Vec::new(); vars];
    for c in constraints {
        by_last[c.max_var()].push(c);
    }

    let mut values = vec![0i64; vars];
    Ok(search(0, radius, &by_last, &mut values).then_some(Valuation(values)))
}

fn search(var: usize, radius: i64, by_last: &[Vec<&OctConstraint<i64>>], values: &mut [i64]) -> bool {
    if var == values.len() {
        return true;
    }
    let (mut lo, mut hi) = (-radius, radius);
    for c in &by_last[var] {
        // Every term other than `var` is already assigned.
        let (own, other) = match c.second() {
            Some(s) if s.var == var => (s, Some(c.first())),
            Some(s) => (c.first(), Some(s)),
            None => (c.first(), None),
        };
        let rest = c.bound() - other.map_or(0, |t| term_value(t.sign, values[t.var]));
        match own.sign {
            Sign::Plus => hi = hi.min(rest),
            Sign::Minus => lo = lo.max(-rest),
        }
    }
    for v in lo..=hi {
        values[var] = v;
        if search(var + 1, radius, by_last, values) {
            return true;
        }
    }
    false
}

/// Parameters of a random constraint system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceSpec {
    pub vars: usize,
    /// Probability of including each legal sign pattern, in `(0, 1]`.
    pub density: f64,
    /// Bounds are drawn uniformly from `[-bound_range, bound_range]`.
    pub bound_range: i64,
    pub seed: u64,
}

/// Every canonical sign pattern: `±x_i` for each variable, then
/// `±x_i ± x_j` for each `i < j`.
fn patterns(vars: usize) -> impl Iterator<Item = (Sign, usize, Option<(Sign, usize)>)> {
    const SIGNS: [Sign; 2] = [Sign::Plus, Sign::Minus];
    let unary = (0..vars).flat_map(|i| SIGNS.into_iter().map(move |a| (a, i, None)));
    let binary = (0..vars).flat_map(move |i| {
        (i + 1..vars).flat_map(move |j| {
            SIGNS
                .into_iter()
                .flat_map(move |a| SIGNS.into_iter().map(move |b| (a, i, Some((b, j)))))
        })
    });
    unary.chain(binary)
}

fn make(a: Sign, i: usize, rest: Option<(Sign, usize)>, d: i64) -> OctConstraint<i64> {
    match rest {
        None => OctConstraint::unary(a, i, d),
        Some((b, j)) => OctConstraint::binary(a, i, b, j, d).expect("i < j"),
    }
}

/// Seeded random system: each pattern is kept with probability `density`
/// and gets a uniform bound.
pub fn generate(spec: &InstanceSpec) -> Vec<OctConstraint<i64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let r = spec.bound_range.abs();
    patterns(spec.vars)
        .filter_map(|(a, i, rest)| {
            let keep = rng.gen_bool(spec.density.clamp(0.0, 1.0));
            let d = rng.gen_range(-r..=r);
            keep.then(|| make(a, i, rest, d))
        })
        .collect()
}

/// Like [`generate`], but satisfiable by construction: a hidden point in
/// `[-bound_range, bound_range]ⁿ` is drawn first and every bound is its
/// value at that point plus a slack in `[0, bound_range]`.
pub fn generate_satisfiable(spec: &InstanceSpec) -> (Vec<OctConstraint<i64>>, Valuation<i64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let r = spec.bound_range.abs();
    let point: Vec<i64> = (0..spec.vars).map(|_| rng.gen_range(-r..=r)).collect();
    let constraints = patterns(spec.vars)
        .filter_map(|(a, i, rest)| {
            let keep = rng.gen_bool(spec.density.clamp(0.0, 1.0));
            let slack = rng.gen_range(0..=r);
            let at_point = term_value(a, point[i]) + rest.map_or(0, |(b, j)| term_value(b, point[j]));
            keep.then(|| make(a, i, rest, at_point + slack))
        })
        .collect();
    (constraints, Valuation(point))
}

/// Rationally satisfiable by construction, frequently without integer
/// solutions: the hidden point has half-integral coordinates in
/// `[-bound_range, bound_range]` and each bound is the rounded-up value at
/// that point plus a slack in `{0, 1}`, biased towards 0. Bounds stay in
/// `[-2·bound_range, 2·bound_range]`.
pub fn generate_half_integral(spec: &InstanceSpec) -> Vec<OctConstraint<i64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let r = spec.bound_range.abs();
    let doubled: Vec<i64> = (0..spec.vars).map(|_| rng.gen_range(-2 * r..=2 * r)).collect();
    patterns(spec.vars)
        .filter_map(|(a, i, rest)| {
            let keep = rng.gen_bool(spec.density.clamp(0.0, 1.0));
            let slack = i64::from(rng.gen_bool(0.25));
            let at_point = term_value(a, doubled[i]) + rest.map_or(0, |(b, j)| term_value(b, doubled[j]));
            let d = (num_integer::Integer::div_ceil(&at_point, &2) + slack).min(2 * r);
            keep.then(|| make(a, i, rest, d))
        })
        .collect()
}
