//! Integer octagonal (UTVPI) constraints `±x ± y <= d`.
//!
//! Systems are encoded as coherent weighted graphs over the positive and
//! negative forms of each variable ([`graph`]). The [`closure`] module
//! computes the tight closure of an integer system in `O(n³)`, deciding
//! integer satisfiability on the way, and the strong closure of a rational
//! one. [`constraint`] translates between constraints and arcs, answers
//! entailment queries and extracts integer models.
//!
//! All algorithms are generic over an exact [`Scalar`]; the aliases below
//! cover the usual choices.
//!
//! ```
//! use utvpi::{parse_system, tight_closure, encode_all, ClosureOutcome};
//!
//! let sys = parse_system::<i64>("x0 + x1 <= 3\nx0 - x1 <= 0\n").unwrap();
//! let closed = tight_closure(encode_all(sys.vars, &sys.constraints).unwrap()).unwrap();
//! let upper = utvpi::parse_constraint("x0 <= 1").unwrap();
//! assert!(utvpi::entails(&closed, &upper).unwrap());
//! assert!(matches!(closed, ClosureOutcome::Closed(_)));
//! ```

pub mod bound;
pub mod closure;
pub mod constraint;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod parse;
pub mod scalar;

pub use bound::Bound;
pub use closure::{
    floyd_warshall, incremental_add, is_q_consistent, is_z_consistent, strong_closure,
    strong_coherence_pass, tight_closure, tight_closure_unchecked, tighten, ClosureOutcome,
    Inconsistency,
};
pub use constraint::{
    decode, encode, encode_all, entails, extract_model, Decoded, OctConstraint, Sign, Term,
    Valuation,
};
pub use error::{Error, Result};
pub use graph::{NodeId, OctGraph};
pub use parse::{parse_constraint, parse_system, ParseError, System};
pub use scalar::{IntegerScalar, RationalScalar, Scalar};

pub use num_rational::Rational64;

/// Integer weights: the tight-closure setting.
pub type IntGraph = OctGraph<i64>;
/// Exact rational weights: the strong-closure setting.
pub type RatGraph = OctGraph<Rational64>;
pub type IntConstraint = OctConstraint<i64>;
pub type RatConstraint = OctConstraint<Rational64>;
pub type IntOutcome = ClosureOutcome<i64>;
pub type RatOutcome = ClosureOutcome<Rational64>;
