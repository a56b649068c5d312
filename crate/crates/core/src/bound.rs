use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// An arc weight: a finite exact value or `+∞` (no constraint).
///
/// The derived ordering places every finite value below `Infinite`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound<T> {
    Finite(T),
    Infinite,
}

impl<T: Scalar> Bound<T> {
    pub fn zero() -> Self {
        Bound::Finite(T::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Bound::Finite(_))
    }

    pub fn finite(&self) -> Option<&T> {
        match self {
            Bound::Finite(v) => Some(v),
            Bound::Infinite => None,
        }
    }

    /// Extended addition: `+∞` absorbs, finite sums are overflow-checked.
    #[inline]
    pub fn add(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (Bound::Finite(a), Bound::Finite(b)) => {
                a.checked_add(b).map(Bound::Finite).ok_or(Error::Overflow)
            }
            _ => Ok(Bound::Infinite),
        }
    }

    /// `⌊self / 2⌋` in the scalar's domain; `+∞` stays `+∞`.
    pub fn floor_half(&self) -> Result<Self> {
        match self {
            Bound::Finite(v) => v.floor_half().map(Bound::Finite).ok_or(Error::Overflow),
            Bound::Infinite => Ok(Bound::Infinite),
        }
    }

    /// Replaces `self` by `candidate` when strictly smaller.
    #[inline]
    pub fn relax(&mut self, candidate: Self) -> bool {
        if candidate < *self {
            *self = candidate;
            true
        } else {
            false
        }
    }

    pub fn is_negative(&self) -> bool {
        matches!(self, Bound::Finite(v) if *v < T::zero())
    }
}

impl<T> From<T> for Bound<T> {
    fn from(value: T) -> Self {
        Bound::Finite(value)
    }
}

impl<T: fmt::Display> fmt::Display for Bound<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(v) => v.fmt(f),
            Bound::Infinite => f.write_str("+inf"),
        }
    }
}
