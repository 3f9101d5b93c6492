//! Composite path lengths.
//!
//! A path length is the pair `(true length, tie key)`, compared
//! lexicographically. The true length is the sum of the original integer
//! weights and is what callers ultimately see; the tie key is the sum of the
//! per-edge tie-break values and only serves to make every shortest path
//! unique. `UNREACHABLE` is larger than every finite length and absorbs
//! addition.

use std::fmt;
use std::ops::Add;

/// Lexicographic `(true_len, tie_key)` pair, or [`CompositeLength::UNREACHABLE`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CompositeLength {
    true_len: u64,
    tie_key: u64,
}

impl CompositeLength {
    pub const ZERO: CompositeLength = CompositeLength {
        true_len: 0,
        tie_key: 0,
    };
    pub const UNREACHABLE: CompositeLength = CompositeLength {
        true_len: u64::MAX,
        tie_key: u64::MAX,
    };

    /// Panics if the pair collides with the `UNREACHABLE` sentinel.
    pub fn new(true_len: u64, tie_key: u64) -> Self {
        assert!(
            true_len != u64::MAX,
            "true length {true_len} collides with the unreachable sentinel"
        );
        CompositeLength { true_len, tie_key }
    }

    pub fn is_unreachable(self) -> bool {
        self.true_len == u64::MAX
    }

    pub fn is_finite(self) -> bool {
        !self.is_unreachable()
    }

    /// `None` for unreachable.
    pub fn true_len(self) -> Option<u64> {
        self.is_finite().then_some(self.true_len)
    }

    pub fn tie_key(self) -> Option<u64> {
        self.is_finite().then_some(self.tie_key)
    }

    pub(crate) fn raw_parts(self) -> (u64, u64) {
        (self.true_len, self.tie_key)
    }

    pub(crate) fn from_raw_parts(true_len: u64, tie_key: u64) -> Self {
        CompositeLength { true_len, tie_key }
    }
}

impl Add for CompositeLength {
    type Output = CompositeLength;

    fn add(self, rhs: CompositeLength) -> CompositeLength {
        if self.is_unreachable() || rhs.is_unreachable() {
            return CompositeLength::UNREACHABLE;
        }
        match (
            self.true_len.checked_add(rhs.true_len),
            self.tie_key.checked_add(rhs.tie_key),
        ) {
            (Some(t), Some(k)) if t != u64::MAX => CompositeLength {
                true_len: t,
                tie_key: k,
            },
            _ => panic!("composite length overflow: {self:?} + {rhs:?}"),
        }
    }
}

impl fmt::Debug for CompositeLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unreachable() {
            f.write_str("UNREACHABLE")
        } else {
            write!(f, "({}, {})", self.true_len, self.tie_key)
        }
    }
}

impl fmt::Display for CompositeLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.true_len() {
            Some(len) => write!(f, "{len}"),
            None => f.write_str("UNREACHABLE"),
        }
    }
}
