//! Passage-time arithmetic.
//!
//! Two representations implement [`Weight`]: [`Ticks`], an exact count of
//! `1/per_unit` steps used whenever every atom of the law is rational, and
//! `f64` for laws with continuous pieces. Both carry an infinite value that
//! absorbs addition and compares above every finite value.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::CheckedMul;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used for equality of real passage times.
pub const REAL_TOLERANCE: f64 = 1e-9;

pub trait Weight: Copy + Debug + PartialEq + Send + Sync + 'static {
    const ZERO: Self;
    const INFINITY: Self;
    /// True for the exact representation.
    const EXACT: bool;

    fn is_finite(self) -> bool;
    /// Sum; infinite if either side is.
    fn plus(self, rhs: Self) -> Self;
    /// Difference of finite values.
    fn minus(self, rhs: Self) -> Self;
    fn times(self, k: u64) -> Self;
    /// Equality: exact for ticks, within [`REAL_TOLERANCE`] for reals.
    fn same(self, rhs: Self) -> bool;
    /// Total order used by priority queues.
    fn order(&self, rhs: &Self) -> Ordering;

    fn from_ratio(r: Ratio<i64>, per_unit: u64) -> Result<Self>;
    /// `None` when the value cannot be represented exactly.
    fn from_real(x: f64) -> Option<Self>;
    fn to_f64(self, per_unit: u64) -> f64;

    fn strictly_less(self, rhs: Self) -> bool {
        !self.same(rhs) && self.order(&rhs) == Ordering::Less
    }

    fn at_most(self, rhs: Self) -> bool {
        self.same(rhs) || self.order(&rhs) == Ordering::Less
    }

    /// Small nonnegative integer view, for bucket queues.
    fn as_small_int(self) -> Option<u64> {
        None
    }
}

/// Exact passage time in units of `1/per_unit`; `u64::MAX` is infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Ticks(pub u64);

impl Ticks {
    pub const INF: Ticks = Ticks(u64::MAX);
}

impl Weight for Ticks {
    const ZERO: Self = Ticks(0);
    const INFINITY: Self = Ticks::INF;
    const EXACT: bool = true;

    #[inline]
    fn is_finite(self) -> bool {
        self.0 != u64::MAX
    }

    #[inline]
    fn plus(self, rhs: Self) -> Self {
        if !self.is_finite() || !rhs.is_finite() {
            return Ticks::INF;
        }
        let s = self.0.checked_add(rhs.0).expect("passage time overflow");
        assert!(s != u64::MAX, "passage time overflow");
        Ticks(s)
    }

    fn minus(self, rhs: Self) -> Self {
        assert!(self.is_finite() && rhs.is_finite(), "difference of infinite times");
        Ticks(self.0.checked_sub(rhs.0).expect("negative passage time"))
    }

    fn times(self, k: u64) -> Self {
        if !self.is_finite() {
            return self;
        }
        Ticks(self.0.checked_mul(k).filter(|&v| v != u64::MAX).expect("passage time overflow"))
    }

    #[inline]
    fn same(self, rhs: Self) -> bool {
        self == rhs
    }

    #[inline]
    fn order(&self, rhs: &Self) -> Ordering {
        self.cmp(rhs)
    }

    fn from_ratio(r: Ratio<i64>, per_unit: u64) -> Result<Self> {
        if *r.numer() < 0 {
            return Err(Error::InvalidParameter(format!("negative passage time {r}")));
        }
        let scaled = r
            .checked_mul(&Ratio::from_integer(per_unit as i64))
            .ok_or_else(|| Error::Overflow(format!("{r} * {per_unit}")))?;
        if !scaled.is_integer() {
            return Err(Error::InvalidParameter(format!("{r} is not a multiple of 1/{per_unit}")));
        }
        let v = *scaled.numer() as u64;
        if v == u64::MAX {
            return Err(Error::Overflow(format!("{r}")));
        }
        Ok(Ticks(v))
    }

    fn from_real(_: f64) -> Option<Self> {
        None
    }

    fn to_f64(self, per_unit: u64) -> f64 {
        if self.is_finite() {
            self.0 as f64 / per_unit as f64
        } else {
            f64::INFINITY
        }
    }

    fn as_small_int(self) -> Option<u64> {
        self.is_finite().then_some(self.0)
    }
}

impl Weight for f64 {
    const ZERO: Self = 0.0;
    const INFINITY: Self = f64::INFINITY;
    const EXACT: bool = false;

    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }

    #[inline]
    fn plus(self, rhs: Self) -> Self {
        self + rhs
    }

    fn minus(self, rhs: Self) -> Self {
        assert!(f64::is_finite(self) && f64::is_finite(rhs), "difference of infinite times");
        self - rhs
    }

    fn times(self, k: u64) -> Self {
        self * k as f64
    }

    #[inline]
    fn same(self, rhs: Self) -> bool {
        if self == rhs {
            return true;
        }
        if !f64::is_finite(self) || !f64::is_finite(rhs) {
            return false;
        }
        (self - rhs).abs() <= REAL_TOLERANCE * 1f64.max(self.abs()).max(rhs.abs())
    }

    #[inline]
    fn order(&self, rhs: &Self) -> Ordering {
        self.total_cmp(rhs)
    }

    fn from_ratio(r: Ratio<i64>, _: u64) -> Result<Self> {
        if *r.numer() < 0 {
            return Err(Error::InvalidParameter(format!("negative passage time {r}")));
        }
        Ok(*r.numer() as f64 / *r.denom() as f64)
    }

    fn from_real(x: f64) -> Option<Self> {
        Some(x)
    }

    fn to_f64(self, _: u64) -> f64 {
        self
    }
}

/// Sum of weights in iteration order.
pub fn total<W: Weight>(it: impl IntoIterator<Item = W>) -> W {
    it.into_iter().fold(W::ZERO, W::plus)
}
