//! Deterministic reductions.
//!
//! Kernel sums run over up to a few million lattice points, so the reduction
//! order matters for reproducibility. [`pairwise_range`] fixes a binary tree
//! over the index range whose shape depends only on the length; a parallel
//! driver that splits at [`split_point`] and stops at [`LEAF`] reproduces the
//! sequential result bit for bit. [`NeumaierSum`] is the compensated oracle
//! used to validate it.

use core::ops::{Add, Sub};
use num_complex::Complex64;
use num_traits::Zero;

/// Ranges at most this long are summed left to right.
pub const LEAF: usize = 128;

/// Midpoint used to split `[lo, hi)` in the pairwise tree.
#[inline]
pub fn split_point(lo: usize, hi: usize) -> usize {
    lo + (hi - lo) / 2
}

/// Pairwise sum of `term(i)` for `i` in `[lo, hi)`.
pub fn pairwise_range<T, F>(lo: usize, hi: usize, term: &F) -> T
where
    T: Copy + Add<Output = T> + Zero,
    F: Fn(usize) -> T,
{
    if hi <= lo {
        return T::zero();
    }
    if hi - lo <= LEAF {
        let mut acc = T::zero();
        for i in lo..hi {
            acc = acc + term(i);
        }
        return acc;
    }
    let mid = split_point(lo, hi);
    pairwise_range(lo, mid, term) + pairwise_range(mid, hi, term)
}

/// Pairwise sum of a slice, same tree as [`pairwise_range`].
pub fn pairwise_sum<T>(values: &[T]) -> T
where
    T: Copy + Add<Output = T> + Zero,
{
    pairwise_range(0, values.len(), &|i| values[i])
}

/// Values that can be accumulated with Neumaier compensation.
pub trait Compensable: Copy + Add<Output = Self> + Sub<Output = Self> + Zero {
    /// Compensation term for `sum = a + b`, whichever of `a`, `b` is larger.
    fn lost_bits(a: Self, b: Self, sum: Self) -> Self;
}

impl Compensable for f64 {
    #[inline]
    fn lost_bits(a: f64, b: f64, sum: f64) -> f64 {
        if a.abs() >= b.abs() {
            (a - sum) + b
        } else {
            (b - sum) + a
        }
    }
}

impl Compensable for Complex64 {
    #[inline]
    fn lost_bits(a: Self, b: Self, sum: Self) -> Self {
        Complex64::new(f64::lost_bits(a.re, b.re, sum.re), f64::lost_bits(a.im, b.im, sum.im))
    }
}

/// Neumaier (improved Kahan) accumulator.
#[derive(Debug, Clone, Copy)]
pub struct NeumaierSum<T> {
    sum: T,
    compensation: T,
}

impl<T: Compensable> Default for NeumaierSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Compensable> NeumaierSum<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), compensation: T::zero() }
    }

    #[inline]
    pub fn add(&mut self, value: T) {
        let t = self.sum + value;
        self.compensation = self.compensation + T::lost_bits(self.sum, value, t);
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.compensation
    }
}

/// Compensated sum of an iterator, in iteration order.
pub fn compensated_sum<T: Compensable, I: IntoIterator<Item = T>>(values: I) -> T {
    let mut acc = NeumaierSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn pairwise_matches_exact_integer_sum() {
        let values: Vec<f64> = (1..=10_000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&values), 50_005_000.0);
    }

    #[test]
    fn empty_range_is_zero() {
        assert_eq!(pairwise_range(5, 5, &|i| i as f64), 0.0);
    }

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let values = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(values.iter().copied()), 2.0);
    }

    #[test]
    fn pairwise_close_to_compensated_on_harmonic_series() {
        let values: Vec<f64> = (1..200_000).map(|i| 1.0 / i as f64).collect();
        let a = pairwise_sum(&values);
        let b = compensated_sum(values.iter().copied());
        assert!((a - b).abs() < 1e-13 * b);
    }
}
