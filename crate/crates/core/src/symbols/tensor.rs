//! Symmetric k-linear forms in packed storage.
//!
//! A symmetric tensor of order `k` on `R^n` is stored by its entries at
//! nondecreasing index tuples `i_1 <= ... <= i_k`, in lexicographic order.
//! There are `C(n + k - 1, k)` of them. Multiplicities (the number of
//! distinct permutations of a tuple) are applied at evaluation time, so
//! symmetry holds by construction.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Symmetric `order`-linear form on `R^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor {
    dim: usize,
    order: usize,
    entries: Vec<f64>,
}

impl SymTensor {
    pub fn zeros(dim: usize, order: usize) -> Self {
        Self { dim, order, entries: vec![0.0; packed_len(dim, order)] }
    }

    /// Order-0 tensor.
    pub fn scalar(value: f64) -> Self {
        Self { dim: 0, order: 0, entries: vec![value] }
    }

    /// Builds a tensor from its value at each sorted index tuple.
    pub fn from_fn<F: FnMut(&[usize]) -> f64>(dim: usize, order: usize, mut f: F) -> Self {
        let mut entries = Vec::with_capacity(packed_len(dim, order));
        for_each_sorted(dim, order, |idx| entries.push(f(idx)));
        Self { dim, order, entries }
    }

    /// Wraps packed entries; `entries.len()` must be `C(dim + order - 1, order)`.
    pub fn from_entries(dim: usize, order: usize, entries: Vec<f64>) -> Result<Self> {
        let expected = packed_len(dim, order);
        if entries.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: entries.len() });
        }
        Ok(Self { dim, order, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Sorted index tuples in storage order.
    pub fn indices(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::with_capacity(self.entries.len());
        for_each_sorted(self.dim, self.order, |idx| out.push(idx.to_vec()));
        out
    }

    /// Entry at an index tuple given in any order.
    pub fn get(&self, index: &[usize]) -> f64 {
        self.entries[self.position(index)]
    }

    pub fn set(&mut self, index: &[usize], value: f64) {
        let pos = self.position(index);
        self.entries[pos] = value;
    }

    fn position(&self, index: &[usize]) -> usize {
        assert_eq!(index.len(), self.order, "index length must equal tensor order");
        let mut sorted = index.to_vec();
        sorted.sort_unstable();
        assert!(sorted.last().is_none_or(|&i| i < self.dim), "index out of range");
        rank_sorted(self.dim, &sorted)
    }

    /// `T(u_1, ..., u_k)`.
    pub fn eval<V: AsRef<[f64]>>(&self, args: &[V]) -> Result<f64> {
        if args.len() != self.order {
            return Err(Error::DimensionMismatch { expected: self.order, found: args.len() });
        }
        for a in args {
            if a.as_ref().len() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, found: a.as_ref().len() });
            }
        }
        if self.order == 0 {
            return Ok(self.entries[0]);
        }
        // Canonical argument order makes the result independent of the
        // caller's ordering bit for bit, not just up to rounding.
        let mut order: Vec<usize> = (0..args.len()).collect();
        order.sort_by(|&a, &b| cmp_slices(args[a].as_ref(), args[b].as_ref()));
        let args: Vec<&[f64]> = order.iter().map(|&a| args[a].as_ref()).collect();
        // Sum over the full index cube; n^k stays small for the orders in use.
        let k = self.order;
        let mut idx = vec![0usize; k];
        let mut sorted = vec![0usize; k];
        let mut total = 0.0;
        loop {
            let mut prod = 1.0;
            for (slot, &i) in idx.iter().enumerate() {
                prod *= args[slot][i];
            }
            if prod != 0.0 {
                sorted.copy_from_slice(&idx);
                sorted.sort_unstable();
                total += prod * self.entries[rank_sorted(self.dim, &sorted)];
            }
            // odometer
            let mut p = k;
            loop {
                if p == 0 {
                    return Ok(total);
                }
                p -= 1;
                idx[p] += 1;
                if idx[p] < self.dim {
                    break;
                }
                idx[p] = 0;
            }
        }
    }

    /// `T(x, ..., x)`.
    pub fn diagonal(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        let mut pos = 0;
        let entries = &self.entries;
        for_each_sorted(self.dim, self.order, |idx| {
            let mut prod = multiplicity(idx);
            for &i in idx {
                prod *= x[i];
            }
            total += prod * entries[pos];
            pos += 1;
        });
        total
    }

    /// Frobenius norm of the full symmetric array.
    pub fn frobenius_norm(&self) -> f64 {
        let mut total = 0.0;
        let mut pos = 0;
        let entries = &self.entries;
        for_each_sorted(self.dim, self.order, |idx| {
            total += multiplicity(idx) * entries[pos] * entries[pos];
            pos += 1;
        });
        total.sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { dim: self.dim, order: self.order, entries: self.entries.iter().map(|e| e * factor).collect() }
    }

    pub fn sub(&self, other: &SymTensor) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            dim: self.dim,
            order: self.order,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        })
    }

    fn check_same_shape(&self, other: &SymTensor) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        if self.order != other.order {
            return Err(Error::DimensionMismatch { expected: self.order, found: other.order });
        }
        Ok(())
    }
}

/// `v^{(x) k}`: evaluates to `prod_j <v, u_j>`.
pub fn tensor_power(v: &[f64], k: usize) -> SymTensor {
    SymTensor::from_fn(v.len(), k, |idx| idx.iter().map(|&i| v[i]).product())
}

/// Recovers `omega(x_1, ..., x_k)` from the diagonal `q(x) = omega(x, ..., x)`
/// of a symmetric k-linear form:
///
/// `omega(x_1, ..., x_k) = (2^k k!)^{-1} sum_{eta in {-1,1}^k} (prod eta_i) q(sum_j eta_j x_j)`.
pub fn polarize<Q, V>(q: Q, points: &[V]) -> f64
where
    Q: Fn(&[f64]) -> f64,
    V: AsRef<[f64]>,
{
    let k = points.len();
    if k == 0 {
        return 0.0;
    }
    let dim = points[0].as_ref().len();
    let mut combo = vec![0.0; dim];
    let mut total = 0.0;
    for signs in 0u64..(1u64 << k) {
        combo.iter_mut().for_each(|c| *c = 0.0);
        let mut parity = 1.0;
        for (j, p) in points.iter().enumerate() {
            let eta = if signs >> j & 1 == 1 { -1.0 } else { 1.0 };
            parity *= eta;
            for (c, x) in combo.iter_mut().zip(p.as_ref()) {
                *c += eta * x;
            }
        }
        total += parity * q(&combo);
    }
    let mut norm = (1u64 << k) as f64;
    for j in 2..=k {
        norm *= j as f64;
    }
    total / norm
}

/// Number of nondecreasing tuples of length `order` over `0..dim`.
pub fn packed_len(dim: usize, order: usize) -> usize {
    if order == 0 {
        return 1;
    }
    binomial(dim + order - 1, order) as usize
}

/// Number of distinct permutations of a sorted tuple, `k! / prod(counts!)`.
pub fn multiplicity(sorted: &[usize]) -> f64 {
    let mut m = 1.0;
    let mut run = 1.0;
    for w in 1..=sorted.len() {
        m *= w as f64;
        if w < sorted.len() && sorted[w] == sorted[w - 1] {
            run += 1.0;
            m /= run;
        } else {
            run = 1.0;
        }
    }
    m
}

/// Calls `f` on every nondecreasing tuple in lexicographic order.
pub fn for_each_sorted<F: FnMut(&[usize])>(dim: usize, order: usize, mut f: F) {
    if order == 0 {
        f(&[]);
        return;
    }
    if dim == 0 {
        return;
    }
    let mut idx = vec![0usize; order];
    loop {
        f(&idx);
        // advance the rightmost slot that can still grow, reset the tail to it
        let mut p = order;
        loop {
            if p == 0 {
                return;
            }
            p -= 1;
            if idx[p] + 1 < dim {
                let v = idx[p] + 1;
                for slot in &mut idx[p..] {
                    *slot = v;
                }
                break;
            }
        }
    }
}

fn rank_sorted(dim: usize, sorted: &[usize]) -> usize {
    let k = sorted.len();
    let mut rank = 0u64;
    let mut prev = 0usize;
    for (p, &i) in sorted.iter().enumerate() {
        let remaining = k - p - 1;
        for v in prev..i {
            // tuples of length `remaining` with values in [v, dim)
            rank += binomial(dim - v + remaining - 1, remaining);
        }
        prev = i;
    }
    rank as usize
}

fn cmp_slices(a: &[f64], b: &[f64]) -> core::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            core::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for j in 0..k {
        acc = acc * (n - j) as u64 / (j + 1) as u64;
    }
    acc
}
