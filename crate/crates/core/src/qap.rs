//! QAP instances, the assignment cost, and the pairwise-exchange neighborhood.

use std::fmt;

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Generator provenance carried alongside the matrices.
///
/// Parameter values are kept as their textual form so that an instance file
/// round-trips byte for byte.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InstanceMeta {
    pub class: Option<String>,
    pub seed: Option<u64>,
    pub params: Vec<(String, String)>,
}

impl InstanceMeta {
    pub fn is_empty(&self) -> bool {
        self.class.is_none() && self.seed.is_none() && self.params.is_empty()
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

/// An `n`×`n` distance matrix `A` and flow matrix `B`, stored row-major.
///
/// Construction checks shape, non-negativity and zero diagonals. Instances are
/// immutable afterwards and can be shared freely between threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QapInstance {
    n: usize,
    dist: Vec<i64>,
    flow: Vec<i64>,
    meta: InstanceMeta,
}

impl QapInstance {
    pub fn new(dist: Vec<Vec<i64>>, flow: Vec<Vec<i64>>) -> Result<Self> {
        Self::with_meta(dist, flow, InstanceMeta::default())
    }

    pub fn with_meta(dist: Vec<Vec<i64>>, flow: Vec<Vec<i64>>, meta: InstanceMeta) -> Result<Self> {
        let n = dist.len();
        if n == 0 {
            return Err(Error::invalid("instance dimension must be at least 1"));
        }
        let dist = flatten("distance", n, dist)?;
        let flow = flatten("flow", n, flow)?;
        Ok(QapInstance { n, dist, flow, meta })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> i64 {
        self.dist[i * self.n + j]
    }

    #[inline]
    pub fn flow(&self, i: usize, j: usize) -> i64 {
        self.flow[i * self.n + j]
    }

    pub fn dist_row(&self, i: usize) -> &[i64] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    pub fn flow_row(&self, i: usize) -> &[i64] {
        &self.flow[i * self.n..(i + 1) * self.n]
    }

    pub fn meta(&self) -> &InstanceMeta {
        &self.meta
    }

    /// True if some off-diagonal flow is positive.
    pub fn has_flow(&self) -> bool {
        (0..self.n).any(|i| (0..self.n).any(|j| i != j && self.flow(i, j) > 0))
    }

    fn check_len(&self, p: &[usize]) -> Result<()> {
        if p.len() != self.n {
            return Err(Error::invalid(format!(
                "permutation has length {} but instance dimension is {}",
                p.len(),
                self.n
            )));
        }
        Ok(())
    }

    /// `Σ_i Σ_j a_ij · b_{π_i π_j}`.
    pub fn cost(&self, p: &Permutation) -> Result<i64> {
        self.check_len(p.as_slice())?;
        Ok(self.cost_unchecked(p.as_slice()))
    }

    /// Fitness is the negated cost; maximizing it minimizes the cost.
    pub fn fitness(&self, p: &Permutation) -> Result<f64> {
        self.cost(p).map(|c| -(c as f64))
    }

    #[inline]
    pub(crate) fn cost_unchecked(&self, p: &[usize]) -> i64 {
        let n = self.n;
        let mut total = 0i64;
        for i in 0..n {
            let a = self.dist_row(i);
            let b = &self.flow[p[i] * n..(p[i] + 1) * n];
            for j in 0..n {
                total += a[j] * b[p[j]];
            }
        }
        total
    }

    /// Cost change caused by exchanging positions `r` and `s` of `p`.
    pub fn swap_delta(&self, p: &Permutation, r: usize, s: usize) -> Result<i64> {
        self.check_len(p.as_slice())?;
        if r == s || r >= self.n || s >= self.n {
            return Err(Error::invalid(format!(
                "swap positions ({r}, {s}) must be distinct and below {}",
                self.n
            )));
        }
        Ok(self.swap_delta_unchecked(p.as_slice(), r.min(s), r.max(s)))
    }

    /// O(n) delta for general (asymmetric) matrices; touches only rows and
    /// columns `r` and `s`.
    #[inline]
    pub(crate) fn swap_delta_unchecked(&self, p: &[usize], r: usize, s: usize) -> i64 {
        let n = self.n;
        let (u, v) = (p[r], p[s]);
        let a = |i: usize, j: usize| self.dist[i * n + j];
        let b = |i: usize, j: usize| self.flow[i * n + j];

        let mut delta = a(r, r) * (b(v, v) - b(u, u))
            + a(s, s) * (b(u, u) - b(v, v))
            + (a(r, s) - a(s, r)) * (b(v, u) - b(u, v));
        for k in 0..n {
            if k == r || k == s {
                continue;
            }
            let w = p[k];
            delta += (a(r, k) - a(s, k)) * (b(v, w) - b(u, w))
                + (a(k, r) - a(k, s)) * (b(w, v) - b(w, u));
        }
        delta
    }
}

fn flatten(name: &str, n: usize, rows: Vec<Vec<i64>>) -> Result<Vec<i64>> {
    if rows.len() != n {
        return Err(Error::invalid(format!(
            "{name} matrix has {} rows, expected {n}",
            rows.len()
        )));
    }
    let mut flat = Vec::with_capacity(n * n);
    for (i, row) in rows.into_iter().enumerate() {
        if row.len() != n {
            return Err(Error::invalid(format!(
                "{name} matrix row {} has {} entries, expected {n}",
                i + 1,
                row.len()
            )));
        }
        for (j, &x) in row.iter().enumerate() {
            if x < 0 {
                return Err(Error::invalid(format!(
                    "{name} matrix entry ({}, {}) is negative",
                    i + 1,
                    j + 1
                )));
            }
            if i == j && x != 0 {
                return Err(Error::invalid(format!(
                    "{name} matrix diagonal entry ({0}, {0}) must be 0",
                    i + 1
                )));
            }
        }
        flat.extend(row);
    }
    Ok(flat)
}

/// A pairwise exchange of two 0-based positions, `r < s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SwapMove {
    pub r: usize,
    pub s: usize,
}

impl fmt::Display for SwapMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.r + 1, self.s + 1)
    }
}

/// All `n(n-1)/2` exchanges in lexicographic `(r, s)` order.
///
/// This order is the tie-break order of the hill-climber.
pub fn neighbors(n: usize) -> impl Iterator<Item = SwapMove> {
    (0..n).flat_map(move |r| (r + 1..n).map(move |s| SwapMove { r, s }))
}

pub fn neighborhood_size(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}
