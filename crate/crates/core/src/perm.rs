//! Permutations and their dense lexicographic (Lehmer) ranks.
//!
//! Internally a permutation stores 0-based values; `from_one_based` and
//! `to_one_based` convert to the 1-based notation used in instance files and
//! user-facing output.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest dimension whose `n!` fits in a `u64`.
pub const MAX_RANKABLE_N: usize = 20;

/// Lexicographic rank of a permutation in `[0, n!)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConfigId(pub u64);

impl ConfigId {
    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ConfigId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for ConfigId {
    fn from(v: u64) -> Self {
        ConfigId(v)
    }
}

/// `n!`, or `None` when it overflows a `u64`.
pub fn factorial(n: usize) -> Option<u64> {
    (1..=n as u64).try_fold(1u64, |acc, k| acc.checked_mul(k))
}

/// `weights[i] = (n - 1 - i)!`, the place values of the Lehmer code digits.
pub(crate) fn lehmer_weights(n: usize) -> Vec<u64> {
    (0..n)
        .map(|i| factorial(n - 1 - i).expect("dimension checked by caller"))
        .collect()
}

/// A bijection on `{0, .., n-1}`; position `i` holds the location of facility `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// Builds a permutation from 0-based values, checking bijectivity.
    pub fn new(values: Vec<usize>) -> Result<Self> {
        let n = values.len();
        let mut seen = vec![false; n];
        for &v in &values {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(Error::invalid(format!(
                    "{values:?} is not a permutation of 0..{n}"
                )));
            }
        }
        Ok(Permutation(values))
    }

    /// Builds a permutation from 1-based values `{1..n}`.
    pub fn from_one_based(values: &[usize]) -> Result<Self> {
        let zero = values
            .iter()
            .map(|&v| {
                v.checked_sub(1)
                    .ok_or_else(|| Error::invalid("1-based permutation contains 0"))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(zero)
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|v| v + 1).collect()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Exchanges the contents of two 0-based positions.
    pub fn swap(&mut self, r: usize, s: usize) {
        self.0.swap(r, s);
    }

    pub fn swapped(&self, r: usize, s: usize) -> Self {
        let mut p = self.clone();
        p.swap(r, s);
        p
    }

    pub fn rank(&self) -> ConfigId {
        assert!(self.len() <= MAX_RANKABLE_N, "rank overflows u64");
        let weights = lehmer_weights(self.len());
        ConfigId(rank_slice(&self.0, &weights))
    }

    pub fn unrank(id: ConfigId, n: usize) -> Result<Self> {
        let total = factorial(n)
            .filter(|_| n <= MAX_RANKABLE_N)
            .ok_or_else(|| Error::invalid(format!("n = {n} is too large to rank")))?;
        if id.0 >= total {
            return Err(Error::invalid(format!("rank {id} is out of range for n = {n} (n! = {total})")));
        }
        let mut values = vec![0; n];
        unrank_into(id.0, &lehmer_weights(n), &mut values);
        Ok(Permutation(values))
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", v + 1)?;
        }
        f.write_str(")")
    }
}

/// Lehmer rank of a 0-based permutation slice.
pub(crate) fn rank_slice(p: &[usize], weights: &[u64]) -> u64 {
    let mut rank = 0;
    for i in 0..p.len() {
        let smaller = p[i + 1..].iter().filter(|&&v| v < p[i]).count() as u64;
        rank += smaller * weights[i];
    }
    rank
}

/// Writes the permutation with the given rank into `out`.
pub(crate) fn unrank_into(mut rank: u64, weights: &[u64], out: &mut [usize]) {
    let n = out.len();
    // bitmask of values not placed yet; n <= 20
    let mut free: u32 = (1u32 << n) - 1;
    for (i, slot) in out.iter_mut().enumerate() {
        let digit = (rank / weights[i]) as u32;
        rank %= weights[i];
        let mut mask = free;
        for _ in 0..digit {
            mask &= mask - 1;
        }
        let v = mask.trailing_zeros();
        *slot = v as usize;
        free &= !(1 << v);
    }
}

/// Fills `code[i]` with the number of later entries smaller than `p[i]`.
pub(crate) fn lehmer_code(p: &[usize], code: &mut [usize]) {
    for i in 0..p.len() {
        code[i] = p[i + 1..].iter().filter(|&&v| v < p[i]).count();
    }
}

/// Rank of `p` with positions `r < s` exchanged, given the rank and Lehmer
/// code of `p`. Only digits `r..=s` change, so this runs in O(n).
pub(crate) fn swapped_rank(
    p: &[usize],
    code: &[usize],
    rank: u64,
    weights: &[u64],
    r: usize,
    s: usize,
) -> u64 {
    debug_assert!(r < s);
    let (a, b) = (p[r], p[s]);
    let mut new_rank = rank as i64;

    // digit r: later entries smaller than b, with a now at position s
    let mut c_r = usize::from(a < b);
    for (k, &v) in p.iter().enumerate().skip(r + 1) {
        if k != s && v < b {
            c_r += 1;
        }
    }
    new_rank += (c_r as i64 - code[r] as i64) * weights[r] as i64;

    // digits strictly between: the entry at s changed from b to a
    for k in r + 1..s {
        let v = p[k];
        let delta = i64::from(a < v) - i64::from(b < v);
        new_rank += delta * weights[k] as i64;
    }

    // digit s: later entries smaller than a
    let c_s = p[s + 1..].iter().filter(|&&v| v < a).count();
    new_rank += (c_s as i64 - code[s] as i64) * weights[s] as i64;

    new_rank as u64
}

/// Advances `p` to its lexicographic successor; returns false at the last one.
pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
