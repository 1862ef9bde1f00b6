//! Best-improvement hill-climbing and the exhaustive basin partition.
//!
//! Every configuration has a unique best-improving successor: the neighbor
//! with the lowest cost among those strictly cheaper than itself, ties going
//! to the lexicographically smallest `(r, s)` exchange. Configurations without
//! a strictly cheaper neighbor are local optima and are their own successor.
//! [`map_basins`] computes all successors in parallel and then resolves each
//! configuration to the fixed point at the end of its successor chain.

use std::io::{Read, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::perm::{factorial, lehmer_weights, next_permutation, rank_slice, unrank_into, ConfigId};
use crate::qap::QapInstance;

/// Largest dimension [`map_basins`] accepts (`12!` ranks still fit in a `u32`).
pub const MAX_ENUM_N: usize = 12;

const CHUNK: usize = 1 << 12;
const UNSET: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Optimum {
    pub id: ConfigId,
    pub cost: i64,
    pub basin_size: u64,
}

/// Outcome of scanning one neighborhood.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Step {
    /// Best strictly improving exchange, `None` at a local optimum.
    pub best: Option<(usize, usize)>,
    /// Some neighbor has exactly the same cost.
    pub plateau: bool,
}

#[inline]
pub(crate) fn best_improving_move(inst: &QapInstance, p: &[usize]) -> Step {
    let n = p.len();
    let mut best_delta = 0i64;
    let mut best = None;
    let mut plateau = false;
    for r in 0..n {
        for s in r + 1..n {
            let delta = inst.swap_delta_unchecked(p, r, s);
            plateau |= delta == 0;
            // strict comparison keeps the first (lexicographically smallest) move on ties
            if delta < best_delta {
                best_delta = delta;
                best = Some((r, s));
            }
        }
    }
    Step { best, plateau }
}

fn check_enumerable(n: usize) -> Result<u64> {
    if n > MAX_ENUM_N {
        return Err(Error::ResourceLimit(format!(
            "exhaustive enumeration of {n}! configurations exceeds the n <= {MAX_ENUM_N} guard"
        )));
    }
    Ok(factorial(n).expect("n <= 12"))
}

/// Runs best-improvement hill-climbing from `start` and returns the local
/// optimum it stops at.
pub fn hill_climb(inst: &QapInstance, start: ConfigId) -> Result<ConfigId> {
    let n = inst.n();
    let total = factorial(n).filter(|_| n <= crate::perm::MAX_RANKABLE_N);
    match total {
        Some(total) if start.get() < total => {}
        _ => return Err(Error::invalid(format!("start {start} is not a valid rank for n = {n}"))),
    }
    let weights = lehmer_weights(n);
    let mut p = vec![0; n];
    unrank_into(start.get(), &weights, &mut p);
    while let Some((r, s)) = best_improving_move(inst, &p).best {
        p.swap(r, s);
    }
    Ok(ConfigId(rank_slice(&p, &weights)))
}

/// The partition of the search space into basins of attraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasinMap {
    n: usize,
    owner: Vec<u32>,
    optima: Vec<Optimum>,
    neutrality_count: Option<u64>,
}

/// Optima of minimum cost, with the one used as "the" global optimum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalOptima {
    pub ids: Vec<ConfigId>,
    pub cost: i64,
    /// Largest basin among the tied optima, then smallest id.
    pub canonical: ConfigId,
}

/// Maps every configuration of `inst` to its local optimum.
pub fn map_basins(inst: &QapInstance) -> Result<BasinMap> {
    let n = inst.n();
    let total = check_enumerable(n)? as usize;
    let weights = lehmer_weights(n);

    let mut successor = vec![0u32; total];
    let plateaus: u64 = successor
        .par_chunks_mut(CHUNK)
        .enumerate()
        .map(|(chunk_idx, chunk)| {
            let first = chunk_idx * CHUNK;
            let mut p = vec![0; n];
            let mut q = vec![0; n];
            unrank_into(first as u64, &weights, &mut p);
            let mut plateaus = 0u64;
            for (offset, slot) in chunk.iter_mut().enumerate() {
                let rank = first + offset;
                let step = best_improving_move(inst, &p);
                plateaus += u64::from(step.plateau);
                *slot = match step.best {
                    Some((r, s)) => {
                        q.copy_from_slice(&p);
                        q.swap(r, s);
                        rank_slice(&q, &weights) as u32
                    }
                    None => rank as u32,
                };
                next_permutation(&mut p);
            }
            plateaus
        })
        .sum();

    let owner = resolve_owners(&successor);
    drop(successor);
    BasinMap::from_owners(inst, owner, Some(plateaus))
}

/// Follows successor chains to their fixed points, compressing paths.
fn resolve_owners(successor: &[u32]) -> Vec<u32> {
    let mut owner = vec![UNSET; successor.len()];
    let mut path = Vec::new();
    for start in 0..successor.len() {
        if owner[start] != UNSET {
            continue;
        }
        let mut t = start;
        while owner[t] == UNSET && successor[t] as usize != t {
            path.push(t);
            t = successor[t] as usize;
        }
        let root = if owner[t] == UNSET { t as u32 } else { owner[t] };
        owner[t] = root;
        for x in path.drain(..) {
            owner[x] = root;
        }
    }
    owner
}

impl BasinMap {
    fn from_owners(inst: &QapInstance, owner: Vec<u32>, neutrality_count: Option<u64>) -> Result<Self> {
        let n = inst.n();
        let weights = lehmer_weights(n);
        let mut ids: Vec<u32> = owner
            .par_iter()
            .enumerate()
            .filter(|&(s, &o)| s as u32 == o)
            .map(|(s, _)| s as u32)
            .collect();
        ids.sort_unstable();

        let sizes = owner
            .par_chunks(CHUNK)
            .fold(
                || vec![0u64; ids.len()],
                |mut acc, chunk| {
                    for &o in chunk {
                        let idx = ids.binary_search(&o).expect("owner is an optimum");
                        acc[idx] += 1;
                    }
                    acc
                },
            )
            .reduce(
                || vec![0u64; ids.len()],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            );

        let mut p = vec![0; n];
        let optima = ids
            .iter()
            .zip(sizes)
            .map(|(&id, basin_size)| {
                unrank_into(u64::from(id), &weights, &mut p);
                Optimum {
                    id: ConfigId(u64::from(id)),
                    cost: inst.cost_unchecked(&p),
                    basin_size,
                }
            })
            .collect();
        Ok(BasinMap {
            n,
            owner,
            optima,
            neutrality_count,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `n!`
    pub fn search_space_size(&self) -> u64 {
        self.owner.len() as u64
    }

    /// Local optimum reached from `id`.
    pub fn owner(&self, id: ConfigId) -> ConfigId {
        ConfigId(u64::from(self.owner[id.index()]))
    }

    pub fn owners(&self) -> impl ExactSizeIterator<Item = ConfigId> + '_ {
        self.owner.iter().map(|&o| ConfigId(u64::from(o)))
    }

    /// Optima sorted by id.
    pub fn optima(&self) -> &[Optimum] {
        &self.optima
    }

    pub fn optimum_index(&self, id: ConfigId) -> Option<usize> {
        self.optima.binary_search_by_key(&id, |o| o.id).ok()
    }

    /// Number of configurations with at least one equal-cost neighbor;
    /// unknown for maps loaded from an owner dump.
    pub fn neutrality_count(&self) -> Option<u64> {
        self.neutrality_count
    }

    /// Index into [`optima`](Self::optima) of every configuration's optimum.
    pub fn node_indices(&self) -> Vec<u32> {
        self.owner
            .par_iter()
            .map(|&o| {
                self.optima
                    .binary_search_by_key(&u64::from(o), |x| x.id.get())
                    .expect("owner is an optimum") as u32
            })
            .collect()
    }

    pub fn global_optima(&self) -> GlobalOptima {
        let cost = self.optima.iter().map(|o| o.cost).min().expect("at least one optimum");
        let tied: Vec<&Optimum> = self.optima.iter().filter(|o| o.cost == cost).collect();
        let canonical = tied
            .iter()
            .min_by_key(|o| (std::cmp::Reverse(o.basin_size), o.id))
            .expect("non-empty")
            .id;
        GlobalOptima {
            ids: tied.iter().map(|o| o.id).collect(),
            cost,
            canonical,
        }
    }

    /// Little-endian dump: `n`, `n!`, then one `u64` owner rank per configuration.
    pub fn write_owner_dump<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&(self.n as u64).to_le_bytes())?;
        w.write_all(&self.search_space_size().to_le_bytes())?;
        let mut buf = Vec::with_capacity(CHUNK * 8);
        for chunk in self.owner.chunks(CHUNK) {
            buf.clear();
            for &o in chunk {
                buf.extend_from_slice(&u64::from(o).to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Rebuilds a map from [`write_owner_dump`](Self::write_owner_dump) output.
    ///
    /// The owner array is checked to be a valid partition (every owner is a
    /// fixed point and a local optimum of `inst`); optimum costs and basin
    /// sizes are recomputed.
    pub fn read_owner_dump<R: Read>(inst: &QapInstance, mut r: R) -> Result<Self> {
        let mut word = [0u8; 8];
        let mut next = |r: &mut R, what: &str| -> Result<u64> {
            r.read_exact(&mut word)
                .map_err(|e| Error::invalid(format!("owner dump truncated in {what}: {e}")))?;
            Ok(u64::from_le_bytes(word))
        };
        let n = next(&mut r, "header")? as usize;
        let total = next(&mut r, "header")?;
        if n != inst.n() {
            return Err(Error::invalid(format!(
                "owner dump is for n = {n}, instance has n = {}",
                inst.n()
            )));
        }
        let expected = check_enumerable(n)?;
        if total != expected {
            return Err(Error::invalid(format!("owner dump header says {total} configurations, expected {expected}")));
        }
        let mut owner = Vec::with_capacity(total as usize);
        for _ in 0..total {
            let o = next(&mut r, "body")?;
            if o >= total {
                return Err(Error::invalid(format!("owner rank {o} out of range")));
            }
            owner.push(o as u32);
        }
        let weights = lehmer_weights(n);
        let mut p = vec![0; n];
        for &o in &owner {
            if owner[o as usize] != o {
                return Err(Error::invalid(format!("owner {o} is not a fixed point")));
            }
        }
        for (s, &o) in owner.iter().enumerate() {
            if s as u32 == o {
                unrank_into(s as u64, &weights, &mut p);
                if best_improving_move(inst, &p).best.is_some() {
                    return Err(Error::invalid(format!("owner {o} is not a local optimum of this instance")));
                }
            }
        }
        Self::from_owners(inst, owner, None)
    }
}
