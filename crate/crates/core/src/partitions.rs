//! Integer partitions of N in size form and occupancy form.
//!
//! A configuration of N particles in clusters is a partition of N. The size
//! form lists cluster sizes non-increasingly; the occupancy form counts
//! clusters per size, `m[i]` = number of clusters of size i+1, with
//! `Σ (i+1)·m[i] = N`. Enumeration order is reverse-lexicographic on the
//! size form (largest parts first), which gives every downstream table and
//! transition matrix a stable, reproducible indexing.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::limits;

/// A partition in size form: positive parts, non-increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SizePartition {
    parts: Vec<usize>,
}

impl SizePartition {
    /// Validates that `parts` is non-empty, positive and non-increasing.
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidArgument("size partition is empty".into()));
        }
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::InvalidArgument("size partition has a zero part".into()));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(
                "size partition parts must be non-increasing".into(),
            ));
        }
        Ok(SizePartition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Sum of the parts (the N this is a partition of).
    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }
}

/// A partition in occupancy form, stored dense with length N.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OccupancyPartition {
    counts: Vec<u32>,
}

impl OccupancyPartition {
    /// Validates that `counts` has length n and satisfies `Σ i·m_i = n`.
    pub fn new(counts: Vec<u32>, n: usize) -> Result<Self> {
        if counts.len() != n {
            return Err(Error::InvalidArgument(format!(
                "occupancy vector has length {}, expected {}",
                counts.len(),
                n
            )));
        }
        let total: usize = counts
            .iter()
            .enumerate()
            .map(|(i, &m)| (i + 1) * m as usize)
            .sum();
        if total != n {
            return Err(Error::InvalidArgument(format!(
                "occupancy vector sums to {total} particles, expected {n}"
            )));
        }
        Ok(OccupancyPartition { counts })
    }

    /// `m_i` for sizes 1..=N; zero beyond the stored length.
    pub fn count(&self, size: usize) -> u32 {
        if size == 0 || size > self.counts.len() {
            0
        } else {
            self.counts[size - 1]
        }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Number of particles, `Σ i·m_i`.
    pub fn particle_total(&self) -> usize {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &m)| (i + 1) * m as usize)
            .sum()
    }

    /// Number of clusters, `K = Σ m_i`.
    pub fn cluster_count(&self) -> usize {
        self.counts.iter().map(|&m| m as usize).sum()
    }

    /// Largest size with a non-zero count (0 for the empty partition).
    pub fn max_size(&self) -> usize {
        self.counts
            .iter()
            .rposition(|&m| m > 0)
            .map_or(0, |i| i + 1)
    }

    /// Expands the counts back to the sorted (non-increasing) size form.
    pub fn to_sizes(&self) -> SizePartition {
        let mut parts = Vec::with_capacity(self.cluster_count());
        for size in (1..=self.counts.len()).rev() {
            for _ in 0..self.count(size) {
                parts.push(size);
            }
        }
        SizePartition { parts }
    }

    /// Sparse `[size, count]` pairs sorted by size ascending.
    pub fn to_sparse(&self) -> Vec<(usize, u32)> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0)
            .map(|(i, &m)| (i + 1, m))
            .collect()
    }

    /// Rebuilds a dense occupancy vector of length `n` from sparse pairs.
    pub fn from_sparse(pairs: &[(usize, u32)], n: usize) -> Result<Self> {
        let mut counts = vec![0u32; n];
        for &(size, m) in pairs {
            if size == 0 || size > n {
                return Err(Error::InvalidArgument(format!(
                    "sparse entry size {size} outside 1..={n}"
                )));
            }
            counts[size - 1] = counts[size - 1]
                .checked_add(m)
                .ok_or_else(|| Error::InvalidArgument("count overflow".into()))?;
        }
        OccupancyPartition::new(counts, n)
    }
}

impl serde::Serialize for OccupancyPartition {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_sparse().serialize(serializer)
    }
}

/// Converts a size partition to occupancy form.
pub fn occupancy_from_sizes(sizes: &SizePartition) -> OccupancyPartition {
    let n = sizes.total();
    let mut counts = vec![0u32; n];
    for &p in sizes.parts() {
        counts[p - 1] += 1;
    }
    OccupancyPartition { counts }
}

/// Ordered table of occupancy partitions with a reverse index.
#[derive(Clone, Debug)]
pub struct PartitionIndex {
    n: usize,
    k: Option<usize>,
    max_size: Option<usize>,
    items: Vec<OccupancyPartition>,
    lookup: HashMap<Vec<u32>, usize>,
}

impl PartitionIndex {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> Option<usize> {
        self.k
    }

    pub fn max_size(&self) -> Option<usize> {
        self.max_size
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, index: usize) -> &OccupancyPartition {
        &self.items[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = &OccupancyPartition> {
        self.items.iter()
    }

    /// Index of a partition in canonical order, if present.
    pub fn position(&self, partition: &OccupancyPartition) -> Option<usize> {
        self.lookup.get(partition.counts()).copied()
    }
}

fn check_enumeration_args(n: usize, max_size: Option<usize>) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    if max_size == Some(0) {
        return Err(Error::InvalidArgument("max_size must be at least 1".into()));
    }
    let cap = limits::max_enumeration_n();
    if n > cap {
        return Err(Error::ResourceLimit(format!(
            "full enumeration refused for N = {n} > {cap}; \
             set CFP_MAX_N to override at your own resource risk"
        )));
    }
    Ok(max_size.map_or(n, |m| m.min(n)))
}

/// Recursive descent over non-increasing parts. Emits size partitions in
/// reverse-lexicographic order (largest first). `want_k` restricts the part
/// count exactly.
fn descend(
    remaining: usize,
    largest_allowed: usize,
    want_k: Option<usize>,
    prefix: &mut Vec<usize>,
    out: &mut Vec<OccupancyPartition>,
    n: usize,
) {
    if remaining == 0 {
        if want_k.is_none_or(|k| prefix.len() == k) {
            let mut counts = vec![0u32; n];
            for &p in prefix.iter() {
                counts[p - 1] += 1;
            }
            out.push(OccupancyPartition { counts });
        }
        return;
    }
    if let Some(k) = want_k {
        let left = k - prefix.len();
        // Feasibility: `left` parts of size 1..=largest_allowed must sum to
        // `remaining`.
        if left == 0 || remaining < left || remaining > left * largest_allowed {
            return;
        }
    }
    for part in (1..=largest_allowed.min(remaining)).rev() {
        prefix.push(part);
        descend(remaining - part, part, want_k, prefix, out, n);
        prefix.pop();
    }
}

fn build_index(
    n: usize,
    k: Option<usize>,
    max_size: Option<usize>,
) -> Result<PartitionIndex> {
    let largest = check_enumeration_args(n, max_size)?;
    if let Some(k) = k {
        if k == 0 {
            return Err(Error::InvalidArgument("K must be at least 1".into()));
        }
        if k > n {
            return Err(Error::InvalidArgument(format!("K = {k} exceeds N = {n}")));
        }
    }
    let mut items = Vec::new();
    descend(n, largest, k, &mut Vec::new(), &mut items, n);
    let lookup = items
        .iter()
        .enumerate()
        .map(|(i, p)| (p.counts().to_vec(), i))
        .collect();
    Ok(PartitionIndex {
        n,
        k,
        max_size,
        items,
        lookup,
    })
}

/// Every occupancy partition of `n` (parts capped at `max_size` when given),
/// in canonical order.
pub fn enumerate_occupancy(n: usize, max_size: Option<usize>) -> Result<PartitionIndex> {
    build_index(n, None, max_size)
}

/// The occupancy partitions of `n` with exactly `k` parts. A max-size
/// constraint that leaves no partitions yields an empty index, not an error.
pub fn enumerate_occupancy_given_k(
    n: usize,
    k: usize,
    max_size: Option<usize>,
) -> Result<PartitionIndex> {
    build_index(n, Some(k), max_size)
}
