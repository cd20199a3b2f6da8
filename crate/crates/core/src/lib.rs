//! Exact steady-state statistics of stochastic coagulation-fragmentation
//! with a finite number of particles, validated by an independent exact
//! stochastic simulator.
//!
//! N particles live in clusters; an unordered pair of clusters of sizes i
//! and j merges at rate C(i,j) and a cluster of size i+j splits into (i, j)
//! at rate F(i,j). When the kernel satisfies detailed balance,
//! C(i,j)·a_i·a_j = F(i,j)·a_{i+j}, the configuration distribution
//! conditioned on the cluster count K is the product form
//! Π a_i^{m_i}/m_i! over the partitions of N with K parts, and everything
//! of interest — cluster-count distribution, per-size moments, the
//! probability that two tagged particles share a cluster, mean
//! together/apart times — follows from a small triangular table of
//! normalization constants.
//!
//! Modules:
//!
//! * [`partitions`] — enumeration and indexing of integer partitions,
//! * [`kernels`] — kernel families and detailed-balance checking,
//! * [`exact`] — normalization tables, moments, the cluster-count chain,
//! * [`hypergeom`] — constant-kernel closed forms (terminating Kummer sums),
//! * [`pairtimes`] — absorbing chains for mean separation/reunion times,
//! * [`simulate`] — event-driven exact stochastic simulation.

pub mod error;
pub mod exact;
pub mod hypergeom;
pub mod kernels;
pub mod limits;
pub mod numeric;
pub mod partitions;
pub mod pairtimes;
pub mod simulate;

pub use error::{Error, Result};
pub use kernels::{build_kernel, verify_detailed_balance, Kernel, KernelFamily, KernelSpec};
pub use numeric::{LogFloat, NumericMode, Weight};
pub use partitions::{
    enumerate_occupancy, enumerate_occupancy_given_k, occupancy_from_sizes, OccupancyPartition,
    PartitionIndex, SizePartition,
};
