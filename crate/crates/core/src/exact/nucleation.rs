//! Vanishing-fragmentation limit of the size-bounded kernel.
//!
//! As a → 0 the stationary mass of a bounded kernel concentrates on the
//! minimal cluster count K* = ⌈N/M⌉, and the conditional weights
//! a^K / Π m_i! lose their a-dependence. Evaluating at tiny a would
//! underflow long before reaching the limit, so this computes the limit
//! directly: enumerate P'_{N,K*,M} and normalize the multinomial weights
//! 1/Π m_i!.

use num_rational::BigRational;

use super::stats::p2_of_config;
use crate::error::{Error, Result};
use crate::numeric::Weight;
use crate::partitions::{enumerate_occupancy_given_k, OccupancyPartition};

/// Limit configuration probabilities and colocalization probability.
#[derive(Clone, Debug)]
pub struct NucleationLimit {
    pub n: usize,
    pub max_size: usize,
    /// K* = ⌈N/M⌉, the only cluster count with limit mass.
    pub cluster_count: usize,
    /// Configurations of P'_{N,K*,M} with their exact limit probabilities.
    pub configs: Vec<(OccupancyPartition, BigRational)>,
    /// Exact limit of ⟨P₂⟩ (None for N = 1).
    pub p2: Option<BigRational>,
}

impl NucleationLimit {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "max_size": self.max_size,
            "cluster_count": self.cluster_count,
            "configs": self.configs.iter().map(|(m, p)| serde_json::json!({
                "partition": m,
                "sizes": m.to_sizes().parts(),
                "probability": p.render_string(),
                "probability_float": p.to_f64(),
            })).collect::<Vec<_>>(),
            "p2": self.p2.as_ref().map(|p| p.render_string()),
            "p2_float": self.p2.as_ref().map(Weight::to_f64),
        })
    }
}

/// Exact a → 0 limit for the bounded kernel with maximum size `max_size`.
pub fn nucleation_limit(n: usize, max_size: usize) -> Result<NucleationLimit> {
    if n == 0 || max_size == 0 {
        return Err(Error::InvalidArgument("N and M must be at least 1".into()));
    }
    let k_star = n.div_ceil(max_size);
    let index = enumerate_occupancy_given_k(n, k_star, Some(max_size))?;
    if index.is_empty() {
        return Err(Error::UnreachableConfiguration(format!(
            "no partition of {n} into {k_star} parts of size at most {max_size}"
        )));
    }
    let mut weights: Vec<BigRational> = Vec::with_capacity(index.len());
    for m in index.iter() {
        let mut w: BigRational = Weight::one();
        for &count in m.counts() {
            for c in 0..count {
                w = w / BigRational::from_integer((u64::from(c) + 1).into());
            }
        }
        weights.push(w);
    }
    let total: BigRational = weights.iter().sum();
    if total.is_zero() {
        return Err(Error::DegenerateChain("limit weights vanish".into()));
    }
    let configs: Vec<(OccupancyPartition, BigRational)> = index
        .iter()
        .cloned()
        .zip(weights.into_iter().map(|w| w / &total))
        .collect();
    let p2 = if n >= 2 {
        let mut acc: BigRational = Weight::zero();
        for (m, p) in &configs {
            acc += p * p2_of_config::<BigRational>(m)?;
        }
        Some(acc)
    } else {
        None
    };
    Ok(NucleationLimit {
        n,
        max_size,
        cluster_count: k_star,
        configs,
        p2,
    })
}
