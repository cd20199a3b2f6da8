//! Conditional configuration probabilities and cluster-count moments.
//!
//! Everything here is a ratio of table entries:
//!
//! ```text
//! p'(m | K)        = (Π a_i^{m_i}/m_i!) / C_{N,K}
//! ⟨M_i⟩_{N,K}      = a_i C_{N-i,K-1} / C_{N,K}           (0 for i > N-K+1)
//! ⟨M_i²⟩_{N,K}     = a_i² C_{N-2i,K-2} / C_{N,K} + ⟨M_i⟩_{N,K}
//! cov(M_i, M_j)    = a_i a_j C_{N-i-j,K-2} / C_{N,K} - ⟨M_i⟩⟨M_j⟩
//! ```
//!
//! with the out-of-range convention C_{n,k} = 0 (C_{0,0} = 1) making the
//! boundary cases uniform.

use super::chain::ClusterCountDistribution;
use super::table::CnkTable;
use crate::error::{Error, Result};
use crate::numeric::Weight;
use crate::partitions::OccupancyPartition;

/// First and second moments of the per-size cluster counts, conditional on
/// K clusters or marginal over the cluster-count distribution.
#[derive(Clone, Debug)]
pub struct MomentReport<W: Weight> {
    pub n: usize,
    /// `Some(K)` for conditional reports, `None` for marginal ones.
    pub k: Option<usize>,
    /// ⟨M_i⟩ for i = 1..=N.
    pub means: Vec<W>,
    /// ⟨M_i²⟩ for i = 1..=N.
    pub second_moments: Vec<W>,
    /// Requested covariances ⟨M_i M_j⟩ - ⟨M_i⟩⟨M_j⟩ as (i, j, value).
    pub covariances: Vec<(usize, usize, W)>,
}

impl<W: Weight> MomentReport<W> {
    pub fn mean(&self, i: usize) -> &W {
        &self.means[i - 1]
    }

    pub fn variance(&self, i: usize) -> W {
        let m = &self.means[i - 1];
        self.second_moments[i - 1].sub(&m.mul(m))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "k": self.k,
            "means": self.means.iter().map(Weight::render_json).collect::<Vec<_>>(),
            "second_moments": self.second_moments.iter().map(Weight::render_json).collect::<Vec<_>>(),
            "covariances": self.covariances.iter()
                .map(|(i, j, v)| serde_json::json!({"i": i, "j": j, "value": v.render_json()}))
                .collect::<Vec<_>>(),
        })
    }
}

fn normalizer<W: Weight>(table: &CnkTable<W>, k: usize) -> Result<W> {
    let c = table.entry(table.n() as i64, k as i64);
    if c.is_zero() {
        return Err(Error::UnreachableConfiguration(format!(
            "C_{{{},{}}} = 0: no configuration has {} clusters under this kernel",
            table.n(),
            k,
            k
        )));
    }
    Ok(c)
}

/// p'(m | K(m)) for a configuration of the table's N.
pub fn config_probability<W: Weight>(table: &CnkTable<W>, m: &OccupancyPartition) -> Result<W> {
    if m.particle_total() != table.n() {
        return Err(Error::InvalidArgument(format!(
            "configuration holds {} particles, table was built for {}",
            m.particle_total(),
            table.n()
        )));
    }
    let c = normalizer(table, m.cluster_count())?;
    Ok(table.config_weight(m).div(&c))
}

/// ⟨M_i⟩_{N,K}.
pub fn mean_count_given_k<W: Weight>(table: &CnkTable<W>, i: usize, k: usize) -> Result<W> {
    let n = table.n() as i64;
    if i == 0 || i as i64 > n || k == 0 || k as i64 > n {
        return Err(Error::InvalidArgument(format!(
            "size {i} or cluster count {k} outside 1..={n}"
        )));
    }
    let c = normalizer(table, k)?;
    let num = table.entry(n - i as i64, k as i64 - 1);
    Ok(table.weight(i).mul(&num).div(&c))
}

/// Means, second moments and requested covariances at fixed K.
pub fn moments_given_k<W: Weight>(
    table: &CnkTable<W>,
    k: usize,
    pairs: &[(usize, usize)],
) -> Result<MomentReport<W>> {
    let n = table.n();
    let c = normalizer(table, k)?;
    let ni = n as i64;
    let ki = k as i64;
    let mut means = Vec::with_capacity(n);
    let mut seconds = Vec::with_capacity(n);
    for i in 1..=n {
        let a = table.weight(i);
        let mean = a.mul(&table.entry(ni - i as i64, ki - 1)).div(&c);
        let square = a
            .mul(&a)
            .mul(&table.entry(ni - 2 * i as i64, ki - 2))
            .div(&c)
            .add(&mean);
        means.push(mean);
        seconds.push(square);
    }
    let mut covariances = Vec::with_capacity(pairs.len());
    for &(i, j) in pairs {
        if i == 0 || j == 0 || i > n || j > n {
            return Err(Error::InvalidArgument(format!(
                "covariance pair ({i},{j}) outside 1..={n}"
            )));
        }
        // a_i a_j C_{N-i-j,K-2}/C is the factorial moment ⟨M_i(M_j - δ_ij)⟩.
        let factorial_joint = table
            .weight(i)
            .mul(&table.weight(j))
            .mul(&table.entry(ni - i as i64 - j as i64, ki - 2))
            .div(&c);
        let joint = if i == j {
            factorial_joint.add(&means[i - 1])
        } else {
            factorial_joint
        };
        let cov = joint.sub(&means[i - 1].mul(&means[j - 1]));
        covariances.push((i, j, cov));
    }
    Ok(MomentReport {
        n,
        k: Some(k),
        means,
        second_moments: seconds,
        covariances,
    })
}

/// Σ_j j² ⟨M_j⟩_{N,K}, the size-weighted second moment entering ⟨P₂⟩.
pub fn size_squared_mean_sum<W: Weight>(table: &CnkTable<W>, k: usize) -> Result<W> {
    let n = table.n();
    let c = normalizer(table, k)?;
    let ni = n as i64;
    let mut acc = W::zero();
    for j in 1..=n {
        let mean = table
            .weight(j)
            .mul(&table.entry(ni - j as i64, k as i64 - 1))
            .div(&c);
        acc = acc.add(&W::from_u64((j * j) as u64).mul(&mean));
    }
    Ok(acc)
}

/// Marginal moments ⟨M_i⟩ = Σ_K Π_K ⟨M_i⟩_{N,K}; unreachable K (Π_K = 0)
/// are skipped rather than queried.
pub fn marginal_moments<W: Weight>(
    table: &CnkTable<W>,
    pi: &ClusterCountDistribution<W>,
    pairs: &[(usize, usize)],
) -> Result<MomentReport<W>> {
    let n = table.n();
    if pi.n() != n {
        return Err(Error::InvalidArgument(format!(
            "distribution is over N = {}, table over N = {}",
            pi.n(),
            n
        )));
    }
    let mut means = vec![W::zero(); n];
    let mut seconds = vec![W::zero(); n];
    let mut covjoint = vec![W::zero(); pairs.len()];
    for k in 1..=n {
        let w = pi.pi(k);
        if w.is_zero() {
            continue;
        }
        let conditional = moments_given_k(table, k, pairs)?;
        for i in 0..n {
            means[i] = means[i].add(&w.mul(&conditional.means[i]));
            seconds[i] = seconds[i].add(&w.mul(&conditional.second_moments[i]));
        }
        for (slot, (i, j, cov)) in covjoint.iter_mut().zip(&conditional.covariances) {
            // Re-assemble the joint moment before mixing over K.
            let joint = cov.add(&conditional.means[i - 1].mul(&conditional.means[j - 1]));
            *slot = slot.add(&w.mul(&joint));
        }
    }
    let covariances = pairs
        .iter()
        .zip(covjoint)
        .map(|(&(i, j), joint)| {
            let cov = joint.sub(&means[i - 1].mul(&means[j - 1]));
            (i, j, cov)
        })
        .collect();
    Ok(MomentReport {
        n,
        k: None,
        means,
        second_moments: seconds,
        covariances,
    })
}

/// Stationary probability that two tagged particles share a cluster:
///
/// ```text
/// ⟨P₂⟩ = Σ_K Π_K Σ_j j²⟨M_j⟩_{N,K} / (N(N-1)) - 1/(N-1)
/// ```
pub fn p2_exact<W: Weight>(table: &CnkTable<W>, pi: &ClusterCountDistribution<W>) -> Result<W> {
    let n = table.n();
    if n < 2 {
        return Err(Error::InvalidArgument("⟨P₂⟩ requires N >= 2".into()));
    }
    if pi.n() != n {
        return Err(Error::InvalidArgument(
            "cluster-count distribution built for a different N".into(),
        ));
    }
    let mut acc = W::zero();
    for k in 1..=n {
        let w = pi.pi(k);
        if w.is_zero() {
            continue;
        }
        acc = acc.add(&w.mul(&size_squared_mean_sum(table, k)?));
    }
    let pair_count = W::from_u64((n * (n - 1)) as u64);
    let correction = W::one().div(&W::from_u64((n - 1) as u64));
    Ok(acc.div(&pair_count).sub(&correction))
}

/// P₂ of a single configuration: (Σ_i i² m_i - N) / (N(N-1)).
pub fn p2_of_config<W: Weight>(m: &OccupancyPartition) -> Result<W> {
    let n = m.particle_total();
    if n < 2 {
        return Err(Error::InvalidArgument("P₂ requires N >= 2".into()));
    }
    let sq: u64 = m
        .counts()
        .iter()
        .enumerate()
        .map(|(idx, &c)| ((idx + 1) * (idx + 1)) as u64 * u64::from(c))
        .sum();
    Ok(W::from_u64(sq - n as u64).div(&W::from_u64((n * (n - 1)) as u64)))
}
