//! Triangular table of normalization constants C_{N,K}.
//!
//! C_{n,k} sums Π a_i^{m_i}/m_i! over the occupancy partitions of n with
//! exactly k parts. Two construction routes are kept deliberately
//! independent: the induction
//!
//! ```text
//! n · C_{n,k} = Σ_{j=1}^{n-k+1} j · a_j · C_{n-j,k-1},    C_{0,0} = 1,
//! ```
//!
//! and direct summation over enumerated partitions. Rational-mode equality
//! of the two is the oracle every downstream statistic rests on.

use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::numeric::{NumericMode, Weight};
use crate::partitions::{enumerate_occupancy, OccupancyPartition};

/// How a table was filled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CnkMethod {
    /// Generating-function induction from C_{0,0} = 1.
    Recurrence,
    /// Direct summation over enumerated partitions (the oracle route).
    Enumeration,
}

/// Triangular table C_{n,k} for 0 <= k <= n <= N together with the kernel
/// weights it was built from.
#[derive(Clone, Debug)]
pub struct CnkTable<W: Weight> {
    n: usize,
    /// rows[m][k] = C_{m,k}; rows[0] = [1].
    rows: Vec<Vec<W>>,
    /// weights[i-1] = a_i for i = 1..=n.
    weights: Vec<W>,
    method: CnkMethod,
}

impl<W: Weight> CnkTable<W> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> NumericMode {
        W::MODE
    }

    pub fn method(&self) -> CnkMethod {
        self.method
    }

    /// a_i for i = 1..=n (zero outside).
    pub fn weight(&self, i: usize) -> W {
        if i == 0 || i > self.n {
            W::zero()
        } else {
            self.weights[i - 1].clone()
        }
    }

    /// C_{n,k} with the boundary conventions that make the moment formulas
    /// uniformly valid: zero when k > n, n < 0 or k < 1, except C_{0,0} = 1.
    pub fn entry(&self, n: i64, k: i64) -> W {
        if n == 0 && k == 0 {
            return W::one();
        }
        if n < 0 || k < 1 || k > n {
            return W::zero();
        }
        self.rows[n as usize][k as usize].clone()
    }

    /// Π a_i^{m_i} / m_i! for a configuration, the unnormalized weight.
    pub fn config_weight(&self, m: &OccupancyPartition) -> W {
        let mut acc = W::one();
        for (idx, &count) in m.counts().iter().enumerate() {
            if count == 0 {
                continue;
            }
            let a = self.weight(idx + 1);
            for c in 0..count {
                acc = acc.mul(&a).div(&W::from_u64(u64::from(c) + 1));
            }
        }
        acc
    }

    /// Serializes the triangle as JSON with mode-appropriate entries.
    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<Vec<serde_json::Value>> = (1..=self.n)
            .map(|m| (1..=m).map(|k| self.rows[m][k].render_json()).collect())
            .collect();
        serde_json::json!({
            "n": self.n,
            "numeric_mode": match W::MODE {
                NumericMode::Rational => "rational",
                NumericMode::Float => "float",
            },
            "rows": entries,
        })
    }
}

fn kernel_weights<W: Weight>(kernel: &Kernel, n: usize) -> Vec<W> {
    (1..=n).map(|i| kernel.weight_w(i)).collect()
}

/// Builds the table for a kernel.
pub fn compute_cnk<W: Weight>(kernel: &Kernel, n: usize, method: CnkMethod) -> Result<CnkTable<W>> {
    if n == 0 {
        return Err(Error::InvalidArgument("table requires N >= 1".into()));
    }
    let weights = kernel_weights::<W>(kernel, n);
    let rows = match method {
        CnkMethod::Recurrence => fill_recurrence(&weights, n),
        CnkMethod::Enumeration => fill_enumeration(&weights, n)?,
    };
    let table = CnkTable {
        n,
        rows,
        weights,
        method,
    };
    if W::MODE == NumericMode::Float {
        for m in 0..=n {
            for k in 0..=m {
                if !table.rows[m][k].is_finite_repr() {
                    return Err(Error::Overflow(format!(
                        "C_{{{m},{k}}} left the floating range; rerun in rational mode"
                    )));
                }
            }
        }
    }
    Ok(table)
}

fn fill_recurrence<W: Weight>(weights: &[W], n: usize) -> Vec<Vec<W>> {
    let mut rows: Vec<Vec<W>> = Vec::with_capacity(n + 1);
    rows.push(vec![W::one()]);
    for m in 1..=n {
        let mut row = vec![W::zero(); m + 1];
        for (k, slot) in row.iter_mut().enumerate().skip(1) {
            let mut acc = W::zero();
            // j·a_j·C_{m-j,k-1}; C_{m-j,k-1} vanishes for j > m-k+1.
            for j in 1..=(m - k + 1) {
                let prev = if m - j == 0 {
                    if k == 1 {
                        W::one()
                    } else {
                        W::zero()
                    }
                } else if k - 1 >= 1 && k - 1 <= m - j {
                    rows[m - j][k - 1].clone()
                } else {
                    W::zero()
                };
                if prev.is_zero() {
                    continue;
                }
                let term = W::from_u64(j as u64).mul(&weights[j - 1]).mul(&prev);
                acc = acc.add(&term);
            }
            *slot = acc.div(&W::from_u64(m as u64));
        }
        rows.push(row);
    }
    rows
}

fn fill_enumeration<W: Weight>(weights: &[W], n: usize) -> Result<Vec<Vec<W>>> {
    let mut rows: Vec<Vec<W>> = Vec::with_capacity(n + 1);
    rows.push(vec![W::one()]);
    for m in 1..=n {
        let mut row = vec![W::zero(); m + 1];
        let index = enumerate_occupancy(m, None)?;
        for p in index.iter() {
            let k = p.cluster_count();
            let mut w = W::one();
            let mut vanished = false;
            for (idx, &count) in p.counts().iter().enumerate() {
                if count == 0 {
                    continue;
                }
                let a = &weights[idx];
                if a.is_zero() {
                    vanished = true;
                    break;
                }
                for c in 0..count {
                    w = w.mul(a).div(&W::from_u64(u64::from(c) + 1));
                }
            }
            if !vanished {
                row[k] = row[k].add(&w);
            }
        }
        rows.push(row);
    }
    Ok(rows)
}
