//! Birth-death chain for the number of clusters: separation/formation
//! rates, its stationary distribution and the transient solution.
//!
//! With K clusters the chain moves K → K+1 at the separation rate
//! `s_K = Σ_i d(i)⟨M_i⟩_{N,K}` and K → K-1 at the formation rate f_K. For
//! unit coagulation f_K = K(K-1)/2 (the number of cluster pairs); a size
//! bound restricts the count to mergeable pairs, expressed through the
//! factorial moments of the pair counts; any other coagulation kernel falls
//! back to an enumeration average.

use super::stats::config_probability;
use super::table::CnkTable;
use crate::error::{Error, Result};
use crate::kernels::{Kernel, KernelFamily};
use crate::numeric::Weight;
use crate::partitions::enumerate_occupancy_given_k;

/// Separation rates s_K (K = 1..N-1) and formation rates f_K (K = 2..N).
#[derive(Clone, Debug)]
pub struct RateSchedule<W: Weight> {
    n: usize,
    /// s[K-1] = s_K for K = 1..=N-1.
    s: Vec<W>,
    /// f[K-2] = f_K for K = 2..=N.
    f: Vec<W>,
    /// Smallest K with C_{N,K} > 0.
    reachable_min: usize,
}

impl<W: Weight> RateSchedule<W> {
    pub fn n(&self) -> usize {
        self.n
    }

    /// s_K, zero outside 1..=N-1 or below the reachable range.
    pub fn s_k(&self, k: usize) -> W {
        if k >= 1 && k < self.n {
            self.s[k - 1].clone()
        } else {
            W::zero()
        }
    }

    /// f_K, zero outside 2..=N.
    pub fn f_k(&self, k: usize) -> W {
        if (2..=self.n).contains(&k) {
            self.f[k - 2].clone()
        } else {
            W::zero()
        }
    }

    pub fn reachable_min(&self) -> usize {
        self.reachable_min
    }
}

/// Steady-state probabilities Π_K for K = 1..=N (dense; zero entries mark
/// unreachable cluster counts).
#[derive(Clone, Debug)]
pub struct ClusterCountDistribution<W: Weight> {
    n: usize,
    pi: Vec<W>,
}

impl<W: Weight> ClusterCountDistribution<W> {
    /// Wraps an explicit probability vector (index K-1 holds Π_K).
    pub fn from_probabilities(pi: Vec<W>) -> Result<Self> {
        if pi.is_empty() {
            return Err(Error::InvalidArgument("empty distribution".into()));
        }
        Ok(ClusterCountDistribution { n: pi.len(), pi })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pi(&self, k: usize) -> W {
        if k >= 1 && k <= self.n {
            self.pi[k - 1].clone()
        } else {
            W::zero()
        }
    }

    pub fn probabilities(&self) -> &[W] {
        &self.pi
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.pi.iter().map(Weight::to_f64).collect()
    }

    /// Mean cluster count Σ K·Π_K.
    pub fn mean(&self) -> W {
        let mut acc = W::zero();
        for (i, p) in self.pi.iter().enumerate() {
            acc = acc.add(&W::from_u64(i as u64 + 1).mul(p));
        }
        acc
    }

    /// CSV rows `K,pi` with mode-appropriate rendering.
    pub fn to_csv_rows(&self) -> Vec<(usize, String)> {
        self.pi
            .iter()
            .enumerate()
            .map(|(i, p)| (i + 1, p.render_string()))
            .collect()
    }
}

fn smallest_reachable<W: Weight>(table: &CnkTable<W>) -> Result<usize> {
    let n = table.n();
    (1..=n)
        .find(|&k| !table.entry(n as i64, k as i64).is_zero())
        .ok_or_else(|| {
            Error::DegenerateChain("no cluster count has positive weight".into())
        })
}

/// Separation and formation rates for a kernel and its table.
pub fn rate_schedule<W: Weight>(kernel: &Kernel, table: &CnkTable<W>) -> Result<RateSchedule<W>> {
    let n = table.n();
    let reachable_min = smallest_reachable(table)?;
    let ni = n as i64;

    let mut s = Vec::with_capacity(n.saturating_sub(1));
    for k in 1..n {
        if table.entry(ni, k as i64).is_zero() {
            s.push(W::zero());
            continue;
        }
        let c = table.entry(ni, k as i64);
        let mut acc = W::zero();
        for i in 2..=n {
            let d = W::from_rational(&kernel.dissociation_rat(i));
            if d.is_zero() {
                continue;
            }
            let mean_num = table.weight(i).mul(&table.entry(ni - i as i64, k as i64 - 1));
            if mean_num.is_zero() {
                continue;
            }
            acc = acc.add(&d.mul(&mean_num));
        }
        s.push(acc.div(&c));
    }

    let mut f = Vec::with_capacity(n.saturating_sub(1));
    for k in 2..=n {
        if table.entry(ni, k as i64).is_zero() {
            f.push(W::zero());
            continue;
        }
        f.push(formation_rate(kernel, table, k)?);
    }

    Ok(RateSchedule {
        n,
        s,
        f,
        reachable_min,
    })
}

fn formation_rate<W: Weight>(kernel: &Kernel, table: &CnkTable<W>, k: usize) -> Result<W> {
    let n = table.n();
    if kernel.unit_coagulation_unbounded() {
        // Every cluster pair can merge: f_K = K(K-1)/2.
        return Ok(W::ratio_u64((k * (k - 1)) as u64, 2));
    }
    match kernel.family() {
        KernelFamily::Bounded => {
            // Expected number of mergeable pairs through the pair-count
            // factorial moments: E[m_i(m_i-1)] and E[m_i m_j] are table
            // ratios, so no enumeration is needed.
            let m = kernel.max_size().expect("bounded kernel has M");
            let ni = n as i64;
            let ki = k as i64;
            let c = table.entry(ni, ki);
            let mut acc = W::zero();
            for i in 1..=m.min(n) {
                if 2 * i <= m {
                    let a = table.weight(i);
                    let term = a.mul(&a).mul(&table.entry(ni - 2 * i as i64, ki - 2));
                    acc = acc.add(&term);
                }
                for j in (i + 1)..=m.min(n) {
                    if i + j > m {
                        break;
                    }
                    let term = table
                        .weight(i)
                        .mul(&table.weight(j))
                        .mul(&table.entry(ni - (i + j) as i64, ki - 2));
                    // i < j counted once; the pair count m_i m_j needs both
                    // orders, the 1/2 below halves the same-size term.
                    acc = acc.add(&term.add(&term));
                }
            }
            Ok(acc.div(&W::from_u64(2)).div(&c))
        }
        _ => {
            // General coagulation: average the pair-sum over P'_{N,K}.
            // O(|P'_{N,K}|), subject to the enumeration cap.
            let idx = enumerate_occupancy_given_k(n, k, None)?;
            let mut acc = W::zero();
            for cfg in idx.iter() {
                if table.config_weight(cfg).is_zero() {
                    continue;
                }
                let p = config_probability(table, cfg)?;
                let mut pairs = W::zero();
                let sparse = cfg.to_sparse();
                for (ai, &(si, ci)) in sparse.iter().enumerate() {
                    let rate_same = W::from_rational(&kernel.coag_rat(si, si));
                    if !rate_same.is_zero() && ci >= 2 {
                        let count = W::from_u64(u64::from(ci) * (u64::from(ci) - 1) / 2);
                        pairs = pairs.add(&count.mul(&rate_same));
                    }
                    for &(sj, cj) in &sparse[ai + 1..] {
                        let rate = W::from_rational(&kernel.coag_rat(si, sj));
                        if !rate.is_zero() {
                            let count = W::from_u64(u64::from(ci) * u64::from(cj));
                            pairs = pairs.add(&count.mul(&rate));
                        }
                    }
                }
                acc = acc.add(&p.mul(&pairs));
            }
            Ok(acc)
        }
    }
}

/// Stationary distribution from the detailed-balance ladder
/// Π_{K+1}/Π_K = s_K / f_{K+1}, built up from the smallest reachable K and
/// normalized. In float mode the weights are log-domain, so the ladder is
/// effectively computed in log space.
pub fn steady_state_pi<W: Weight>(rates: &RateSchedule<W>) -> Result<ClusterCountDistribution<W>> {
    let n = rates.n;
    let kmin = rates.reachable_min;
    let mut unnorm = vec![W::zero(); n];
    unnorm[kmin - 1] = W::one();
    for k in kmin..n {
        let s = rates.s_k(k);
        if s.is_zero() {
            break;
        }
        let f = rates.f_k(k + 1);
        if f.is_zero() {
            return Err(Error::DegenerateChain(format!(
                "s_{k} > 0 but f_{} = 0: the ladder cannot descend",
                k + 1
            )));
        }
        unnorm[k] = unnorm[k - 1].mul(&s).div(&f);
    }
    let mut total = W::zero();
    for w in &unnorm {
        total = total.add(w);
    }
    if total.is_zero() {
        return Err(Error::DegenerateChain("all ladder weights vanish".into()));
    }
    let pi = unnorm.into_iter().map(|w| w.div(&total)).collect();
    Ok(ClusterCountDistribution { n, pi })
}

/// Integrates the birth-death master equations from `p0` for time `t` with
/// classical fourth-order fixed steps of size `dt`, then renormalizes.
pub fn transient_pi<W: Weight>(
    rates: &RateSchedule<W>,
    p0: &ClusterCountDistribution<W>,
    t: f64,
    dt: f64,
) -> Result<ClusterCountDistribution<W>> {
    let n = rates.n;
    if p0.n() != n {
        return Err(Error::InvalidArgument(
            "initial distribution length differs from the rate schedule".into(),
        ));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument("dt must be positive".into()));
    }
    if t < 0.0 {
        return Err(Error::InvalidArgument("t must be non-negative".into()));
    }
    let s: Vec<f64> = (1..=n).map(|k| rates.s_k(k).to_f64()).collect();
    let f: Vec<f64> = (1..=n).map(|k| rates.f_k(k).to_f64()).collect();
    let max_rate = (1..=n)
        .map(|k| s[k - 1] + f[k - 1])
        .fold(0.0f64, f64::max);
    if dt * max_rate > 1.0 {
        return Err(Error::InvalidArgument(format!(
            "dt = {dt} is unstable for max(f_K + s_K) = {max_rate}; use dt <= {}",
            0.1 / max_rate
        )));
    }

    // dP_K/dt = -(f_K + s_K) P_K + f_{K+1} P_{K+1} + s_{K-1} P_{K-1},
    // with s_N = 0 and f_1 = 0 absorbed by the rate accessors.
    let deriv = |p: &[f64], out: &mut [f64]| {
        for k in 1..=n {
            let mut acc = -(f[k - 1] + s[k - 1]) * p[k - 1];
            if k < n {
                acc += f[k] * p[k];
            }
            if k > 1 {
                acc += s[k - 2] * p[k - 2];
            }
            out[k - 1] = acc;
        }
    };

    let mut p: Vec<f64> = p0.probabilities().iter().map(Weight::to_f64).collect();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];

    let mut remaining = t;
    while remaining > 0.0 {
        let h = dt.min(remaining);
        deriv(&p, &mut k1);
        for i in 0..n {
            tmp[i] = p[i] + 0.5 * h * k1[i];
        }
        deriv(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = p[i] + 0.5 * h * k2[i];
        }
        deriv(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = p[i] + h * k3[i];
        }
        deriv(&tmp, &mut k4);
        for i in 0..n {
            p[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        remaining -= h;
    }

    let total: f64 = p.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::Overflow("transient solution lost normalization".into()));
    }
    let pi = p.into_iter().map(|x| W::from_f64(x / total)).collect();
    Ok(ClusterCountDistribution { n, pi })
}

/// Suggested stable step for [`transient_pi`]: 0.1 / max_K(f_K + s_K).
pub fn default_transient_dt<W: Weight>(rates: &RateSchedule<W>) -> f64 {
    let n = rates.n;
    let max_rate = (1..=n)
        .map(|k| rates.s_k(k).to_f64() + rates.f_k(k).to_f64())
        .fold(0.0f64, f64::max);
    if max_rate > 0.0 {
        0.1 / max_rate
    } else {
        0.1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::table::{compute_cnk, CnkMethod};
    use crate::numeric::LogFloat;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn schedule(kernel: &Kernel, n: usize) -> RateSchedule<BigRational> {
        let t = compute_cnk(kernel, n, CnkMethod::Recurrence).unwrap();
        rate_schedule(kernel, &t).unwrap()
    }

    #[test]
    fn constant_kernel_rates_match_closed_forms() {
        let a = rat(3, 4);
        let kernel = Kernel::constant(a.clone()).unwrap();
        let n = 10;
        let rates = schedule(&kernel, n);
        for k in 1..n {
            // s_K = (N-K)a
            assert_eq!(
                rates.s_k(k),
                &a * BigRational::from_integer(((n - k) as i64).into()),
                "K = {k}"
            );
        }
        for k in 2..=n {
            assert_eq!(rates.f_k(k), rat((k * (k - 1)) as i64, 2), "K = {k}");
        }
        assert_eq!(rates.f_k(3), rat(3, 1));
    }

    #[test]
    fn s1_is_total_dissociation_of_the_full_cluster() {
        let kernel = Kernel::linear(rat(2, 1)).unwrap();
        let n = 8;
        let rates = schedule(&kernel, n);
        // s₁ = d(N) = a(N²-1)/6
        assert_eq!(rates.s_k(1), kernel.dissociation_rat(n));
        assert_eq!(rates.s_k(1), rat(2, 1) * rat((n * n - 1) as i64, 6));
    }

    #[test]
    fn bounded_formation_matches_enumeration_average() {
        let kernel = Kernel::bounded(rat(1, 2), 4).unwrap();
        let n = 9;
        let t = compute_cnk::<BigRational>(&kernel, n, CnkMethod::Recurrence).unwrap();
        let rates = rate_schedule(&kernel, &t).unwrap();
        for k in 3..=n {
            // Enumeration average of the mergeable-pair count.
            let idx = enumerate_occupancy_given_k(n, k, None).unwrap();
            let mut expected = BigRational::zero();
            for cfg in idx.iter() {
                if t.config_weight(cfg).is_zero() {
                    continue;
                }
                let p = config_probability(&t, cfg).unwrap();
                let mut pairs = BigRational::zero();
                for i in 1..=n {
                    for j in i..=n {
                        if kernel.coag_rat(i, j).is_zero() {
                            continue;
                        }
                        let count = if i == j {
                            (u64::from(cfg.count(i)) * (u64::from(cfg.count(i)).saturating_sub(1))) / 2
                        } else {
                            u64::from(cfg.count(i)) * u64::from(cfg.count(j))
                        };
                        pairs += BigRational::from_integer(count.into());
                    }
                }
                expected += p * pairs;
            }
            assert_eq!(rates.f_k(k), expected, "K = {k}");
        }
    }

    #[test]
    fn steady_state_n2_and_n3() {
        for a in [rat(1, 2), rat(1, 1), rat(5, 1)] {
            let kernel = Kernel::constant(a.clone()).unwrap();
            let rates = schedule(&kernel, 2);
            let pi = steady_state_pi(&rates).unwrap();
            let one = BigRational::from_integer(1.into());
            assert_eq!(pi.pi(1), &one / (&one + &a));
            assert_eq!(pi.pi(2), &a / (&one + &a));
        }
        let kernel = Kernel::constant(rat(1, 1)).unwrap();
        let pi = steady_state_pi(&schedule(&kernel, 3)).unwrap();
        assert_eq!(pi.pi(1), rat(3, 11));
        assert_eq!(pi.pi(2), rat(6, 11));
        assert_eq!(pi.pi(3), rat(2, 11));
    }

    #[test]
    fn constant_ladder_closed_form() {
        // Π_{K+1} = (2a)^K (N-1)! / (K!(K+1)!(N-K-1)!) Π₁
        use crate::numeric::factorial;
        let a = rat(2, 3);
        let kernel = Kernel::constant(a.clone()).unwrap();
        let n = 12;
        let pi = steady_state_pi(&schedule(&kernel, n)).unwrap();
        for k in 1..n {
            let mut pw = BigRational::from_integer(1.into());
            for _ in 0..k {
                pw *= rat(2, 1) * &a;
            }
            let expected = pw * BigRational::from_integer(factorial(n - 1))
                / BigRational::from_integer(factorial(k))
                / BigRational::from_integer(factorial(k + 1))
                / BigRational::from_integer(factorial(n - k - 1))
                * pi.pi(1);
            assert_eq!(pi.pi(k + 1), expected, "K = {k}");
        }
    }

    #[test]
    fn bounded_small_a_concentrates_on_minimal_k() {
        let kernel = Kernel::bounded(rat(1, 1_000_000), 4).unwrap();
        let n = 9;
        let t = compute_cnk::<LogFloat>(&kernel, n, CnkMethod::Recurrence).unwrap();
        let rates = rate_schedule(&kernel, &t).unwrap();
        let pi = steady_state_pi(&rates).unwrap();
        assert_eq!(rates.reachable_min(), 3);
        assert!(pi.pi(3).to_f64() > 0.999_99);
        assert!(pi.pi(1).is_zero());
        assert!(pi.pi(2).is_zero());
    }

    #[test]
    fn zero_rate_kernel_reports_degenerate_chain() {
        let kernel = Kernel::constant(rat(0, 1)).unwrap();
        let t = compute_cnk::<BigRational>(&kernel, 4, CnkMethod::Recurrence).unwrap();
        assert!(matches!(
            rate_schedule(&kernel, &t),
            Err(Error::DegenerateChain(_))
        ));
    }

    #[test]
    fn transient_t0_returns_p0() {
        let kernel = Kernel::constant(rat(1, 1)).unwrap();
        let rates = schedule(&kernel, 4);
        let p0 = ClusterCountDistribution::from_probabilities(vec![
            rat(1, 4),
            rat(1, 4),
            rat(1, 4),
            rat(1, 4),
        ])
        .unwrap();
        let out = transient_pi(&rates, &p0, 0.0, 0.01).unwrap();
        for k in 1..=4 {
            assert!((out.pi(k).to_f64() - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn transient_fixed_point_is_preserved() {
        let kernel = Kernel::constant(rat(2, 1)).unwrap();
        let rates = schedule(&kernel, 5);
        let pi = steady_state_pi(&rates).unwrap();
        let dt = default_transient_dt(&rates);
        let out = transient_pi(&rates, &pi, 7.5, dt).unwrap();
        for k in 1..=5 {
            assert!(
                (out.pi(k).to_f64() - pi.pi(k).to_f64()).abs() < 1e-10,
                "K = {k}"
            );
        }
    }

    #[test]
    fn transient_relaxes_to_steady_state() {
        let kernel = Kernel::constant(rat(1, 1)).unwrap();
        let rates = schedule(&kernel, 3);
        let mut start = vec![BigRational::zero(); 3];
        start[2] = BigRational::from_integer(1.into());
        let p0 = ClusterCountDistribution::from_probabilities(start).unwrap();
        let dt = default_transient_dt(&rates);
        let out = transient_pi(&rates, &p0, 50.0, dt).unwrap();
        let expected = [3.0 / 11.0, 6.0 / 11.0, 2.0 / 11.0];
        for k in 1..=3 {
            assert!(
                (out.pi(k).to_f64() - expected[k - 1]).abs() < 1e-8,
                "K = {k}: {} vs {}",
                out.pi(k).to_f64(),
                expected[k - 1]
            );
        }
    }

    #[test]
    fn transient_rejects_unstable_dt() {
        let kernel = Kernel::constant(rat(1, 1)).unwrap();
        let rates = schedule(&kernel, 6);
        let pi = steady_state_pi(&rates).unwrap();
        let err = transient_pi(&rates, &pi, 1.0, 10.0).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
        assert!(err.to_string().contains("use dt <="));
    }
}
