//! The simulator against the analytic pipeline: time-averaged statistics
//! and episode means must agree within sampling error. Seeds are frozen so
//! these run as regression tests rather than statistical gambles.

use cfp_core::exact::{self, CnkMethod};
use cfp_core::kernels::Kernel;
use cfp_core::numeric::Weight;
use cfp_core::pairtimes;
use cfp_core::simulate::{estimate_pair_times, run_ssa, SimConfig};
use num_bigint::BigInt;
use num_rational::BigRational;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn exact_reference(kernel: &Kernel, n: usize) -> (Vec<f64>, Vec<f64>, f64) {
    let table = exact::compute_cnk::<BigRational>(kernel, n, CnkMethod::Recurrence).unwrap();
    let rates = exact::rate_schedule(kernel, &table).unwrap();
    let pi = exact::steady_state_pi(&rates).unwrap();
    let moments = exact::marginal_moments(&table, &pi, &[]).unwrap();
    let p2 = exact::p2_exact(&table, &pi).unwrap();
    (
        (1..=n).map(|k| pi.pi(k).to_f64()).collect(),
        moments.means.iter().map(Weight::to_f64).collect(),
        p2.to_f64(),
    )
}

#[test]
fn empirical_statistics_match_exact_for_builtin_kernels() {
    let cases = [
        (Kernel::constant(rat(1, 1)).unwrap(), 8, 30_000.0),
        (Kernel::linear(rat(1, 2)).unwrap(), 7, 30_000.0),
        (Kernel::bounded(rat(1, 1), 3).unwrap(), 8, 30_000.0),
    ];
    for (kernel, n, t_end) in cases {
        let (pi_ref, m_ref, p2_ref) = exact_reference(&kernel, n);
        let config = SimConfig {
            replicas: 8,
            burn_in: t_end / 100.0,
            track_pair: true,
            ..SimConfig::new(n, t_end, 2026)
        };
        let (stats, _) = run_ssa(&kernel, &config).unwrap();
        for k in 1..=n {
            let est = &stats.pi[k - 1];
            // Unreached counts have zero estimate and zero error.
            if pi_ref[k - 1] < 1e-12 && est.value == 0.0 {
                continue;
            }
            assert!(
                est.z_score(pi_ref[k - 1]) < 3.5,
                "{:?} Π_{k}: {} ± {} vs {}",
                kernel.family(),
                est.value,
                est.std_error,
                pi_ref[k - 1]
            );
        }
        for i in 1..=n {
            let est = &stats.mean_counts[i - 1];
            if m_ref[i - 1] < 1e-12 && est.value == 0.0 {
                continue;
            }
            assert!(
                est.z_score(m_ref[i - 1]) < 3.5,
                "{:?} ⟨M_{i}⟩: {} ± {} vs {}",
                kernel.family(),
                est.value,
                est.std_error,
                m_ref[i - 1]
            );
        }
        let p2 = stats.p2.as_ref().unwrap();
        assert!(
            p2.z_score(p2_ref) < 3.5,
            "{:?} ⟨P₂⟩: {} ± {} vs {}",
            kernel.family(),
            p2.value,
            p2.std_error,
            p2_ref
        );
    }
}

#[test]
fn episode_means_match_absorbing_chain_times() {
    // Mean together/apart episode durations against T_S and T_R, N <= 8,
    // well over 1e5 episodes pooled across replicas.
    let cases = [
        (Kernel::constant(rat(1, 1)).unwrap(), 6),
        (Kernel::linear(rat(1, 1)).unwrap(), 5),
        (Kernel::bounded(rat(1, 2), 4).unwrap(), 8),
    ];
    for (kernel, n) in cases {
        let reference = pairtimes::pair_times(&kernel, n).unwrap();
        let config = SimConfig {
            replicas: 8,
            burn_in: 500.0,
            track_pair: true,
            ..SimConfig::new(n, 100_000.0, 99)
        };
        let (stats, _) = run_ssa(&kernel, &config).unwrap();
        let episodes = stats.episodes.as_ref().unwrap();
        assert!(
            episodes.together_episodes > 100_000,
            "only {} together episodes",
            episodes.together_episodes
        );
        assert!(
            episodes.mean_together.z_score(reference.t_s) < 3.5,
            "{:?} T_S: {} ± {} vs {}",
            kernel.family(),
            episodes.mean_together.value,
            episodes.mean_together.std_error,
            reference.t_s
        );
        assert!(
            episodes.mean_apart.z_score(reference.t_r) < 3.5,
            "{:?} T_R: {} ± {} vs {}",
            kernel.family(),
            episodes.mean_apart.value,
            episodes.mean_apart.std_error,
            reference.t_r
        );
        let (ts_hat, tr_hat, p2_hat) = estimate_pair_times(&stats).unwrap();
        // Renewal-reward consistency between the two empirical estimators.
        let ratio = ts_hat / (ts_hat + tr_hat);
        assert!((ratio - p2_hat).abs() < 0.01, "{ratio} vs {p2_hat}");
    }
}

#[test]
fn nucleation_frequencies_at_small_a() {
    // Bounded kernel, N = 9, M = 4, tiny a: conditional configuration
    // frequencies at K = 3 approach 3/10, 6/10, 1/10.
    let kernel = Kernel::bounded(rat(1, 100_000), 4).unwrap();
    let config = SimConfig {
        replicas: 8,
        burn_in: 2_000_000.0,
        ..SimConfig::new(9, 100_000_000.0, 17)
    };
    let (stats, _) = run_ssa(&kernel, &config).unwrap();
    let limit = exact::nucleation_limit(9, 4).unwrap();
    let k3_total: f64 = stats.pi[2].value;
    assert!(k3_total > 0.99, "K=3 occupancy only {k3_total}");
    for (m, p) in &limit.configs {
        let sparse = m.to_sparse();
        let entry = stats
            .config_frequencies
            .iter()
            .find(|(key, _)| key == &sparse)
            .unwrap_or_else(|| panic!("configuration {sparse:?} never visited"));
        let conditional = entry.1.value / k3_total;
        let expected = p.to_f64();
        // Conditional-frequency error bars: scale the absolute estimate's
        // error by the occupancy of K = 3 (close to one here).
        let se = (entry.1.std_error / k3_total).max(1e-4);
        assert!(
            (conditional - expected).abs() < 3.5 * se,
            "{sparse:?}: {conditional} vs {expected} (se {se})"
        );
    }
}
