//! Event-driven exact simulation of the finite-N coagulation-fragmentation
//! chain, with optional tagged-pair tracking.
//!
//! The direct method: the total propensity is R = Σ_pairs C(s_i, s_j) +
//! Σ_clusters d(s_i); waiting times are exponential with rate R; the event
//! is chosen proportionally to its propensity. A fragmenting cluster of
//! size s picks the ordered split i with probability F(i, s-i)/d(s), and
//! marked particles follow a uniformly chosen bipartition, which is exactly
//! the exchangeable dynamics the analytic modules assume.
//!
//! Replicas run on decorrelated ChaCha12 streams,
//! `replica_seed = splitmix64(seed + replica_index · 0x9E3779B97F4A7C15)`,
//! and aggregate with across-replica standard errors.

use std::collections::BTreeMap;

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::numeric::CompensatedSum;
use crate::partitions::OccupancyPartition;

/// RNG algorithm identifier recorded in the output metadata.
pub const RNG_ALGORITHM: &str = "chacha12";
/// Stream derivation recorded in the output metadata.
pub const STREAM_DERIVATION: &str =
    "replica_seed = splitmix64(seed + replica_index * 0x9e3779b97f4a7c15)";

/// Configurations are tallied per visited state only up to this N.
const CONFIG_TALLY_MAX_N: usize = 30;

/// Starting configuration of a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InitialCondition {
    /// N clusters of size one (the default).
    AllSingletons,
    /// One cluster holding all N particles.
    SingleCluster,
    /// An explicit configuration.
    Given(OccupancyPartition),
}

/// Simulation parameters.
#[derive(Clone, Debug)]
pub struct SimConfig {
    pub n: usize,
    pub t_end: f64,
    pub burn_in: f64,
    pub seed: u64,
    pub replicas: usize,
    pub track_pair: bool,
    pub initial: InitialCondition,
    /// Keep the full event trace (memory grows with the event count).
    pub record_events: bool,
}

impl SimConfig {
    pub fn new(n: usize, t_end: f64, seed: u64) -> Self {
        SimConfig {
            n,
            t_end,
            burn_in: 0.0,
            seed,
            replicas: 1,
            track_pair: false,
            initial: InitialCondition::AllSingletons,
            record_events: false,
        }
    }
}

/// A mean with its across-replica standard error.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    fn from_samples(samples: &[f64]) -> Estimate {
        let r = samples.len();
        let mean = samples.iter().sum::<f64>() / r as f64;
        let std_error = if r >= 2 {
            let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>()
                / (r as f64 - 1.0);
            (var / r as f64).sqrt()
        } else {
            0.0
        };
        Estimate { value: mean, std_error }
    }

    /// |value - reference| in units of the standard error (infinite when
    /// the error is zero and the values differ).
    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = (self.value - reference).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_error
        }
    }
}

/// Together/apart episode statistics of the tagged pair.
#[derive(Clone, Debug, Serialize)]
pub struct EpisodeStats {
    pub mean_together: Estimate,
    pub mean_apart: Estimate,
    pub together_episodes: u64,
    pub apart_episodes: u64,
}

/// One logged event.
#[derive(Clone, Debug, Serialize)]
pub struct EventRecord {
    pub time: f64,
    /// "coagulation" or "fragmentation".
    pub kind: &'static str,
    pub size_a: usize,
    pub size_b: usize,
}

/// Net flux imbalance data for a size pair (i, j), i <= j.
#[derive(Clone, Debug, Serialize)]
pub struct PairFlux {
    pub i: usize,
    pub j: usize,
    pub coagulations: u64,
    pub fragmentations: u64,
}

/// Aggregated time-averaged statistics.
#[derive(Clone, Debug, Serialize)]
pub struct SimStats {
    pub n: usize,
    pub replicas: usize,
    pub t_end: f64,
    pub burn_in: f64,
    pub seed: u64,
    pub rng_algorithm: &'static str,
    pub stream_derivation: &'static str,
    pub kernel_spec_hash: String,
    pub mean_cluster_count: Estimate,
    /// Time-averaged ⟨M_i⟩, i = 1..=N.
    pub mean_counts: Vec<Estimate>,
    /// Empirical Π_K, K = 1..=N.
    pub pi: Vec<Estimate>,
    /// Fraction of time the tagged pair shares a cluster.
    pub p2: Option<Estimate>,
    pub episodes: Option<EpisodeStats>,
    /// Occupancy fractions of visited configurations (sparse encodings),
    /// recorded for N <= 30.
    pub config_frequencies: Vec<(Vec<(usize, u32)>, Estimate)>,
    /// Event counts per size pair, for reversibility checks.
    pub flux: Vec<PairFlux>,
    /// Replicas that froze in an absorbing configuration before t_end.
    pub early_stops: usize,
    pub events_total: u64,
}

/// splitmix64 step, the documented replica-stream hash.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn replica_seed(seed: u64, replica: usize) -> u64 {
    splitmix64(seed.wrapping_add((replica as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

fn uniform_open(rng: &mut ChaCha12Rng) -> f64 {
    // (0, 1]: exactly zero would break the exponential draw.
    (((rng.next_u64() >> 11) + 1) as f64) * (1.0 / 9_007_199_254_740_992.0)
}

fn uniform_half_open(rng: &mut ChaCha12Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64) * (1.0 / 9_007_199_254_740_992.0)
}

/// Memoized kernel rates for the hot loop.
struct Rates {
    coag: Vec<Vec<f64>>,
    dissociation: Vec<f64>,
    /// split_cdf[s][i-1] = Σ_{k<=i} F(k, s-k), for s = 0..=n.
    split_cdf: Vec<Vec<f64>>,
}

impl Rates {
    fn new(kernel: &Kernel, n: usize) -> Self {
        let coag = (1..=n)
            .map(|i| (1..=n).map(|j| kernel.coag(i, j)).collect())
            .collect();
        let dissociation = (0..=n).map(|s| kernel.dissociation(s)).collect();
        let split_cdf = (0..=n)
            .map(|s| {
                let mut acc = 0.0;
                (1..s)
                    .map(|i| {
                        acc += kernel.frag(i, s - i);
                        acc
                    })
                    .collect()
            })
            .collect();
        Rates {
            coag,
            dissociation,
            split_cdf,
        }
    }

    fn c(&self, i: usize, j: usize) -> f64 {
        self.coag[i - 1][j - 1]
    }

    fn d(&self, s: usize) -> f64 {
        self.dissociation[s]
    }
}

struct ReplicaOutcome {
    pi_time: Vec<f64>,
    m_time: Vec<f64>,
    mean_k_time: f64,
    together_time: f64,
    together_sum: f64,
    together_count: u64,
    apart_sum: f64,
    apart_count: u64,
    config_time: BTreeMap<Vec<u32>, f64>,
    coag_counts: Vec<Vec<u64>>,
    frag_counts: Vec<Vec<u64>>,
    early_stopped: bool,
    events: u64,
    log: Vec<EventRecord>,
}

struct Replica<'a> {
    n: usize,
    rates: &'a Rates,
    clusters: Vec<usize>,
    mark1: usize,
    mark2: usize,
    track: bool,
    rng: ChaCha12Rng,
}

impl<'a> Replica<'a> {
    fn total_propensity(&self) -> (f64, f64) {
        let k = self.clusters.len();
        let mut coag = 0.0;
        for i in 0..k {
            for j in (i + 1)..k {
                coag += self.rates.c(self.clusters[i], self.clusters[j]);
            }
        }
        let frag: f64 = self.clusters.iter().map(|&s| self.rates.d(s)).sum();
        (coag, frag)
    }

    fn occupancy_key(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.n];
        for &s in &self.clusters {
            counts[s - 1] += 1;
        }
        counts
    }

    fn together(&self) -> bool {
        self.mark1 == self.mark2
    }

    /// Applies a coagulation of cluster indices (c1, c2). Returns the
    /// merged pair of sizes (small, large).
    fn coagulate(&mut self, c1: usize, c2: usize) -> (usize, usize) {
        let (lo, hi) = if c1 < c2 { (c1, c2) } else { (c2, c1) };
        let s1 = self.clusters[lo];
        let s2 = self.clusters[hi];
        self.clusters[lo] = s1 + s2;
        self.clusters.swap_remove(hi);
        if self.track {
            let moved = self.clusters.len(); // old index of the swapped-in tail
            for mark in [&mut self.mark1, &mut self.mark2] {
                if *mark == hi {
                    *mark = lo;
                } else if *mark == moved {
                    *mark = hi;
                }
            }
        }
        (s1.min(s2), s1.max(s2))
    }

    /// Applies a fragmentation of cluster index `c` into (i, s-i). Returns
    /// the fragment sizes (small, large).
    fn fragment(&mut self, c: usize, i: usize) -> (usize, usize) {
        let s = self.clusters[c];
        let rest = s - i;
        self.clusters[c] = i;
        self.clusters.push(rest);
        if self.track {
            let new_index = self.clusters.len() - 1;
            let both_here = self.mark1 == c && self.mark2 == c;
            if both_here {
                // Uniform bipartition: hypergeometric placement of the two
                // marks into the i-fragment.
                let u = uniform_half_open(&mut self.rng);
                let slots = (s * (s - 1)) as f64;
                let p_both_i = (i * (i - 1)) as f64 / slots;
                let p_both_rest = (rest * (rest - 1)) as f64 / slots;
                if u < p_both_i {
                    // both marks stay at c
                } else if u < p_both_i + p_both_rest {
                    self.mark1 = new_index;
                    self.mark2 = new_index;
                } else {
                    // Separated: by exchangeability each assignment is
                    // equally likely.
                    if uniform_half_open(&mut self.rng) < 0.5 {
                        self.mark2 = new_index;
                    } else {
                        self.mark1 = new_index;
                    }
                }
            } else {
                for mark in [&mut self.mark1, &mut self.mark2] {
                    if *mark == c && uniform_half_open(&mut self.rng) >= i as f64 / s as f64 {
                        *mark = new_index;
                    }
                }
            }
        }
        (i.min(rest), i.max(rest))
    }

    /// Picks and applies one event; returns (kind, sizes).
    fn step(&mut self, coag_total: f64, frag_total: f64) -> (&'static str, (usize, usize)) {
        let total = coag_total + frag_total;
        let mut target = uniform_half_open(&mut self.rng) * total;
        if target < coag_total {
            let k = self.clusters.len();
            for i in 0..k {
                for j in (i + 1)..k {
                    let r = self.rates.c(self.clusters[i], self.clusters[j]);
                    if target < r {
                        return ("coagulation", self.coagulate(i, j));
                    }
                    target -= r;
                }
            }
            // Floating leftovers land on the last pair.
            return ("coagulation", self.coagulate(k - 2, k - 1));
        }
        target -= coag_total;
        let mut chosen = None;
        let mut last_fragmentable = None;
        for (c, &s) in self.clusters.iter().enumerate() {
            let d = self.rates.d(s);
            if d > 0.0 {
                last_fragmentable = Some(c);
                if target < d {
                    chosen = Some(c);
                    break;
                }
                target -= d;
            }
        }
        // Floating leftovers land on the last fragmentable cluster.
        let chosen = chosen
            .or(last_fragmentable)
            .expect("fragmentation branch requires positive propensity");
        let s = self.clusters[chosen];
        let cdf = &self.rates.split_cdf[s];
        let total_d = self.rates.d(s);
        let u = uniform_half_open(&mut self.rng) * total_d;
        let mut i = match cdf.binary_search_by(|x| x.total_cmp(&u)) {
            Ok(pos) | Err(pos) => pos + 1,
        };
        if i > s - 1 {
            i = s - 1;
        }
        ("fragmentation", self.fragment(chosen, i))
    }
}

fn initial_clusters(config: &SimConfig) -> Result<Vec<usize>> {
    match &config.initial {
        InitialCondition::AllSingletons => Ok(vec![1; config.n]),
        InitialCondition::SingleCluster => Ok(vec![config.n]),
        InitialCondition::Given(m) => {
            if m.particle_total() != config.n {
                return Err(Error::InvalidArgument(format!(
                    "initial configuration holds {} particles, expected {}",
                    m.particle_total(),
                    config.n
                )));
            }
            Ok(m.to_sizes().parts().to_vec())
        }
    }
}

fn run_replica(
    kernel_rates: &Rates,
    config: &SimConfig,
    replica: usize,
) -> Result<ReplicaOutcome> {
    let n = config.n;
    let mut rng = ChaCha12Rng::seed_from_u64(replica_seed(config.seed, replica));
    let clusters = initial_clusters(config)?;

    // Tag two particles uniformly: host clusters size-biased without
    // replacement.
    let (mark1, mark2) = if config.track_pair {
        let mut pick = |exclude: Option<(usize, usize)>| {
            let mut weights: Vec<f64> = clusters.iter().map(|&s| s as f64).collect();
            if let Some((idx, used)) = exclude {
                weights[idx] -= used as f64;
            }
            let total: f64 = weights.iter().sum();
            let mut u = uniform_half_open(&mut rng) * total;
            for (i, w) in weights.iter().enumerate() {
                if u < *w {
                    return i;
                }
                u -= w;
            }
            weights.len() - 1
        };
        let first = pick(None);
        let second = pick(Some((first, 1)));
        (first, second)
    } else {
        (0, 0)
    };

    let mut rep = Replica {
        n,
        rates: kernel_rates,
        clusters,
        mark1,
        mark2,
        track: config.track_pair,
        rng,
    };

    let tally_configs = n <= CONFIG_TALLY_MAX_N;
    let mut pi_time: Vec<CompensatedSum> = vec![CompensatedSum::new(); n];
    let mut m_time: Vec<CompensatedSum> = vec![CompensatedSum::new(); n];
    let mut mean_k_time = CompensatedSum::new();
    let mut together_time = CompensatedSum::new();
    let mut config_time: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    let mut coag_counts = vec![vec![0u64; n]; n];
    let mut frag_counts = vec![vec![0u64; n]; n];
    let mut log = Vec::new();

    let mut together_sum = 0.0;
    let mut together_count = 0u64;
    let mut apart_sum = 0.0;
    let mut apart_count = 0u64;
    let mut episode_start: Option<f64> = None;
    let mut status = rep.together();

    let mut t = 0.0f64;
    let mut events = 0u64;
    let mut early_stopped = false;

    loop {
        let (coag_total, frag_total) = rep.total_propensity();
        let total = coag_total + frag_total;

        let t_next = if total > 0.0 {
            t + (-uniform_open(&mut rep.rng).ln()) / total
        } else {
            f64::INFINITY
        };

        // Accumulate the segment [t, min(t_next, t_end)) ∩ [burn_in, t_end).
        let seg_lo = t.max(config.burn_in);
        let seg_hi = t_next.min(config.t_end);
        if seg_hi > seg_lo {
            let dt = seg_hi - seg_lo;
            let k = rep.clusters.len();
            pi_time[k - 1].add(dt);
            mean_k_time.add(k as f64 * dt);
            for &s in &rep.clusters {
                m_time[s - 1].add(dt);
            }
            if config.track_pair && rep.together() {
                together_time.add(dt);
            }
            if tally_configs {
                *config_time.entry(rep.occupancy_key()).or_insert(0.0) += dt;
            }
        }

        if total == 0.0 {
            early_stopped = true;
            break;
        }
        if t_next >= config.t_end {
            break;
        }
        t = t_next;

        let (kind, (size_a, size_b)) = rep.step(coag_total, frag_total);
        events += 1;

        debug_assert_eq!(
            rep.clusters.iter().sum::<usize>(),
            n,
            "particle conservation violated at event {events}"
        );

        if config.record_events {
            log.push(EventRecord {
                time: t,
                kind,
                size_a,
                size_b,
            });
        }
        if t >= config.burn_in {
            let tally = if kind == "coagulation" {
                &mut coag_counts
            } else {
                &mut frag_counts
            };
            tally[size_a - 1][size_b - 1] += 1;
        }

        if config.track_pair {
            let now = rep.together();
            if now != status {
                if let Some(start) = episode_start {
                    let duration = t - start;
                    if status {
                        together_sum += duration;
                        together_count += 1;
                    } else {
                        apart_sum += duration;
                        apart_count += 1;
                    }
                }
                if t >= config.burn_in {
                    episode_start = Some(t);
                } else {
                    episode_start = None;
                }
                status = now;
            }
        }
    }

    Ok(ReplicaOutcome {
        pi_time: pi_time.iter().map(CompensatedSum::total).collect(),
        m_time: m_time.iter().map(CompensatedSum::total).collect(),
        mean_k_time: mean_k_time.total(),
        together_time: together_time.total(),
        together_sum,
        together_count,
        apart_sum,
        apart_count,
        config_time,
        coag_counts,
        frag_counts,
        early_stopped,
        events,
        log,
    })
}

/// Canonical hash of a kernel spec, recorded in output metadata.
pub fn kernel_spec_hash(kernel: &Kernel) -> String {
    let json = serde_json::to_string(&kernel.spec()).expect("kernel spec serializes");
    let mut hasher = Sha256::new();
    hasher.update(json.as_bytes());
    hex_digest(&hasher.finalize())
}

fn hex_digest(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Runs the simulation and aggregates replica statistics. The event log of
/// every replica is returned (in replica order) when `record_events` is on.
pub fn run_ssa(kernel: &Kernel, config: &SimConfig) -> Result<(SimStats, Option<Vec<EventRecord>>)> {
    if config.n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    if !(config.t_end > config.burn_in) || config.burn_in < 0.0 {
        return Err(Error::InvalidArgument(
            "need 0 <= burn_in < t_end".into(),
        ));
    }
    if config.replicas == 0 {
        return Err(Error::InvalidArgument("replicas must be at least 1".into()));
    }
    if config.track_pair && config.n < 2 {
        return Err(Error::InvalidArgument("pair tracking needs N >= 2".into()));
    }

    let rates = Rates::new(kernel, config.n);
    // Replicas are independent streams; the ordered collect keeps the
    // aggregation deterministic.
    let outcomes: Vec<ReplicaOutcome> = (0..config.replicas)
        .into_par_iter()
        .map(|r| run_replica(&rates, config, r))
        .collect::<Result<_>>()?;

    let n = config.n;
    let window = config.t_end - config.burn_in;
    let collect = |f: &dyn Fn(&ReplicaOutcome) -> f64| -> Vec<f64> {
        outcomes.iter().map(f).collect()
    };

    let pi = (0..n)
        .map(|k| Estimate::from_samples(&collect(&|o| o.pi_time[k] / window)))
        .collect();
    let mean_counts = (0..n)
        .map(|i| Estimate::from_samples(&collect(&|o| o.m_time[i] / window)))
        .collect();
    let mean_cluster_count = Estimate::from_samples(&collect(&|o| o.mean_k_time / window));
    let p2 = config
        .track_pair
        .then(|| Estimate::from_samples(&collect(&|o| o.together_time / window)));

    let episodes = if config.track_pair {
        let with_together: Vec<f64> = outcomes
            .iter()
            .filter(|o| o.together_count > 0)
            .map(|o| o.together_sum / o.together_count as f64)
            .collect();
        let with_apart: Vec<f64> = outcomes
            .iter()
            .filter(|o| o.apart_count > 0)
            .map(|o| o.apart_sum / o.apart_count as f64)
            .collect();
        let together_episodes: u64 = outcomes.iter().map(|o| o.together_count).sum();
        let apart_episodes: u64 = outcomes.iter().map(|o| o.apart_count).sum();
        if !with_together.is_empty() && !with_apart.is_empty() {
            Some(EpisodeStats {
                mean_together: Estimate::from_samples(&with_together),
                mean_apart: Estimate::from_samples(&with_apart),
                together_episodes,
                apart_episodes,
            })
        } else {
            None
        }
    } else {
        None
    };

    let mut config_keys: Vec<Vec<u32>> = outcomes
        .iter()
        .flat_map(|o| o.config_time.keys().cloned())
        .collect();
    config_keys.sort();
    config_keys.dedup();
    let config_frequencies = config_keys
        .into_iter()
        .map(|key| {
            let samples: Vec<f64> = outcomes
                .iter()
                .map(|o| o.config_time.get(&key).copied().unwrap_or(0.0) / window)
                .collect();
            let occ = OccupancyPartition::new(key, n).expect("tallied key is a partition");
            (occ.to_sparse(), Estimate::from_samples(&samples))
        })
        .collect();

    let mut flux = Vec::new();
    for i in 1..=n {
        for j in i..=n {
            let coagulations: u64 = outcomes.iter().map(|o| o.coag_counts[i - 1][j - 1]).sum();
            let fragmentations: u64 = outcomes.iter().map(|o| o.frag_counts[i - 1][j - 1]).sum();
            if coagulations > 0 || fragmentations > 0 {
                flux.push(PairFlux {
                    i,
                    j,
                    coagulations,
                    fragmentations,
                });
            }
        }
    }

    let stats = SimStats {
        n,
        replicas: config.replicas,
        t_end: config.t_end,
        burn_in: config.burn_in,
        seed: config.seed,
        rng_algorithm: RNG_ALGORITHM,
        stream_derivation: STREAM_DERIVATION,
        kernel_spec_hash: kernel_spec_hash(kernel),
        mean_cluster_count,
        mean_counts,
        pi,
        p2,
        episodes,
        config_frequencies,
        flux,
        early_stops: outcomes.iter().filter(|o| o.early_stopped).count(),
        events_total: outcomes.iter().map(|o| o.events).sum(),
    };
    let log = config.record_events.then(|| {
        let mut all = Vec::new();
        for o in outcomes {
            all.extend(o.log);
        }
        all
    });
    Ok((stats, log))
}

/// Episode-based estimators (T_S_hat, T_R_hat, p2_hat) from a tracked run.
pub fn estimate_pair_times(stats: &SimStats) -> Result<(f64, f64, f64)> {
    let episodes = stats.episodes.as_ref().ok_or_else(|| {
        Error::InsufficientData("no completed together/apart episodes were observed".into())
    })?;
    if episodes.together_episodes == 0 || episodes.apart_episodes == 0 {
        return Err(Error::InsufficientData(
            "no completed together/apart episodes were observed".into(),
        ));
    }
    let p2 = stats
        .p2
        .as_ref()
        .ok_or_else(|| Error::InsufficientData("pair tracking was not enabled".into()))?;
    Ok((
        episodes.mean_together.value,
        episodes.mean_apart.value,
        p2.value,
    ))
}
