//! Mean time to separation (T_S) and mean time to reunion (T_R) of a
//! tagged particle pair, from absorbing jump chains over pair-marked
//! configurations.
//!
//! A configuration alone does not determine the pair's fate: the chain
//! state also carries the size of the cluster holding both particles
//! (separation chains) or the unordered size pair of their two host
//! clusters (reunion chains). That refinement is the minimal state space on
//! which the marked process is Markov.
//!
//! With exchangeable particles the stationary law of the marked process is
//! the configuration law times a hypergeometric placement factor, and
//! episode means come from averaging the per-state absorption times over
//! the *entry* distribution — the stationary flux into the together (resp.
//! apart) set. With those start laws the renewal identity
//! T_S/(T_S + T_R) = ⟨P₂⟩ holds exactly; the report also carries the
//! stationary-conditional averages for comparison.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{self, CnkMethod, CnkTable};
use crate::kernels::Kernel;
use crate::limits;
use crate::numeric::Weight;
use crate::partitions::{enumerate_occupancy, OccupancyPartition};

/// Which absorbing chain to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairTarget {
    /// Pair shares a cluster; absorption = the pair separates.
    Separation,
    /// Pair in two clusters; absorption = the two clusters merge.
    Reunion,
}

/// Location of the marked pair within a configuration.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MarkedClusters {
    /// Both particles in one cluster of this size (>= 2).
    Together { size: usize },
    /// Particles in two clusters of these sizes, stored sorted.
    Apart { sizes: (usize, usize) },
}

/// A pair-marked configuration.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PairState {
    pub config: OccupancyPartition,
    pub marked: MarkedClusters,
}

impl PairState {
    fn describe(&self) -> String {
        let sizes: Vec<usize> = self.config.to_sizes().parts().to_vec();
        match &self.marked {
            MarkedClusters::Together { size } => {
                format!("config {sizes:?}, pair together in a {size}-cluster")
            }
            MarkedClusters::Apart { sizes: (a, b) } => {
                format!("config {sizes:?}, pair split across sizes {a} and {b}")
            }
        }
    }
}

/// Embedded jump chain over pair-marked states plus one absorbing state.
///
/// Row i of `jump` holds the transition probabilities out of transient
/// state i; index `states.len()` is the absorbing state. `holding[i]` is
/// the mean holding time 1/(total outflow rate).
#[derive(Clone, Debug)]
pub struct PairChain<W: Weight> {
    pub target: PairTarget,
    pub states: Vec<PairState>,
    /// jump[i][j], j in 0..=states.len() (last column = absorbing).
    pub jump: Vec<Vec<W>>,
    pub holding: Vec<W>,
    /// Stationary weights of the states, normalized over this chain's side.
    pub stationary: Vec<W>,
    /// Entry distribution: stationary flux into this side, normalized.
    pub entry: Vec<W>,
}

impl<W: Weight> PairChain<W> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Row sum including the absorbing column (should be one).
    pub fn row_sum(&self, i: usize) -> W {
        let mut acc = W::zero();
        for v in &self.jump[i] {
            acc = acc.add(v);
        }
        acc
    }
}

/// Mean separation/reunion times and the renewal ratio.
#[derive(Clone, Debug, Serialize)]
pub struct PairTimesReport {
    pub n: usize,
    /// Mean together-episode duration (entry-averaged).
    pub t_s: f64,
    /// Mean apart-episode duration (entry-averaged).
    pub t_r: f64,
    /// T_S / (T_S + T_R).
    pub p2_ratio: f64,
    /// Independent value from the exact pipeline, for comparison.
    pub p2_exact: f64,
    /// Worst residual of the two linear solves, ‖(I-T)t - τ‖∞.
    pub max_residual: f64,
    /// Expected remaining together time from the stationary state.
    pub t_s_stationary: f64,
    /// Expected remaining apart time from the stationary state.
    pub t_r_stationary: f64,
    pub separation_states: usize,
    pub reunion_states: usize,
}

fn merged_counts(counts: &[u32], i: usize, j: usize) -> Vec<u32> {
    let mut out = counts.to_vec();
    out[i - 1] -= 1;
    out[j - 1] -= 1;
    out[i + j - 1] += 1;
    out
}

fn split_counts(counts: &[u32], s: usize, i: usize) -> Vec<u32> {
    let mut out = counts.to_vec();
    out[s - 1] -= 1;
    out[i - 1] += 1;
    out[s - i - 1] += 1;
    out
}

fn sorted_pair(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Rate tables memoized per construction, in the chain's own scalar type
/// so rational-mode chains stay exact.
struct RateMemo<W: Weight> {
    coag: Vec<Vec<W>>,
    frag: Vec<Vec<W>>,
}

impl<W: Weight> RateMemo<W> {
    fn new(kernel: &Kernel, n: usize) -> Self {
        RateMemo {
            coag: (1..=n)
                .map(|i| {
                    (1..=n)
                        .map(|j| W::from_rational(&kernel.coag_rat(i, j)))
                        .collect()
                })
                .collect(),
            frag: (1..=n)
                .map(|i| {
                    (1..=n)
                        .map(|j| W::from_rational(&kernel.frag_rat(i, j)))
                        .collect()
                })
                .collect(),
        }
    }

    fn c(&self, i: usize, j: usize) -> &W {
        &self.coag[i - 1][j - 1]
    }

    fn f(&self, i: usize, j: usize) -> &W {
        &self.frag[i - 1][j - 1]
    }
}

struct MarkedSpace<W: Weight> {
    n: usize,
    /// Together states and their stationary weights p(m)·placement.
    together: Vec<(PairState, W)>,
    /// Apart states and their stationary weights.
    apart: Vec<(PairState, W)>,
}

fn build_marked_space<W: Weight>(kernel: &Kernel, n: usize) -> Result<MarkedSpace<W>> {
    let table: CnkTable<W> = exact::compute_cnk(kernel, n, CnkMethod::Recurrence)?;
    let rates = exact::rate_schedule(kernel, &table)?;
    let pi = exact::steady_state_pi(&rates)?;
    let index = enumerate_occupancy(n, kernel.max_size())?;

    let pair_norm = W::from_u64((n * (n - 1)) as u64);
    let mut together = Vec::new();
    let mut apart = Vec::new();

    for m in index.iter() {
        let weight = table.config_weight(m);
        if weight.is_zero() {
            continue;
        }
        let k = m.cluster_count();
        let pi_k = pi.pi(k);
        if pi_k.is_zero() {
            continue;
        }
        let p_config = pi_k.mul(&weight).div(&table.entry(n as i64, k as i64));

        for size in 2..=n {
            let count = m.count(size);
            if count == 0 {
                continue;
            }
            // P(pair together in a cluster of this size | m)
            //   = m_size · size(size-1) / (N(N-1)).
            let placement = W::from_u64(u64::from(count) * (size * (size - 1)) as u64)
                .div(&pair_norm);
            together.push((
                PairState {
                    config: m.clone(),
                    marked: MarkedClusters::Together { size },
                },
                p_config.mul(&placement),
            ));
        }
        for s1 in 1..=n {
            let c1 = m.count(s1);
            if c1 == 0 {
                continue;
            }
            for s2 in s1..=n {
                let c2 = m.count(s2);
                let pairs = if s1 == s2 {
                    u64::from(c1) * (u64::from(c1).saturating_sub(1)) / 2
                } else {
                    u64::from(c1) * u64::from(c2)
                };
                if pairs == 0 {
                    continue;
                }
                // P(pair split across one specific cluster pair) = 2·s1·s2/(N(N-1)).
                let placement =
                    W::from_u64(2 * pairs * (s1 * s2) as u64).div(&pair_norm);
                apart.push((
                    PairState {
                        config: m.clone(),
                        marked: MarkedClusters::Apart {
                            sizes: (s1, s2),
                        },
                    },
                    p_config.mul(&placement),
                ));
            }
        }
    }
    Ok(MarkedSpace { n, together, apart })
}

/// Accumulates (destination, rate) transitions for one state.
struct Outflow<W: Weight> {
    entries: HashMap<Option<usize>, W>, // None = absorbing
    total: W,
}

impl<W: Weight> Outflow<W> {
    fn new() -> Self {
        Outflow {
            entries: HashMap::new(),
            total: W::zero(),
        }
    }

    fn push(&mut self, dest: Option<usize>, rate: W) {
        if rate.is_zero() {
            return;
        }
        self.total = self.total.add(&rate);
        self.entries
            .entry(dest)
            .and_modify(|r| *r = r.add(&rate))
            .or_insert(rate);
    }
}

fn lookup_state(index: &HashMap<PairState, usize>, state: PairState) -> Result<usize> {
    index.get(&state).copied().ok_or_else(|| {
        Error::Structural(format!(
            "transition into unknown state ({}); the kernel likely violates detailed balance",
            state.describe()
        ))
    })
}

/// Builds the absorbing jump chain for one target.
pub fn build_pair_chain<W: Weight>(
    kernel: &Kernel,
    n: usize,
    target: PairTarget,
) -> Result<PairChain<W>> {
    if n < 2 {
        return Err(Error::InvalidArgument("pair chains need N >= 2".into()));
    }
    let cap = match target {
        PairTarget::Separation => limits::max_separation_n(),
        PairTarget::Reunion => limits::max_reunion_n(),
    };
    if n > cap {
        return Err(Error::ResourceLimit(format!(
            "pair chain for N = {n} exceeds the cap {cap}; set CFP_MAX_N to override"
        )));
    }
    let space = build_marked_space::<W>(kernel, n)?;
    let memo = RateMemo::<W>::new(kernel, n);
    match target {
        PairTarget::Separation => build_separation_chain(&space, &memo),
        PairTarget::Reunion => build_reunion_chain(&space, &memo),
    }
}

fn build_separation_chain<W: Weight>(
    space: &MarkedSpace<W>,
    memo: &RateMemo<W>,
) -> Result<PairChain<W>> {
    let n = space.n;
    let states: Vec<PairState> = space.together.iter().map(|(s, _)| s.clone()).collect();
    let index: HashMap<PairState, usize> = states
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();

    let mut jump = Vec::with_capacity(states.len());

    for state in &states {
        let m = &state.config;
        let k = match state.marked {
            MarkedClusters::Together { size } => size,
            _ => unreachable!(),
        };
        let counts = m.counts();
        let mut flow = Outflow::<W>::new();

        // Marked cluster coagulates with an unmarked cluster of size j.
        for j in 1..=n {
            let others = u64::from(m.count(j)) - u64::from(j == k);
            if others == 0 || k + j > n {
                continue;
            }
            let rate = memo.c(k, j).mul(&W::from_u64(others));
            if rate.is_zero() {
                continue;
            }
            let dest = PairState {
                config: OccupancyPartition::new(merged_counts(counts, k, j), n)?,
                marked: MarkedClusters::Together { size: k + j },
            };
            flow.push(Some(lookup_state(&index, dest)?), rate);
        }

        // Coagulation among unmarked clusters.
        for i in 1..=n {
            let ci = u64::from(m.count(i)) - u64::from(i == k);
            if ci == 0 {
                continue;
            }
            for j in i..=n {
                if i + j > n {
                    break;
                }
                let cj = u64::from(m.count(j)) - u64::from(j == k);
                let pairs = if i == j { ci * ci.saturating_sub(1) / 2 } else { ci * cj };
                if pairs == 0 {
                    continue;
                }
                let rate = memo.c(i, j).mul(&W::from_u64(pairs));
                if rate.is_zero() {
                    continue;
                }
                let dest = PairState {
                    config: OccupancyPartition::new(merged_counts(counts, i, j), n)?,
                    marked: MarkedClusters::Together { size: k },
                };
                flow.push(Some(lookup_state(&index, dest)?), rate);
            }
        }

        // Fragmentation of an unmarked cluster.
        for s in 2..=n {
            let others = u64::from(m.count(s)) - u64::from(s == k);
            if others == 0 {
                continue;
            }
            for i in 1..s {
                let rate = memo.f(i, s - i).mul(&W::from_u64(others));
                if rate.is_zero() {
                    continue;
                }
                let dest = PairState {
                    config: OccupancyPartition::new(split_counts(counts, s, i), n)?,
                    marked: MarkedClusters::Together { size: k },
                };
                flow.push(Some(lookup_state(&index, dest)?), rate);
            }
        }

        // Fragmentation of the marked cluster: the pair lands together in a
        // fragment with the hypergeometric weight, or separates (absorbs).
        let pair_slots = (k * (k - 1)) as u64;
        for i in 1..k {
            let f = memo.f(i, k - i);
            if f.is_zero() {
                continue;
            }
            let new_counts = split_counts(counts, k, i);
            if i >= 2 {
                let frac = W::ratio_u64((i * (i - 1)) as u64, pair_slots);
                let dest = PairState {
                    config: OccupancyPartition::new(new_counts.clone(), n)?,
                    marked: MarkedClusters::Together { size: i },
                };
                flow.push(Some(lookup_state(&index, dest)?), f.mul(&frac));
            }
            if k - i >= 2 {
                let frac = W::ratio_u64(((k - i) * (k - i - 1)) as u64, pair_slots);
                let dest = PairState {
                    config: OccupancyPartition::new(new_counts, n)?,
                    marked: MarkedClusters::Together { size: k - i },
                };
                flow.push(Some(lookup_state(&index, dest)?), f.mul(&frac));
            }
            let frac = W::ratio_u64(2 * (i * (k - i)) as u64, pair_slots);
            flow.push(None, f.mul(&frac));
        }

        jump.push(flow);
    }

    // Entry distribution: flux from apart states through the reuniting
    // coagulation, landing on together states.
    let mut entry = vec![W::zero(); states.len()];
    let mut entry_total = W::zero();
    for (state, weight) in &space.apart {
        let (k1, k2) = match state.marked {
            MarkedClusters::Apart { sizes } => sizes,
            _ => unreachable!(),
        };
        if k1 + k2 > n {
            continue;
        }
        let rate = memo.c(k1, k2);
        if rate.is_zero() {
            continue;
        }
        let dest = PairState {
            config: OccupancyPartition::new(merged_counts(state.config.counts(), k1, k2), n)?,
            marked: MarkedClusters::Together { size: k1 + k2 },
        };
        let idx = lookup_state(&index, dest)?;
        let flux = weight.mul(rate);
        entry[idx] = entry[idx].add(&flux);
        entry_total = entry_total.add(&flux);
    }
    if entry_total.is_zero() {
        return Err(Error::DegenerateChain(
            "no reunion flux: the pair can never come together".into(),
        ));
    }
    for e in &mut entry {
        *e = e.div(&entry_total);
    }

    finalize_chain(
        PairTarget::Separation,
        states,
        jump,
        entry,
        space.together.iter().map(|(_, w)| w.clone()).collect(),
    )
}

fn build_reunion_chain<W: Weight>(
    space: &MarkedSpace<W>,
    memo: &RateMemo<W>,
) -> Result<PairChain<W>> {
    let n = space.n;
    let states: Vec<PairState> = space.apart.iter().map(|(s, _)| s.clone()).collect();
    let index: HashMap<PairState, usize> = states
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();

    let mut jump = Vec::with_capacity(states.len());

    for state in &states {
        let m = &state.config;
        let (k1, k2) = match state.marked {
            MarkedClusters::Apart { sizes } => sizes,
            _ => unreachable!(),
        };
        let counts = m.counts();
        let marked_count = |s: usize| u64::from(s == k1) + u64::from(s == k2);
        let mut flow = Outflow::<W>::new();

        // The two marked clusters merge: reunion, absorbing.
        if k1 + k2 <= n {
            flow.push(None, memo.c(k1, k2).clone());
        }

        // A marked cluster merges with an unmarked one.
        for (mk, other) in [(k1, k2), (k2, k1)] {
            for j in 1..=n {
                if mk + j > n {
                    continue;
                }
                let unmarked = u64::from(m.count(j)) - marked_count(j);
                if unmarked == 0 {
                    continue;
                }
                let rate = memo.c(mk, j).mul(&W::from_u64(unmarked));
                if rate.is_zero() {
                    continue;
                }
                let dest = PairState {
                    config: OccupancyPartition::new(merged_counts(counts, mk, j), n)?,
                    marked: MarkedClusters::Apart {
                        sizes: sorted_pair(mk + j, other),
                    },
                };
                flow.push(Some(lookup_state(&index, dest)?), rate);
            }
        }

        // Coagulation among unmarked clusters.
        for i in 1..=n {
            let ci = u64::from(m.count(i)) - marked_count(i);
            if ci == 0 {
                continue;
            }
            for j in i..=n {
                if i + j > n {
                    break;
                }
                let cj = u64::from(m.count(j)) - marked_count(j);
                let pairs = if i == j { ci * ci.saturating_sub(1) / 2 } else { ci * cj };
                if pairs == 0 {
                    continue;
                }
                let rate = memo.c(i, j).mul(&W::from_u64(pairs));
                if rate.is_zero() {
                    continue;
                }
                let dest = PairState {
                    config: OccupancyPartition::new(merged_counts(counts, i, j), n)?,
                    marked: state.marked.clone(),
                };
                flow.push(Some(lookup_state(&index, dest)?), rate);
            }
        }

        // Fragmentation of an unmarked cluster.
        for s in 2..=n {
            let unmarked = u64::from(m.count(s)) - marked_count(s);
            if unmarked == 0 {
                continue;
            }
            for i in 1..s {
                let rate = memo.f(i, s - i).mul(&W::from_u64(unmarked));
                if rate.is_zero() {
                    continue;
                }
                let dest = PairState {
                    config: OccupancyPartition::new(split_counts(counts, s, i), n)?,
                    marked: state.marked.clone(),
                };
                flow.push(Some(lookup_state(&index, dest)?), rate);
            }
        }

        // Fragmentation of a marked cluster: its marked particle follows a
        // uniformly chosen fragment.
        for (mk, other) in [(k1, k2), (k2, k1)] {
            if mk < 2 {
                continue;
            }
            for i in 1..mk {
                let f = memo.f(i, mk - i);
                if f.is_zero() {
                    continue;
                }
                let new_counts = split_counts(counts, mk, i);
                for part in [i, mk - i] {
                    let frac = W::ratio_u64(part as u64, mk as u64);
                    let dest = PairState {
                        config: OccupancyPartition::new(new_counts.clone(), n)?,
                        marked: MarkedClusters::Apart {
                            sizes: sorted_pair(part, other),
                        },
                    };
                    flow.push(Some(lookup_state(&index, dest)?), f.mul(&frac));
                }
            }
        }

        jump.push(flow);
    }

    // Entry distribution: flux from together states through separating
    // fragmentations.
    let mut entry = vec![W::zero(); states.len()];
    let mut entry_total = W::zero();
    for (state, weight) in &space.together {
        let k = match state.marked {
            MarkedClusters::Together { size } => size,
            _ => unreachable!(),
        };
        let pair_slots = (k * (k - 1)) as u64;
        for i in 1..k {
            let f = memo.f(i, k - i);
            if f.is_zero() {
                continue;
            }
            let separate = W::ratio_u64(2 * (i * (k - i)) as u64, pair_slots);
            let dest = PairState {
                config: OccupancyPartition::new(split_counts(state.config.counts(), k, i), n)?,
                marked: MarkedClusters::Apart {
                    sizes: sorted_pair(i, k - i),
                },
            };
            let idx = lookup_state(&index, dest)?;
            let flux = weight.mul(&f.mul(&separate));
            entry[idx] = entry[idx].add(&flux);
            entry_total = entry_total.add(&flux);
        }
    }
    if entry_total.is_zero() {
        return Err(Error::DegenerateChain(
            "no separation flux: the pair can never split".into(),
        ));
    }
    for e in &mut entry {
        *e = e.div(&entry_total);
    }

    finalize_chain(
        PairTarget::Reunion,
        states,
        jump,
        entry,
        space.apart.iter().map(|(_, w)| w.clone()).collect(),
    )
}

/// Converts accumulated rates into jump probabilities and holding times and
/// normalizes the stationary weights.
fn finalize_chain<W: Weight>(
    target: PairTarget,
    states: Vec<PairState>,
    flows: Vec<Outflow<W>>,
    entry: Vec<W>,
    mut stationary: Vec<W>,
) -> Result<PairChain<W>> {
    let s = states.len();
    let mut jump = vec![vec![W::zero(); s + 1]; s];
    let mut holding = Vec::with_capacity(s);
    for (i, flow) in flows.into_iter().enumerate() {
        if flow.total.is_zero() {
            return Err(Error::Structural(format!(
                "state with no outgoing transitions: {}",
                states[i].describe()
            )));
        }
        for (dest, rate) in flow.entries {
            let col = dest.unwrap_or(s);
            jump[i][col] = jump[i][col].add(&rate.div(&flow.total));
        }
        holding.push(W::one().div(&flow.total));
    }
    let mut total = W::zero();
    for w in &stationary {
        total = total.add(w);
    }
    if !total.is_zero() {
        for w in &mut stationary {
            *w = w.div(&total);
        }
    }
    Ok(PairChain {
        target,
        states,
        jump,
        holding,
        stationary,
        entry,
    })
}

/// Solves (I - T)·t = τ for the mean absorption times of every transient
/// state, by dense Gaussian elimination with partial pivoting.
pub fn mean_absorption_times<W: Weight>(chain: &PairChain<W>) -> Result<Vec<W>> {
    let s = chain.len();
    let mut a = vec![vec![W::zero(); s]; s];
    let mut rhs: Vec<W> = chain.holding.clone();
    for i in 0..s {
        for j in 0..s {
            let t = &chain.jump[i][j];
            a[i][j] = if i == j { W::one().sub(t) } else { W::zero().sub(t) };
        }
    }

    let mut perm: Vec<usize> = (0..s).collect();
    for col in 0..s {
        let (pivot_row, pivot_mag) = (col..s)
            .map(|r| (r, a[r][col].to_f64().abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap_or((col, 0.0));
        if pivot_mag == 0.0 || a[pivot_row][col].is_zero() {
            return Err(Error::Structural(format!(
                "singular system: absorption unreachable from {}",
                chain.states[perm[col]].describe()
            )));
        }
        a.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        perm.swap(col, pivot_row);
        let pivot = a[col][col].clone();
        for row in (col + 1)..s {
            if a[row][col].is_zero() {
                continue;
            }
            let factor = a[row][col].div(&pivot);
            for j in col..s {
                let delta = factor.mul(&a[col][j]);
                a[row][j] = a[row][j].sub(&delta);
            }
            let delta = factor.mul(&rhs[col]);
            rhs[row] = rhs[row].sub(&delta);
        }
    }
    let mut t = vec![W::zero(); s];
    for row in (0..s).rev() {
        let mut acc = rhs[row].clone();
        for j in (row + 1)..s {
            acc = acc.sub(&a[row][j].mul(&t[j]));
        }
        t[row] = acc.div(&a[row][row]);
    }
    Ok(t)
}

/// ‖(I - T)·t - τ‖∞ over the transient states.
pub fn solve_residual<W: Weight>(chain: &PairChain<W>, times: &[W]) -> f64 {
    let s = chain.len();
    let mut worst = 0.0f64;
    for i in 0..s {
        let mut acc = times[i].clone();
        for j in 0..s {
            acc = acc.sub(&chain.jump[i][j].mul(&times[j]));
        }
        acc = acc.sub(&chain.holding[i]);
        worst = worst.max(acc.to_f64().abs());
    }
    worst
}

fn weighted_mean<W: Weight>(weights: &[W], values: &[W]) -> f64 {
    let mut acc = W::zero();
    for (w, v) in weights.iter().zip(values) {
        acc = acc.add(&w.mul(v));
    }
    acc.to_f64()
}

/// Full pair-times analysis: both chains, their solves and the renewal
/// ratio, with the exact ⟨P₂⟩ attached for comparison.
pub fn pair_times(kernel: &Kernel, n: usize) -> Result<PairTimesReport> {
    let separation = build_pair_chain::<f64>(kernel, n, PairTarget::Separation)?;
    let reunion = build_pair_chain::<f64>(kernel, n, PairTarget::Reunion)?;
    let t_sep = mean_absorption_times(&separation)?;
    let t_reu = mean_absorption_times(&reunion)?;
    let residual = solve_residual(&separation, &t_sep).max(solve_residual(&reunion, &t_reu));

    let t_s = weighted_mean(&separation.entry, &t_sep);
    let t_r = weighted_mean(&reunion.entry, &t_reu);
    let t_s_stationary = weighted_mean(&separation.stationary, &t_sep);
    let t_r_stationary = weighted_mean(&reunion.stationary, &t_reu);

    let table: CnkTable<f64> = exact::compute_cnk(kernel, n, CnkMethod::Recurrence)?;
    let rates = exact::rate_schedule(kernel, &table)?;
    let pi = exact::steady_state_pi(&rates)?;
    let p2 = exact::p2_exact(&table, &pi)?;

    Ok(PairTimesReport {
        n,
        t_s,
        t_r,
        p2_ratio: t_s / (t_s + t_r),
        p2_exact: p2,
        max_residual: residual,
        t_s_stationary,
        t_r_stationary,
        separation_states: separation.len(),
        reunion_states: reunion.len(),
    })
}
