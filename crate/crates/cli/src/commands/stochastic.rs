//! `cfp pairtimes`, `cfp simulate` and `cfp compare`.

use std::path::PathBuf;

use anyhow::{anyhow, Result};
use cfp_core::exact::{self, CnkMethod};
use cfp_core::limits;
use cfp_core::numeric::{LogFloat, Weight};
use cfp_core::pairtimes;
use cfp_core::partitions::enumerate_occupancy;
use cfp_core::simulate::{run_ssa, InitialCondition, SimConfig};
use clap::Args;

use crate::args::{parse_single_n, KernelArgs};
use crate::output::{fmt_f64, write_json, CsvSink};
use crate::commands::kebab;

#[derive(Args, Debug)]
pub struct PairtimesArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,

    /// Particle count N
    #[arg(long)]
    pub n: String,

    #[arg(long, default_value = "pairtimes.json")]
    pub out: PathBuf,
}

pub fn run_pairtimes(args: &PairtimesArgs) -> Result<()> {
    let n = parse_single_n(&args.n)?;
    let point = args.kernel.single()?;
    let manifest = serde_json::json!({
        "subcommand": "pairtimes",
        "kernel": args.kernel.manifest_value(),
        "n": n,
    });
    let report = pairtimes::pair_times(&point.kernel, n)?;
    write_json(&args.out, &manifest, serde_json::to_value(&report)?)?;
    println!(
        "pairtimes N={n}: t_s={}, t_r={}, p2_ratio={} (exact {}) -> {}",
        fmt_f64(report.t_s),
        fmt_f64(report.t_r),
        fmt_f64(report.p2_ratio),
        fmt_f64(report.p2_exact),
        args.out.display()
    );
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum InitialArg {
    Singletons,
    SingleCluster,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,

    /// Particle count N
    #[arg(long)]
    pub n: String,

    /// Simulated time horizon
    #[arg(long)]
    pub t_end: f64,

    /// Discarded initial time
    #[arg(long, default_value_t = 0.0)]
    pub burn_in: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value_t = 1)]
    pub replicas: usize,

    /// Track a tagged particle pair (episodes and ⟨P₂⟩)
    #[arg(long)]
    pub track_pair: bool,

    #[arg(long, value_enum, default_value_t = InitialArg::Singletons)]
    pub initial: InitialArg,

    /// Also write the full event trace as CSV
    #[arg(long)]
    pub events: Option<PathBuf>,

    #[arg(long, default_value = "simulate.json")]
    pub out: PathBuf,
}

fn warn_if_unbalanced(kernel: &cfp_core::Kernel, n: usize) {
    if n < 2 {
        return;
    }
    match cfp_core::verify_detailed_balance(kernel, n, cfp_core::kernels::DEFAULT_BALANCE_TOLERANCE)
    {
        Ok(report) if !report.passed => {
            let (i, j) = report.worst_pair.unwrap_or((0, 0));
            eprintln!(
                "warning: kernel violates detailed balance (worst relative violation {} at pair ({i}, {j})); \
                 analytic references assume a reversible chain",
                report.max_violation
            );
        }
        _ => {}
    }
}

fn sim_config(args: &SimulateArgs, n: usize) -> SimConfig {
    SimConfig {
        n,
        t_end: args.t_end,
        burn_in: args.burn_in,
        seed: args.seed,
        replicas: args.replicas,
        track_pair: args.track_pair,
        initial: match args.initial {
            InitialArg::Singletons => InitialCondition::AllSingletons,
            InitialArg::SingleCluster => InitialCondition::SingleCluster,
        },
        record_events: args.events.is_some(),
    }
}

pub fn run_simulate(args: &SimulateArgs) -> Result<()> {
    let n = parse_single_n(&args.n)?;
    let point = args.kernel.single()?;
    let manifest = serde_json::json!({
        "subcommand": "simulate",
        "kernel": args.kernel.manifest_value(),
        "n": n,
        "t_end": args.t_end,
        "burn_in": args.burn_in,
        "seed": args.seed,
        "replicas": args.replicas,
        "track_pair": args.track_pair,
        "initial": kebab(&args.initial),
    });
    warn_if_unbalanced(&point.kernel, n);
    let config = sim_config(args, n);
    let (stats, log) = run_ssa(&point.kernel, &config)?;
    if let (Some(path), Some(events)) = (&args.events, log) {
        let mut sink = CsvSink::new(&manifest, &["time", "kind", "size_a", "size_b"]);
        for e in &events {
            sink.row(&[
                fmt_f64(e.time),
                e.kind.to_string(),
                e.size_a.to_string(),
                e.size_b.to_string(),
            ]);
        }
        sink.write_to(path)?;
    }
    write_json(&args.out, &manifest, serde_json::to_value(&stats)?)?;
    println!(
        "simulate N={n}: {} events across {} replicas ({} early stops) -> {}",
        stats.events_total,
        stats.replicas,
        stats.early_stops,
        args.out.display()
    );
    Ok(())
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,

    /// Particle count N
    #[arg(long)]
    pub n: String,

    /// Simulated time horizon
    #[arg(long)]
    pub sim_t: f64,

    /// Discarded initial time (default: sim_t / 20)
    #[arg(long)]
    pub burn_in: Option<f64>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value_t = 16)]
    pub replicas: usize,

    #[arg(long, default_value = "compare.json")]
    pub out: PathBuf,
}

/// One compared quantity.
#[derive(serde::Serialize)]
struct ComparisonRow {
    quantity: String,
    exact: f64,
    simulated: f64,
    std_error: f64,
    z: f64,
    pass: bool,
}

/// Zero-variance estimates of vanishing quantities still compare cleanly
/// against exact values below this floor.
const ABS_FLOOR: f64 = 1e-6;

fn judge(quantity: String, exact: f64, est: &cfp_core::simulate::Estimate) -> ComparisonRow {
    let z = est.z_score(exact);
    let pass = z <= 3.0 || (est.value - exact).abs() <= ABS_FLOOR;
    ComparisonRow {
        quantity,
        exact,
        simulated: est.value,
        std_error: est.std_error,
        z,
        pass,
    }
}

pub fn run_compare(args: &CompareArgs) -> Result<()> {
    let n = parse_single_n(&args.n)?;
    let point = args.kernel.single()?;
    let burn_in = args.burn_in.unwrap_or(args.sim_t / 20.0);
    let manifest = serde_json::json!({
        "subcommand": "compare",
        "kernel": args.kernel.manifest_value(),
        "n": n,
        "sim_t": args.sim_t,
        "burn_in": burn_in,
        "seed": args.seed,
        "replicas": args.replicas,
    });

    warn_if_unbalanced(&point.kernel, n);

    // Exact references.
    let table = exact::compute_cnk::<LogFloat>(&point.kernel, n, CnkMethod::Recurrence)?;
    let rates = exact::rate_schedule(&point.kernel, &table)?;
    let pi = exact::steady_state_pi(&rates)?;
    let moments = exact::marginal_moments(&table, &pi, &[])?;
    let p2 = if n >= 2 {
        Some(exact::p2_exact(&table, &pi)?.to_f64())
    } else {
        None
    };
    let pair_report = if n >= 2 && n <= limits::max_reunion_n() {
        Some(pairtimes::pair_times(&point.kernel, n)?)
    } else {
        None
    };

    // Simulation.
    let config = SimConfig {
        n,
        t_end: args.sim_t,
        burn_in,
        seed: args.seed,
        replicas: args.replicas,
        track_pair: n >= 2,
        initial: InitialCondition::AllSingletons,
        record_events: false,
    };
    let (stats, _) = run_ssa(&point.kernel, &config)?;

    let mut rows: Vec<ComparisonRow> = Vec::new();
    for k in 1..=n {
        rows.push(judge(
            format!("pi[{k}]"),
            pi.pi(k).to_f64(),
            &stats.pi[k - 1],
        ));
    }
    for i in 1..=n {
        rows.push(judge(
            format!("mean_count[{i}]"),
            moments.means[i - 1].to_f64(),
            &stats.mean_counts[i - 1],
        ));
    }
    if let (Some(p2_ref), Some(p2_est)) = (p2, stats.p2.as_ref()) {
        rows.push(judge("p2".into(), p2_ref, p2_est));
    }
    if let (Some(report), Some(episodes)) = (&pair_report, stats.episodes.as_ref()) {
        rows.push(judge("t_s".into(), report.t_s, &episodes.mean_together));
        rows.push(judge("t_r".into(), report.t_r, &episodes.mean_apart));
    }
    // Configuration frequencies against Π_K · p'(m|K).
    if n <= 24 {
        let index = enumerate_occupancy(n, point.kernel.max_size())?;
        for m in index.iter() {
            if table.config_weight(m).is_zero() {
                continue;
            }
            let k = m.cluster_count();
            if pi.pi(k).is_zero() {
                continue;
            }
            let exact_p = pi
                .pi(k)
                .mul(&exact::config_probability(&table, m)?)
                .to_f64();
            let sparse = m.to_sparse();
            let zero = cfp_core::simulate::Estimate {
                value: 0.0,
                std_error: 0.0,
            };
            let est = stats
                .config_frequencies
                .iter()
                .find(|(key, _)| key == &sparse)
                .map_or(zero, |(_, e)| *e);
            let label: Vec<String> = m.to_sizes().parts().iter().map(|s| s.to_string()).collect();
            rows.push(judge(format!("config[{}]", label.join("+")), exact_p, &est));
        }
    }

    let misses: Vec<&ComparisonRow> = rows.iter().filter(|r| !r.pass).collect();
    let body = serde_json::json!({
        "n": n,
        "rows": rows.iter().map(|r| serde_json::to_value(r).unwrap()).collect::<Vec<_>>(),
        "pass": misses.is_empty(),
        "misses": misses.len(),
        "kernel_spec_hash": stats.kernel_spec_hash,
        "events_total": stats.events_total,
    });
    write_json(&args.out, &manifest, body)?;
    for row in &rows {
        if !row.pass {
            println!(
                "MISS {}: exact {} vs simulated {} ± {} (z = {})",
                row.quantity,
                fmt_f64(row.exact),
                fmt_f64(row.simulated),
                fmt_f64(row.std_error),
                fmt_f64(row.z)
            );
        }
    }
    println!(
        "compare N={n}: {} quantities, {} misses -> {}",
        rows.len(),
        misses.len(),
        args.out.display()
    );
    if !misses.is_empty() {
        return Err(anyhow!(
            "{} quantit{} missed the 3-sigma tolerance",
            misses.len(),
            if misses.len() == 1 { "y" } else { "ies" }
        )
        .context(CompareMiss));
    }
    Ok(())
}

/// Marker used by main to map compare misses to exit code 2.
#[derive(Debug)]
pub struct CompareMiss;

impl std::fmt::Display for CompareMiss {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "comparison failed")
    }
}
