//! `cfp exact`: steady-state distribution, moments and ⟨P₂⟩ for one
//! (kernel, N) point, plus the vanishing-fragmentation limit mode.

use std::path::PathBuf;

use anyhow::{bail, Result};
use cfp_core::exact::{self, CnkMethod};
use clap::Args;

use crate::args::{parse_single_n, KernelArgs, NumericArg};
use crate::commands::run_pipeline;
use crate::output::{fmt_f64, write_json, CsvSink};
use crate::commands::kebab;

#[derive(Args, Debug)]
pub struct ExactArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,

    /// Particle count N
    #[arg(long)]
    pub n: String,

    #[arg(long, value_enum, default_value_t = NumericArg::Float)]
    pub numeric: NumericArg,

    /// Table construction route (`enumeration` is the brute-force oracle)
    #[arg(long, value_enum, default_value_t = CnkMethodArg::Recurrence)]
    pub cnk_method: CnkMethodArg,

    /// Compute the a→0 limit of the bounded kernel instead of the
    /// steady state at the given a (exact fractions, no underflow)
    #[arg(long)]
    pub nucleation_limit: bool,

    /// Also write the normalization table as JSON
    #[arg(long)]
    pub table_out: Option<PathBuf>,

    #[arg(long, default_value = "exact.csv")]
    pub out: PathBuf,

    /// Write JSON (distribution, moments, rates) instead of the Π CSV
    #[arg(long)]
    pub json: bool,

    /// Write CSV (the default)
    #[arg(long, conflicts_with = "json")]
    pub csv: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum CnkMethodArg {
    Recurrence,
    Enumeration,
}

impl From<CnkMethodArg> for CnkMethod {
    fn from(value: CnkMethodArg) -> Self {
        match value {
            CnkMethodArg::Recurrence => CnkMethod::Recurrence,
            CnkMethodArg::Enumeration => CnkMethod::Enumeration,
        }
    }
}

pub fn run(args: &ExactArgs) -> Result<()> {
    let n = parse_single_n(&args.n)?;
    let point = args.kernel.single()?;
    let manifest = serde_json::json!({
        "subcommand": "exact",
        "kernel": args.kernel.manifest_value(),
        "n": n,
        "numeric": kebab(&args.numeric),
        "cnk_method": kebab(&args.cnk_method),
        "nucleation_limit": args.nucleation_limit,
    });

    if args.nucleation_limit {
        let Some(m) = point.m else {
            bail!("--nucleation-limit needs the bounded family (--kernel bounded --m <M>)");
        };
        let limit = exact::nucleation_limit(n, m)?;
        if args.json {
            write_json(&args.out, &manifest, limit.to_json())?;
        } else {
            let mut sink = CsvSink::new(&manifest, &["sizes", "probability", "probability_float"]);
            for (cfg, p) in &limit.configs {
                let sizes: Vec<String> =
                    cfg.to_sizes().parts().iter().map(|s| s.to_string()).collect();
                sink.row(&[
                    sizes.join("+"),
                    cfp_core::numeric::Weight::render_string(p),
                    fmt_f64(cfp_core::numeric::Weight::to_f64(p)),
                ]);
            }
            sink.write_to(&args.out)?;
        }
        let p2 = limit
            .p2
            .as_ref()
            .map_or_else(|| "n/a".into(), cfp_core::numeric::Weight::render_string);
        println!(
            "nucleation limit N={n} M={m}: K*={}, {} configurations, p2 = {p2} -> {}",
            limit.cluster_count,
            limit.configs.len(),
            args.out.display()
        );
        return Ok(());
    }

    let result = run_pipeline(&point.kernel, n, args.numeric, args.cnk_method.into())?;
    if let Some(table_path) = &args.table_out {
        write_json(table_path, &manifest, result.table_json())?;
    }
    if args.json {
        write_json(&args.out, &manifest, result.to_json())?;
    } else {
        let mut sink = CsvSink::new(&manifest, &["K", "pi"]);
        for (k, pi) in result.pi_rows() {
            sink.row(&[k.to_string(), pi]);
        }
        sink.write_to(&args.out)?;
    }
    println!(
        "exact N={n} a={}: mean clusters {} -> {}",
        point.a_text,
        fmt_f64(result.mean_cluster_count()),
        args.out.display()
    );
    Ok(())
}
