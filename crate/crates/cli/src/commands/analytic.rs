//! `cfp analytic`: constant-kernel closed forms (terminating Kummer sums,
//! G_n, moments, per-size means, ⟨P₂⟩) over an (N, a) grid.

use std::path::PathBuf;

use anyhow::{bail, Result};
use cfp_core::hypergeom::{self, GMethod};
use clap::Args;

use crate::args::{parse_usize_list, parse_value_list};
use crate::output::{fmt_f64, write_json, CsvSink};
use crate::commands::kebab;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum AnalyticQuantity {
    /// G_n ratio of terminating Kummer functions
    G,
    /// Cluster-count distribution Π_K via the closed ladder
    Pi,
    /// Cluster-count moment μ_n
    Mu,
    /// Mean number of clusters per size
    MeanCounts,
    /// Colocalization probability ⟨P₂⟩
    P2,
    /// Variance of the cluster count (closed form)
    Variance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum MethodArg {
    Exact,
    Asymptotic,
    ContinuedFraction,
    Taylor,
}

impl From<MethodArg> for GMethod {
    fn from(value: MethodArg) -> Self {
        match value {
            MethodArg::Exact => GMethod::Exact,
            MethodArg::Asymptotic => GMethod::Asymptotic,
            MethodArg::ContinuedFraction => GMethod::ContinuedFraction,
            MethodArg::Taylor => GMethod::Taylor,
        }
    }
}

#[derive(Args, Debug)]
pub struct AnalyticArgs {
    /// Particle counts (list / ranges)
    #[arg(long)]
    pub n: String,

    /// Kernel parameter values (list)
    #[arg(long, default_value = "1")]
    pub a: String,

    #[arg(long, value_enum)]
    pub quantity: AnalyticQuantity,

    /// Order for `g` and `mu`
    #[arg(long, default_value_t = 1)]
    pub order: usize,

    /// Evaluation method for `g` and `p2`
    #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
    pub method: MethodArg,

    #[arg(long, default_value = "analytic.csv")]
    pub out: PathBuf,

    #[arg(long)]
    pub json: bool,

    #[arg(long, conflicts_with = "json")]
    pub csv: bool,
}

pub fn run(args: &AnalyticArgs) -> Result<()> {
    let ns = parse_usize_list(&args.n)?;
    let a_list = parse_value_list(&args.a)?;
    let manifest = serde_json::json!({
        "subcommand": "analytic",
        "quantity": kebab(&args.quantity),
        "method": kebab(&args.method),
        "order": args.order,
        "n": args.n,
        "a": args.a,
    });

    let mut rows: Vec<Vec<String>> = Vec::new();
    let header: Vec<&str> = match args.quantity {
        AnalyticQuantity::G => vec!["n", "a", "order", "method", "value"],
        AnalyticQuantity::Pi => vec!["n", "a", "K", "pi"],
        AnalyticQuantity::Mu => vec!["n", "a", "order", "mu"],
        AnalyticQuantity::MeanCounts => vec!["n", "a", "size", "mean"],
        AnalyticQuantity::P2 => vec!["n", "a", "method", "p2"],
        AnalyticQuantity::Variance => vec!["n", "a", "variance"],
    };

    for &n in &ns {
        for (a_text, a_rat) in &a_list {
            let a = cfp_core::numeric::rational_to_f64(a_rat);
            match args.quantity {
                AnalyticQuantity::G => {
                    let g = hypergeom::g_n(args.order, a, n, args.method.into())?;
                    rows.push(vec![
                        n.to_string(),
                        a_text.clone(),
                        args.order.to_string(),
                        kebab(&args.method),
                        fmt_f64(g.value),
                    ]);
                }
                AnalyticQuantity::Pi => {
                    let pi = hypergeom::pi_constant(n, a)?;
                    for k in 1..=n {
                        rows.push(vec![
                            n.to_string(),
                            a_text.clone(),
                            k.to_string(),
                            fmt_f64(cfp_core::numeric::Weight::to_f64(&pi.pi(k))),
                        ]);
                    }
                }
                AnalyticQuantity::Mu => {
                    let mu = hypergeom::mu_n(args.order, a, n)?;
                    rows.push(vec![
                        n.to_string(),
                        a_text.clone(),
                        args.order.to_string(),
                        fmt_f64(mu),
                    ]);
                }
                AnalyticQuantity::MeanCounts => {
                    for size in 1..=n {
                        let mean = hypergeom::mean_counts_constant(size, a, n)?;
                        rows.push(vec![
                            n.to_string(),
                            a_text.clone(),
                            size.to_string(),
                            fmt_f64(mean),
                        ]);
                    }
                }
                AnalyticQuantity::P2 => {
                    let asymptotic = match args.method {
                        MethodArg::Exact => false,
                        MethodArg::Asymptotic => true,
                        other => bail!("p2 supports exact or asymptotic, not {other:?}"),
                    };
                    let p2 = hypergeom::p2_constant(a, n, asymptotic)?;
                    rows.push(vec![
                        n.to_string(),
                        a_text.clone(),
                        kebab(&args.method),
                        fmt_f64(p2),
                    ]);
                }
                AnalyticQuantity::Variance => {
                    let v = hypergeom::variance_constant(a, n)?;
                    rows.push(vec![n.to_string(), a_text.clone(), fmt_f64(v)]);
                }
            }
        }
    }

    if args.json {
        let body: Vec<serde_json::Value> = rows
            .iter()
            .map(|r| {
                serde_json::Value::Array(
                    r.iter().map(|c| serde_json::Value::String(c.clone())).collect(),
                )
            })
            .collect();
        write_json(
            &args.out,
            &manifest,
            serde_json::json!({"header": header, "rows": body}),
        )?;
    } else {
        let mut sink = CsvSink::new(&manifest, &header);
        for row in &rows {
            sink.row(row);
        }
        sink.write_to(&args.out)?;
    }
    println!(
        "analytic {:?}: {} rows -> {}",
        args.quantity,
        rows.len(),
        args.out.display()
    );
    Ok(())
}
