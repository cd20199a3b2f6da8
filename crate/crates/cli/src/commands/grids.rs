//! `cfp sweep` and `cfp emit`: Cartesian parameter grids evaluated in a
//! worker pool, written as long-format CSV in deterministic grid order.

use std::path::PathBuf;

use anyhow::{bail, Result};
use cfp_core::exact::CnkMethod;
use cfp_core::hypergeom::{self, GMethod};
use cfp_core::kernels::Kernel;
use clap::Args;
use rayon::prelude::*;

use crate::args::{parse_usize_list, parse_value_list, KernelArgs, NumericArg};
use crate::commands::run_pipeline;
use crate::output::{fmt_f64, CsvSink};
use crate::commands::kebab;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepQuantity {
    /// Π_K rows per grid point
    PiK,
    /// ⟨M_size⟩ rows per grid point
    MeanCounts,
    /// ⟨P₂⟩ per grid point
    P2,
    /// Mean cluster count per grid point
    Mu1,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,

    /// Particle counts (list / ranges)
    #[arg(long)]
    pub n: String,

    #[arg(long, value_enum)]
    pub quantity: SweepQuantity,

    #[arg(long, value_enum, default_value_t = NumericArg::Float)]
    pub numeric: NumericArg,

    #[arg(long, default_value = "sweep.csv")]
    pub out: PathBuf,
}

pub fn run_sweep(args: &SweepArgs) -> Result<()> {
    let ns = parse_usize_list(&args.n)?;
    let kernels = args.kernel.expand()?;
    let manifest = serde_json::json!({
        "subcommand": "sweep",
        "kernel": args.kernel.manifest_value(),
        "n": args.n,
        "quantity": kebab(&args.quantity),
        "numeric": kebab(&args.numeric),
    });

    // Grid order: n outermost, then the kernel expansion (a, then M).
    let grid: Vec<(usize, usize)> = ns
        .iter()
        .enumerate()
        .flat_map(|(i, _)| (0..kernels.len()).map(move |j| (i, j)))
        .collect();

    let quantity = args.quantity;
    let numeric = args.numeric;
    let results: Vec<Result<Vec<Vec<String>>>> = grid
        .par_iter()
        .map(|&(i, j)| {
            let n = ns[i];
            let point = &kernels[j];
            let meta = vec![
                n.to_string(),
                point.a_text.clone(),
                point.m.map_or_else(String::new, |m| m.to_string()),
            ];
            sweep_rows(quantity, numeric, &point.kernel, n, &meta)
        })
        .collect();

    let header = match args.quantity {
        SweepQuantity::PiK => vec!["n", "a", "m", "K", "pi"],
        SweepQuantity::MeanCounts => vec!["n", "a", "m", "size", "mean"],
        SweepQuantity::P2 => vec!["n", "a", "m", "p2"],
        SweepQuantity::Mu1 => vec!["n", "a", "m", "mu1"],
    };
    let mut sink = CsvSink::new(&manifest, &header);
    let mut count = 0usize;
    for rows in results {
        for row in rows? {
            sink.row(&row);
            count += 1;
        }
    }
    sink.write_to(&args.out)?;
    println!("sweep {:?}: {count} rows -> {}", args.quantity, args.out.display());
    Ok(())
}

fn sweep_rows(
    quantity: SweepQuantity,
    numeric: NumericArg,
    kernel: &Kernel,
    n: usize,
    meta: &[String],
) -> Result<Vec<Vec<String>>> {
    let data = run_pipeline(kernel, n, numeric, CnkMethod::Recurrence)?;
    let mut rows = Vec::new();
    match quantity {
        SweepQuantity::PiK => {
            for (k, pi) in data.pi_rows() {
                let mut row = meta.to_vec();
                row.push(k.to_string());
                row.push(pi);
                rows.push(row);
            }
        }
        SweepQuantity::MeanCounts => {
            for (size, mean) in data.mean_counts_strings().into_iter().enumerate() {
                let mut row = meta.to_vec();
                row.push((size + 1).to_string());
                row.push(mean);
                rows.push(row);
            }
        }
        SweepQuantity::P2 => {
            let p2 = data
                .p2_string()
                .ok_or_else(|| anyhow::anyhow!("⟨P₂⟩ needs N >= 2"))?;
            let mut row = meta.to_vec();
            row.push(p2);
            rows.push(row);
        }
        SweepQuantity::Mu1 => {
            let mut row = meta.to_vec();
            row.push(fmt_f64(data.mean_cluster_count()));
            rows.push(row);
        }
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum EmitQuantity {
    /// G₁ and its large-N approximation with error columns
    G1Error,
    /// ⟨M_size⟩ over the grid (kernel from --kernel)
    MeanCounts,
    /// Π_K for the bounded family over an M list
    PiK,
    /// ⟨P₂⟩ versus a for the bounded family over an M list
    P2VsA,
}

#[derive(Args, Debug)]
pub struct EmitArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,

    /// Particle counts (list / ranges)
    #[arg(long)]
    pub n: String,

    #[arg(long, value_enum)]
    pub quantity: EmitQuantity,

    #[arg(long, value_enum, default_value_t = NumericArg::Float)]
    pub numeric: NumericArg,

    #[arg(long, default_value = "emit.csv")]
    pub out: PathBuf,
}

pub fn run_emit(args: &EmitArgs) -> Result<()> {
    let ns = parse_usize_list(&args.n)?;
    let a_list = parse_value_list(&args.kernel.a)?;
    let manifest = serde_json::json!({
        "subcommand": "emit",
        "kernel": args.kernel.manifest_value(),
        "n": args.n,
        "quantity": kebab(&args.quantity),
        "numeric": kebab(&args.numeric),
    });

    match args.quantity {
        EmitQuantity::G1Error => {
            let grid: Vec<(String, f64, usize)> = a_list
                .iter()
                .flat_map(|(text, a)| {
                    let a = cfp_core::numeric::rational_to_f64(a);
                    ns.iter()
                        .filter(|&&n| n >= 2)
                        .map(move |&n| (text.clone(), a, n))
                        .collect::<Vec<_>>()
                })
                .collect();
            let rows: Vec<Result<Vec<String>>> = grid
                .par_iter()
                .map(|(a_text, a, n)| {
                    let exact = hypergeom::g_n(1, *a, *n, GMethod::Exact)?.value;
                    let approx = hypergeom::g_n(1, *a, *n, GMethod::Asymptotic)?.value;
                    Ok(vec![
                        a_text.clone(),
                        n.to_string(),
                        fmt_f64(exact),
                        fmt_f64(approx),
                        fmt_f64((exact - approx).abs() / exact),
                        fmt_f64(exact - approx),
                    ])
                })
                .collect();
            let mut sink = CsvSink::new(
                &manifest,
                &["a", "n", "g1", "g1_asymptotic", "rel_error", "signed_error"],
            );
            let mut count = 0;
            for row in rows {
                sink.row(&row?);
                count += 1;
            }
            sink.write_to(&args.out)?;
            println!("emit g1-error: {count} rows -> {}", args.out.display());
        }
        EmitQuantity::MeanCounts => {
            let sweep = SweepArgs {
                kernel: args.kernel.clone(),
                n: args.n.clone(),
                quantity: SweepQuantity::MeanCounts,
                numeric: args.numeric,
                out: args.out.clone(),
            };
            return run_sweep(&sweep);
        }
        EmitQuantity::PiK | EmitQuantity::P2VsA => {
            let m_text = args
                .kernel
                .m
                .as_deref()
                .ok_or_else(|| anyhow::anyhow!("this quantity needs an --m list"))?;
            let m_list = parse_usize_list(m_text)?;
            if args.kernel.kernel != "constant" && args.kernel.kernel != "bounded" {
                bail!("this quantity uses the bounded family; pass --kernel bounded");
            }
            let mut grid = Vec::new();
            for &m in &m_list {
                for (a_text, a_rat) in &a_list {
                    for &n in &ns {
                        grid.push((m, a_text.clone(), a_rat.clone(), n));
                    }
                }
            }
            let quantity = args.quantity;
            let numeric = args.numeric;
            let results: Vec<Result<Vec<Vec<String>>>> = grid
                .par_iter()
                .map(|(m, a_text, a_rat, n)| {
                    let kernel = Kernel::bounded(a_rat.clone(), *m)?;
                    let data = run_pipeline(&kernel, *n, numeric, CnkMethod::Recurrence)?;
                    let mut rows = Vec::new();
                    match quantity {
                        EmitQuantity::PiK => {
                            for (k, pi) in data.pi_rows() {
                                rows.push(vec![
                                    m.to_string(),
                                    a_text.clone(),
                                    n.to_string(),
                                    k.to_string(),
                                    pi,
                                ]);
                            }
                        }
                        EmitQuantity::P2VsA => {
                            let p2 = data
                                .p2_string()
                                .ok_or_else(|| anyhow::anyhow!("⟨P₂⟩ needs N >= 2"))?;
                            rows.push(vec![m.to_string(), a_text.clone(), n.to_string(), p2]);
                        }
                        _ => unreachable!(),
                    }
                    Ok(rows)
                })
                .collect();
            let header: Vec<&str> = match args.quantity {
                EmitQuantity::PiK => vec!["m", "a", "n", "K", "pi"],
                EmitQuantity::P2VsA => vec!["m", "a", "n", "p2"],
                _ => unreachable!(),
            };
            let mut sink = CsvSink::new(&manifest, &header);
            let mut count = 0;
            for rows in results {
                for row in rows? {
                    sink.row(&row);
                    count += 1;
                }
            }
            sink.write_to(&args.out)?;
            println!(
                "emit {:?}: {count} rows -> {}",
                args.quantity,
                args.out.display()
            );
        }
    }
    Ok(())
}

