//! Shared argument types: kernel selection, numeric mode and list parsing.

use anyhow::{anyhow, bail, Context, Result};
use cfp_core::kernels::{build_kernel, Kernel, KernelSpec};
use cfp_core::numeric::parse_decimal_rational;
use clap::{Args, ValueEnum};
use num_rational::BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NumericArg {
    Rational,
    Float,
}

/// Kernel selection shared by every subcommand. `--kernel` names a built-in
/// family or a JSON spec file; `--a` takes decimals or `p/q` fractions.
#[derive(Args, Clone, Debug)]
pub struct KernelArgs {
    /// constant | bounded | linear | path to a kernel spec JSON file
    #[arg(long, default_value = "constant")]
    pub kernel: String,

    /// Kernel parameter a (single value or comma list where supported)
    #[arg(long, default_value = "1")]
    pub a: String,

    /// Maximum cluster size M (bounded family; comma list where supported)
    #[arg(long)]
    pub m: Option<String>,
}

/// One expanded kernel grid point.
#[derive(Clone, Debug)]
pub struct KernelPoint {
    pub kernel: Kernel,
    /// Original text of the a value, for manifests.
    pub a_text: String,
    pub m: Option<usize>,
}

pub fn parse_rational(text: &str) -> Result<BigRational> {
    parse_decimal_rational(text)
        .ok_or_else(|| anyhow!("cannot parse '{text}' as a decimal or fraction"))
}

/// Comma list of decimals/fractions.
pub fn parse_value_list(text: &str) -> Result<Vec<(String, BigRational)>> {
    text.split(',')
        .map(|item| {
            let item = item.trim();
            Ok((item.to_string(), parse_rational(item)?))
        })
        .collect()
}

/// Comma list of positive integers, with `lo:hi` and `lo:hi:step` ranges.
pub fn parse_usize_list(text: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in text.split(',') {
        let item = item.trim();
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [single] => out.push(single.parse().with_context(|| format!("bad integer '{single}'"))?),
            [lo, hi] | [lo, hi, _] => {
                let lo: usize = lo.parse().with_context(|| format!("bad integer '{lo}'"))?;
                let hi: usize = hi.parse().with_context(|| format!("bad integer '{hi}'"))?;
                let step: usize = if parts.len() == 3 { parts[2].parse()? } else { 1 };
                if step == 0 || hi < lo {
                    bail!("bad range '{item}'");
                }
                out.extend((lo..=hi).step_by(step));
            }
            _ => bail!("bad list item '{item}'"),
        }
    }
    if out.is_empty() {
        bail!("empty integer list");
    }
    Ok(out)
}

impl KernelArgs {
    fn m_list(&self) -> Result<Vec<Option<usize>>> {
        match &self.m {
            None => Ok(vec![None]),
            Some(text) => Ok(parse_usize_list(text)?.into_iter().map(Some).collect()),
        }
    }

    /// Expands the kernel arguments into their (a, M) grid.
    pub fn expand(&self) -> Result<Vec<KernelPoint>> {
        let mut points = Vec::new();
        match self.kernel.as_str() {
            family @ ("constant" | "bounded" | "linear") => {
                for (a_text, a) in parse_value_list(&self.a)? {
                    for m in self.m_list()? {
                        let kernel = match family {
                            "constant" => Kernel::constant(a.clone()),
                            "linear" => Kernel::linear(a.clone()),
                            "bounded" => {
                                let m = m.ok_or_else(|| {
                                    anyhow!("bounded kernel requires --m")
                                })?;
                                Kernel::bounded(a.clone(), m)
                            }
                            _ => unreachable!(),
                        }?;
                        points.push(KernelPoint {
                            kernel,
                            a_text: a_text.clone(),
                            m,
                        });
                    }
                }
            }
            path => {
                let body = std::fs::read_to_string(path)
                    .with_context(|| format!("cannot read kernel spec file '{path}'"))?;
                let spec: KernelSpec = serde_json::from_str(&body)
                    .with_context(|| format!("malformed kernel spec in '{path}'"))?;
                let kernel = build_kernel(&spec)?;
                points.push(KernelPoint {
                    a_text: spec.a.map_or_else(|| "tabulated".into(), |a| a.to_string()),
                    m: kernel.max_size(),
                    kernel,
                });
            }
        }
        Ok(points)
    }

    /// Expects the expansion to be a single kernel.
    pub fn single(&self) -> Result<KernelPoint> {
        let mut points = self.expand()?;
        if points.len() != 1 {
            bail!(
                "this subcommand takes a single kernel point; got {} (use `sweep`/`emit` for grids)",
                points.len()
            );
        }
        Ok(points.remove(0))
    }

    pub fn manifest_value(&self) -> serde_json::Value {
        serde_json::json!({
            "kernel": self.kernel,
            "a": self.a,
            "m": self.m,
        })
    }
}

pub fn parse_single_n(text: &str) -> Result<usize> {
    let ns = parse_usize_list(text)?;
    if ns.len() != 1 {
        bail!("this subcommand takes a single --n; got {}", ns.len());
    }
    Ok(ns[0])
}
