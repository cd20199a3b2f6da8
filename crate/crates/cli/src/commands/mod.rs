//! Subcommand implementations.

pub mod analytic;
pub mod exact_cmd;
pub mod grids;
pub mod stochastic;

use anyhow::Result;
use cfp_core::exact::{self, ClusterCountDistribution, CnkMethod, CnkTable, MomentReport, RateSchedule};
use cfp_core::kernels::Kernel;
use cfp_core::numeric::{LogFloat, Weight};
use num_rational::BigRational;

use crate::args::NumericArg;

/// Kebab-case name of a clap value-enum variant, for manifests and rows.
pub fn kebab<E: clap::ValueEnum>(value: &E) -> String {
    value
        .to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default()
}

/// The standard exact pipeline for one (kernel, N) point.
pub struct PipelineData<W: Weight> {
    pub table: CnkTable<W>,
    pub rates: RateSchedule<W>,
    pub pi: ClusterCountDistribution<W>,
    pub moments: MomentReport<W>,
    pub p2: Option<W>,
}

pub fn pipeline<W: Weight>(kernel: &Kernel, n: usize, method: CnkMethod) -> Result<PipelineData<W>> {
    let table = exact::compute_cnk::<W>(kernel, n, method)?;
    let rates = exact::rate_schedule(kernel, &table)?;
    let pi = exact::steady_state_pi(&rates)?;
    let moments = exact::marginal_moments(&table, &pi, &[])?;
    let p2 = if n >= 2 {
        Some(exact::p2_exact(&table, &pi)?)
    } else {
        None
    };
    Ok(PipelineData {
        table,
        rates,
        pi,
        moments,
        p2,
    })
}

impl<W: Weight> PipelineData<W> {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.pi.n(),
            "pi": self.pi.probabilities().iter().map(Weight::render_json).collect::<Vec<_>>(),
            "moments": self.moments.to_json(),
            "p2": self.p2.as_ref().map(Weight::render_json),
            "s_rates": (1..self.pi.n()).map(|k| self.rates.s_k(k).render_json()).collect::<Vec<_>>(),
            "f_rates": (2..=self.pi.n()).map(|k| self.rates.f_k(k).render_json()).collect::<Vec<_>>(),
        })
    }
}

/// Runs `body` with the pipeline instantiated for the requested numeric
/// mode, converging on a common row/JSON representation.
pub enum AnyPipeline {
    Rational(PipelineData<BigRational>),
    Float(PipelineData<LogFloat>),
}

pub fn run_pipeline(
    kernel: &Kernel,
    n: usize,
    mode: NumericArg,
    method: CnkMethod,
) -> Result<AnyPipeline> {
    Ok(match mode {
        NumericArg::Rational => AnyPipeline::Rational(pipeline::<BigRational>(kernel, n, method)?),
        NumericArg::Float => AnyPipeline::Float(pipeline::<LogFloat>(kernel, n, method)?),
    })
}

impl AnyPipeline {
    pub fn pi_rows(&self) -> Vec<(usize, String)> {
        match self {
            AnyPipeline::Rational(p) => p.pi.to_csv_rows(),
            AnyPipeline::Float(p) => p.pi.to_csv_rows(),
        }
    }

    pub fn mean_counts_strings(&self) -> Vec<String> {
        match self {
            AnyPipeline::Rational(p) => p.moments.means.iter().map(Weight::render_string).collect(),
            AnyPipeline::Float(p) => p.moments.means.iter().map(Weight::render_string).collect(),
        }
    }

    pub fn p2_string(&self) -> Option<String> {
        match self {
            AnyPipeline::Rational(p) => p.p2.as_ref().map(Weight::render_string),
            AnyPipeline::Float(p) => p.p2.as_ref().map(Weight::render_string),
        }
    }

    pub fn mean_cluster_count(&self) -> f64 {
        match self {
            AnyPipeline::Rational(p) => p.pi.mean().to_f64(),
            AnyPipeline::Float(p) => p.pi.mean().to_f64(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            AnyPipeline::Rational(p) => p.to_json(),
            AnyPipeline::Float(p) => p.to_json(),
        }
    }

    pub fn table_json(&self) -> serde_json::Value {
        match self {
            AnyPipeline::Rational(p) => p.table.to_json(),
            AnyPipeline::Float(p) => p.table.to_json(),
        }
    }
}
