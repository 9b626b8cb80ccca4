//! Parameter sweeps emitting one CSV row of run statistics per run.

use std::path::PathBuf;

use grit_dbscan::cluster::{grit_dbscan, Variant};
use grit_dbscan::datagen::{normalize_to_domain, seed_spreader, GenConfig};
use grit_dbscan::points::{Dataset, Params};

use crate::io::read_dataset;
use crate::CmdError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Eps,
    MinPts,
    N,
}

#[derive(Debug, Clone)]
pub enum BenchSource {
    File { path: PathBuf, normalize: bool },
    Generator(GenConfig),
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub axis: Axis,
    pub values: Vec<f64>,
    pub source: BenchSource,
    pub eps: f64,
    pub min_pts: usize,
    pub variant: Variant,
    pub variant_name: String,
    pub repeats: usize,
    pub seed: u64,
}

/// One run's row. `cluster_count` is returned for callers but is not a
/// CSV column.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub variant: String,
    pub d: usize,
    pub n: usize,
    pub eps: f64,
    pub minpts: usize,
    pub grid_count: usize,
    pub eta: u32,
    pub max_kappa: usize,
    pub dist_evals: u64,
    pub t_partition: f64,
    pub t_index: f64,
    pub t_core: f64,
    pub t_merge: f64,
    pub t_assign: f64,
    pub t_total: f64,
    pub cluster_count: usize,
}

pub const CSV_HEADER: &str = "variant,d,n,eps,minpts,grid_count,eta,max_kappa,dist_evals,\
t_partition,t_index,t_core,t_merge,t_assign,t_total";

impl BenchRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            self.variant,
            self.d,
            self.n,
            self.eps,
            self.minpts,
            self.grid_count,
            self.eta,
            self.max_kappa,
            self.dist_evals,
            self.t_partition,
            self.t_index,
            self.t_core,
            self.t_merge,
            self.t_assign,
            self.t_total,
        )
    }
}

fn load_source(source: &BenchSource, n_override: Option<usize>) -> Result<Dataset, CmdError> {
    match source {
        BenchSource::File { path, normalize } => {
            if n_override.is_some() {
                return Err(CmdError::usage(
                    "an n-axis sweep requires the generator, not --input".into(),
                ));
            }
            let data = read_dataset(path)?;
            Ok(if *normalize {
                normalize_to_domain(&data)
            } else {
                data
            })
        }
        BenchSource::Generator(cfg) => {
            let mut cfg = *cfg;
            if let Some(n) = n_override {
                cfg.n = n;
            }
            seed_spreader(&cfg).map_err(|e| CmdError::usage(e.to_string()))
        }
    }
}

pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchRow>, CmdError> {
    if config.values.is_empty() {
        return Err(CmdError::usage("no sweep values given".into()));
    }
    if config.repeats < 1 {
        return Err(CmdError::usage("repeats must be at least 1".into()));
    }

    // Off-axis datasets are loaded once and reused across values.
    let shared_data = if config.axis == Axis::N {
        None
    } else {
        Some(load_source(&config.source, None)?)
    };

    // Resolve every sweep point up front.
    let mut points = Vec::new();
    for &value in &config.values {
        let (data, eps, min_pts) = match config.axis {
            Axis::Eps => {
                if !value.is_finite() || value <= 0.0 {
                    return Err(CmdError::usage(format!("eps value {value} not positive")));
                }
                (shared_data.clone().unwrap(), value, config.min_pts)
            }
            Axis::MinPts => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(CmdError::usage(format!(
                        "minpts value {value} must be a positive integer"
                    )));
                }
                (shared_data.clone().unwrap(), config.eps, value as usize)
            }
            Axis::N => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(CmdError::usage(format!(
                        "n value {value} must be a positive integer"
                    )));
                }
                (
                    load_source(&config.source, Some(value as usize))?,
                    config.eps,
                    config.min_pts,
                )
            }
        };
        let params = Params::new(eps, min_pts).map_err(|e| CmdError::usage(e.to_string()))?;
        points.push((data, params));
    }

    // Repeats are interleaved across the sweep so transient machine load
    // biases every value alike instead of one value's whole series.
    let mut rows = Vec::new();
    for _ in 0..config.repeats {
        for (data, params) in &points {
            let (_, stats) = grit_dbscan(data, params, config.variant, config.seed);
            rows.push(BenchRow {
                variant: config.variant_name.clone(),
                d: data.dim(),
                n: data.len(),
                eps: params.eps,
                minpts: params.min_pts,
                grid_count: stats.grid_count,
                eta: stats.eta,
                max_kappa: stats.max_kappa,
                dist_evals: stats.dist_evals,
                t_partition: stats.t_partition,
                t_index: stats.t_index,
                t_core: stats.t_core,
                t_merge: stats.t_merge,
                t_assign: stats.t_assign,
                t_total: stats.t_total(),
                cluster_count: stats.cluster_count,
            });
        }
    }
    Ok(rows)
}
