//! Randomized equivalence campaign: every trial clusters one random
//! instance with the brute-force reference and both pipeline variants and
//! compares the three pairwise.
//!
//! Instances mix uniform, integer-valued (exact boundary distances), and
//! seed-spreader clustered data over dimensions 2, 3, and 5. Per-trial
//! seeds derive deterministically from the master seed, so campaigns are
//! reproducible and individual trials can be replayed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use grit_dbscan::cluster::{grit_dbscan, Variant};
use grit_dbscan::datagen::{seed_spreader, DensityMode, GenConfig};
use grit_dbscan::oracle::{brute_dbscan, equivalent};
use grit_dbscan::points::{Clustering, Dataset, Params, PointClass};

/// Deliberate fault for checking the failure path end to end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Flip the class of point 0 in the breadth-first result.
    FlipCore,
}

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub trials: usize,
    pub max_n: usize,
    pub seed: u64,
    pub fault: Option<Fault>,
}

/// Outcome of one trial.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub trial: usize,
    pub n: usize,
    pub d: usize,
    pub oracle_vs_bfs: bool,
    pub oracle_vs_ldf: bool,
    pub bfs_vs_ldf: bool,
    pub bfs_merge_tests: usize,
    pub ldf_merge_tests: usize,
    pub max_kappa: usize,
    /// First failing comparison's diagnostic, empty when all passed.
    pub detail: String,
}

impl TrialRecord {
    pub fn passed(&self) -> bool {
        self.oracle_vs_bfs && self.oracle_vs_ldf && self.bfs_vs_ldf
    }
}

/// A failing instance, shrunk by greedy chunk removal, ready to be written
/// to disk for replay.
#[derive(Debug, Clone)]
pub struct FailingInstance {
    pub trial: usize,
    pub data: Dataset,
    pub params: Params,
    pub detail: String,
}

#[derive(Debug)]
pub struct CampaignResult {
    pub records: Vec<TrialRecord>,
    pub failure: Option<FailingInstance>,
}

impl CampaignResult {
    pub fn all_passed(&self) -> bool {
        self.records.iter().all(|r| r.passed())
    }
}

fn mix_seed(master: u64, trial: u64) -> u64 {
    let mut z = master ^ trial.wrapping_mul(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn random_instance(rng: &mut ChaCha8Rng, max_n: usize) -> (Dataset, Params) {
    let d = [2usize, 3, 5][rng.random_range(0..3)];
    let n = 1 + rng.random_range(0..max_n);
    let style = rng.random::<f64>();
    if style < 0.2 && n >= 3 {
        // Clustered data on the generator's native domain.
        let mut cfg = GenConfig::new(
            n,
            d,
            if rng.random::<f64>() < 0.5 {
                DensityMode::Similar
            } else {
                DensityMode::Variable
            },
            rng.random::<u64>(),
        );
        cfg.points_per_step = 1 + rng.random_range(0..20);
        cfg.restart_probability = 0.05 + rng.random::<f64>() * 0.3;
        cfg.step_radius = 1000.0 + rng.random::<f64>() * 4000.0;
        cfg.noise_fraction = rng.random::<f64>() * 0.2;
        let data = seed_spreader(&cfg).expect("valid generator config");
        let eps = 500.0 + rng.random::<f64>() * 12_000.0;
        let min_pts = 1 + rng.random_range(0..10);
        return (data, Params::new(eps, min_pts).unwrap());
    }

    let integer_coords = style < 0.5;
    let span = 6.0 + rng.random::<f64>() * 18.0;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..d)
                .map(|_| {
                    let c = rng.random::<f64>() * span;
                    if integer_coords {
                        c.floor()
                    } else {
                        c
                    }
                })
                .collect()
        })
        .collect();
    let data = Dataset::from_rows(d, &rows).unwrap();
    let eps = if integer_coords {
        1.0 + rng.random_range(0..5) as f64
    } else {
        0.4 + rng.random::<f64>() * 4.0
    };
    let min_pts = 1 + rng.random_range(0..8);
    (data, Params::new(eps, min_pts).unwrap())
}

fn apply_fault(fault: Option<Fault>, clustering: &mut Clustering) {
    if let (Some(Fault::FlipCore), false) = (fault, clustering.is_empty()) {
        clustering.classes[0] = match clustering.classes[0] {
            PointClass::Core => PointClass::Border,
            _ => PointClass::Core,
        };
    }
}

/// Runs one trial; the record carries all comparison outcomes and merge
/// counters.
fn run_trial(
    trial: usize,
    data: &Dataset,
    params: &Params,
    seed: u64,
    fault: Option<Fault>,
) -> TrialRecord {
    let reference = brute_dbscan(data, params);
    let (mut bfs, bfs_stats) = grit_dbscan(data, params, Variant::Bfs, seed);
    let (ldf, ldf_stats) = grit_dbscan(data, params, Variant::Ldf, seed);
    apply_fault(fault, &mut bfs);

    let ob = equivalent(data, params.eps, &reference, &bfs);
    let ol = equivalent(data, params.eps, &reference, &ldf);
    let bl = equivalent(data, params.eps, &bfs, &ldf);
    let detail = if !ob.equivalent {
        format!("oracle vs grit: {}", ob.detail)
    } else if !ol.equivalent {
        format!("oracle vs grit-ldf: {}", ol.detail)
    } else if !bl.equivalent {
        format!("grit vs grit-ldf: {}", bl.detail)
    } else {
        String::new()
    };

    TrialRecord {
        trial,
        n: data.len(),
        d: data.dim(),
        oracle_vs_bfs: ob.equivalent,
        oracle_vs_ldf: ol.equivalent,
        bfs_vs_ldf: bl.equivalent,
        bfs_merge_tests: bfs_stats.merge_tests,
        ldf_merge_tests: ldf_stats.merge_tests,
        max_kappa: bfs_stats.max_kappa.max(ldf_stats.max_kappa),
        detail,
    }
}

fn still_fails(data: &Dataset, params: &Params, seed: u64, fault: Option<Fault>) -> bool {
    !run_trial(0, data, params, seed, fault).passed()
}

/// Greedy chunk-removal shrink: repeatedly drop halves, quarters, ... down
/// to single points while the instance keeps failing.
fn shrink(data: &Dataset, params: &Params, seed: u64, fault: Option<Fault>) -> Dataset {
    let mut rows: Vec<Vec<f64>> = data.iter().map(|p| p.to_vec()).collect();
    let mut chunk = rows.len() / 2;
    while chunk >= 1 {
        let mut start = 0;
        let mut progressed = false;
        while start < rows.len() && rows.len() > 1 {
            let end = (start + chunk).min(rows.len());
            if end - start >= rows.len() {
                break; // dropping everything is not a candidate
            }
            let mut candidate = rows.clone();
            candidate.drain(start..end);
            let cand_data = Dataset::from_rows(candidate[0].len(), &candidate).unwrap();
            if still_fails(&cand_data, params, seed, fault) {
                rows = candidate;
                progressed = true;
                // Re-test the same start against the shifted tail.
            } else {
                start = end;
            }
        }
        if !progressed {
            chunk /= 2;
        }
    }
    Dataset::from_rows(rows[0].len(), &rows).unwrap()
}

pub fn run_campaign(config: &CampaignConfig) -> CampaignResult {
    let mut records = Vec::with_capacity(config.trials);
    let mut failure = None;

    for trial in 0..config.trials {
        let trial_seed = mix_seed(config.seed, trial as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        let (data, params) = random_instance(&mut rng, config.max_n);
        let record = run_trial(trial, &data, &params, trial_seed, config.fault);
        if !record.passed() && failure.is_none() {
            let shrunk = shrink(&data, &params, trial_seed, config.fault);
            failure = Some(FailingInstance {
                trial,
                data: shrunk,
                params,
                detail: record.detail.clone(),
            });
        }
        records.push(record);
    }

    CampaignResult { records, failure }
}
