//! Subcommand implementations. Each returns `Ok(())` for exit code 0 or a
//! [`CmdError`] carrying the exit code (1 validation failure, 2 usage
//! error) and a message.

use std::fs;
use std::time::Instant;

use grit_dbscan::cluster::{grit_dbscan, RunStats, Variant};
use grit_dbscan::datagen::{normalize_to_domain, seed_spreader, DensityMode, GenConfig};
use grit_dbscan::oracle::brute_dbscan;
use grit_dbscan::points::Params;

use crate::args::{BenchArgs, ClusterArgs, GenerateArgs, VerifyArgs};
use crate::bench::{run_bench, Axis, BenchConfig, BenchSource, CSV_HEADER};
use crate::io::{read_dataset, write_dataset, write_labels};
use crate::verify::{run_campaign, CampaignConfig, Fault};
use crate::CmdError;

/// Threshold above which the observed merge iteration count draws a
/// warning; far beyond anything seen on clustered data.
pub const KAPPA_WARN: usize = 32;

fn parse_variant(name: &str) -> Result<Variant, CmdError> {
    match name {
        "grit" => Ok(Variant::Bfs),
        "grit-ldf" => Ok(Variant::Ldf),
        other => Err(CmdError::usage(format!(
            "unknown variant {other:?} (expected grit, grit-ldf, or brute)"
        ))),
    }
}

fn parse_mode(name: &str) -> Result<DensityMode, CmdError> {
    match name {
        "simden" => Ok(DensityMode::Similar),
        "varden" => Ok(DensityMode::Variable),
        other => Err(CmdError::usage(format!(
            "unknown mode {other:?} (expected simden or varden)"
        ))),
    }
}

fn print_stats(stats: &RunStats) {
    eprintln!("grid_count={}", stats.grid_count);
    eprintln!("eta={}", stats.eta);
    eprintln!("clusters={}", stats.cluster_count);
    eprintln!("max_kappa={}", stats.max_kappa);
    eprintln!("merge_tests={}", stats.merge_tests);
    eprintln!("dist_evals={}", stats.dist_evals);
    eprintln!("t_partition={:.6}", stats.t_partition);
    eprintln!("t_index={:.6}", stats.t_index);
    eprintln!("t_core={:.6}", stats.t_core);
    eprintln!("t_merge={:.6}", stats.t_merge);
    eprintln!("t_assign={:.6}", stats.t_assign);
    eprintln!("t_total={:.6}", stats.t_total());
    if stats.max_kappa > KAPPA_WARN {
        eprintln!(
            "warning: max_kappa={} exceeds {KAPPA_WARN}",
            stats.max_kappa
        );
    }
}

pub fn cmd_cluster(args: &ClusterArgs) -> Result<(), CmdError> {
    let params = Params::new(args.eps, args.minpts)
        .and_then(|p| p.with_delta(args.delta))
        .map_err(|e| CmdError::usage(e.to_string()))?;

    let mut data = read_dataset(&args.input)?;
    if args.normalize && !data.is_empty() {
        data = normalize_to_domain(&data);
    }

    let (clustering, stats) = match args.variant.as_str() {
        "brute" => {
            let t = Instant::now();
            let clustering = brute_dbscan(&data, &params);
            // The reference has no stage breakdown; neighborhood
            // counting dominates, so the whole run lands in t_core.
            let mut stats = RunStats {
                cluster_count: clustering.cluster_count,
                ..RunStats::default()
            };
            stats.t_core = t.elapsed().as_secs_f64();
            (clustering, stats)
        }
        name => {
            let variant = parse_variant(name)?;
            grit_dbscan(&data, &params, variant, args.seed)
        }
    };

    write_labels(&args.output, &clustering, args.classes)?;
    eprintln!("variant={}", args.variant);
    eprintln!("d={}", data.dim());
    eprintln!("n={}", data.len());
    eprintln!("eps={}", args.eps);
    eprintln!("minpts={}", args.minpts);
    print_stats(&stats);
    Ok(())
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<(), CmdError> {
    let config = GenConfig {
        n: args.n,
        d: args.d,
        mode: parse_mode(&args.mode)?,
        restart_probability: args.restart_prob,
        points_per_step: args.points_per_step,
        step_radius: args.step_radius,
        noise_fraction: args.noise_fraction,
        seed: args.seed,
    };
    let data = seed_spreader(&config).map_err(|e| CmdError::usage(e.to_string()))?;
    write_dataset(&args.output, &data)?;
    eprintln!("generated n={} d={} -> {}", data.len(), data.dim(), args.output.display());
    Ok(())
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<(), CmdError> {
    let fault = match args.inject_fault.as_deref() {
        None => None,
        Some("flip-core") => Some(Fault::FlipCore),
        Some(other) => {
            return Err(CmdError::usage(format!("unknown fault {other:?}")));
        }
    };
    let config = CampaignConfig {
        trials: args.trials,
        max_n: args.max_n,
        seed: args.seed,
        fault,
    };
    let result = run_campaign(&config);
    let failures = result.records.iter().filter(|r| !r.passed()).count();
    println!(
        "trials={} passed={} failed={failures}",
        result.records.len(),
        result.records.len() - failures,
    );

    if let Some(instance) = &result.failure {
        fs::create_dir_all(&args.repro_dir).map_err(|e| {
            CmdError::validation(format!(
                "cannot create {}: {e}",
                args.repro_dir.display()
            ))
        })?;
        let data_path = args.repro_dir.join("points.csv");
        write_dataset(&data_path, &instance.data)?;
        let params_path = args.repro_dir.join("params.txt");
        fs::write(
            &params_path,
            format!(
                "trial={}\neps={}\nminpts={}\ndetail={}\n",
                instance.trial, instance.params.eps, instance.params.min_pts, instance.detail
            ),
        )
        .map_err(|e| CmdError::validation(format!("cannot write repro: {e}")))?;
        return Err(CmdError::validation(format!(
            "trial {} failed ({}); minimal instance with {} points written to {}",
            instance.trial,
            instance.detail,
            instance.data.len(),
            args.repro_dir.display()
        )));
    }
    Ok(())
}

pub fn cmd_bench(args: &BenchArgs) -> Result<(), CmdError> {
    let axis = match args.axis.as_str() {
        "eps" => Axis::Eps,
        "minpts" => Axis::MinPts,
        "n" => Axis::N,
        other => {
            return Err(CmdError::usage(format!(
                "unknown axis {other:?} (expected eps, minpts, or n)"
            )));
        }
    };
    let mut values = Vec::new();
    for field in args.values.split(',') {
        let v: f64 = field.trim().parse().map_err(|_| {
            CmdError::usage(format!("malformed sweep value {field:?}"))
        })?;
        values.push(v);
    }

    let source = match (&args.input, axis) {
        (Some(path), Axis::N) => {
            let _ = path;
            return Err(CmdError::usage(
                "an n-axis sweep requires the generator, not --input".into(),
            ));
        }
        (Some(path), _) => BenchSource::File {
            path: path.clone(),
            normalize: args.normalize,
        },
        (None, _) => {
            let n = match axis {
                Axis::N => 1, // overridden per value
                _ => args.gen_n.ok_or_else(|| {
                    CmdError::usage("--gen-n is required when no --input is given".into())
                })?,
            };
            let mut cfg = GenConfig::new(n, args.gen_d, parse_mode(&args.gen_mode)?, args.gen_seed);
            cfg.step_radius = args.gen_step_radius;
            cfg.restart_probability = args.gen_restart_prob;
            cfg.noise_fraction = args.gen_noise_fraction;
            BenchSource::Generator(cfg)
        }
    };

    let config = BenchConfig {
        axis,
        values,
        source,
        eps: args.eps,
        min_pts: args.minpts,
        variant: parse_variant(&args.variant)?,
        variant_name: args.variant.clone(),
        repeats: args.repeats,
        seed: args.seed,
    };
    let rows = run_bench(&config)?;

    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in &rows {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    match &args.output {
        Some(path) => fs::write(path, out).map_err(|e| {
            CmdError::validation(format!("cannot write {}: {e}", path.display()))
        })?,
        None => print!("{out}"),
    }
    Ok(())
}
