//! Synthetic clustered data: a seed-spreader random walk plus the integer
//! domain normalization applied to benchmark inputs.
//!
//! The spreader keeps a current location in the `[0, 100000]^d` cube. Each
//! step emits a batch of points uniformly inside a ball around the
//! location, then displaces the location by half the ball radius in a
//! random direction; with a configured probability it instead teleports to
//! a fresh uniform location, starting a new cluster. Similar-density mode
//! keeps one ball radius throughout; variable-density mode draws a fresh
//! radius from `[r, 10r]` at every restart. A configured fraction of
//! uniform noise points is appended last.
//!
//! Generation is a pure function of its configuration: the stream comes
//! from a seeded counter-based generator (ChaCha), so the same
//! configuration reproduces the same dataset on any platform.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::points::Dataset;

/// Upper end of the generation / normalization domain.
pub const DOMAIN_MAX: f64 = 100_000.0;

/// Cluster density regime of the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityMode {
    /// One ball radius for every cluster.
    Similar,
    /// A fresh radius in `[step_radius, 10 * step_radius]` per cluster.
    Variable,
}

/// Seed-spreader configuration.
#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    pub n: usize,
    pub d: usize,
    pub mode: DensityMode,
    /// Probability of teleporting to a fresh location after a step.
    pub restart_probability: f64,
    /// Points emitted per step.
    pub points_per_step: usize,
    /// Ball radius around the current location (base radius in variable
    /// mode).
    pub step_radius: f64,
    /// Fraction of `n` appended as uniform noise.
    pub noise_fraction: f64,
    pub seed: u64,
}

impl GenConfig {
    /// Configuration with the documented defaults: restart probability
    /// 0.05, 100 points per step, ball radius 1000, no noise.
    pub fn new(n: usize, d: usize, mode: DensityMode, seed: u64) -> Self {
        GenConfig {
            n,
            d,
            mode,
            restart_probability: 0.05,
            points_per_step: 100,
            step_radius: 1000.0,
            noise_fraction: 0.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidParameter {
                name: "n",
                message: "must be at least 1".into(),
            });
        }
        if self.d < 2 {
            return Err(Error::InvalidParameter {
                name: "d",
                message: "must be at least 2".into(),
            });
        }
        if !self.restart_probability.is_finite()
            || self.restart_probability <= 0.0
            || self.restart_probability >= 1.0
        {
            return Err(Error::InvalidParameter {
                name: "restart_probability",
                message: "must lie strictly between 0 and 1".into(),
            });
        }
        if self.points_per_step < 1 {
            return Err(Error::InvalidParameter {
                name: "points_per_step",
                message: "must be at least 1".into(),
            });
        }
        if !self.step_radius.is_finite() || self.step_radius <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "step_radius",
                message: "must be positive".into(),
            });
        }
        if !(0.0..1.0).contains(&self.noise_fraction) {
            return Err(Error::InvalidParameter {
                name: "noise_fraction",
                message: "must lie in [0, 1)".into(),
            });
        }
        Ok(())
    }
}

/// Uniform point in the ball of radius `r` around `center`, clamped into
/// the domain cube: gaussian direction scaled by `r * u^(1/d)`.
fn ball_point(rng: &mut ChaCha8Rng, center: &[f64], r: f64, out: &mut Vec<f64>) {
    let d = center.len();
    let mut dir = vec![0.0f64; d];
    loop {
        let mut norm_sq = 0.0;
        for v in dir.iter_mut() {
            // Box-Muller from two uniforms; avoids ln(0).
            let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
            let u2: f64 = rng.random();
            *v = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
            norm_sq += *v * *v;
        }
        if norm_sq > 0.0 {
            let radius = r * rng.random::<f64>().powf(1.0 / d as f64);
            let scale = radius / norm_sq.sqrt();
            for (j, v) in dir.iter().enumerate() {
                out.push((center[j] + v * scale).clamp(0.0, DOMAIN_MAX));
            }
            return;
        }
    }
}

fn uniform_cube(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.random::<f64>() * DOMAIN_MAX).collect()
}

/// Generates a clustered dataset per the configuration; deterministic for
/// a fixed configuration.
pub fn seed_spreader(config: &GenConfig) -> Result<Dataset> {
    config.validate()?;
    let d = config.d;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let noise_count = (config.noise_fraction * config.n as f64).floor() as usize;
    let cluster_count = config.n - noise_count;

    let mut coords = Vec::with_capacity(config.n * d);
    let mut location = uniform_cube(&mut rng, d);
    let mut radius = match config.mode {
        DensityMode::Similar => config.step_radius,
        DensityMode::Variable => {
            config.step_radius * (1.0 + 9.0 * rng.random::<f64>())
        }
    };

    let mut emitted = 0usize;
    while emitted < cluster_count {
        let batch = config.points_per_step.min(cluster_count - emitted);
        for _ in 0..batch {
            ball_point(&mut rng, &location, radius, &mut coords);
        }
        emitted += batch;

        if rng.random::<f64>() < config.restart_probability {
            location = uniform_cube(&mut rng, d);
            if config.mode == DensityMode::Variable {
                radius = config.step_radius * (1.0 + 9.0 * rng.random::<f64>());
            }
        } else {
            // Drift by half the ball radius in a random direction.
            let mut dir = vec![0.0f64; d];
            let mut norm_sq = 0.0;
            for v in dir.iter_mut() {
                *v = rng.random::<f64>() * 2.0 - 1.0;
                norm_sq += *v * *v;
            }
            if norm_sq > 0.0 {
                let scale = radius / 2.0 / norm_sq.sqrt();
                for (j, v) in dir.iter().enumerate() {
                    location[j] = (location[j] + v * scale).clamp(0.0, DOMAIN_MAX);
                }
            }
        }
    }

    for _ in 0..noise_count {
        coords.extend(uniform_cube(&mut rng, d));
    }

    Dataset::new(d, coords)
}

/// Affine per-column map of `[min, max]` onto `[0, 100000]`, rounded to
/// the nearest integer (stored as reals). Constant columns map to 0.
pub fn normalize_to_domain(data: &Dataset) -> Dataset {
    let d = data.dim();
    let n = data.len();
    if n == 0 {
        return data.clone();
    }
    let mut mins = data.point(0).to_vec();
    let mut maxs = data.point(0).to_vec();
    for p in data.iter().skip(1) {
        for j in 0..d {
            mins[j] = mins[j].min(p[j]);
            maxs[j] = maxs[j].max(p[j]);
        }
    }
    let mut coords = Vec::with_capacity(n * d);
    for p in data.iter() {
        for j in 0..d {
            let spread = maxs[j] - mins[j];
            let v = if spread > 0.0 {
                ((p[j] - mins[j]) / spread * DOMAIN_MAX).round()
            } else {
                0.0
            };
            coords.push(v);
        }
    }
    Dataset::new(d, coords).expect("normalized coordinates are finite")
}
