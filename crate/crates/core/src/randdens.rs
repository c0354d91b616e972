//! Random test densities on `[0, 1]`: `ρ ∝ exp(g)` with `g` a centered
//! Gaussian process with Matérn-5/2 covariance.

use std::path::{Path, PathBuf};

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::io::write_density_csv;
use crate::measures::{Interval, Measure, MeasureKind};

/// Largest diagonal jitter tried before giving up on the factorization.
pub const MAX_JITTER: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct GPConfig {
    pub lengthscale: f64,
    pub grid_size: usize,
    /// Initial diagonal jitter; multiplied by 10 on each failed
    /// factorization up to [`MAX_JITTER`].
    pub jitter: f64,
    pub seed: u64,
    /// Smallest admissible value of the normalized density on the grid.
    pub rejection_floor: f64,
    pub max_redraws: usize,
}

impl Default for GPConfig {
    fn default() -> Self {
        Self {
            lengthscale: 0.3,
            grid_size: 200,
            jitter: 1e-10,
            seed: 0,
            rejection_floor: 0.05,
            max_redraws: 1000,
        }
    }
}

/// `(1 + √5 r/θ + 5r²/(3θ²)) exp(-√5 r/θ)` with `r = |x - y|`.
pub fn matern52(x: f64, y: f64, theta: f64) -> f64 {
    let s = 5f64.sqrt() * (x - y).abs() / theta;
    (1.0 + s + s * s / 3.0) * (-s).exp()
}

/// Factorized covariance of the process on the grid.
#[derive(Debug, Clone)]
pub struct GpSampler {
    config: GPConfig,
    grid: Vec<f64>,
    factor: Cholesky<f64, Dyn>,
    jitter: f64,
}

impl GpSampler {
    pub fn new(config: &GPConfig) -> Result<Self> {
        if !(config.lengthscale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lengthscale must be positive, got {}",
                config.lengthscale
            )));
        }
        if !(config.jitter >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "jitter must be nonnegative, got {}",
                config.jitter
            )));
        }
        if config.grid_size < 2 {
            return Err(Error::InvalidParameter(
                "GP grid needs at least two points".into(),
            ));
        }
        let grid = Interval::unit().linspace(config.grid_size);
        let cov = DMatrix::from_fn(grid.len(), grid.len(), |i, j| {
            matern52(grid[i], grid[j], config.lengthscale)
        });
        let mut jitter = config.jitter;
        loop {
            let shifted = &cov + DMatrix::identity(grid.len(), grid.len()) * jitter;
            if let Some(factor) = shifted.cholesky() {
                return Ok(Self {
                    config: config.clone(),
                    grid,
                    factor,
                    jitter,
                });
            }
            let next = if jitter == 0.0 { 1e-10 } else { jitter * 10.0 };
            if next > MAX_JITTER * (1.0 + 1e-9) {
                return Err(Error::FactorizationFailure(jitter));
            }
            jitter = next;
        }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Jitter that made the covariance factorizable.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// One path of `g` on the grid.
    pub fn sample_path(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let z = DVector::from_fn(self.grid.len(), |_, _| StandardNormal.sample(rng));
        (self.factor.l_dirty().lower_triangle() * z)
            .iter()
            .copied()
            .collect()
    }

    /// Draws paths until the normalized `exp(g)` has grid minimum at least
    /// the rejection floor. Returns the density and the number of rejected
    /// draws.
    pub fn sample_density(&self, rng: &mut ChaCha8Rng) -> Result<(Measure, usize)> {
        for rejected in 0..self.config.max_redraws {
            let values: Vec<f64> = self.sample_path(rng).into_iter().map(f64::exp).collect();
            let measure = Measure::tabulated(Interval::unit(), values)?;
            let min = match measure.kind() {
                MeasureKind::Tabulated { values } => {
                    values.iter().copied().fold(f64::INFINITY, f64::min)
                }
                _ => unreachable!(),
            };
            if min >= self.config.rejection_floor {
                return Ok((measure, rejected));
            }
        }
        Err(Error::RejectionLimit(self.config.max_redraws))
    }

    /// Generator for density `index`: stream `index` of the seeded ChaCha.
    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(index);
        rng
    }
}

/// First density of the stream family for `config.seed`.
pub fn sample_density(config: &GPConfig) -> Result<Measure> {
    let sampler = GpSampler::new(config)?;
    sampler
        .sample_density(&mut sampler.stream(0))
        .map(|(m, _)| m)
}

/// `count` densities; density `i` comes from stream `i`, so each one is
/// reproducible on its own.
pub fn sample_batch(config: &GPConfig, count: usize) -> Result<Vec<Measure>> {
    let sampler = GpSampler::new(config)?;
    (0..count)
        .map(|i| {
            sampler
                .sample_density(&mut sampler.stream(i as u64))
                .map(|(m, _)| m)
        })
        .collect()
}

/// Writes `density_000.csv`, `density_001.csv`, … into `dir`.
pub fn write_batch(dir: &Path, densities: &[Measure]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    densities
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let path = dir.join(density_file_name(i));
            write_density_csv(m, &path, 0)?;
            Ok(path)
        })
        .collect()
}

pub fn density_file_name(index: usize) -> String {
    format!("density_{index:03}.csv")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::read_density_csv;

    fn grid_values(m: &Measure) -> &[f64] {
        match m.kind() {
            MeasureKind::Tabulated { values } => values,
            _ => panic!("expected a tabulated density"),
        }
    }

    #[test]
    fn matern_basics() {
        assert_eq!(matern52(0.3, 0.3, 0.3), 1.0);
        assert!(matern52(0.0, 50.0, 0.3) < 1e-100);
        assert_eq!(matern52(0.1, 0.7, 0.3), matern52(0.7, 0.1, 0.3));
        let r: f64 = 0.2;
        let s = 5f64.sqrt() * r / 0.3;
        let expected = (1.0 + 5f64.sqrt() * r / 0.3 + 5.0 * r * r / (3.0 * 0.09)) * (-s).exp();
        assert!((matern52(0.0, r, 0.3) - expected).abs() < 1e-15);
    }

    #[test]
    fn fixed_seed_is_bitwise_reproducible() {
        let config = GPConfig {
            seed: 42,
            ..Default::default()
        };
        let first = sample_density(&config).unwrap();
        let second = sample_density(&config).unwrap();
        assert_eq!(grid_values(&first), grid_values(&second));
        let other = sample_density(&GPConfig { seed: 43, ..config }).unwrap();
        assert_ne!(grid_values(&first), grid_values(&other));
    }

    #[test]
    fn batch_respects_floor_and_normalization() {
        let config = GPConfig {
            seed: 7,
            ..Default::default()
        };
        let batch = sample_batch(&config, 100).unwrap();
        assert_eq!(batch.len(), 100);
        for m in &batch {
            assert!(grid_values(m).iter().all(|&v| v >= 0.05));
            let mass = m.integrate_segment(|_| 1.0, 0.0, 1.0);
            assert!((mass - 1.0).abs() < 1e-12);
        }
        // stream i does not depend on how many densities precede it
        let sampler = GpSampler::new(&config).unwrap();
        let (tenth, _) = sampler.sample_density(&mut sampler.stream(10)).unwrap();
        assert_eq!(grid_values(&tenth), grid_values(&batch[10]));
    }

    #[test]
    fn long_lengthscale_gives_nearly_uniform_density() {
        let config = GPConfig {
            lengthscale: 100.0,
            seed: 3,
            ..Default::default()
        };
        let m = sample_density(&config).unwrap();
        let v = grid_values(&m);
        let max = v.iter().copied().fold(0.0, f64::max);
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(max / min < 1.1, "{}", max / min);
    }

    #[test]
    fn empirical_covariance_matches_kernel() {
        let config = GPConfig {
            seed: 11,
            ..Default::default()
        };
        let sampler = GpSampler::new(&config).unwrap();
        let mut rng = sampler.stream(0);
        let samples: Vec<Vec<f64>> = (0..2000).map(|_| sampler.sample_path(&mut rng)).collect();
        let grid = sampler.grid();
        for (i, j) in [(0, 0), (0, 30), (50, 120)] {
            let n = samples.len() as f64;
            let cov = samples.iter().map(|g| g[i] * g[j]).sum::<f64>() / n;
            let (kii, kjj, kij) = (
                matern52(grid[i], grid[i], 0.3),
                matern52(grid[j], grid[j], 0.3),
                matern52(grid[i], grid[j], 0.3),
            );
            let se = ((kii * kjj + kij * kij) / n).sqrt();
            assert!(
                (cov - kij).abs() <= 3.0 * se,
                "pair ({i},{j}): {cov} vs {kij} (se {se})"
            );
        }
    }

    #[test]
    fn invalid_configs() {
        assert!(GpSampler::new(&GPConfig {
            lengthscale: 0.0,
            ..Default::default()
        })
        .is_err());
        assert!(GpSampler::new(&GPConfig {
            jitter: -1.0,
            ..Default::default()
        })
        .is_err());
        let impossible = GPConfig {
            rejection_floor: 2.0,
            max_redraws: 5,
            ..Default::default()
        };
        assert!(matches!(
            sample_density(&impossible),
            Err(Error::RejectionLimit(5))
        ));
    }

    #[test]
    fn batch_files_load_back() {
        let dir = tempfile::tempdir().unwrap();
        let batch = sample_batch(&GPConfig::default(), 3).unwrap();
        let paths = write_batch(dir.path(), &batch).unwrap();
        assert!(paths[2].ends_with("density_002.csv"));
        let back = read_density_csv(&paths[1]).unwrap();
        for (x, y) in grid_values(&back).iter().zip(grid_values(&batch[1])) {
            assert!((x - y).abs() < 1e-14 * y.abs().max(1.0));
        }
    }
}
