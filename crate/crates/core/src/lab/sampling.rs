//! Reproducible sampling on spheres and balls of `ℂⁿ`.
//!
//! Every random draw comes from a ChaCha stream keyed by `(seed, purpose)`
//! and positioned by the sample index, so a sample's value depends only on
//! its index and never on the order in which samples are evaluated.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{vector_norm, ComplexScalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SamplingConfig {
    pub seed: u64,
    /// Directions drawn on the unit sphere per radius.
    pub sphere_samples: usize,
    /// Number of radii in the radial grid.
    pub radial_grid: usize,
    /// Point pairs for injectivity checks.
    pub pair_samples: usize,
}

impl SamplingConfig {
    pub fn new(seed: u64, sphere_samples: usize, radial_grid: usize, pair_samples: usize) -> Result<Self> {
        if sphere_samples == 0 || radial_grid == 0 || pair_samples == 0 {
            return Err(Error::InvalidParameter("sample counts must be at least 1".into()));
        }
        Ok(Self {
            seed,
            sphere_samples,
            radial_grid,
            pair_samples,
        })
    }
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            sphere_samples: 2048,
            radial_grid: 64,
            pair_samples: 10_000,
        }
    }
}

/// What a random stream is used for; distinct purposes never share draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    SupremumDirections = 1,
    HardyDirections = 2,
    DistortionPoints = 3,
    InjectivityPairs = 4,
    RandomMaps = 5,
}

/// Generator for sample `index` of stream `stream` under `seed`.
pub fn keyed_rng(seed: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(stream as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// Uniform point on `∂𝔹ⁿ` with respect to the normalized surface measure.
///
/// Normalizes `2n` independent standard Gaussians read as `n` complex coordinates.
pub fn uniform_sphere_point<R: Rng>(rng: &mut R, n: usize) -> Vec<ComplexScalar> {
    loop {
        let v: Vec<ComplexScalar> = (0..n)
            .map(|_| ComplexScalar::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = vector_norm(&v);
        if norm > 0.0 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Uniform point of the ball `𝔹ⁿ(0, radius)` with respect to volume.
pub fn uniform_ball_point<R: Rng>(rng: &mut R, n: usize, radius: f64) -> Vec<ComplexScalar> {
    let direction = uniform_sphere_point(rng, n);
    let r = radius * rng.random::<f64>().powf(1.0 / (2 * n) as f64);
    direction.into_iter().map(|c| c * r).collect()
}

/// `count` radii `sin(πk/(2·count))`, `k = 0..count`: starts at 0, clusters
/// toward 1 and stays below it.
pub fn interior_radii(count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| (std::f64::consts::FRAC_PI_2 * k as f64 / count as f64).sin())
        .collect()
}

/// `count` radii `sin(πk/(2·count))`, `k = 1..=count`: the last one is exactly 1.
pub fn boundary_radii(count: usize) -> Vec<f64> {
    (1..=count)
        .map(|k| (std::f64::consts::FRAC_PI_2 * k as f64 / count as f64).sin())
        .collect()
}

/// `count ≥ 2` radii from 0 to `outer` inclusive, clustered toward `outer`.
pub fn closed_radii(count: usize, outer: f64) -> Vec<f64> {
    let count = count.max(2);
    (0..count)
        .map(|k| outer * (std::f64::consts::FRAC_PI_2 * k as f64 / (count - 1) as f64).sin())
        .map(|r| r.min(outer))
        .collect()
}

pub(crate) fn scale_point(direction: &[ComplexScalar], r: f64) -> Vec<ComplexScalar> {
    direction.iter().map(|c| c * r).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keyed_streams_are_reproducible_and_distinct() {
        let a: f64 = keyed_rng(7, Stream::HardyDirections, 3).random();
        let b: f64 = keyed_rng(7, Stream::HardyDirections, 3).random();
        let c: f64 = keyed_rng(7, Stream::HardyDirections, 4).random();
        let d: f64 = keyed_rng(7, Stream::InjectivityPairs, 3).random();
        let e: f64 = keyed_rng(8, Stream::HardyDirections, 3).random();
        assert_eq!(a, b);
        assert!(a != c && a != d && a != e);
    }

    #[test]
    fn sphere_points_have_unit_norm_and_correct_moments() {
        let samples = 200_000;
        let mut second = 0.0;
        let mut fourth = 0.0;
        for i in 0..samples {
            let p = uniform_sphere_point(&mut keyed_rng(1, Stream::HardyDirections, i), 2);
            assert!((vector_norm(&p) - 1.0).abs() < 1e-14);
            second += p[0].norm_sqr();
            fourth += p[0].norm_sqr().powi(2);
        }
        // On the sphere of C², |ζ₁|² is uniform on [0, 1].
        assert!((second / samples as f64 - 0.5).abs() < 5e-3);
        assert!((fourth / samples as f64 - 1.0 / 3.0).abs() < 5e-3);
    }

    #[test]
    fn ball_points_fill_the_ball_uniformly() {
        let samples = 100_000;
        let inner = (0..samples)
            .filter(|&i| {
                let p = uniform_ball_point(&mut keyed_rng(2, Stream::InjectivityPairs, i), 2, 0.5);
                let r = vector_norm(&p);
                assert!(r <= 0.5);
                r < 0.25
            })
            .count();
        // Volume fraction of the half-radius ball in real dimension 4.
        assert!((inner as f64 / samples as f64 - 1.0 / 16.0).abs() < 5e-3);
    }

    #[test]
    fn radial_grids() {
        let r = interior_radii(64);
        assert_eq!(r[0], 0.0);
        assert!(r.windows(2).all(|w| w[1] > w[0]) && r[63] < 1.0);
        let b = boundary_radii(64);
        assert_eq!(b[63], 1.0);
        assert!(b[0] > 0.0);
        let c = closed_radii(10, 0.4);
        assert_eq!((c[0], c[9]), (0.0, 0.4));
        assert_eq!(closed_radii(1, 0.4).len(), 2);
    }
}
