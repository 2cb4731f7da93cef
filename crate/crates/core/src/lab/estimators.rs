//! Sampled lower estimates of the Bloch semi-norms and the Hardy norm.
//!
//! Suprema are estimated on a radial grid crossed with sphere directions and
//! then refined by a compass search started at the best sample. Samples are
//! evaluated in parallel; reductions break ties by sample index so the result
//! matches sequential evaluation exactly.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::lab::maps::HolomorphicMap;
use crate::lab::sampling::{
    boundary_radii, interior_radii, keyed_rng, scale_point, uniform_sphere_point, SamplingConfig,
    Stream,
};
use crate::matrix::{vector_norm, ComplexScalar};

const REFINE_INITIAL_STEP: f64 = 0.05;
const REFINE_FINAL_STEP: f64 = 1e-12;
const REFINE_MAX_EVALUATIONS: usize = 20_000;

/// A one-sided estimate of `sup_z w(z)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupremumEstimate {
    /// Best value over the sample grid; never decreases when directions are added.
    pub sampled: f64,
    /// Value after local refinement, `>= sampled`.
    pub refined: f64,
    /// Where `refined` was attained.
    #[serde(serialize_with = "crate::lab::serialize_point")]
    pub location: Vec<ComplexScalar>,
    pub samples: usize,
}

impl SupremumEstimate {
    pub fn value(&self) -> f64 {
        self.refined
    }

    pub fn refinement_gain(&self) -> f64 {
        self.refined - self.sampled
    }
}

/// Lower estimate of `‖f‖_α = sup (1-|z|²)^α |f'(z)|`.
pub fn estimate_alpha_seminorm<F: HolomorphicMap + ?Sized>(
    f: &F,
    alpha: f64,
    cfg: &SamplingConfig,
) -> Result<SupremumEstimate> {
    estimate_supremum(f.dim(), cfg, |z| {
        let w = 1.0 - vector_norm(z).powi(2);
        Ok(w.max(0.0).powf(alpha) * f.jacobian(z)?.operator_norm())
    })
}

/// Lower estimate of `‖f‖_{0,α} = sup (1-|z|²)^{α(n+1)/(2n)} |det f'(z)|^{1/n}`.
pub fn estimate_det_seminorm<F: HolomorphicMap + ?Sized>(
    f: &F,
    alpha: f64,
    cfg: &SamplingConfig,
) -> Result<SupremumEstimate> {
    let n = f.dim() as f64;
    let exponent = alpha * (n + 1.0) / (2.0 * n);
    estimate_supremum(f.dim(), cfg, |z| {
        let w = 1.0 - vector_norm(z).powi(2);
        Ok(w.max(0.0).powf(exponent) * f.jacobian_det(z)?.norm().powf(1.0 / n))
    })
}

fn estimate_supremum<W>(n: usize, cfg: &SamplingConfig, weight: W) -> Result<SupremumEstimate>
where
    W: Fn(&[ComplexScalar]) -> Result<f64> + Sync,
{
    let radii = interior_radii(cfg.radial_grid);
    let directions: Vec<Vec<ComplexScalar>> = (0..cfg.sphere_samples)
        .into_par_iter()
        .map(|j| uniform_sphere_point(&mut keyed_rng(cfg.seed, Stream::SupremumDirections, j as u64), n))
        .collect();
    let total = radii.len() * directions.len();
    let (best_value, best_index) = (0..total)
        .into_par_iter()
        .map(|idx| {
            let z = scale_point(&directions[idx % directions.len()], radii[idx / directions.len()]);
            weight(&z).map(|v| (v, idx))
        })
        .try_reduce(|| (f64::NEG_INFINITY, usize::MAX), |a, b| Ok(better(a, b)))?;
    let start = scale_point(
        &directions[best_index % directions.len()],
        radii[best_index / directions.len()],
    );
    let (refined, location) = compass_search(&weight, start, best_value)?;
    Ok(SupremumEstimate {
        sampled: best_value,
        refined,
        location,
        samples: total,
    })
}

// Larger value wins; equal values go to the smaller index.
fn better(a: (f64, usize), b: (f64, usize)) -> (f64, usize) {
    match a.0.total_cmp(&b.0) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => {
            if a.1 <= b.1 {
                a
            } else {
                b
            }
        }
    }
}

// Coordinate ascent over the 2n real coordinates, halving the step when no
// move improves; moves that leave the open ball are rejected.
fn compass_search<W>(
    weight: &W,
    start: Vec<ComplexScalar>,
    start_value: f64,
) -> Result<(f64, Vec<ComplexScalar>)>
where
    W: Fn(&[ComplexScalar]) -> Result<f64>,
{
    let mut best = start;
    let mut best_value = start_value;
    let mut step = REFINE_INITIAL_STEP;
    let mut evaluations = 0;
    while step > REFINE_FINAL_STEP && evaluations < REFINE_MAX_EVALUATIONS {
        let mut improved = false;
        for coord in 0..2 * best.len() {
            for sign in [1.0, -1.0] {
                let mut trial = best.clone();
                let delta = if coord % 2 == 0 {
                    ComplexScalar::new(sign * step, 0.0)
                } else {
                    ComplexScalar::new(0.0, sign * step)
                };
                trial[coord / 2] += delta;
                if vector_norm(&trial) >= 1.0 {
                    continue;
                }
                evaluations += 1;
                let value = weight(&trial)?;
                if value > best_value {
                    best_value = value;
                    best = trial;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok((best_value, best))
}

/// Monte Carlo estimate of the Hardy norm `sup_r (∫ |f(rζ)|ᵖ dσ(ζ))^{1/p}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HardyNormEstimate {
    /// Largest integral mean over the radial grid.
    pub value: f64,
    /// Delta-method standard error of `value`.
    pub standard_error: f64,
    /// Radius at which `value` was observed.
    pub radius: f64,
    pub samples: usize,
}

// Directions per chunk; chunk sums are combined in index order.
const HARDY_CHUNK: usize = 1024;

/// Estimates `‖f‖_p` from integral means over spheres `r∂𝔹ⁿ`.
///
/// Radii `sin(πk/(2N))`, `k = 1..=N`, end at `r = 1`: the maps here are
/// continuous on the closed ball and their integral means increase with `r`,
/// so the boundary mean is the supremum. All radii share the same directions.
pub fn estimate_hardy_norm<F: HolomorphicMap + ?Sized>(
    f: &F,
    p: f64,
    cfg: &SamplingConfig,
) -> Result<HardyNormEstimate> {
    if !(p.is_finite() && p > 0.0) {
        return Err(domain("estimate_hardy_norm", format!("p must be > 0, got {p}")));
    }
    let n = f.dim();
    let radii = boundary_radii(cfg.radial_grid);
    let chunks = cfg.sphere_samples.div_ceil(HARDY_CHUNK);
    let partials: Vec<Vec<(f64, f64)>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut sums = vec![(0.0, 0.0); radii.len()];
            let end = ((chunk + 1) * HARDY_CHUNK).min(cfg.sphere_samples);
            for j in chunk * HARDY_CHUNK..end {
                let zeta =
                    uniform_sphere_point(&mut keyed_rng(cfg.seed, Stream::HardyDirections, j as u64), n);
                for (k, &r) in radii.iter().enumerate() {
                    let value = vector_norm(&f.eval_closed(&scale_point(&zeta, r))?).powf(p);
                    sums[k].0 += value;
                    sums[k].1 += value * value;
                }
            }
            Ok(sums)
        })
        .collect::<Result<_>>()?;
    let count = cfg.sphere_samples as f64;
    let mut best = HardyNormEstimate {
        value: f64::NEG_INFINITY,
        standard_error: 0.0,
        radius: radii[0],
        samples: cfg.sphere_samples,
    };
    for (k, &r) in radii.iter().enumerate() {
        let (sum, sum_sq) = partials
            .iter()
            .fold((0.0, 0.0), |acc, chunk| (acc.0 + chunk[k].0, acc.1 + chunk[k].1));
        let mean = sum / count;
        let variance = if cfg.sphere_samples > 1 {
            ((sum_sq - sum * sum / count) / (count - 1.0)).max(0.0)
        } else {
            0.0
        };
        let norm = mean.powf(1.0 / p);
        if norm > best.value {
            let mean_error = (variance / count).sqrt();
            let standard_error = if mean > 0.0 {
                norm / (p * mean) * mean_error
            } else {
                0.0
            };
            best = HardyNormEstimate {
                value: norm,
                standard_error,
                radius: r,
                samples: cfg.sphere_samples,
            };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::BlochClassParams;
    use crate::lab::maps::{ExtremalMap, Monomial, PolyMap};

    fn c(re: f64, im: f64) -> ComplexScalar {
        ComplexScalar::new(re, im)
    }

    fn cfg(seed: u64, sphere: usize, radial: usize) -> SamplingConfig {
        SamplingConfig::new(seed, sphere, radial, 1).unwrap()
    }

    #[test]
    fn seminorms_of_simple_maps() {
        let constant = PolyMap::constant(&[c(0.3, 0.1), c(-2.0, 0.0)]).unwrap();
        assert_eq!(estimate_alpha_seminorm(&constant, 1.0, &cfg(1, 64, 16)).unwrap().value(), 0.0);
        assert_eq!(estimate_det_seminorm(&constant, 1.0, &cfg(1, 64, 16)).unwrap().value(), 0.0);

        let id = PolyMap::identity(1);
        let a = estimate_alpha_seminorm(&id, 1.0, &cfg(2, 64, 32)).unwrap();
        assert!((a.value() - 1.0).abs() < 1e-6);
        let d = estimate_det_seminorm(&id, 1.0, &cfg(2, 64, 32)).unwrap();
        assert!((d.value() - 1.0).abs() < 1e-6);

        let scaled = PolyMap::univariate(&[c(0.0, 0.0), c(0.0, 0.6)]).unwrap();
        assert!((estimate_det_seminorm(&scaled, 1.0, &cfg(2, 64, 32)).unwrap().value() - 0.6).abs() < 1e-9);
    }

    #[test]
    fn seminorm_of_z_squared() {
        let square = PolyMap::new(1, vec![vec![Monomial::new(c(1.0, 0.0), vec![2])]]).unwrap();
        let est = estimate_alpha_seminorm(&square, 1.0, &cfg(3, 256, 64)).unwrap();
        let exact = 4.0 / (3.0 * 3f64.sqrt());
        assert!(est.value() <= exact + 1e-12);
        assert!((est.value() - exact).abs() < 1e-4);
        assert!(est.refinement_gain() >= 0.0);
    }

    #[test]
    fn extremal_map_has_unit_det_seminorm() {
        for (alpha, n, lambda) in [(1.0, 1, 1.0), (1.0, 1, 0.5), (0.5, 2, 0.25), (2.0, 3, 0.5)] {
            let f = ExtremalMap::new(BlochClassParams::new(alpha, n, lambda, 1.0).unwrap()).unwrap();
            let est = estimate_det_seminorm(&f, alpha, &cfg(5, 256, 64)).unwrap();
            assert!((est.value() - 1.0).abs() < 2e-3, "alpha={alpha} n={n} lambda={lambda}: {}", est.value());
            assert!(est.value() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn sampled_estimate_is_monotone_in_sample_count() {
        let f = PolyMap::univariate(&[c(0.1, 0.0), c(0.4, -0.2), c(-0.3, 0.5), c(0.7, 0.1)]).unwrap();
        let mut previous = f64::NEG_INFINITY;
        for sphere in [1, 4, 16, 64, 256] {
            let est = estimate_det_seminorm(&f, 1.5, &cfg(8, sphere, 32)).unwrap();
            assert!(est.sampled >= previous);
            assert!(est.refined >= est.sampled);
            previous = est.sampled;
        }
    }

    #[test]
    fn estimates_do_not_depend_on_thread_count() {
        let f = PolyMap::univariate(&[c(0.0, 0.0), c(0.5, 0.2), c(0.3, -0.4), c(0.1, 0.1)]).unwrap();
        let run = || {
            (
                estimate_alpha_seminorm(&f, 1.0, &cfg(4, 300, 40)).unwrap(),
                estimate_hardy_norm(&f, 1.5, &cfg(4, 5000, 16)).unwrap(),
            )
        };
        let parallel = run();
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(run);
        assert_eq!(parallel, single);
    }

    #[test]
    fn hardy_norm_of_constants_and_identity() {
        let constant = PolyMap::constant(&[c(0.3, 0.4), c(0.0, 0.0)]).unwrap();
        let est = estimate_hardy_norm(&constant, 3.0, &cfg(1, 500, 8)).unwrap();
        assert!((est.value - 0.5).abs() < 1e-14);

        let id = PolyMap::identity(1);
        let est = estimate_hardy_norm(&id, 2.0, &cfg(1, 1000, 8)).unwrap();
        assert!((est.value - 1.0).abs() <= 3.0 * est.standard_error + 1e-12);
        assert_eq!(est.radius, 1.0);
        assert!(estimate_hardy_norm(&id, 0.0, &cfg(1, 10, 2)).is_err());
    }

    #[test]
    fn hardy_norm_of_a_coordinate_function() {
        let f = PolyMap::new(
            2,
            vec![
                vec![Monomial::new(c(1.0, 0.0), vec![1, 0])],
                vec![],
            ],
        )
        .unwrap();
        let est = estimate_hardy_norm(&f, 2.0, &cfg(21, 100_000, 8)).unwrap();
        assert!((est.value - 0.5f64.sqrt()).abs() <= 3.0 * est.standard_error);
        assert!(est.standard_error > 0.0 && est.standard_error < 2e-3);
    }
}
