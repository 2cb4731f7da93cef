//! Closed-form distortion envelopes and growth bounds for the α-Bloch class.
//!
//! For `f` with `‖f‖_{0,α} = 1` and `det f'(0) = λ`, write `a = m(λ)` and
//! `β = α(n+1)`. Then
//!
//! ```text
//! Re det f'(z) ≥ λ(a - |z|) / (a (1 - a|z|)^{β+1})   for |z| ≤ (a₀ + a)/(1 + a₀a)
//! |det f'(z)|  ≤ λ(a + |z|) / (a (1 + a|z|)^{β+1})   for |z| ≤ (a₀ - a)/(1 - a₀a)
//! ```
//!
//! and both envelopes are attained by the extremal map
//! [`ExtremalMap`](crate::lab::ExtremalMap).

use serde::Serialize;

use crate::constants::{BlochClassParams, RootSolverConfig};
use crate::error::{domain, Result};
use crate::quadrature::{integrate, QuadratureConfig};

/// The two radii on which the envelopes are valid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AdmissibleRadii {
    /// `(a₀ + m)/(1 + a₀m)`, domain of the lower envelope.
    pub lower_domain: f64,
    /// `(a₀ - m)/(1 - a₀m)`, domain of the upper envelope.
    pub upper_domain: f64,
}

/// Distortion envelopes for one parameter set, with `m(λ)` solved once.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistortionEnvelope {
    params: BlochClassParams,
    peak: f64,
    root: f64,
}

impl DistortionEnvelope {
    pub fn new(params: BlochClassParams) -> Result<Self> {
        Self::with_solver(params, &RootSolverConfig::default())
    }

    pub fn with_solver(params: BlochClassParams, cfg: &RootSolverConfig) -> Result<Self> {
        Ok(Self {
            params,
            peak: params.profile_peak(),
            root: params.inverse_profile(cfg)?,
        })
    }

    pub fn params(&self) -> &BlochClassParams {
        &self.params
    }

    /// `a₀`.
    pub fn peak(&self) -> f64 {
        self.peak
    }

    /// `m(λ)`.
    pub fn root(&self) -> f64 {
        self.root
    }

    pub fn radii(&self) -> AdmissibleRadii {
        let (a0, m) = (self.peak, self.root);
        AdmissibleRadii {
            lower_domain: (a0 + m) / (1.0 + a0 * m),
            upper_domain: (a0 - m) / (1.0 - a0 * m),
        }
    }

    /// Lower envelope for `Re det f'(z)` at `|z| = z_abs`.
    ///
    /// Negative beyond `m(λ)`; the value is returned as-is since it still
    /// bounds the real part from below.
    pub fn lower(&self, z_abs: f64) -> Result<f64> {
        let radius = self.radii().lower_domain;
        if !(0.0..=radius).contains(&z_abs) {
            return Err(domain(
                "distortion_lower",
                format!("|z| = {z_abs} is outside the admissible radius {radius}"),
            ));
        }
        Ok(self.lower_unchecked(z_abs))
    }

    pub(crate) fn lower_unchecked(&self, z_abs: f64) -> f64 {
        let (m, lambda) = (self.root, self.params.lambda());
        let b = self.params.weight_exponent();
        lambda * (m - z_abs) / (m * (1.0 - m * z_abs).powf(b + 1.0))
    }

    /// Upper envelope for `|det f'(z)|` at `|z| = z_abs`.
    pub fn upper(&self, z_abs: f64) -> Result<f64> {
        let radius = self.radii().upper_domain;
        if !(0.0..=radius).contains(&z_abs) {
            return Err(domain(
                "distortion_upper",
                format!("|z| = {z_abs} is outside the admissible radius {radius}"),
            ));
        }
        Ok(self.upper_unchecked(z_abs))
    }

    pub(crate) fn upper_unchecked(&self, z_abs: f64) -> f64 {
        let (m, lambda) = (self.root, self.params.lambda());
        let b = self.params.weight_exponent();
        lambda * (m + z_abs) / (m * (1.0 + m * z_abs).powf(b + 1.0))
    }
}

pub fn distortion_lower(z_abs: f64, params: &BlochClassParams) -> Result<f64> {
    DistortionEnvelope::new(*params)?.lower(z_abs)
}

pub fn distortion_upper(z_abs: f64, params: &BlochClassParams) -> Result<f64> {
    DistortionEnvelope::new(*params)?.upper(z_abs)
}

pub fn admissible_radii(params: &BlochClassParams) -> Result<AdmissibleRadii> {
    Ok(DistortionEnvelope::new(*params)?.radii())
}

/// Radius of a schlicht ball centered at `f(0)`:
///
/// ```text
/// (λ K^{1-n} / m) ∫₀^m (1-t²)^{α(n-1)} (m - t) / (1 - m t)^{β+1} dt.
/// ```
///
/// The integral is evaluated after the substitution `t = m s`, with the
/// tolerance rescaled so that `cfg.abs_tolerance()` bounds the error of the
/// returned radius.
pub fn schlicht_radius_lower(params: &BlochClassParams, cfg: &QuadratureConfig) -> Result<f64> {
    let m = params.inverse_profile(&RootSolverConfig::default())?;
    let n = params.n() as f64;
    let alpha = params.alpha();
    let b = params.weight_exponent();
    let prefactor = params.lambda() * params.bloch_bound().powf(1.0 - n) * m;
    let integrand = |s: f64| {
        (1.0 - m * m * s * s).powf(alpha * (n - 1.0)) * (1.0 - s) / (1.0 - m * m * s).powf(b + 1.0)
    };
    let scaled = cfg.with_tolerance(cfg.abs_tolerance() / prefactor)?;
    Ok(prefactor * integrate(integrand, 0.0, 1.0, &scaled)?.value)
}

/// `‖f‖_α / (1 - |z|²)^α`, the pointwise derivative bound of an α-Bloch map.
pub fn bloch_derivative_bound(seminorm: f64, alpha: f64, z_abs: f64) -> Result<f64> {
    check_unit_radius("bloch_derivative_bound", z_abs)?;
    if !(seminorm >= 0.0) {
        return Err(domain("bloch_derivative_bound", "seminorm must be >= 0"));
    }
    Ok(seminorm / (1.0 - z_abs * z_abs).powf(alpha))
}

/// Derivative and Jacobian-determinant bounds for a map bounded by `M` on the ball.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundedMapBounds {
    /// `M / (1 - |z|²)`.
    pub derivative: f64,
    /// `Mⁿ / (1 - |z|²)^{(n+1)/2}`.
    pub determinant: f64,
}

pub fn bounded_map_bounds(sup_bound: f64, n: usize, z_abs: f64) -> Result<BoundedMapBounds> {
    check_unit_radius("bounded_map_bounds", z_abs)?;
    if !(sup_bound >= 0.0) {
        return Err(domain("bounded_map_bounds", "M must be >= 0"));
    }
    let w = 1.0 - z_abs * z_abs;
    Ok(BoundedMapBounds {
        derivative: sup_bound / w,
        determinant: sup_bound.powi(n as i32) / w.powf((n as f64 + 1.0) / 2.0),
    })
}

/// Schwarz-lemma bound `(M/r)|z|` for a matrix-valued map vanishing at 0.
pub fn schwarz_matrix_bound(sup_bound: f64, radius: f64, z_abs: f64) -> Result<f64> {
    if !(radius > 0.0) {
        return Err(domain("schwarz_matrix_bound", "r must be > 0"));
    }
    if !(0.0..=radius).contains(&z_abs) {
        return Err(domain(
            "schwarz_matrix_bound",
            format!("|z| = {z_abs} exceeds r = {radius}"),
        ));
    }
    Ok(sup_bound * z_abs / radius)
}

fn check_unit_radius(operation: &'static str, z_abs: f64) -> Result<()> {
    if !(0.0..1.0).contains(&z_abs) {
        return Err(domain(operation, format!("|z| = {z_abs} is not in [0, 1)")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn params(alpha: f64, n: usize, lambda: f64, k: f64) -> BlochClassParams {
        BlochClassParams::new(alpha, n, lambda, k).unwrap()
    }

    #[test]
    fn lower_envelope_examples() {
        let env = DistortionEnvelope::new(params(1.0, 1, 1.0, 1.0)).unwrap();
        assert_eq!(env.lower(0.0).unwrap(), 1.0);
        assert_eq!(env.lower(env.root()).unwrap(), 0.0);
        // 40-digit evaluation of (1/√3 - 0.2)/((1/√3)(1 - 0.2/√3)³).
        assert!((env.lower(0.2).unwrap() - 0.944_425_422_919_899_532_405_330_535_643).abs() < 1e-13);
        let err = env.lower(0.99).unwrap_err();
        assert!(err.to_string().contains("admissible radius"));
    }

    #[test]
    fn upper_envelope_examples() {
        let env = DistortionEnvelope::new(params(1.0, 1, 0.5, 1.0)).unwrap();
        assert!((env.upper(0.0).unwrap() - 0.5).abs() < 1e-15);
        let half = env.radii().upper_domain / 2.0;
        assert!((env.upper(half).unwrap() - 0.909_701_180_703_741_094_763_627_503_39).abs() < 1e-13);
        assert!(env.upper(env.radii().upper_domain * 1.0001).is_err());

        let degenerate = DistortionEnvelope::new(params(2.0, 3, 1.0, 1.0)).unwrap();
        assert_eq!(degenerate.radii().upper_domain, 0.0);
        assert_eq!(degenerate.upper(0.0).unwrap(), 1.0);
        assert!(matches!(degenerate.upper(1e-12), Err(Error::Domain { .. })));
    }

    #[test]
    fn radii_examples() {
        let env = DistortionEnvelope::new(params(1.0, 1, 1.0, 1.0)).unwrap();
        let a0 = env.peak();
        let r = env.radii();
        assert!((r.lower_domain - 2.0 * a0 / (1.0 + a0 * a0)).abs() < 1e-15);
        assert_eq!(r.upper_domain, 0.0);

        let r = admissible_radii(&params(1.0, 1, 0.5, 1.0)).unwrap();
        assert!((r.lower_domain - 0.697_155_403_217_312_585_625_148_095_423).abs() < 1e-12);
        assert!((r.upper_domain - 0.426_174_961_956_377_594_947_229_432_621).abs() < 1e-12);

        let tiny = DistortionEnvelope::new(params(0.5, 2, 1e-12, 1.0)).unwrap();
        let r = tiny.radii();
        assert!((r.lower_domain - tiny.peak()).abs() < 1e-9);
        assert!((r.upper_domain - tiny.peak()).abs() < 1e-9);
    }

    #[test]
    fn radii_ordering() {
        for alpha in [0.25, 1.0, 3.0] {
            for n in 1..=5 {
                for k in 1..=20 {
                    let env = DistortionEnvelope::new(params(alpha, n, k as f64 / 20.0, 1.0)).unwrap();
                    let r = env.radii();
                    assert!(r.lower_domain < 1.0 && r.upper_domain >= 0.0);
                    assert!(r.lower_domain >= env.peak() && env.peak() >= r.upper_domain);
                    assert!(r.lower_domain > r.upper_domain);
                }
            }
        }
    }

    #[test]
    fn envelopes_are_ordered_and_shaped() {
        for alpha in [0.5, 1.0, 2.0] {
            for n in 1..=4 {
                for lambda in [0.05, 0.25, 0.5, 0.9] {
                    let env = DistortionEnvelope::new(params(alpha, n, lambda, 1.0)).unwrap();
                    let r = env.radii();
                    let lower: Vec<f64> = (0..=500)
                        .map(|k| env.lower((r.lower_domain * k as f64 / 500.0).min(r.lower_domain)).unwrap())
                        .collect();
                    assert!(lower.windows(2).all(|w| w[1] < w[0]));
                    let upper: Vec<f64> = (0..=500)
                        .map(|k| env.upper((r.upper_domain * k as f64 / 500.0).min(r.upper_domain)).unwrap())
                        .collect();
                    let sign_changes = upper
                        .windows(3)
                        .filter(|w| ((w[1] - w[0]) > 0.0) != ((w[2] - w[1]) > 0.0))
                        .count();
                    assert!(sign_changes <= 1);
                    for k in 1..=500 {
                        let t = (r.upper_domain * k as f64 / 500.0).min(r.upper_domain);
                        assert!(env.lower(t).unwrap() < env.upper(t).unwrap());
                    }
                }
            }
        }
    }

    fn schlicht(alpha: f64, n: usize, lambda: f64, k: f64) -> f64 {
        schlicht_radius_lower(&params(alpha, n, lambda, k), &QuadratureConfig::default()).unwrap()
    }

    #[test]
    fn schlicht_radius_classical_value() {
        // Substituting u = 1 - m t integrates the α = n = λ = 1 case to √3/4.
        assert!((schlicht(1.0, 1, 1.0, 1.0) - 3f64.sqrt() / 4.0).abs() < 1e-10);
    }

    #[test]
    fn schlicht_radius_limits_and_k_dependence() {
        assert!(schlicht(1.0, 2, 1e-9, 1.0) < 1e-9);
        assert_eq!(schlicht(0.7, 1, 0.4, 1.0), schlicht(0.7, 1, 0.4, 5.0));
        let in_k: Vec<f64> = [1.0, 1.5, 2.0, 4.0].iter().map(|&k| schlicht(1.0, 3, 0.6, k)).collect();
        assert!(in_k.windows(2).all(|w| w[1] < w[0]));
        assert!(in_k.iter().all(|&r| r > 0.0));
    }

    #[test]
    fn schlicht_radius_increases_with_lambda() {
        for (alpha, n) in [(1.0, 1), (0.5, 2), (2.0, 3)] {
            let values: Vec<f64> = (1..=40).map(|k| schlicht(alpha, n, k as f64 / 40.0, 1.5)).collect();
            assert!(values.windows(2).all(|w| w[1] > w[0]), "alpha={alpha} n={n}");
        }
    }

    #[test]
    fn schlicht_radius_is_stable_under_tolerance_halving() {
        for (alpha, n, lambda) in [(1.0, 1, 1.0), (0.5, 3, 0.3), (3.0, 2, 0.8)] {
            let p = params(alpha, n, lambda, 2.0);
            let mut tol = 1e-4;
            let mut previous = schlicht_radius_lower(&p, &QuadratureConfig::new(tol, 500).unwrap()).unwrap();
            while tol > 1e-13 {
                let next = schlicht_radius_lower(&p, &QuadratureConfig::new(tol / 2.0, 500).unwrap()).unwrap();
                assert!((next - previous).abs() <= tol);
                previous = next;
                tol /= 2.0;
            }
        }
    }

    #[test]
    fn schlicht_radius_propagates_quadrature_failure() {
        let cfg = QuadratureConfig::new(1e-300, 3).unwrap();
        let err = schlicht_radius_lower(&params(1.0, 2, 0.5, 1.0), &cfg).unwrap_err();
        assert!(matches!(err, Error::QuadratureNonConvergence { .. }));
    }

    #[test]
    fn growth_bound_examples() {
        assert_eq!(bloch_derivative_bound(2.5, 1.0, 0.0).unwrap(), 2.5);
        assert_eq!(bloch_derivative_bound(0.0, 1.0, 0.7).unwrap(), 0.0);
        assert!((bloch_derivative_bound(1.0, 2.0, 0.5).unwrap() - 16.0 / 9.0).abs() < 1e-12);
        assert!(bloch_derivative_bound(1.0, 2.0, 1.0).is_err());

        let b = bounded_map_bounds(1.7, 3, 0.0).unwrap();
        assert_eq!((b.derivative, b.determinant), (1.7, 1.7f64.powi(3)));
        let b = bounded_map_bounds(0.0, 2, 0.3).unwrap();
        assert_eq!((b.derivative, b.determinant), (0.0, 0.0));
        let b = bounded_map_bounds(2.0, 3, 0.6).unwrap();
        assert!((b.derivative - 3.125).abs() < 1e-12);
        assert!((b.determinant - 19.531_25).abs() < 1e-12);
        assert!(bounded_map_bounds(2.0, 3, 1.0).is_err());

        assert_eq!(schwarz_matrix_bound(3.0, 0.5, 0.0).unwrap(), 0.0);
        assert_eq!(schwarz_matrix_bound(3.0, 0.5, 0.5).unwrap(), 3.0);
        assert!((schwarz_matrix_bound(4.2, 0.66, 0.33).unwrap() - 2.1).abs() < 1e-12);
        assert!(schwarz_matrix_bound(3.0, 0.5, 0.6).is_err());
    }
}
