//! Parameter records and scalar special functions for the α-Bloch class.
//!
//! Everything is organized around the weight exponent `β = α(n+1)` and the
//! one-variable profile
//!
//! ```text
//! φ(x) = x (1-x²)^{β/2} √(β+1) [(β+1)/β]^{β/2},   x ∈ [0, 1],
//! ```
//!
//! which rises from `φ(0) = 0` to its peak `φ(a₀) = 1` at
//! `a₀ = 1/√(β+1)` and falls back to `φ(1) = 0`. The inverse branch on
//! `[0, a₀]` is the radius `m(λ)` that parametrizes every distortion bound.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Parameters `(α, n, λ, K)` of the normalized α-Bloch class.
///
/// `lambda` is the prescribed value of `det f'(0)`; `bloch_bound` is the
/// bound `K ≥ 1` on the α-Bloch semi-norm and only enters the schlicht radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochClassParams {
    alpha: f64,
    n: usize,
    lambda: f64,
    bloch_bound: f64,
}

impl BlochClassParams {
    pub fn new(alpha: f64, n: usize, lambda: f64, bloch_bound: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("n must be >= 1".into()));
        }
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be in (0, 1], got {lambda}"
            )));
        }
        if !(bloch_bound.is_finite() && bloch_bound >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "K must be >= 1, got {bloch_bound}"
            )));
        }
        Ok(Self {
            alpha,
            n,
            lambda,
            bloch_bound,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn bloch_bound(&self) -> f64 {
        self.bloch_bound
    }

    /// Same class with a different `det f'(0)`.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.alpha, self.n, lambda, self.bloch_bound)
    }

    /// `β = α(n+1)`.
    pub fn weight_exponent(&self) -> f64 {
        self.alpha * (self.n as f64 + 1.0)
    }

    /// Evaluates the profile `φ(x)` on `[0, 1]`.
    pub fn profile(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(domain("profile", format!("x = {x} is outside [0, 1]")));
        }
        Ok(self.profile_unchecked(x))
    }

    fn profile_unchecked(&self, x: f64) -> f64 {
        let b = self.weight_exponent();
        // (1-x²)^{β/2} [(β+1)/β]^{β/2} combined so that φ(a₀) rounds to 1.
        x * (b + 1.0).sqrt() * ((1.0 - x * x) * (b + 1.0) / b).powf(b / 2.0)
    }

    /// `φ'(x) = C (1-x²)^{β/2-1} (1 - (β+1)x²)`.
    fn profile_slope(&self, x: f64) -> f64 {
        let b = self.weight_exponent();
        let scale = (b + 1.0).sqrt() * ((b + 1.0) / b).powf(b / 2.0);
        scale * (1.0 - x * x).powf(b / 2.0 - 1.0) * (1.0 - (b + 1.0) * x * x)
    }

    /// The peak location `a₀ = 1/√(β+1)` of the profile.
    pub fn profile_peak(&self) -> f64 {
        1.0 / (self.weight_exponent() + 1.0).sqrt()
    }

    /// The unique `x ∈ [0, a₀]` with `φ(x) = λ`, written `m(λ)`.
    ///
    /// Bisection on `[0, a₀]`, accepting Newton steps that stay inside the
    /// current bracket. `λ = 1` returns `a₀` directly since `φ'(a₀) = 0`.
    pub fn inverse_profile(&self, cfg: &RootSolverConfig) -> Result<f64> {
        let peak = self.profile_peak();
        if self.lambda == 1.0 {
            return Ok(peak);
        }
        let target = self.lambda;
        let (mut lower, mut upper) = (0.0, peak);
        let mut x = (target / self.profile_slope(0.0)).min(0.5 * peak);
        for _ in 0..cfg.max_iterations {
            let residual = self.profile_unchecked(x) - target;
            if residual == 0.0 {
                return Ok(x);
            }
            if residual < 0.0 {
                lower = x;
            } else {
                upper = x;
            }
            let slope = self.profile_slope(x);
            if slope > 0.0 {
                let step = residual / slope;
                let newton = x - step;
                if step.abs() < cfg.tolerance && newton >= lower && newton <= upper {
                    return Ok(newton);
                }
                if newton > lower && newton < upper {
                    x = newton;
                    continue;
                }
            }
            if upper - lower < cfg.tolerance {
                return Ok(0.5 * (lower + upper));
            }
            x = 0.5 * (lower + upper);
        }
        Err(Error::SolverNonConvergence {
            iterations: cfg.max_iterations,
            lower,
            upper,
        })
    }

    /// `(1-a²)^{β/2} [(β+1)/β]^{β/2}`, the radius of the disk that contains
    /// `(1-au)^β det f'(ζu)` on the hyperbolic disk `𝔻_h(a, artanh a₀)`.
    ///
    /// When `a = m(λ)` this equals `λ / (a √(β+1))`.
    pub fn trace_disk_radius(&self, a: f64) -> f64 {
        let b = self.weight_exponent();
        ((1.0 - a * a) * (b + 1.0) / b).powf(b / 2.0)
    }
}

/// Stopping rule for the profile inversion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootSolverConfig {
    tolerance: f64,
    max_iterations: usize,
}

impl RootSolverConfig {
    pub fn new(tolerance: f64, max_iterations: usize) -> Result<Self> {
        if !(tolerance > 0.0) {
            return Err(Error::InvalidParameter("solver tolerance must be > 0".into()));
        }
        if max_iterations == 0 {
            return Err(Error::InvalidParameter("solver needs at least one iteration".into()));
        }
        Ok(Self {
            tolerance,
            max_iterations,
        })
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iterations
    }
}

impl Default for RootSolverConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 200,
        }
    }
}

pub fn phi(x: f64, params: &BlochClassParams) -> Result<f64> {
    params.profile(x)
}

pub fn a0(params: &BlochClassParams) -> f64 {
    params.profile_peak()
}

pub fn m_of_lambda(params: &BlochClassParams, cfg: &RootSolverConfig) -> Result<f64> {
    params.inverse_profile(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALPHAS: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

    fn params(alpha: f64, n: usize, lambda: f64) -> BlochClassParams {
        BlochClassParams::new(alpha, n, lambda, 1.0).unwrap()
    }

    fn bisection_oracle(p: &BlochClassParams) -> f64 {
        let (mut lo, mut hi) = (0.0, p.profile_peak());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if p.profile(mid).unwrap() < p.lambda() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn parameter_validation() {
        assert!(BlochClassParams::new(0.0, 1, 0.5, 1.0).is_err());
        assert!(BlochClassParams::new(1.0, 0, 0.5, 1.0).is_err());
        assert!(BlochClassParams::new(1.0, 1, 0.0, 1.0).is_err());
        assert!(BlochClassParams::new(1.0, 1, 1.5, 1.0).is_err());
        assert!(BlochClassParams::new(1.0, 1, 0.5, 0.9).is_err());
        assert!(BlochClassParams::new(1.0, 1, f64::NAN, 1.0).is_err());
        assert!(RootSolverConfig::new(0.0, 10).is_err());
        assert!(RootSolverConfig::new(1e-10, 0).is_err());
    }

    #[test]
    fn profile_values() {
        let p = params(1.0, 1, 1.0);
        assert_eq!(p.profile(0.0).unwrap(), 0.0);
        // 40-digit evaluation of the closed form.
        let expected = 0.709_274_805_699_455_251_699_489_276_846_654_734_263_1;
        assert!((p.profile(0.3).unwrap() - expected).abs() < 1e-13);
        assert!(matches!(p.profile(1.01), Err(Error::Domain { .. })));
        assert!(p.profile(-0.01).is_err());
    }

    #[test]
    fn profile_peaks_at_one() {
        for alpha in ALPHAS {
            for n in 1..=8 {
                let p = params(alpha, n, 1.0);
                assert!((p.profile(p.profile_peak()).unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn profile_is_unimodal() {
        for alpha in ALPHAS {
            for n in 1..=8 {
                let p = params(alpha, n, 1.0);
                let peak = p.profile_peak();
                let rising: Vec<f64> = (0..=1000)
                    .map(|k| p.profile(peak * k as f64 / 1000.0).unwrap())
                    .collect();
                assert!(rising.windows(2).all(|w| w[1] > w[0]), "alpha={alpha} n={n}");
                let falling: Vec<f64> = (0..=1000)
                    .map(|k| p.profile(peak + (1.0 - peak) * k as f64 / 1000.0).unwrap())
                    .collect();
                assert!(falling.windows(2).all(|w| w[1] < w[0]), "alpha={alpha} n={n}");
            }
        }
    }

    #[test]
    fn peak_values() {
        assert_eq!(params(1.0, 2, 1.0).profile_peak(), 0.5);
        assert!((params(1.0, 1, 1.0).profile_peak() - 0.577_350_269_189_625_8).abs() < 1e-15);
        let peaks: Vec<f64> = [0.1, 0.5, 1.0, 5.0, 50.0, 500.0]
            .iter()
            .map(|&a| params(a, 2, 1.0).profile_peak())
            .collect();
        assert!(peaks.windows(2).all(|w| w[1] < w[0]));
        assert!(peaks.iter().all(|&a| a > 0.0 && a < 1.0));
    }

    #[test]
    fn inverse_profile_endpoints() {
        let cfg = RootSolverConfig::default();
        for alpha in ALPHAS {
            let p = params(alpha, 3, 1.0);
            assert_eq!(p.inverse_profile(&cfg).unwrap(), p.profile_peak());
            let tiny = params(alpha, 3, 1e-300).inverse_profile(&cfg).unwrap();
            assert!((0.0..1e-290).contains(&tiny));
        }
    }

    #[test]
    fn inverse_profile_matches_bisection() {
        let cfg = RootSolverConfig::default();
        let p = params(1.0, 1, 0.5);
        let m = p.inverse_profile(&cfg).unwrap();
        assert!((m - bisection_oracle(&p)).abs() < 1e-10);
        assert!((m - 0.200_511_644_240_580_395_519).abs() < 1e-13);
    }

    #[test]
    fn inverse_profile_is_increasing() {
        let cfg = RootSolverConfig::default();
        let values: Vec<f64> = (1..=200)
            .map(|k| params(0.5, 2, k as f64 / 200.0).inverse_profile(&cfg).unwrap())
            .collect();
        assert!(values.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn inverse_profile_round_trip() {
        let cfg = RootSolverConfig::default();
        for alpha in ALPHAS {
            for n in 1..=8 {
                let base = params(alpha, n, 1.0);
                let peak = base.profile_peak();
                for k in 1..=1000 {
                    let x = peak * k as f64 / 1000.0;
                    let lambda = base.profile(x).unwrap().min(1.0);
                    let back = base.with_lambda(lambda).unwrap().inverse_profile(&cfg).unwrap();
                    // Near a₀ the profile is flat, so f64 rounding of λ dominates.
                    let allowed = if k >= 999 { 1e-7 } else { 1e-9 };
                    assert!((back - x).abs() < allowed, "alpha={alpha} n={n} x={x} back={back}");
                }
            }
        }
    }

    #[test]
    fn solver_reports_last_bracket() {
        let cfg = RootSolverConfig::new(1e-300, 1).unwrap();
        let err = params(1.0, 1, 0.3).inverse_profile(&cfg).unwrap_err();
        match err {
            Error::SolverNonConvergence { iterations, lower, upper } => {
                assert_eq!(iterations, 1);
                assert!(lower < upper);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn trace_disk_radius_identity() {
        let cfg = RootSolverConfig::default();
        for alpha in ALPHAS {
            for n in 1..=6 {
                for lambda in [0.05, 0.3, 0.7, 1.0] {
                    let p = params(alpha, n, lambda);
                    let a = p.inverse_profile(&cfg).unwrap();
                    let rhs = lambda / (a * (p.weight_exponent() + 1.0).sqrt());
                    assert!((p.trace_disk_radius(a) - rhs).abs() < 1e-10);
                }
            }
        }
    }
}
