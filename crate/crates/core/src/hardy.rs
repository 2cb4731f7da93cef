//! Univalence radius and covered ball for normalized maps in `Hᵖ`.
//!
//! For `f` with `‖f‖_p ≤ K₀`, `f(0) = 0` and `|det f'(0)| = λ₀`, the rescaled
//! map `F(z) = f(rz)/r` is bounded by `M₀(r) = K₀/(r(1-r²)^{n/p})`. The
//! derivative oscillation `|F'(z) - F'(0)|` is controlled through the weight
//! `W₁(r) = (2-r²)/(r(1-r²))`, whose minimum value `m` enters every radius:
//!
//! ```text
//! ρ₀(r) = λ₀/(m M₀(r)ⁿ),   ρ₁(r) = r ρ₀(r),   R₀ = λ₀²/(2m M₀(r₀)^{2n-1}).
//! ```
//!
//! `f` is univalent on the ball of radius `ρ₁(r₀)`, maximized at
//! `r₀ = √(p(n+1)/(p(n+1)+2n²))`, and its image contains the ball of radius
//! `r₀ R₀`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyClassParams {
    p: f64,
    n: usize,
    norm_bound: f64,
    det_at_origin: f64,
}

impl HardyClassParams {
    /// `p` is the Hardy exponent, `norm_bound` is `K₀` and `det_at_origin` is `λ₀`.
    pub fn new(p: f64, n: usize, norm_bound: f64, det_at_origin: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::InvalidParameter(format!("p must be > 0, got {p}")));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("n must be >= 1".into()));
        }
        if !(det_at_origin.is_finite() && det_at_origin > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda0 must be > 0, got {det_at_origin}"
            )));
        }
        if !(norm_bound.is_finite() && norm_bound >= det_at_origin) {
            return Err(Error::InvalidParameter(format!(
                "K0 must satisfy K0 >= lambda0, got K0 = {norm_bound}, lambda0 = {det_at_origin}"
            )));
        }
        Ok(Self {
            p,
            n,
            norm_bound,
            det_at_origin,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    pub fn det_at_origin(&self) -> f64 {
        self.det_at_origin
    }

    /// `M₀(r) = K₀/(r(1-r²)^{n/p})`, a sup bound for `f(rz)/r` on the ball.
    pub fn growth_bound(&self, r: f64) -> Result<f64> {
        if !(r > 0.0 && r < 1.0) {
            return Err(domain("hardy_growth_bound", format!("r = {r} is not in (0, 1)")));
        }
        Ok(self.norm_bound / (r * (1.0 - r * r).powf(self.n as f64 / self.p)))
    }

    /// `ρ₀(r) = λ₀/(m M₀(r)ⁿ)`, univalence radius of the rescaled map.
    pub fn rescaled_univalence_radius(&self, r: f64) -> Result<f64> {
        let m = minimize_oscillation_weight().value;
        Ok(self.det_at_origin / (m * self.growth_bound(r)?.powi(self.n as i32)))
    }

    /// `ρ₁(r) = r ρ₀(r)`.
    pub fn univalence_radius(&self, r: f64) -> Result<f64> {
        Ok(r * self.rescaled_univalence_radius(r)?)
    }

    /// The maximizer `r₀` of `ρ₁` on `(0, 1)`.
    pub fn optimal_scale(&self) -> f64 {
        let pn = self.p * (self.n as f64 + 1.0);
        let nn = (self.n * self.n) as f64;
        (pn / (pn + 2.0 * nn)).sqrt()
    }
}

pub fn hardy_growth_bound(r: f64, params: &HardyClassParams) -> Result<f64> {
    params.growth_bound(r)
}

/// `W₁(r) = (2-r²)/(r(1-r²))`.
pub fn oscillation_weight(r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(domain("oscillation_weight", format!("r = {r} is not in (0, 1)")));
    }
    Ok((2.0 - r * r) / (r * (1.0 - r * r)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OscillationMinimum {
    /// `r₁ = √((5-√17)/2)`.
    pub radius: f64,
    /// `m = W₁(r₁) = √2(7+√17)/(4√(5-√17))`.
    pub value: f64,
}

/// Minimum of `W₁` on `(0, 1)`, from its closed form.
///
/// `W₁'(r) = 0` reduces to `r⁴ - 5r² + 2 = 0`, whose root in `(0, 1)` is `r₁`.
pub fn minimize_oscillation_weight() -> OscillationMinimum {
    let s17 = 17f64.sqrt();
    OscillationMinimum {
        radius: ((5.0 - s17) / 2.0).sqrt(),
        value: 2f64.sqrt() * (7.0 + s17) / (4.0 * (5.0 - s17).sqrt()),
    }
}

/// Every quantity of the `Hᵖ` univalence argument, evaluated at `r₀`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HardyLandauResult {
    /// `r₁`, minimizer of `W₁`.
    pub oscillation_radius: f64,
    /// `m = W₁(r₁)`.
    pub oscillation_constant: f64,
    /// `r₀`, maximizer of `ρ₁`.
    pub optimal_scale: f64,
    /// `M₀(r₀)`.
    pub growth_at_optimal_scale: f64,
    /// `ρ₀(r₀)`.
    pub rescaled_univalence_radius: f64,
    /// `ρ₁(r₀)`: `f` is univalent on the ball of this radius.
    pub univalence_radius: f64,
    /// `R₀`, radius of the ball covered by the rescaled map.
    pub rescaled_covered_radius: f64,
    /// `R = r₀ R₀`, radius of the ball covered by `f`.
    pub covered_radius: f64,
    /// The closed form `λ₀²/(2mK₀^{2n-1}) · r₀ · (1-r₀²)^{(2n²-n)/p}`.
    pub covered_radius_closed_form: f64,
    /// `covered_radius_closed_form / covered_radius`, which equals `r₀^{-(2n-1)}`.
    pub closed_form_ratio: f64,
}

/// Evaluates the univalence radius and the covered ball.
///
/// The closed form for the covered radius carries `r₀` to the first power,
/// whereas `r₀ R₀` expands to `r₀^{2n}` times the same factors. Both are
/// returned; `covered_radius` is the one consistent with `R = r₀ R₀`.
/// Fails with [`Error::ParameterRegime`] unless `ρ₀(r₀) < r₁`.
pub fn hardy_landau(params: &HardyClassParams) -> Result<HardyLandauResult> {
    let OscillationMinimum {
        radius: r1,
        value: m,
    } = minimize_oscillation_weight();
    let n = params.n() as f64;
    let (p, k0, l0) = (params.p(), params.norm_bound(), params.det_at_origin());
    let r0 = params.optimal_scale();
    let growth = params.growth_bound(r0)?;
    let rho0 = l0 / (m * growth.powi(params.n() as i32));
    if !(rho0 < r1) {
        return Err(Error::ParameterRegime(format!(
            "rescaled univalence radius {rho0} must be below r1 = {r1}"
        )));
    }
    let rho1 = r0 * rho0;
    let r_small = l0 * l0 / (2.0 * m * growth.powi(2 * params.n() as i32 - 1));
    let covered = r0 * r_small;
    let complement = 2.0 * n * n / (p * (n + 1.0) + 2.0 * n * n);
    let closed_form = l0 * l0 / (2.0 * m * k0.powi(2 * params.n() as i32 - 1))
        * r0
        * complement.powf((2.0 * n * n - n) / p);
    Ok(HardyLandauResult {
        oscillation_radius: r1,
        oscillation_constant: m,
        optimal_scale: r0,
        growth_at_optimal_scale: growth,
        rescaled_univalence_radius: rho0,
        univalence_radius: rho1,
        rescaled_covered_radius: r_small,
        covered_radius: covered,
        covered_radius_closed_form: closed_form,
        closed_form_ratio: closed_form / covered,
    })
}
