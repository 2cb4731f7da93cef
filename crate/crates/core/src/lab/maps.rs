//! Exactly evaluable holomorphic maps `𝔹ⁿ → ℂⁿ` with analytic Jacobians.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bounds::DistortionEnvelope;
use crate::constants::BlochClassParams;
use crate::error::{domain, Error, Result};
use crate::matrix::{is_finite, vector_norm, ComplexMatrix, ComplexScalar};
use crate::quadrature::{integrate, QuadratureConfig};

/// Upper limit on the total degree of a [`PolyMap`] term.
pub const MAX_TOTAL_DEGREE: u32 = 32;

// Points produced as r·ζ with |ζ| = 1 may overshoot the unit sphere by rounding.
const CLOSED_BALL_SLACK: f64 = 1e-12;

/// A holomorphic map of the unit ball that extends continuously to its closure.
///
/// Implementors provide evaluation on the closed ball; the open-ball entry
/// points [`eval`](Self::eval), [`jacobian`](Self::jacobian) and
/// [`jacobian_det`](Self::jacobian_det) add the `|z| < 1` check.
pub trait HolomorphicMap: Send + Sync {
    fn dim(&self) -> usize;

    fn eval_closed(&self, z: &[ComplexScalar]) -> Result<Vec<ComplexScalar>>;

    fn jacobian_closed(&self, z: &[ComplexScalar]) -> Result<ComplexMatrix>;

    fn jacobian_det_closed(&self, z: &[ComplexScalar]) -> Result<ComplexScalar> {
        Ok(self.jacobian_closed(z)?.determinant())
    }

    fn eval(&self, z: &[ComplexScalar]) -> Result<Vec<ComplexScalar>> {
        check_point(self.dim(), z, false)?;
        self.eval_closed(z)
    }

    fn jacobian(&self, z: &[ComplexScalar]) -> Result<ComplexMatrix> {
        check_point(self.dim(), z, false)?;
        self.jacobian_closed(z)
    }

    fn jacobian_det(&self, z: &[ComplexScalar]) -> Result<ComplexScalar> {
        check_point(self.dim(), z, false)?;
        self.jacobian_det_closed(z)
    }
}

pub(crate) fn check_point(n: usize, z: &[ComplexScalar], closed: bool) -> Result<()> {
    if z.len() != n {
        return Err(domain(
            "map evaluation",
            format!("expected a point of C^{n}, got {} coordinates", z.len()),
        ));
    }
    let norm = vector_norm(z);
    let inside = if closed {
        norm <= 1.0 + CLOSED_BALL_SLACK
    } else {
        norm < 1.0
    };
    if !inside {
        return Err(domain(
            "map evaluation",
            format!("|z| = {norm} is outside the unit ball"),
        ));
    }
    Ok(())
}

/// One monomial `c · z₁^{e₁} ⋯ zₙ^{eₙ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub coeff: ComplexScalar,
    pub exponents: Vec<u32>,
}

impl Monomial {
    pub fn new(coeff: ComplexScalar, exponents: Vec<u32>) -> Self {
        Self { coeff, exponents }
    }

    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }
}

/// A polynomial map: component `i` is the sum of its monomials.
///
/// JSON form: `{"n": 2, "components": [[{"re": 1, "im": 0, "exp": [1, 0]}], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WireMap", into = "WireMap")]
pub struct PolyMap {
    n: usize,
    components: Vec<Vec<Monomial>>,
    max_exponent: u32,
}

impl PolyMap {
    pub fn new(n: usize, components: Vec<Vec<Monomial>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMap("dimension must be at least 1".into()));
        }
        if components.len() != n {
            return Err(Error::InvalidMap(format!(
                "expected {n} components, got {}",
                components.len()
            )));
        }
        let mut max_exponent = 0;
        for (i, terms) in components.iter().enumerate() {
            for term in terms {
                if term.exponents.len() != n {
                    return Err(Error::InvalidMap(format!(
                        "component {i}: exponent vector has length {}, expected {n}",
                        term.exponents.len()
                    )));
                }
                if !is_finite(term.coeff) {
                    return Err(Error::InvalidMap(format!("component {i}: non-finite coefficient")));
                }
                if term.degree() > MAX_TOTAL_DEGREE {
                    return Err(Error::InvalidMap(format!(
                        "component {i}: total degree {} exceeds {MAX_TOTAL_DEGREE}",
                        term.degree()
                    )));
                }
                max_exponent = max_exponent.max(term.exponents.iter().copied().max().unwrap_or(0));
            }
        }
        Ok(Self {
            n,
            components,
            max_exponent,
        })
    }

    pub fn identity(n: usize) -> Self {
        let components = (0..n)
            .map(|i| vec![Monomial::new(ComplexScalar::new(1.0, 0.0), unit_exponent(n, i))])
            .collect();
        Self::new(n, components).expect("identity is well formed")
    }

    pub fn constant(values: &[ComplexScalar]) -> Result<Self> {
        let n = values.len();
        let components = values
            .iter()
            .map(|&c| vec![Monomial::new(c, vec![0; n])])
            .collect();
        Self::new(n, components)
    }

    /// The linear map `z ↦ A z`.
    pub fn linear(a: &ComplexMatrix) -> Self {
        let n = a.dim();
        let components = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| Monomial::new(a.get(i, j), unit_exponent(n, j)))
                    .collect()
            })
            .collect();
        Self::new(n, components).expect("matrix entries are finite")
    }

    /// One-variable polynomial `Σ coeffs[k] z^k`.
    pub fn univariate(coeffs: &[ComplexScalar]) -> Result<Self> {
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| Monomial::new(c, vec![k as u32]))
            .collect();
        Self::new(1, vec![terms])
    }

    /// Random one-variable polynomial of degree `1..=max_degree` with
    /// standard complex Gaussian coefficients.
    pub fn random_univariate<R: Rng>(rng: &mut R, max_degree: usize) -> Self {
        let degree = rng.random_range(1..=max_degree.max(1));
        let coeffs: Vec<_> = (0..=degree).map(|_| gaussian(rng)).collect();
        Self::univariate(&coeffs).expect("gaussian coefficients are finite")
    }

    /// Identity plus random monomials of total degree `2..=max_degree`, each
    /// with a complex Gaussian coefficient scaled by `scale`. Fixes the origin.
    pub fn random_near_identity<R: Rng>(rng: &mut R, n: usize, max_degree: u32, scale: f64) -> Self {
        let mut components = Self::identity(n).components;
        for terms in components.iter_mut() {
            for _ in 0..n + 1 {
                let degree = rng.random_range(2..=max_degree.max(2));
                let mut exponents = vec![0u32; n];
                for _ in 0..degree {
                    exponents[rng.random_range(0..n)] += 1;
                }
                terms.push(Monomial::new(gaussian(rng) * scale, exponents));
            }
        }
        Self::new(n, components).expect("well formed by construction")
    }

    pub fn components(&self) -> &[Vec<Monomial>] {
        &self.components
    }

    pub fn degree(&self) -> u32 {
        self.components
            .iter()
            .flatten()
            .map(Monomial::degree)
            .max()
            .unwrap_or(0)
    }

    /// The map `c · f`.
    pub fn scaled(&self, c: ComplexScalar) -> Result<Self> {
        let components = self
            .components
            .iter()
            .map(|terms| {
                terms
                    .iter()
                    .map(|t| Monomial::new(t.coeff * c, t.exponents.clone()))
                    .collect()
            })
            .collect();
        Self::new(self.n, components)
    }

    /// Multiplies component `index` by `c`, leaving the others unchanged.
    pub fn with_component_scaled(&self, index: usize, c: ComplexScalar) -> Result<Self> {
        let mut components = self.components.clone();
        let terms = components
            .get_mut(index)
            .ok_or_else(|| Error::InvalidMap(format!("no component {index}")))?;
        for t in terms.iter_mut() {
            t.coeff *= c;
        }
        Self::new(self.n, components)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidMap(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("finite coefficients serialize")
    }

    fn powers(&self, z: &[ComplexScalar]) -> Vec<Vec<ComplexScalar>> {
        z.iter()
            .map(|&zj| {
                let mut row = Vec::with_capacity(self.max_exponent as usize + 1);
                let mut acc = ComplexScalar::new(1.0, 0.0);
                row.push(acc);
                for _ in 0..self.max_exponent {
                    acc *= zj;
                    row.push(acc);
                }
                row
            })
            .collect()
    }
}

impl HolomorphicMap for PolyMap {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval_closed(&self, z: &[ComplexScalar]) -> Result<Vec<ComplexScalar>> {
        check_point(self.n, z, true)?;
        let pw = self.powers(z);
        Ok(self
            .components
            .iter()
            .map(|terms| {
                terms
                    .iter()
                    .map(|t| {
                        t.exponents
                            .iter()
                            .enumerate()
                            .fold(t.coeff, |acc, (j, &e)| acc * pw[j][e as usize])
                    })
                    .sum()
            })
            .collect())
    }

    fn jacobian_closed(&self, z: &[ComplexScalar]) -> Result<ComplexMatrix> {
        check_point(self.n, z, true)?;
        let n = self.n;
        let pw = self.powers(z);
        let mut entries = vec![ComplexScalar::new(0.0, 0.0); n * n];
        for (i, terms) in self.components.iter().enumerate() {
            for t in terms {
                for (j, &ej) in t.exponents.iter().enumerate() {
                    if ej == 0 {
                        continue;
                    }
                    let mut d = t.coeff * ej as f64 * pw[j][ej as usize - 1];
                    for (k, &ek) in t.exponents.iter().enumerate() {
                        if k != j {
                            d *= pw[k][ek as usize];
                        }
                    }
                    entries[i * n + j] += d;
                }
            }
        }
        ComplexMatrix::new(n, entries)
    }
}

fn unit_exponent(n: usize, i: usize) -> Vec<u32> {
    let mut e = vec![0; n];
    e[i] = 1;
    e
}

fn gaussian<R: Rng>(rng: &mut R) -> ComplexScalar {
    ComplexScalar::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireTerm {
    re: f64,
    im: f64,
    exp: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireMap {
    n: usize,
    components: Vec<Vec<WireTerm>>,
}

impl TryFrom<WireMap> for PolyMap {
    type Error = Error;

    fn try_from(w: WireMap) -> Result<Self> {
        let components = w
            .components
            .into_iter()
            .map(|terms| {
                terms
                    .into_iter()
                    .map(|t| Monomial::new(ComplexScalar::new(t.re, t.im), t.exp))
                    .collect()
            })
            .collect();
        PolyMap::new(w.n, components)
    }
}

impl From<PolyMap> for WireMap {
    fn from(p: PolyMap) -> Self {
        WireMap {
            n: p.n,
            components: p
                .components
                .into_iter()
                .map(|terms| {
                    terms
                        .into_iter()
                        .map(|t| WireTerm {
                            re: t.coeff.re,
                            im: t.coeff.im,
                            exp: t.exponents,
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

/// The map attaining both distortion envelopes:
///
/// ```text
/// f(z) = ( ∫₀^{z₁} λ(a-ξ)/(a(1-aξ)^{β+1}) dξ, z₂, …, zₙ ),   a = m(λ).
/// ```
///
/// The first component is integrated numerically along `[0, z₁]`; `a < 1`
/// keeps `1 - aξ` in the right half-plane on the closed disk, so the
/// principal power is holomorphic there.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalMap {
    params: BlochClassParams,
    a: f64,
    quadrature: QuadratureConfig,
}

impl ExtremalMap {
    pub fn new(params: BlochClassParams) -> Result<Self> {
        let envelope = DistortionEnvelope::new(params)?;
        Ok(Self {
            params,
            a: envelope.root(),
            quadrature: QuadratureConfig::new(1e-12, 1000)?,
        })
    }

    pub fn params(&self) -> &BlochClassParams {
        &self.params
    }

    /// The cached root `a = m(λ)`.
    pub fn root(&self) -> f64 {
        self.a
    }

    /// Derivative of the first component, `λ(a-ξ)/(a(1-aξ)^{β+1})`.
    pub fn first_derivative(&self, xi: ComplexScalar) -> ComplexScalar {
        let a = self.a;
        let b = self.params.weight_exponent();
        let one = ComplexScalar::new(1.0, 0.0);
        (ComplexScalar::new(a, 0.0) - xi) * self.params.lambda()
            / ((one - xi * a).powf(b + 1.0) * a)
    }

    fn first_component(&self, z1: ComplexScalar) -> Result<ComplexScalar> {
        let integral = integrate(
            |s: f64| self.first_derivative(z1 * s) * z1,
            0.0,
            1.0,
            &self.quadrature,
        )?;
        Ok(integral.value)
    }
}

impl HolomorphicMap for ExtremalMap {
    fn dim(&self) -> usize {
        self.params.n()
    }

    fn eval_closed(&self, z: &[ComplexScalar]) -> Result<Vec<ComplexScalar>> {
        check_point(self.dim(), z, true)?;
        let mut out = z.to_vec();
        out[0] = self.first_component(z[0])?;
        Ok(out)
    }

    fn jacobian_closed(&self, z: &[ComplexScalar]) -> Result<ComplexMatrix> {
        check_point(self.dim(), z, true)?;
        let mut diag = vec![ComplexScalar::new(1.0, 0.0); self.dim()];
        diag[0] = self.first_derivative(z[0]);
        ComplexMatrix::from_diagonal(&diag)
    }

    fn jacobian_det_closed(&self, z: &[ComplexScalar]) -> Result<ComplexScalar> {
        check_point(self.dim(), z, true)?;
        Ok(self.first_derivative(z[0]))
    }
}
