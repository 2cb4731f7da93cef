//! Sampled checks of the distortion envelopes and of injectivity.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::DistortionEnvelope;
use crate::constants::BlochClassParams;
use crate::error::{domain, Error, Result};
use crate::lab::estimators::estimate_det_seminorm;
use crate::lab::maps::{check_point, HolomorphicMap, PolyMap};
use crate::lab::sampling::{closed_radii, keyed_rng, uniform_ball_point, SamplingConfig, Stream};
use crate::matrix::{vector_norm, ComplexScalar};

/// Slack allowed on each distortion check.
pub const DISTORTION_SLACK: f64 = 1e-9;
/// Tolerance on `det f'(0) = λ` accepted by [`verify_distortion`].
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;
/// Image separation below which a pair counts as a collision.
pub const COLLISION_THRESHOLD: f64 = 1e-12;
/// Minimum source separation for a collision to count.
pub const DISTINCT_THRESHOLD: f64 = 1e-6;

const NEWTON_ITERATIONS: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// `Re det f'(z)` against the lower envelope.
    Lower,
    /// `|det f'(z)|` against the upper envelope.
    Upper,
    /// Image separation of two distinct points.
    Injectivity,
}

/// Outcome of a sampled verification.
///
/// Every check produces a margin that is negative when the inequality
/// fails; a check is a violation when its margin is below `-slack`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub samples_tested: usize,
    pub violations: usize,
    /// Smallest margin seen; `null` in JSON when nothing was tested.
    pub worst_margin: f64,
    #[serde(serialize_with = "crate::lab::serialize_point")]
    pub worst_point: Vec<ComplexScalar>,
    pub worst_check: Option<CheckKind>,
    pub slack: f64,
    /// Distortion only: largest margin on the first coordinate axis, lower
    /// envelope on the positive half and upper envelope on the negative half.
    /// Zero for a map attaining both envelopes.
    pub axis_gap: Option<f64>,
    pub note: String,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    /// Pools several reports: counts add, the worst margin is the smallest
    /// (earliest on ties), the axis gap is the largest, and distinct notes
    /// are joined. `None` for an empty input.
    pub fn combine<'a, I: IntoIterator<Item = &'a BoundReport>>(reports: I) -> Option<BoundReport> {
        let mut iter = reports.into_iter();
        let mut out = iter.next()?.clone();
        for r in iter {
            out.samples_tested += r.samples_tested;
            out.violations += r.violations;
            out.slack = out.slack.max(r.slack);
            if r.worst_margin < out.worst_margin {
                out.worst_margin = r.worst_margin;
                out.worst_point = r.worst_point.clone();
                out.worst_check = r.worst_check;
            }
            out.axis_gap = match (out.axis_gap, r.axis_gap) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            };
            for part in r.note.split("; ") {
                if !out.note.split("; ").any(|existing| existing == part) {
                    out.note = format!("{}; {part}", out.note);
                }
            }
        }
        Some(out)
    }
}

#[derive(Clone, Debug)]
struct Check {
    margin: f64,
    index: usize,
    point: Vec<ComplexScalar>,
    kind: CheckKind,
}

#[derive(Clone, Debug, Default)]
struct Tally {
    tested: usize,
    violations: usize,
    worst: Option<Check>,
}

impl Tally {
    fn single(check: Check, slack: f64) -> Self {
        Self {
            tested: 1,
            violations: usize::from(check.margin < -slack),
            worst: Some(check),
        }
    }

    // Smallest margin wins, ties go to the smaller index: the result does not
    // depend on how rayon splits the work.
    fn merge(self, other: Self) -> Self {
        let worst = match (self.worst, other.worst) {
            (Some(a), Some(b)) => {
                let b_wins = b.margin < a.margin || (b.margin == a.margin && b.index < a.index);
                Some(if b_wins { b } else { a })
            }
            (a, b) => a.or(b),
        };
        Self {
            tested: self.tested + other.tested,
            violations: self.violations + other.violations,
            worst,
        }
    }

    fn into_report(self, slack: f64, axis_gap: Option<f64>, note: String) -> BoundReport {
        let (worst_margin, worst_point, worst_check) = match self.worst {
            Some(c) => (c.margin, c.point, Some(c.kind)),
            None => (f64::INFINITY, Vec::new(), None),
        };
        BoundReport {
            samples_tested: self.tested,
            violations: self.violations,
            worst_margin,
            worst_point,
            worst_check,
            slack,
            axis_gap,
            note,
        }
    }
}

fn axis_point(n: usize, t: f64) -> Vec<ComplexScalar> {
    let mut z = vec![ComplexScalar::new(0.0, 0.0); n];
    z[0] = ComplexScalar::new(t, 0.0);
    z
}

/// Samples both admissible balls and checks
///
/// ```text
/// Re det f'(z) ≥ lower(|z|) - slack,   |det f'(z)| ≤ upper(|z|) + slack.
/// ```
///
/// Each ball receives `cfg.sphere_samples` uniform points plus
/// `cfg.radial_grid` points on the first axis. The caller is responsible for
/// `‖f‖_{0,α} ≤ 1`, which can only be estimated from below; `det f'(0) = λ`
/// is re-checked. When `λ = 1` the upper domain is `{0}` and only the lower
/// envelope is checked.
pub fn verify_distortion<F: HolomorphicMap + ?Sized>(
    f: &F,
    params: &BlochClassParams,
    cfg: &SamplingConfig,
) -> Result<BoundReport> {
    let n = params.n();
    if f.dim() != n {
        return Err(Error::Precondition(format!(
            "map has dimension {}, parameters have n = {n}",
            f.dim()
        )));
    }
    let det0 = f.jacobian_det(&vec![ComplexScalar::new(0.0, 0.0); n])?;
    if (det0 - params.lambda()).norm() > NORMALIZATION_TOLERANCE {
        return Err(Error::Precondition(format!(
            "det f'(0) = {det0} differs from lambda = {}",
            params.lambda()
        )));
    }
    let envelope = DistortionEnvelope::new(*params)?;
    let radii = envelope.radii();
    let check_upper = radii.upper_domain > 0.0;

    let lower_at = |z: Vec<ComplexScalar>, index: usize| -> Result<Check> {
        let det = f.jacobian_det(&z)?;
        let t = vector_norm(&z).min(radii.lower_domain);
        Ok(Check {
            margin: det.re - envelope.lower(t)?,
            index,
            point: z,
            kind: CheckKind::Lower,
        })
    };
    let upper_at = |z: Vec<ComplexScalar>, index: usize| -> Result<Check> {
        let det = f.jacobian_det(&z)?;
        let t = vector_norm(&z).min(radii.upper_domain);
        Ok(Check {
            margin: envelope.upper(t)? - det.norm(),
            index,
            point: z,
            kind: CheckKind::Upper,
        })
    };

    let random = cfg.sphere_samples;
    let axis = closed_radii(cfg.radial_grid, radii.lower_domain);
    let upper_axis = if check_upper {
        closed_radii(cfg.radial_grid, radii.upper_domain)
    } else {
        Vec::new()
    };
    // Index layout: lower random, lower axis, upper random, upper axis.
    let upper_start = random + axis.len();
    let total = if check_upper {
        upper_start + random + upper_axis.len()
    } else {
        upper_start
    };

    let evaluate = |idx: usize| -> Result<Check> {
        if idx < random {
            let mut rng = keyed_rng(cfg.seed, Stream::DistortionPoints, idx as u64);
            lower_at(uniform_ball_point(&mut rng, n, radii.lower_domain), idx)
        } else if idx < upper_start {
            lower_at(axis_point(n, axis[idx - random]), idx)
        } else if idx < upper_start + random {
            let mut rng = keyed_rng(cfg.seed, Stream::DistortionPoints, idx as u64);
            upper_at(uniform_ball_point(&mut rng, n, radii.upper_domain), idx)
        } else {
            upper_at(axis_point(n, -upper_axis[idx - upper_start - random]), idx)
        }
    };

    let tally = (0..total)
        .into_par_iter()
        .map(|idx| evaluate(idx).map(|c| Tally::single(c, DISTORTION_SLACK)))
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;

    let mut axis_gap = 0.0f64;
    for &t in &axis {
        axis_gap = axis_gap.max(lower_at(axis_point(n, t), 0)?.margin.abs());
    }
    for &t in &upper_axis {
        axis_gap = axis_gap.max(upper_at(axis_point(n, -t), 0)?.margin.abs());
    }

    let mut note = String::from(
        "the det semi-norm normalization is assumed, not certified; sampled suprema are lower estimates",
    );
    if !check_upper {
        note.push_str("; lambda = 1 leaves only the origin in the upper domain, so only the lower envelope was checked");
    }
    Ok(tally.into_report(DISTORTION_SLACK, Some(axis_gap), note))
}

/// A polynomial map rescaled to satisfy the distortion hypotheses.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedMap {
    pub map: PolyMap,
    /// `det` of the Jacobian at 0 after normalization, real and in `(0, 1]`.
    pub lambda: f64,
    /// Estimated `‖f‖_{0,α}` of the input map.
    pub input_seminorm: f64,
}

/// Rescales `f` so that its estimated `‖·‖_{0,α}` is 1 and `det f'(0) > 0`.
///
/// With `S` the estimated semi-norm of `f` and `θ = arg det f'(0)`, the result
/// is `g = D · f / S` where `D` multiplies the first component by `e^{-iθ}`.
/// Then `‖g‖_{0,α} = ‖f‖_{0,α}/S` and `det g'(0) = |det f'(0)|/Sⁿ = λ`, and
/// `λ ≤ 1` because the sample grid contains the origin.
pub fn normalize_for_distortion(f: &PolyMap, alpha: f64, cfg: &SamplingConfig) -> Result<NormalizedMap> {
    let n = f.dim();
    let det0 = f.jacobian_det(&vec![ComplexScalar::new(0.0, 0.0); n])?;
    if det0.norm() == 0.0 {
        return Err(Error::Precondition("det f'(0) = 0 cannot be normalized".into()));
    }
    let seminorm = estimate_det_seminorm(f, alpha, cfg)?.value();
    let scaled = f.scaled(ComplexScalar::new(1.0 / seminorm, 0.0))?;
    let rotation = ComplexScalar::from_polar(1.0, -det0.arg());
    let map = scaled.with_component_scaled(0, rotation)?;
    let lambda = map.jacobian_det(&vec![ComplexScalar::new(0.0, 0.0); n])?.re.min(1.0);
    Ok(NormalizedMap {
        map,
        lambda,
        input_seminorm: seminorm,
    })
}

/// `T(u) = (1 - a u)^{α(n+1)} det f'(ζ u)` with the principal power.
///
/// `T(0) = det f'(0)`, and for the extremal map with `ζ = e₁` the trace
/// coincides with the comparison map `λ(a-u)/(a(1-au))`.
pub fn subordination_trace<F: HolomorphicMap + ?Sized>(
    f: &F,
    zeta: &[ComplexScalar],
    a: f64,
    params: &BlochClassParams,
    u: ComplexScalar,
) -> Result<ComplexScalar> {
    if (vector_norm(zeta) - 1.0).abs() > 1e-12 {
        return Err(domain("subordination_trace", format!("|zeta| = {} is not 1", vector_norm(zeta))));
    }
    if !(a > 0.0 && a < 1.0) {
        return Err(domain("subordination_trace", format!("a = {a} is not in (0, 1)")));
    }
    if u.norm() >= 1.0 {
        return Err(domain("subordination_trace", format!("|u| = {} is not below 1", u.norm())));
    }
    let z: Vec<_> = zeta.iter().map(|&c| c * u).collect();
    let factor = (ComplexScalar::new(1.0, 0.0) - u * a).powf(params.weight_exponent());
    Ok(factor * f.jacobian_det(&z)?)
}

/// Searches `𝔹ⁿ(0, radius)` for two distinct points with the same image.
///
/// For each of `cfg.pair_samples` pairs `(z', z'')`, the pair itself is
/// checked, and then Newton's method solves `f(w) = f(z')` from `w = z''`.
/// A pair counts as a collision when `|f(z') - f(w)| < 1e-12` while
/// `|z' - w| > 1e-6` and `w` stays in the ball. A clean report does not
/// prove univalence.
pub fn verify_injectivity_sample<F: HolomorphicMap + ?Sized>(
    f: &F,
    radius: f64,
    cfg: &SamplingConfig,
) -> Result<BoundReport> {
    if !(radius > 0.0 && radius < 1.0) {
        return Err(domain("verify_injectivity_sample", format!("radius = {radius} is not in (0, 1)")));
    }
    let n = f.dim();
    let tally = (0..cfg.pair_samples)
        .into_par_iter()
        .map(|idx| -> Result<Tally> {
            let mut rng = keyed_rng(cfg.seed, Stream::InjectivityPairs, idx as u64);
            let z1 = uniform_ball_point(&mut rng, n, radius);
            let z2 = uniform_ball_point(&mut rng, n, radius);
            let target = f.eval(&z1)?;
            let mut tally = pair_check(f, &z1, &target, z2.clone(), idx)?;
            if let Some(w) = newton_preimage(f, &target, z2, radius)? {
                tally = tally.merge(pair_check(f, &z1, &target, w, idx)?);
            }
            Ok(tally)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    Ok(tally.into_report(
        0.0,
        None,
        "sampled necessary condition for univalence; margin is the image separation minus 1e-12".into(),
    ))
}

fn pair_check<F: HolomorphicMap + ?Sized>(
    f: &F,
    z1: &[ComplexScalar],
    target: &[ComplexScalar],
    w: Vec<ComplexScalar>,
    index: usize,
) -> Result<Tally> {
    let separation = vector_norm(&difference(z1, &w));
    if separation <= DISTINCT_THRESHOLD {
        return Ok(Tally::default());
    }
    let image_gap = vector_norm(&difference(target, &f.eval(&w)?));
    Ok(Tally::single(
        Check {
            margin: image_gap - COLLISION_THRESHOLD,
            index,
            point: w,
            kind: CheckKind::Injectivity,
        },
        0.0,
    ))
}

// Returns the last in-ball iterate, or None if Newton leaves the ball or
// meets a singular Jacobian.
fn newton_preimage<F: HolomorphicMap + ?Sized>(
    f: &F,
    target: &[ComplexScalar],
    mut w: Vec<ComplexScalar>,
    radius: f64,
) -> Result<Option<Vec<ComplexScalar>>> {
    for _ in 0..NEWTON_ITERATIONS {
        let residual = difference(&f.eval(&w)?, target);
        if vector_norm(&residual) < COLLISION_THRESHOLD * 1e-2 {
            break;
        }
        let Some(step) = f.jacobian(&w)?.solve(&residual) else {
            return Ok(None);
        };
        let next = difference(&w, &step);
        if vector_norm(&next) > radius || check_point(f.dim(), &next, false).is_err() {
            return Ok(None);
        }
        w = next;
    }
    Ok(Some(w))
}

fn difference(a: &[ComplexScalar], b: &[ComplexScalar]) -> Vec<ComplexScalar> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}
