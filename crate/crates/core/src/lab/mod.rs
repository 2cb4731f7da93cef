//! Test maps, Monte Carlo estimators and verification harnesses.
//!
//! All sampling is keyed by `(seed, stream, index)`, and parallel reductions
//! are order independent, so every result is a pure function of its inputs
//! and the [`SamplingConfig`].

mod estimators;
mod maps;
mod sampling;
mod verify;

pub use estimators::{
    estimate_alpha_seminorm, estimate_det_seminorm, estimate_hardy_norm, HardyNormEstimate,
    SupremumEstimate,
};
pub use maps::{ExtremalMap, HolomorphicMap, Monomial, PolyMap, MAX_TOTAL_DEGREE};
pub use sampling::{
    boundary_radii, closed_radii, interior_radii, keyed_rng, uniform_ball_point,
    uniform_sphere_point, SamplingConfig, Stream,
};
pub use verify::{
    normalize_for_distortion, subordination_trace, verify_distortion, verify_injectivity_sample,
    BoundReport, CheckKind, NormalizedMap, COLLISION_THRESHOLD, DISTINCT_THRESHOLD,
    DISTORTION_SLACK, NORMALIZATION_TOLERANCE,
};

use serde::ser::{SerializeSeq, Serializer};

use crate::matrix::ComplexScalar;

// Points are written as arrays of `[re, im]` pairs.
pub(crate) fn serialize_point<S: Serializer>(
    point: &[ComplexScalar],
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = serializer.serialize_seq(Some(point.len()))?;
    for c in point {
        seq.serialize_element(&[c.re, c.im])?;
    }
    seq.end()
}
