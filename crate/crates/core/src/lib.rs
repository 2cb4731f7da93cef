//! Distortion envelopes, schlicht radii and Landau-Bloch type constants for
//! holomorphic maps of the unit ball `𝔹ⁿ ⊂ ℂⁿ`, together with exact test maps
//! and sampling harnesses that check the inequalities on live functions.
//!
//! ```
//! use landau_bloch::{admissible_radii, m_of_lambda, phi, BlochClassParams, RootSolverConfig};
//!
//! let params = BlochClassParams::new(1.0, 1, 0.5, 1.0)?;
//! let m = m_of_lambda(&params, &RootSolverConfig::default())?;
//! assert!((phi(m, &params)? - 0.5).abs() < 1e-12);
//! let radii = admissible_radii(&params)?;
//! assert!(m < radii.upper_domain && radii.upper_domain < radii.lower_domain);
//! # Ok::<(), landau_bloch::Error>(())
//! ```
//!
//! Modules:
//!
//! * [`matrix`]: complex matrices, operator norms, determinants.
//! * [`constants`]: parameter records, the profile `φ` and its inverse `m(λ)`.
//! * [`bounds`]: distortion envelopes and the schlicht radius.
//! * [`hardy`]: univalence radius and covered ball for `Hᵖ` maps.
//! * [`hyperbolic`]: Poincaré disk geometry and the Möbius comparison map.
//! * [`quadrature`]: adaptive Gauss-Kronrod integration.
//! * [`lab`]: test maps, estimators and verification harnesses.
//! * [`cli`]: the `landau-bloch` command line.

pub mod bounds;
pub mod cli;
pub mod constants;
mod error;
pub mod hardy;
pub mod hyperbolic;
pub mod lab;
pub mod matrix;
pub mod quadrature;

pub use bounds::{
    admissible_radii, distortion_lower, distortion_upper, schlicht_radius_lower, AdmissibleRadii,
    DistortionEnvelope,
};
pub use constants::{a0, m_of_lambda, phi, BlochClassParams, RootSolverConfig};
pub use error::{Error, Result};
pub use hardy::{hardy_landau, minimize_oscillation_weight, HardyClassParams, HardyLandauResult};
pub use matrix::{ComplexMatrix, ComplexScalar};
pub use quadrature::QuadratureConfig;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/matrices.md")]
    mod matrices {}
    #[doc = include_str!("../../../book/src/profile.md")]
    mod profile {}
    #[doc = include_str!("../../../book/src/distortion.md")]
    mod distortion {}
    #[doc = include_str!("../../../book/src/schlicht.md")]
    mod schlicht {}
    #[doc = include_str!("../../../book/src/hardy.md")]
    mod hardy {}
    #[doc = include_str!("../../../book/src/hyperbolic.md")]
    mod hyperbolic {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
