//! Poincaré geometry of the unit disk and the Möbius comparison map.

use crate::error::{domain, Result};
use crate::matrix::ComplexScalar;

/// Hyperbolic distance `artanh |(z-w)/(1-z̄w)|` between two points of the unit disk.
pub fn hyperbolic_distance(z: ComplexScalar, w: ComplexScalar) -> Result<f64> {
    for (name, p) in [("z", z), ("w", w)] {
        if !(p.norm() < 1.0) {
            return Err(domain(
                "hyperbolic_distance",
                format!("{name} = {p} is not inside the unit disk"),
            ));
        }
    }
    Ok(pseudo_chordal(z, w).atanh())
}

/// `|(z-w)/(1-z̄w)|`.
pub fn pseudo_chordal(z: ComplexScalar, w: ComplexScalar) -> f64 {
    (z - w).norm() / (ComplexScalar::new(1.0, 0.0) - z.conj() * w).norm()
}

/// The point of the hyperbolic circle `𝕊_h(center, radius)` at parameter `angle`.
///
/// Solves `(z - b)/(1 - b̄z) = tanh(radius)·e^{i·angle}` for `z`.
pub fn hyperbolic_circle_point(center: ComplexScalar, radius: f64, angle: f64) -> ComplexScalar {
    let w = ComplexScalar::from_polar(radius.tanh(), angle);
    (w + center) / (ComplexScalar::new(1.0, 0.0) + center.conj() * w)
}

/// Euclidean center and radius of the hyperbolic disk `𝔻_h(center, radius)`.
pub fn euclidean_disk(center: ComplexScalar, radius: f64) -> (ComplexScalar, f64) {
    let t = radius.tanh();
    let b2 = center.norm_sqr();
    let denom = 1.0 - t * t * b2;
    (center * ((1.0 - t * t) / denom), t * (1.0 - b2) / denom)
}

/// The Möbius map `u ↦ λ(a-u)/(a(1-au))`.
///
/// It sends `0 ↦ λ` and `a ↦ 0`, and maps the hyperbolic disk
/// `𝔻_h(a, artanh a₀)` onto the Euclidean disk of radius `λa₀/a`.
pub fn mobius_comparison(u: ComplexScalar, lambda: f64, a: f64) -> Result<ComplexScalar> {
    if !(a > 0.0 && a < 1.0) {
        return Err(domain("mobius_comparison", format!("a = {a} is not in (0, 1)")));
    }
    if !(u.norm() < 1.0 / a) {
        return Err(domain(
            "mobius_comparison",
            format!("|u| = {} reaches the pole at 1/a = {}", u.norm(), 1.0 / a),
        ));
    }
    let one = ComplexScalar::new(1.0, 0.0);
    Ok((ComplexScalar::new(a, 0.0) - u) * lambda / ((one - u * a) * a))
}
