//! Global numeric tolerances.
//!
//! Every angle comparison in the crate goes through the single knob
//! [`ANGLE_EPS`] so that predicates stay mutually consistent. Constructors
//! accept vectors whose norm deviates from 1 by at most [`NORM_BAND`] and
//! renormalize them.

/// Default tolerance for angle comparisons, in radians.
pub const ANGLE_EPS: f64 = 1e-9;

/// Accepted deviation of input vector norms from 1 before rejection.
pub const NORM_BAND: f64 = 1e-6;

/// Hemisphericity margin: bodies must fit in a cap of radius `π/2 − HEMI_MARGIN`.
pub const HEMI_MARGIN: f64 = 1e-6;

/// `acos` with the argument clamped to `[-1, 1]`.
///
/// Dot products of unit vectors routinely land a few ulps outside the
/// domain; clamping avoids NaN without changing any answer by more than
/// the rounding already present.
#[inline]
pub fn acos_clamped(x: f64) -> f64 {
    x.clamp(-1.0, 1.0).acos()
}
