//! Wulff shapes, convex integrands, and spherical convex geometry.
//!
//! The crate builds planar Wulff shapes and their duals from convex
//! integrands, checks the three equivalent characterizations of an apex
//! point, and carries a full toolkit for convex bodies on S²: polar
//! duality, widths and constant width, Reuleaux-type bodies, ball hulls,
//! and the approximation pipeline that turns a constant-width body of
//! width above π/2 into one bounded by circle arcs of a single radius
//! and great-circle segments.
//!
//! Every capability has a runnable demo under `examples/`; the `wulffc`
//! binary exposes the same operations on JSON inputs.

pub mod approx;
pub mod error;
pub mod hull;
pub mod integrand;
pub mod metrics;
pub mod render;
pub mod sphere;
pub mod spherical;
pub mod tol;
pub mod wulff;

pub use error::{Error, Result};
