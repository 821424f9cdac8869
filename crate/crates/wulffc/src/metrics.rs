//! Hausdorff distances — sampled on the sphere, exact for planar convex
//! polygons — and the polar-isometry residual check.

use crate::error::{Error, Result};
use crate::sphere::{UnitVec, UnitVec3};
use crate::spherical::SphericalBody;
use crate::tol::ANGLE_EPS;
use crate::wulff::WulffPolygon;
use nalgebra::Vector2;
use serde::Serialize;

/// Default boundary sample budget per body.
pub const DEFAULT_SAMPLES: usize = 2048;
/// Oracle runs sample ten times denser.
pub const ORACLE_FACTOR: usize = 10;

/// A computed distance with the witness pair that attains it.
#[derive(Clone, Debug, Serialize)]
pub struct DistanceResult {
    pub value: f64,
    pub witness_a: [f64; 3],
    pub witness_b: [f64; 3],
    pub samples: usize,
}

fn per_feature_count(body: &SphericalBody, budget: usize) -> usize {
    let arcs = body
        .features()
        .iter()
        .filter(|f| !matches!(f, crate::spherical::ArcFeature::Vertex { .. }))
        .count()
        .max(1);
    budget.div_ceil(arcs).next_power_of_two()
}

/// Directed sampled distance: max over boundary samples of `a` of the
/// distance to `b` (zero inside, certified by the constraint view).
fn directed_sph(a: &SphericalBody, b: &SphericalBody, budget: usize) -> (f64, UnitVec3) {
    let per = per_feature_count(a, budget);
    let mut best = 0.0f64;
    let mut witness = a.features()[0].start();
    for q in a.boundary_samples(per) {
        let d = b.distance_to_body(&q);
        if d > best {
            best = d;
            witness = q;
        }
    }
    (best, witness)
}

/// Sampled spherical Hausdorff distance over about `m` boundary samples
/// per body. Sample sets are nested under doubling of `m`, so the value
/// converges to the true distance from below.
pub fn hausdorff_sph(a: &SphericalBody, b: &SphericalBody, m: usize) -> DistanceResult {
    let (dab, wab) = directed_sph(a, b, m);
    let (dba, wba) = directed_sph(b, a, m);
    let (value, witness, other) = if dab >= dba {
        (dab, wab, b)
    } else {
        (dba, wba, a)
    };
    let partner = nearest_boundary_point(other, &witness);
    let v = witness.as_vector();
    let pv = partner.as_vector();
    DistanceResult {
        value,
        witness_a: [v.x, v.y, v.z],
        witness_b: [pv.x, pv.y, pv.z],
        samples: m,
    }
}

fn nearest_boundary_point(body: &SphericalBody, q: &UnitVec3) -> UnitVec3 {
    let mut best = body.features()[0].start();
    let mut best_d = f64::INFINITY;
    for p in body.boundary_samples(512) {
        let d = crate::sphere::sph_dist(&p, q);
        if d < best_d {
            best_d = d;
            best = p;
        }
    }
    best
}

/// Exact planar Hausdorff distance between convex polygons: the directed
/// distances are attained at vertices, and point-to-polygon distances
/// are closed-form.
pub fn hausdorff_planar(a: &WulffPolygon, b: &WulffPolygon) -> DistanceResult {
    let (dab, wab) = directed_planar(a, b);
    let (dba, wba) = directed_planar(b, a);
    let (value, wa, other) = if dab >= dba {
        (dab, wab, b)
    } else {
        (dba, wba, a)
    };
    let wb = closest_point_on_polygon(other, &wa);
    DistanceResult {
        value,
        witness_a: [wa.x, wa.y, 0.0],
        witness_b: [wb.x, wb.y, 0.0],
        samples: a.vertices().len() + b.vertices().len(),
    }
}

fn directed_planar(a: &WulffPolygon, b: &WulffPolygon) -> (f64, Vector2<f64>) {
    let mut best = 0.0f64;
    let mut witness = a.vertices()[0];
    for v in a.vertices() {
        let d = point_to_polygon(b, v);
        if d > best {
            best = d;
            witness = *v;
        }
    }
    (best, witness)
}

pub(crate) fn point_to_polygon(poly: &WulffPolygon, p: &Vector2<f64>) -> f64 {
    if poly.depth(p) >= 0.0 {
        return 0.0;
    }
    (closest_point_on_polygon(poly, p) - p).norm()
}

fn closest_point_on_polygon(poly: &WulffPolygon, p: &Vector2<f64>) -> Vector2<f64> {
    let verts = poly.vertices();
    let n = verts.len();
    let mut best = verts[0];
    let mut best_d = f64::INFINITY;
    for i in 0..n {
        let a = verts[i];
        let b = verts[(i + 1) % n];
        let e = b - a;
        let t = ((p - a).dot(&e) / e.norm_squared()).clamp(0.0, 1.0);
        let proj = a + e * t;
        let d = (proj - p).norm();
        if d < best_d {
            best_d = d;
            best = proj;
        }
    }
    best
}

/// `|h(C1, C2) − h(C1°, C2°)|` at the given sampling density.
///
/// The polar isometry holds when some point is interior to both bodies
/// and both bodies lie in its hemisphere; that hypothesis is certified
/// here through the interior-cap witnesses before measuring.
pub fn polar_isometry_residual(c1: &SphericalBody, c2: &SphericalBody, m: usize) -> Result<f64> {
    let p = UnitVec::normalize(c1.witness().as_vector() + c2.witness().as_vector())
        .map_err(|_| Error::NonHemispherical)?;
    for (body, place) in [(c1, "first body"), (c2, "second body")] {
        if !body.contains(&p, -ANGLE_EPS) {
            return Err(Error::WitnessVerification { place });
        }
        for q in body.boundary_samples(64) {
            if p.dot(&q) < -ANGLE_EPS {
                return Err(Error::NonHemispherical);
            }
        }
        body.interior_cap_witness()?;
    }
    let primal = hausdorff_sph(c1, c2, m).value;
    let dual = hausdorff_sph(&c1.polar_dual()?, &c2.polar_dual()?, m).value;
    Ok((primal - dual).abs())
}
