//! Primitives on the unit spheres S¹, S² (and S³ where projections need it):
//! unit vectors, geodesic arcs, spherical distance, hemispheres, caps, lunes,
//! and angles between geodesics.
//!
//! All values are immutable and all operations are pure, so everything here
//! is safe to evaluate concurrently.

use crate::error::{Error, Result};
use crate::tol::{acos_clamped, ANGLE_EPS, NORM_BAND};
use nalgebra::SVector;
use std::f64::consts::PI;

/// A point of the unit sphere in ambient dimension `D`.
///
/// Construction normalizes the input and rejects vectors whose norm is
/// outside `[1 − 1e-6, 1 + 1e-6]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitVec<const D: usize>(SVector<f64, D>);

pub type UnitVec2 = UnitVec<2>;
pub type UnitVec3 = UnitVec<3>;
pub type UnitVec4 = UnitVec<4>;

impl<const D: usize> UnitVec<D> {
    pub fn try_new(v: SVector<f64, D>) -> Result<Self> {
        let norm = v.norm();
        if (norm - 1.0).abs() > NORM_BAND {
            return Err(Error::NotUnit { norm });
        }
        Ok(Self(v / norm))
    }

    /// Normalize an arbitrary nonzero vector onto the sphere.
    pub fn normalize(v: SVector<f64, D>) -> Result<Self> {
        let norm = v.norm();
        if norm < 1e-12 {
            return Err(Error::ZeroVector);
        }
        Ok(Self(v / norm))
    }

    #[inline]
    pub fn as_vector(&self) -> &SVector<f64, D> {
        &self.0
    }

    #[inline]
    pub fn into_vector(self) -> SVector<f64, D> {
        self.0
    }

    #[inline]
    pub fn dot(&self, other: &Self) -> f64 {
        self.0.dot(&other.0)
    }

    #[inline]
    pub fn antipode(&self) -> Self {
        Self(-self.0)
    }

    pub fn is_antipodal_to(&self, other: &Self, tol: f64) -> bool {
        (self.0 + other.0).norm() <= tol
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.0 - other.0).norm() <= tol
    }
}

impl UnitVec<2> {
    pub fn from_angle(theta: f64) -> Self {
        Self(SVector::<f64, 2>::new(theta.cos(), theta.sin()))
    }

    pub fn angle(&self) -> f64 {
        self.0.y.atan2(self.0.x)
    }
}

impl UnitVec<3> {
    pub fn new_unchecked(x: f64, y: f64, z: f64) -> Self {
        Self(SVector::<f64, 3>::new(x, y, z).normalize())
    }

    pub fn cross(&self, other: &Self) -> SVector<f64, 3> {
        self.0.cross(&other.0)
    }

    /// An arbitrary but deterministic orthonormal pair spanning the
    /// tangent plane at this point.
    pub fn tangent_basis(&self) -> (SVector<f64, 3>, SVector<f64, 3>) {
        let n = self.0;
        let helper = if n.x.abs() < 0.9 {
            SVector::<f64, 3>::new(1.0, 0.0, 0.0)
        } else {
            SVector::<f64, 3>::new(0.0, 1.0, 0.0)
        };
        let u = n.cross(&helper).normalize();
        let v = n.cross(&u);
        (u, v)
    }
}

/// Spherical (angular) distance `arccos(P·Q)`, in `[0, π]`.
pub fn sph_dist<const D: usize>(p: &UnitVec<D>, q: &UnitVec<D>) -> f64 {
    acos_clamped(p.dot(q))
}

/// Spherical distance through the chord, `2·asin(‖p−q‖/2)`.
///
/// Equal to [`sph_dist`] in exact arithmetic but loses no precision for
/// nearby points, where `acos` of a dot product cannot resolve below
/// ~1e-8; used by every predicate that certifies a 1e-9 tolerance.
pub fn chord_angle<const D: usize>(p: &UnitVec<D>, q: &UnitVec<D>) -> f64 {
    let half = (p.as_vector() - q.as_vector()).norm() / 2.0;
    2.0 * half.clamp(-1.0, 1.0).asin()
}

/// Point at parameter `t ∈ [0, 1]` along the shorter great-circle arc
/// from `p` to `q`, traversed at constant angular speed.
pub fn arc_point<const D: usize>(p: &UnitVec<D>, q: &UnitVec<D>, t: f64) -> Result<UnitVec<D>> {
    if p.is_antipodal_to(q, NORM_BAND) {
        return Err(Error::AntipodalPoints);
    }
    let omega = sph_dist(p, q);
    if omega <= ANGLE_EPS {
        return Ok(*p);
    }
    // Slerp keeps the angular speed constant; the normalized linear
    // combination of the arc definition traces the same point set.
    let s = omega.sin();
    let a = ((1.0 - t) * omega).sin() / s;
    let b = (t * omega).sin() / s;
    UnitVec::normalize(a * p.as_vector() + b * q.as_vector())
}

/// Closed hemisphere `H(center) = {q : center·q ≥ 0}`.
#[derive(Clone, Copy, Debug)]
pub struct Hemisphere<const D: usize> {
    pub center: UnitVec<D>,
}

impl<const D: usize> Hemisphere<D> {
    pub fn new(center: UnitVec<D>) -> Self {
        Self { center }
    }

    pub fn contains(&self, q: &UnitVec<D>, tol: f64) -> bool {
        self.center.dot(q) >= -tol
    }
}

/// Spherical cap `{q : arccos(center·q) ≤ radius}` with radius in `(0, π/2]`.
/// Radius `π/2` coincides with the hemisphere of the same center.
#[derive(Clone, Copy, Debug)]
pub struct Cap<const D: usize> {
    pub center: UnitVec<D>,
    pub radius: f64,
}

impl<const D: usize> Cap<D> {
    pub fn new(center: UnitVec<D>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius <= PI / 2.0 + ANGLE_EPS) {
            return Err(Error::InvalidCapRadius(radius));
        }
        Ok(Self { center, radius })
    }

    pub fn contains(&self, q: &UnitVec<D>, tol: f64) -> bool {
        sph_dist(&self.center, q) <= self.radius + tol
    }
}

/// Intersection of two hemispheres with distinct, non-antipodal centers.
#[derive(Clone, Copy, Debug)]
pub struct Lune<const D: usize> {
    pub first: Hemisphere<D>,
    pub second: Hemisphere<D>,
}

impl<const D: usize> Lune<D> {
    pub fn new(first: Hemisphere<D>, second: Hemisphere<D>) -> Result<Self> {
        let p = &first.center;
        let q = &second.center;
        if p.approx_eq(q, NORM_BAND) || p.is_antipodal_to(q, NORM_BAND) {
            return Err(Error::InvalidLune);
        }
        Ok(Self { first, second })
    }
}

/// Thickness of a lune: `π − |P̃Q̃|`, in `(0, π)`.
pub fn lune_thickness<const D: usize>(lune: &Lune<D>) -> f64 {
    PI - sph_dist(&lune.first.center, &lune.second.center)
}

/// Angle at `p` between the geodesics `p→a` and `p→b`, in `[0, π]`.
///
/// Computed from the tangent directions of the two arcs at `p`.
pub fn vertex_angle<const D: usize>(
    p: &UnitVec<D>,
    a: &UnitVec<D>,
    b: &UnitVec<D>,
) -> Result<f64> {
    let ta = tangent_toward(p, a)?;
    let tb = tangent_toward(p, b)?;
    Ok(acos_clamped(ta.dot(&tb)))
}

/// Unit tangent at `p` of the geodesic from `p` to `q`.
pub(crate) fn tangent_toward<const D: usize>(
    p: &UnitVec<D>,
    q: &UnitVec<D>,
) -> Result<SVector<f64, D>> {
    let proj = q.as_vector() - p.dot(q) * p.as_vector();
    let norm = proj.norm();
    if norm < 1e-12 {
        return Err(Error::DegenerateVertexAngle);
    }
    Ok(proj / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Vector2, Vector3};

    fn u3(x: f64, y: f64, z: f64) -> UnitVec3 {
        UnitVec::normalize(Vector3::new(x, y, z)).unwrap()
    }

    #[test]
    fn unit_vec_rejects_bad_norms() {
        assert!(UnitVec::try_new(Vector2::new(2.0, 0.0)).is_err());
        assert!(UnitVec::try_new(Vector2::new(1.0 + 5e-7, 0.0)).is_ok());
        assert!(UnitVec::<2>::normalize(Vector2::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn sph_dist_trivia() {
        let p = u3(0.0, 0.0, 1.0);
        let q = u3(1.0, 0.0, 0.0);
        assert!((sph_dist(&p, &q) - PI / 2.0).abs() < 1e-12);
        assert_eq!(sph_dist(&p, &p), 0.0);
        let m = u3(1.0, 0.0, 0.0);
        assert!((sph_dist(&m, &m.antipode()) - PI).abs() < 1e-12);
    }

    #[test]
    fn arc_point_endpoints_and_midpoint() {
        let p = u3(1.0, 0.0, 0.0);
        let q = u3(0.0, 1.0, 0.0);
        assert!(arc_point(&p, &q, 0.0).unwrap().approx_eq(&p, 1e-12));
        assert!(arc_point(&p, &q, 1.0).unwrap().approx_eq(&q, 1e-12));
        let mid = arc_point(&p, &q, 0.5).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(mid.approx_eq(&u3(s, s, 0.0), 1e-12));
        assert!(arc_point(&p, &p.antipode(), 0.5).is_err());
    }

    #[test]
    fn arc_point_constant_speed() {
        let p = u3(0.3, -0.2, 0.9);
        let q = u3(-0.5, 0.7, 0.1);
        let total = sph_dist(&p, &q);
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            let x = arc_point(&p, &q, t).unwrap();
            assert!((sph_dist(&p, &x) - t * total).abs() < 1e-12);
        }
    }

    #[test]
    fn lune_thickness_formula() {
        let p = u3(0.0, 0.0, 1.0);
        let q = u3(1.0, 0.0, 0.0);
        let lune = Lune::new(Hemisphere::new(p), Hemisphere::new(q)).unwrap();
        assert!((lune_thickness(&lune) - PI / 2.0).abs() < 1e-12);

        let r = u3(0.3f64.sin(), 0.0, 0.3f64.cos());
        let lune = Lune::new(Hemisphere::new(p), Hemisphere::new(r)).unwrap();
        assert!((lune_thickness(&lune) - (PI - 0.3)).abs() < 1e-12);

        assert!(Lune::new(Hemisphere::new(p), Hemisphere::new(p)).is_err());
        assert!(Lune::new(Hemisphere::new(p), Hemisphere::new(p.antipode())).is_err());
    }

    #[test]
    fn lune_identity_with_center_distance() {
        // thickness + center distance = pi, by construction of the formula
        let p = u3(0.2, 0.5, 0.84);
        let q = u3(-0.4, 0.9, 0.17);
        let lune = Lune::new(Hemisphere::new(p), Hemisphere::new(q)).unwrap();
        assert!((lune_thickness(&lune) + sph_dist(&p, &q) - PI).abs() < 1e-15);
    }

    #[test]
    fn vertex_angle_orthant_and_degenerate() {
        let p = u3(0.0, 0.0, 1.0);
        let a = u3(1.0, 0.0, 0.0);
        let b = u3(0.0, 1.0, 0.0);
        assert!((vertex_angle(&p, &a, &b).unwrap() - PI / 2.0).abs() < 1e-12);
        assert!(vertex_angle(&p, &a, &a).unwrap().abs() < 1e-12);
        let c = u3(-1.0, 0.0, 0.0);
        assert!((vertex_angle(&p, &a, &c).unwrap() - PI).abs() < 1e-12);
        assert!(vertex_angle(&p, &p, &a).is_err());
        assert!(vertex_angle(&p, &p.antipode(), &a).is_err());
    }

    #[test]
    fn cap_containment() {
        let c = u3(0.0, 0.0, 1.0);
        let cap = Cap::new(c, 0.5).unwrap();
        assert!(cap.contains(&c, 0.0));
        let boundary = u3(0.5f64.sin(), 0.0, 0.5f64.cos());
        assert!(cap.contains(&boundary, 1e-12));
        assert!(!cap.contains(&c.antipode(), 1e-9));
        assert!(Cap::new(c, 0.0).is_err());
        assert!(Cap::new(c, 2.0).is_err());
    }

    #[test]
    fn sph_dist_metric_on_sampled_points() {
        // symmetry + triangle inequality on a deterministic sample
        let pts: Vec<UnitVec3> = (0..12)
            .map(|i| {
                let a = i as f64 * 0.7;
                let b = i as f64 * 1.3;
                u3(a.cos() * b.sin(), a.sin() * b.sin(), b.cos())
            })
            .collect();
        for p in &pts {
            for q in &pts {
                let d1 = sph_dist(p, q);
                let d2 = sph_dist(q, p);
                assert!((d1 - d2).abs() < 1e-12);
                for r in &pts {
                    assert!(sph_dist(p, r) <= d1 + sph_dist(q, r) + 1e-12);
                }
            }
        }
    }
}
